#pragma once

// Reference implementations used to cross-check the library. Everything here
// is written the slow, obvious way on purpose and shares no code with src/.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// a dominates b: a >= b everywhere, a > b somewhere.
inline bool dominates(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    bool strict = false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
        if (a[i] > b[i]) strict = true;
    }
    return strict;
}

// O(n^2) filter: keep a point iff no other point dominates it and it is not a
// duplicate of an earlier kept point.
inline std::vector<Eigen::VectorXd> nondominated(const std::vector<Eigen::VectorXd>& pts) {
    std::vector<Eigen::VectorXd> kept;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool drop = false;
        for (std::size_t j = 0; j < pts.size() && !drop; ++j) {
            if (j != i && dominates(pts[j], pts[i])) drop = true;
        }
        for (const auto& k : kept) {
            if (drop) break;
            if (k == pts[i]) drop = true;
        }
        if (!drop) kept.push_back(pts[i]);
    }
    return kept;
}

// Monte Carlo hypervolume: fraction of uniform samples in [ref, hi] that land
// below at least one point, scaled by the box volume.
inline double mc_hypervolume(const std::vector<Eigen::VectorXd>& pts, const Eigen::VectorXd& ref,
                             std::int64_t samples, std::uint64_t seed) {
    const Eigen::Index m = ref.size();
    Eigen::VectorXd hi = ref;
    for (const auto& p : pts) hi = hi.cwiseMax(p);
    double box = 1.0;
    for (Eigen::Index d = 0; d < m; ++d) box *= hi[d] - ref[d];
    if (box <= 0.0) return 0.0;

    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd x(m);
    std::int64_t inside = 0;
    for (std::int64_t s = 0; s < samples; ++s) {
        for (Eigen::Index d = 0; d < m; ++d) x[d] = ref[d] + unit(gen) * (hi[d] - ref[d]);
        for (const auto& p : pts) {
            bool covered = true;
            for (Eigen::Index d = 0; d < m && covered; ++d) covered = x[d] < p[d];
            if (covered) {
                ++inside;
                break;
            }
        }
    }
    return box * static_cast<double>(inside) / static_cast<double>(samples);
}

// Sparsity written straight from its definition: for each objective sort the
// front values descending and average the squared consecutive gaps, then
// divide by M - 1.
inline double sparsity_direct(const std::vector<Eigen::VectorXd>& pts) {
    const std::size_t M = pts.size();
    const Eigen::Index m = pts[0].size();
    double total = 0.0;
    for (Eigen::Index d = 0; d < m; ++d) {
        std::vector<double> vals;
        for (const auto& p : pts) vals.push_back(p[d]);
        std::sort(vals.begin(), vals.end(), std::greater<double>());
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
            const double gap = vals[k] - vals[k + 1];
            total += gap * gap;
        }
    }
    return total / static_cast<double>(M - 1);
}

// Uniform random objective sets for fuzzing.
inline std::vector<Eigen::VectorXd> random_points(int n, int m, double lo, double hi,
                                                  std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unit(lo, hi);
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd p(m);
        for (int d = 0; d < m; ++d) p[d] = unit(gen);
        pts.push_back(p);
    }
    return pts;
}

}  // namespace oracle
