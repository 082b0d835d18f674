#include "pslmorl/preference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pslmorl {

bool is_valid_preference(const PreferenceVector& w, double tol) {
    if (w.size() < 2) return false;
    if ((w.array() < 0.0).any()) return false;
    return std::abs(w.sum() - 1.0) <= tol;
}

void check_preference(const PreferenceVector& w) {
    if (!is_valid_preference(w)) {
        throw std::invalid_argument("invalid preference vector");
    }
}

namespace {

void check_region(const PreferenceRegion& r) {
    if (r.region_count < 1 || r.region_index < 0 || r.region_index >= r.region_count) {
        throw std::invalid_argument("invalid preference region");
    }
}

}  // namespace

PreferenceVector sample_preference(Rng& rng, int m,
                                   std::optional<PreferenceRegion> region) {
    if (m < 2) throw std::invalid_argument("preference dimension must be >= 2");
    if (!region || region->region_count == 1) {
        return rng.simplex_uniform(m);
    }
    check_region(*region);
    const double lo = static_cast<double>(region->region_index) / region->region_count;
    const double hi = static_cast<double>(region->region_index + 1) / region->region_count;

    if (m == 2) {
        constexpr int kMaxRetries = 100000;
        for (int i = 0; i < kMaxRetries; ++i) {
            PreferenceVector w = rng.simplex_uniform(2);
            if (w[0] >= lo && w[0] < hi) return w;
        }
        throw std::runtime_error("preference rejection sampling exceeded retry cap");
    }

    // Stratify the first coordinate, spread the rest uniformly on the
    // remaining sub-simplex.
    PreferenceVector w(m);
    const double first = rng.uniform(lo, hi);
    Eigen::VectorXd rest = rng.simplex_uniform(m - 1);
    w[0] = first;
    w.tail(m - 1) = (1.0 - first) * rest;
    return w;
}

double scalarize(const PreferenceVector& w, const Eigen::VectorXd& values) {
    if (w.size() != values.size()) {
        throw std::invalid_argument("preference/value dimension mismatch");
    }
    return w.dot(values);
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cosine similarity dimension mismatch");
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na < 1e-12 || nb < 1e-12) return 0.0;
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double directional_angle(const PreferenceVector& w, const Eigen::VectorXd& q) {
    if (q.norm() < 1e-12) return M_PI / 2.0;
    return std::acos(cosine_similarity(w, q));
}

Eigen::VectorXd directional_angle_grad_q(const PreferenceVector& w,
                                         const Eigen::VectorXd& q) {
    const double nw = w.norm();
    const double nq = q.norm();
    if (nw < 1e-12 || nq < 1e-12) return Eigen::VectorXd::Zero(q.size());
    const double cos = cosine_similarity(w, q);
    // arccos is not differentiable at the poles; the gradient is cut off
    // there instead of blowing up.
    if (std::abs(cos) > 1.0 - 1e-9) return Eigen::VectorXd::Zero(q.size());
    const Eigen::VectorXd dcos = w / (nw * nq) - cos * q / (nq * nq);
    return -dcos / std::sqrt(1.0 - cos * cos);
}

Interpolator Interpolator::piecewise_linear(
    std::vector<std::pair<PreferenceVector, PreferenceVector>> anchors) {
    if (anchors.size() < 2) {
        throw std::invalid_argument("piecewise-linear interpolator needs >= 2 anchors");
    }
    for (const auto& [src, dst] : anchors) {
        check_preference(src);
        check_preference(dst);
    }
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        for (std::size_t j = i + 1; j < anchors.size(); ++j) {
            if ((anchors[i].first - anchors[j].first).norm() < 1e-12) {
                throw std::invalid_argument("anchor sources must be distinct");
            }
        }
    }
    Interpolator in;
    in.mode = Mode::PiecewiseLinear;
    in.anchors = std::move(anchors);
    return in;
}

PreferenceVector interpolate_preference(const Interpolator& interp,
                                        const PreferenceVector& w) {
    check_preference(w);
    if (interp.mode == Interpolator::Mode::Identity) return w;
    if (interp.anchors.size() < 2) {
        throw std::invalid_argument("piecewise-linear interpolator needs >= 2 anchors");
    }

    // Two nearest anchors by source distance.
    std::size_t best = 0, second = 1;
    double d_best = (interp.anchors[0].first - w).norm();
    double d_second = (interp.anchors[1].first - w).norm();
    if (d_second < d_best) {
        std::swap(best, second);
        std::swap(d_best, d_second);
    }
    for (std::size_t i = 2; i < interp.anchors.size(); ++i) {
        const double d = (interp.anchors[i].first - w).norm();
        if (d < d_best) {
            second = best;
            d_second = d_best;
            best = i;
            d_best = d;
        } else if (d < d_second) {
            second = i;
            d_second = d;
        }
    }

    const double total = d_best + d_second;
    double t = total < 1e-12 ? 0.0 : d_best / total;  // weight of the farther anchor
    PreferenceVector out = (1.0 - t) * interp.anchors[best].second +
                           t * interp.anchors[second].second;
    out = out.cwiseMax(0.0);
    const double s = out.sum();
    if (s <= 0.0) {
        throw std::runtime_error("interpolated preference degenerated to zero");
    }
    return out / s;
}

namespace {

// All lattice points with coordinates i/h summing to 1, lexicographic order.
void enumerate_lattice(int m, int h, std::vector<int>& partial,
                       std::vector<PreferenceVector>& out) {
    if (static_cast<int>(partial.size()) == m - 1) {
        int used = 0;
        for (int v : partial) used += v;
        PreferenceVector w(m);
        for (int i = 0; i < m - 1; ++i) w[i] = static_cast<double>(partial[i]) / h;
        w[m - 1] = static_cast<double>(h - used) / h;
        out.push_back(w);
        return;
    }
    int used = 0;
    for (int v : partial) used += v;
    for (int v = 0; v <= h - used; ++v) {
        partial.push_back(v);
        enumerate_lattice(m, h, partial, out);
        partial.pop_back();
    }
}

std::size_t lattice_count(int m, int h) {
    // C(h + m - 1, m - 1)
    std::size_t num = 1;
    for (int i = 1; i <= m - 1; ++i) {
        num = num * (h + i) / i;
    }
    return num;
}

}  // namespace

std::vector<PreferenceVector> simplex_grid(int m, int n) {
    if (m < 2 || n < 1) throw std::invalid_argument("invalid grid request");
    std::vector<PreferenceVector> grid;
    if (m == 2) {
        grid.reserve(n);
        for (int i = 0; i < n; ++i) {
            const double w = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
            PreferenceVector p(2);
            p << w, 1.0 - w;
            grid.push_back(p);
        }
        return grid;
    }
    int h = 1;
    while (lattice_count(m, h) < static_cast<std::size_t>(n)) ++h;
    std::vector<PreferenceVector> full;
    std::vector<int> partial;
    enumerate_lattice(m, h, partial, full);
    if (full.size() == static_cast<std::size_t>(n)) return full;
    grid.reserve(n);
    for (int i = 0; i < n; ++i) {
        const std::size_t idx =
            n == 1 ? 0
                   : (static_cast<std::size_t>(i) * (full.size() - 1)) / (n - 1);
        grid.push_back(full[idx]);
    }
    return grid;
}

}  // namespace pslmorl
