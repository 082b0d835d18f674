#pragma once

#include <vector>

#include "pslmorl/envs/tabular.hpp"
#include "pslmorl/preference.hpp"

namespace pslmorl {

// Finite lattice standing in for the continuous preference space when
// evaluating the supremum metric.
using PreferenceGrid = std::vector<PreferenceVector>;

PreferenceGrid make_preference_grid(int m, int points);

// Vector-valued Q table over (state, action, grid preference).
struct TabularQ {
    int state_count = 0;
    int action_count = 0;
    int grid_size = 0;
    int m = 0;
    std::vector<Eigen::VectorXd> values;  // [(s * A + a) * G + g]

    static TabularQ zeros(int state_count, int action_count, int grid_size, int m);
    static TabularQ random(Rng& rng, int state_count, int action_count, int grid_size,
                           int m, double scale);

    Eigen::VectorXd& at(int s, int a, int g) {
        return values[static_cast<std::size_t>((s * action_count + a) * grid_size + g)];
    }
    const Eigen::VectorXd& at(int s, int a, int g) const {
        return values[static_cast<std::size_t>((s * action_count + a) * grid_size + g)];
    }
};

// sup over (s, a, grid preference) of |w^T (Q - Q')|.
double metric_d(const TabularQ& q, const TabularQ& q_prime, const PreferenceGrid& grid);

// Scalarized-argmax optimality backup:
//   (CQ)(s,a,w) = R(s,a) + gamma * sum_s' T(s,a,s') Q(s', a*(s',w), w)
// with a*(s',w) = argmax_a' w^T Q(s',a',w), lowest index on ties. With
// cosine_selection the argmax score becomes S_c(w, Q) * (w^T Q) instead;
// contraction is only claimed for the plain scalarized form.
TabularQ bellman_operator(const TabularQ& q, const TabularMOMDP& momdp,
                          const PreferenceGrid& grid, double gamma,
                          bool cosine_selection = false);

struct ContractionReport {
    double max_ratio = 0.0;
    int pairs_evaluated = 0;
    int pairs_skipped = 0;  // degenerate d(Q,Q') = 0 pairs
    double gamma = 0.0;
    bool pass = false;
};

// Measures d(CQ, CQ') / d(Q, Q') over random table pairs; passes when the
// worst ratio stays at or below gamma (+1e-9 slack).
ContractionReport check_contraction(const TabularMOMDP& momdp, const PreferenceGrid& grid,
                                    int trials, double gamma, Rng& rng,
                                    bool cosine_selection = false);

struct FixedPointResult {
    TabularQ q;
    int iterations = 0;
    double final_residual = 0.0;
};

// Banach iteration from the given start (zeros by default) until successive
// iterates are closer than tol in the metric d. Throws if max_iters is hit.
FixedPointResult fixed_point_iterate(const TabularMOMDP& momdp, const PreferenceGrid& grid,
                                     double gamma, double tol, int max_iters,
                                     const TabularQ* start = nullptr);

}  // namespace pslmorl
