#include "pslmorl/bellman.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pslmorl {

PreferenceGrid make_preference_grid(int m, int points) {
    if (points < 2) throw std::invalid_argument("preference grid needs >= 2 points");
    PreferenceGrid grid = simplex_grid(m, points);
    for (const auto& w : grid) check_preference(w);
    return grid;
}

TabularQ TabularQ::zeros(int state_count, int action_count, int grid_size, int m) {
    TabularQ q;
    q.state_count = state_count;
    q.action_count = action_count;
    q.grid_size = grid_size;
    q.m = m;
    q.values.assign(static_cast<std::size_t>(state_count) * action_count * grid_size,
                    Eigen::VectorXd::Zero(m));
    return q;
}

TabularQ TabularQ::random(Rng& rng, int state_count, int action_count, int grid_size,
                          int m, double scale) {
    TabularQ q = zeros(state_count, action_count, grid_size, m);
    for (auto& v : q.values) {
        for (int i = 0; i < m; ++i) v[i] = scale * (2.0 * rng.uniform() - 1.0);
    }
    return q;
}

namespace {

void check_compatible(const TabularQ& a, const TabularQ& b) {
    if (a.state_count != b.state_count || a.action_count != b.action_count ||
        a.grid_size != b.grid_size || a.m != b.m) {
        throw std::invalid_argument("Q tables have different shapes");
    }
}

}  // namespace

double metric_d(const TabularQ& q, const TabularQ& q_prime, const PreferenceGrid& grid) {
    check_compatible(q, q_prime);
    if (static_cast<int>(grid.size()) != q.grid_size) {
        throw std::invalid_argument("grid size does not match Q table");
    }
    double worst = 0.0;
    for (int s = 0; s < q.state_count; ++s) {
        for (int a = 0; a < q.action_count; ++a) {
            for (int g = 0; g < q.grid_size; ++g) {
                const double v = std::abs(grid[g].dot(q.at(s, a, g) - q_prime.at(s, a, g)));
                if (v > worst) worst = v;
            }
        }
    }
    return worst;
}

namespace {

int select_action(const TabularQ& q, const PreferenceVector& w, int s, int g,
                  bool cosine_selection) {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < q.action_count; ++a) {
        const Eigen::VectorXd& qv = q.at(s, a, g);
        double score = w.dot(qv);
        if (cosine_selection) score *= cosine_similarity(w, qv);
        if (score > best_score) {
            best_score = score;
            best = a;
        }
    }
    return best;
}

}  // namespace

TabularQ bellman_operator(const TabularQ& q, const TabularMOMDP& momdp,
                          const PreferenceGrid& grid, double gamma,
                          bool cosine_selection) {
    if (q.state_count != momdp.state_count || q.action_count != momdp.action_count ||
        q.m != momdp.m) {
        throw std::invalid_argument("Q table does not match MOMDP shape");
    }
    if (static_cast<int>(grid.size()) != q.grid_size) {
        throw std::invalid_argument("grid size does not match Q table");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma outside [0,1)");
    TabularQ out = TabularQ::zeros(q.state_count, q.action_count, q.grid_size, q.m);
    // Greedy action per (s', w) is shared by every (s, a) backup.
    std::vector<int> greedy(static_cast<std::size_t>(q.state_count) * q.grid_size);
    for (int sp = 0; sp < q.state_count; ++sp) {
        for (int g = 0; g < q.grid_size; ++g) {
            greedy[static_cast<std::size_t>(sp) * q.grid_size + g] =
                select_action(q, grid[g], sp, g, cosine_selection);
        }
    }
    for (int s = 0; s < q.state_count; ++s) {
        for (int a = 0; a < q.action_count; ++a) {
            const Eigen::VectorXd& t_row = momdp.transition[s][a];
            for (int g = 0; g < q.grid_size; ++g) {
                Eigen::VectorXd backup = momdp.reward[s][a];
                for (int sp = 0; sp < q.state_count; ++sp) {
                    const double p = t_row[sp];
                    if (p == 0.0) continue;
                    const int astar =
                        greedy[static_cast<std::size_t>(sp) * q.grid_size + g];
                    backup += gamma * p * q.at(sp, astar, g);
                }
                out.at(s, a, g) = std::move(backup);
            }
        }
    }
    return out;
}

ContractionReport check_contraction(const TabularMOMDP& momdp, const PreferenceGrid& grid,
                                    int trials, double gamma, Rng& rng,
                                    bool cosine_selection) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    ContractionReport report;
    report.gamma = gamma;
    const int G = static_cast<int>(grid.size());
    for (int t = 0; t < trials; ++t) {
        TabularQ q = TabularQ::random(rng, momdp.state_count, momdp.action_count, G,
                                      momdp.m, 1.0);
        TabularQ qp = TabularQ::random(rng, momdp.state_count, momdp.action_count, G,
                                       momdp.m, 1.0);
        const double before = metric_d(q, qp, grid);
        if (before == 0.0) {
            ++report.pairs_skipped;
            continue;
        }
        const double after = metric_d(bellman_operator(q, momdp, grid, gamma, cosine_selection),
                                      bellman_operator(qp, momdp, grid, gamma, cosine_selection),
                                      grid);
        const double ratio = after / before;
        if (ratio > report.max_ratio) report.max_ratio = ratio;
        ++report.pairs_evaluated;
    }
    report.pass = report.pairs_evaluated > 0 && report.max_ratio <= gamma + 1e-9;
    return report;
}

FixedPointResult fixed_point_iterate(const TabularMOMDP& momdp, const PreferenceGrid& grid,
                                     double gamma, double tol, int max_iters,
                                     const TabularQ* start) {
    if (tol <= 0.0) throw std::invalid_argument("tol must be positive");
    const int G = static_cast<int>(grid.size());
    TabularQ q = start ? *start
                       : TabularQ::zeros(momdp.state_count, momdp.action_count, G, momdp.m);
    for (int it = 1; it <= max_iters; ++it) {
        TabularQ next = bellman_operator(q, momdp, grid, gamma);
        const double residual = metric_d(q, next, grid);
        q = std::move(next);
        if (residual < tol) {
            return {std::move(q), it, residual};
        }
    }
    throw std::runtime_error("fixed-point iteration did not converge within " +
                             std::to_string(max_iters) + " iterations");
}

}  // namespace pslmorl
