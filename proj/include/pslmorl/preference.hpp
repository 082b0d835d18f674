#pragma once

#include <optional>
#include <vector>

#include "pslmorl/rng.hpp"

#include <Eigen/Core>

namespace pslmorl {

// A point on the (m-1)-simplex: nonnegative weights summing to 1.
using PreferenceVector = Eigen::VectorXd;

constexpr double kSimplexTol = 1e-9;

bool is_valid_preference(const PreferenceVector& w, double tol = kSimplexTol);
void check_preference(const PreferenceVector& w);

// One band of a first-coordinate partition of the preference space.
struct PreferenceRegion {
    int region_index = 0;
    int region_count = 1;
};

// Uniform (Dirichlet(1,...,1)) sample on the simplex. With a region, the
// first coordinate is constrained to [i/K, (i+1)/K): rejection for m == 2,
// first-coordinate stratification for m > 2. Throws std::runtime_error if
// rejection exceeds the retry cap.
PreferenceVector sample_preference(Rng& rng, int m,
                                   std::optional<PreferenceRegion> region = std::nullopt);

double scalarize(const PreferenceVector& w, const Eigen::VectorXd& values);

// Returns 0 when either vector has norm below 1e-12.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// arccos of the cosine similarity, in [0, pi]; pi/2 for a zero-norm q.
double directional_angle(const PreferenceVector& w, const Eigen::VectorXd& q);

// d(directional_angle)/dq. Zero when either vector is near zero norm or the
// cosine is within 1e-9 of +/-1 (the arccos singularities).
Eigen::VectorXd directional_angle_grad_q(const PreferenceVector& w,
                                         const Eigen::VectorXd& q);

struct Interpolator {
    enum class Mode { Identity, PiecewiseLinear };
    Mode mode = Mode::Identity;
    // (source, target) pairs; used only in piecewise-linear mode.
    std::vector<std::pair<PreferenceVector, PreferenceVector>> anchors;

    static Interpolator identity() { return {}; }
    static Interpolator piecewise_linear(
        std::vector<std::pair<PreferenceVector, PreferenceVector>> anchors);
};

// Identity mode returns w unchanged. Piecewise-linear mode blends the targets
// of the two anchors whose sources are nearest to w (inverse-distance
// weights) and renormalizes onto the simplex.
PreferenceVector interpolate_preference(const Interpolator& interp,
                                        const PreferenceVector& w);

// Deterministic evaluation grid: n evenly spaced points for m == 2; for
// m > 2, an evenly strided subset of the smallest complete simplex lattice
// with at least n points.
std::vector<PreferenceVector> simplex_grid(int m, int n);

}  // namespace pslmorl
