#include "pslmorl/gradcheck.hpp"

#include <algorithm>
#include <stdexcept>

namespace pslmorl {

Vector finite_difference_gradient(const std::function<double(const Vector&)>& f,
                                  const Vector& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("h must be positive");
    Vector grad(x.size());
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

double relative_error(const Vector& analytic, const Vector& numeric, double floor) {
    if (analytic.size() != numeric.size()) {
        throw std::invalid_argument("gradient length mismatch");
    }
    const double denom = std::max({analytic.norm(), numeric.norm(), floor});
    return (analytic - numeric).norm() / denom;
}

}  // namespace pslmorl
