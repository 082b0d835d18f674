#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace pslmorl {

// Deterministic RNG used everywhere in the library. Distribution shaping is
// done by hand (not via std:: distributions) so that a seed produces the same
// stream on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    int uniform_int(int n) {
        return static_cast<int>((static_cast<unsigned __int128>(gen_()) *
                                 static_cast<unsigned __int128>(n)) >>
                                64);
    }

    // Standard normal via Box-Muller (cosine branch only).
    double normal() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * M_PI * u2);
    }

    Eigen::VectorXd normal_vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    // Dirichlet(1,...,1): uniform on the (m-1)-simplex.
    Eigen::VectorXd simplex_uniform(int m) {
        Eigen::VectorXd v(m);
        double total = 0.0;
        for (int i = 0; i < m; ++i) {
            v[i] = -std::log(1.0 - uniform());
            total += v[i];
        }
        v /= total;
        return v;
    }

private:
    std::mt19937_64 gen_;
};

// splitmix64 finalizer; used to derive independent per-component seeds from a
// single run seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return mix_seed(base ^ mix_seed(stream + 0x51ed2701ull));
}

}  // namespace pslmorl
