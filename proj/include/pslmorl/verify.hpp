#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pslmorl {

struct VerifyCheck {
    std::string name;
    bool pass = false;
    double worst = 0.0;  // measured worst-case value
    double bound = 0.0;  // the value it must stay at or below
    std::string detail;
};

// Gradient checks against central finite differences, run on small
// tanh networks at a fixed seed.
VerifyCheck verify_ddqn_gradients(std::uint64_t seed);
VerifyCheck verify_td3_critic_gradients(std::uint64_t seed);
VerifyCheck verify_td3_actor_gradients(std::uint64_t seed);

// With fusion alpha = 0 the hypernetwork must receive an exactly zero
// gradient from both trainers' losses.
VerifyCheck verify_zero_alpha_gradient(std::uint64_t seed);

// Contraction-modulus measurement of the scalarized-argmax backup over
// random MOMDP instances and random table pairs.
VerifyCheck verify_contraction(std::uint64_t seed, double gamma, int trials);

// Fixed-point iteration: geometric residual decay and agreement between two
// different starting tables.
VerifyCheck verify_fixed_point(std::uint64_t seed, double gamma);

std::vector<VerifyCheck> run_verification(std::uint64_t seed);

// Pretty-printed JSON listing every check with its measured values.
std::string verification_report_json(const std::vector<VerifyCheck>& checks);

}  // namespace pslmorl
