#pragma once

#include <span>
#include <string>
#include <vector>

#include "lab/rng.hpp"
#include "lab/spaces.hpp"

namespace lab {

struct Psi2Result {
    double norm = 0.0;
    enum class Method { OrliczBisection, LpEquivalent } method = Method::OrliczBisection;
    std::size_t iterations = 0;
};

struct SubGaussianReport {
    double constantC = 0.0;       // best found C: sup_y psi2(sum y_n phi_n), ||y||_2 = 1
    double constantSigma = 0.0;   // best found MGF constant sigma
    std::vector<cplx> witnessDirection;
    std::size_t restarts = 0;
};

// inf{t > 0 : sum_i w_i exp(|f_i|/t)^2 <= e}, by bisection; 0 for the
// a.e.-zero function.
Psi2Result psi2_norm(std::span<const cplx> f, const ProbabilitySpace& space);

// sup over a geometric grid of p in [2, pMax] of p^{-1/2} ||f||_p
Psi2Result psi2_norm_lp(std::span<const cplx> f, const ProbabilitySpace& space,
                        double pMax = 64.0);

// Maximizes y -> psi2(sum y_n phi_n) over the complex unit l2 sphere by
// multi-start projected ascent with numerical gradients. The reported
// constants are certified lower bounds on the true suprema (the witness
// direction is stored). Also scans scales for the MGF constant sigma.
SubGaussianReport subgaussian_constant(const FunctionSystem& sys, std::size_t restarts,
                                       std::size_t steps, RngStream rng);
SubGaussianReport subgaussian_constant(const MatricialSystem& sys, std::size_t restarts,
                                       std::size_t steps, RngStream rng);

}  // namespace lab
