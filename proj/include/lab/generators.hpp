#pragma once

#include <cstdint>
#include <vector>

#include "lab/linalg.hpp"
#include "lab/rng.hpp"
#include "lab/spaces.hpp"

namespace lab {

// Characters e^{i N(n) theta} on the uniform circle grid; exactly orthonormal
// on equispaced grids. Requires gridM > 2 * max exponent (alias-free).
FunctionSystem make_lacunary(const std::vector<int>& exponents, std::size_t gridM);

// Walsh characters prod_{i in subset} eps_i on the uniform 2^m-point sign
// cube; entries are +-1. Indices are 0-based.
FunctionSystem make_walsh(std::size_t m, const std::vector<std::vector<std::size_t>>& subsets);

// Singleton matricial system phi(t_s) = sqrt(d) u_s with u_s independent
// Haar-distributed d x d unitaries on the uniform S-point sample space.
MatricialSystem make_haar_unitary_system(std::size_t d, std::size_t samples, std::uint64_t seed);

struct SignMatrixEnsemble {
    std::size_t n = 0;
    double chi = 1.0;
    std::vector<Matrix> members;  // entries +-1/sqrt(n), operator norm <= chi
    double rejectionRate = 0.0;
};

// Rejection-samples uniform +-1/sqrt(n) matrices conditioned on operator norm
// <= chi; when n is a power of two the scaled Sylvester-Hadamard matrix (norm
// exactly 1) is included first. Errors out when the rejection rate exceeds
// 99.9% over the draw budget.
SignMatrixEnsemble make_sign_ensemble(std::size_t n, double chi, std::size_t count,
                                      std::uint64_t seed);

struct PolarDominationOperator {
    std::size_t d = 0;
    double deltaHat = 0.0;  // MC estimate of d^{-1} E tr|g|
    std::size_t samples = 0;
    double commutantOffDiag = 0.0;  // off-diagonal norm of the estimated E|g|
};

// Estimates the scalar delta with E|g| = delta I from S Ginibre samples
// (entries with E|g(i,j)|^2 = 1/d).
PolarDominationOperator estimate_polar_domination(std::size_t d, std::size_t samples,
                                                  std::uint64_t seed);

// Polar unitary parts of the given samples (zero singular directions take
// phase 1 through the SVD-based polar factor).
std::vector<Matrix> polar_domination_apply(const PolarDominationOperator& op,
                                           const std::vector<Matrix>& gSamples);

struct HaarMomentReport {
    double maxFirstMoment = 0.0;   // max_ij |E v(i,j)|
    double maxSecondMoment = 0.0;  // max |E v(i,j) conj(v(k,l)) - delta_ik delta_jl / d|
    double tolerance = 0.0;        // 5 / sqrt(S)
    bool pass = false;
};

// First/second moment comparison of a unitary sample family against Haar.
HaarMomentReport haar_moment_test(const std::vector<Matrix>& unitaries, std::size_t d);

// tr(u_s) for S independent Haar d x d unitaries; S >= 1000 required.
std::vector<cplx> character_samples(std::size_t d, std::size_t samples, std::uint64_t seed);

}  // namespace lab
