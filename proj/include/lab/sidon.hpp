#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lab/linalg.hpp"
#include "lab/rng.hpp"
#include "lab/spaces.hpp"

namespace lab {

enum class SidonMode { Exact, Sampled };

// Two-sided bracket for the interpolation constant of a function system:
// the smallest C with sum |a_n| <= C sup_t |sum a_n phi_n(t)|.
struct SidonEstimate {
    double lowerBound = 0.0;
    std::optional<double> upperBound;
    std::vector<cplx> witness;  // coefficients achieving lowerBound on the grid
    std::string method;         // dual-lp-enumeration | dual-lp-sampled | witness-search
    std::string gridNote;
    bool heuristicUpper = false;  // upper bound from sampled / restricted targets
    bool unstable = false;        // evaluation budget exhausted before stabilization
};

// Upper bound by duality: sup over unimodular targets xi of the minimum total
// variation of a complex measure mu on the grid with <mu, phi_n> = xi_n; each
// inner problem is an LP after a regular Q-gon approximation of the modulus
// (correction factor already applied to the reported bound). Lower bound from
// the exact ratio of the LP dual witnesses plus multi-start ascent.
// Exact mode enumerates targets: {+-1}^N for real systems (N <= 12) and the
// full Q-gon target grid when Q^{N-1} is affordable; Sampled mode draws 2^12
// phase targets and refines the best by monotone target ascent (upper bound
// then heuristic).
SidonEstimate sidon_constant(const FunctionSystem& sys, SidonMode mode,
                             std::size_t phaseGridQ = 64, RngStream rng = RngStream(1),
                             std::size_t sampledTargets = 4096);

// Same constant for the k-fold tensor power of the system. Materializes the
// product grid when it fits the budget; otherwise the sup over the product
// grid is evaluated lazily by coordinate ascent and both bounds are marked
// heuristic (unstable when the budget runs out before stabilization).
SidonEstimate tensor_sidon_constant(const FunctionSystem& sys, std::size_t k,
                                    std::size_t budget = std::size_t{1} << 20,
                                    RngStream rng = RngStream(1));

enum class Randomizer { GaussianComplex, GaussianReal, Sign, HaarUnitary };

std::string randomizer_name(Randomizer r);

struct MonteCarloStat {
    double mean = 0.0;
    double stdErr = 0.0;
    std::size_t samples = 0;
};

// E sup_t |sum_n g_n a_n psi_n(t)| with the chosen randomizer.
MonteCarloStat randomized_supnorm(const FunctionSystem& sys, std::span<const cplx> coeffs,
                                  Randomizer randomizer, std::size_t samples, RngStream rng);

// Matricial form: E sup_t |sum_k d_k tr(x_k G_k psi_k(t))| with G_k a d_k x d_k
// random matrix normalized to E|G_k(i,j)|^2 = 1/d_k (Haar unitary for the
// unitary randomizer).
MonteCarloStat randomized_supnorm(const MatricialSystem& sys, const std::vector<Matrix>& coeffs,
                                  Randomizer randomizer, std::size_t samples, RngStream rng);

struct ContractionReport {
    double lhs = 0.0, lhsStdErr = 0.0;
    double rhs = 0.0, rhsStdErr = 0.0;
    double bound = 0.0;  // sup||a_k|| sup||b_k|| rhs
    bool holds = false;  // lhs <= bound within 3 combined stdErr
};

// Contraction principle with common random numbers: the randomized sup-norm
// with the randomizer sandwiched as a_k G_k b_k is bounded by
// sup||a_k|| sup||b_k|| times the plain randomized sup-norm.
ContractionReport contraction_check(const MatricialSystem& sys, const std::vector<Matrix>& coeffs,
                                    const std::vector<Matrix>& left,
                                    const std::vector<Matrix>& right, Randomizer randomizer,
                                    std::size_t samples, RngStream rng);

struct RandomSidonEstimate {
    double value = 0.0;     // best ratio sum|a| / E sup|sum g a psi| found
    double stdError = 0.0;  // MC error of the final estimate
    std::size_t mcSamples = 0;
    std::string randomizer;
    std::vector<cplx> witness;  // scalar coefficients (diagonal s-values, matricial)
    // rotated-condition diagnostic: max over random matrix targets [a_nk] of
    // |sum a_nn| / E sup |sum_n g_n sum_k a_nk psi_k|
    double matrixTestRatio = 0.0;
};

// Lower-bound search for the randomly-Sidon constant: maximize
// sum |a_n| / E sup_t |sum g_n a_n psi_n(t)| by multi-start ascent with common
// random numbers; also probes the matrix-target bilinear form
// |sum a_nn| <= E sup |sum_n g_n sum_k a_nk psi_k|.
RandomSidonEstimate randomly_sidon_constant(const FunctionSystem& sys, std::size_t samples,
                                            std::size_t restarts, RngStream rng,
                                            Randomizer randomizer = Randomizer::GaussianComplex);

// Matricial version: maximize sum d_k tr|x_k| over the randomized sup-norm,
// x_k parametrized as (unitary) x (nonnegative diagonal) with polar-retracted
// ascent on both factors.
RandomSidonEstimate randomly_sidon_constant(const MatricialSystem& sys, std::size_t samples,
                                            std::size_t restarts, RngStream rng,
                                            Randomizer randomizer = Randomizer::GaussianComplex);

// Restriction of the matricial search to scalar coefficient matrices c_k I.
RandomSidonEstimate randomly_central_sidon_constant(
    const MatricialSystem& sys, std::size_t samples, std::size_t restarts, RngStream rng,
    Randomizer randomizer = Randomizer::GaussianComplex);

struct DominationReport {
    double maxRatio = 0.0;   // empirical domination constant over the corpus
    double meanRatio = 0.0;
    std::size_t draws = 0;
    double stdErrAtMax = 0.0;        // MC error of the Gaussian side at the max draw
    bool meanZeroHypothesis = true;  // rows approximately mean zero on the grid
};

// For random coefficient families x_1..x_N with J sup-norm coordinates each,
// compares int ||sum phi_n(t) x_n||_inf dm against E ||sum g_n x_n||_inf and
// reports the worst ratio.
DominationReport domination_check(const FunctionSystem& sysTarget, std::size_t samples,
                                  std::size_t coordJ = 8, std::size_t draws = 50,
                                  RngStream rng = RngStream(1));

struct ChevetReport {
    double lhs = 0.0, lhsStdErr = 0.0;
    double rhs = 0.0, rhsStdErr = 0.0;
    bool holds = false;  // lhs <= rhs within 3 combined stdErr
};

// E|| sum_j g_j x^1_j x ... x x^k_j || on the product grid against
// sqrt(k) sum_m (sup_j prod_{q != m} ||x^q_j||) E|| sum_j g_j x^m_j ||,
// where x^q_j = coeffs[q][j] * (row j of systems[q]); common g draws.
ChevetReport chevet_bound_check(const std::vector<FunctionSystem>& systems,
                                const std::vector<std::vector<cplx>>& coeffs,
                                std::size_t samples, RngStream rng);

std::string to_json(const SidonEstimate& e);
std::string to_json(const RandomSidonEstimate& e);

}  // namespace lab
