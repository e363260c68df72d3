#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lab/linalg.hpp"
#include "lab/rng.hpp"

namespace lab {

using MultiIndex = std::vector<int>;

inline int multi_index_degree(const MultiIndex& a) {
    int d = 0;
    for (int k : a) d += k;
    return d;
}

// Truncated Hermite-chaos representation of a function of nVars real Gaussian
// variables, in the orthonormal (probabilists', normalized) Hermite basis.
// Complex-variable elements are represented over 2*nComplex real variables,
// pairing (2n, 2n+1) = (g'_n, g''_n) with g_n = (g'_n + i g''_n)/sqrt(2).
class ChaosElement {
public:
    ChaosElement(std::size_t nVars, std::size_t maxDegree, bool complexVars = false);

    // the n-th real standard Gaussian coordinate as a degree-1 element
    static ChaosElement gaussian_coordinate(std::size_t nVars, std::size_t maxDegree,
                                            std::size_t n);
    // the n-th complex standard Gaussian over nComplex complex variables
    static ChaosElement complex_gaussian(std::size_t nComplex, std::size_t maxDegree,
                                         std::size_t n);
    static ChaosElement constant(std::size_t nVars, std::size_t maxDegree, cplx value,
                                 bool complexVars = false);

    std::size_t num_vars() const { return nVars_; }
    std::size_t max_degree() const { return maxDegree_; }
    bool complex_vars() const { return complexVars_; }

    const std::map<MultiIndex, cplx>& coefficients() const { return coeffs_; }
    cplx coefficient(const MultiIndex& a) const;
    void set_coefficient(const MultiIndex& a, cplx value);

    cplx mean() const;       // degree-0 coefficient
    double l2_norm() const;  // = l2 norm of coefficients (Parseval)

    // pointwise evaluation at x in R^nVars
    cplx evaluate(std::span<const double> x) const;

    ChaosElement& operator+=(const ChaosElement& o);
    ChaosElement& operator*=(cplx s);

private:
    std::size_t nVars_;
    std::size_t maxDegree_;
    bool complexVars_;
    std::map<MultiIndex, cplx> coeffs_;
};

// every multi-index over nVars variables with total degree <= maxDegree
std::vector<MultiIndex> all_multi_indices(std::size_t nVars, std::size_t maxDegree);

// Mehler semigroup T(delta): multiplies the degree-|alpha| coefficient by
// delta^|alpha|. Requires delta in (0, 1].
ChaosElement mehler_apply(const ChaosElement& f, double delta);

// T_delta = delta^{-1} (T(delta) - P_0): degree-k coefficient times
// delta^{k-1} for k >= 1, degree-0 zeroed. Complex-variable elements get the
// additional phase averaging that zeroes the anti-holomorphic degree-1 block.
// Requires delta in (0, 1).
ChaosElement t_delta_apply(const ChaosElement& f, double delta);

// orthogonal projection onto the degree-k chaos
ChaosElement chaos_project(const ChaosElement& f, std::size_t k);

struct TDeltaNorms {
    double l2TailNorm = 0.0;       // exact ||T_delta (1 - P_1)||_{2->2}
    double l1NormBound = 0.0;      // MC lower estimate of the L1->L1 norm
    double l1AnalyticBound = 0.0;  // 2/delta
    std::string l1Method;          // "gauss-hermite" or "monte-carlo"
};

TDeltaNorms operator_norms_t_delta(std::size_t nVars, std::size_t maxDegree, double delta,
                                   std::size_t samples, RngStream rng);

// L1 norm of a chaos element: Gauss-Hermite tensor quadrature for nVars <= 3,
// Monte Carlo otherwise. methodOut (optional) records which was used.
double chaos_l1_norm(const ChaosElement& f, std::size_t samples, RngStream rng,
                     std::string* methodOut = nullptr);

struct MelaMeasure {
    std::vector<double> gridPoints;     // s-values in [0, 1]
    std::vector<double> signedWeights;  // sigma(s), real weights suffice
    double delta = 0.0;
    double totalVariation = 0.0;
    int nMaxOdd = 0;

    double moment(int n) const;  // sum s^n sigma(s)
};

// LP of the damping measure: minimize total variation subject to first moment
// 1 and |odd moments| <= delta for odd n in [3, nMaxOdd]. Constraints are
// re-verified independently of the solver.
MelaMeasure mela_lp(double delta, std::size_t gridSize, int nMaxOdd);

// degree-k coefficient times lambda_k = int (s^k - (-s)^k)/2 dsigma(s);
// the degree-1 multiplier must equal 1 within 1e-9.
ChaosElement mela_damping_apply(const ChaosElement& f, const MelaMeasure& mu);

std::string to_json(const MelaMeasure& mu);

struct GaussianComparisonReport {
    double meanRealGaussian = 0.0, stdErrReal = 0.0;
    double meanComplexGaussian = 0.0, stdErrComplex = 0.0;
    bool sandwichHolds = false;  // 2^{-1/2} E||.g^R|| <= E||.g|| <= 2^{1/2} E||.g^R||
    double meanRotated = 0.0, stdErrRotated = 0.0;
    bool contractionHolds = true;  // E||sum_i x_i sum_j a_ij g_j|| <= E||sum x_j g_j||
};

// Monte Carlo comparison of real vs complex Gaussian averages of
// ||sum x_n g_n||_inf for vectors x_n in a finite-dimensional sup-normed
// space, with an optional contraction matrix a.
GaussianComparisonReport gaussian_comparison_check(
    const std::vector<std::vector<cplx>>& x, std::size_t samples, RngStream rng,
    const Matrix* contraction = nullptr);

}  // namespace lab
