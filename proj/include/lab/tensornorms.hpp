#pragma once

#include <optional>
#include <vector>

#include "lab/chaos.hpp"
#include "lab/linalg.hpp"
#include "lab/rng.hpp"
#include "lab/spaces.hpp"

namespace lab {

// Kernel K(t_i, s_j) on a product of two finite probability spaces. Either a
// dense M1 x M2 matrix or a factored form K = A B^T (A: M1 x r, B: M2 x r);
// the factored form keeps decomposition kernels exact and large grids cheap.
class TensorKernel {
public:
    TensorKernel(ProbabilitySpace space1, ProbabilitySpace space2, Matrix dense);
    TensorKernel(ProbabilitySpace space1, ProbabilitySpace space2, Matrix factorA,
                 Matrix factorB);

    const ProbabilitySpace& space1() const { return space1_; }
    const ProbabilitySpace& space2() const { return space2_; }
    std::size_t rows() const;
    std::size_t cols() const;

    bool factored() const { return factorA_.has_value(); }
    const Matrix& factor_a() const { return *factorA_; }
    const Matrix& factor_b() const { return *factorB_; }
    const Matrix& dense() const;

    cplx at(std::size_t i, std::size_t j) const;
    // row i as a full vector (evaluated from factors when factored)
    std::vector<cplx> row(std::size_t i) const;

private:
    ProbabilitySpace space1_, space2_;
    std::optional<Matrix> dense_;
    std::optional<Matrix> factorA_, factorB_;
};

struct NormCertificate {
    double value = 0.0;
    bool exact = false;            // enumeration vs heuristic
    double accuracyFactor = 1.0;   // true sup <= value * accuracyFactor when exact
    std::vector<cplx> psi1, psi2;  // scalar dual witnesses (injective norm)
    Matrix witnessU, witnessV;     // unit-vector families (gamma2*), rows = vectors

    // recompute the certified value from the stored witness
    double evaluate_witness(const TensorKernel& k) const;
};

// projective norm: sum_{i,j} w1_i w2_j |K(i,j)|
double projective_norm(const TensorKernel& k);

enum class InjectiveMode { ExactEnumeration, Alternating, PhaseGrid };

// injective norm: sup over unit L_inf dual pairs of |sum w1 w2 K psi1 psi2|.
// ExactEnumeration needs a real kernel with min(M1,M2) <= 22; PhaseGrid uses
// Q phases per coordinate on the smaller side (1/cos(pi/Q) accuracy factor);
// Alternating is a multi-start heuristic lower bound.
NormCertificate injective_norm(const TensorKernel& k, InjectiveMode mode,
                               std::size_t restarts = 50, RngStream rng = RngStream(1),
                               std::size_t phaseGridQ = 64);

// certified lower bound on gamma2* by alternating closed-form updates over
// unit-ball vector families
NormCertificate gamma2_star_norm(const TensorKernel& k, std::size_t vecDim,
                                 std::size_t restarts, RngStream rng);

// Evaluation of truncated chaos elements on an S-point Gaussian Monte Carlo
// grid: the operator u with u(f)(s) = f(x_s), recorded together with an
// estimate of its L1 -> L1 norm.
struct ChaosGridMap {
    ProbabilitySpace space = ProbabilitySpace::uniform(1);  // uniform over the S sample points
    Matrix eval;                     // S x dim, eval(s, q) = H_{alpha_q}(x_s)
    std::vector<MultiIndex> basis;   // column order
    std::size_t nVars = 0;
    std::size_t maxDegree = 0;
    double l1NormEstimate = 1.0;     // MC sup of ||u f||_1 / ||f||_1
};

ChaosGridMap make_gaussian_evaluation_map(std::size_t nVars, std::size_t maxDegree,
                                          std::size_t samples, RngStream rng,
                                          std::size_t normProbes = 16);

struct Decomposition {
    TensorKernel s, t, r;           // s = t + r, all factored over the chaos basis
    double wedgeT = 0.0;            // ||t||_wedge, exact double sum
    double veeR = 0.0;              // alternating estimate of ||r||_vee
    double gamma2R = 0.0;           // alternating estimate of gamma2*(r)
    double analyticWedgeBound = 0.0;   // (2/delta) ||u1|| ||u2||
    double analyticVeeBound = 0.0;     // delta ||u1|| ||u2||
    double analyticGamma2Bound = 0.0;  // ||T_delta(1-P1)||_{2->2} ||u1|| ||u2||
    double reconstructionError = 0.0;  // max |t + r - s| over probed entries
};

// Kernel decomposition sum_n u1(g_n) (x) u2(g_n) = t + r computed in the
// chaos basis via the damped semigroup.
Decomposition decompose_t_r(const ChaosGridMap& u1, const ChaosGridMap& u2, double delta,
                            RngStream rng, std::size_t normRestarts = 8);

struct TraceDualityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// |<v, tr(a psi1 psi2)>| <= tr|a| sup||psi1||_op sup||psi2||_op for kernels v
// with gamma2*(v) <= 1; psi1[i] is the d x d value at point i of space1.
TraceDualityReport trace_duality_bound(const TensorKernel& v,
                                       const std::vector<Matrix>& psi1,
                                       const std::vector<Matrix>& psi2, const Matrix& a);

// JSON round trip (same conventions as FunctionSystem: values as decimal
// strings); certificates serialize with their witnesses.
std::string to_json(const TensorKernel& k);
TensorKernel tensor_kernel_from_json(const std::string& text);
std::string to_json(const NormCertificate& c);

}  // namespace lab
