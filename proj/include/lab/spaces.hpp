#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lab/linalg.hpp"

namespace lab {

using cplx = std::complex<double>;

// Finite weighted point set standing in for a probability space (T, m).
// Points are anonymous; only their weights matter. Duplicate points with
// aggregated weights are permitted.
class ProbabilitySpace {
public:
    explicit ProbabilitySpace(std::vector<double> weights);

    static ProbabilitySpace uniform(std::size_t m);
    static ProbabilitySpace product(const ProbabilitySpace& a, const ProbabilitySpace& b);

    std::size_t size() const { return weights_.size(); }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }

    bool same_as(const ProbabilitySpace& other) const;

private:
    std::vector<double> weights_;
};

// N complex-valued functions sampled on a ProbabilitySpace: entry (n, i) is
// phi_n(t_i).
class FunctionSystem {
public:
    FunctionSystem(ProbabilitySpace space, std::vector<std::vector<cplx>> values,
                   std::string label = "");

    const ProbabilitySpace& space() const { return space_; }
    std::size_t size() const { return values_.size(); }           // N
    std::size_t points() const { return space_.size(); }          // M
    const std::vector<cplx>& row(std::size_t n) const { return values_[n]; }
    const std::vector<std::vector<cplx>>& values() const { return values_; }
    const std::string& label() const { return label_; }

    double sup_norm(std::size_t n) const;   // ||phi_n||_inf over grid points
    double max_sup_norm() const;

    bool is_real() const;  // all entries have zero imaginary part

    // value of sum_n coeffs[n] * phi_n at point i
    cplx combination_at(std::span<const cplx> coeffs, std::size_t i) const;
    std::vector<cplx> combination(std::span<const cplx> coeffs) const;

private:
    ProbabilitySpace space_;
    std::vector<std::vector<cplx>> values_;
    std::string label_;
};

// Per-index d_n x d_n matrix-valued functions on a shared ProbabilitySpace.
// blocks[n][i * d_n + j][s] = phi_n(i,j)(t_s).
class MatricialSystem {
public:
    MatricialSystem(ProbabilitySpace space, std::vector<std::size_t> dims,
                    std::vector<std::vector<std::vector<cplx>>> blocks,
                    std::string label = "");

    const ProbabilitySpace& space() const { return space_; }
    std::size_t size() const { return dims_.size(); }
    std::size_t dim(std::size_t n) const { return dims_[n]; }
    const std::vector<std::size_t>& dims() const { return dims_; }
    const std::string& label() const { return label_; }

    cplx value(std::size_t n, std::size_t i, std::size_t j, std::size_t s) const {
        return blocks_[n][i * dims_[n] + j][s];
    }
    Matrix matrix_at(std::size_t n, std::size_t s) const;

    double sup_operator_norm(std::size_t n) const;  // sup_t ||phi_n(t)||_op

    // {d_n^{1/2} phi_n(i,j)} as a scalar system of size sum d_n^2
    FunctionSystem flatten() const;

private:
    ProbabilitySpace space_;
    std::vector<std::size_t> dims_;
    std::vector<std::vector<std::vector<cplx>>> blocks_;
    std::string label_;
};

struct GramReport {
    Matrix gram;
    double deviation = 0.0;                 // ||gram - I||_op
    std::optional<double> inverseNormBound; // nullopt means singular
};

// weighted inner product sum_i w_i f_i conj(g_i); rows must live on the same space
cplx inner_product(const FunctionSystem& sysF, std::size_t n, const FunctionSystem& sysG,
                   std::size_t k);
cplx inner_product(std::span<const cplx> f, std::span<const cplx> g,
                   const ProbabilitySpace& space);

// gram(n, k) = <phi_n of sysA, phi_k of sysB>; deviation and inverse-norm
// bound filled. Matricial systems should be flattened first (the d-weighted
// normalization is built into flatten()).
GramReport biorthogonality_gram(const FunctionSystem& sysA, const FunctionSystem& sysB);
GramReport biorthogonality_gram(const MatricialSystem& sysA, const MatricialSystem& sysB);

inline constexpr std::size_t kDefaultProductCap = std::size_t{1} << 20;

// Row n of the result is phi1_n(t_1) phi2_n(t_2) on the materialized product
// space (M1*M2 points, product weights). Throws if M1*M2 exceeds the cap.
FunctionSystem tensor_product_system(const FunctionSystem& sys1, const FunctionSystem& sys2,
                                     std::size_t cap = kDefaultProductCap);

// Dotted matricial product: row n at (t_1, t_2) is psi1_n(t_1) psi2_n(t_2)
// (matrix product), on the materialized product space.
MatricialSystem tensor_product_system(const MatricialSystem& sys1, const MatricialSystem& sys2,
                                      std::size_t cap = kDefaultProductCap);

// k-fold product grid evaluated lazily from the factor system; used when the
// materialized grid would exceed the cap.
class LazyProductSystem {
public:
    LazyProductSystem(const FunctionSystem& factor, std::size_t folds);

    std::size_t size() const { return factor_.size(); }
    std::size_t folds() const { return k_; }
    std::size_t factor_points() const { return factor_.points(); }
    const FunctionSystem& factor() const { return factor_; }

    cplx value(std::size_t n, std::span<const std::size_t> multiIndex) const;
    cplx combination_at(std::span<const cplx> coeffs,
                        std::span<const std::size_t> multiIndex) const;

private:
    FunctionSystem factor_;
    std::size_t k_;
};

// JSON serialization (bit-exact round trip; weights as decimal strings)
std::string to_json(const FunctionSystem& sys);
std::string to_json(const MatricialSystem& sys);
FunctionSystem function_system_from_json(const std::string& text);
MatricialSystem matricial_system_from_json(const std::string& text);
bool json_is_matricial(const std::string& text);

}  // namespace lab
