#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace lab {

using cplx = std::complex<double>;

// Dense complex matrix, row-major. Sized for the small (d <= 64) matrices
// this project manipulates; no attempt at BLAS-level performance.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    Matrix adjoint() const {
        Matrix m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    Matrix transpose() const {
        Matrix m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    Matrix& operator+=(const Matrix& o) {
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    Matrix& operator*=(cplx s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend Matrix operator*(const Matrix& x, const Matrix& y) {
        assert(x.cols_ == y.rows_);
        Matrix z(x.rows_, y.cols_);
        for (std::size_t i = 0; i < x.rows_; ++i)
            for (std::size_t k = 0; k < x.cols_; ++k) {
                cplx xv = x(i, k);
                if (xv == cplx(0.0)) continue;
                for (std::size_t j = 0; j < y.cols_; ++j) z(i, j) += xv * y(k, j);
            }
        return z;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> a_;
};

// Eigen-decomposition of a Hermitian matrix by the classical cyclic Jacobi
// method. Returns eigenvalues ascending; V holds eigenvectors in columns.
struct HermEig {
    std::vector<double> values;
    Matrix vectors;
};

inline HermEig hermitian_eig(Matrix h) {
    const std::size_t n = h.rows();
    if (h.cols() != n) throw std::invalid_argument("hermitian_eig: square matrix required");
    Matrix v = Matrix::identity(n);
    double total = 0.0;
    for (const cplx& x : h.data()) total += std::norm(x);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(h(p, q));
        if (off <= 1e-28 * std::max(total, 1e-300)) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                cplx hpq = h(p, q);
                double apq = std::abs(hpq);
                if (apq < 1e-300) continue;
                cplx phase = hpq / apq;
                double app = h(p, p).real(), aqq = h(q, q).real();
                // G: G_pp = c, G_pq = s phase, G_qp = -s conj(phase), G_qq = c;
                // the update H <- G* H G zeroes the (p, q) entry
                double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
                double c = std::cos(theta), s = std::sin(theta);
                cplx sp = s * phase;
                for (std::size_t k = 0; k < n; ++k) {
                    cplx hkp = h(k, p), hkq = h(k, q);
                    h(k, p) = c * hkp - std::conj(sp) * hkq;
                    h(k, q) = sp * hkp + c * hkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    cplx hpk = h(p, k), hqk = h(q, k);
                    h(p, k) = c * hpk - sp * hqk;
                    h(q, k) = std::conj(sp) * hpk + c * hqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - std::conj(sp) * vkq;
                    v(k, q) = sp * vkp + c * vkq;
                }
            }
        }
    }
    HermEig out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = h(i, i).real();
    // sort ascending, permuting eigenvector columns alongside
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return out.values[a] < out.values[b]; });
    Matrix vs(n, n);
    std::vector<double> ws(n);
    for (std::size_t j = 0; j < n; ++j) {
        ws[j] = out.values[idx[j]];
        for (std::size_t i = 0; i < n; ++i) vs(i, j) = v(i, idx[j]);
    }
    out.values = std::move(ws);
    out.vectors = std::move(vs);
    return out;
}

struct Svd {
    Matrix u;                     // rows x r
    std::vector<double> sigma;    // descending
    Matrix v;                     // cols x r, A = U diag(sigma) V^*
};

// SVD via the Hermitian eigenproblem of A^* A. Adequate for the small,
// well-conditioned matrices used here.
inline Svd svd(const Matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    Matrix ata = a.adjoint() * a;
    HermEig eig = hermitian_eig(ata);
    Svd out;
    out.sigma.resize(n);
    out.v = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t src = n - 1 - j;  // descending
        out.sigma[j] = std::sqrt(std::max(0.0, eig.values[src]));
        for (std::size_t i = 0; i < n; ++i) out.v(i, j) = eig.vectors(i, src);
    }
    out.u = Matrix(m, n);
    Matrix av = a * out.v;
    for (std::size_t j = 0; j < n; ++j) {
        double s = out.sigma[j];
        if (s > 1e-14) {
            for (std::size_t i = 0; i < m; ++i) out.u(i, j) = av(i, j) / s;
        } else {
            // arbitrary unit column orthogonal to the rest is not needed for
            // our uses (polar with zero singular values takes phase 1)
            out.u(j % m, j) = 1.0;
        }
    }
    return out;
}

inline double operator_norm(const Matrix& a) {
    Svd s = svd(a);
    return s.sigma.empty() ? 0.0 : s.sigma.front();
}

inline double trace_norm(const Matrix& a) {
    Svd s = svd(a);
    double t = 0.0;
    for (double x : s.sigma) t += x;
    return t;
}

// Polar decomposition a = u p with u unitary (square a). Zero singular
// directions get phase 1.
inline Matrix polar_unitary(const Matrix& a) {
    Svd s = svd(a);
    return s.u * s.v.adjoint();
}

// QR by modified Gram-Schmidt with the R diagonal made positive real; for a
// Ginibre input the Q factor is exactly Haar distributed.
inline Matrix qr_haar_unitary(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix q = a;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            cplx dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += std::conj(q(i, k)) * q(i, j);
            for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += std::norm(q(i, j));
        nrm = std::sqrt(nrm);
        if (nrm < 1e-300) throw std::runtime_error("qr_haar_unitary: rank deficient input");
        for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
    }
    return q;
}

}  // namespace lab
