#include "lab/tensornorms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace lab {

namespace {

std::string decimal(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool matrix_is_real(const Matrix& m) {
    for (const cplx& v : m.data())
        if (v.imag() != 0.0) return false;
    return true;
}

}  // namespace

TensorKernel::TensorKernel(ProbabilitySpace space1, ProbabilitySpace space2, Matrix dense)
    : space1_(std::move(space1)), space2_(std::move(space2)), dense_(std::move(dense)) {
    if (dense_->rows() != space1_.size() || dense_->cols() != space2_.size())
        throw std::invalid_argument("TensorKernel: matrix shape does not match spaces");
}

TensorKernel::TensorKernel(ProbabilitySpace space1, ProbabilitySpace space2, Matrix factorA,
                           Matrix factorB)
    : space1_(std::move(space1)),
      space2_(std::move(space2)),
      factorA_(std::move(factorA)),
      factorB_(std::move(factorB)) {
    if (factorA_->rows() != space1_.size() || factorB_->rows() != space2_.size())
        throw std::invalid_argument("TensorKernel: factor rows do not match spaces");
    if (factorA_->cols() != factorB_->cols())
        throw std::invalid_argument("TensorKernel: factor ranks differ");
}

std::size_t TensorKernel::rows() const { return space1_.size(); }
std::size_t TensorKernel::cols() const { return space2_.size(); }

const Matrix& TensorKernel::dense() const {
    if (!dense_) throw std::logic_error("TensorKernel: no dense representation stored");
    return *dense_;
}

cplx TensorKernel::at(std::size_t i, std::size_t j) const {
    if (dense_) return (*dense_)(i, j);
    cplx s = 0.0;
    const std::size_t r = factorA_->cols();
    for (std::size_t q = 0; q < r; ++q) s += (*factorA_)(i, q) * (*factorB_)(j, q);
    return s;
}

std::vector<cplx> TensorKernel::row(std::size_t i) const {
    const std::size_t m2 = cols();
    std::vector<cplx> out(m2);
    if (dense_) {
        for (std::size_t j = 0; j < m2; ++j) out[j] = (*dense_)(i, j);
        return out;
    }
    const std::size_t r = factorA_->cols();
    for (std::size_t q = 0; q < r; ++q) {
        cplx aiq = (*factorA_)(i, q);
        if (aiq == cplx(0.0)) continue;
        for (std::size_t j = 0; j < m2; ++j) out[j] += aiq * (*factorB_)(j, q);
    }
    return out;
}

double projective_norm(const TensorKernel& k) {
    const std::size_t m1 = k.rows(), m2 = k.cols();
    double total = 0.0;
    for (std::size_t i = 0; i < m1; ++i) {
        double w1 = k.space1().weight(i);
        if (w1 == 0.0) continue;
        std::vector<cplx> row = k.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < m2; ++j) s += k.space2().weight(j) * std::abs(row[j]);
        total += w1 * s;
    }
    return total;
}

namespace {

bool kernel_is_real(const TensorKernel& k) {
    if (k.factored()) return matrix_is_real(k.factor_a()) && matrix_is_real(k.factor_b());
    return matrix_is_real(k.dense());
}

// y = K^T (w1 .* psi1), length M2
std::vector<cplx> apply_kt(const TensorKernel& k, const std::vector<cplx>& psi1) {
    const std::size_t m1 = k.rows(), m2 = k.cols();
    std::vector<cplx> out(m2);
    if (k.factored()) {
        const Matrix& a = k.factor_a();
        const Matrix& b = k.factor_b();
        const std::size_t r = a.cols();
        std::vector<cplx> g(r);
        for (std::size_t i = 0; i < m1; ++i) {
            cplx wp = k.space1().weight(i) * psi1[i];
            if (wp == cplx(0.0)) continue;
            for (std::size_t q = 0; q < r; ++q) g[q] += wp * a(i, q);
        }
        for (std::size_t j = 0; j < m2; ++j) {
            cplx s = 0.0;
            for (std::size_t q = 0; q < r; ++q) s += g[q] * b(j, q);
            out[j] = s;
        }
        return out;
    }
    const Matrix& d = k.dense();
    for (std::size_t i = 0; i < m1; ++i) {
        cplx wp = k.space1().weight(i) * psi1[i];
        if (wp == cplx(0.0)) continue;
        for (std::size_t j = 0; j < m2; ++j) out[j] += wp * d(i, j);
    }
    return out;
}

// y = K (w2 .* psi2), length M1
std::vector<cplx> apply_k(const TensorKernel& k, const std::vector<cplx>& psi2) {
    const std::size_t m1 = k.rows(), m2 = k.cols();
    std::vector<cplx> out(m1);
    if (k.factored()) {
        const Matrix& a = k.factor_a();
        const Matrix& b = k.factor_b();
        const std::size_t r = a.cols();
        std::vector<cplx> g(r);
        for (std::size_t j = 0; j < m2; ++j) {
            cplx wp = k.space2().weight(j) * psi2[j];
            if (wp == cplx(0.0)) continue;
            for (std::size_t q = 0; q < r; ++q) g[q] += wp * b(j, q);
        }
        for (std::size_t i = 0; i < m1; ++i) {
            cplx s = 0.0;
            for (std::size_t q = 0; q < r; ++q) s += g[q] * a(i, q);
            out[i] = s;
        }
        return out;
    }
    const Matrix& d = k.dense();
    for (std::size_t i = 0; i < m1; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < m2; ++j) s += d(i, j) * (k.space2().weight(j) * psi2[j]);
        out[i] = s;
    }
    return out;
}

cplx align(cplx v, bool realMode) {
    if (realMode) return v.real() >= 0.0 ? 1.0 : -1.0;
    double a = std::abs(v);
    return a < 1e-300 ? cplx(1.0) : std::conj(v) / a;
}

double weighted_abs_sum(const std::vector<cplx>& v, const ProbabilitySpace& sp) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += sp.weight(i) * std::abs(v[i]);
    return s;
}

struct AlternatingResult {
    double value = 0.0;
    std::vector<cplx> psi1, psi2;
};

AlternatingResult injective_alternating(const TensorKernel& k, std::size_t restarts,
                                        RngStream rng) {
    const std::size_t m1 = k.rows(), m2 = k.cols();
    const bool realMode = kernel_is_real(k);
    AlternatingResult best;
    for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
        RngStream local = rng.derive(r);
        std::vector<cplx> psi2(m2);
        for (cplx& v : psi2)
            v = realMode ? cplx(static_cast<double>(local.sign())) : local.unit_phase();
        std::vector<cplx> psi1(m1, 1.0);
        double val = -1.0;
        for (int it = 0; it < 400; ++it) {
            std::vector<cplx> u = apply_k(k, psi2);
            for (std::size_t i = 0; i < m1; ++i) psi1[i] = align(u[i], realMode);
            std::vector<cplx> v = apply_kt(k, psi1);
            for (std::size_t j = 0; j < m2; ++j) psi2[j] = align(v[j], realMode);
            double nv = weighted_abs_sum(v, k.space2());
            if (nv <= val * (1.0 + 1e-14)) {
                val = std::max(val, nv);
                break;
            }
            val = nv;
        }
        if (val > best.value) {
            best.value = val;
            best.psi1 = psi1;
            best.psi2 = psi2;
        }
    }
    return best;
}

// enumerate psi on the smaller side; the other side is aligned exactly
NormCertificate injective_enumerate(const TensorKernel& k, bool phaseGrid, std::size_t q) {
    const bool transposed = k.rows() > k.cols();
    const std::size_t mSmall = transposed ? k.cols() : k.rows();
    const std::size_t mBig = transposed ? k.rows() : k.cols();
    const ProbabilitySpace& spSmall = transposed ? k.space2() : k.space1();
    const ProbabilitySpace& spBig = transposed ? k.space1() : k.space2();

    if (!phaseGrid) {
        if (mSmall > 22)
            throw std::invalid_argument("injective_norm: side over enumeration cap of 22");
        if (!kernel_is_real(k))
            throw std::invalid_argument("injective_norm: exact enumeration needs a real kernel");
    } else {
        if (q < 3) throw std::invalid_argument("injective_norm: phase grid needs Q >= 3");
        double budget = 1.0;
        for (std::size_t i = 0; i + 1 < mSmall; ++i) {
            budget *= static_cast<double>(q);
            if (budget > (1u << 24))
                throw std::invalid_argument("injective_norm: phase grid over enumeration cap");
        }
    }

    // rows of the enumerated side, pre-weighted: row[i][j] = wS_i K(i, j)
    std::vector<std::vector<cplx>> rows(mSmall);
    for (std::size_t i = 0; i < mSmall; ++i) {
        rows[i].resize(mBig);
        for (std::size_t j = 0; j < mBig; ++j) {
            cplx kv = transposed ? k.at(j, i) : k.at(i, j);
            rows[i][j] = spSmall.weight(i) * kv;
        }
    }

    std::vector<cplx> phases(phaseGrid ? q : 2);
    if (phaseGrid) {
        for (std::size_t t = 0; t < q; ++t) {
            double th = 2.0 * M_PI * static_cast<double>(t) / static_cast<double>(q);
            phases[t] = cplx(std::cos(th), std::sin(th));
        }
    } else {
        phases[0] = 1.0;
        phases[1] = -1.0;
    }

    // odometer over coordinates 1..mSmall-1 (a global phase/sign fixes the
    // first), with incremental updates of u = sum_i wS_i K_i psi_i
    std::vector<std::size_t> state(mSmall, 0);
    std::vector<cplx> u(mBig, 0.0);
    for (std::size_t i = 0; i < mSmall; ++i)
        for (std::size_t j = 0; j < mBig; ++j) u[j] += rows[i][j];

    double bestVal = -1.0;
    std::vector<std::size_t> bestState = state;
    while (true) {
        double val = weighted_abs_sum(u, spBig);
        if (val > bestVal) {
            bestVal = val;
            bestState = state;
        }
        // advance the odometer
        std::size_t pos = 1;
        while (pos < mSmall) {
            std::size_t oldT = state[pos];
            std::size_t newT = (oldT + 1) % phases.size();
            state[pos] = newT;
            cplx dlt = phases[newT] - phases[oldT];
            for (std::size_t j = 0; j < mBig; ++j) u[j] += dlt * rows[pos][j];
            if (newT != 0) break;
            ++pos;
        }
        if (pos == mSmall) break;
    }

    NormCertificate cert;
    cert.value = bestVal;
    cert.exact = true;
    cert.accuracyFactor = phaseGrid ? 1.0 / std::cos(M_PI / static_cast<double>(q)) : 1.0;
    std::vector<cplx> psiSmall(mSmall);
    for (std::size_t i = 0; i < mSmall; ++i) psiSmall[i] = phases[bestState[i]];
    std::vector<cplx> uBest(mBig, 0.0);
    for (std::size_t i = 0; i < mSmall; ++i)
        for (std::size_t j = 0; j < mBig; ++j) uBest[j] += psiSmall[i] * rows[i][j];
    std::vector<cplx> psiBig(mBig);
    const bool realMode = !phaseGrid;
    for (std::size_t j = 0; j < mBig; ++j) psiBig[j] = align(uBest[j], realMode);
    cert.psi1 = transposed ? psiBig : psiSmall;
    cert.psi2 = transposed ? psiSmall : psiBig;
    return cert;
}

}  // namespace

NormCertificate injective_norm(const TensorKernel& k, InjectiveMode mode, std::size_t restarts,
                               RngStream rng, std::size_t phaseGridQ) {
    switch (mode) {
        case InjectiveMode::ExactEnumeration:
            return injective_enumerate(k, false, 0);
        case InjectiveMode::PhaseGrid:
            return injective_enumerate(k, true, phaseGridQ);
        case InjectiveMode::Alternating: {
            AlternatingResult best = injective_alternating(k, restarts, rng);
            NormCertificate cert;
            cert.value = best.value;
            cert.exact = false;
            cert.psi1 = std::move(best.psi1);
            cert.psi2 = std::move(best.psi2);
            return cert;
        }
    }
    throw std::logic_error("injective_norm: unknown mode");
}

namespace {

// families stored as rows of a (count x vecDim) matrix
struct Gamma2State {
    Matrix u, v;  // rows unit (or zero-weight rows arbitrary)
};

// c = (w1 .* K)^T-type contraction onto the vector family on the other side:
// cOut(i, d) = sum_j w2_j K(i, j) conj(v(j, d))   (side = 0)
// cOut(j, d) = sum_i w1_i K(i, j) u(i, d)         (side = 1)
Matrix gamma2_contract(const TensorKernel& k, const Matrix& fam, int side) {
    const std::size_t m1 = k.rows(), m2 = k.cols();
    const std::size_t dim = fam.cols();
    if (k.factored()) {
        const Matrix& a = k.factor_a();
        const Matrix& b = k.factor_b();
        const std::size_t r = a.cols();
        Matrix g(r, dim);
        if (side == 0) {
            for (std::size_t j = 0; j < m2; ++j) {
                double w = k.space2().weight(j);
                if (w == 0.0) continue;
                for (std::size_t q = 0; q < r; ++q) {
                    cplx wb = w * b(j, q);
                    if (wb == cplx(0.0)) continue;
                    for (std::size_t d = 0; d < dim; ++d) g(q, d) += wb * std::conj(fam(j, d));
                }
            }
            Matrix out(m1, dim);
            for (std::size_t i = 0; i < m1; ++i)
                for (std::size_t q = 0; q < r; ++q) {
                    cplx aiq = a(i, q);
                    if (aiq == cplx(0.0)) continue;
                    for (std::size_t d = 0; d < dim; ++d) out(i, d) += aiq * g(q, d);
                }
            return out;
        }
        for (std::size_t i = 0; i < m1; ++i) {
            double w = k.space1().weight(i);
            if (w == 0.0) continue;
            for (std::size_t q = 0; q < r; ++q) {
                cplx wa = w * a(i, q);
                if (wa == cplx(0.0)) continue;
                for (std::size_t d = 0; d < dim; ++d) g(q, d) += wa * fam(i, d);
            }
        }
        Matrix out(m2, dim);
        for (std::size_t j = 0; j < m2; ++j)
            for (std::size_t q = 0; q < r; ++q) {
                cplx bjq = b(j, q);
                if (bjq == cplx(0.0)) continue;
                for (std::size_t d = 0; d < dim; ++d) out(j, d) += bjq * g(q, d);
            }
        return out;
    }
    const Matrix& dk = k.dense();
    if (side == 0) {
        Matrix out(m1, dim);
        for (std::size_t i = 0; i < m1; ++i)
            for (std::size_t j = 0; j < m2; ++j) {
                cplx wk = k.space2().weight(j) * dk(i, j);
                if (wk == cplx(0.0)) continue;
                for (std::size_t d = 0; d < dim; ++d) out(i, d) += wk * std::conj(fam(j, d));
            }
        return out;
    }
    Matrix out(m2, dim);
    for (std::size_t i = 0; i < m1; ++i) {
        double w = k.space1().weight(i);
        if (w == 0.0) continue;
        for (std::size_t j = 0; j < m2; ++j) {
            cplx wk = w * dk(i, j);
            if (wk == cplx(0.0)) continue;
            for (std::size_t d = 0; d < dim; ++d) out(j, d) += wk * fam(i, d);
        }
    }
    return out;
}

double row_norm(const Matrix& m, std::size_t i) {
    double s = 0.0;
    for (std::size_t d = 0; d < m.cols(); ++d) s += std::norm(m(i, d));
    return std::sqrt(s);
}

// value sum_i w_i ||c_i|| plus the normalized update written into fam
double gamma2_update(Matrix& fam, const Matrix& c, const ProbabilitySpace& sp, bool conjugate) {
    double total = 0.0;
    for (std::size_t i = 0; i < c.rows(); ++i) {
        double n = row_norm(c, i);
        total += sp.weight(i) * n;
        if (n < 1e-300) {
            for (std::size_t d = 0; d < c.cols(); ++d) fam(i, d) = (d == 0) ? 1.0 : 0.0;
            continue;
        }
        for (std::size_t d = 0; d < c.cols(); ++d)
            fam(i, d) = (conjugate ? std::conj(c(i, d)) : c(i, d)) / n;
    }
    return total;
}

double gamma2_run(const TensorKernel& k, Gamma2State& st) {
    double val = -1.0;
    for (int it = 0; it < 300; ++it) {
        Matrix c = gamma2_contract(k, st.v, 0);
        double v1 = gamma2_update(st.u, c, k.space1(), true);
        Matrix e = gamma2_contract(k, st.u, 1);
        double v2 = gamma2_update(st.v, e, k.space2(), false);
        if (v2 <= val * (1.0 + 1e-14)) return std::max({val, v1, v2});
        val = std::max(v1, v2);
    }
    return val;
}

}  // namespace

NormCertificate gamma2_star_norm(const TensorKernel& k, std::size_t vecDim,
                                 std::size_t restarts, RngStream rng) {
    if (restarts == 0) throw std::invalid_argument("gamma2_star_norm: restarts >= 1 required");
    if (vecDim < std::min<std::size_t>(k.rows() + k.cols(), 2))
        throw std::invalid_argument("gamma2_star_norm: vecDim too small");
    const std::size_t m1 = k.rows(), m2 = k.cols();

    NormCertificate best;
    best.exact = false;

    auto consider = [&](Gamma2State st) {
        double val = gamma2_run(k, st);
        if (val > best.value) {
            best.value = val;
            best.witnessU = std::move(st.u);
            best.witnessV = std::move(st.v);
        }
    };

    // scalar start from the alternating injective witness keeps the gamma2*
    // estimate at or above the injective estimate
    AlternatingResult inj = injective_alternating(k, std::max<std::size_t>(restarts / 2, 1),
                                                  rng.derive(0xabc));
    {
        Gamma2State st;
        st.u = Matrix(m1, vecDim);
        st.v = Matrix(m2, vecDim);
        for (std::size_t i = 0; i < m1; ++i) st.u(i, 0) = inj.psi1[i];
        for (std::size_t j = 0; j < m2; ++j) st.v(j, 0) = std::conj(inj.psi2[j]);
        consider(std::move(st));
    }
    for (std::size_t r = 0; r < restarts; ++r) {
        RngStream local = rng.derive(r + 1);
        Gamma2State st;
        st.u = Matrix(m1, vecDim);
        st.v = Matrix(m2, vecDim);
        for (std::size_t j = 0; j < m2; ++j) {
            for (std::size_t d = 0; d < vecDim; ++d) st.v(j, d) = local.gaussian_complex();
            double n = row_norm(st.v, j);
            for (std::size_t d = 0; d < vecDim; ++d) st.v(j, d) /= n;
        }
        consider(std::move(st));
    }
    return best;
}

double NormCertificate::evaluate_witness(const TensorKernel& k) const {
    if (witnessU.rows() > 0) {
        const std::size_t dim = witnessU.cols();
        cplx total = 0.0;
        for (std::size_t i = 0; i < k.rows(); ++i) {
            double w1 = k.space1().weight(i);
            if (w1 == 0.0) continue;
            std::vector<cplx> row = k.row(i);
            for (std::size_t j = 0; j < k.cols(); ++j) {
                cplx ip = 0.0;
                for (std::size_t d = 0; d < dim; ++d)
                    ip += witnessU(i, d) * std::conj(witnessV(j, d));
                total += w1 * k.space2().weight(j) * row[j] * ip;
            }
        }
        return std::abs(total);
    }
    cplx total = 0.0;
    for (std::size_t i = 0; i < k.rows(); ++i) {
        double w1 = k.space1().weight(i);
        if (w1 == 0.0) continue;
        std::vector<cplx> row = k.row(i);
        for (std::size_t j = 0; j < k.cols(); ++j)
            total += w1 * k.space2().weight(j) * row[j] * psi1[i] * psi2[j];
    }
    return std::abs(total);
}

namespace {

// per-variable normalized Hermite table h[v][k] = he_k(x_v)/sqrt(k!)
std::vector<std::vector<double>> hermite_table(std::span<const double> x, std::size_t maxDeg) {
    std::vector<std::vector<double>> h(x.size(), std::vector<double>(maxDeg + 1));
    for (std::size_t v = 0; v < x.size(); ++v) {
        h[v][0] = 1.0;
        if (maxDeg >= 1) h[v][1] = x[v];
        for (std::size_t k = 2; k <= maxDeg; ++k)
            h[v][k] = x[v] * h[v][k - 1] - static_cast<double>(k - 1) * h[v][k - 2];
        double fact = 1.0;
        for (std::size_t k = 2; k <= maxDeg; ++k) {
            fact *= static_cast<double>(k);
            h[v][k] /= std::sqrt(fact);
        }
    }
    return h;
}

}  // namespace

ChaosGridMap make_gaussian_evaluation_map(std::size_t nVars, std::size_t maxDegree,
                                          std::size_t samples, RngStream rng,
                                          std::size_t normProbes) {
    if (samples == 0) throw std::invalid_argument("make_gaussian_evaluation_map: samples >= 1");
    ChaosGridMap map;
    map.nVars = nVars;
    map.maxDegree = maxDegree;
    map.basis = all_multi_indices(nVars, maxDegree);
    map.space = ProbabilitySpace::uniform(samples);
    map.eval = Matrix(samples, map.basis.size());

    RngStream draw = rng.derive(0);
    std::vector<double> x(nVars);
    for (std::size_t s = 0; s < samples; ++s) {
        for (double& xi : x) xi = draw.gaussian();
        auto h = hermite_table(x, maxDegree);
        for (std::size_t q = 0; q < map.basis.size(); ++q) {
            double prod = 1.0;
            for (std::size_t v = 0; v < nVars; ++v)
                if (map.basis[q][v] > 0) prod *= h[v][map.basis[q][v]];
            map.eval(s, q) = prod;
        }
    }

    // MC sup of ||f on grid||_1 / ||f||_{L1(gamma)} over random chaos probes
    double worst = 0.0;
    for (std::size_t p = 0; p < normProbes; ++p) {
        RngStream pr = rng.derive(1000 + p);
        ChaosElement f(nVars, maxDegree);
        std::vector<cplx> coef(map.basis.size());
        for (std::size_t q = 0; q < map.basis.size(); ++q) {
            coef[q] = pr.gaussian_complex();
            f.set_coefficient(map.basis[q], coef[q]);
        }
        double gridL1 = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            cplx v = 0.0;
            for (std::size_t q = 0; q < map.basis.size(); ++q) v += map.eval(s, q) * coef[q];
            gridL1 += map.space.weight(s) * std::abs(v);
        }
        double trueL1 = chaos_l1_norm(f, 20000, pr.derive(7));
        if (trueL1 > 0.0) worst = std::max(worst, gridL1 / trueL1);
    }
    map.l1NormEstimate = std::max(worst, 1e-12);
    return map;
}

Decomposition decompose_t_r(const ChaosGridMap& u1, const ChaosGridMap& u2, double delta,
                            RngStream rng, std::size_t normRestarts) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("decompose_t_r: delta in (0, 1) required");
    if (u1.nVars != u2.nVars || u1.maxDegree != u2.maxDegree)
        throw std::invalid_argument("decompose_t_r: chaos maps must share basis");
    if (u1.basis.size() != u2.basis.size() || u1.basis.size() > 100000)
        throw std::invalid_argument("decompose_t_r: chaos dimension cap exceeded");
    const std::size_t dim = u1.basis.size();
    const std::size_t m1 = u1.space.size(), m2 = u2.space.size();

    // diagonal multipliers in the chaos basis; dT + dR = dS exactly
    std::vector<double> dS(dim), dT(dim), dR(dim);
    for (std::size_t q = 0; q < dim; ++q) {
        int deg = multi_index_degree(u1.basis[q]);
        dS[q] = (deg == 1) ? 1.0 : 0.0;
        dT[q] = (deg == 0) ? 0.0 : std::pow(delta, deg - 1);
        dR[q] = dS[q] - dT[q];
    }

    auto scaled = [&](const Matrix& e, const std::vector<double>& d) {
        Matrix out = e;
        for (std::size_t s = 0; s < out.rows(); ++s)
            for (std::size_t q = 0; q < dim; ++q) out(s, q) *= d[q];
        return out;
    };

    Decomposition rec{
        TensorKernel(u1.space, u2.space, scaled(u1.eval, dS), u2.eval),
        TensorKernel(u1.space, u2.space, scaled(u1.eval, dT), u2.eval),
        TensorKernel(u1.space, u2.space, scaled(u1.eval, dR), u2.eval),
    };

    RngStream probe = rng.derive(0);
    for (int p = 0; p < 200; ++p) {
        std::size_t i = probe.integer(m1), j = probe.integer(m2);
        double err = std::abs(rec.t.at(i, j) + rec.r.at(i, j) - rec.s.at(i, j));
        rec.reconstructionError = std::max(rec.reconstructionError, err);
    }

    rec.wedgeT = projective_norm(rec.t);
    rec.veeR = injective_norm(rec.r, InjectiveMode::Alternating, normRestarts, rng.derive(1)).value;
    std::size_t vecDim = std::min(m1 + m2, 2 * dim + 2);
    rec.gamma2R = gamma2_star_norm(rec.r, vecDim, normRestarts, rng.derive(2)).value;

    double uu = u1.l1NormEstimate * u2.l1NormEstimate;
    rec.analyticWedgeBound = (2.0 / delta) * uu;
    rec.analyticVeeBound = delta * uu;
    double tail = 0.0;  // max over degrees 2..D of delta^{deg-1}
    for (std::size_t deg = 2; deg <= u1.maxDegree; ++deg)
        tail = std::max(tail, std::pow(delta, deg - 1));
    rec.analyticGamma2Bound = tail * uu;
    return rec;
}

TraceDualityReport trace_duality_bound(const TensorKernel& v, const std::vector<Matrix>& psi1,
                                       const std::vector<Matrix>& psi2, const Matrix& a) {
    if (psi1.size() != v.rows() || psi2.size() != v.cols())
        throw std::invalid_argument("trace_duality_bound: system lengths mismatch kernel");
    const std::size_t d = a.rows();
    if (a.cols() != d) throw std::invalid_argument("trace_duality_bound: a must be square");
    for (const Matrix& m : psi1)
        if (m.rows() != d || m.cols() != d)
            throw std::invalid_argument("trace_duality_bound: psi1 dimension mismatch");
    for (const Matrix& m : psi2)
        if (m.rows() != d || m.cols() != d)
            throw std::invalid_argument("trace_duality_bound: psi2 dimension mismatch");

    cplx total = 0.0;
    std::vector<Matrix> ap(psi1.size());
    for (std::size_t i = 0; i < psi1.size(); ++i) ap[i] = a * psi1[i];
    if (v.factored()) {
        const Matrix& fa = v.factor_a();
        const Matrix& fb = v.factor_b();
        for (std::size_t q = 0; q < fa.cols(); ++q) {
            Matrix x(d, d), y(d, d);
            for (std::size_t i = 0; i < psi1.size(); ++i) {
                cplx w = v.space1().weight(i) * fa(i, q);
                if (w == cplx(0.0)) continue;
                Matrix t = ap[i];
                t *= w;
                x += t;
            }
            for (std::size_t j = 0; j < psi2.size(); ++j) {
                cplx w = v.space2().weight(j) * fb(j, q);
                if (w == cplx(0.0)) continue;
                Matrix t = psi2[j];
                t *= w;
                y += t;
            }
            total += (x * y).trace();
        }
    } else {
        for (std::size_t i = 0; i < psi1.size(); ++i) {
            double w1 = v.space1().weight(i);
            if (w1 == 0.0) continue;
            for (std::size_t j = 0; j < psi2.size(); ++j) {
                cplx w = w1 * v.space2().weight(j) * v.dense()(i, j);
                if (w == cplx(0.0)) continue;
                total += w * (ap[i] * psi2[j]).trace();
            }
        }
    }

    TraceDualityReport rep;
    rep.lhs = std::abs(total);
    double s1 = 0.0, s2 = 0.0;
    for (const Matrix& m : psi1) s1 = std::max(s1, operator_norm(m));
    for (const Matrix& m : psi2) s2 = std::max(s2, operator_norm(m));
    rep.rhs = trace_norm(a) * s1 * s2;
    rep.holds = rep.lhs <= rep.rhs + 1e-9;
    return rep;
}

namespace {

nlohmann::json cplx_matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j)
            r.push_back(nlohmann::json::array(
                {decimal(m(i, j).real()), decimal(m(i, j).imag())}));
        rows.push_back(std::move(r));
    }
    return rows;
}

Matrix cplx_matrix_from_json(const nlohmann::json& j) {
    std::size_t rows = j.size();
    std::size_t cols = rows == 0 ? 0 : j.at(0).size();
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t jj = 0; jj < cols; ++jj) {
            const auto& e = j.at(i).at(jj);
            m(i, jj) = cplx(std::stod(e.at(0).get<std::string>()),
                            std::stod(e.at(1).get<std::string>()));
        }
    return m;
}

nlohmann::json weights_json(const ProbabilitySpace& sp) {
    nlohmann::json ws = nlohmann::json::array();
    for (double w : sp.weights()) ws.push_back(decimal(w));
    return nlohmann::json{{"weights", ws}};
}

ProbabilitySpace weights_from_json(const nlohmann::json& j) {
    std::vector<double> ws;
    for (const auto& w : j.at("weights")) ws.push_back(std::stod(w.get<std::string>()));
    return ProbabilitySpace(std::move(ws));
}

}  // namespace

std::string to_json(const TensorKernel& k) {
    nlohmann::json j;
    j["space1"] = weights_json(k.space1());
    j["space2"] = weights_json(k.space2());
    if (k.factored()) {
        j["factorA"] = cplx_matrix_to_json(k.factor_a());
        j["factorB"] = cplx_matrix_to_json(k.factor_b());
    } else {
        j["values"] = cplx_matrix_to_json(k.dense());
    }
    return j.dump();
}

TensorKernel tensor_kernel_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ProbabilitySpace s1 = weights_from_json(j.at("space1"));
    ProbabilitySpace s2 = weights_from_json(j.at("space2"));
    if (j.contains("factorA"))
        return TensorKernel(std::move(s1), std::move(s2), cplx_matrix_from_json(j.at("factorA")),
                            cplx_matrix_from_json(j.at("factorB")));
    return TensorKernel(std::move(s1), std::move(s2), cplx_matrix_from_json(j.at("values")));
}

std::string to_json(const NormCertificate& c) {
    nlohmann::json j;
    j["value"] = decimal(c.value);
    j["exact"] = c.exact;
    j["accuracyFactor"] = decimal(c.accuracyFactor);
    auto vec = [](const std::vector<cplx>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const cplx& z : v)
            a.push_back(nlohmann::json::array({decimal(z.real()), decimal(z.imag())}));
        return a;
    };
    if (!c.psi1.empty()) {
        j["psi1"] = vec(c.psi1);
        j["psi2"] = vec(c.psi2);
    }
    if (c.witnessU.rows() > 0) {
        j["witnessU"] = cplx_matrix_to_json(c.witnessU);
        j["witnessV"] = cplx_matrix_to_json(c.witnessV);
    }
    return j.dump();
}

}  // namespace lab
