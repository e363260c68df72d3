#include "lab/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "lab/simplex.hpp"

namespace lab {

ChaosElement::ChaosElement(std::size_t nVars, std::size_t maxDegree, bool complexVars)
    : nVars_(nVars), maxDegree_(maxDegree), complexVars_(complexVars) {
    if (nVars == 0) throw std::invalid_argument("ChaosElement: nVars >= 1 required");
    if (complexVars && nVars % 2 != 0)
        throw std::invalid_argument("ChaosElement: complex elements need an even real count");
}

ChaosElement ChaosElement::gaussian_coordinate(std::size_t nVars, std::size_t maxDegree,
                                               std::size_t n) {
    if (n >= nVars) throw std::invalid_argument("gaussian_coordinate: index out of range");
    ChaosElement f(nVars, maxDegree);
    MultiIndex a(nVars, 0);
    a[n] = 1;
    f.coeffs_[a] = 1.0;
    return f;
}

ChaosElement ChaosElement::complex_gaussian(std::size_t nComplex, std::size_t maxDegree,
                                            std::size_t n) {
    if (n >= nComplex) throw std::invalid_argument("complex_gaussian: index out of range");
    ChaosElement f(2 * nComplex, maxDegree, true);
    static constexpr double inv_sqrt2 = 0.70710678118654752440;
    MultiIndex a(2 * nComplex, 0);
    a[2 * n] = 1;
    f.coeffs_[a] = inv_sqrt2;
    a[2 * n] = 0;
    a[2 * n + 1] = 1;
    f.coeffs_[a] = cplx(0.0, inv_sqrt2);
    return f;
}

ChaosElement ChaosElement::constant(std::size_t nVars, std::size_t maxDegree, cplx value,
                                    bool complexVars) {
    ChaosElement f(nVars, maxDegree, complexVars);
    if (value != cplx(0.0)) f.coeffs_[MultiIndex(nVars, 0)] = value;
    return f;
}

cplx ChaosElement::coefficient(const MultiIndex& a) const {
    auto it = coeffs_.find(a);
    return it == coeffs_.end() ? cplx(0.0) : it->second;
}

void ChaosElement::set_coefficient(const MultiIndex& a, cplx value) {
    if (a.size() != nVars_) throw std::invalid_argument("set_coefficient: index arity mismatch");
    int deg = multi_index_degree(a);
    if (deg < 0 || static_cast<std::size_t>(deg) > maxDegree_)
        throw std::invalid_argument("set_coefficient: degree exceeds truncation");
    if (value == cplx(0.0))
        coeffs_.erase(a);
    else
        coeffs_[a] = value;
}

cplx ChaosElement::mean() const { return coefficient(MultiIndex(nVars_, 0)); }

double ChaosElement::l2_norm() const {
    double s = 0.0;
    for (const auto& [a, c] : coeffs_) s += std::norm(c);
    return std::sqrt(s);
}

cplx ChaosElement::evaluate(std::span<const double> x) const {
    if (x.size() != nVars_) throw std::invalid_argument("evaluate: point arity mismatch");
    // normalized probabilists' Hermite values per variable up to maxDegree
    std::vector<std::vector<double>> h(nVars_, std::vector<double>(maxDegree_ + 1));
    for (std::size_t v = 0; v < nVars_; ++v) {
        h[v][0] = 1.0;
        if (maxDegree_ >= 1) h[v][1] = x[v];
        for (std::size_t k = 2; k <= maxDegree_; ++k)
            h[v][k] = x[v] * h[v][k - 1] - static_cast<double>(k - 1) * h[v][k - 2];
        double fact = 1.0;
        for (std::size_t k = 2; k <= maxDegree_; ++k) {
            fact *= static_cast<double>(k);
            h[v][k] /= std::sqrt(fact);
        }
    }
    cplx s = 0.0;
    for (const auto& [a, c] : coeffs_) {
        double prod = 1.0;
        for (std::size_t v = 0; v < nVars_; ++v)
            if (a[v] > 0) prod *= h[v][a[v]];
        s += c * prod;
    }
    return s;
}

ChaosElement& ChaosElement::operator+=(const ChaosElement& o) {
    if (nVars_ != o.nVars_ || complexVars_ != o.complexVars_)
        throw std::invalid_argument("ChaosElement: incompatible operands");
    maxDegree_ = std::max(maxDegree_, o.maxDegree_);
    for (const auto& [a, c] : o.coeffs_) {
        auto it = coeffs_.find(a);
        if (it == coeffs_.end())
            coeffs_[a] = c;
        else {
            it->second += c;
            if (it->second == cplx(0.0)) coeffs_.erase(it);
        }
    }
    return *this;
}

ChaosElement& ChaosElement::operator*=(cplx s) {
    if (s == cplx(0.0)) {
        coeffs_.clear();
        return *this;
    }
    for (auto& [a, c] : coeffs_) c *= s;
    return *this;
}

ChaosElement mehler_apply(const ChaosElement& f, double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("mehler_apply: delta must lie in (0, 1]");
    ChaosElement g(f.num_vars(), f.max_degree(), f.complex_vars());
    for (const auto& [a, c] : f.coefficients())
        g.set_coefficient(a, c * std::pow(delta, multi_index_degree(a)));
    return g;
}

ChaosElement t_delta_apply(const ChaosElement& f, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("t_delta_apply: delta must lie in (0, 1)");
    ChaosElement g(f.num_vars(), f.max_degree(), f.complex_vars());
    for (const auto& [a, c] : f.coefficients()) {
        int deg = multi_index_degree(a);
        if (deg == 0) continue;  // P_0 subtracted
        g.set_coefficient(a, c * std::pow(delta, deg - 1));
    }
    if (!f.complex_vars()) return g;

    // phase averaging W: in the degree-1 block, keep only the holomorphic part
    // of each complex coordinate pair.
    ChaosElement out(f.num_vars(), f.max_degree(), true);
    std::vector<bool> pairActive(f.num_vars() / 2, false);
    for (const auto& [a, c] : g.coefficients()) {
        if (multi_index_degree(a) != 1) {
            out.set_coefficient(a, c);
            continue;
        }
        std::size_t v = 0;
        while (a[v] == 0) ++v;
        pairActive[v / 2] = true;
    }
    static constexpr double inv_sqrt2 = 0.70710678118654752440;
    for (std::size_t p = 0; p < pairActive.size(); ++p) {
        if (!pairActive[p]) continue;
        MultiIndex re(f.num_vars(), 0), im(f.num_vars(), 0);
        re[2 * p] = 1;
        im[2 * p + 1] = 1;
        cplx cre = g.coefficient(re), cim = g.coefficient(im);
        // holomorphic component (c_re - i c_im)/sqrt(2) of the pair survives;
        // the anti-holomorphic one is averaged away.
        cplx holo = (cre - cplx(0.0, 1.0) * cim) * inv_sqrt2;
        out.set_coefficient(re, holo * inv_sqrt2);
        out.set_coefficient(im, cplx(0.0, 1.0) * holo * inv_sqrt2);
    }
    return out;
}

ChaosElement chaos_project(const ChaosElement& f, std::size_t k) {
    if (k > f.max_degree()) throw std::invalid_argument("chaos_project: degree out of range");
    ChaosElement g(f.num_vars(), f.max_degree(), f.complex_vars());
    for (const auto& [a, c] : f.coefficients())
        if (static_cast<std::size_t>(multi_index_degree(a)) == k) g.set_coefficient(a, c);
    return g;
}

namespace {

// Gauss-Hermite nodes/weights for the standard Gaussian weight, via the
// eigenproblem of the probabilists' Jacobi matrix.
struct GaussHermite {
    std::vector<double> nodes, weights;
};

GaussHermite gauss_hermite(std::size_t n) {
    Matrix j(n, n);
    for (std::size_t k = 1; k < n; ++k) {
        double b = std::sqrt(static_cast<double>(k));
        j(k - 1, k) = b;
        j(k, k - 1) = b;
    }
    HermEig eig = hermitian_eig(j);
    GaussHermite gh;
    gh.nodes.resize(n);
    gh.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        gh.nodes[i] = eig.values[i];
        gh.weights[i] = std::norm(eig.vectors(0, i));
    }
    return gh;
}

void enumerate_indices(std::size_t nVars, std::size_t maxDegree, std::size_t pos,
                       MultiIndex& cur, int used, std::vector<MultiIndex>& out) {
    if (pos == nVars) {
        out.push_back(cur);
        return;
    }
    for (int k = 0; k + used <= static_cast<int>(maxDegree); ++k) {
        cur[pos] = k;
        enumerate_indices(nVars, maxDegree, pos + 1, cur, used + k, out);
    }
    cur[pos] = 0;
}

}  // namespace

std::vector<MultiIndex> all_multi_indices(std::size_t nVars, std::size_t maxDegree) {
    std::vector<MultiIndex> out;
    MultiIndex cur(nVars, 0);
    enumerate_indices(nVars, maxDegree, 0, cur, 0, out);
    return out;
}

double chaos_l1_norm(const ChaosElement& f, std::size_t samples, RngStream rng,
                     std::string* methodOut) {
    const std::size_t n = f.num_vars();
    if (n <= 3) {
        if (methodOut) *methodOut = "gauss-hermite";
        const std::size_t q = 40;
        GaussHermite gh = gauss_hermite(q);
        double total = 0.0;
        std::vector<double> x(n);
        std::vector<std::size_t> idx(n, 0);
        while (true) {
            double w = 1.0;
            for (std::size_t v = 0; v < n; ++v) {
                x[v] = gh.nodes[idx[v]];
                w *= gh.weights[idx[v]];
            }
            total += w * std::abs(f.evaluate(x));
            std::size_t v = 0;
            while (v < n && ++idx[v] == q) idx[v++] = 0;
            if (v == n) break;
        }
        return total;
    }
    if (methodOut) *methodOut = "monte-carlo";
    double total = 0.0;
    std::vector<double> x(n);
    for (std::size_t s = 0; s < samples; ++s) {
        for (double& xi : x) xi = rng.gaussian();
        total += std::abs(f.evaluate(x));
    }
    return total / static_cast<double>(samples);
}

TDeltaNorms operator_norms_t_delta(std::size_t nVars, std::size_t maxDegree, double delta,
                                   std::size_t samples, RngStream rng) {
    if (samples < 1000)
        throw std::invalid_argument("operator_norms_t_delta: samples >= 1000 required");
    TDeltaNorms out;
    // diagonal multipliers: degree 0 -> 0, degree k >= 2 -> delta^{k-1};
    // the 2->2 norm of T_delta (1 - P_1) is their maximum.
    for (std::size_t k = 2; k <= maxDegree; ++k)
        out.l2TailNorm = std::max(out.l2TailNorm, std::pow(delta, static_cast<double>(k - 1)));
    out.l1AnalyticBound = 2.0 / delta;

    std::vector<MultiIndex> idx = all_multi_indices(nVars, maxDegree);
    const std::size_t trials = 24;
    double best = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream local = rng.derive(t);
        ChaosElement f(nVars, maxDegree);
        for (const auto& a : idx) f.set_coefficient(a, local.gaussian_complex());
        ChaosElement tf = t_delta_apply(f, delta);
        double denom = chaos_l1_norm(f, samples, local.derive(1));
        double numer = chaos_l1_norm(tf, samples, local.derive(2));
        if (denom > 1e-12) best = std::max(best, numer / denom);
    }
    out.l1NormBound = best;
    return out;
}

double MelaMeasure::moment(int n) const {
    double s = 0.0;
    for (std::size_t i = 0; i < gridPoints.size(); ++i)
        s += std::pow(gridPoints[i], n) * signedWeights[i];
    return s;
}

MelaMeasure mela_lp(double delta, std::size_t gridSize, int nMaxOdd) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("mela_lp: delta in (0,1)");
    if (gridSize < 16) throw std::invalid_argument("mela_lp: gridSize >= 16 required");
    if (nMaxOdd % 2 == 0) throw std::invalid_argument("mela_lp: nMaxOdd must be odd");

    std::vector<double> grid(gridSize);
    for (std::size_t i = 0; i < gridSize; ++i)
        grid[i] = static_cast<double>(i) / static_cast<double>(gridSize - 1);

    // variables: sigma+ then sigma-; minimize their sum
    SimplexLP lp(2 * gridSize);
    for (std::size_t j = 0; j < 2 * gridSize; ++j) lp.set_objective(j, 1.0);
    auto momentRow = [&](int n) {
        std::vector<double> row(2 * gridSize);
        for (std::size_t i = 0; i < gridSize; ++i) {
            double p = std::pow(grid[i], n);
            row[i] = p;
            row[gridSize + i] = -p;
        }
        return row;
    };
    lp.add_constraint(momentRow(1), SimplexLP::Rel::EQ, 1.0);
    for (int n = 3; n <= nMaxOdd; n += 2) {
        std::vector<double> row = momentRow(n);
        lp.add_constraint(row, SimplexLP::Rel::LE, delta);
        lp.add_constraint(row, SimplexLP::Rel::GE, -delta);
    }
    SimplexLP::Result res = lp.solve();
    if (!res.feasible || !res.bounded) throw std::runtime_error("mela_lp: solver failed");

    MelaMeasure mu;
    mu.gridPoints = grid;
    mu.signedWeights.resize(gridSize);
    mu.delta = delta;
    mu.nMaxOdd = nMaxOdd;
    mu.totalVariation = 0.0;
    for (std::size_t i = 0; i < gridSize; ++i) {
        mu.signedWeights[i] = res.x[i] - res.x[gridSize + i];
        mu.totalVariation += res.x[i] + res.x[gridSize + i];
    }

    // re-verify the LP constraints independently of the solver
    if (std::abs(mu.moment(1) - 1.0) > 1e-9)
        throw std::runtime_error("mela_lp: first-moment constraint violated on recheck");
    for (int n = 3; n <= nMaxOdd; n += 2)
        if (std::abs(mu.moment(n)) > delta + 1e-9)
            throw std::runtime_error("mela_lp: odd-moment constraint violated on recheck");
    return mu;
}

ChaosElement mela_damping_apply(const ChaosElement& f, const MelaMeasure& mu) {
    std::vector<double> lambda(f.max_degree() + 1, 0.0);
    for (std::size_t k = 0; k <= f.max_degree(); ++k)
        if (k % 2 == 1) lambda[k] = mu.moment(static_cast<int>(k));
    if (std::abs(lambda.size() > 1 ? lambda[1] - 1.0 : 0.0) > 1e-9)
        throw std::runtime_error("mela_damping_apply: degree-1 multiplier != 1");
    ChaosElement g(f.num_vars(), f.max_degree(), f.complex_vars());
    for (const auto& [a, c] : f.coefficients()) {
        int deg = multi_index_degree(a);
        if (lambda[deg] != 0.0) g.set_coefficient(a, c * lambda[deg]);
    }
    return g;
}

std::string to_json(const MelaMeasure& mu) {
    nlohmann::json j;
    j["delta"] = mu.delta;
    j["grid"] = mu.gridPoints;
    j["weights"] = mu.signedWeights;
    j["tv"] = mu.totalVariation;
    j["nMaxOdd"] = mu.nMaxOdd;
    return j.dump();
}

GaussianComparisonReport gaussian_comparison_check(const std::vector<std::vector<cplx>>& x,
                                                   std::size_t samples, RngStream rng,
                                                   const Matrix* contraction) {
    if (samples < 1000)
        throw std::invalid_argument("gaussian_comparison_check: samples >= 1000 required");
    const std::size_t n = x.size();
    const std::size_t dim = x.empty() ? 0 : x[0].size();
    auto supNorm = [&](const std::vector<cplx>& v) {
        double m = 0.0;
        for (const cplx& c : v) m = std::max(m, std::abs(c));
        return m;
    };
    double sumR = 0.0, sumR2 = 0.0, sumC = 0.0, sumC2 = 0.0, sumA = 0.0, sumA2 = 0.0;
    std::vector<cplx> gC(n);
    std::vector<double> gR(n);
    std::vector<cplx> acc(dim);
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t k = 0; k < n; ++k) {
            gR[k] = rng.gaussian();
            gC[k] = rng.gaussian_complex();
        }
        std::fill(acc.begin(), acc.end(), cplx(0.0));
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t d = 0; d < dim; ++d) acc[d] += gR[k] * x[k][d];
        double vR = supNorm(acc);
        sumR += vR;
        sumR2 += vR * vR;
        std::fill(acc.begin(), acc.end(), cplx(0.0));
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t d = 0; d < dim; ++d) acc[d] += gC[k] * x[k][d];
        double vC = supNorm(acc);
        sumC += vC;
        sumC2 += vC * vC;
        if (contraction) {
            // common random numbers: reuse the complex draw
            std::fill(acc.begin(), acc.end(), cplx(0.0));
            for (std::size_t i = 0; i < n; ++i) {
                cplx rot = 0.0;
                for (std::size_t j = 0; j < n; ++j) rot += (*contraction)(i, j) * gC[j];
                for (std::size_t d = 0; d < dim; ++d) acc[d] += rot * x[i][d];
            }
            double vA = supNorm(acc);
            sumA += vA;
            sumA2 += vA * vA;
        }
    }
    auto finish = [&](double sum, double sum2, double& mean, double& se) {
        double s = static_cast<double>(samples);
        mean = sum / s;
        double var = std::max(0.0, sum2 / s - mean * mean);
        se = std::sqrt(var / s);
    };
    GaussianComparisonReport rep;
    finish(sumR, sumR2, rep.meanRealGaussian, rep.stdErrReal);
    finish(sumC, sumC2, rep.meanComplexGaussian, rep.stdErrComplex);
    double tol = 3.0 * (rep.stdErrReal + rep.stdErrComplex);
    const double sqrt2 = std::sqrt(2.0);
    rep.sandwichHolds = (rep.meanComplexGaussian >= rep.meanRealGaussian / sqrt2 - tol) &&
                        (rep.meanComplexGaussian <= rep.meanRealGaussian * sqrt2 + tol);
    if (contraction) {
        finish(sumA, sumA2, rep.meanRotated, rep.stdErrRotated);
        rep.contractionHolds = rep.meanRotated <=
                               rep.meanComplexGaussian +
                                   3.0 * (rep.stdErrRotated + rep.stdErrComplex);
    }
    return rep;
}

}  // namespace lab
