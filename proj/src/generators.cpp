#include "lab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace lab {

FunctionSystem make_lacunary(const std::vector<int>& exponents, std::size_t gridM) {
    if (exponents.empty()) throw std::invalid_argument("make_lacunary: empty exponent list");
    for (std::size_t k = 1; k < exponents.size(); ++k)
        if (exponents[k] <= exponents[k - 1])
            throw std::invalid_argument("make_lacunary: exponents must be strictly increasing");
    int maxExp = std::max(std::abs(exponents.front()), std::abs(exponents.back()));
    if (gridM <= 2 * static_cast<std::size_t>(maxExp))
        throw std::invalid_argument("make_lacunary: grid aliases; need gridM > 2 * max exponent");
    ProbabilitySpace sp = ProbabilitySpace::uniform(gridM);
    std::vector<std::vector<cplx>> rows;
    for (int e : exponents) {
        std::vector<cplx> row(gridM);
        for (std::size_t i = 0; i < gridM; ++i) {
            double th = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(gridM);
            row[i] = std::exp(cplx(0.0, e * th));
        }
        rows.push_back(std::move(row));
    }
    return FunctionSystem(sp, std::move(rows), "lacunary");
}

FunctionSystem make_walsh(std::size_t m, const std::vector<std::vector<std::size_t>>& subsets) {
    if (m == 0 || m > 20) throw std::invalid_argument("make_walsh: m out of range");
    if (subsets.empty()) throw std::invalid_argument("make_walsh: no subsets given");
    std::set<std::vector<std::size_t>> seen;
    const std::size_t points = std::size_t{1} << m;
    std::vector<std::vector<cplx>> rows;
    for (const auto& sub : subsets) {
        std::vector<std::size_t> sorted = sub;
        std::sort(sorted.begin(), sorted.end());
        if (!seen.insert(sorted).second)
            throw std::invalid_argument("make_walsh: duplicate subset");
        for (std::size_t i : sub)
            if (i >= m) throw std::out_of_range("make_walsh: index out of range");
        std::vector<cplx> row(points);
        for (std::size_t t = 0; t < points; ++t) {
            int v = 1;
            for (std::size_t i : sub)
                if ((t >> i) & 1) v = -v;
            row[t] = static_cast<double>(v);
        }
        rows.push_back(std::move(row));
    }
    return FunctionSystem(ProbabilitySpace::uniform(points), std::move(rows), "walsh");
}

namespace {

Matrix ginibre(std::size_t d, RngStream& rng) {
    Matrix g(d, d);
    for (auto& v : g.data()) v = rng.gaussian_complex();
    return g;
}

}  // namespace

MatricialSystem make_haar_unitary_system(std::size_t d, std::size_t samples,
                                         std::uint64_t seed) {
    if (d == 0 || samples == 0)
        throw std::invalid_argument("make_haar_unitary_system: positive d and samples required");
    RngStream rng(seed);
    double scale = std::sqrt(static_cast<double>(d));
    std::vector<std::vector<cplx>> block(d * d, std::vector<cplx>(samples));
    for (std::size_t s = 0; s < samples; ++s) {
        RngStream local = rng.derive(s);
        Matrix u = qr_haar_unitary(ginibre(d, local));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) block[i * d + j][s] = scale * u(i, j);
    }
    return MatricialSystem(ProbabilitySpace::uniform(samples), {d}, {std::move(block)},
                           "haar-unitary");
}

namespace {

Matrix sylvester_hadamard(std::size_t n) {
    Matrix h(1, 1);
    h(0, 0) = 1.0;
    for (std::size_t sz = 1; sz < n; sz *= 2) {
        Matrix next(2 * sz, 2 * sz);
        for (std::size_t i = 0; i < sz; ++i)
            for (std::size_t j = 0; j < sz; ++j) {
                next(i, j) = h(i, j);
                next(i, j + sz) = h(i, j);
                next(i + sz, j) = h(i, j);
                next(i + sz, j + sz) = -h(i, j);
            }
        h = next;
    }
    double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : h.data()) v *= scale;
    return h;
}

}  // namespace

SignMatrixEnsemble make_sign_ensemble(std::size_t n, double chi, std::size_t count,
                                      std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("make_sign_ensemble: n >= 1 required");
    if (chi < 1.0) throw std::invalid_argument("make_sign_ensemble: chi >= 1 required");
    SignMatrixEnsemble ens;
    ens.n = n;
    ens.chi = chi;
    const bool pow2 = (n & (n - 1)) == 0;
    if (pow2) ens.members.push_back(sylvester_hadamard(n));
    RngStream rng(seed);
    double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::size_t draws = 0, rejected = 0;
    const std::size_t budget = std::max<std::size_t>(count, 1) * 1000;
    while (ens.members.size() < count && draws < budget) {
        ++draws;
        Matrix a(n, n);
        for (auto& v : a.data()) v = scale * static_cast<double>(rng.sign());
        if (operator_norm(a) <= chi + 1e-12) {
            ens.members.push_back(std::move(a));
        } else {
            ++rejected;
        }
    }
    ens.rejectionRate = draws > 0 ? static_cast<double>(rejected) / static_cast<double>(draws)
                                  : 0.0;
    if (ens.members.size() < count && ens.rejectionRate > 0.999)
        throw std::runtime_error(
            "make_sign_ensemble: rejection rate above 99.9%; increase chi");
    return ens;
}

PolarDominationOperator estimate_polar_domination(std::size_t d, std::size_t samples,
                                                  std::uint64_t seed) {
    if (d == 0 || samples == 0)
        throw std::invalid_argument("estimate_polar_domination: positive d and samples");
    RngStream rng(seed);
    double scale = 1.0 / std::sqrt(static_cast<double>(d));
    Matrix absMean(d, d);
    double traceAcc = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        RngStream local = rng.derive(s);
        Matrix g = ginibre(d, local);
        for (auto& v : g.data()) v *= scale;
        // |g| = v* g from the polar decomposition g = v |g|
        Matrix absG = polar_unitary(g).adjoint() * g;
        absMean += absG;
        traceAcc += absG.trace().real();
    }
    for (auto& v : absMean.data()) v /= static_cast<double>(samples);
    PolarDominationOperator op;
    op.d = d;
    op.samples = samples;
    op.deltaHat = traceAcc / (static_cast<double>(samples) * static_cast<double>(d));
    Matrix off = absMean;
    for (std::size_t i = 0; i < d; ++i) off(i, i) = 0.0;
    op.commutantOffDiag = operator_norm(off);
    return op;
}

std::vector<Matrix> polar_domination_apply(const PolarDominationOperator& op,
                                           const std::vector<Matrix>& gSamples) {
    std::vector<Matrix> out;
    out.reserve(gSamples.size());
    for (const Matrix& g : gSamples) {
        if (g.rows() != op.d || g.cols() != op.d)
            throw std::invalid_argument("polar_domination_apply: dimension mismatch");
        out.push_back(polar_unitary(g));
    }
    return out;
}

HaarMomentReport haar_moment_test(const std::vector<Matrix>& unitaries, std::size_t d) {
    if (unitaries.empty()) throw std::invalid_argument("haar_moment_test: no samples");
    const double s = static_cast<double>(unitaries.size());
    HaarMomentReport rep;
    rep.tolerance = 5.0 / std::sqrt(s);
    Matrix first(d, d);
    for (const Matrix& u : unitaries) first += u;
    for (auto& v : first.data()) v /= s;
    for (const auto& v : first.data()) rep.maxFirstMoment = std::max(rep.maxFirstMoment, std::abs(v));
    // E v(i,j) conj(v(k,l)) = delta_ik delta_jl / d
    double invD = 1.0 / static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k)
                for (std::size_t l = 0; l < d; ++l) {
                    cplx acc = 0.0;
                    for (const Matrix& u : unitaries) acc += u(i, j) * std::conj(u(k, l));
                    acc /= s;
                    double target = (i == k && j == l) ? invD : 0.0;
                    rep.maxSecondMoment =
                        std::max(rep.maxSecondMoment, std::abs(acc - target));
                }
    rep.pass = rep.maxFirstMoment <= rep.tolerance && rep.maxSecondMoment <= rep.tolerance;
    return rep;
}

std::vector<cplx> character_samples(std::size_t d, std::size_t samples, std::uint64_t seed) {
    if (samples < 1000) throw std::invalid_argument("character_samples: need >= 1000 samples");
    RngStream rng(seed);
    std::vector<cplx> out(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        RngStream local = rng.derive(s);
        out[s] = qr_haar_unitary(ginibre(d, local)).trace();
    }
    return out;
}

}  // namespace lab
