#include "lab/expcli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "json.hpp"
#include "lab/chaos.hpp"
#include "lab/generators.hpp"
#include "lab/orlicz.hpp"
#include "lab/sidon.hpp"
#include "lab/tensornorms.hpp"

namespace lab {

namespace {

std::string double_to_decimal(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void add_check(Report& r, const std::string& name, double lhs, double rhs, double tol) {
    CheckRecord c;
    c.name = name;
    c.lhs = lhs;
    c.rhs = rhs;
    c.tolerance = tol;
    c.pass = lhs <= rhs + tol;
    r.checks.push_back(std::move(c));
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("run_preset: " + msg);
}

void common_validate(const ExperimentConfig& cfg) {
    require(cfg.samples > 0, "samples must be positive");
    require(cfg.restarts > 0, "restarts must be positive");
    require(cfg.gridM > 0, "gridM must be positive");
    require(cfg.delta > 0.0 && cfg.delta < 1.0, "delta must lie in (0, 1)");
    require(cfg.chi >= 1.0, "chi must be >= 1");
    require(cfg.dims >= 1, "dims must be positive");
    require(cfg.nIndices >= 1, "nIndices must be positive");
}

Matrix random_matrix(std::size_t d, RngStream& rng) {
    Matrix m(d, d);
    for (auto& v : m.data()) v = rng.gaussian_complex();
    return m;
}

Matrix random_haar(std::size_t d, RngStream& rng) {
    return qr_haar_unitary(random_matrix(d, rng));
}

// ---- presets -------------------------------------------------------------

void preset_subg_tensor2(const ExperimentConfig& cfg, Report& rep) {
    const std::size_t m = cfg.nIndices;
    require(m <= 12, "nIndices (Walsh bit count) must be <= 12");
    std::vector<std::vector<std::size_t>> subsets;
    for (std::size_t i = 0; i < m; ++i) subsets.push_back({i});
    FunctionSystem sys = make_walsh(m, subsets);
    RngStream rng(cfg.seed);

    GramReport gram = biorthogonality_gram(sys, sys);
    add_check(rep, "orthonormal-gram-deviation", gram.deviation, 0.0, 1e-9);

    SubGaussianReport sg = subgaussian_constant(sys, cfg.restarts + 2, 60, rng.derive(1));
    add_check(rep, "subgaussian-constant-bounded", sg.constantC, 3.0, 0.0);
    add_check(rep, "subgaussian-constant-normalized", 1.0, sg.constantC, 1e-6);

    SidonEstimate t2 = tensor_sidon_constant(sys, 2, std::size_t{1} << 20, rng.derive(2));
    add_check(rep, "tensor2-lower-at-least-one", 1.0, t2.lowerBound, 1e-9);
    double upper = t2.upperBound ? *t2.upperBound : 0.0;
    add_check(rep, "tensor2-lower-le-upper", t2.lowerBound, upper, 1e-9);
    add_check(rep, "tensor2-upper-bounded", upper, 2.0, 1e-6);
    rep.witnesses.emplace_back("tensor2Sidon", to_json(t2));
}

void preset_decomp(const ExperimentConfig& cfg, Report& rep) {
    const std::size_t nv = cfg.nIndices;
    require(nv <= 6, "nIndices (chaos variables) must be <= 6");
    const std::size_t maxDegree = 5;
    const std::size_t gridS = std::min<std::size_t>(cfg.samples, 300);
    RngStream rng(cfg.seed);
    ChaosGridMap u1 = make_gaussian_evaluation_map(nv, maxDegree, gridS, rng.derive(1));
    ChaosGridMap u2 = make_gaussian_evaluation_map(nv, maxDegree, gridS, rng.derive(2));
    Decomposition dec = decompose_t_r(u1, u2, cfg.delta, rng.derive(3), cfg.restarts + 4);

    add_check(rep, "reconstruction-error", dec.reconstructionError, 0.0, 1e-10);
    add_check(rep, "wedge-of-t-vs-analytic", dec.wedgeT, dec.analyticWedgeBound * 1.05, 0.0);
    add_check(rep, "vee-of-r-vs-analytic", dec.veeR, dec.analyticVeeBound * 1.05, 0.0);
    add_check(rep, "vee-le-gamma2-estimate", dec.veeR, dec.gamma2R, 1e-9);

    nlohmann::json w;
    w["wedgeT"] = double_to_decimal(dec.wedgeT);
    w["veeR"] = double_to_decimal(dec.veeR);
    w["gamma2R"] = double_to_decimal(dec.gamma2R);
    w["analyticWedgeBound"] = double_to_decimal(dec.analyticWedgeBound);
    w["analyticVeeBound"] = double_to_decimal(dec.analyticVeeBound);
    w["analyticGamma2Bound"] = double_to_decimal(dec.analyticGamma2Bound);
    rep.witnesses.emplace_back("decomposition", w.dump());
}

void preset_mela_sweep(const ExperimentConfig& cfg, Report& rep) {
    (void)cfg;
    const int nMaxOdd = 15;
    const std::size_t grid = 192;
    std::vector<double> tvs;
    double maxFirstErr = 0.0, maxOddViolation = 0.0;
    std::string lastJson;
    for (int j = 1; j <= 8; ++j) {
        double delta = std::pow(2.0, -j);
        MelaMeasure mu = mela_lp(delta, grid, nMaxOdd);
        maxFirstErr = std::max(maxFirstErr, std::abs(mu.moment(1) - 1.0));
        for (int n = 3; n <= nMaxOdd; n += 2)
            maxOddViolation = std::max(maxOddViolation, std::abs(mu.moment(n)) - delta);
        tvs.push_back(mu.totalVariation);
        lastJson = to_json(mu);
    }
    double minIncrement = 0.0;
    for (std::size_t i = 1; i < tvs.size(); ++i)
        minIncrement = std::min(minIncrement, tvs[i] - tvs[i - 1]);
    double slope = (tvs.back() - tvs.front()) / (7.0 * std::log(2.0));

    add_check(rep, "first-moment-exact", maxFirstErr, 0.0, 1e-9);
    add_check(rep, "odd-moments-bounded", maxOddViolation, 0.0, 1e-9);
    add_check(rep, "total-variation-monotone", -minIncrement, 0.0, 1e-9);
    add_check(rep, "log-slope-positive", 1e-12, slope, 0.0);
    rep.witnesses.emplace_back("dampingMeasureAtSmallestDelta", lastJson);
}

void preset_talagrand(const ExperimentConfig& cfg, Report& rep) {
    RngStream rng(cfg.seed);
    const std::size_t mc = std::min<std::size_t>(cfg.samples, 2000);

    FunctionSystem lac = make_lacunary({1, 2, 4, 8, 16}, std::max<std::size_t>(cfg.gridM, 64));
    DominationReport d1 = domination_check(lac, mc, 8, 50, rng.derive(1));
    add_check(rep, "lacunary-max-ratio-bounded", d1.maxRatio, 20.0, 0.0);
    add_check(rep, "lacunary-mean-zero-rows", d1.meanZeroHypothesis ? 0.0 : 1.0, 0.0, 0.5);

    // sampled-Gaussian rows: the grid integral is itself a Gaussian average,
    // so the comparison ratio should sit near 1
    const std::size_t gPoints = 512, gRows = 5;
    RngStream grng = rng.derive(2);
    std::vector<std::vector<cplx>> rows(gRows, std::vector<cplx>(gPoints));
    for (std::size_t n = 0; n < gRows; ++n)
        for (std::size_t s = 0; s < gPoints; ++s) rows[n][s] = grng.gaussian();
    FunctionSystem gauss(ProbabilitySpace::uniform(gPoints), std::move(rows), "gaussian-sample");
    DominationReport d2 = domination_check(gauss, mc, 8, 40, rng.derive(3));
    add_check(rep, "gaussian-self-ratio-upper", d2.meanRatio, 1.5, 0.0);
    add_check(rep, "gaussian-self-ratio-lower", 0.6, d2.meanRatio, 0.0);
    add_check(rep, "gaussian-self-max-ratio-bounded", d2.maxRatio, 20.0, 0.0);
}

void preset_rs_equiv(const ExperimentConfig& cfg, Report& rep) {
    require(cfg.gridM > 16, "gridM must exceed twice the largest exponent (8)");
    RngStream rng(cfg.seed);
    FunctionSystem lac = make_lacunary({1, 2, 4, 8}, cfg.gridM);

    SidonEstimate alpha = sidon_constant(lac, SidonMode::Sampled, 64, rng.derive(1), 512);
    double upper = alpha.upperBound ? *alpha.upperBound : 0.0;
    add_check(rep, "interpolation-bracket", alpha.lowerBound, upper, 1e-9);

    RandomSidonEstimate rs = randomly_sidon_constant(
        lac, std::min<std::size_t>(cfg.samples, 2000), cfg.restarts, rng.derive(2));
    // E|g| = sqrt(pi)/2 for the standard complex Gaussian
    double transfer = upper * std::sqrt(4.0 / M_PI) + 3.0 * rs.stdError;
    add_check(rep, "randomly-sidon-vs-interpolation", rs.value, transfer, 5e-3);
    add_check(rep, "randomly-sidon-positive", 1e-9, rs.value, 0.0);

    SidonEstimate t4 = tensor_sidon_constant(lac, 4, 50000, rng.derive(3));
    add_check(rep, "tensor4-lower-positive", 1e-9, t4.lowerBound, 0.0);
    double t4upper = t4.upperBound ? *t4.upperBound : 0.0;
    add_check(rep, "tensor4-bracket", t4.lowerBound, t4upper, 1e-9);

    rep.witnesses.emplace_back("randomlySidon", to_json(rs));
    rep.witnesses.emplace_back("tensor4Sidon", to_json(t4));
}

void preset_chevet(const ExperimentConfig& cfg, Report& rep) {
    RngStream rng(cfg.seed);
    const std::size_t mc = std::min<std::size_t>(cfg.samples, 1000);

    auto coeffs_for = [&](std::size_t q, std::size_t n) {
        RngStream local = rng.derive(100 + q);
        std::vector<cplx> c(n);
        for (auto& v : c) v = local.gaussian_complex();
        return c;
    };

    FunctionSystem s1 = make_lacunary({1, 2, 3}, 12);
    FunctionSystem s2 = make_walsh(3, {{0}, {1}, {2}});
    ChevetReport c2 = chevet_bound_check({s1, s2}, {coeffs_for(0, 3), coeffs_for(1, 3)}, mc,
                                         rng.derive(10));
    add_check(rep, "two-fold-bound",
              c2.lhs, c2.rhs + 3.0 * (c2.lhsStdErr + c2.rhsStdErr), 0.0);

    FunctionSystem f1 = make_lacunary({1, 2}, 6);
    FunctionSystem f2 = make_lacunary({1, 3}, 8);
    FunctionSystem f3 = make_walsh(2, {{0}, {1}});
    ChevetReport c3 = chevet_bound_check(
        {f1, f2, f3}, {coeffs_for(2, 2), coeffs_for(3, 2), coeffs_for(4, 2)}, mc,
        rng.derive(11));
    add_check(rep, "three-fold-bound",
              c3.lhs, c3.rhs + 3.0 * (c3.lhsStdErr + c3.rhsStdErr), 0.0);
}

void preset_matricial_60(const ExperimentConfig& cfg, Report& rep) {
    const std::size_t d = cfg.dims;
    require(d <= 16, "dims must be <= 16");
    RngStream rng(cfg.seed);
    const std::size_t pairsPerMatrix = 50;
    double maxPolarErr = 0.0, maxExceed = -1.0, minSampledRatio = 2.0;
    for (std::size_t repIdx = 0; repIdx < 100; ++repIdx) {
        RngStream local = rng.derive(repIdx);
        Matrix a = random_matrix(d, local);
        double tn = trace_norm(a);
        // a = v p with p >= 0: u = v* attains tr(u a) = tr p = tr|a|
        Matrix u = polar_unitary(a).adjoint();
        maxPolarErr = std::max(maxPolarErr, std::abs(std::abs((u * a).trace()) - tn));

        double sup = 0.0;
        for (std::size_t s = 0; s < pairsPerMatrix; ++s) {
            Matrix u1 = random_haar(d, local), u2 = random_haar(d, local);
            sup = std::max(sup, std::abs((u1 * (u2 * a)).trace()));
        }
        maxExceed = std::max(maxExceed, sup - tn);
        minSampledRatio = std::min(minSampledRatio, sup / tn);
    }
    add_check(rep, "polar-maximizer-identity", maxPolarErr, 0.0, 1e-9);
    add_check(rep, "two-unitary-sup-below-trace-norm", maxExceed, 0.0, 1e-9);
    add_check(rep, "two-unitary-sup-nontrivial", 0.05, minSampledRatio, 0.0);
}

void preset_signmatrix(const ExperimentConfig& cfg, Report& rep) {
    RngStream rng(cfg.seed);

    // n = 2: exhaust all 16 sign matrices, compare the SVD pipeline against a
    // closed-form 2x2 oracle (tr|x| = sqrt(||x||_F^2 + 2 |det x|))
    std::vector<Matrix> all2;
    double inv = 1.0 / std::sqrt(2.0);
    for (std::size_t mask = 0; mask < 16; ++mask) {
        Matrix a(2, 2);
        for (std::size_t e = 0; e < 4; ++e)
            a(e / 2, e % 2) = ((mask >> e) & 1) ? inv : -inv;
        all2.push_back(std::move(a));
    }
    std::vector<Matrix> prods2;
    for (const Matrix& a : all2)
        for (const Matrix& b : all2) prods2.push_back(a * b);
    double chat = 0.0, chatOracle = 0.0;
    RngStream xr = rng.derive(1);
    for (std::size_t t = 0; t < 1000; ++t) {
        Matrix x = random_matrix(2, xr);
        double den = 0.0, denOracle = 0.0;
        for (const Matrix& p : prods2) {
            den = std::max(den, std::abs((x * p).trace()));
            cplx tr = x(0, 0) * p(0, 0) + x(0, 1) * p(1, 0) + x(1, 0) * p(0, 1) +
                      x(1, 1) * p(1, 1);
            denOracle = std::max(denOracle, std::abs(tr));
        }
        double frob2 = 0.0;
        for (const auto& v : x.data()) frob2 += std::norm(v);
        cplx det = x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
        double tnOracle = std::sqrt(frob2 + 2.0 * std::abs(det));
        chat = std::max(chat, trace_norm(x) / den);
        chatOracle = std::max(chatOracle, tnOracle / denOracle);
    }
    add_check(rep, "exhaustive-2x2-matches-oracle", std::abs(chat - chatOracle), 0.0, 1e-10);

    // n = 8: the constant is stable under doubling the rejection-sampled
    // ensemble (a superset can only lower the per-target ratio)
    const std::size_t n = 8;
    const std::size_t half = 100;
    SignMatrixEnsemble ens = make_sign_ensemble(n, cfg.chi, 2 * half, cfg.seed + 17);
    auto chat_for = [&](std::size_t count) {
        std::vector<Matrix> prods;
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = 0; j < count; ++j)
                prods.push_back(ens.members[i] * ens.members[j]);
        RngStream xs = rng.derive(2);
        double best = 0.0;
        for (std::size_t t = 0; t < 200; ++t) {
            Matrix x = random_matrix(n, xs);
            double den = 0.0;
            for (const Matrix& p : prods) den = std::max(den, std::abs((x * p).trace()));
            best = std::max(best, trace_norm(x) / den);
        }
        return best;
    };
    double cHalf = chat_for(half), cFull = chat_for(2 * half);
    add_check(rep, "doubling-drift-below-10-percent", std::abs(cFull - cHalf) / cHalf, 0.10, 0.0);
    add_check(rep, "constant-finite", cFull, 100.0, 0.0);
    add_check(rep, "rejection-rate", ens.rejectionRate, 0.999, 0.0);
}

void preset_character(const ExperimentConfig& cfg, Report& rep) {
    const std::size_t d = std::max<std::size_t>(cfg.dims, 2);
    require(d <= 16, "dims must be <= 16");
    const std::size_t s = std::max<std::size_t>(cfg.samples, 20000);
    std::vector<cplx> chi = character_samples(d, s, cfg.seed);

    double m2 = 0.0, m4 = 0.0;
    for (const cplx& v : chi) {
        double a = std::norm(v);
        m2 += a;
        m4 += a * a;
    }
    m2 /= static_cast<double>(s);
    m4 /= static_cast<double>(s);
    double se = std::sqrt(std::max(0.0, m4 - m2 * m2) / static_cast<double>(s));
    add_check(rep, "second-moment-unit", std::abs(m2 - 1.0), 3.0 * se, 1e-3);

    ProbabilitySpace sp = ProbabilitySpace::uniform(s);
    Psi2Result p = psi2_norm(chi, sp);
    add_check(rep, "psi2-upper", p.norm, 5.0, 0.0);
    add_check(rep, "psi2-lower", 0.2, p.norm, 0.0);

    double thresh = static_cast<double>(d) / 2.0;
    std::size_t hits = 0;
    for (const cplx& v : chi)
        if (v.real() > thresh) ++hits;
    double freq = static_cast<double>(hits) / static_cast<double>(s);
    double bound = M_E * std::exp(-(thresh * thresh) / (p.norm * p.norm));
    add_check(rep, "subgaussian-tail", freq, bound, 1e-12);
}

void preset_sub2(const ExperimentConfig& cfg, Report& rep) {
    const std::size_t copies = std::size_t{1} << 14;
    const std::size_t trials = std::max<std::size_t>(cfg.restarts * 10, 40);
    RngStream rng(cfg.seed);
    std::vector<double> invSqrtLog(copies + 1, 0.0);
    for (std::size_t k = 2; k <= copies; ++k)
        invSqrtLog[k] = 1.0 / std::sqrt(std::log(static_cast<double>(k)));
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream local = rng.derive(t);
        double sup = 0.0;
        for (std::size_t k = 2; k <= copies; ++k)
            sup = std::max(sup, std::abs(local.gaussian()) * invSqrtLog[k]);
        acc += sup;
        acc2 += sup * sup;
    }
    double mean = acc / static_cast<double>(trials);
    double se = std::sqrt(std::max(0.0, acc2 / trials - mean * mean) / trials);

    // empirical psi2 of a standard normal sample against the closed form
    // sqrt(2 / (1 - e^{-2}))
    const std::size_t pn = 8192;
    RngStream prng = rng.derive(777);
    std::vector<cplx> zs(pn);
    for (auto& v : zs) v = prng.gaussian();
    Psi2Result psi = psi2_norm(zs, ProbabilitySpace::uniform(pn));
    double closed = std::sqrt(2.0 / (1.0 - std::exp(-2.0)));
    add_check(rep, "psi2-empirical-vs-closed-form", std::abs(psi.norm - closed), 0.1, 0.0);
    add_check(rep, "sup-band-lower", 0.2 * psi.norm, mean + 3.0 * se, 0.0);
    add_check(rep, "sup-band-upper", mean, 5.0 * psi.norm + 3.0 * se, 0.0);
}

void preset_contraction(const ExperimentConfig& cfg, Report& rep) {
    const std::size_t d = cfg.dims;
    require(d <= 12, "dims must be <= 12");
    const std::size_t n = 3, points = 24;
    RngStream rng(cfg.seed);

    double scale = std::sqrt(static_cast<double>(d));
    std::vector<std::vector<std::vector<cplx>>> blocks;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<std::vector<cplx>> block(d * d, std::vector<cplx>(points));
        for (std::size_t s = 0; s < points; ++s) {
            RngStream local = rng.derive(k * 1000 + s);
            Matrix u = random_haar(d, local);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) block[i * d + j][s] = scale * u(i, j);
        }
        blocks.push_back(std::move(block));
    }
    MatricialSystem sys(ProbabilitySpace::uniform(points), std::vector<std::size_t>(n, d),
                        std::move(blocks), "haar-blocks");

    RngStream crng = rng.derive(5000);
    auto unit_norm = [&](Matrix m) {
        double nn = operator_norm(m);
        if (nn > 1e-12)
            for (auto& v : m.data()) v /= nn;
        return m;
    };
    std::vector<Matrix> coeffs, left, right;
    for (std::size_t k = 0; k < n; ++k) {
        coeffs.push_back(random_matrix(d, crng));
        left.push_back(unit_norm(random_matrix(d, crng)));
        right.push_back(unit_norm(random_matrix(d, crng)));
    }

    const std::size_t mc = std::min<std::size_t>(cfg.samples, 1000);
    ContractionReport g = contraction_check(sys, coeffs, left, right,
                                            Randomizer::GaussianComplex, mc, rng.derive(6));
    add_check(rep, "gaussian-contraction",
              g.lhs, g.bound + 3.0 * (g.lhsStdErr + g.rhsStdErr), 0.0);
    ContractionReport h = contraction_check(sys, coeffs, left, right,
                                            Randomizer::HaarUnitary, mc, rng.derive(7));
    add_check(rep, "unitary-contraction",
              h.lhs, h.bound + 3.0 * (h.lhsStdErr + h.rhsStdErr), 0.0);
}

void preset_domination_haar(const ExperimentConfig& cfg, Report& rep) {
    const std::size_t d = std::max<std::size_t>(cfg.dims, 2);
    require(d <= 16, "dims must be <= 16");
    const std::size_t s = std::min<std::size_t>(std::max<std::size_t>(cfg.samples, 2000), 10000);
    RngStream rng(cfg.seed);
    double scale = 1.0 / std::sqrt(static_cast<double>(d));

    std::vector<double> vals(s);
    std::vector<Matrix> polars;
    const std::size_t momentSamples = std::min<std::size_t>(s, 4000);
    polars.reserve(momentSamples);
    Matrix absMean(d, d);
    for (std::size_t i = 0; i < s; ++i) {
        RngStream local = rng.derive(i);
        Matrix g = random_matrix(d, local);
        for (auto& v : g.data()) v *= scale;
        Matrix u = polar_unitary(g);
        Matrix absG = u.adjoint() * g;
        absMean += absG;
        vals[i] = absG.trace().real() / static_cast<double>(d);
        if (polars.size() < momentSamples) polars.push_back(std::move(u));
    }
    for (auto& v : absMean.data()) v /= static_cast<double>(s);

    auto stats = [](const double* p, std::size_t m) {
        double mean = 0.0;
        for (std::size_t i = 0; i < m; ++i) mean += p[i];
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (std::size_t i = 0; i < m; ++i) var += (p[i] - mean) * (p[i] - mean);
        return std::pair<double, double>(mean, std::sqrt(var / (m - 1.0) / m));
    };
    auto [mean, se] = stats(vals.data(), s);
    auto [m1, se1] = stats(vals.data(), s / 2);
    auto [m2, se2] = stats(vals.data() + s / 2, s - s / 2);

    add_check(rep, "half-split-consistency", std::abs(m1 - m2),
              3.0 * std::sqrt(se1 * se1 + se2 * se2), 1e-12);
    // 8 / (3 pi) is the d -> infinity quarter-circle mean singular value
    add_check(rep, "delta-near-quarter-circle-asymptote",
              std::abs(mean - 8.0 / (3.0 * M_PI)), 0.06, 3.0 * se);

    HaarMomentReport haar = haar_moment_test(polars, d);
    add_check(rep, "polar-parts-first-moment", haar.maxFirstMoment, haar.tolerance, 0.0);
    add_check(rep, "polar-parts-second-moment", haar.maxSecondMoment, haar.tolerance, 0.0);

    Matrix off = absMean;
    for (std::size_t i = 0; i < d; ++i) off(i, i) = 0.0;
    add_check(rep, "commutant-off-diagonal", operator_norm(off),
              5.0 / std::sqrt(static_cast<double>(s)), 0.0);

    nlohmann::json w;
    w["deltaHat"] = double_to_decimal(mean);
    w["stdErr"] = double_to_decimal(se);
    w["asymptote"] = double_to_decimal(8.0 / (3.0 * M_PI));
    rep.witnesses.emplace_back("polarDomination", w.dump());
}

using PresetFn = void (*)(const ExperimentConfig&, Report&);

const std::vector<std::pair<std::string, PresetFn>>& registry() {
    static const std::vector<std::pair<std::string, PresetFn>> r = {
        {"subg-tensor2", preset_subg_tensor2},
        {"decomp", preset_decomp},
        {"mela-sweep", preset_mela_sweep},
        {"talagrand", preset_talagrand},
        {"rs-equiv", preset_rs_equiv},
        {"chevet", preset_chevet},
        {"matricial-60", preset_matricial_60},
        {"signmatrix", preset_signmatrix},
        {"character", preset_character},
        {"sub2", preset_sub2},
        {"contraction", preset_contraction},
        {"domination-haar", preset_domination_haar},
    };
    return r;
}

}  // namespace

bool Report::all_pass() const {
    for (const CheckRecord& c : checks)
        if (!c.pass) return false;
    return true;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, fn] : registry()) n.push_back(name);
        return n;
    }();
    return names;
}

Report run_preset(const ExperimentConfig& cfg) {
    common_validate(cfg);
    for (const auto& [name, fn] : registry()) {
        if (name == cfg.name) {
            Report rep;
            rep.config = cfg;
            auto start = std::chrono::steady_clock::now();
            fn(cfg, rep);
            rep.elapsedSeconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            return rep;
        }
    }
    throw std::invalid_argument("run_preset: unknown preset '" + cfg.name + "'");
}

std::string report_to_json(const Report& r) {
    nlohmann::json j;
    nlohmann::json cfg;
    cfg["name"] = r.config.name;
    cfg["seed"] = r.config.seed;
    cfg["gridM"] = r.config.gridM;
    cfg["samples"] = r.config.samples;
    cfg["restarts"] = r.config.restarts;
    cfg["delta"] = double_to_decimal(r.config.delta);
    cfg["chi"] = double_to_decimal(r.config.chi);
    cfg["dims"] = r.config.dims;
    cfg["nIndices"] = r.config.nIndices;
    j["config"] = cfg;
    nlohmann::json checks = nlohmann::json::array();
    for (const CheckRecord& c : r.checks) {
        nlohmann::json e;
        e["name"] = c.name;
        e["lhs"] = double_to_decimal(c.lhs);
        e["rhs"] = double_to_decimal(c.rhs);
        e["tolerance"] = double_to_decimal(c.tolerance);
        e["pass"] = c.pass;
        checks.push_back(std::move(e));
    }
    j["checks"] = checks;
    nlohmann::json w;
    for (const auto& [name, fragment] : r.witnesses) w[name] = nlohmann::json::parse(fragment);
    j["witnesses"] = w;
    j["allPass"] = r.all_pass();
    j["version"] = r.version;
    return j.dump(2) + "\n";
}

std::string report_to_csv(const Report& r) {
    std::string out = "check,lhs,rhs,tolerance,pass\n";
    for (const CheckRecord& c : r.checks) {
        out += c.name + "," + double_to_decimal(c.lhs) + "," + double_to_decimal(c.rhs) + "," +
               double_to_decimal(c.tolerance) + "," + (c.pass ? "true" : "false") + "\n";
    }
    return out;
}

void emit_report(const Report& r, const std::string& format, const std::string& path) {
    std::string body;
    if (format == "json") {
        body = report_to_json(r);
    } else if (format == "csv") {
        body = report_to_csv(r);
    } else {
        throw std::invalid_argument("emit_report: format must be 'json' or 'csv'");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_report: cannot open '" + path + "'");
    out << body;
    out.flush();
    if (!out) throw std::runtime_error("emit_report: write failed for '" + path + "'");
}

}  // namespace lab
