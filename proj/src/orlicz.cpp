#include "lab/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lab {

namespace {

// sum_i w_i exp(|f_i|/t)^2, with +inf short-circuit on exponent overflow
double orlicz_mass(std::span<const cplx> f, const ProbabilitySpace& space, double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double w = space.weight(i);
        if (w == 0.0) continue;
        double e = std::abs(f[i]) / t;
        e *= e;
        if (e > 700.0) return std::numeric_limits<double>::infinity();
        s += w * std::exp(e);
    }
    return s;
}

double max_abs_on_support(std::span<const cplx> f, const ProbabilitySpace& space) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (space.weight(i) > 0.0) m = std::max(m, std::abs(f[i]));
    return m;
}

}  // namespace

Psi2Result psi2_norm(std::span<const cplx> f, const ProbabilitySpace& space) {
    if (f.size() != space.size()) throw std::invalid_argument("psi2_norm: length mismatch");
    Psi2Result res;
    res.method = Psi2Result::Method::OrliczBisection;
    double maxAbs = max_abs_on_support(f, space);
    if (maxAbs == 0.0) return res;  // norm 0 for the a.e.-zero function

    const double e = std::exp(1.0);
    // orlicz_mass(maxAbs) <= e always (every exponent <= 1), so maxAbs brackets
    // from above; walk the lower end down until the mass exceeds e.
    double hi = maxAbs;
    double lo = maxAbs;
    while (orlicz_mass(f, space, lo) <= e) {
        hi = lo;
        lo *= 0.5;
        ++res.iterations;
        if (lo < 1e-300) {  // constant-modulus function: the norm is exactly maxAbs
            res.norm = maxAbs;
            return res;
        }
    }
    while ((hi - lo) > 1e-12 * hi) {
        double mid = 0.5 * (lo + hi);
        if (orlicz_mass(f, space, mid) <= e)
            hi = mid;
        else
            lo = mid;
        ++res.iterations;
    }
    res.norm = hi;
    return res;
}

Psi2Result psi2_norm_lp(std::span<const cplx> f, const ProbabilitySpace& space, double pMax) {
    if (pMax < 2.0) throw std::invalid_argument("psi2_norm_lp: pMax >= 2 required");
    Psi2Result res;
    res.method = Psi2Result::Method::LpEquivalent;
    const std::size_t gridSize = 64;
    double best = 0.0;
    for (std::size_t k = 0; k < gridSize; ++k) {
        double p = (gridSize == 1)
                       ? 2.0
                       : 2.0 * std::pow(pMax / 2.0,
                                        static_cast<double>(k) / static_cast<double>(gridSize - 1));
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            s += space.weight(i) * std::pow(std::abs(f[i]), p);
        best = std::max(best, std::pow(s, 1.0 / p) / std::sqrt(p));
        ++res.iterations;
    }
    res.norm = best;
    return res;
}

namespace {

double direction_objective(const FunctionSystem& sys, std::span<const cplx> y) {
    std::vector<cplx> comb = sys.combination(y);
    return psi2_norm(comb, sys.space()).norm;
}

void normalize_direction(std::vector<cplx>& y) {
    double n2 = 0.0;
    for (const cplx& v : y) n2 += std::norm(v);
    n2 = std::sqrt(n2);
    if (n2 > 0.0)
        for (cplx& v : y) v /= n2;
}

// projected ascent on the unit sphere with central-difference gradients
double ascend(const FunctionSystem& sys, std::vector<cplx>& y, std::size_t steps) {
    const std::size_t n = y.size();
    double val = direction_objective(sys, y);
    double step = 0.25;
    const double h = 1e-6;
    for (std::size_t it = 0; it < steps; ++it) {
        std::vector<cplx> grad(n);
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<cplx> yp = y;
            yp[k] += h;
            double fp = direction_objective(sys, yp);
            yp[k] -= 2.0 * h;
            double fm = direction_objective(sys, yp);
            double gre = (fp - fm) / (2.0 * h);
            yp = y;
            yp[k] += cplx(0.0, h);
            fp = direction_objective(sys, yp);
            yp[k] -= cplx(0.0, 2.0 * h);
            fm = direction_objective(sys, yp);
            double gim = (fp - fm) / (2.0 * h);
            grad[k] = cplx(gre, gim);
        }
        double gn = 0.0;
        for (const cplx& g : grad) gn += std::norm(g);
        gn = std::sqrt(gn);
        if (gn < 1e-14) break;
        bool improved = false;
        while (step > 1e-10) {
            std::vector<cplx> yn = y;
            for (std::size_t k = 0; k < n; ++k) yn[k] += (step / gn) * grad[k];
            normalize_direction(yn);
            double vn = direction_objective(sys, yn);
            if (vn > val + 1e-15) {
                y = std::move(yn);
                val = vn;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return val;
}

double sigma_for_direction(const FunctionSystem& sys, std::span<const cplx> y) {
    std::vector<cplx> comb = sys.combination(y);
    double best = 0.0;
    // geometric scale grid; the direction has unit l2 norm
    for (std::size_t k = 0; k < 64; ++k) {
        double r = 1e-3 * std::pow(1e6, static_cast<double>(k) / 63.0);
        double mgf = 0.0;
        bool overflow = false;
        for (std::size_t i = 0; i < comb.size(); ++i) {
            double e = r * comb[i].real();
            if (e > 700.0) { overflow = true; break; }
            mgf += sys.space().weight(i) * std::exp(e);
        }
        if (overflow) continue;
        if (mgf <= 1.0) continue;
        best = std::max(best, std::sqrt(2.0 * std::log(mgf)) / r);
    }
    return best;
}

}  // namespace

SubGaussianReport subgaussian_constant(const FunctionSystem& sys, std::size_t restarts,
                                       std::size_t steps, RngStream rng) {
    if (restarts == 0) throw std::invalid_argument("subgaussian_constant: restarts >= 1 required");
    const std::size_t n = sys.size();
    SubGaussianReport rep;
    rep.restarts = restarts;

    std::vector<std::vector<cplx>> directions;
    // coordinate directions guarantee constantC >= psi2 norm of every row
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<cplx> e(n, 0.0);
        e[k] = 1.0;
        directions.push_back(std::move(e));
    }
    for (std::size_t r = 0; r < restarts; ++r) {
        RngStream local = rng.derive(r);
        std::vector<cplx> y(n);
        for (cplx& v : y) v = local.gaussian_complex();
        normalize_direction(y);
        directions.push_back(std::move(y));
    }

    double bestC = 0.0, bestSigma = 0.0;
    std::vector<cplx> bestY;
    for (auto& y : directions) {
        double val = (n > 1) ? ascend(sys, y, steps) : direction_objective(sys, y);
        if (val > bestC) {
            bestC = val;
            bestY = y;
        }
        bestSigma = std::max(bestSigma, sigma_for_direction(sys, y));
    }
    rep.constantC = bestC;
    rep.constantSigma = bestSigma;
    rep.witnessDirection = bestY;
    return rep;
}

SubGaussianReport subgaussian_constant(const MatricialSystem& sys, std::size_t restarts,
                                       std::size_t steps, RngStream rng) {
    return subgaussian_constant(sys.flatten(), restarts, steps, rng);
}

}  // namespace lab
