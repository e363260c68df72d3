#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "lab/chaos.hpp"

using namespace lab;

TEST_CASE("mehler semigroup action") {
    ChaosElement g1 = ChaosElement::gaussian_coordinate(2, 4, 0);
    ChaosElement h = mehler_apply(g1, 0.4);
    CHECK(h.coefficient({1, 0}) == cplx(0.4));

    ChaosElement cubic(1, 4);
    cubic.set_coefficient({3}, 2.0);
    CHECK(mehler_apply(cubic, 0.5).coefficient({3}).real() == doctest::Approx(0.25).epsilon(1e-15));

    ChaosElement c = ChaosElement::constant(2, 4, 5.0);
    CHECK(mehler_apply(c, 0.3).coefficient({0, 0}) == cplx(5.0));

    CHECK_THROWS(mehler_apply(g1, 0.0));
    CHECK_THROWS(mehler_apply(g1, 1.5));
}

TEST_CASE("mehler semigroup law and contractivity") {
    RngStream rng(8);
    ChaosElement f(3, 4);
    for (const MultiIndex& a : all_multi_indices(3, 4)) f.set_coefficient(a, rng.gaussian_complex());
    ChaosElement twice = mehler_apply(mehler_apply(f, 0.7), 0.6);
    ChaosElement once = mehler_apply(f, 0.42);
    for (const auto& [a, c] : once.coefficients())
        CHECK(std::abs(twice.coefficient(a) - c) <= 1e-14 * std::abs(c));
    CHECK(mehler_apply(f, 0.9).l2_norm() <= f.l2_norm());
}

TEST_CASE("t_delta fixes degree one and damps the tail") {
    ChaosElement g2 = ChaosElement::gaussian_coordinate(4, 5, 1);
    ChaosElement fixed = t_delta_apply(g2, 0.3);
    CHECK(fixed.coefficient({0, 1, 0, 0}) == cplx(1.0));

    ChaosElement q(1, 5);
    q.set_coefficient({2}, 1.0);
    CHECK(t_delta_apply(q, 0.3).coefficient({2}).real() == doctest::Approx(0.3).epsilon(1e-15));
    // matches delta^{-1} (T(delta) - P0)
    CHECK(t_delta_apply(q, 0.3).coefficient({2}).real() ==
          doctest::Approx(mehler_apply(q, 0.3).coefficient({2}).real() / 0.3));

    ChaosElement c = ChaosElement::constant(1, 5, 4.0);
    CHECK(t_delta_apply(c, 0.3).coefficient({0}) == cplx(0.0));

    CHECK_THROWS(t_delta_apply(q, 1.0));
}

TEST_CASE("t_delta complex case kills the anti-holomorphic block") {
    // g_n has coefficients 1/sqrt(2) and i/sqrt(2) on the paired coordinates
    ChaosElement g = ChaosElement::complex_gaussian(2, 3, 1);
    ChaosElement tg = t_delta_apply(g, 0.25);
    for (const auto& [a, c] : g.coefficients())
        CHECK(std::abs(tg.coefficient(a) - c) < 1e-14);

    // conj(g_n): coefficients 1/sqrt(2), -i/sqrt(2) is annihilated
    ChaosElement conjg(4, 3, true);
    conjg.set_coefficient({0, 0, 1, 0}, cplx(1.0 / std::sqrt(2.0), 0.0));
    conjg.set_coefficient({0, 0, 0, 1}, cplx(0.0, -1.0 / std::sqrt(2.0)));
    ChaosElement tcg = t_delta_apply(conjg, 0.25);
    CHECK(tcg.l2_norm() < 1e-14);
}

TEST_CASE("chaos projections") {
    ChaosElement g2 = ChaosElement::gaussian_coordinate(3, 4, 2);
    CHECK(chaos_project(g2, 1).coefficient({0, 0, 1}) == cplx(1.0));

    ChaosElement q(1, 4);
    q.set_coefficient({2}, 1.0);  // normalized (g^2 - 1)/sqrt(2)
    CHECK(chaos_project(q, 1).l2_norm() == 0.0);

    ChaosElement c = ChaosElement::constant(1, 4, 5.0);
    CHECK(chaos_project(c, 0).coefficient({0}) == cplx(5.0));
    CHECK_THROWS(chaos_project(c, 9));
}

TEST_CASE("t_delta operator norms") {
    TDeltaNorms n = operator_norms_t_delta(2, 5, 0.3, 2000, RngStream(3));
    CHECK(n.l2TailNorm == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(n.l1AnalyticBound == doctest::Approx(2.0 / 0.3));
    CHECK(n.l1NormBound <= n.l1AnalyticBound);
    CHECK(n.l1NormBound > 0.0);

    TDeltaNorms nn = operator_norms_t_delta(2, 5, 0.999, 1000, RngStream(3));
    CHECK(nn.l2TailNorm == doctest::Approx(0.999));
    CHECK_THROWS(operator_norms_t_delta(2, 5, 0.3, 10, RngStream(3)));
}

TEST_CASE("mela lp solves the damping measure program") {
    MelaMeasure easy = mela_lp(0.999999, 64, 3);
    CHECK(easy.totalVariation == doctest::Approx(1.0).epsilon(1e-6));

    MelaMeasure a = mela_lp(0.5, 256, 21);
    MelaMeasure b = mela_lp(0.25, 256, 21);
    CHECK(a.totalVariation <= b.totalVariation + 1e-9);
    CHECK(a.moment(1) == doctest::Approx(1.0).epsilon(1e-9));
    for (int n = 3; n <= 21; n += 2) CHECK(std::abs(a.moment(n)) <= 0.5 + 1e-9);
    CHECK_THROWS(mela_lp(0.5, 8, 21));
}

TEST_CASE("mela total variation grows like log(1/delta)") {
    std::vector<double> lnInv, tv;
    for (int k = 1; k <= 6; ++k) {
        double delta = std::pow(2.0, -k);
        MelaMeasure mu = mela_lp(delta, 192, 15);
        lnInv.push_back(std::log(1.0 / delta));
        tv.push_back(mu.totalVariation);
        CHECK(mu.totalVariation / std::max(std::log(1.0 / delta), 1.0) < 8.0);
    }
    // least squares slope of tv against |ln delta|
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < tv.size(); ++i) {
        mx += lnInv[i];
        my += tv[i];
    }
    mx /= tv.size();
    my /= tv.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < tv.size(); ++i) {
        sxy += (lnInv[i] - mx) * (tv[i] - my);
        sxx += (lnInv[i] - mx) * (lnInv[i] - mx);
    }
    CHECK(sxy / sxx > 0.0);
}

TEST_CASE("mela damping operator") {
    MelaMeasure mu = mela_lp(0.1, 256, 15);
    ChaosElement g = ChaosElement::gaussian_coordinate(1, 4, 0);
    CHECK(std::abs(mela_damping_apply(g, mu).coefficient({1}) - cplx(1.0)) < 1e-9);

    ChaosElement q(1, 4);
    q.set_coefficient({2}, 1.0);
    CHECK(std::abs(mela_damping_apply(q, mu).coefficient({2})) < 1e-12);

    ChaosElement cub(1, 4);
    cub.set_coefficient({3}, 1.0);
    CHECK(std::abs(mela_damping_apply(cub, mu).coefficient({3})) <= 0.1 + 1e-9);
}

TEST_CASE("chaos l1 norm method selection") {
    ChaosElement g = ChaosElement::gaussian_coordinate(1, 3, 0);
    std::string method;
    double l1 = chaos_l1_norm(g, 5000, RngStream(1), &method);
    CHECK(method == "gauss-hermite");
    CHECK(l1 == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(0.02));

    ChaosElement g4 = ChaosElement::gaussian_coordinate(4, 3, 0);
    chaos_l1_norm(g4, 20000, RngStream(1), &method);
    CHECK(method == "monte-carlo");
}

TEST_CASE("gaussian comparison sandwich and contraction") {
    // single unit vector in C^1: E|g| = sqrt(pi)/2 for complex standard g
    std::vector<std::vector<cplx>> x = {{1.0}};
    GaussianComparisonReport rep = gaussian_comparison_check(x, 40000, RngStream(9));
    CHECK(rep.sandwichHolds);
    CHECK(std::abs(rep.meanComplexGaussian - std::sqrt(M_PI) / 2.0) <
          4.0 * rep.stdErrComplex + 1e-3);

    // identity contraction: the rotated mean equals the plain complex mean
    std::vector<std::vector<cplx>> x2 = {{1.0, 0.0}, {0.0, 1.0}};
    Matrix id = Matrix::identity(2);
    GaussianComparisonReport r2 = gaussian_comparison_check(x2, 20000, RngStream(10), &id);
    CHECK(r2.contractionHolds);
    CHECK(r2.meanRotated == doctest::Approx(r2.meanComplexGaussian).epsilon(1e-12));

    // unitary rotation: equality within MC error
    double c = std::sqrt(0.5);
    Matrix u(2, 2);
    u(0, 0) = c;
    u(0, 1) = c;
    u(1, 0) = -c;
    u(1, 1) = c;
    GaussianComparisonReport r3 = gaussian_comparison_check(x2, 20000, RngStream(11), &u);
    CHECK(std::abs(r3.meanRotated - r3.meanComplexGaussian) <
          3.0 * (r3.stdErrRotated + r3.stdErrComplex));
}
