#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "lab/generators.hpp"

using namespace lab;

TEST_CASE("lacunary generator") {
    FunctionSystem c = make_lacunary({0}, 4);
    CHECK(c.row(0)[2] == cplx(1.0));
    CHECK(c.label() == "lacunary");

    FunctionSystem lac = make_lacunary({1, 2, 4, 8}, 64);
    GramReport g = biorthogonality_gram(lac, lac);
    CHECK(g.deviation < 1e-12);
    for (std::size_t n = 0; n < 4; ++n) CHECK(lac.sup_norm(n) == doctest::Approx(1.0));

    CHECK_THROWS_AS(make_lacunary({1, 2, 4, 8}, 16), std::invalid_argument);
    CHECK_THROWS_AS(make_lacunary({2, 1}, 64), std::invalid_argument);
    CHECK_THROWS_AS(make_lacunary({}, 64), std::invalid_argument);
}

TEST_CASE("walsh generator") {
    // singletons are the Rademacher system
    FunctionSystem rad = make_walsh(3, {{0}, {1}, {2}});
    CHECK(rad.points() == 8);
    for (std::size_t n = 0; n < 3; ++n) {
        CHECK(rad.sup_norm(n) == doctest::Approx(1.0));
        for (std::size_t t = 0; t < 8; ++t)
            CHECK(rad.row(n)[t].real() == (((t >> n) & 1) ? -1.0 : 1.0));
    }
    GramReport g = biorthogonality_gram(rad, rad);
    CHECK(g.deviation < 1e-12);

    // all 2^m characters: exactly orthonormal
    std::vector<std::vector<std::size_t>> all;
    for (std::size_t mask = 0; mask < 8; ++mask) {
        std::vector<std::size_t> sub;
        for (std::size_t i = 0; i < 3; ++i)
            if ((mask >> i) & 1) sub.push_back(i);
        all.push_back(sub);
    }
    FunctionSystem full = make_walsh(3, all);
    CHECK(biorthogonality_gram(full, full).deviation < 1e-12);

    CHECK_THROWS_AS(make_walsh(3, {{0}, {0}}), std::invalid_argument);
    CHECK_THROWS_AS(make_walsh(3, {{5}}), std::out_of_range);
}

TEST_CASE("haar unitary system") {
    // d = 1: uniform phases, |value| = 1 everywhere
    MatricialSystem ph = make_haar_unitary_system(1, 500, 3);
    for (std::size_t s = 0; s < 500; ++s)
        CHECK(std::abs(ph.value(0, 0, 0, s)) == doctest::Approx(1.0).epsilon(1e-12));

    // unitarity: sup operator norm of phi = sqrt(d) exactly
    MatricialSystem sys = make_haar_unitary_system(4, 50, 5);
    CHECK(sys.sup_operator_norm(0) == doctest::Approx(std::sqrt(4.0)).epsilon(1e-9));

    // first/second moments of the unitary samples match Haar
    std::vector<Matrix> us;
    for (std::size_t s = 0; s < 50; ++s) {
        Matrix u = sys.matrix_at(0, s);
        for (auto& v : u.data()) v /= std::sqrt(4.0);
        us.push_back(u);
    }
    MatricialSystem big = make_haar_unitary_system(4, 4000, 7);
    std::vector<Matrix> usBig;
    for (std::size_t s = 0; s < 4000; ++s) {
        Matrix u = big.matrix_at(0, s);
        for (auto& v : u.data()) v /= std::sqrt(4.0);
        usBig.push_back(u);
    }
    HaarMomentReport rep = haar_moment_test(usBig, 4);
    CHECK(rep.pass);

    // a constant family is far from Haar
    std::vector<Matrix> ids(4000, Matrix::identity(4));
    CHECK(!haar_moment_test(ids, 4).pass);
}

TEST_CASE("sign matrix ensemble") {
    // n = 2, chi = sqrt(2): every sign matrix qualifies
    SignMatrixEnsemble e2 = make_sign_ensemble(2, std::sqrt(2.0), 30, 11);
    CHECK(e2.rejectionRate == 0.0);
    CHECK(e2.members.size() == 30);
    double inv = 1.0 / std::sqrt(2.0);
    for (const Matrix& a : e2.members) {
        CHECK(operator_norm(a) <= std::sqrt(2.0) + 1e-12);
        for (const auto& v : a.data()) {
            CHECK(std::abs(std::abs(v.real()) - inv) < 1e-15);
            CHECK(v.imag() == 0.0);
        }
    }
    // Sylvester-Hadamard member comes first at powers of two, norm exactly 1
    SignMatrixEnsemble e8 = make_sign_ensemble(8, 2.5, 10, 13);
    CHECK(operator_norm(e8.members[0]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(e8.rejectionRate < 0.5);

    // no 3x3 sign matrix has norm 1 (no Hadamard matrix of order 3)
    CHECK_THROWS_AS(make_sign_ensemble(3, 1.0, 5, 17), std::runtime_error);
    CHECK_THROWS_AS(make_sign_ensemble(4, 0.5, 5, 17), std::invalid_argument);
}

TEST_CASE("polar domination operator") {
    // d = 1: deltaHat is E|g| = sqrt(pi)/2 for the standard complex normal
    PolarDominationOperator op1 = estimate_polar_domination(1, 20000, 19);
    CHECK(std::abs(op1.deltaHat - std::sqrt(M_PI) / 2.0) < 0.02);

    // d = 8: near the quarter-circle asymptote, commutant nearly diagonal
    PolarDominationOperator op8 = estimate_polar_domination(8, 2000, 23);
    CHECK(std::abs(op8.deltaHat - 8.0 / (3.0 * M_PI)) < 0.05);
    CHECK(op8.commutantOffDiag < 5.0 / std::sqrt(2000.0));

    // applying to an already unitary sample returns it
    RngStream rng(29);
    Matrix gin(3, 3);
    for (auto& v : gin.data()) v = rng.gaussian_complex();
    Matrix u = qr_haar_unitary(gin);
    PolarDominationOperator op3 = estimate_polar_domination(3, 100, 31);
    std::vector<Matrix> out = polar_domination_apply(op3, {u});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(out[0](i, j) - u(i, j)) < 1e-10);

    // polar parts of Ginibre samples pass the Haar moment test
    std::vector<Matrix> gs;
    RngStream grng(37);
    for (std::size_t s = 0; s < 3000; ++s) {
        Matrix g(2, 2);
        for (auto& v : g.data()) v = grng.gaussian_complex() / std::sqrt(2.0);
        gs.push_back(g);
    }
    PolarDominationOperator op2 = estimate_polar_domination(2, 100, 41);
    CHECK(haar_moment_test(polar_domination_apply(op2, gs), 2).pass);

    CHECK_THROWS_AS(polar_domination_apply(op2, {Matrix::identity(3)}), std::invalid_argument);
}

TEST_CASE("character samples") {
    std::vector<cplx> one = character_samples(1, 2000, 43);
    for (const cplx& v : one) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<cplx> chi = character_samples(8, 20000, 47);
    double m2 = 0.0;
    for (const cplx& v : chi) m2 += std::norm(v);
    m2 /= static_cast<double>(chi.size());
    CHECK(m2 == doctest::Approx(1.0).epsilon(0.05));

    CHECK_THROWS_AS(character_samples(2, 100, 3), std::invalid_argument);
}
