#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "lab/rng.hpp"
#include "lab/spaces.hpp"

using namespace lab;

namespace {

FunctionSystem circle_characters(std::size_t gridM, std::vector<int> freqs) {
    ProbabilitySpace sp = ProbabilitySpace::uniform(gridM);
    std::vector<std::vector<cplx>> rows;
    for (int f : freqs) {
        std::vector<cplx> row(gridM);
        for (std::size_t i = 0; i < gridM; ++i) {
            double th = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(gridM);
            row[i] = std::exp(cplx(0.0, f * th));
        }
        rows.push_back(std::move(row));
    }
    return FunctionSystem(sp, rows);
}

}  // namespace

TEST_CASE("probability space validates weights") {
    CHECK_NOTHROW(ProbabilitySpace({0.5, 0.5}));
    CHECK_THROWS(ProbabilitySpace({0.5, 0.6}));
    CHECK_THROWS(ProbabilitySpace({1.5, -0.5}));
    CHECK_THROWS(ProbabilitySpace(std::vector<double>{}));
    ProbabilitySpace big = ProbabilitySpace::uniform(1u << 18);
    double s = 0.0;
    for (double w : big.weights()) s += w;
    CHECK(std::abs(s - 1.0) < 1e-9);
}

TEST_CASE("inner product basics") {
    ProbabilitySpace sp = ProbabilitySpace::uniform(4);
    FunctionSystem ones(sp, {{1, 1, 1, 1}});
    CHECK(inner_product(ones, 0, ones, 0) == cplx(1.0));

    // distinct Walsh characters on the uniform 4-point space
    FunctionSystem walsh(sp, {{1, 1, -1, -1}, {1, -1, 1, -1}});
    CHECK(std::abs(inner_product(walsh, 0, walsh, 1)) == 0.0);

    FunctionSystem four = circle_characters(256, {1, 2});
    CHECK(std::abs(inner_product(four, 0, four, 1)) < 1e-12);

    ProbabilitySpace other = ProbabilitySpace::uniform(3);
    FunctionSystem bad(other, {{1, 1, 1}});
    CHECK_THROWS(inner_product(ones, 0, bad, 0));
}

TEST_CASE("biorthogonality gram") {
    ProbabilitySpace sp = ProbabilitySpace::uniform(4);
    FunctionSystem walsh(sp, {{1, 1, -1, -1}, {1, -1, 1, -1}});
    GramReport g = biorthogonality_gram(walsh, walsh);
    CHECK(g.deviation < 1e-12);
    CHECK(g.inverseNormBound.has_value());

    FunctionSystem dup(sp, {{1, 1, 1, 1}, {1, 1, 1, 1}});
    GramReport g2 = biorthogonality_gram(dup, dup);
    CHECK(g2.deviation == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(!g2.inverseNormBound.has_value());

    // perturbed orthonormal system: theta < 1 implies the inverse-norm bound
    RngStream rng(7);
    std::vector<std::vector<cplx>> rows = walsh.values();
    for (auto& r : rows)
        for (cplx& v : r) v += 0.05 * rng.gaussian_complex();
    FunctionSystem pert(sp, rows);
    GramReport g3 = biorthogonality_gram(pert, pert);
    REQUIRE(g3.deviation < 1.0);
    REQUIRE(g3.inverseNormBound.has_value());
    CHECK(*g3.inverseNormBound <= 1.0 / (1.0 - g3.deviation) + 1e-9);
}

TEST_CASE("tensor product system") {
    ProbabilitySpace one = ProbabilitySpace::uniform(1);
    FunctionSystem c1(one, {{1}});
    FunctionSystem p = tensor_product_system(c1, c1);
    CHECK(p.points() == 1);
    CHECK(p.row(0)[0] == cplx(1.0));

    FunctionSystem e1 = circle_characters(8, {1});
    FunctionSystem torus = tensor_product_system(e1, e1);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            double th = 2.0 * M_PI * static_cast<double>(i + j) / 8.0;
            CHECK(std::abs(torus.row(0)[i * 8 + j] - std::exp(cplx(0.0, th))) < 1e-12);
        }

    // random sign systems: product entries by direct index arithmetic
    RngStream rng(11);
    ProbabilitySpace sp4 = ProbabilitySpace::uniform(4);
    std::vector<std::vector<cplx>> r1(3, std::vector<cplx>(4)), r2(3, std::vector<cplx>(4));
    for (auto& r : r1)
        for (cplx& v : r) v = static_cast<double>(rng.sign());
    for (auto& r : r2)
        for (cplx& v : r) v = static_cast<double>(rng.sign());
    FunctionSystem s1(sp4, r1), s2(sp4, r2);
    FunctionSystem prod = tensor_product_system(s1, s2);
    CHECK(prod.points() == 16);
    for (std::size_t n = 0; n < 3; ++n)
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                CHECK(prod.row(n)[i * 4 + j] == r1[n][i] * r2[n][j]);
    for (std::size_t n = 0; n < 3; ++n)
        CHECK(prod.sup_norm(n) == doctest::Approx(s1.sup_norm(n) * s2.sup_norm(n)));

    CHECK_THROWS_WITH_AS(tensor_product_system(s1, s2, 8),
                         doctest::Contains("sampled-grid"), std::invalid_argument);
}

TEST_CASE("lazy product matches materialized product") {
    RngStream rng(3);
    ProbabilitySpace sp = ProbabilitySpace::uniform(3);
    std::vector<std::vector<cplx>> rows(2, std::vector<cplx>(3));
    for (auto& r : rows)
        for (cplx& v : r) v = rng.gaussian_complex();
    FunctionSystem sys(sp, rows);
    FunctionSystem mat = tensor_product_system(sys, sys);
    LazyProductSystem lazy(sys, 2);
    for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                std::size_t idx[2] = {i, j};
                CHECK(std::abs(lazy.value(n, idx) - mat.row(n)[i * 3 + j]) == 0.0);
            }
}

TEST_CASE("matricial system flatten and gram") {
    // two 2x2 unitary-valued blocks on a 2-point space
    ProbabilitySpace sp = ProbabilitySpace::uniform(2);
    std::vector<std::size_t> dims = {2, 2};
    auto entry = [](cplx a, cplx b) { return std::vector<cplx>{a, b}; };
    // block n=0: identity at both points; n=1: diag(1,-1) then antidiag
    std::vector<std::vector<std::vector<cplx>>> blocks = {
        {entry(1, 1), entry(0, 0), entry(0, 0), entry(1, 1)},
        {entry(1, 0), entry(0, 1), entry(0, 1), entry(-1, 0)},
    };
    MatricialSystem ms(sp, dims, blocks);
    CHECK(ms.sup_operator_norm(0) == doctest::Approx(1.0));
    CHECK(ms.sup_operator_norm(1) == doctest::Approx(1.0));
    FunctionSystem flat = ms.flatten();
    CHECK(flat.size() == 8);
    // flattened entries scaled by sqrt(d)
    CHECK(flat.row(0)[0] == cplx(std::sqrt(2.0)));
    GramReport g = biorthogonality_gram(ms, ms);
    CHECK(g.gram.rows() == 8);
}

TEST_CASE("serialization round trip is bit exact") {
    RngStream rng(19);
    ProbabilitySpace sp({0.3, 0.7});
    std::vector<std::vector<cplx>> rows(2, std::vector<cplx>(2));
    for (auto& r : rows)
        for (cplx& v : r) v = rng.gaussian_complex() * 1.2345678901234567e-3;
    FunctionSystem sys(sp, rows, "probe");
    FunctionSystem back = function_system_from_json(to_json(sys));
    CHECK(back.label() == "probe");
    for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t i = 0; i < 2; ++i) CHECK(back.row(n)[i] == sys.row(n)[i]);
    for (std::size_t i = 0; i < 2; ++i) CHECK(back.space().weight(i) == sp.weight(i));
    CHECK(!json_is_matricial(to_json(sys)));

    std::vector<std::vector<std::vector<cplx>>> blocks = {
        {{rng.gaussian_complex(), rng.gaussian_complex()}}};
    MatricialSystem ms(sp, {1}, blocks, "m");
    MatricialSystem mback = matricial_system_from_json(to_json(ms));
    CHECK(json_is_matricial(to_json(ms)));
    for (std::size_t s = 0; s < 2; ++s) CHECK(mback.value(0, 0, 0, s) == ms.value(0, 0, 0, s));
}
