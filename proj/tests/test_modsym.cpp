#include "doctest.h"

#include "mtk/modsym.hpp"
#include "oracles/dimension.hpp"
#include "oracles/hecke_cosets.hpp"

using namespace mtk;

TEST_CASE("space dimensions agree with the dimension formula")
{
    for (auto [n, k] : std::vector<std::pair<i64, int>>{
             {1, 12}, {1, 16}, {2, 2}, {11, 2}, {11, 4}, {37, 2}, {23, 2}, {36, 2}, {27, 4}, {5, 6}, {13, 2}, {1, 24}}) {
        auto space = build_space(n, k);
        INFO("N=" << n << " k=" << k);
        CHECK(space->dimension() == oracle::dim_modular_symbols(n, k));
        CHECK(space->cuspidal_dimension() == 2 * oracle::dim_cusp_forms(n, k));
        CHECK(static_cast<i64>(space->cusps().size()) == oracle::gamma0_data(n).cusps);
    }
    CHECK(build_space(11, 2)->dimension() == 3);
    CHECK(build_space(11, 3)->dimension() == 0);
    CHECK_THROWS_AS(build_space(100000, 2), Error);
}

TEST_CASE("relations hold for every generator")
{
    auto space = build_space(11, 4);
    const int w = 2;
    auto mono = [&](int i) {
        std::vector<Rational> p(w + 1, Rational(0));
        p[i] = 1;
        return p;
    };
    for (int pt = 0; pt < space->p1().size(); ++pt) {
        auto [c, d] = space->p1().point(pt);
        for (int i = 0; i <= w; ++i) {
            auto p = mono(i);
            QVec two = space->symbol_coords(p, c, d) + space->symbol_coords(right_act(p, Mat2{0, -1, 1, 0}), d, -c);
            CHECK(two.isZero());
            QVec three = space->symbol_coords(p, c, d) +
                         space->symbol_coords(right_act(p, Mat2{0, -1, 1, -1}), d, -c - d) +
                         space->symbol_coords(right_act(p, Mat2{-1, 1, -1, 0}), -c - d, c);
            CHECK(three.isZero());
        }
    }
}

TEST_CASE("Hecke operators")
{
    auto space = build_space(11, 2);
    QMat t1 = hecke_matrix(*space, 1);
    CHECK((t1 - QMat::Identity(2, 2)).isZero());
    QMat t2 = hecke_matrix(*space, 2);
    CHECK((t2 + Rational(2) * QMat::Identity(2, 2)).isZero());

    for (auto [n, k] : std::vector<std::pair<i64, int>>{{11, 2}, {37, 2}, {1, 12}, {13, 4}}) {
        auto s = build_space(n, k);
        INFO("N=" << n << " k=" << k);
        CHECK((s->hecke(6) - s->hecke(2) * s->hecke(3)).isZero());
        for (i64 a : {2, 3, 4, 5})
            for (i64 b : {3, 7, 9})
                CHECK((s->hecke(a) * s->hecke(b) - s->hecke(b) * s->hecke(a)).isZero());
        // independent coset oracle for prime index
        for (i64 ell : {2, 3, 5, 7}) {
            if (n % ell == 0) continue;
            CHECK((s->hecke(ell) - oracle::hecke_by_cosets(*s, ell)).isZero());
        }
        QMat proj = s->cuspidal_projector();
        CHECK((proj * proj - proj).isZero());
        CHECK((proj * s->star() - s->star() * proj).isZero());
        for (i64 ell : {2, 3, 5}) CHECK((proj * s->hecke(ell) - s->hecke(ell) * proj).isZero());
    }
}

TEST_CASE("star involution")
{
    auto space = build_space(11, 2);
    QMat iota = star_involution(*space);
    CHECK((iota * iota - QMat::Identity(2, 2)).isZero());
    CHECK(iota.trace() == 0);
    QMat t2 = hecke_matrix(*space, 2);
    CHECK((iota * t2 - t2 * iota).isZero());
    auto s37 = build_space(37, 2);
    QMat full = s37->star();
    CHECK((full * full - QMat::Identity(full.rows(), full.cols())).isZero());
}

TEST_CASE("eigen-symbols")
{
    auto space = build_space(11, 2);
    auto plus = cuspidal_eigen_symbol(space, {{2, -2}, {3, -1}}, 1);
    CHECK(plus.coords.cols() == 3);
    CHECK((plus.coords * space->hecke(2) + Rational(2) * plus.coords).isZero());
    CHECK((plus.coords * space->star() - plus.coords).isZero());
    CHECK_THROWS_AS(cuspidal_eigen_symbol(space, {{2, 0}}, 1), Error);
    CHECK_THROWS_AS(cuspidal_eigen_symbol(build_space(2, 2), {{3, 0}}, 1), Error);
    try {
        cuspidal_eigen_symbol(space, {{2, 0}}, 1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AmbiguousEigensystem);
    }
    // nonvanishing at {inf -> 0}
    auto v = evaluate_path(plus, Cusp::infinity(), Cusp::make(0, 1));
    CHECK(v.size() == 1);
    CHECK(v[0] != 0);
}

TEST_CASE("path evaluation")
{
    auto space = build_space(1, 12);
    auto plus = cuspidal_eigen_symbol(space, {{2, -24}}, 1);
    Cusp a = Cusp::make(3, 7), b = Cusp::make(-5, 11), c = Cusp::make(22, 9);
    auto ab = evaluate_path(plus, a, b), bc = evaluate_path(plus, b, c), ac = evaluate_path(plus, a, c);
    for (std::size_t i = 0; i < ab.size(); ++i) CHECK(ab[i] + bc[i] == ac[i]);
    for (auto x : evaluate_path(plus, a, a)) CHECK(x == 0);
    // {0 -> inf} as a direct Manin symbol and as the negated reversed path
    auto forward = evaluate_path(plus, Cusp::make(0, 1), Cusp::infinity());
    auto back = evaluate_path(plus, Cusp::infinity(), Cusp::make(0, 1));
    for (std::size_t i = 0; i < forward.size(); ++i) {
        std::vector<Rational> p(11, Rational(0));
        p[i] = 1;
        CHECK(forward[i] == plus.value(space->symbol_coords(p, 0, 1)));
        CHECK(forward[i] == -back[i]);
    }
    // invariance under SL2(Z): g(P{alpha, beta}) = P{alpha, beta}
    Mat2 g{2, 1, 1, 1};
    std::vector<Rational> p(11, Rational(0));
    p[0] = 1;
    p[3] = 2;
    p[10] = -1;
    auto mobius = [](const Mat2& m, const Cusp& x) { return Cusp::make(m.a * x.num + m.b * x.den, m.c * x.num + m.d * x.den); };
    QVec lhs = space->path_coords(left_act(p, g), mobius(g, a), mobius(g, b));
    QVec rhs = space->path_coords(p, a, b);
    CHECK((lhs - rhs).isZero());
}
