#include "doctest.h"

#include "mtk/eigenform.hpp"

using namespace mtk;

namespace {

const CurveModel e11{{0, -1, 1, -10, -20}, 11};
const CurveModel e37{{0, 0, 1, -1, 0}, 37};

i64 brute_count(const CurveModel& e, i64 ell)
{
    i64 n = 1;
    for (i64 x = 0; x < ell; ++x)
        for (i64 y = 0; y < ell; ++y) {
            i64 lhs = y * y + e.a[0] * x * y + e.a[2] * y;
            i64 rhs = x * x * x + e.a[1] * x * x + e.a[3] * x + e.a[4];
            if (mod(lhs - rhs, ell) == 0) ++n;
        }
    return n;
}

// Coefficients of q prod (1 - q^n)^24.
std::vector<i64> ramanujan_tau(int upto)
{
    std::vector<i64> f(upto + 1, 0);
    f[0] = 1;
    for (int n = 1; n <= upto; ++n)
        for (int rep = 0; rep < 24; ++rep)
            for (int j = upto; j >= n; --j) f[j] -= f[j - n];
    std::vector<i64> tau(upto + 2, 0);
    for (int j = 0; j <= upto; ++j) tau[j + 1] = f[j];
    return tau;
}

std::shared_ptr<const Newform> delta_form()
{
    return Newform::resolve(SymbolEigenform{1, 12, 100, {}});
}

}  // namespace

TEST_CASE("point counts and traces of Frobenius")
{
    CHECK(count_points(e11, 2) == 5);
    CHECK(curve_ap(e11, 2) == -2);
    CHECK(curve_ap(e11, 3) == -1);
    CHECK(curve_ap(e11, 5) == 1);
    CHECK(curve_ap(e11, 7) == -2);
    for (const auto* e : {&e11, &e37})
        for (i64 ell : primes_up_to(60)) {
            INFO("ell=" << ell);
            CHECK(count_points(*e, ell) == brute_count(*e, ell));
        }
    // 11a has split multiplicative reduction at 11, 37a has a_37 = -1 (nonsplit would give -1 too,
    // the enumeration of smooth points decides)
    CHECK(curve_ap(e11, 11) == 11 - (brute_count(e11, 11) - 1));
    CHECK(std::abs(curve_ap(e37, 37)) == 1);
    CHECK(e11.discriminant() == BigInt(-161051));
    CHECK(e37.discriminant() == 37);
    CurveModel scaled{{0, -4, 8, -160, -1280}, 11};  // (x, y) -> (4x, 8y) model of 11a
    CHECK_THROWS_AS(curve_ap(scaled, 2), Error);
    CHECK(curve_ap(scaled, 3) == -1);
}

TEST_CASE("curve resolution and eigenvalue consistency")
{
    auto f = Newform::resolve(e11);
    CHECK(f->level() == 11);
    CHECK(f->weight() == 2);
    for (i64 ell : primes_up_to(50)) {
        INFO("ell=" << ell);
        CHECK(f->symbol().hecke_eigenvalue(ell) == curve_ap(e11, ell));
    }
    auto g = Newform::resolve(e37);
    for (i64 ell : primes_up_to(40)) CHECK(g->symbol().hecke_eigenvalue(ell) == curve_ap(e37, ell));
    // 37 carries two newforms; the curve pins select the rank-one one
    CHECK(g->eigenvalue(2) == -2);

    auto expect_config = [](const CurveModel& e) {
        try {
            Newform::resolve(e);
            return false;
        } catch (const Error& err) {
            return err.code() == ErrorCode::ConfigError;
        }
    };
    CHECK(expect_config(CurveModel{e11.a, 22}));
    CHECK(expect_config(CurveModel{e11.a, 121}));
    CHECK_THROWS_AS(Newform::resolve(CurveModel{{0, 0, 0, 0, 0}, 1}), Error);
}

TEST_CASE("optimal normalization")
{
    auto space = build_space(11, 2);
    auto plus = cuspidal_eigen_symbol(space, {{2, -2}}, 1);
    auto minus = cuspidal_eigen_symbol(space, {{2, -2}}, -1);
    NormalizedEigenSymbol a(plus, minus);
    SymbolVector plus7{space, plus.coords * Rational(7, 3)};
    SymbolVector minus5{space, minus.coords * Rational(-5, 2)};
    NormalizedEigenSymbol b(plus7, minus5);
    CHECK(a == b);
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(a.scalar(1) == b.scalar(1) * Rational(7, 3));

    auto check_content = [](const std::vector<BigInt>& v) {
        BigInt g = 0;
        for (auto& x : v) g = boost::multiprecision::gcd(g, x);
        CHECK(g == 1);
        for (auto& x : v)
            if (x != 0) {
                CHECK(x > 0);
                break;
            }
    };
    check_content(a.generator_values(1));
    check_content(a.generator_values(-1));

    auto delta = delta_form();
    check_content(delta->symbol().generator_values(1));
    check_content(delta->symbol().generator_values(-1));

    auto doubled = a.rescaled(2, 1);
    CHECK_FALSE(doubled == a);
    CHECK(doubled.fingerprint() != a.fingerprint());
}

TEST_CASE("Hecke eigenvalues of the weight 12 level 1 form")
{
    auto tau = ramanujan_tau(30);
    auto delta = delta_form();
    CHECK(tau[2] == -24);
    for (i64 ell : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29}) {
        INFO("ell=" << ell);
        CHECK(delta->eigenvalue(ell) == tau[ell]);
    }
    auto pinned = Newform::resolve(SymbolEigenform{1, 12, 100, {{2, -24}}});
    CHECK(pinned->symbol() == delta->symbol());
    CHECK_THROWS_AS(Newform::resolve(SymbolEigenform{1, 12, 100, {{2, 24}}}), Error);
    CHECK_THROWS_AS(Newform::resolve(SymbolEigenform{11, 3, 100, {}}), Error);
}

TEST_CASE("period integrals: basic identities")
{
    auto f = Newform::resolve(e11);
    const auto& nes = f->symbol();
    CHECK(period_integral(nes, 1, 0, 1, -1) == 0);
    CHECK(period_integral(nes, 1, 0, 1, 1) != 0);
    PeriodEvaluator ev(nes, 1, i64{1000003});
    for (i64 m = 1; m <= 30; ++m)
        for (i64 a = -m; a < 2 * m; ++a) {
            for (int s : {1, -1}) {
                BigInt v = ev.value(a, m, s);
                CHECK(v == ev.value(a + m, m, s));
                CHECK(v == s * ev.value(-a, m, s));
                CHECK(ev.value_mod(a, m, s) == mod_big(v, 1000003));
                // k = 2, r = 1: [ta/tm] = [a/m]
                CHECK(v == ev.value(3 * a, 3 * m, s));
            }
            CHECK(ev.value(a, m, 0) == ev.value(a, m, 1) + ev.value(a, m, -1));
            CHECK(ev.value(a, m, 0) == 2 * BigInt(numerator(ev.lambda({1}, a, m))));
        }
    CHECK_THROWS_AS(PeriodEvaluator(nes, 2), Error);
    CHECK_THROWS_AS(ev.lambda({1, 1}, 0, 1), Error);
}

TEST_CASE("period integrals in higher weight")
{
    auto delta = delta_form();
    const auto& nes = delta->symbol();
    const int w = 10;
    auto binom_shift = [](i64 a, int e) {
        // coefficients of (z - a)^e
        std::vector<BigInt> out(static_cast<std::size_t>(e) + 1, BigInt(0));
        out[0] = 1;
        for (int t = 0; t < e; ++t)
            for (int j = t + 1; j >= 0; --j) {
                BigInt v = BigInt(-a) * out[j];
                if (j > 0) v += out[j - 1];
                out[j] = v;
            }
        return out;
    };
    PeriodEvaluator ev(nes, 1);
    for (i64 m : {1, 2, 3, 5, 6, 7, 12})
        for (i64 a = 0; a < m; ++a) {
            INFO("a=" << a << " m=" << m);
            // periodicity in a
            std::vector<BigInt> poly{3, -1, 0, 4, 0, 0, 2, 0, 0, 0, 1};
            CHECK(ev.lambda(poly, a, m) == ev.lambda(poly, a + m, m));
            CHECK(ev.lambda(poly, a, m) == ev.lambda(poly, a - 2 * m, m));
            // lambda(P(z); a, m) = lambda(P(z/t); ta, tm), scaled by t^w to stay integral
            const i64 t = 2;
            std::vector<BigInt> scaled(poly.size());
            for (int j = 0; j <= w; ++j) scaled[j] = poly[j] * boost::multiprecision::pow(BigInt(t), w - j);
            CHECK(ev.lambda(scaled, t * a, t * m) ==
                  ev.lambda(poly, a, m) * Rational(boost::multiprecision::pow(BigInt(t), w)));
            // divisibility by m^(r-1)
            for (int r = 1; r <= 11; ++r) {
                Rational v = ev.lambda(binom_shift(a, r - 1), a, m);
                CHECK(denominator(v) == 1);
                CHECK(numerator(v) % boost::multiprecision::pow(BigInt(m), r - 1) == 0);
            }
            // signs and the unsigned sum for every critical twist
            for (int r = 1; r <= 11; ++r) {
                PeriodEvaluator er(nes, r);
                std::vector<BigInt> mono(static_cast<std::size_t>(r), BigInt(0));
                mono[r - 1] = 1;
                CHECK(er.value(a, m, 0) == 2 * numerator(er.lambda(mono, a, m)));
                CHECK(er.value(a, m, 0) == er.value(a, m, 1) + er.value(a, m, -1));
                CHECK(er.value(-a, m, 1) == er.value(a, m, 1));
                CHECK(er.value(-a, m, -1) == -er.value(a, m, -1));
            }
        }
    PeriodCache cache(nes);
    BigInt first = cache.get(5, 3, 7, 1);
    CHECK(cache.get(5, 10, 7, 1) == first);
    CHECK(cache.size() == 1);
    CHECK(first == period_integral(nes, 5, 3, 7, 1));
}

TEST_CASE("Fricke eigenvalue")
{
    // for a prime-level newform of weight 2, a_N = -w_N
    auto f = Newform::resolve(e11);
    CHECK(fricke_sign(f->symbol()) == -curve_ap(e11, 11));
    auto g = Newform::resolve(e37);
    CHECK(fricke_sign(g->symbol()) == -curve_ap(e37, 37));
}
