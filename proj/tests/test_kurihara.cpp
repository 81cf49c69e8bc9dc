#include "doctest.h"

#include "mtk/kurihara.hpp"

using namespace mtk;

namespace {

const CurveModel e11{{0, -1, 1, -10, -20}, 11};

const Newform& f11()
{
    static auto f = Newform::resolve(e11);
    return *f;
}

// Brute-force discrete log, independent of the library tables.
i64 slow_log(i64 a, i64 eta, i64 ell)
{
    i64 v = 1;
    for (i64 e = 0; e < ell - 1; ++e) {
        if (v == mod(a, ell)) return e;
        v = v * eta % ell;
    }
    return -1;
}

// Kurihara number straight from exact period integrals.
i64 oracle_delta(const NormalizedEigenSymbol& nes, i64 p, const std::vector<PrimeRecord>& fs, int branch)
{
    i64 m = 1;
    for (auto& f : fs) m *= f.ell;
    const i64 top = branch == 0 ? m : m * p;
    i64 acc = 0;
    for (i64 a = 0; a < top; ++a) {
        if (gcd(a, top) != 1) continue;
        i64 w = branch == 0 ? 1 : powmod(a % p, branch, p);
        for (auto& f : fs) w = w * (slow_log(a, f.eta, f.ell) % p) % p;
        acc = mod(acc + w * mod_big(period_integral(nes, 1, a, top, 0), p), p);
    }
    return acc;
}

// sigma_a over m with a = t mod ell and a = 1 mod m/ell.
i64 crt_lift(i64 t, i64 ell, i64 m)
{
    for (i64 a = 0; a < m; ++a)
        if (a % ell == mod(t, ell) && mod(a, m / ell) == 1 % (m / ell)) return a;
    return -1;
}

IntGroupRing lifted_operator(i64 ell, i64 eta, i64 m)
{
    IntGroupRing out(m);
    i64 v = eta;
    for (i64 i = 1; i <= ell - 2; ++i) {
        out.add_to(crt_lift(v, ell, m), BigInt(i));
        v = v * eta % ell;
    }
    return out;
}

}  // namespace

TEST_CASE("Kolyvagin primes")
{
    const auto& f = f11();
    CHECK(kolyvagin_primes(f, 7, 100).empty());
    auto list = kolyvagin_primes(f, 7, 3000);
    REQUIRE(list.size() >= 5);
    for (auto& kp : list) {
        CHECK(kp.ell % 7 == 1);
        CHECK(mod(curve_ap(e11, kp.ell) - kp.ell - 1, 7) == 0);
        CHECK(is_primitive_root(kp.eta, kp.ell));
        CHECK(kp.index >= 1);
    }
    for (std::size_t j = 1; j < list.size(); ++j) CHECK(list[j - 1].ell < list[j].ell);
    // brute-force sweep over the same range
    std::vector<i64> expect;
    for (i64 ell : primes_up_to(3000))
        if (ell != 7 && ell != 11 && ell % 7 == 1 && mod(curve_ap(e11, ell) - ell - 1, 7) == 0) expect.push_back(ell);
    REQUIRE(expect.size() == list.size());
    for (std::size_t j = 0; j < list.size(); ++j) CHECK(list[j].ell == expect[j]);

    auto swapped = kolyvagin_primes(f, 7, 200, {{list[0].ell, powmod(list[0].eta, 3, list[0].ell)}});
    CHECK(swapped[0].eta == powmod(list[0].eta, 3, list[0].ell));
    CHECK_THROWS_AS(kolyvagin_primes(f, 7, 200, {{list[0].ell, 1}}), Error);
    CHECK_THROWS_AS(kolyvagin_primes(f, 11, 200), Error);
}

TEST_CASE("Kurihara numbers against direct sums")
{
    const auto& f = f11();
    const auto& nes = f.symbol();
    auto base = kurihara_number(f, 7, 1, {}, 0);
    CHECK(base.m == 1);
    CHECK(base.value == mod_big(period_integral(nes, 1, 0, 1, 0), 7));
    CHECK(base.value != 0);
    CHECK(base.form == f.id());
    REQUIRE(base.euler_factor.has_value());
    CHECK(*base.euler_factor == mod(1 - curve_ap(e11, 7) + 7, 7));

    auto primes = kolyvagin_primes(f, 7, 400);
    REQUIRE(primes.size() >= 2);
    for (int branch : {0, 1, 3}) {
        INFO("branch=" << branch);
        std::vector<PrimeRecord> one{primes[0].record()};
        auto c = kurihara_number(nes, 7, 1, one, branch);
        CHECK(c.value == oracle_delta(nes, 7, one, branch));
        CHECK(c.euler_factor.has_value() == (branch == 0));
        CHECK(kurihara_number(nes, 7, 1, one, branch, 3).value == c.value);
    }
    std::vector<PrimeRecord> two{primes[0].record(), primes[1].record()};
    CHECK(kurihara_number(nes, 7, 1, two, 0).value == oracle_delta(nes, 7, two, 0));

    CHECK_THROWS_AS(kurihara_number(nes, 7, 1, {{29, 2}}, 0), Error);
    CHECK_THROWS_AS(kurihara_number(nes, 7, 1, {primes[0].record(), primes[0].record()}, 0), Error);
    CHECK_THROWS_AS(kurihara_number(nes, 7, 1, {{primes[0].ell, 1}}, 0), Error);
    CHECK_THROWS_AS(kurihara_number(nes, 7, 1, {}, 6), Error);
}

TEST_CASE("covariance of Kurihara numbers")
{
    const auto& nes = f11().symbol();
    auto primes = kolyvagin_primes(f11(), 7, 400);
    const auto a = primes[0].record(), b = primes[1].record();
    for (int branch : {0, 2}) {
        INFO("branch=" << branch);
        const i64 d = kurihara_number(nes, 7, 1, {a, b}, branch).value;
        // eta -> eta^u scales the logs by u^-1 mod (ell - 1)
        const i64 u = 5, v = 11;
        REQUIRE(gcd(u, a.ell - 1) == 1);
        REQUIRE(gcd(v, b.ell - 1) == 1);
        PrimeRecord a2{a.ell, powmod(a.eta, u, a.ell)}, b2{b.ell, powmod(b.eta, v, b.ell)};
        const i64 d2 = kurihara_number(nes, 7, 1, {a2, b2}, branch).value;
        CHECK(mulmod(d2, mulmod(u, v, 7), 7) == d);

        // symbols differing by 3/5 give values differing by 3/5 mod 7
        const i64 d3 = kurihara_number(nes.rescaled(3, 3), 7, 1, {a, b}, branch).value;
        const i64 d5 = kurihara_number(nes.rescaled(5, 5), 7, 1, {a, b}, branch).value;
        CHECK(d3 == mulmod(3, d, 7));
        CHECK(mulmod(d5, 3, 7) == mulmod(d3, 5, 7));
        CHECK((d3 != 0) == (d5 != 0));
    }
}

TEST_CASE("derivative operators")
{
    CHECK(derivative_operator({}) == IntGroupRing::sigma(1, 0));
    for (PrimeRecord rec : {PrimeRecord{7, 3}, PrimeRecord{11, 2}, PrimeRecord{113, 3}}) {
        auto d = derivative_operator({rec});
        IntGroupRing trace_all(rec.ell);
        for (i64 a = 1; a < rec.ell; ++a) trace_all.add_to(a, BigInt(1));
        auto lhs = (IntGroupRing::sigma(rec.ell, rec.eta) - IntGroupRing::sigma(rec.ell, 1)) * d;
        auto rhs = IntGroupRing::sigma(rec.ell, 1).scaled(BigInt(rec.ell - 1)) - trace_all;
        CHECK(lhs == rhs);
    }
    auto d77 = derivative_operator({{7, 3}, {11, 2}});
    CHECK(d77 == lifted_operator(7, 3, 77) * lifted_operator(11, 2, 77));
    CHECK_THROWS_AS(derivative_operator({{7, 2}}), Error);
    CHECK_THROWS_AS(derivative_operator({{7, 3}, {7, 3}}), Error);
}

TEST_CASE("leading coefficient of the Kolyvagin expansion")
{
    const auto& nes = f11().symbol();
    auto primes = kolyvagin_primes(f11(), 7, 400);
    auto trivial = leading_coeff_check(nes, 7, 1, {}, 0);
    CHECK(trivial.lower_terms_vanish);
    CHECK(trivial.top_coeff == mod_big(period_integral(nes, 1, 0, 1, 0), 7));
    CHECK(trivial.matches_delta);
    for (int branch : {0, 1, 4}) {
        INFO("branch=" << branch);
        for (auto& kp : primes) {
            auto rep = leading_coeff_check(nes, 7, 1, {kp.record()}, branch);
            CHECK(rep.lower_terms_vanish);
            CHECK(rep.matches_delta);
        }
    }
    auto pair = leading_coeff_check(nes, 7, 1, {primes[0].record(), primes[1].record()}, 0);
    CHECK(pair.lower_terms_vanish);
    CHECK(pair.matches_delta);
}

TEST_CASE("replay and search")
{
    const auto& f = f11();
    auto primes = kolyvagin_primes(f, 7, 200);
    auto cert = kurihara_number(f, 7, 1, {primes[0].record()}, 1);
    CHECK(replay(cert, f.symbol()) == cert.value);
    CHECK_THROWS_AS(replay(cert, f.symbol().rescaled(2, 2)), Error);

    auto hit = search_delta(f, 7, 1, 0, {});
    REQUIRE(std::holds_alternative<KuriharaCertificate>(hit));
    CHECK(std::get<KuriharaCertificate>(hit).m == 1);

    SearchStrategy none;
    none.budget = 0;
    auto empty = search_delta(f, 7, 1, 0, none);
    REQUIRE(std::holds_alternative<ExhaustionReport>(empty));
    CHECK(std::get<ExhaustionReport>(empty).tried.empty());

    // every branch either succeeds or reports only m with at most one factor
    SearchStrategy narrow;
    narrow.max_factors = 1;
    narrow.prime_bound = 400;
    for (int branch = 0; branch <= 5; ++branch) {
        auto res = search_delta(f, 7, 1, branch, narrow);
        if (auto* c = std::get_if<KuriharaCertificate>(&res)) {
            CHECK(c->factors.size() <= 1);
            CHECK(c->value != 0);
            CHECK(c->value == oracle_delta(f.symbol(), 7, c->factors, branch));
        } else {
            for (i64 m : std::get<ExhaustionReport>(res).tried) CHECK((m == 1 || is_prime(m)));
        }
    }
}
