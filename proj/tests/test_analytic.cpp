#include "doctest.h"

#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "mtk/analytic.hpp"

using namespace mtk;

namespace {

const CurveModel e11{{0, -1, 1, -10, -20}, 11};
const CurveModel e37{{0, 0, 1, -1, 0}, 37};
const CurveModel e14{{1, 0, 1, 4, -6}, 14};
const CurveModel e5077{{0, 0, 1, -7, 6}, 5077};

double dbl(const BigInt& x) { return x.convert_to<double>(); }

// Least real period by direct quadrature: substitute x = e1 + t^2 so that
// 2 * int_{e1}^inf dx/|2y + a1 x + a3| = 2 * int_0^inf dt / sqrt(Q(e1 + t^2)),
// Q being the quadratic left after removing the largest real root e1.
double quadrature_period(const CurveModel& e)
{
    const double A = dbl(e.b2()) / 4, B = dbl(e.b4()) / 2, C = dbl(e.b6()) / 4;
    auto f = [&](double x) { return ((x + A) * x + B) * x + C; };
    auto df = [&](double x) { return (3 * x + 2 * A) * x + B; };
    // Newton from the right of every root decreases monotonically onto the largest one
    double e1 = 1;
    while (f(e1) < 0 || df(e1) < 0) e1 *= 2;
    for (int it = 0; it < 200; ++it) e1 -= f(e1) / df(e1);
    const double c1 = A + e1, c0 = B + e1 * c1;
    auto integrand = [&](double t) {
        double x = e1 + t * t;
        return 1.0 / std::sqrt(x * x + c1 * x + c0);
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    double omega = 2 * integrator.integrate(integrand, 1e-14);
    const bool two_components = e.discriminant() > 0;
    return two_components ? 2 * omega : omega;
}

}  // namespace

TEST_CASE("real periods")
{
    for (const auto& e : {e11, e37, e14, e5077}) {
        INFO(e.label());
        Real omega = real_period(e);
        CHECK(omega > 0);
        double quad = quadrature_period(e);
        CHECK(std::fabs(omega.convert_to<double>() - quad) < 1e-9 * quad);
    }
    // (x, y) -> (4x, 8y) divides the period by 2
    for (const auto& e : {e11, e37}) {
        CurveModel scaled = e;
        i64 u = 1;
        for (auto& ai : scaled.a) {
            u *= 2;
            ai *= u;
        }
        scaled.a[4] *= 2;  // a6 takes u^6, not u^5
        Real ratio = real_period(e) / real_period(scaled);
        CHECK(abs(ratio - 2) < Real("1e-35"));
    }
    CHECK_THROWS_AS(real_period(CurveModel{{0, 0, 0, 0, 0}, 1}), Error);
    CHECK_THROWS_AS(real_period(e11, FloatContext{20, 1000}), Error);
}

TEST_CASE("central L-values")
{
    auto l11 = lvalue_rank0(e11, 11);
    CHECK(l11.epsilon == 1);
    CHECK(l11.value > Real("1e-3"));
    // L(E,1)/Omega = 1/5 for this curve; compare against the independent period
    CHECK(abs(l11.value * 5 / real_period(e11) - 1) < Real("1e-30"));

    auto l37 = lvalue_rank0(e37, 37);
    CHECK(l37.epsilon == -1);
    CHECK(abs(l37.value) < Real("1e-8"));
    CHECK(abs(l37.epsilon_raw + 1) < Real("1e-20"));

    auto l14 = lvalue_rank0(e14, 14);
    CHECK(l14.epsilon == 1);
    CHECK(l14.value > Real("1e-3"));

    auto l5077 = lvalue_rank0(e5077, 5077);
    CHECK(l5077.epsilon == -1);
    CHECK(abs(l5077.value) < Real("1e-8"));

    CHECK_THROWS_AS(lvalue_rank0(e11, 11, FloatContext{40, 5}), Error);
}

TEST_CASE("analytic and exact data agree")
{
    for (const auto& e : {e11, e37, e14}) {
        INFO(e.label());
        auto f = Newform::resolve(e);
        const auto& nes = f->symbol();
        auto lv = lvalue_rank0(e, e.conductor);
        const bool exact_nonzero = period_integral(nes, 1, 0, 1, 1) != 0;
        CHECK(exact_nonzero == (abs(lv.value) > Real("1e-8")));
        if (auto w = fricke_sign(nes)) CHECK(lv.epsilon == -*w);
    }
}
