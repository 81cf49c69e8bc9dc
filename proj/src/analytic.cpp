#include "mtk/analytic.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include <boost/math/constants/constants.hpp>

namespace mtk {

namespace {

Real to_real(const BigInt& x) { return Real(x.str()); }

Real agm(Real a, Real b)
{
    const Real eps = std::numeric_limits<Real>::epsilon() * 16;
    for (int it = 0; it < 200; ++it) {
        Real m = (a + b) / 2;
        Real g = sqrt(a * b);
        a = m;
        b = g;
        if (abs(a - b) <= eps * abs(a)) break;
    }
    return (a + b) / 2;
}

// Newton polish of a root of x^3 + A x^2 + B x + C.
Real polish(Real x, const Real& A, const Real& B, const Real& C)
{
    for (int it = 0; it < 8; ++it) {
        Real f = ((x + A) * x + B) * x + C;
        Real df = (3 * x + 2 * A) * x + B;
        if (df == 0) break;
        x -= f / df;
    }
    return x;
}

void check_context(const FloatContext& ctx)
{
    if (ctx.digits < 30 || ctx.digits > 45)
        throw Error(ErrorCode::PrecisionUnreachable, "working accuracy must lie between 30 and 45 digits");
}

}  // namespace

Real real_period(const CurveModel& e, const FloatContext& ctx)
{
    check_context(ctx);
    const BigInt disc = e.discriminant();
    if (disc == 0) throw Error(ErrorCode::SingularCurve, "discriminant is zero");
    const Real pi = boost::math::constants::pi<Real>();
    const Real b2 = to_real(e.b2()), b4 = to_real(e.b4()), b6 = to_real(e.b6());

    // roots of 4x^3 + b2 x^2 + 2 b4 x + b6, via the depressed cubic
    const Real A = b2 / 4, B = b4 / 2, C = b6 / 4;
    const Real p = B - A * A / 3;
    const Real q = 2 * A * A * A / 27 - A * B / 3 + C;
    const Real shift = -A / 3;

    if (disc > 0) {
        const Real rad = 2 * sqrt(-p / 3);
        Real arg = 3 * q / (p * rad);
        arg = std::clamp(arg, Real(-1), Real(1));
        const Real phi = acos(arg) / 3;
        std::array<Real, 3> roots;
        for (int k = 0; k < 3; ++k) roots[k] = polish(rad * cos(phi - 2 * pi * k / 3) + shift, A, B, C);
        std::sort(roots.begin(), roots.end(), [](const Real& x, const Real& y) { return x > y; });
        const Real omega = pi / agm(sqrt(roots[0] - roots[2]), sqrt(roots[0] - roots[1]));
        return 2 * omega;
    }
    const Real d = sqrt(q * q / 4 + p * p * p / 27);
    const Real e1 = polish(cbrt(-q / 2 + d) + cbrt(-q / 2 - d) + shift, A, B, C);
    const Real beta = 3 * e1 + b2 / 4;
    const Real alpha = sqrt(3 * e1 * e1 + b2 * e1 / 2 + b4 / 2);
    return 2 * pi / agm(2 * sqrt(alpha), sqrt(2 * alpha + beta));
}

LSeriesValue lvalue_rank0(const CurveModel& e, i64 conductor, const FloatContext& ctx)
{
    check_context(ctx);
    if (conductor < 1) throw Error(ErrorCode::InvalidArgument, "conductor must be positive");
    if (e.discriminant() == 0) throw Error(ErrorCode::SingularCurve, "discriminant is zero");
    const Real pi = boost::math::constants::pi<Real>();
    const Real root_n = sqrt(Real(conductor));

    // Lambda(1) = sum a_n/n (exp(-2 pi n/(t sqrt N)) + eps exp(-2 pi n t/sqrt N)) for all t > 0.
    const Real t1 = 1, t2 = Real(5) / 4;
    const Real slowest = 2 * pi / (t2 * root_n);
    // |a_n| <= 2n, so the tail past M is at most 2 e^{-c(M+1)} / (1 - e^{-c}) per series
    const Real target = pow(Real(10), -(ctx.digits - 5));
    const Real denom = 1 - exp(-slowest);
    const Real needed = (log(Real(2) / (target * denom)) / slowest) - 1;
    if (needed > Real(ctx.max_terms))
        throw Error(ErrorCode::PrecisionUnreachable,
                    "series needs more than " + std::to_string(ctx.max_terms) + " terms");
    const i64 terms = std::max<i64>(1, static_cast<i64>(ceil(needed).convert_to<long long>()));

    // multiplicative a_n from a_p
    std::vector<i64> spf(static_cast<std::size_t>(terms) + 1, 0);
    for (i64 i = 2; i <= terms; ++i)
        if (spf[i] == 0)
            for (i64 j = i; j <= terms; j += i)
                if (spf[j] == 0) spf[j] = i;
    std::vector<Real> a(static_cast<std::size_t>(terms) + 1);
    a[1] = 1;
    for (i64 n = 2; n <= terms; ++n) {
        const i64 p = spf[n];
        i64 pk = p, rest = n / p;
        while (rest % p == 0) {
            pk *= p;
            rest /= p;
        }
        if (rest != 1) {
            a[n] = a[pk] * a[rest];
        } else if (pk == p) {
            a[n] = Real(curve_ap(e, p));
        } else {
            a[n] = a[p] * a[pk / p];
            if (conductor % p != 0) a[n] -= p * a[pk / p / p];
        }
    }

    auto series = [&](const Real& c) {
        Real s = 0;
        const Real step = exp(-c);
        Real w = step;
        for (i64 n = 1; n <= terms; ++n) {
            if (a[n] != 0) s += a[n] * w / n;
            w *= step;
        }
        return s;
    };
    const Real scale = 2 * pi / root_n;
    const Real A1 = series(scale / t1), A2 = series(scale / t2);
    const Real B1 = series(scale * t1), B2 = series(scale * t2);

    LSeriesValue out;
    out.terms = terms;
    out.epsilon_raw = (A1 - A2) / (B2 - B1);
    out.epsilon = out.epsilon_raw > 0 ? 1 : -1;
    if (abs(out.epsilon_raw - out.epsilon) > pow(Real(10), -(ctx.digits / 2)))
        throw Error(ErrorCode::PrecisionUnreachable, "root number did not resolve to +-1");
    out.value = A1 + out.epsilon * B1;
    out.error_bound = 4 * target;
    return out;
}

}  // namespace mtk
