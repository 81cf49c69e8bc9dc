#include "mtk/eigenform.hpp"

#include <sstream>

namespace mtk {

namespace {

BigInt big(i64 x) { return BigInt(x); }

// (alpha X + beta Y)^e (gamma X + delta Y)^(w-e) with coefficients reduced mod q.
std::vector<i64> form_product_mod(i64 alpha, i64 beta, int e, i64 gamma, i64 delta, int w, i64 q)
{
    auto power = [q](i64 a, i64 b, int n) {
        std::vector<i64> out(static_cast<std::size_t>(n) + 1, 0);
        out[0] = 1 % q;
        a = mod(a, q);
        b = mod(b, q);
        for (int t = 0; t < n; ++t)
            for (int j = t + 1; j >= 0; --j) {
                i64 v = mulmod(b, out[j], q);
                if (j > 0) v = mod(v + mulmod(a, out[j - 1], q), q);
                out[j] = v;
            }
        return out;
    };
    auto f = power(alpha, beta, e);
    auto g = power(gamma, delta, w - e);
    std::vector<i64> out(static_cast<std::size_t>(w) + 1, 0);
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) out[i + j] = mod(out[i + j] + mulmod(f[i], g[j], q), q);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Curves

BigInt CurveModel::b2() const { return big(a[0]) * a[0] + 4 * big(a[1]); }
BigInt CurveModel::b4() const { return 2 * big(a[3]) + big(a[0]) * a[2]; }
BigInt CurveModel::b6() const { return big(a[2]) * a[2] + 4 * big(a[4]); }
BigInt CurveModel::b8() const
{
    BigInt a1 = a[0], a2 = a[1], a3 = a[2], a4 = a[3], a6 = a[4];
    return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
}

BigInt CurveModel::discriminant() const
{
    BigInt c2 = b2(), c4 = b4(), c6 = b6(), c8 = b8();
    return -c2 * c2 * c8 - 8 * c4 * c4 * c4 - 27 * c6 * c6 + 9 * c2 * c4 * c6;
}

std::string CurveModel::label() const
{
    std::ostringstream os;
    os << "curve[" << a[0] << ',' << a[1] << ',' << a[2] << ',' << a[3] << ',' << a[4] << "]/N=" << conductor;
    return os.str();
}

i64 count_points(const CurveModel& e, i64 ell)
{
    if (!is_prime(ell)) throw Error(ErrorCode::NotPrime, std::to_string(ell) + " is not prime");
    std::array<i64, 5> c{};
    for (int i = 0; i < 5; ++i) c[i] = mod(e.a[i], ell);
    i64 count = 1;
    if (ell == 2) {
        for (i64 x = 0; x < 2; ++x)
            for (i64 y = 0; y < 2; ++y) {
                i64 lhs = y * y + c[0] * x * y + c[2] * y;
                i64 rhs = x * x * x + c[1] * x * x + c[3] * x + c[4];
                if ((lhs - rhs) % 2 == 0) ++count;
            }
        return count;
    }
    // completing the square: (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    std::vector<char> square(static_cast<std::size_t>(ell), 0);
    for (i64 y = 0; y < ell; ++y) square[mulmod(y, y, ell)] = 1;
    i64 b2 = mod_big(e.b2(), ell), b4 = mod_big(e.b4(), ell), b6 = mod_big(e.b6(), ell);
    for (i64 x = 0; x < ell; ++x) {
        i64 d = mod(mulmod(mulmod(4, x, ell), mulmod(x, x, ell), ell) + mulmod(b2, mulmod(x, x, ell), ell) +
                        mulmod(2 * b4 % ell, x, ell) + b6,
                    ell);
        if (d == 0)
            count += 1;
        else if (square[d])
            count += 2;
    }
    return count;
}

i64 curve_ap(const CurveModel& e, i64 ell)
{
    BigInt disc = e.discriminant();
    if (disc == 0) throw Error(ErrorCode::SingularCurve, "discriminant is zero");
    bool bad_here = mod_big(disc, ell) == 0;
    if (bad_here && e.conductor % ell != 0)
        throw Error(ErrorCode::BadReductionUnsupported,
                    "model is singular mod " + std::to_string(ell) + " but " + std::to_string(ell) +
                        " does not divide the conductor");
    // With one singular point counted, ell + 1 - #E = ell - #E_ns at bad primes.
    return ell + 1 - count_points(e, ell);
}

std::string source_id(const NewformSource& src)
{
    if (auto* c = std::get_if<CurveModel>(&src)) return c->label();
    const auto& s = std::get<SymbolEigenform>(src);
    std::ostringstream os;
    os << "form[N=" << s.level << ",k=" << s.weight;
    for (auto [ell, a] : s.pins) os << ",a" << ell << '=' << a;
    os << ']';
    return os.str();
}

// ---------------------------------------------------------------------------
// Normalized eigen-symbols

NormalizedEigenSymbol::NormalizedEigenSymbol(const SymbolVector& plus, const SymbolVector& minus)
    : space_(plus.space)
{
    if (minus.space != plus.space) throw Error(ErrorCode::InvalidArgument, "eigen-symbols live on different spaces");
    const SymbolVector* parts[2] = {&plus, &minus};
    for (int s = 0; s < 2; ++s) {
        std::vector<Rational> raw(static_cast<std::size_t>(space_->num_generators()));
        for (int g = 0; g < space_->num_generators(); ++g) raw[g] = parts[s]->on_generator(g);
        Normalized n = content_normalize(raw);
        values_[s] = std::move(n.values);
        scalars_[s] = n.scale;
        functionals_[s] = parts[s]->coords * n.scale;
    }
}

NormalizedEigenSymbol optimal_normalize(std::shared_ptr<const ManinSymbolSpace> space,
                                        const std::map<i64, i64>& eigenvalues)
{
    SymbolVector plus = cuspidal_eigen_symbol(space, eigenvalues, 1);
    SymbolVector minus = cuspidal_eigen_symbol(space, eigenvalues, -1);
    return NormalizedEigenSymbol(plus, minus);
}

Rational NormalizedEigenSymbol::evaluate(int sign, const std::vector<Rational>& p, const Cusp& alpha,
                                         const Cusp& beta) const
{
    if (static_cast<int>(p.size()) > weight() - 1)
        throw Error(ErrorCode::DegreeTooLarge, "polynomial degree exceeds k-2");
    std::vector<Rational> full(p);
    full.resize(static_cast<std::size_t>(weight()) - 1, Rational(0));
    return (functional(sign) * space_->path_coords(full, alpha, beta))(0, 0);
}

i64 NormalizedEigenSymbol::hecke_eigenvalue(i64 ell) const
{
    {
        std::lock_guard lock(eig_->mutex);
        if (auto it = eig_->values.find(ell); it != eig_->values.end()) return it->second;
    }
    // T_ell x = sum over Heilbronn matrices h of x.h on any single Manin
    // generator where the functional does not vanish.
    const int w = weight() - 2;
    const auto& table = values_[0];
    int g0 = 0;
    while (table[g0] == 0) ++g0;  // normalized values are never all zero
    const int pt = g0 / (w + 1), i = g0 % (w + 1);
    auto [c, d] = space_->p1().point(pt);
    std::vector<BigInt> mono(static_cast<std::size_t>(w) + 1, BigInt(0));
    mono[i] = 1;
    BigInt total = 0;
    for (const Mat2& h : heilbronn_merel(ell)) {
        int idx = space_->p1().index(c * h.a + d * h.c, c * h.b + d * h.d);
        if (idx < 0) continue;
        auto q = right_act(mono, h);
        for (int j = 0; j <= w; ++j)
            if (q[j] != 0) total += q[j] * table[space_->generator(idx, j)];
    }
    if (total % table[g0] != 0)
        throw Error(ErrorCode::NonRational, "T_" + std::to_string(ell) + " does not act by an integer");
    BigInt a = total / table[g0];
    i64 out = a.convert_to<i64>();
    std::lock_guard lock(eig_->mutex);
    eig_->values.emplace(ell, out);
    return out;
}

std::string NormalizedEigenSymbol::fingerprint() const
{
    std::ostringstream os;
    os << level() << ':' << weight();
    for (int s = 0; s < 2; ++s) {
        os << (s == 0 ? "|+" : "|-");
        for (const auto& v : values_[s]) os << ',' << v;
    }
    return fnv1a_hex(os.str());
}

NormalizedEigenSymbol NormalizedEigenSymbol::rescaled(const BigInt& plus_factor, const BigInt& minus_factor) const
{
    if (plus_factor == 0 || minus_factor == 0) throw Error(ErrorCode::ZeroVector, "rescaling by zero");
    NormalizedEigenSymbol out(*this);
    const BigInt f[2] = {plus_factor, minus_factor};
    for (int s = 0; s < 2; ++s) {
        for (auto& v : out.values_[s]) v *= f[s];
        out.scalars_[s] *= Rational(f[s]);
        out.functionals_[s] *= Rational(f[s]);
    }
    out.eig_ = std::make_shared<EigenvalueCache>();
    return out;
}

bool NormalizedEigenSymbol::operator==(const NormalizedEigenSymbol& o) const
{
    return level() == o.level() && weight() == o.weight() && values_ == o.values_ &&
           functionals_[0] == o.functionals_[0] && functionals_[1] == o.functionals_[1];
}

std::optional<int> fricke_sign(const NormalizedEigenSymbol& nes)
{
    const i64 n = nes.level();
    const int k = nes.weight(), w = k - 2;
    const Mat2 fricke{0, -1, n, 0};
    auto image = [&](const Cusp& c) { return Cusp::make(-c.den, n * c.num); };
    const Rational scale = Rational(BigInt(boost::multiprecision::pow(BigInt(n), static_cast<unsigned>(w / 2))));
    std::optional<Rational> ratio;
    std::vector<std::pair<Cusp, Cusp>> paths;
    for (i64 m = 1; m <= 7; ++m)
        for (i64 a = 0; a < m; ++a)
            if (gcd(a, m) == 1) paths.emplace_back(Cusp::infinity(), Cusp::make(a, m));
    for (int s : {1, -1})
        for (auto& [alpha, beta] : paths)
            for (int i = 0; i <= w; ++i) {
                std::vector<Rational> p(static_cast<std::size_t>(w) + 1, Rational(0));
                p[i] = 1;
                Rational before = nes.evaluate(s, p, alpha, beta);
                Rational after = nes.evaluate(s, left_act(p, fricke), image(alpha), image(beta));
                if (before == 0) {
                    if (after != 0) return std::nullopt;
                    continue;
                }
                Rational r = after / (before * scale);
                if (ratio && *ratio != r) return std::nullopt;
                ratio = r;
            }
    if (!ratio || (*ratio != 1 && *ratio != -1)) return std::nullopt;
    return *ratio == 1 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// Period integrals
//
// x_a = (mX + aY)^(r-1) Y^(k-1-r) {inf -> -a/m}.  The symbol value is
// lambda(f, z^(r-1); a, m) up to the normalization, and the reflection
// x_{-a} = (-1)^(r-1) iota(x_a) means [a/m]^{+-} = 2 phi^{s}(x_a) with
// s = +-(-1)^(r-1).

PeriodEvaluator::PeriodEvaluator(const NormalizedEigenSymbol& nes, int r, std::optional<i64> modulus)
    : nes_(&nes), r_(r), w_(nes.weight() - 2), modulus_(modulus)
{
    if (r < 1 || r > nes.weight() - 1)
        throw Error(ErrorCode::DegreeTooLarge, "twist r=" + std::to_string(r) + " outside [1, k-1]");
    if (modulus_ && (*modulus_ < 2 || *modulus_ >= (i64{1} << 62)))
        throw Error(ErrorCode::BadModulus, "modulus out of range");
    const BigInt limit = BigInt(1) << 40;
    small_ = w_ == 0;
    for (int s = 0; s < 2; ++s)
        for (const auto& v : nes.generator_values(s == 0 ? 1 : -1))
            if (abs(v) >= limit) small_ = false;
    for (int s = 0; s < 2; ++s) {
        const auto& vals = nes.generator_values(s == 0 ? 1 : -1);
        if (small_) {
            small_values_[s].reserve(vals.size());
            for (const auto& v : vals) small_values_[s].push_back(v.convert_to<i64>());
        }
        if (modulus_) {
            mod_values_[s].reserve(vals.size());
            for (const auto& v : vals) mod_values_[s].push_back(mod_big(v, *modulus_));
        }
    }
}

int PeriodEvaluator::slot_for(int sign) const
{
    int s = (r_ % 2 == 1) ? sign : -sign;
    return NormalizedEigenSymbol::slot(s);
}

template <class Acc>
void PeriodEvaluator::accumulate(i64 a, i64 m, Acc&& acc) const
{
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be positive");
    const P1List& p1 = nes_->space()->p1();
    for_each_segment(-a, m, [&](const Mat2& g) {
        int pt = p1.index(g.c, g.d);
        acc(pt, m * g.a + a * g.c, m * g.b + a * g.d, g.c, g.d);
    });
}

BigInt PeriodEvaluator::value(i64 a, i64 m, int sign) const
{
    a = mod(a, m);
    const int e = r_ - 1;
    auto gen = [&](int pt, int j) { return nes_->space()->generator(pt, j); };
    if (small_) {
        i64 acc[2] = {0, 0};
        accumulate(a, m, [&](int pt, i64, i64, i64, i64) {
            acc[0] += small_values_[0][gen(pt, 0)];
            acc[1] += small_values_[1][gen(pt, 0)];
        });
        i64 out = sign == 0 ? acc[0] + acc[1] : acc[slot_for(sign)];
        return 2 * BigInt(out);
    }
    BigInt acc[2] = {0, 0};
    const auto& plus = nes_->generator_values(1);
    const auto& minus = nes_->generator_values(-1);
    accumulate(a, m, [&](int pt, i64 al, i64 be, i64 ga, i64 de) {
        auto f = linear_form_power<BigInt>(al, be, e);
        auto g = linear_form_power<BigInt>(ga, de, w_ - e);
        auto q = poly_mul(f, g);
        for (int j = 0; j <= w_; ++j) {
            if (q[j] == 0) continue;
            acc[0] += q[j] * plus[gen(pt, j)];
            acc[1] += q[j] * minus[gen(pt, j)];
        }
    });
    return 2 * (sign == 0 ? acc[0] + acc[1] : acc[slot_for(sign)]);
}

i64 PeriodEvaluator::value_mod(i64 a, i64 m, int sign) const
{
    if (!modulus_) throw Error(ErrorCode::InvalidArgument, "evaluator has no modulus");
    const i64 q = *modulus_;
    a = mod(a, m);
    const int e = r_ - 1;
    i64 acc[2] = {0, 0};
    if (w_ == 0) {
        accumulate(a, m, [&](int pt, i64, i64, i64, i64) {
            int g = nes_->space()->generator(pt, 0);
            acc[0] += mod_values_[0][g];
            acc[1] += mod_values_[1][g];
        });
        i64 v = sign == 0 ? mod(acc[0] + acc[1], q) : mod(acc[slot_for(sign)], q);
        return mulmod(2 % q, v, q);
    }
    accumulate(a, m, [&](int pt, i64 al, i64 be, i64 ga, i64 de) {
        auto c = form_product_mod(al, be, e, ga, de, w_, q);
        for (int j = 0; j <= w_; ++j) {
            if (c[j] == 0) continue;
            int g = nes_->space()->generator(pt, j);
            acc[0] = mod(acc[0] + mulmod(c[j], mod_values_[0][g], q), q);
            acc[1] = mod(acc[1] + mulmod(c[j], mod_values_[1][g], q), q);
        }
    });
    i64 v = sign == 0 ? mod(acc[0] + acc[1], q) : acc[slot_for(sign)];
    return mulmod(2 % q, v, q);
}

Rational PeriodEvaluator::lambda(const std::vector<BigInt>& poly, i64 a, i64 m) const
{
    if (static_cast<int>(poly.size()) > w_ + 1) {
        for (std::size_t t = static_cast<std::size_t>(w_) + 1; t < poly.size(); ++t)
            if (poly[t] != 0) throw Error(ErrorCode::DegreeTooLarge, "polynomial degree exceeds k-2");
    }
    const auto& plus = nes_->generator_values(1);
    const auto& minus = nes_->generator_values(-1);
    BigInt acc = 0;
    accumulate(a, m, [&](int pt, i64 al, i64 be, i64 ga, i64 de) {
        std::vector<BigInt> q(static_cast<std::size_t>(w_) + 1, BigInt(0));
        for (std::size_t t = 0; t < poly.size() && static_cast<int>(t) <= w_; ++t) {
            if (poly[t] == 0) continue;
            int e = static_cast<int>(t);
            auto term = poly_mul(linear_form_power<BigInt>(al, be, e), linear_form_power<BigInt>(ga, de, w_ - e));
            for (int j = 0; j <= w_; ++j) q[j] += poly[t] * term[j];
        }
        for (int j = 0; j <= w_; ++j) {
            if (q[j] == 0) continue;
            int g = nes_->space()->generator(pt, j);
            acc += q[j] * (plus[g] + minus[g]);
        }
    });
    return Rational(acc);
}

BigInt PeriodCache::get(int r, i64 a, i64 m, int sign)
{
    auto key = std::make_tuple(mod(a, m), m, r, sign);
    const PeriodEvaluator* ev = nullptr;
    {
        std::lock_guard lock(mutex_);
        if (auto it = values_.find(key); it != values_.end()) return it->second;
        auto& slot = evaluators_[r];
        if (!slot) slot = std::make_unique<PeriodEvaluator>(*nes_, r);
        ev = slot.get();
    }
    BigInt v = ev->value(a, m, sign);
    std::lock_guard lock(mutex_);
    return values_.emplace(key, std::move(v)).first->second;
}

std::size_t PeriodCache::size() const
{
    std::lock_guard lock(mutex_);
    return values_.size();
}

BigInt period_integral(const NormalizedEigenSymbol& nes, int r, i64 a, i64 m, int sign)
{
    return PeriodEvaluator(nes, r).value(a, m, sign);
}

Rational period_lambda(const NormalizedEigenSymbol& nes, const std::vector<BigInt>& poly, i64 a, i64 m)
{
    return PeriodEvaluator(nes, 1).lambda(poly, a, m);
}

// ---------------------------------------------------------------------------
// Newform resolution

namespace {

std::map<i64, i64> curve_pins(const CurveModel& e, i64 bound)
{
    std::map<i64, i64> pins;
    BigInt disc = e.discriminant();
    for (i64 ell : primes_up_to(bound)) {
        if (e.conductor % ell == 0 || mod_big(disc, ell) == 0) continue;
        pins[ell] = curve_ap(e, ell);
    }
    return pins;
}

NormalizedEigenSymbol resolve_with_growing_pins(std::shared_ptr<const ManinSymbolSpace> space,
                                                const std::map<i64, i64>& pins)
{
    // Small primes usually separate the newform already; adding the rest
    // only when needed keeps large Hecke matrices out of the common path.
    std::map<i64, i64> used;
    auto it = pins.begin();
    for (i64 stage : {13, 40}) {
        for (; it != pins.end() && it->first <= stage; ++it) used.insert(*it);
        try {
            return optimal_normalize(space, used);
        } catch (const Error& err) {
            if (err.code() != ErrorCode::AmbiguousEigensystem) throw;
        }
    }
    return optimal_normalize(space, pins);
}

}  // namespace

std::shared_ptr<const Newform> Newform::resolve(const NewformSource& src, const ResolveOptions& opts)
{
    auto out = std::make_shared<Newform>();
    out->source_ = src;
    if (auto* curve = std::get_if<CurveModel>(&src)) {
        if (curve->discriminant() == 0) throw Error(ErrorCode::SingularCurve, "discriminant is zero");
        if (curve->conductor < 1) throw Error(ErrorCode::ConfigError, "conductor must be positive");
        BigInt disc = curve->discriminant();
        for (auto [q, e] : factorize(curve->conductor))
            if (mod_big(disc, q) != 0)
                throw Error(ErrorCode::ConfigError, "conductor has a prime of good reduction: " + std::to_string(q));
        auto space = build_space(curve->conductor, 2, opts.limits);
        out->pinned_ = curve_pins(*curve, opts.eigen_bound);
        try {
            out->nes_ = std::make_unique<NormalizedEigenSymbol>(resolve_with_growing_pins(space, out->pinned_));
        } catch (const Error& err) {
            if (err.code() != ErrorCode::AmbiguousEigensystem) throw;
            throw Error(ErrorCode::ConfigError,
                        "no unique weight 2 eigen-symbol at level " + std::to_string(curve->conductor) +
                            " matches the curve (" + err.what() + ")");
        }
        int checked = 0;
        for (auto [ell, a] : out->pinned_) {
            if (checked >= opts.spot_checks) break;
            if (out->nes_->hecke_eigenvalue(ell) != a)
                throw Error(ErrorCode::ConfigError, "spot check failed at ell=" + std::to_string(ell));
            ++checked;
        }
        return out;
    }
    const auto& form = std::get<SymbolEigenform>(src);
    if (form.weight % 2 != 0) throw Error(ErrorCode::WeightParity, "odd weight has no Gamma_0 forms");
    if (form.weight < 2) throw Error(ErrorCode::InvalidArgument, "weight must be at least 2");
    auto space = build_space(form.level, form.weight, opts.limits);
    out->pinned_ = form.pins;
    out->nes_ = std::make_unique<NormalizedEigenSymbol>(optimal_normalize(space, form.pins));
    for (auto [ell, a] : form.pins)
        if (form.level % ell != 0 && out->nes_->hecke_eigenvalue(ell) != a)
            throw Error(ErrorCode::ConfigError, "pinned eigenvalue mismatch at ell=" + std::to_string(ell));
    return out;
}

i64 Newform::eigenvalue(i64 ell) const
{
    if (!is_prime(ell)) throw Error(ErrorCode::NotPrime, std::to_string(ell) + " is not prime");
    if (auto* curve = std::get_if<CurveModel>(&source_)) return curve_ap(*curve, ell);
    return nes_->hecke_eigenvalue(ell);
}

i64 eigenvalue(const NewformSource& src, i64 ell)
{
    if (!is_prime(ell)) throw Error(ErrorCode::NotPrime, std::to_string(ell) + " is not prime");
    if (auto* curve = std::get_if<CurveModel>(&src)) return curve_ap(*curve, ell);
    return Newform::resolve(src)->eigenvalue(ell);
}

}  // namespace mtk
