#include "mtk/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mtk {

i64 powmod(i64 base, u64 exp, i64 m)
{
    if (m == 1) return 0;
    i64 result = 1;
    base = mod(base, m);
    while (exp) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

i64 gcd(i64 a, i64 b)
{
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b) {
        i64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

i64 invmod(i64 a, i64 m)
{
    i64 g = m, x = 0, r = mod(a, m), y = 1;
    while (r) {
        i64 q = g / r;
        i64 t = g - q * r;
        g = r;
        r = t;
        t = x - q * y;
        x = y;
        y = t;
    }
    if (g != 1) throw Error(ErrorCode::NotUnit, std::to_string(a) + " mod " + std::to_string(m));
    return mod(x, m);
}

i64 ipow(i64 base, unsigned exp)
{
    i64 r = 1;
    while (exp--) r *= base;
    return r;
}

i64 mod_big(const BigInt& x, i64 m)
{
    BigInt r = x % m;
    i64 v = r.convert_to<i64>();
    return v < 0 ? v + m : v;
}

i64 mod_rational(const Rational& x, i64 m)
{
    i64 num = mod_big(boost::multiprecision::numerator(x), m);
    i64 den = mod_big(boost::multiprecision::denominator(x), m);
    return mulmod(num, invmod(den, m), m);
}

bool is_prime(i64 n)
{
    if (n < 2) return false;
    for (i64 q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % q == 0) return n == q;
    }
    i64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (i64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        i64 x = powmod(a, static_cast<u64>(d), n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::vector<i64> primes_up_to(i64 bound)
{
    std::vector<i64> out;
    if (bound < 2) return out;
    std::vector<bool> composite(static_cast<std::size_t>(bound) + 1, false);
    for (i64 i = 2; i <= bound; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (i64 j = i * i; j <= bound; j += i) composite[j] = true;
    }
    return out;
}

std::vector<std::pair<i64, int>> factorize(i64 n)
{
    std::vector<std::pair<i64, int>> f;
    if (n < 0) n = -n;
    for (i64 q = 2; q * q <= n; q += (q == 2 ? 1 : 2)) {
        if (n % q) continue;
        int e = 0;
        while (n % q == 0) {
            n /= q;
            ++e;
        }
        f.emplace_back(q, e);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

i64 euler_phi(i64 n)
{
    i64 r = n;
    for (auto [q, e] : factorize(n)) r = r / q * (q - 1);
    return r;
}

bool is_squarefree(i64 n)
{
    for (auto [q, e] : factorize(n))
        if (e > 1) return false;
    return true;
}

bool is_primitive_root(i64 g, i64 ell)
{
    if (mod(g, ell) == 0) return false;
    if (ell == 2) return true;
    for (auto [q, e] : factorize(ell - 1))
        if (powmod(g, static_cast<u64>((ell - 1) / q), ell) == 1) return false;
    return true;
}

i64 primitive_root(i64 ell)
{
    if (!is_prime(ell)) throw Error(ErrorCode::NotPrime, std::to_string(ell));
    if (ell == 2) return 1;
    auto f = factorize(ell - 1);
    for (i64 g = 2;; ++g) {
        bool ok = true;
        for (auto [q, e] : f) {
            if (powmod(g, static_cast<u64>((ell - 1) / q), ell) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
}

i64 discrete_log(i64 a, i64 eta, i64 ell)
{
    return DiscreteLog(ell, eta)(a);
}

std::string to_string(const BigInt& x) { return x.str(); }

std::string fnv1a_hex(std::string_view data)
{
    u64 h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string to_string(const Rational& x)
{
    if (boost::multiprecision::denominator(x) == 1) return boost::multiprecision::numerator(x).str();
    return boost::multiprecision::numerator(x).str() + "/" + boost::multiprecision::denominator(x).str();
}

// ---------------------------------------------------------------------------

DiscreteLog::DiscreteLog(i64 ell, i64 eta) : ell_(ell), eta_(mod(eta, ell))
{
    if (!is_prime(ell)) throw Error(ErrorCode::NotPrime, std::to_string(ell));
    if (!is_primitive_root(eta_, ell))
        throw Error(ErrorCode::NotPrimitiveRoot, std::to_string(eta) + " mod " + std::to_string(ell));
    step_ = static_cast<i64>(std::ceil(std::sqrt(static_cast<double>(ell - 1))));
    if (step_ < 1) step_ = 1;
    baby_.reserve(static_cast<std::size_t>(step_));
    i64 x = 1;
    for (i64 j = 0; j < step_; ++j) {
        baby_.emplace(x, j);
        x = mulmod(x, eta_, ell_);
    }
    giant_ = invmod(powmod(eta_, static_cast<u64>(step_), ell_), ell_);
}

i64 DiscreteLog::bsgs(i64 a) const
{
    i64 y = a;
    for (i64 i = 0; i <= step_; ++i) {
        auto it = baby_.find(y);
        if (it != baby_.end()) return mod(i * step_ + it->second, ell_ - 1);
        y = mulmod(y, giant_, ell_);
    }
    throw Error(ErrorCode::InvariantViolation, "discrete log not found");
}

void DiscreteLog::build_table() const
{
    std::lock_guard<std::mutex> lock(table_mutex_);
    if (table_ready_.load(std::memory_order_relaxed)) return;
    table_.assign(static_cast<std::size_t>(ell_), 0);
    i64 x = 1;
    for (i64 e = 0; e < ell_ - 1; ++e) {
        table_[x] = static_cast<std::uint32_t>(e);
        x = mulmod(x, eta_, ell_);
    }
    table_ready_.store(true, std::memory_order_release);
}

i64 DiscreteLog::operator()(i64 a) const
{
    a = mod(a, ell_);
    if (a == 0) throw Error(ErrorCode::NotUnit, std::to_string(a) + " mod " + std::to_string(ell_));
    if (table_ready_.load(std::memory_order_acquire)) return table_[a];
    i64 used = uses_.fetch_add(1, std::memory_order_relaxed) + 1;
    if (used > step_ + 1) {
        build_table();
        return table_[a];
    }
    return bsgs(a);
}

// ---------------------------------------------------------------------------

PrimeTable::PrimeTable(i64 bound, const std::map<i64, i64>& overrides) : bound_(bound)
{
    for (i64 ell : primes_up_to(bound)) {
        if (ell == 2) continue;
        i64 eta = primitive_root(ell);
        if (auto it = overrides.find(ell); it != overrides.end()) {
            if (!is_primitive_root(it->second, ell))
                throw Error(ErrorCode::NotPrimitiveRoot,
                            std::to_string(it->second) + " mod " + std::to_string(ell));
            eta = mod(it->second, ell);
        }
        index_.emplace(ell, records_.size());
        records_.push_back({ell, eta});
    }
    for (auto [ell, g] : overrides)
        if (!index_.count(ell))
            throw Error(ErrorCode::InvalidArgument, "override for prime outside table: " + std::to_string(ell));
}

i64 PrimeTable::eta(i64 ell) const
{
    auto it = index_.find(ell);
    if (it == index_.end()) throw Error(ErrorCode::NotPrime, std::to_string(ell) + " not in prime table");
    return records_[it->second].eta;
}

bool PrimeTable::contains(i64 ell) const { return index_.count(ell) != 0; }

// ---------------------------------------------------------------------------

ModRing::ModRing(i64 p, int precision) : p_(p), precision_(precision)
{
    if (p < 3 || !is_prime(p)) throw Error(ErrorCode::BadPrime, "ring prime must be an odd prime");
    if (precision < 1) throw Error(ErrorCode::InvalidArgument, "precision must be >= 1");
    modulus_ = 1;
    for (int i = 0; i < precision; ++i) {
        if (modulus_ > (i64{1} << 61) / p) throw Error(ErrorCode::ResourceLimit, "p^M exceeds 61 bits");
        modulus_ *= p;
    }
}

i64 ModRing::reduce(const Rational& a) const { return mod_rational(a, modulus_); }

i64 ModRing::inv(i64 a) const
{
    if (!is_unit(a)) throw Error(ErrorCode::NotUnit, std::to_string(a) + " mod " + std::to_string(p_));
    return invmod(a, modulus_);
}

i64 teichmuller(i64 a, const ModRing& ring)
{
    if (!ring.is_unit(a)) throw Error(ErrorCode::NotUnit, std::to_string(a));
    i64 x = ring.reduce(a);
    for (;;) {
        i64 next = ring.pow(x, static_cast<u64>(ring.p()));
        if (next == x) return x;
        x = next;
    }
}

i64 hensel_unit_root(i64 ap, const ModRing& ring, int weight)
{
    if (mod(ap, ring.p()) == 0) throw Error(ErrorCode::NotOrdinary, "p divides a_p");
    i64 q = ring.pow(ring.p(), static_cast<u64>(weight - 1));
    i64 a = ring.reduce(ap);
    i64 x = a;
    // f(x) = x^2 - a x + q, f'(x) = 2x - a is a unit because x = a mod p
    for (int iter = 0; iter <= ring.precision() + 1; ++iter) {
        i64 f = ring.add(ring.sub(ring.mul(x, x), ring.mul(a, x)), q);
        if (f == 0) break;
        i64 df = ring.sub(ring.mul(2, x), a);
        x = ring.sub(x, ring.mul(f, ring.inv(df)));
    }
    return x;
}

Normalized content_normalize(std::span<const Rational> v)
{
    BigInt den = 1;
    BigInt num_gcd = 0;
    const Rational* first = nullptr;
    for (const Rational& x : v) {
        if (x == 0) continue;
        if (!first) first = &x;
        den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(x));
    }
    if (!first) throw Error(ErrorCode::ZeroVector, "content_normalize of zero vector");
    std::vector<BigInt> ints;
    ints.reserve(v.size());
    for (const Rational& x : v) {
        BigInt w = boost::multiprecision::numerator(x) * (den / boost::multiprecision::denominator(x));
        num_gcd = boost::multiprecision::gcd(num_gcd, w);
        ints.push_back(std::move(w));
    }
    if (*first < 0) num_gcd = -num_gcd;
    for (BigInt& w : ints) w /= num_gcd;
    return {std::move(ints), Rational(den) / Rational(num_gcd)};
}

// ---------------------------------------------------------------------------

namespace {

i64 level_size(i64 p, int level)
{
    i64 d = 1;
    for (int i = 0; i < level; ++i) d *= p;
    return d;
}

}  // namespace

std::vector<i64> tower_modulus(const ModRing& ring, int level)
{
    // binom(D, j) mod p^M via a rolling Pascal row
    i64 d = level_size(ring.p(), level);
    std::vector<i64> row(static_cast<std::size_t>(d) + 1, 0);
    row[0] = 1;
    for (i64 i = 1; i <= d; ++i)
        for (i64 j = i; j >= 1; --j) row[j] = ring.add(row[j], row[j - 1]);
    row[0] = 0;
    return row;
}

TruncPoly::TruncPoly(const ModRing& ring, int level)
    : ring_(ring), level_(level), c_(static_cast<std::size_t>(level_size(ring.p(), level)), 0)
{
}

TruncPoly::TruncPoly(const ModRing& ring, int level, std::vector<i64> coeffs) : TruncPoly(ring, level)
{
    std::vector<i64> mod_f = coeffs.size() > c_.size() ? tower_modulus(ring, level) : std::vector<i64>{};
    std::size_t d = c_.size();
    for (std::size_t j = coeffs.size(); j-- > d;) {
        i64 t = ring.reduce(coeffs[j]);
        if (t == 0) continue;
        for (std::size_t s = 0; s < d; ++s)
            coeffs[j - d + s] = ring.sub(ring.reduce(coeffs[j - d + s]), ring.mul(t, mod_f[s]));
    }
    for (std::size_t j = 0; j < std::min(d, coeffs.size()); ++j) c_[j] = ring.reduce(coeffs[j]);
}

TruncPoly TruncPoly::from_group_coefficients(const ModRing& ring, int level, std::span<const i64> by_exponent)
{
    TruncPoly out(ring, level);
    if (by_exponent.size() != out.c_.size())
        throw Error(ErrorCode::InvalidArgument, "group coefficient count must equal p^level");
    // Horner in (1+X): acc <- acc*(1+X) + c_e, from the top exponent down
    std::vector<i64>& acc = out.c_;
    std::size_t d = acc.size();
    for (std::size_t e = d; e-- > 0;) {
        for (std::size_t j = d - 1; j >= 1; --j) acc[j] = ring.add(acc[j], acc[j - 1]);
        acc[0] = ring.add(acc[0], by_exponent[e]);
    }
    return out;
}

TruncPoly TruncPoly::one(const ModRing& ring, int level)
{
    TruncPoly t(ring, level);
    t.c_[0] = ring.reduce(i64{1});
    return t;
}

TruncPoly TruncPoly::x(const ModRing& ring, int level)
{
    std::vector<i64> c{0, 1};
    return TruncPoly(ring, level, c);
}

void TruncPoly::check_compatible(const TruncPoly& o) const
{
    if (!(ring_ == o.ring_) || level_ != o.level_)
        throw Error(ErrorCode::InvalidArgument, "TruncPoly operands live in different rings");
}

TruncPoly TruncPoly::operator+(const TruncPoly& o) const
{
    check_compatible(o);
    TruncPoly r(*this);
    for (std::size_t j = 0; j < c_.size(); ++j) r.c_[j] = ring_.add(c_[j], o.c_[j]);
    return r;
}

TruncPoly TruncPoly::operator-(const TruncPoly& o) const
{
    check_compatible(o);
    TruncPoly r(*this);
    for (std::size_t j = 0; j < c_.size(); ++j) r.c_[j] = ring_.sub(c_[j], o.c_[j]);
    return r;
}

TruncPoly TruncPoly::operator*(const TruncPoly& o) const
{
    check_compatible(o);
    std::size_t d = c_.size();
    std::vector<__int128> acc(2 * d, 0);
    i64 m = ring_.modulus();
    for (std::size_t i = 0; i < d; ++i) {
        if (c_[i] == 0) continue;
        for (std::size_t j = 0; j < d; ++j) {
            acc[i + j] += static_cast<__int128>(c_[i]) * o.c_[j];
            if (acc[i + j] > (static_cast<__int128>(1) << 120)) acc[i + j] %= m;
        }
    }
    std::vector<i64> full(2 * d);
    for (std::size_t j = 0; j < 2 * d; ++j) full[j] = static_cast<i64>(acc[j] % m);
    return TruncPoly(ring_, level_, std::move(full));
}

TruncPoly TruncPoly::scaled(i64 s) const
{
    TruncPoly r(*this);
    for (i64& x : r.c_) x = ring_.mul(x, s);
    return r;
}

bool TruncPoly::operator==(const TruncPoly& o) const
{
    return ring_ == o.ring_ && level_ == o.level_ && c_ == o.c_;
}

TruncPoly TruncPoly::to_level(int lower) const
{
    if (lower > level_) throw Error(ErrorCode::InvalidArgument, "to_level cannot raise the level");
    return TruncPoly(ring_, lower, c_);
}

TruncPoly TruncPoly::reduce_precision(int precision) const
{
    if (precision > ring_.precision()) throw Error(ErrorCode::InvalidArgument, "cannot raise precision");
    ModRing r = ring_.with_precision(precision);
    std::vector<i64> c(c_);
    return TruncPoly(r, level_, std::move(c));
}

bool TruncPoly::is_zero_mod_p() const { return !x_valuation_mod_p().has_value(); }

std::optional<i64> TruncPoly::x_valuation_mod_p() const
{
    for (std::size_t j = 0; j < c_.size(); ++j)
        if (c_[j] % ring_.p() != 0) return static_cast<i64>(j);
    return std::nullopt;
}

}  // namespace mtk
