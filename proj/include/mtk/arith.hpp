#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "mtk/errors.hpp"

namespace mtk {

using i64 = std::int64_t;
using u64 = std::uint64_t;

using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

// ---------------------------------------------------------------------------
// machine-word modular helpers

inline i64 mod(i64 a, i64 m)
{
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

inline i64 mulmod(i64 a, i64 b, i64 m)
{
    return static_cast<i64>(static_cast<__int128>(a) * b % m);
}

i64 powmod(i64 base, u64 exp, i64 m);
i64 gcd(i64 a, i64 b);
i64 invmod(i64 a, i64 m);
i64 ipow(i64 base, unsigned exp);
i64 mod_big(const BigInt& x, i64 m);
i64 mod_rational(const Rational& x, i64 m);

bool is_prime(i64 n);
std::vector<i64> primes_up_to(i64 bound);
std::vector<std::pair<i64, int>> factorize(i64 n);
i64 euler_phi(i64 n);
bool is_squarefree(i64 n);

i64 primitive_root(i64 ell);
bool is_primitive_root(i64 g, i64 ell);
i64 discrete_log(i64 a, i64 eta, i64 ell);

std::string to_string(const BigInt& x);
std::string to_string(const Rational& x);

// 64-bit FNV-1a digest rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

// Discrete logarithm to a fixed base modulo a prime.  Lookups go through
// baby-step/giant-step until the prime has been used more than ceil(sqrt(ell))
// times, after which a full table is built once and shared.
class DiscreteLog {
public:
    DiscreteLog(i64 ell, i64 eta);

    i64 prime() const { return ell_; }
    i64 root() const { return eta_; }
    i64 operator()(i64 a) const;
    void build_table() const;
    bool has_table() const { return table_ready_.load(std::memory_order_acquire); }

private:
    i64 bsgs(i64 a) const;

    i64 ell_;
    i64 eta_;
    i64 step_;
    i64 giant_;
    std::unordered_map<i64, i64> baby_;
    mutable std::atomic<i64> uses_{0};
    mutable std::atomic<bool> table_ready_{false};
    mutable std::mutex table_mutex_;
    mutable std::vector<std::uint32_t> table_;
};

struct PrimeRecord {
    i64 ell;
    i64 eta;
};

class PrimeTable {
public:
    explicit PrimeTable(i64 bound, const std::map<i64, i64>& overrides = {});

    i64 bound() const { return bound_; }
    const std::vector<PrimeRecord>& records() const { return records_; }
    i64 eta(i64 ell) const;
    bool contains(i64 ell) const;

private:
    i64 bound_;
    std::vector<PrimeRecord> records_;
    std::unordered_map<i64, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Z/p^M

class ModRing {
public:
    ModRing(i64 p, int precision);

    i64 p() const { return p_; }
    int precision() const { return precision_; }
    i64 modulus() const { return modulus_; }

    i64 reduce(i64 a) const { return mod(a, modulus_); }
    i64 reduce(const BigInt& a) const { return mod_big(a, modulus_); }
    i64 reduce(const Rational& a) const;
    i64 add(i64 a, i64 b) const { return reduce(a + b); }
    i64 sub(i64 a, i64 b) const { return reduce(a - b); }
    i64 mul(i64 a, i64 b) const { return mulmod(reduce(a), reduce(b), modulus_); }
    i64 pow(i64 a, u64 e) const { return powmod(reduce(a), e, modulus_); }
    i64 inv(i64 a) const;
    bool is_unit(i64 a) const { return mod(a, p_) != 0; }
    ModRing with_precision(int precision) const { return ModRing(p_, precision); }

    bool operator==(const ModRing& o) const { return p_ == o.p_ && precision_ == o.precision_; }

private:
    i64 p_;
    int precision_;
    i64 modulus_;
};

i64 teichmuller(i64 a, const ModRing& ring);

// Unit root of x^2 - a_p x + p^(k-1) congruent to a_p mod p.
i64 hensel_unit_root(i64 ap, const ModRing& ring, int weight = 2);

struct Normalized {
    std::vector<BigInt> values;
    Rational scale;
};

Normalized content_normalize(std::span<const Rational> v);

// ---------------------------------------------------------------------------
// (Z/p^M)[X] / ((1+X)^{p^n} - 1)

class TruncPoly {
public:
    TruncPoly(const ModRing& ring, int level);
    TruncPoly(const ModRing& ring, int level, std::vector<i64> coeffs);

    // sum_e c_e (1+X)^e for e in [0, p^level)
    static TruncPoly from_group_coefficients(const ModRing& ring, int level,
                                             std::span<const i64> by_exponent);
    static TruncPoly one(const ModRing& ring, int level);
    static TruncPoly x(const ModRing& ring, int level);

    const ModRing& ring() const { return ring_; }
    int level() const { return level_; }
    i64 degree_bound() const { return static_cast<i64>(c_.size()); }
    const std::vector<i64>& coeffs() const { return c_; }
    i64 operator[](std::size_t j) const { return c_[j]; }

    TruncPoly operator+(const TruncPoly& o) const;
    TruncPoly operator-(const TruncPoly& o) const;
    TruncPoly operator*(const TruncPoly& o) const;
    TruncPoly scaled(i64 s) const;
    bool operator==(const TruncPoly& o) const;

    TruncPoly to_level(int lower) const;
    TruncPoly reduce_precision(int precision) const;
    bool is_zero_mod_p() const;
    std::optional<i64> x_valuation_mod_p() const;

private:
    void check_compatible(const TruncPoly& o) const;

    ModRing ring_;
    int level_;
    std::vector<i64> c_;
};

// Coefficients of (1+X)^{p^n} - 1 reduced modulo the ring, degree p^n monic.
std::vector<i64> tower_modulus(const ModRing& ring, int level);

}  // namespace mtk
