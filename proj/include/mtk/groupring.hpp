#pragma once

#include <memory>
#include <optional>
#include <type_traits>
#include <vector>

#include "mtk/arith.hpp"
#include "mtk/linalg.hpp"

namespace mtk {

// The units of Z/M in increasing order with an inverse lookup table.
class UnitGroup {
public:
    explicit UnitGroup(i64 modulus);

    i64 modulus() const { return m_; }
    Eigen::Index order() const { return static_cast<Eigen::Index>(units_.size()); }
    i64 unit(Eigen::Index idx) const { return units_[static_cast<std::size_t>(idx)]; }
    // Position of a mod M, or -1 when a is not a unit.
    Eigen::Index index(i64 a) const { return slot_[static_cast<std::size_t>(mod(a, m_))]; }
    const std::vector<i64>& units() const { return units_; }

private:
    i64 m_;
    std::vector<i64> units_;
    std::vector<Eigen::Index> slot_;
};

// Shared, immutable unit tables keyed by modulus.
std::shared_ptr<const UnitGroup> unit_group(i64 modulus);

// For units a mod p^n: a = omega(a) (1+p)^e mod p^n with e in [0, p^(n-1)).
class TowerCoordinates {
public:
    TowerCoordinates(i64 p, int n);

    i64 p() const { return p_; }
    int level() const { return n_; }
    i64 modulus() const { return pn_; }
    // e(a) for a unit a; -1 for non-units.
    i64 exponent(i64 a) const { return exp_[static_cast<std::size_t>(mod(a, pn_))]; }

private:
    i64 p_;
    int n_;
    i64 pn_;
    std::vector<i64> exp_;
};

std::shared_ptr<const TowerCoordinates> tower_coordinates(i64 p, int n);

// Element of R[(Z/M)^x] with dense coefficients indexed by units.  For
// Scalar = BigInt the coefficients are exact integers; for Scalar = i64 they
// live in Z/q for the coefficient modulus q.
template <class Scalar>
class GroupRingElement {
public:
    static_assert(std::is_same_v<Scalar, BigInt> || std::is_same_v<Scalar, i64>);

    GroupRingElement(i64 modulus, i64 coeff_modulus = 0)
        : group_(unit_group(modulus)), q_(coeff_modulus), c_(Vec<Scalar>::Constant(group_->order(), Scalar(0)))
    {
        if constexpr (std::is_same_v<Scalar, i64>)
            if (q_ < 2) throw Error(ErrorCode::BadModulus, "word coefficients need a modulus >= 2");
    }

    // sigma_a
    static GroupRingElement sigma(i64 modulus, i64 a, i64 coeff_modulus = 0)
    {
        GroupRingElement x(modulus, coeff_modulus);
        x.add_to(a, Scalar(1));
        return x;
    }

    i64 modulus() const { return group_->modulus(); }
    i64 coeff_modulus() const { return q_; }
    const UnitGroup& group() const { return *group_; }
    const Vec<Scalar>& coeffs() const { return c_; }

    Scalar coeff(i64 a) const
    {
        Eigen::Index j = group_->index(a);
        if (j < 0) throw Error(ErrorCode::NotUnit, std::to_string(a) + " is not a unit mod " + std::to_string(modulus()));
        return c_(j);
    }

    void add_to(i64 a, const Scalar& v)
    {
        Eigen::Index j = group_->index(a);
        if (j < 0) throw Error(ErrorCode::NotUnit, std::to_string(a) + " is not a unit mod " + std::to_string(modulus()));
        c_(j) = reduce(c_(j) + reduce(v));
    }

    bool is_zero() const
    {
        for (Eigen::Index j = 0; j < c_.size(); ++j)
            if (c_(j) != 0) return false;
        return true;
    }

    GroupRingElement operator+(const GroupRingElement& o) const
    {
        check_same(o);
        GroupRingElement out(*this);
        for (Eigen::Index j = 0; j < c_.size(); ++j) out.c_(j) = reduce(c_(j) + o.c_(j));
        return out;
    }

    GroupRingElement operator-(const GroupRingElement& o) const
    {
        check_same(o);
        GroupRingElement out(*this);
        for (Eigen::Index j = 0; j < c_.size(); ++j) out.c_(j) = reduce(c_(j) - o.c_(j));
        return out;
    }

    GroupRingElement operator*(const GroupRingElement& o) const
    {
        check_same(o);
        GroupRingElement out(modulus(), q_);
        const i64 m = modulus();
        for (Eigen::Index i = 0; i < c_.size(); ++i) {
            if (c_(i) == 0) continue;
            const i64 a = group_->unit(i);
            for (Eigen::Index j = 0; j < c_.size(); ++j) {
                if (o.c_(j) == 0) continue;
                Eigen::Index t = group_->index(mulmod(a, group_->unit(j), m));
                out.c_(t) = reduce(out.c_(t) + mul(c_(i), o.c_(j)));
            }
        }
        return out;
    }

    GroupRingElement scaled(const Scalar& s) const
    {
        GroupRingElement out(*this);
        for (Eigen::Index j = 0; j < c_.size(); ++j) out.c_(j) = mul(c_(j), reduce(s));
        return out;
    }

    bool operator==(const GroupRingElement& o) const
    {
        return modulus() == o.modulus() && q_ == o.q_ && c_ == o.c_;
    }

    // Coefficients reduced into Z/q.
    GroupRingElement<i64> reduced(i64 q) const
    {
        GroupRingElement<i64> out(modulus(), q);
        for (Eigen::Index j = 0; j < c_.size(); ++j) {
            if constexpr (std::is_same_v<Scalar, BigInt>)
                out.add_to(group_->unit(j), mod_big(c_(j), q));
            else
                out.add_to(group_->unit(j), mod(c_(j), q));
        }
        return out;
    }

    Scalar reduce(const Scalar& v) const
    {
        if constexpr (std::is_same_v<Scalar, i64>)
            return mod(v, q_);
        else
            return v;
    }

private:
    Scalar mul(const Scalar& a, const Scalar& b) const
    {
        if constexpr (std::is_same_v<Scalar, i64>)
            return mulmod(a, b, q_);
        else
            return a * b;
    }

    void check_same(const GroupRingElement& o) const
    {
        if (modulus() != o.modulus() || q_ != o.q_)
            throw Error(ErrorCode::BadModulus, "group ring elements over different rings");
    }

    std::shared_ptr<const UnitGroup> group_;
    i64 q_;
    Vec<Scalar> c_;
};

using IntGroupRing = GroupRingElement<BigInt>;
using ModGroupRing = GroupRingElement<i64>;

// sigma_a -> sigma_(a mod n); a ring homomorphism.
template <class Scalar>
GroupRingElement<Scalar> projection(const GroupRingElement<Scalar>& x, i64 n)
{
    if (n < 1 || x.modulus() % n != 0)
        throw Error(ErrorCode::NotDivisor, std::to_string(n) + " does not divide " + std::to_string(x.modulus()));
    GroupRingElement<Scalar> out(n, x.coeff_modulus());
    const auto& g = x.group();
    for (Eigen::Index j = 0; j < g.order(); ++j)
        if (x.coeffs()(j) != 0) out.add_to(mod(g.unit(j), n), x.coeffs()(j));
    return out;
}

// sigma_b -> sum of sigma_a over all units a mod M with a = b mod n.
template <class Scalar>
GroupRingElement<Scalar> trace(const GroupRingElement<Scalar>& y, i64 big_modulus)
{
    const i64 n = y.modulus();
    if (big_modulus < 1 || big_modulus % n != 0)
        throw Error(ErrorCode::NotDivisor,
                    std::to_string(n) + " does not divide " + std::to_string(big_modulus));
    GroupRingElement<Scalar> out(big_modulus, y.coeff_modulus());
    const auto& g = out.group();
    for (Eigen::Index j = 0; j < g.order(); ++j) {
        Scalar v = y.coeff(mod(g.unit(j), n));
        if (v != 0) out.add_to(g.unit(j), v);
    }
    return out;
}

// Branch i of x over m*p: sum over each fiber of a^i coeff(a), reduced mod p.
template <class Scalar>
ModGroupRing teichmuller_component(const GroupRingElement<Scalar>& x, int branch, i64 p)
{
    if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
    const i64 mp = x.modulus();
    if (mp % p != 0 || (mp / p) % p == 0)
        throw Error(ErrorCode::BadModulus, "p must divide the modulus exactly once");
    if (branch < 0 || branch > p - 2) throw Error(ErrorCode::InvalidArgument, "branch outside [0, p-2]");
    const i64 m = mp / p;
    ModGroupRing out(m, p);
    const auto& g = x.group();
    for (Eigen::Index j = 0; j < g.order(); ++j) {
        i64 c;
        if constexpr (std::is_same_v<Scalar, BigInt>)
            c = mod_big(x.coeffs()(j), p);
        else
            c = mod(x.coeffs()(j), p);
        if (c == 0) continue;
        const i64 a = g.unit(j);
        out.add_to(mod(a, m), mulmod(powmod(mod(a, p), static_cast<u64>(branch), p), c, p));
    }
    return out;
}

// For x over p^n (n >= 1): c_e = sum of omega^i(a) coeff(a) over units a with
// tower exponent e, reduced into the ring.  Indexed by e in [0, p^(n-1)).
template <class Scalar>
std::vector<i64> branch_group_coefficients(const GroupRingElement<Scalar>& x, i64 p, int branch, const ModRing& ring)
{
    if (ring.p() != p) throw Error(ErrorCode::BadPrime, "ring characteristic does not match p");
    int n = 0;
    for (i64 m = x.modulus(); m > 1; m /= p) {
        if (m % p != 0) throw Error(ErrorCode::BadModulus, "modulus is not a power of p");
        ++n;
    }
    if (n < 1) throw Error(ErrorCode::BadModulus, "modulus must be p^n with n >= 1");
    if (branch < 0 || branch > p - 2) throw Error(ErrorCode::InvalidArgument, "branch outside [0, p-2]");
    auto tc = tower_coordinates(p, n);
    std::vector<i64> omega_pow(static_cast<std::size_t>(p), 0);
    for (i64 t = 1; t < p; ++t) omega_pow[t] = ring.pow(teichmuller(t, ring), static_cast<u64>(branch));
    std::vector<i64> c(static_cast<std::size_t>(x.modulus() / p), 0);
    const auto& g = x.group();
    for (Eigen::Index j = 0; j < g.order(); ++j) {
        const auto& v = x.coeffs()(j);
        if (v == 0) continue;
        const i64 a = g.unit(j);
        auto& slot = c[static_cast<std::size_t>(tc->exponent(a))];
        slot = ring.add(slot, ring.mul(omega_pow[a % p], ring.reduce(v)));
    }
    return c;
}

// The omega^i-branch of x over p^n as a truncated polynomial of level n-1
// under sigma_(1+p) -> 1 + X.
template <class Scalar>
TruncPoly tower_branch(const GroupRingElement<Scalar>& x, i64 p, int branch, const ModRing& ring)
{
    auto c = branch_group_coefficients(x, p, branch, ring);
    int level = 0;
    for (std::size_t s = c.size(); s > 1; s /= static_cast<std::size_t>(p)) ++level;
    return TruncPoly::from_group_coefficients(ring, level, c);
}

// F_p[eps_1, ..., eps_s] / (eps_j^2), coefficients indexed by subset bitmask.
class KolyvaginQuotient {
public:
    KolyvaginQuotient(i64 p, std::vector<PrimeRecord> primes);

    i64 p() const { return p_; }
    const std::vector<PrimeRecord>& primes() const { return primes_; }
    int rank() const { return static_cast<int>(primes_.size()); }
    std::size_t dimension() const { return c_.size(); }
    i64 coeff(std::size_t subset) const { return c_[subset]; }
    i64 constant() const { return c_[0]; }
    // Coefficient of eps_1 ... eps_s.
    i64 top() const { return c_.back(); }
    void set(std::size_t subset, i64 v) { c_[subset] = mod(v, p_); }

    KolyvaginQuotient operator*(const KolyvaginQuotient& o) const;
    KolyvaginQuotient operator+(const KolyvaginQuotient& o) const;
    bool operator==(const KolyvaginQuotient& o) const { return p_ == o.p_ && c_ == o.c_; }

private:
    i64 p_;
    std::vector<PrimeRecord> primes_;
    std::vector<i64> c_;
};

// Image of x in F_p[G_m]/a_m under sigma_eta_j -> 1 + eps_j, with m the
// product of the listed primes.  Each ell_j must be 1 mod p.
KolyvaginQuotient kolyvagin_expand(const ModGroupRing& x, const std::vector<PrimeRecord>& primes);

// X-adic valuation of the reduction mod p; nullopt when it vanishes.
std::optional<i64> augmentation_order(const TruncPoly& x);

}  // namespace mtk
