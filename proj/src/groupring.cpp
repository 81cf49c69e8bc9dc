#include "mtk/groupring.hpp"

#include <map>
#include <mutex>

namespace mtk {

UnitGroup::UnitGroup(i64 modulus) : m_(modulus)
{
    if (modulus < 1) throw Error(ErrorCode::BadModulus, "modulus must be positive");
    if (modulus > (i64{1} << 28)) throw Error(ErrorCode::ResourceLimit, "modulus too large for dense storage");
    slot_.assign(static_cast<std::size_t>(modulus), -1);
    for (i64 a = 0; a < modulus; ++a)
        if (gcd(a, modulus) == 1) {
            slot_[static_cast<std::size_t>(a)] = static_cast<Eigen::Index>(units_.size());
            units_.push_back(a);
        }
}

std::shared_ptr<const UnitGroup> unit_group(i64 modulus)
{
    static std::mutex guard;
    static std::map<i64, std::weak_ptr<const UnitGroup>> cache;
    std::lock_guard lock(guard);
    if (auto it = cache.find(modulus); it != cache.end())
        if (auto alive = it->second.lock()) return alive;
    auto g = std::make_shared<const UnitGroup>(modulus);
    cache[modulus] = g;
    return g;
}

KolyvaginQuotient::KolyvaginQuotient(i64 p, std::vector<PrimeRecord> primes) : p_(p), primes_(std::move(primes))
{
    if (primes_.size() > 20) throw Error(ErrorCode::ResourceLimit, "too many Kolyvagin primes");
    c_.assign(std::size_t{1} << primes_.size(), 0);
}

KolyvaginQuotient KolyvaginQuotient::operator*(const KolyvaginQuotient& o) const
{
    if (p_ != o.p_ || c_.size() != o.c_.size()) throw Error(ErrorCode::InvalidArgument, "incompatible quotients");
    KolyvaginQuotient out(p_, primes_);
    const std::size_t full = c_.size() - 1;
    for (std::size_t s = 0; s <= full; ++s) {
        if (c_[s] == 0) continue;
        // iterate over subsets t of the complement of s
        std::size_t rest = full & ~s;
        for (std::size_t t = rest;; t = (t - 1) & rest) {
            if (o.c_[t] != 0) out.c_[s | t] = mod(out.c_[s | t] + mulmod(c_[s], o.c_[t], p_), p_);
            if (t == 0) break;
        }
    }
    return out;
}

KolyvaginQuotient KolyvaginQuotient::operator+(const KolyvaginQuotient& o) const
{
    if (p_ != o.p_ || c_.size() != o.c_.size()) throw Error(ErrorCode::InvalidArgument, "incompatible quotients");
    KolyvaginQuotient out(*this);
    for (std::size_t s = 0; s < c_.size(); ++s) out.c_[s] = mod(c_[s] + o.c_[s], p_);
    return out;
}

KolyvaginQuotient kolyvagin_expand(const ModGroupRing& x, const std::vector<PrimeRecord>& primes)
{
    const i64 p = x.coeff_modulus();
    if (!is_prime(p)) throw Error(ErrorCode::NotPrime, "coefficients must lie in a prime field");
    i64 m = 1;
    for (const auto& rec : primes) {
        if (!is_prime(rec.ell) || m % rec.ell == 0)
            throw Error(ErrorCode::NotSquareFree, "Kolyvagin primes must be distinct primes");
        if ((rec.ell - 1) % p != 0)
            throw Error(ErrorCode::NotKolyvagin, std::to_string(rec.ell) + " is not 1 mod " + std::to_string(p));
        if (!is_primitive_root(rec.eta, rec.ell))
            throw Error(ErrorCode::NotPrimitiveRoot,
                        std::to_string(rec.eta) + " is not a primitive root mod " + std::to_string(rec.ell));
        m *= rec.ell;
    }
    if (m != x.modulus())
        throw Error(ErrorCode::NotSquareFree, "modulus is not the product of the listed primes");

    // discrete logs mod p for each prime, by walking the powers of eta
    std::vector<std::vector<i64>> logs;
    for (const auto& rec : primes) {
        std::vector<i64> lg(static_cast<std::size_t>(rec.ell), 0);
        i64 v = 1;
        for (i64 e = 0; e < rec.ell - 1; ++e) {
            lg[static_cast<std::size_t>(v)] = e % p;
            v = mulmod(v, rec.eta, rec.ell);
        }
        logs.push_back(std::move(lg));
    }

    KolyvaginQuotient out(p, primes);
    const std::size_t s = primes.size();
    std::vector<i64> prod(std::size_t{1} << s);
    std::vector<i64> acc(prod.size(), 0);
    const auto& g = x.group();
    for (Eigen::Index j = 0; j < g.order(); ++j) {
        i64 c = x.coeffs()(j);
        if (c == 0) continue;
        const i64 a = g.unit(j);
        prod[0] = c;
        for (std::size_t t = 0; t < s; ++t) {
            i64 l = logs[t][static_cast<std::size_t>(mod(a, primes[t].ell))];
            std::size_t bit = std::size_t{1} << t;
            for (std::size_t mask = 0; mask < bit; ++mask) prod[mask | bit] = mulmod(prod[mask], l, p);
        }
        for (std::size_t mask = 0; mask < prod.size(); ++mask) acc[mask] = mod(acc[mask] + prod[mask], p);
    }
    for (std::size_t mask = 0; mask < acc.size(); ++mask) out.set(mask, acc[mask]);
    return out;
}

std::optional<i64> augmentation_order(const TruncPoly& x) { return x.x_valuation_mod_p(); }

TowerCoordinates::TowerCoordinates(i64 p, int n) : p_(p), n_(n)
{
    if (!is_prime(p) || p < 3) throw Error(ErrorCode::BadPrime, "tower coordinates need an odd prime");
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "level must be at least 1");
    pn_ = ipow(p, n);
    if (pn_ > (i64{1} << 26)) throw Error(ErrorCode::ResourceLimit, "p^n too large for a dense table");
    exp_.assign(static_cast<std::size_t>(pn_), -1);
    ModRing ring(p, n);
    std::vector<i64> omega(static_cast<std::size_t>(p));
    for (i64 t = 1; t < p; ++t) omega[t] = teichmuller(t, ring);
    const i64 gamma = 1 + p;
    i64 power = 1;
    for (i64 e = 0; e < pn_ / p; ++e) {
        for (i64 t = 1; t < p; ++t) exp_[static_cast<std::size_t>(mulmod(omega[t], power, pn_))] = e;
        power = mulmod(power, gamma, pn_);
    }
}

std::shared_ptr<const TowerCoordinates> tower_coordinates(i64 p, int n)
{
    static std::mutex guard;
    static std::map<std::pair<i64, int>, std::shared_ptr<const TowerCoordinates>> cache;
    std::lock_guard lock(guard);
    auto& slot = cache[{p, n}];
    if (!slot) slot = std::make_shared<const TowerCoordinates>(p, n);
    return slot;
}

}  // namespace mtk
