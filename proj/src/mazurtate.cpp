#include "mtk/mazurtate.hpp"

#include "mtk/parallel.hpp"

namespace mtk {

namespace {

void require_coprime_level(const NormalizedEigenSymbol& nes, i64 modulus)
{
    if (gcd(modulus, nes.level()) != 1)
        throw Error(ErrorCode::GcdViolation,
                    "modulus " + std::to_string(modulus) + " is not prime to the level " + std::to_string(nes.level()));
}

void require_good_odd_prime(const NormalizedEigenSymbol& nes, i64 p)
{
    if (p < 3 || !is_prime(p)) throw Error(ErrorCode::BadPrime, "p must be an odd prime");
    if (nes.level() % p == 0) throw Error(ErrorCode::BadPrime, "p divides the level");
}

IntGroupRing fill_theta(const PeriodEvaluator& ev, i64 modulus, int jobs)
{
    IntGroupRing out(modulus);
    const auto& units = out.group().units();
    std::vector<BigInt> values(units.size());
    parallel_for(units.size(), jobs, [&](std::size_t j) { values[j] = ev.value(units[j], modulus, 0); });
    for (std::size_t j = 0; j < units.size(); ++j) out.add_to(units[j], values[j]);
    return out;
}

BigInt big_pow(i64 base, int e) { return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(e)); }

}  // namespace

ThetaElement theta(const NormalizedEigenSymbol& nes, i64 modulus, int r, int jobs)
{
    if (modulus < 1) throw Error(ErrorCode::BadModulus, "modulus must be positive");
    require_coprime_level(nes, modulus);
    PeriodEvaluator ev(nes, r);
    return {nes.fingerprint(), r, fill_theta(ev, modulus, jobs)};
}

ThetaTable::ThetaTable(const NormalizedEigenSymbol& nes, int r, int jobs)
    : nes_(&nes), r_(r), jobs_(jobs), eval_(nes, r)
{
}

const IntGroupRing& ThetaTable::get(i64 modulus)
{
    std::lock_guard lock(mutex_);
    auto& slot = cache_[modulus];
    if (!slot) {
        if (modulus < 1) throw Error(ErrorCode::BadModulus, "modulus must be positive");
        require_coprime_level(*nes_, modulus);
        slot = std::make_unique<IntGroupRing>(fill_theta(eval_, modulus, jobs_));
    }
    return *slot;
}

NormRelationReport verify_norm_relation(ThetaTable& table, i64 m, i64 ell)
{
    if (ell < 2 || !is_prime(ell)) throw Error(ErrorCode::NotPrime, "ell must be prime");
    if (m < 1) throw Error(ErrorCode::BadModulus, "m must be positive");
    const auto& nes = table.symbol();
    require_coprime_level(nes, m * ell);
    const int k = nes.weight(), r = table.r();
    const BigInt a_ell = nes.hecke_eigenvalue(ell);

    NormRelationReport rep;
    rep.m = m;
    rep.ell = ell;
    rep.r = r;
    rep.lhs = projection(table.get(m * ell), m);
    const IntGroupRing& theta_m = table.get(m);
    if (m % ell != 0) {
        IntGroupRing op = IntGroupRing::sigma(m, 1).scaled(a_ell);
        i64 frob = mod(ell, m), frob_inv = m == 1 ? 0 : invmod(mod(ell, m), m);
        op = op - IntGroupRing::sigma(m, frob).scaled(big_pow(ell, r - 1));
        op = op - IntGroupRing::sigma(m, frob_inv).scaled(big_pow(ell, k - 1 - r));
        rep.rhs = op * theta_m;
    } else {
        rep.rhs = theta_m.scaled(a_ell) - trace(table.get(m / ell), m).scaled(big_pow(ell, k - 2));
    }
    rep.equal = rep.lhs == rep.rhs;
    return rep;
}

NormRelationReport verify_norm_relation(const NormalizedEigenSymbol& nes, i64 m, i64 ell, int r)
{
    ThetaTable table(nes, r);
    return verify_norm_relation(table, m, ell);
}

IwasawaBranchPoly theta_branch(const NormalizedEigenSymbol& nes, i64 p, int n, int branch, const ModRing& ring, int r)
{
    require_good_odd_prime(nes, p);
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "level must be at least 1");
    auto th = theta(nes, ipow(p, n), r);
    return {p, n, branch, tower_branch(th.element, p, branch, ring)};
}

StabilizedTheta stabilized_theta(const NormalizedEigenSymbol& nes, i64 p, int n, const ModRing& ring, int r)
{
    require_good_odd_prime(nes, p);
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "level must be nonnegative");
    if (ring.p() != p) throw Error(ErrorCode::BadPrime, "ring characteristic does not match p");
    const int k = nes.weight();
    const i64 q = ring.modulus();
    const i64 alpha = hensel_unit_root(nes.hecke_eigenvalue(p), ring, k);
    const i64 top = ipow(p, n + 1);
    ModGroupRing upper = theta(nes, top, r).element.reduced(q);
    ModGroupRing lower = trace(theta(nes, ipow(p, n), r).element.reduced(q), top);
    const i64 alpha_inv = ring.inv(alpha);
    const i64 c = ring.mul(ring.pow(p, static_cast<u64>(k - 2)), alpha_inv);
    ModGroupRing full = (upper - lower.scaled(c)).scaled(ring.pow(alpha_inv, static_cast<u64>(n + 1)));
    TruncPoly traced = tower_branch(full, p, 0, ring);
    return {p, n, alpha, std::move(full), std::move(traced)};
}

IwasawaReading iwasawa_invariants(const std::vector<TruncPoly>& levels)
{
    if (levels.size() < 2) throw Error(ErrorCode::InsufficientLevels, "need at least two consecutive levels");
    IwasawaReading out;
    for (const auto& x : levels) out.valuations.push_back(x.x_valuation_mod_p());
    for (const auto& v : out.valuations)
        if (v) out.mu_zero = true;
    out.lambda = out.valuations.back();
    // A level whose degree bound does not exceed lambda legitimately reads zero.
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const auto& v = out.valuations[j];
        if (!out.lambda) {
            if (v) out.stable = false;
        } else if (levels[j].degree_bound() > *out.lambda) {
            if (v != out.lambda) out.stable = false;
        } else if (v) {
            out.stable = false;
        }
    }
    return out;
}

int pollack_sign(int n, ParityMap map)
{
    bool even = n % 2 == 0;
    return (even == (map == ParityMap::EvenMinus)) ? -1 : 1;
}

i64 pollack_degree(i64 p, int n, int sign)
{
    i64 q = 0;
    for (int m = sign > 0 ? 2 : 1; m <= n; m += 2) q += ipow(p, m - 1) * (p - 1);
    return q;
}

PollackReport pollack_check(const NormalizedEigenSymbol& nes, i64 p, int n_min, int n_max, ParityMap map)
{
    require_good_odd_prime(nes, p);
    if (nes.hecke_eigenvalue(p) != 0)
        throw Error(ErrorCode::NotSupersingularZero, "a_p is nonzero at p=" + std::to_string(p));
    if (n_min < 0 || n_max < n_min) throw Error(ErrorCode::InvalidArgument, "empty level range");
    PollackReport rep;
    rep.p = p;
    rep.map = map;
    ModRing fp(p, 1);
    PeriodEvaluator ev(nes, 1);
    for (int n = n_min; n <= n_max; ++n) {
        IntGroupRing th = fill_theta(ev, ipow(p, n + 1), 1);
        TruncPoly reduced = tower_branch(th, p, 0, fp);
        PollackLevel lv;
        lv.n = n;
        lv.sign = pollack_sign(n, map);
        lv.q = pollack_degree(p, n, lv.sign);
        lv.valuation = reduced.x_valuation_mod_p();
        if (lv.valuation) {
            lv.divisibility_ok = *lv.valuation >= lv.q;
            lv.lambda_candidate = *lv.valuation - lv.q;
        }
        rep.levels.push_back(lv);
    }
    for (int parity = 0; parity < 2; ++parity) {
        std::optional<i64> seen;
        for (const auto& lv : rep.levels) {
            if (lv.n % 2 != parity || !lv.lambda_candidate) continue;
            if (seen && *seen != *lv.lambda_candidate) rep.parity_stable = false;
            seen = lv.lambda_candidate;
        }
    }
    return rep;
}

std::vector<IntGroupRing> mt_ideal_generators(const NormalizedEigenSymbol& nes, i64 p, int n, std::optional<int> r)
{
    const int k = nes.weight();
    if (k % 2 != 0) throw Error(ErrorCode::WeightParity, "central twist needs even weight");
    require_good_odd_prime(nes, p);
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "level must be nonnegative");
    const int twist = r.value_or(k / 2);
    PeriodEvaluator ev(nes, twist);
    const i64 top = ipow(p, n);
    std::vector<IntGroupRing> out;
    for (int j = 0; j <= n; ++j) out.push_back(trace(fill_theta(ev, ipow(p, j), 1), top));
    return out;
}

std::optional<MuWitness> mu_witness(const NormalizedEigenSymbol& nes, i64 p, int branch, int n_max, int r)
{
    require_good_odd_prime(nes, p);
    ModRing fp(p, 1);
    PeriodEvaluator ev(nes, r);
    for (int n = 1; n <= n_max; ++n) {
        const i64 pn = ipow(p, n);
        IntGroupRing th = fill_theta(ev, pn, 1);
        auto c = branch_group_coefficients(th, p, branch, fp);
        for (std::size_t e = 0; e < c.size(); ++e) {
            if (c[e] == 0) continue;
            i64 one_unit = powmod(1 + p, e, pn);
            return MuWitness{n, branch, static_cast<i64>(e), (one_unit - 1) / p, c[e]};
        }
    }
    return std::nullopt;
}

}  // namespace mtk
