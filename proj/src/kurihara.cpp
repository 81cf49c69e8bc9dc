#include "mtk/kurihara.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <mutex>

#include "mtk/parallel.hpp"

namespace mtk {

namespace {

using LogTable = std::vector<std::int32_t>;

// Discrete logarithms base eta modulo ell, indexed by residue; slot 0 unused.
std::shared_ptr<const LogTable> log_table(i64 ell, i64 eta, bool build = true)
{
    static std::mutex guard;
    static std::map<std::pair<i64, i64>, std::shared_ptr<const LogTable>> cache;
    {
        std::lock_guard lock(guard);
        if (auto it = cache.find({ell, eta}); it != cache.end()) return it->second;
    }
    if (!build) return nullptr;
    auto table = std::make_shared<LogTable>(static_cast<std::size_t>(ell), -1);
    i64 v = 1;
    for (i64 e = 0; e < ell - 1; ++e) {
        (*table)[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(e);
        v = mulmod(v, eta, ell);
    }
    std::lock_guard lock(guard);
    auto& slot = cache[{ell, eta}];
    if (!slot) slot = std::move(table);
    return slot;
}

bool is_kolyvagin(i64 ell, i64 a_ell, i64 p, i64 level)
{
    return ell != p && level % ell != 0 && mod(ell, p) == 1 && mod(a_ell - ell - 1, p) == 0;
}

void require_good_odd_prime(const NormalizedEigenSymbol& nes, i64 p)
{
    if (p < 3 || !is_prime(p)) throw Error(ErrorCode::BadPrime, "p must be an odd prime");
    if (nes.level() % p == 0) throw Error(ErrorCode::BadPrime, "p divides the level");
}

using EigenvalueSource = std::function<BigInt(i64)>;

EigenvalueSource from_symbol(const NormalizedEigenSymbol& nes)
{
    return [&nes](i64 ell) { return nes.hecke_eigenvalue(ell); };
}

EigenvalueSource from_form(const Newform& form)
{
    return [&form](i64 ell) { return BigInt(form.eigenvalue(ell)); };
}

// Checks the factor list and returns m.
i64 validate(const NormalizedEigenSymbol& nes, const EigenvalueSource& a_of, i64 p,
             const std::vector<PrimeRecord>& factors, int branch)
{
    require_good_odd_prime(nes, p);
    if (branch < 0 || branch > p - 2) throw Error(ErrorCode::InvalidArgument, "branch outside [0, p-2]");
    i64 m = 1;
    for (const auto& f : factors) {
        if (f.ell < 2 || !is_prime(f.ell) || m % f.ell == 0)
            throw Error(ErrorCode::NotSquareFree, "factors must be distinct primes");
        const i64 a_ell = mod_big(a_of(f.ell), p);
        if (!is_kolyvagin(f.ell, a_ell, p, nes.level()))
            throw Error(ErrorCode::NotKolyvagin, std::to_string(f.ell) + " is not a Kolyvagin prime for p=" +
                                                     std::to_string(p));
        if (!is_primitive_root(f.eta, f.ell))
            throw Error(ErrorCode::NotPrimitiveRoot,
                        std::to_string(f.eta) + " is not a primitive root mod " + std::to_string(f.ell));
        if (m > (i64{1} << 40) / f.ell) throw Error(ErrorCode::ResourceLimit, "m too large");
        m *= f.ell;
    }
    return m;
}

i64 euler_factor_mod_p(const NormalizedEigenSymbol& nes, i64 p, int r)
{
    const int k = nes.weight();
    const i64 a_p = mod_big(nes.hecke_eigenvalue(p), p);
    // p^r (1 - a_p p^-r + p^(k-1-2r)) = p^r - a_p + p^(k-1-r)
    return mod(powmod(p, static_cast<u64>(r), p) - a_p + powmod(p, static_cast<u64>(k - 1 - r), p), p);
}

i64 delta_value(const NormalizedEigenSymbol& nes, i64 p, int r, const std::vector<PrimeRecord>& factors, i64 m,
                int branch, int jobs)
{
    std::vector<std::shared_ptr<const LogTable>> logs;
    for (const auto& f : factors) logs.push_back(log_table(f.ell, f.eta));
    const PeriodEvaluator ev(nes, r, p);
    const i64 top = branch == 0 ? m : m * p;

    const std::size_t chunks = static_cast<std::size_t>(std::max(jobs, 1)) * 8;
    std::vector<i64> partial(chunks, 0);
    parallel_for(chunks, jobs, [&](std::size_t c) {
        const i64 lo = top * static_cast<i64>(c) / static_cast<i64>(chunks);
        const i64 hi = top * static_cast<i64>(c + 1) / static_cast<i64>(chunks);
        i64 acc = 0;
        for (i64 a = lo; a < hi; ++a) {
            i64 weight = 1;
            if (branch != 0) {
                const i64 t = a % p;
                if (t == 0) continue;
                weight = powmod(t, static_cast<u64>(branch), p);
            }
            for (std::size_t j = 0; j < factors.size() && weight != 0; ++j) {
                const i64 res = a % factors[j].ell;
                if (res == 0) {
                    weight = 0;
                    break;
                }
                weight = mulmod(weight, (*logs[j])[static_cast<std::size_t>(res)] % p, p);
            }
            if (weight == 0) continue;
            acc = mod(acc + mulmod(weight, ev.value_mod(a, top, 0), p), p);
        }
        partial[c] = acc;
    });
    i64 total = 0;
    for (i64 v : partial) total = mod(total + v, p);
    return total;
}

}  // namespace

std::vector<KolyvaginPrime> kolyvagin_primes(const Newform& form, i64 p, i64 bound,
                                             const std::map<i64, i64>& eta_overrides)
{
    return kolyvagin_primes([&form](i64 ell) { return form.eigenvalue(ell); }, form.level(), p, bound, eta_overrides);
}

std::vector<KolyvaginPrime> kolyvagin_primes(const std::function<i64(i64)>& a_of, i64 level, i64 p, i64 bound,
                                             const std::map<i64, i64>& eta_overrides)
{
    if (p < 3 || !is_prime(p)) throw Error(ErrorCode::BadPrime, "p must be an odd prime");
    if (level % p == 0) throw Error(ErrorCode::BadPrime, "p divides the level");
    std::vector<KolyvaginPrime> out;
    if (bound < p + 1) return out;
    for (i64 ell = p + 1; ell <= bound; ell += p) {
        if (!is_prime(ell) || level % ell == 0) continue;
        if (!is_kolyvagin(ell, a_of(ell), p, level)) continue;
        KolyvaginPrime kp;
        kp.ell = ell;
        auto it = eta_overrides.find(ell);
        kp.eta = it != eta_overrides.end() ? it->second : primitive_root(ell);
        if (!is_primitive_root(kp.eta, ell))
            throw Error(ErrorCode::NotPrimitiveRoot,
                        std::to_string(kp.eta) + " is not a primitive root mod " + std::to_string(ell));
        for (i64 t = ell - 1; t % p == 0; t /= p) ++kp.index;
        kp.log_cached = log_table(ell, kp.eta, false) != nullptr;
        out.push_back(kp);
    }
    return out;
}

namespace {

KuriharaCertificate certify(const NormalizedEigenSymbol& nes, const EigenvalueSource& a_of, i64 p, int r,
                            const std::vector<PrimeRecord>& factors, int branch, int jobs)
{
    const i64 m = validate(nes, a_of, p, factors, branch);
    KuriharaCertificate cert;
    cert.fingerprint = nes.fingerprint();
    cert.p = p;
    cert.r = r;
    cert.branch = branch;
    cert.m = m;
    cert.factors = factors;
    cert.value = delta_value(nes, p, r, factors, m, branch, jobs);
    if (branch == 0) cert.euler_factor = euler_factor_mod_p(nes, p, r);
    return cert;
}

LeadingCoeffReport expansion_check(const NormalizedEigenSymbol& nes, const EigenvalueSource& a_of, i64 p, int r,
                                   const std::vector<PrimeRecord>& factors, int branch, int jobs)
{
    const i64 m = validate(nes, a_of, p, factors, branch);
    const i64 top = branch == 0 ? m : m * p;
    const PeriodEvaluator ev(nes, r, p);
    ModGroupRing th(top, p);
    const auto& units = th.group().units();
    std::vector<i64> values(units.size());
    parallel_for(units.size(), jobs, [&](std::size_t j) { values[j] = ev.value_mod(units[j], top, 0); });
    for (std::size_t j = 0; j < units.size(); ++j) th.add_to(units[j], values[j]);
    const ModGroupRing x = branch == 0 ? th : teichmuller_component(th, branch, p);

    const auto expanded = kolyvagin_expand(x, factors);
    LeadingCoeffReport rep;
    for (std::size_t s = 0; s + 1 < expanded.dimension(); ++s)
        if (expanded.coeff(s) != 0) rep.lower_terms_vanish = false;
    rep.top_coeff = expanded.top();
    rep.delta = delta_value(nes, p, r, factors, m, branch, jobs);
    rep.matches_delta = rep.top_coeff == rep.delta;
    return rep;
}

}  // namespace

KuriharaCertificate kurihara_number(const NormalizedEigenSymbol& nes, i64 p, int r,
                                    const std::vector<PrimeRecord>& factors, int branch, int jobs)
{
    return certify(nes, from_symbol(nes), p, r, factors, branch, jobs);
}

KuriharaCertificate kurihara_number(const Newform& form, i64 p, int r, const std::vector<PrimeRecord>& factors,
                                    int branch, int jobs)
{
    auto cert = certify(form.symbol(), from_form(form), p, r, factors, branch, jobs);
    cert.form = form.id();
    return cert;
}

i64 replay(const KuriharaCertificate& cert, const NormalizedEigenSymbol& nes, int jobs)
{
    if (cert.fingerprint != nes.fingerprint())
        throw Error(ErrorCode::InvariantViolation, "certificate was issued for a different symbol");
    const i64 m = validate(nes, from_symbol(nes), cert.p, cert.factors, cert.branch);
    if (m != cert.m) throw Error(ErrorCode::InvariantViolation, "recorded m does not match its factors");
    return delta_value(nes, cert.p, cert.r, cert.factors, m, cert.branch, jobs);
}

IntGroupRing derivative_operator(const std::vector<PrimeRecord>& factors)
{
    i64 m = 1;
    for (const auto& f : factors) {
        if (f.ell < 2 || !is_prime(f.ell) || m % f.ell == 0)
            throw Error(ErrorCode::NotSquareFree, "factors must be distinct primes");
        if (!is_primitive_root(f.eta, f.ell))
            throw Error(ErrorCode::NotPrimitiveRoot,
                        std::to_string(f.eta) + " is not a primitive root mod " + std::to_string(f.ell));
        m *= f.ell;
    }
    // The coefficient of sigma_a is the product of the logarithms of a.
    IntGroupRing out(m);
    std::vector<std::shared_ptr<const LogTable>> logs;
    for (const auto& f : factors) logs.push_back(log_table(f.ell, f.eta));
    for (i64 a : out.group().units()) {
        BigInt c = 1;
        for (std::size_t j = 0; j < factors.size(); ++j)
            c *= (*logs[j])[static_cast<std::size_t>(a % factors[j].ell)];
        out.add_to(a, c);
    }
    return out;
}

LeadingCoeffReport leading_coeff_check(const NormalizedEigenSymbol& nes, i64 p, int r,
                                       const std::vector<PrimeRecord>& factors, int branch, int jobs)
{
    return expansion_check(nes, from_symbol(nes), p, r, factors, branch, jobs);
}

LeadingCoeffReport leading_coeff_check(const Newform& form, i64 p, int r, const std::vector<PrimeRecord>& factors,
                                       int branch, int jobs)
{
    return expansion_check(form.symbol(), from_form(form), p, r, factors, branch, jobs);
}

SearchResult search_delta(const Newform& form, i64 p, int r, int branch, const SearchStrategy& strategy)
{
    require_good_odd_prime(form.symbol(), p);
    return search_delta(form, p, r, branch, strategy, kolyvagin_primes(form, p, strategy.prime_bound));
}

SearchResult search_delta(const Newform& form, i64 p, int r, int branch, const SearchStrategy& strategy,
                          const std::vector<KolyvaginPrime>& primes)
{
    const auto& nes = form.symbol();
    require_good_odd_prime(nes, p);
    ExhaustionReport report;
    report.p = p;
    report.r = r;
    report.branch = branch;
    if (strategy.budget <= 0) {
        report.budget_exhausted = true;
        return report;
    }
    const int n = static_cast<int>(primes.size());
    const i64 twist = branch == 0 ? 1 : p;

    for (int size = 0; size <= std::min(strategy.max_factors, n); ++size) {
        // lexicographic combinations of `size` indices
        std::vector<int> pick(static_cast<std::size_t>(size));
        for (int j = 0; j < size; ++j) pick[j] = j;
        while (true) {
            std::vector<PrimeRecord> factors;
            i64 modulus = twist;
            bool too_big = false;
            for (int j : pick) {
                factors.push_back(primes[j].record());
                if (modulus > strategy.max_modulus / primes[j].ell) too_big = true;
                modulus *= primes[j].ell;
            }
            if (too_big || modulus > strategy.max_modulus) {
                ++report.skipped;
            } else {
                if (static_cast<i64>(report.tried.size()) >= strategy.budget) {
                    report.budget_exhausted = true;
                    return report;
                }
                auto cert = kurihara_number(form, p, r, factors, branch, strategy.jobs);
                if (cert.value != 0) return cert;
                report.tried.push_back(cert.m);
            }
            int j = size - 1;
            while (j >= 0 && pick[j] == n - size + j) --j;
            if (j < 0) break;
            ++pick[j];
            for (int t = j + 1; t < size; ++t) pick[t] = pick[t - 1] + 1;
        }
    }
    return report;
}

}  // namespace mtk
