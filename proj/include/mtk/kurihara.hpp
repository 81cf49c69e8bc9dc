#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mtk/eigenform.hpp"
#include "mtk/groupring.hpp"

namespace mtk {

// A prime l with l not dividing Np, l = 1 mod p and a_l = l + 1 mod p.
struct KolyvaginPrime {
    i64 ell = 0;
    i64 eta = 0;
    int index = 0;  // v_p(l - 1)
    bool log_cached = false;

    PrimeRecord record() const { return {ell, eta}; }
};

// Qualifying primes up to bound, ascending.  Primitive roots default to the
// least one and may be overridden per prime.
std::vector<KolyvaginPrime> kolyvagin_primes(const Newform& form, i64 p, i64 bound,
                                             const std::map<i64, i64>& eta_overrides = {});
// Same, reading a_l from a caller-supplied table or function.
std::vector<KolyvaginPrime> kolyvagin_primes(const std::function<i64(i64)>& a_of, i64 level, i64 p, i64 bound,
                                             const std::map<i64, i64>& eta_overrides = {});

struct KuriharaCertificate {
    std::string form;
    std::string fingerprint;
    i64 p = 0;
    int r = 1;
    int branch = 0;
    i64 m = 1;
    std::vector<PrimeRecord> factors;
    i64 value = 0;
    std::optional<i64> euler_factor;  // branch 0 only
    std::string attestation;
    std::optional<std::uint64_t> seed;
};

// The mod-p Kurihara number for the square-free product of `factors`.
// Branch 0 sums over (Z/m)^x; branch i > 0 sums over (Z/mp)^x with the
// character a -> (a mod p)^i.  The symbol overloads read a_l from Hecke
// operators on the symbol; the Newform overloads use the form's own source.
KuriharaCertificate kurihara_number(const NormalizedEigenSymbol& nes, i64 p, int r,
                                    const std::vector<PrimeRecord>& factors, int branch, int jobs = 1);
KuriharaCertificate kurihara_number(const Newform& form, i64 p, int r, const std::vector<PrimeRecord>& factors,
                                    int branch, int jobs = 1);

// Recomputes the certificate's value; throws InvariantViolation when the
// symbol's fingerprint differs from the recorded one.
i64 replay(const KuriharaCertificate& cert, const NormalizedEigenSymbol& nes, int jobs = 1);

// prod over l of sum_{i=1}^{l-2} i sigma_{eta_l}^i, as an element over m.
IntGroupRing derivative_operator(const std::vector<PrimeRecord>& factors);

struct LeadingCoeffReport {
    bool lower_terms_vanish = true;
    i64 top_coeff = 0;
    i64 delta = 0;
    bool matches_delta = false;
};

LeadingCoeffReport leading_coeff_check(const NormalizedEigenSymbol& nes, i64 p, int r,
                                       const std::vector<PrimeRecord>& factors, int branch, int jobs = 1);
LeadingCoeffReport leading_coeff_check(const Newform& form, i64 p, int r, const std::vector<PrimeRecord>& factors,
                                       int branch, int jobs = 1);

struct SearchStrategy {
    int max_factors = 2;
    i64 prime_bound = 1000;
    i64 budget = 50;              // number of Kurihara numbers evaluated
    i64 max_modulus = 20'000'000; // larger sums are skipped and counted
    int jobs = 1;
};

struct ExhaustionReport {
    i64 p = 0;
    int r = 1;
    int branch = 0;
    std::vector<i64> tried;  // every m evaluated, all with zero value
    i64 skipped = 0;
    bool budget_exhausted = false;
};

using SearchResult = std::variant<KuriharaCertificate, ExhaustionReport>;

SearchResult search_delta(const Newform& form, i64 p, int r, int branch, const SearchStrategy& strategy);
// Enumerates products of the given primes instead of listing them afresh.
SearchResult search_delta(const Newform& form, i64 p, int r, int branch, const SearchStrategy& strategy,
                          const std::vector<KolyvaginPrime>& primes);

}  // namespace mtk
