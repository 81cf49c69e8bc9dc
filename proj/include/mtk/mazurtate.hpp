#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mtk/eigenform.hpp"
#include "mtk/groupring.hpp"

namespace mtk {

// theta_{Q(zeta_M), r} = sum over units a of [a/M]_{f,r} sigma_a.
struct ThetaElement {
    std::string form;
    int r = 1;
    IntGroupRing element;

    i64 modulus() const { return element.modulus(); }
};

ThetaElement theta(const NormalizedEigenSymbol& nes, i64 modulus, int r, int jobs = 1);

// Memoized theta elements of one symbol and twist, keyed by modulus.
class ThetaTable {
public:
    ThetaTable(const NormalizedEigenSymbol& nes, int r, int jobs = 1);

    const NormalizedEigenSymbol& symbol() const { return *nes_; }
    int r() const { return r_; }
    const IntGroupRing& get(i64 modulus);

private:
    const NormalizedEigenSymbol* nes_;
    int r_;
    int jobs_;
    PeriodEvaluator eval_;
    std::mutex mutex_;
    std::map<i64, std::unique_ptr<IntGroupRing>> cache_;
};

struct NormRelationReport {
    i64 m = 0;
    i64 ell = 0;
    int r = 1;
    IntGroupRing lhs{1};
    IntGroupRing rhs{1};
    bool equal = false;
};

// pi_{m ell, m}(theta_{m ell}) against the Hecke-side expression.
NormRelationReport verify_norm_relation(ThetaTable& table, i64 m, i64 ell);
NormRelationReport verify_norm_relation(const NormalizedEigenSymbol& nes, i64 m, i64 ell, int r);

struct IwasawaBranchPoly {
    i64 p;
    int level;  // theta over Q(zeta_{p^level})
    int branch;
    TruncPoly poly;
};

IwasawaBranchPoly theta_branch(const NormalizedEigenSymbol& nes, i64 p, int n, int branch, const ModRing& ring,
                               int r = 1);

// The ordinary p-stabilization at level n: the element over Q(zeta_{p^(n+1)})
// and its trace to the n-th layer of the cyclotomic Z_p-extension.
struct StabilizedTheta {
    i64 p;
    int level;
    i64 alpha;
    ModGroupRing full;
    TruncPoly traced;
};

StabilizedTheta stabilized_theta(const NormalizedEigenSymbol& nes, i64 p, int n, const ModRing& ring, int r = 1);

struct IwasawaReading {
    bool mu_zero = false;
    std::optional<i64> lambda;
    bool stable = true;
    std::vector<std::optional<i64>> valuations;
};

// Reads mu = 0 and lambda from consecutive levels (lowest first).
IwasawaReading iwasawa_invariants(const std::vector<TruncPoly>& levels);

// Which sign of Pollack's decomposition governs even levels.
enum class ParityMap { EvenMinus, EvenPlus };

int pollack_sign(int n, ParityMap map);
// Degree of the complementary product of cyclotomic factors for the sign.
i64 pollack_degree(i64 p, int n, int sign);

struct PollackLevel {
    int n = 0;
    int sign = 0;
    i64 q = 0;
    std::optional<i64> valuation;
    std::optional<i64> lambda_candidate;
    bool divisibility_ok = true;
};

struct PollackReport {
    i64 p = 0;
    ParityMap map = ParityMap::EvenMinus;
    std::vector<PollackLevel> levels;
    // lambda_candidate is constant within each parity class where defined
    bool parity_stable = true;
};

PollackReport pollack_check(const NormalizedEigenSymbol& nes, i64 p, int n_min, int n_max,
                            ParityMap map = ParityMap::EvenMinus);

// nu_{j,n}(theta_{p^j, r}) for j = 0..n, all over (Z/p^n)^x.
std::vector<IntGroupRing> mt_ideal_generators(const NormalizedEigenSymbol& nes, i64 p, int n,
                                              std::optional<int> r = std::nullopt);

// A level n, branch i and tower exponent e at which the branch coefficient
// sum_t [omega(t)(1+p)^e / p^n] omega^i(t) is nonzero mod p.
struct MuWitness {
    int n = 0;
    int branch = 0;
    i64 exponent = 0;
    i64 b = 0;  // (1+p)^e = 1 + b p mod p^n
    i64 value = 0;
};

std::optional<MuWitness> mu_witness(const NormalizedEigenSymbol& nes, i64 p, int branch, int n_max, int r = 1);

}  // namespace mtk
