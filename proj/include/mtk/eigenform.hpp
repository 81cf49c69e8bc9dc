#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "mtk/modsym.hpp"

namespace mtk {

// Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with a
// user-supplied conductor.
struct CurveModel {
    std::array<i64, 5> a{};  // a1, a2, a3, a4, a6
    i64 conductor = 0;

    BigInt b2() const;
    BigInt b4() const;
    BigInt b6() const;
    BigInt b8() const;
    BigInt discriminant() const;
    std::string label() const;
};

// #E(F_ell) including the point at infinity (and the singular point, if any).
i64 count_points(const CurveModel& e, i64 ell);
// a_ell from point counting; for bad ell this is ell - #E_ns(F_ell).
i64 curve_ap(const CurveModel& e, i64 ell);

struct SymbolEigenform {
    i64 level = 1;
    int weight = 2;
    i64 bound = 100;
    std::map<i64, i64> pins;  // ell -> a_ell; empty means "the unique form"
};

using NewformSource = std::variant<CurveModel, SymbolEigenform>;

std::string source_id(const NewformSource& src);

// The +/- eigen-symbols scaled so that their values on all Manin generators
// are coprime integers with first nonzero value positive.
class NormalizedEigenSymbol {
public:
    NormalizedEigenSymbol(const SymbolVector& plus, const SymbolVector& minus);

    std::shared_ptr<const ManinSymbolSpace> space() const { return space_; }
    i64 level() const { return space_->level(); }
    int weight() const { return space_->weight(); }

    // index 0 is the + part, index 1 the - part
    static int slot(int sign) { return sign > 0 ? 0 : 1; }
    const std::vector<BigInt>& generator_values(int sign) const { return values_[slot(sign)]; }
    const Rational& scalar(int sign) const { return scalars_[slot(sign)]; }
    const QRowVec& functional(int sign) const { return functionals_[slot(sign)]; }

    // Normalized value of the signed functional on an arbitrary symbol P{alpha -> beta}.
    Rational evaluate(int sign, const std::vector<Rational>& p, const Cusp& alpha, const Cusp& beta) const;

    i64 hecke_eigenvalue(i64 ell) const;
    std::string fingerprint() const;
    // Same data with every value of each sign multiplied by an integer factor;
    // used to exercise covariance of downstream invariants.
    NormalizedEigenSymbol rescaled(const BigInt& plus_factor, const BigInt& minus_factor) const;
    bool operator==(const NormalizedEigenSymbol& o) const;

private:
    struct EigenvalueCache {
        std::mutex mutex;
        std::map<i64, i64> values;
    };

    std::shared_ptr<const ManinSymbolSpace> space_;
    std::array<std::vector<BigInt>, 2> values_;
    std::array<Rational, 2> scalars_;
    std::array<QRowVec, 2> functionals_;
    std::shared_ptr<EigenvalueCache> eig_ = std::make_shared<EigenvalueCache>();
};

NormalizedEigenSymbol optimal_normalize(std::shared_ptr<const ManinSymbolSpace> space,
                                        const std::map<i64, i64>& eigenvalues);

// +1 or -1 when the Fricke involution acts on the symbols by a consistent
// scalar, otherwise nullopt.
std::optional<int> fricke_sign(const NormalizedEigenSymbol& nes);

// Fast evaluation of [a/m]^{+-}_{f,r}.  Holds machine-word tables when the
// normalized values fit, and tables reduced modulo `modulus` when one is
// given.  The symbol must outlive the evaluator.
class PeriodEvaluator {
public:
    PeriodEvaluator(const NormalizedEigenSymbol& nes, int r, std::optional<i64> modulus = std::nullopt);

    int r() const { return r_; }
    const NormalizedEigenSymbol& symbol() const { return *nes_; }
    // [a/m]^{sign}; sign 0 gives the unsigned [a/m] = [a/m]^+ + [a/m]^-.
    BigInt value(i64 a, i64 m, int sign = 0) const;
    // value() reduced modulo the evaluator's modulus.
    i64 value_mod(i64 a, i64 m, int sign = 0) const;
    std::optional<i64> modulus() const { return modulus_; }
    // phi^{+-}(x_a) without the factor 2 and sign matching: the normalized
    // lambda(f, P; a, m) for P = sum_t poly[t] z^t.
    Rational lambda(const std::vector<BigInt>& poly, i64 a, i64 m) const;

private:
    // which functional slot feeds [a/m]^{sign}
    int slot_for(int sign) const;
    template <class Acc>
    void accumulate(i64 a, i64 m, Acc&& acc) const;

    const NormalizedEigenSymbol* nes_;
    int r_;
    int w_;
    std::optional<i64> modulus_;
    bool small_ = false;
    std::array<std::vector<i64>, 2> small_values_;
    std::array<std::vector<i64>, 2> mod_values_;
};

// Cached scalar interface keyed by (a mod m, m, r, sign).
class PeriodCache {
public:
    explicit PeriodCache(const NormalizedEigenSymbol& nes) : nes_(&nes) {}
    BigInt get(int r, i64 a, i64 m, int sign);
    std::size_t size() const;

private:
    const NormalizedEigenSymbol* nes_;
    mutable std::mutex mutex_;
    std::map<int, std::unique_ptr<PeriodEvaluator>> evaluators_;
    std::map<std::tuple<i64, i64, int, int>, BigInt> values_;
};

BigInt period_integral(const NormalizedEigenSymbol& nes, int r, i64 a, i64 m, int sign);
Rational period_lambda(const NormalizedEigenSymbol& nes, const std::vector<BigInt>& poly, i64 a, i64 m);

struct ResolveOptions {
    i64 eigen_bound = 100;
    int spot_checks = 3;
    SpaceLimits limits;
};

// A newform with its source, resolved eigen-symbols, and eigenvalue supply.
class Newform {
public:
    static std::shared_ptr<const Newform> resolve(const NewformSource& src, const ResolveOptions& opts = {});

    const NewformSource& source() const { return source_; }
    const NormalizedEigenSymbol& symbol() const { return *nes_; }
    i64 level() const { return nes_->level(); }
    int weight() const { return nes_->weight(); }
    std::string id() const { return source_id(source_); }
    i64 eigenvalue(i64 ell) const;
    const std::map<i64, i64>& pinned() const { return pinned_; }

private:
    NewformSource source_;
    std::unique_ptr<NormalizedEigenSymbol> nes_;
    std::map<i64, i64> pinned_;
};

i64 eigenvalue(const NewformSource& src, i64 ell);

}  // namespace mtk
