#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "mtk/arith.hpp"
#include "mtk/linalg.hpp"

namespace mtk {

struct Mat2 {
    i64 a, b, c, d;

    i64 det() const { return a * d - b * c; }
    Mat2 operator*(const Mat2& o) const
    {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

// A cusp u/v in lowest terms with v >= 0; infinity is 1/0.
struct Cusp {
    i64 num;
    i64 den;

    static Cusp infinity() { return {1, 0}; }
    static Cusp make(i64 num, i64 den);
    bool operator==(const Cusp& o) const { return num == o.num && den == o.den; }
};

// Homogeneous polynomials of degree w in X, Y stored by coefficient of X^i Y^(w-i).
template <class Scalar>
std::vector<Scalar> linear_form_power(i64 a, i64 b, int e)
{
    // (aX + bY)^e
    std::vector<Scalar> out(static_cast<std::size_t>(e) + 1, Scalar(0));
    out[0] = 1;
    for (int t = 0; t < e; ++t)
        for (int j = t + 1; j >= 0; --j) {
            Scalar v = Scalar(b) * out[j];
            if (j > 0) v += Scalar(a) * out[j - 1];
            out[j] = v;
        }
    return out;
}

template <class Scalar>
std::vector<Scalar> poly_mul(const std::vector<Scalar>& f, const std::vector<Scalar>& g)
{
    std::vector<Scalar> out(f.size() + g.size() - 1, Scalar(0));
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0) continue;
        for (std::size_t j = 0; j < g.size(); ++j) out[i + j] += f[i] * g[j];
    }
    return out;
}

// P(aX + bY, cX + dY)
template <class Scalar>
std::vector<Scalar> right_act(const std::vector<Scalar>& p, const Mat2& g)
{
    int w = static_cast<int>(p.size()) - 1;
    std::vector<std::vector<Scalar>> lx(w + 1), ly(w + 1);
    for (int e = 0; e <= w; ++e) {
        lx[e] = linear_form_power<Scalar>(g.a, g.b, e);
        ly[e] = linear_form_power<Scalar>(g.c, g.d, e);
    }
    std::vector<Scalar> out(static_cast<std::size_t>(w) + 1, Scalar(0));
    for (int i = 0; i <= w; ++i) {
        if (p[i] == 0) continue;
        auto term = poly_mul(lx[i], ly[w - i]);
        for (int j = 0; j <= w; ++j) out[j] += p[i] * term[j];
    }
    return out;
}

// Left action (gP)(X, Y) = P(dX - bY, -cX + aY).
template <class Scalar>
std::vector<Scalar> left_act(const std::vector<Scalar>& p, const Mat2& g)
{
    return right_act(p, Mat2{g.d, -g.b, -g.c, g.a});
}

// Unimodular decomposition {inf -> u/v} = sum_j g_j {0 -> inf} through the
// continued-fraction convergents of u/v; calls f(g_j) for each segment.
template <class F>
void for_each_segment(i64 u, i64 v, F&& f)
{
    if (v < 0) {
        u = -u;
        v = -v;
    }
    if (v == 0) return;
    i64 g = gcd(u, v);
    u /= g;
    v /= g;
    i64 p2 = 0, q2 = 1, p1 = 1, q1 = 0;
    i64 x = u, y = v;
    int sign = -1;  // (-1)^(j-1) at j = 0
    for (;;) {
        i64 a = x / y;
        if ((x % y != 0) && ((x < 0) != (y < 0))) --a;
        i64 p = a * p1 + p2;
        i64 q = a * q1 + q2;
        f(Mat2{sign * p, p1, sign * q, q1});
        i64 r = x - a * y;
        p2 = p1;
        q2 = q1;
        p1 = p;
        q1 = q;
        sign = -sign;
        x = y;
        y = r;
        if (y == 0) break;
    }
}

class P1List {
public:
    explicit P1List(i64 level);

    i64 level() const { return n_; }
    int size() const { return static_cast<int>(points_.size()); }
    // Index of the point (c : d), or -1 when gcd(c, d, N) != 1.
    int index(i64 c, i64 d) const { return table_[mod(c, n_) * n_ + mod(d, n_)]; }
    std::pair<i64, i64> point(int idx) const { return points_[idx]; }
    Mat2 lift(int idx) const;

private:
    i64 n_;
    std::vector<int> table_;
    std::vector<std::pair<i64, i64>> points_;
};

struct SpaceLimits {
    i64 max_level_times_weight = 60000;
};

using SparseRow = std::vector<std::pair<int, Rational>>;

// Modular symbols for Gamma_0(N) of weight k over Q, presented by Manin
// symbols [X^i Y^(k-2-i), (c : d)] modulo the two- and three-term relations.
// Operator matrices act on column coordinate vectors in the quotient basis.
class ManinSymbolSpace {
public:
    ManinSymbolSpace(i64 level, int weight, SpaceLimits limits = {});

    i64 level() const { return level_; }
    int weight() const { return weight_; }
    const P1List& p1() const { return p1_; }
    int num_generators() const { return p1_.size() * (weight_ - 1); }
    int generator(int pt, int i) const { return pt * (weight_ - 1) + i; }
    int dimension() const { return static_cast<int>(basis_.size()); }
    const std::vector<int>& basis_generators() const { return basis_; }

    const SparseRow& generator_coords(int g) const { return coords_[g]; }
    QVec symbol_coords(const std::vector<Rational>& p, i64 c, i64 d) const;
    // Coordinates of P{alpha -> beta}.
    QVec path_coords(const std::vector<Rational>& p, const Cusp& alpha, const Cusp& beta) const;

    const QMat& hecke(i64 n) const;
    const QMat& star() const;
    const std::vector<Cusp>& cusps() const { return cusps_; }
    const QMat& boundary() const { return boundary_; }
    const QMat& cuspidal_basis() const { return cuspidal_; }
    int cuspidal_dimension() const { return static_cast<int>(cuspidal_.cols()); }
    QMat restrict_to_cuspidal(const QMat& op) const;
    const QMat& cuspidal_projector() const;
    // Coordinates of the cuspidal component in the cuspidal basis (dc x dim).
    const QMat& cuspidal_coordinates() const;

    // Index of the Gamma_0(N)-class of c among cusps(), or -1.
    int cusp_class(const Cusp& c) const;

private:
    int register_cusp(const Cusp& c);
    void add_symbol(QVec& acc, const std::vector<Rational>& p, i64 c, i64 d, const Rational& scale) const;
    QMat heilbronn_hecke(i64 n) const;
    QMat compute_hecke(i64 n) const;
    void build_projector() const;

    i64 level_;
    int weight_;
    P1List p1_;
    std::vector<int> basis_;
    std::vector<int> basis_index_;
    std::vector<SparseRow> coords_;
    std::vector<Cusp> cusps_;
    QMat boundary_;
    QMat cuspidal_;

    mutable std::mutex cache_mutex_;
    mutable std::map<i64, std::unique_ptr<QMat>> hecke_cache_;
    mutable std::unique_ptr<QMat> star_;
    mutable std::unique_ptr<QMat> projector_;
    mutable std::unique_ptr<QMat> cusp_coords_;
};

std::shared_ptr<const ManinSymbolSpace> build_space(i64 level, int weight, SpaceLimits limits = {});

std::vector<Mat2> heilbronn_merel(i64 n);

// Matrix of T_n on the cuspidal subspace (cuspidal basis coordinates).
QMat hecke_matrix(const ManinSymbolSpace& space, i64 n);
QMat star_involution(const ManinSymbolSpace& space);

// A linear functional on the quotient, given by its values on the basis.
struct SymbolVector {
    std::shared_ptr<const ManinSymbolSpace> space;
    QRowVec coords;

    Rational value(const QVec& symbol) const { return (coords * symbol)(0, 0); }
    Rational on_generator(int g) const;
};

SymbolVector cuspidal_eigen_symbol(std::shared_ptr<const ManinSymbolSpace> space,
                                   const std::map<i64, i64>& eigenvalues, int sign);

// Values of v on X^i Y^(k-2-i){alpha -> beta}, indexed by i.
std::vector<Rational> evaluate_path(const SymbolVector& v, const Cusp& alpha, const Cusp& beta);

}  // namespace mtk
