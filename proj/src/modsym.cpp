#include "mtk/modsym.hpp"

#include <algorithm>

namespace mtk {

Cusp Cusp::make(i64 num, i64 den)
{
    if (den == 0) {
        if (num == 0) throw Error(ErrorCode::InvalidArgument, "0/0 is not a cusp");
        return infinity();
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    i64 g = gcd(num, den);
    return {num / g, den / g};
}

// ---------------------------------------------------------------------------

P1List::P1List(i64 level) : n_(level)
{
    if (level < 1) throw Error(ErrorCode::InvalidArgument, "level must be >= 1");
    table_.assign(static_cast<std::size_t>(n_ * n_), -1);
    std::vector<i64> units;
    for (i64 u = 1; u <= n_; ++u)
        if (gcd(u, n_) == 1) units.push_back(u % n_);
    for (i64 c = 0; c < n_; ++c) {
        for (i64 d = 0; d < n_; ++d) {
            if (table_[c * n_ + d] >= 0) continue;
            if (gcd(gcd(c, d), n_) != 1) continue;
            int idx = static_cast<int>(points_.size());
            points_.emplace_back(c, d);
            for (i64 u : units) table_[mulmod(u, c, n_) * n_ + mulmod(u, d, n_)] = idx;
        }
    }
}

Mat2 P1List::lift(int idx) const
{
    auto [c, d] = points_[idx];
    if (n_ == 1) return {1, 0, 0, 1};
    if (c == 0) c = n_;
    while (gcd(c, d) != 1) d += n_;
    // a d - b c = 1
    i64 g0 = c, g1 = d, x0 = 1, x1 = 0, y0 = 0, y1 = 1;
    while (g1) {
        i64 q = g0 / g1;
        std::tie(g0, g1) = std::make_pair(g1, g0 - q * g1);
        std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
        std::tie(y0, y1) = std::make_pair(y1, y0 - q * y1);
    }
    // x0 c + y0 d = 1, so a = y0, b = -x0
    return {y0, -x0, c, d};
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Rational> monomial(int w, int i)
{
    std::vector<Rational> p(static_cast<std::size_t>(w) + 1, Rational(0));
    p[i] = 1;
    return p;
}

// Cusp equivalence for Gamma_0(N): p1/q1 ~ p2/q2 iff s1 q2 = s2 q1 mod gcd(q1 q2, N)
// where p_j s_j = 1 mod q_j.
bool cusps_equivalent(const Cusp& x, const Cusp& y, i64 n)
{
    auto inv_num = [](const Cusp& z) -> i64 {
        if (z.den == 0) return 1;
        if (z.den == 1) return 0;
        return invmod(z.num, z.den);
    };
    i64 s1 = inv_num(x), s2 = inv_num(y);
    i64 m = gcd(x.den * y.den, n);
    __int128 lhs = static_cast<__int128>(s1) * y.den - static_cast<__int128>(s2) * x.den;
    return lhs % m == 0;
}

i64 checked_level(i64 level, int weight, const SpaceLimits& limits)
{
    if (level < 1 || weight < 2) throw Error(ErrorCode::InvalidArgument, "need level >= 1 and weight >= 2");
    if (level * weight > limits.max_level_times_weight)
        throw Error(ErrorCode::ResourceLimit, "level * weight exceeds the configured limit");
    return level;
}

}  // namespace

ManinSymbolSpace::ManinSymbolSpace(i64 level, int weight, SpaceLimits limits)
    : level_(level), weight_(weight), p1_(checked_level(level, weight, limits))
{
    const int w = weight_ - 2;
    const int ngen = num_generators();
    SparseEchelon ech(ngen);

    auto add_poly = [&](SparseEchelon::Row& row, const std::vector<Rational>& p, i64 c, i64 d, int sgn) {
        int pt = p1_.index(c, d);
        for (int t = 0; t <= w; ++t) {
            if (p[t] == 0) continue;
            Rational& dst = row[generator(pt, t)];
            if (sgn > 0)
                dst += p[t];
            else
                dst -= p[t];
        }
    };

    const Mat2 sigma{0, -1, 1, 0};
    const Mat2 tau{0, -1, 1, -1};
    const Mat2 tau2 = tau * tau;
    for (int pt = 0; pt < p1_.size(); ++pt) {
        auto [c, d] = p1_.point(pt);
        for (int i = 0; i <= w; ++i) {
            auto p = monomial(w, i);
            SparseEchelon::Row two;
            add_poly(two, p, c, d, 1);
            add_poly(two, right_act(p, sigma), d, -c, 1);
            ech.add_relation(std::move(two));

            SparseEchelon::Row three;
            add_poly(three, p, c, d, 1);
            add_poly(three, right_act(p, tau), d, -c - d, 1);
            add_poly(three, right_act(p, tau2), -c - d, c, 1);
            ech.add_relation(std::move(three));

            if (w % 2 == 1) {
                SparseEchelon::Row odd;
                add_poly(odd, p, c, d, 1);
                add_poly(odd, right_act(p, Mat2{-1, 0, 0, -1}), -c, -d, 1);
                ech.add_relation(std::move(odd));
            }
        }
    }

    basis_ = ech.free_columns();
    basis_index_.assign(static_cast<std::size_t>(ngen), -1);
    for (std::size_t j = 0; j < basis_.size(); ++j) basis_index_[basis_[j]] = static_cast<int>(j);
    coords_.resize(static_cast<std::size_t>(ngen));
    for (int g = 0; g < ngen; ++g) {
        for (auto& [col, coeff] : ech.express(g)) coords_[g].emplace_back(basis_index_[col], coeff);
    }

    // boundary map on the basis
    const int dim = dimension();
    std::vector<std::vector<std::pair<int, Rational>>> columns(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
        int g = basis_[j];
        int pt = g / (weight_ - 1);
        int i = g % (weight_ - 1);
        Mat2 m = p1_.lift(pt);
        if (i == w) columns[j].emplace_back(register_cusp(Cusp::make(m.a, m.c)), Rational(1));
        if (i == 0) columns[j].emplace_back(register_cusp(Cusp::make(m.b, m.d)), Rational(-1));
    }
    if (weight_ % 2 == 1) cusps_.clear();
    boundary_ = QMat::Zero(static_cast<Eigen::Index>(cusps_.size()), dim);
    if (weight_ % 2 == 0)
        for (int j = 0; j < dim; ++j)
            for (auto& [r, v] : columns[j]) boundary_(r, j) += v;
    cuspidal_ = kernel<Rational>(boundary_);
}

int ManinSymbolSpace::cusp_class(const Cusp& c) const
{
    for (std::size_t r = 0; r < cusps_.size(); ++r)
        if (cusps_equivalent(cusps_[r], c, level_)) return static_cast<int>(r);
    return -1;
}

int ManinSymbolSpace::register_cusp(const Cusp& c)
{
    int r = cusp_class(c);
    if (r >= 0) return r;
    cusps_.push_back(c);
    return static_cast<int>(cusps_.size()) - 1;
}

void ManinSymbolSpace::add_symbol(QVec& acc, const std::vector<Rational>& p, i64 c, i64 d,
                                  const Rational& scale) const
{
    int pt = p1_.index(c, d);
    if (pt < 0) return;
    for (std::size_t t = 0; t < p.size(); ++t) {
        if (p[t] == 0) continue;
        Rational f = scale * p[t];
        for (auto& [j, v] : coords_[generator(pt, static_cast<int>(t))]) acc(j) += f * v;
    }
}

QVec ManinSymbolSpace::symbol_coords(const std::vector<Rational>& p, i64 c, i64 d) const
{
    if (static_cast<int>(p.size()) != weight_ - 1)
        throw Error(ErrorCode::DegreeTooLarge, "polynomial degree does not match the weight");
    QVec acc = QVec::Zero(dimension());
    add_symbol(acc, p, c, d, Rational(1));
    return acc;
}

QVec ManinSymbolSpace::path_coords(const std::vector<Rational>& p, const Cusp& alpha, const Cusp& beta) const
{
    if (static_cast<int>(p.size()) != weight_ - 1)
        throw Error(ErrorCode::DegreeTooLarge, "polynomial degree does not match the weight");
    QVec acc = QVec::Zero(dimension());
    auto from_infinity = [&](const Cusp& x, const Rational& scale) {
        for_each_segment(x.num, x.den, [&](const Mat2& g) { add_symbol(acc, right_act(p, g), g.c, g.d, scale); });
    };
    from_infinity(beta, Rational(1));
    from_infinity(alpha, Rational(-1));
    return acc;
}

std::vector<Mat2> heilbronn_merel(i64 n)
{
    std::vector<Mat2> out;
    for (i64 a = 1; a <= n; ++a) {
        for (i64 d = 1; d <= n; ++d) {
            i64 t = a * d - n;
            if (t < 0) continue;
            if (t == 0) {
                for (i64 c = 0; c < d; ++c) out.push_back({a, 0, c, d});
                for (i64 b = 1; b < a; ++b) out.push_back({a, b, 0, d});
                continue;
            }
            for (i64 b = 1; b < a && b <= t; ++b) {
                if (t % b) continue;
                i64 c = t / b;
                if (c < d) out.push_back({a, b, c, d});
            }
        }
    }
    return out;
}

QMat ManinSymbolSpace::heilbronn_hecke(i64 n) const
{
    const int dim = dimension();
    const int w = weight_ - 2;
    auto hs = heilbronn_merel(n);
    QMat t = QMat::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
        int g = basis_[j];
        auto [c, d] = p1_.point(g / (weight_ - 1));
        int i = g % (weight_ - 1);
        auto p = monomial(w, i);
        QVec acc = QVec::Zero(dim);
        for (const Mat2& h : hs) {
            i64 c2 = c * h.a + d * h.c;
            i64 d2 = c * h.b + d * h.d;
            if (p1_.index(c2, d2) < 0) continue;
            if (w == 0)
                add_symbol(acc, p, c2, d2, Rational(1));
            else
                add_symbol(acc, right_act(p, h), c2, d2, Rational(1));
        }
        t.col(j) = acc;
    }
    return t;
}

QMat ManinSymbolSpace::compute_hecke(i64 n) const
{
    const int dim = dimension();
    QMat result = QMat::Identity(dim, dim);
    for (auto [ell, e] : factorize(n)) {
        const QMat& t1 = hecke(ell);
        QMat prev = QMat::Identity(dim, dim);
        QMat cur = t1;
        Rational power = 1;
        for (int i = 0; i < weight_ - 1; ++i) power *= ell;
        for (int j = 2; j <= e; ++j) {
            QMat next = t1 * cur;
            if (level_ % ell != 0) next -= power * prev;
            prev = std::move(cur);
            cur = std::move(next);
        }
        result = (result * cur).eval();
    }
    return result;
}

const QMat& ManinSymbolSpace::hecke(i64 n) const
{
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "Hecke index must be >= 1");
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = hecke_cache_.find(n);
        if (it != hecke_cache_.end()) return *it->second;
    }
    QMat t;
    if (n == 1)
        t = QMat::Identity(dimension(), dimension());
    else if (is_prime(n))
        t = heilbronn_hecke(n);
    else
        t = compute_hecke(n);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto& slot = hecke_cache_[n];
    if (!slot) slot = std::make_unique<QMat>(std::move(t));
    return *slot;
}

const QMat& ManinSymbolSpace::star() const
{
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (star_) return *star_;
    const int dim = dimension();
    const int w = weight_ - 2;
    QMat s = QMat::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
        int g = basis_[j];
        auto [c, d] = p1_.point(g / (weight_ - 1));
        int i = g % (weight_ - 1);
        int pt = p1_.index(-c, d);
        Rational sign = ((w - i) % 2 == 0) ? 1 : -1;
        for (auto& [r, v] : coords_[generator(pt, i)]) s(r, j) += sign * v;
    }
    star_ = std::make_unique<QMat>(std::move(s));
    return *star_;
}

QMat ManinSymbolSpace::restrict_to_cuspidal(const QMat& op) const
{
    if (cuspidal_.cols() == 0) return QMat(0, 0);
    QMat bt = cuspidal_.transpose();
    QMat opt = op.transpose();
    return restrict_right<Rational>(bt, opt).transpose();
}

namespace {

std::vector<Rational> poly_divide_exact(std::vector<Rational> num, const std::vector<Rational>& den)
{
    poly_trim(num);
    std::vector<Rational> q(num.size() >= den.size() ? num.size() - den.size() + 1 : 1, Rational(0));
    while (num.size() >= den.size() && !num.empty()) {
        Rational c = num.back() / den.back();
        std::size_t shift = num.size() - den.size();
        q[shift] = c;
        for (std::size_t j = 0; j < den.size(); ++j) num[shift + j] -= c * den[j];
        num.pop_back();
        poly_trim(num);
    }
    if (!num.empty()) throw Error(ErrorCode::InvariantViolation, "characteristic polynomial division failed");
    return q;
}

}  // namespace

void ManinSymbolSpace::build_projector() const
{
    const int dim = dimension();
    const int dc = cuspidal_dimension();
    if (dc == dim || dc == 0) {
        QMat full = QMat::Identity(dim, dim);
        projector_ = std::make_unique<QMat>(dc == 0 ? QMat(QMat::Zero(dim, dim)) : full);
        cusp_coords_ = std::make_unique<QMat>(dc == 0 ? QMat(0, dim) : full);
        return;
    }
    for (i64 ell : primes_up_to(200)) {
        if (level_ % ell == 0) continue;
        const QMat& t = hecke(ell);
        auto chi_full = charpoly<Rational>(t);
        auto chi_cusp = charpoly<Rational>(restrict_to_cuspidal(t));
        auto h = poly_divide_exact(chi_full, chi_cusp);
        if (poly_gcd(h, chi_cusp).size() != 1) continue;
        QMat eis = kernel<Rational>(poly_eval(h, t));
        if (eis.cols() != dim - dc) continue;
        QMat b(dim, dim);
        b.leftCols(dc) = cuspidal_;
        b.rightCols(dim - dc) = eis;
        QMat binv = inverse<Rational>(b);
        cusp_coords_ = std::make_unique<QMat>(binv.topRows(dc));
        projector_ = std::make_unique<QMat>(cuspidal_ * (*cusp_coords_));
        return;
    }
    throw Error(ErrorCode::InvariantViolation, "no Hecke operator separates cuspidal and Eisenstein parts");
}

const QMat& ManinSymbolSpace::cuspidal_projector() const
{
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        if (projector_) return *projector_;
    }
    build_projector();
    return *projector_;
}

const QMat& ManinSymbolSpace::cuspidal_coordinates() const
{
    cuspidal_projector();
    return *cusp_coords_;
}

std::shared_ptr<const ManinSymbolSpace> build_space(i64 level, int weight, SpaceLimits limits)
{
    return std::make_shared<const ManinSymbolSpace>(level, weight, limits);
}

QMat hecke_matrix(const ManinSymbolSpace& space, i64 n) { return space.restrict_to_cuspidal(space.hecke(n)); }

QMat star_involution(const ManinSymbolSpace& space) { return space.restrict_to_cuspidal(space.star()); }

// ---------------------------------------------------------------------------

Rational SymbolVector::on_generator(int g) const
{
    Rational v = 0;
    for (auto& [j, c] : space->generator_coords(g)) v += coords(j) * c;
    return v;
}

SymbolVector cuspidal_eigen_symbol(std::shared_ptr<const ManinSymbolSpace> space,
                                   const std::map<i64, i64>& eigenvalues, int sign)
{
    const int dc = space->cuspidal_dimension();
    if (dc == 0) throw Error(ErrorCode::AmbiguousEigensystem, "cuspidal subspace is zero");
    if (sign != 1 && sign != -1) throw Error(ErrorCode::InvalidArgument, "sign must be +1 or -1");
    std::vector<QMat> blocks;
    QMat id = QMat::Identity(dc, dc);
    blocks.push_back(star_involution(*space) - Rational(sign) * id);
    for (auto [ell, a] : eigenvalues) {
        if (space->level() % ell == 0) continue;
        blocks.push_back(hecke_matrix(*space, ell) - Rational(a) * id);
    }
    QMat stacked(dc, dc * static_cast<Eigen::Index>(blocks.size()));
    for (std::size_t b = 0; b < blocks.size(); ++b) stacked.middleCols(static_cast<Eigen::Index>(b) * dc, dc) = blocks[b];
    QMat u = left_kernel<Rational>(stacked);
    if (u.rows() != 1)
        throw Error(ErrorCode::AmbiguousEigensystem,
                    "joint eigenspace has dimension " + std::to_string(u.rows()));
    u = normalize_rows(u);
    QRowVec w = u * space->cuspidal_coordinates();
    return {std::move(space), std::move(w)};
}

std::vector<Rational> evaluate_path(const SymbolVector& v, const Cusp& alpha, const Cusp& beta)
{
    const int w = v.space->weight() - 2;
    std::vector<Rational> out(static_cast<std::size_t>(w) + 1);
    for (int i = 0; i <= w; ++i) out[i] = v.value(v.space->path_coords(monomial(w, i), alpha, beta));
    return out;
}

}  // namespace mtk
