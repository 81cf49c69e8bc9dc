#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "mtk/arith.hpp"

namespace mtk {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using QMat = Mat<Rational>;
using QVec = Vec<Rational>;
using QRowVec = RowVec<Rational>;

// Size of a rational used to pick pivots: total bits of numerator and denominator.
inline std::size_t height(const Rational& x)
{
    if (x == 0) return 0;
    return msb(abs(boost::multiprecision::numerator(x))) + msb(boost::multiprecision::denominator(x)) + 2;
}
inline std::size_t height(const BigInt& x) { return x == 0 ? 0 : msb(abs(x)) + 1; }

// In-place reduced row echelon form over a field.  Pivots are chosen per
// column as the smallest-height nonzero entry.  Returns pivot columns.
template <class Scalar>
std::vector<Eigen::Index> rref(Mat<Scalar>& a)
{
    std::vector<Eigen::Index> pivots;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
        Eigen::Index best = -1;
        std::size_t best_h = 0;
        for (Eigen::Index i = row; i < a.rows(); ++i) {
            if (a(i, col) == 0) continue;
            std::size_t h = height(a(i, col));
            if (best < 0 || h < best_h) {
                best = i;
                best_h = h;
            }
        }
        if (best < 0) continue;
        a.row(best).swap(a.row(row));
        Scalar inv = Scalar(1) / a(row, col);
        for (Eigen::Index j = col; j < a.cols(); ++j)
            if (a(row, j) != 0) a(row, j) *= inv;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i == row || a(i, col) == 0) continue;
            Scalar f = a(i, col);
            for (Eigen::Index j = col; j < a.cols(); ++j)
                if (a(row, j) != 0) a(i, j) -= f * a(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

template <class Scalar>
Eigen::Index rank(Mat<Scalar> a)
{
    return static_cast<Eigen::Index>(rref(a).size());
}

// Right kernel: columns form a basis of {v : a v = 0}, one column per free
// variable with a 1 in that position.
template <class Scalar>
Mat<Scalar> kernel(const Mat<Scalar>& a)
{
    Mat<Scalar> r = a;
    auto pivots = rref(r);
    std::vector<char> is_pivot(static_cast<std::size_t>(a.cols()), 0);
    for (auto c : pivots) is_pivot[c] = 1;
    Eigen::Index nfree = a.cols() - static_cast<Eigen::Index>(pivots.size());
    Mat<Scalar> k = Mat<Scalar>::Zero(a.cols(), nfree);
    Eigen::Index f = 0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        if (is_pivot[c]) continue;
        k(c, f) = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) k(pivots[i], f) = -r(static_cast<Eigen::Index>(i), c);
        ++f;
    }
    return k;
}

// Left kernel: rows form a basis of {w : w a = 0}.
template <class Scalar>
Mat<Scalar> left_kernel(const Mat<Scalar>& a)
{
    return kernel<Scalar>(a.transpose()).transpose();
}

// Scales each row of a rational matrix to a primitive integral row.
inline QMat normalize_rows(const QMat& a)
{
    QMat out = a;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        std::vector<Rational> row(a.cols());
        bool nonzero = false;
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            row[j] = a(i, j);
            nonzero = nonzero || row[j] != 0;
        }
        if (!nonzero) continue;
        auto n = content_normalize(row);
        for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = Rational(n.values[j]);
    }
    return out;
}

// Rows of `basis` span a subspace; returns the matrix of the operator
// v -> v * op expressed in that basis (so that basis * op = result * basis).
template <class Scalar>
Mat<Scalar> restrict_right(const Mat<Scalar>& basis, const Mat<Scalar>& op)
{
    Mat<Scalar> image = basis * op;
    // solve X * basis = image via rref on [basis^T | image^T]
    Eigen::Index d = basis.rows();
    Mat<Scalar> aug(basis.cols(), d + image.rows());
    aug.leftCols(d) = basis.transpose();
    aug.rightCols(image.rows()) = image.transpose();
    auto piv = rref(aug);
    if (static_cast<Eigen::Index>(piv.size()) != d || (d > 0 && piv[d - 1] != d - 1))
        throw Error(ErrorCode::InvariantViolation, "subspace is not stable under the operator");
    return aug.block(0, d, d, image.rows()).transpose();
}

template <class Scalar>
Mat<Scalar> inverse(const Mat<Scalar>& a)
{
    Eigen::Index n = a.rows();
    Mat<Scalar> aug(n, 2 * n);
    aug.leftCols(n) = a;
    aug.rightCols(n) = Mat<Scalar>::Identity(n, n);
    auto piv = rref(aug);
    if (static_cast<Eigen::Index>(piv.size()) < n || piv[n - 1] != n - 1)
        throw Error(ErrorCode::InvalidArgument, "matrix is singular");
    return aug.rightCols(n);
}

// Characteristic polynomial det(x I - a), coefficients low degree first,
// by reduction to upper Hessenberg form and the standard recurrence.
template <class Scalar>
std::vector<Scalar> charpoly(Mat<Scalar> h)
{
    Eigen::Index n = h.rows();
    for (Eigen::Index m = 1; m + 1 < n; ++m) {
        Eigen::Index i = m;
        while (i < n && h(i, m - 1) == 0) ++i;
        if (i == n) continue;
        if (i != m) {
            h.row(i).swap(h.row(m));
            h.col(i).swap(h.col(m));
        }
        Scalar t = h(m, m - 1);
        for (Eigen::Index r = m + 1; r < n; ++r) {
            if (h(r, m - 1) == 0) continue;
            Scalar u = h(r, m - 1) / t;
            h.row(r) -= u * h.row(m);
            h.col(m) += u * h.col(r);
        }
    }
    std::vector<std::vector<Scalar>> p(static_cast<std::size_t>(n) + 1);
    p[0] = {Scalar(1)};
    for (Eigen::Index m = 1; m <= n; ++m) {
        std::vector<Scalar> next(static_cast<std::size_t>(m) + 1, Scalar(0));
        const auto& prev = p[m - 1];
        for (std::size_t j = 0; j < prev.size(); ++j) {
            next[j + 1] += prev[j];
            next[j] -= h(m - 1, m - 1) * prev[j];
        }
        Scalar t = 1;
        for (Eigen::Index i = 1; i < m; ++i) {
            t *= h(m - i, m - i - 1);
            Scalar f = t * h(m - i - 1, m - 1);
            const auto& q = p[m - i - 1];
            for (std::size_t j = 0; j < q.size(); ++j) next[j] -= f * q[j];
        }
        p[m] = std::move(next);
    }
    return p[n];
}

// Polynomials over a field, coefficients low degree first, no trailing zeros.
template <class Scalar>
void poly_trim(std::vector<Scalar>& f)
{
    while (!f.empty() && f.back() == 0) f.pop_back();
}

template <class Scalar>
std::vector<Scalar> poly_gcd(std::vector<Scalar> a, std::vector<Scalar> b)
{
    poly_trim(a);
    poly_trim(b);
    while (!b.empty()) {
        std::vector<Scalar> r = a;
        while (r.size() >= b.size() && !r.empty()) {
            Scalar q = r.back() / b.back();
            std::size_t shift = r.size() - b.size();
            for (std::size_t j = 0; j < b.size(); ++j) r[shift + j] -= q * b[j];
            r.pop_back();
            poly_trim(r);
        }
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Scalar lead = a.back();
        for (auto& c : a) c /= lead;
    }
    return a;
}

template <class Scalar>
Mat<Scalar> poly_eval(const std::vector<Scalar>& f, const Mat<Scalar>& a)
{
    Mat<Scalar> acc = Mat<Scalar>::Zero(a.rows(), a.cols());
    for (std::size_t j = f.size(); j-- > 0;) {
        acc = (acc * a).eval();
        for (Eigen::Index i = 0; i < a.rows(); ++i) acc(i, i) += f[j];
    }
    return acc;
}

// Sparse row reduction used for the relation quotient.  Rows are maps from
// column to nonzero coefficient; the echelon is kept fully reduced so each
// pivot column appears in exactly one row.
class SparseEchelon {
public:
    using Row = std::map<int, Rational>;

    explicit SparseEchelon(int ncols) : ncols_(ncols), pivot_row_(static_cast<std::size_t>(ncols), -1) {}

    void add_relation(Row row);
    int ncols() const { return ncols_; }
    bool is_pivot(int col) const { return pivot_row_[col] >= 0; }
    // Coefficients of column `col` expressed in the free columns.
    Row express(int col) const;
    std::vector<int> free_columns() const;

private:
    void reduce(Row& row) const;

    int ncols_;
    std::vector<Row> rows_;
    std::vector<int> pivot_row_;
};

}  // namespace mtk
