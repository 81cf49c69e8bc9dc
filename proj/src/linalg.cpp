#include "mtk/linalg.hpp"

namespace mtk {

void SparseEchelon::reduce(Row& row) const
{
    Row out;
    for (auto& [col, coeff] : row) {
        if (coeff == 0) continue;
        int r = pivot_row_[col];
        if (r < 0) {
            out[col] += coeff;
            continue;
        }
        // pivot col = -sum_{f != col} rows_[r][f] * x_f
        for (auto& [f, c] : rows_[r]) {
            if (f == col) continue;
            out[f] -= coeff * c;
        }
    }
    row.clear();
    for (auto& [col, coeff] : out)
        if (coeff != 0) row.emplace(col, coeff);
}

void SparseEchelon::add_relation(Row row)
{
    reduce(row);
    if (row.empty()) return;
    int pivot = -1;
    std::size_t best = 0;
    for (auto& [col, coeff] : row) {
        std::size_t h = height(coeff);
        if (pivot < 0 || h < best) {
            pivot = col;
            best = h;
        }
    }
    Rational inv = Rational(1) / row[pivot];
    for (auto& [col, coeff] : row) coeff *= inv;
    // eliminate the new pivot from existing rows
    for (Row& other : rows_) {
        auto it = other.find(pivot);
        if (it == other.end()) continue;
        Rational f = it->second;
        other.erase(it);
        for (auto& [col, coeff] : row) {
            if (col == pivot) continue;
            Rational& dst = other[col];
            dst -= f * coeff;
            if (dst == 0) other.erase(col);
        }
    }
    pivot_row_[pivot] = static_cast<int>(rows_.size());
    rows_.push_back(std::move(row));
}

SparseEchelon::Row SparseEchelon::express(int col) const
{
    Row r;
    r.emplace(col, Rational(1));
    reduce(r);
    return r;
}

std::vector<int> SparseEchelon::free_columns() const
{
    std::vector<int> out;
    for (int c = 0; c < ncols_; ++c)
        if (pivot_row_[c] < 0) out.push_back(c);
    return out;
}

}  // namespace mtk
