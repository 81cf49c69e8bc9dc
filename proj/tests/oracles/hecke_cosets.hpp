#pragma once

// Hecke operator T_ell (ell prime, ell not dividing N) computed by acting
// with the coset representatives [[1, j], [0, ell]] and [[ell, 0], [0, 1]]
// on each basis symbol written as a path, then re-expressing the resulting
// paths through continued fractions.  Shares no code with the Heilbronn route
// apart from the path decomposition itself.

#include "mtk/modsym.hpp"

namespace oracle {

inline mtk::QMat hecke_by_cosets(const mtk::ManinSymbolSpace& space, mtk::i64 ell)
{
    using namespace mtk;
    const int w = space.weight() - 2;
    const int dim = space.dimension();
    std::vector<Mat2> reps;
    for (i64 j = 0; j < ell; ++j) reps.push_back({1, j, 0, ell});
    reps.push_back({ell, 0, 0, 1});
    QMat t = QMat::Zero(dim, dim);
    for (int col = 0; col < dim; ++col) {
        int g = space.basis_generators()[col];
        int pt = g / (w + 1);
        int i = g % (w + 1);
        std::vector<Rational> p(w + 1, Rational(0));
        p[i] = 1;
        Mat2 lift = space.p1().lift(pt);
        for (const Mat2& delta : reps) {
            Mat2 m = delta * lift;
            Cusp from = Cusp::make(m.b, m.d);  // image of 0
            Cusp to = Cusp::make(m.a, m.c);    // image of infinity
            t.col(col) += space.path_coords(left_act(p, m), from, to);
        }
    }
    return t;
}

}  // namespace oracle
