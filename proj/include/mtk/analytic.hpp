#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "mtk/eigenform.hpp"

namespace mtk {

// Floating-point oracle, kept apart from the exact engine.  All arithmetic is
// done in 50-digit software floats.
using Real = boost::multiprecision::cpp_bin_float_50;

struct FloatContext {
    int digits = 40;         // target accuracy, at least 30 and at most 45
    i64 max_terms = 200000;  // series cutoff; exceeding it is an error
};

// Omega^+ of the model: the least positive real period of dx/(2y + a1 x + a3),
// doubled when the real locus has two components.
Real real_period(const CurveModel& e, const FloatContext& ctx = {});

struct LSeriesValue {
    Real value;        // L(E, 1)
    int epsilon = 0;   // root number
    Real epsilon_raw;  // the solved sign before rounding
    Real error_bound;
    i64 terms = 0;
};

// L(E, 1) and the sign of the functional equation for a curve of conductor N,
// with Dirichlet coefficients from point counts.
LSeriesValue lvalue_rank0(const CurveModel& e, i64 conductor, const FloatContext& ctx = {});

}  // namespace mtk
