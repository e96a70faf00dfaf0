#pragma once

#include <cmath>
#include <utility>

namespace netcrit::detail {

struct LineMinimum {
    double x = 0.0;
    double fx = 0.0;
};

/// Golden-section search for a unimodal function on [lo, hi]; stops when the
/// bracket is narrower than `tol` or after `max_iter` reductions.
template <typename F>
LineMinimum golden_minimize(F&& f, double lo, double hi, double tol, int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    LineMinimum best = fc <= fd ? LineMinimum{c, fc} : LineMinimum{d, fd};
    // endpoints win for monotone functions
    const double fa = f(lo);
    const double fb = f(hi);
    if (fa < best.fx) best = {lo, fa};
    if (fb < best.fx) best = {hi, fb};
    return best;
}

}  // namespace netcrit::detail
