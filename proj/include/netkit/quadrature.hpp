#pragma once
#include <cmath>
#include <stdexcept>

// Adaptive Simpson quadrature. The integrands in this project are bounded but
// can have square-root behaviour in their derivatives at interval ends (the
// integrable 1/r singularity of the surface-of-revolution kernels), so the
// recursion carries a depth cap and accepts the Richardson-corrected value.

namespace netkit {

namespace detail {
template <class F>
double simpson(F&& f, double a, double fa, double b, double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adapt(F&& f, double a, double fa, double b, double fb, double m, double fm,
             double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left  = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
} // namespace detail

// absolute-tolerance adaptive Simpson on [a,b] (a <= b)
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10, int max_depth = 48) {
    if (!(b >= a)) throw std::invalid_argument("adaptive_simpson: b < a");
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
        throw std::domain_error("adaptive_simpson: non-finite integrand sample");
    const double whole = detail::simpson(f, a, fa, b, fb, m, fm);
    return detail::adapt(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

} // namespace netkit
