#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace bergman {

namespace detail {

inline double magnitude(double v) { return std::fabs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T, class F>
T simpson_step(F& f, double a, double b, T whole, T fa, T fm, T fb, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const T flm = f(0.5 * (a + m));
    const T frm = f(0.5 * (m + b));
    const double h = b - a;
    const T left = (h / 12.0) * (fa + 4.0 * flm + fm);
    const T right = (h / 12.0) * (fm + 4.0 * frm + fb);
    const T delta = left + right - whole;
    if (depth <= 0 || magnitude(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step<T>(f, a, m, left, fa, flm, fm, 0.5 * tol, depth - 1) +
           simpson_step<T>(f, m, b, right, fm, frm, fb, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson on [a,b] with absolute tolerance tol.
template <class T, class F>
T adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 48)
{
    if (!(b > a)) return T{};
    const double m = 0.5 * (a + b);
    const T fa = f(a);
    const T fm = f(m);
    const T fb = f(b);
    const T whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
    return detail::simpson_step<T>(f, a, b, whole, fa, fm, fb, tol, max_depth);
}

// Break points 0, 1/2, 3/4, ..., 1 - 2^-levels, 1 clipped to [a,b].
std::vector<double> graded_breaks(double a, double b, int levels = 44);

// Adaptive Simpson over graded panels; tol is split evenly between panels.
template <class T, class F>
T graded_simpson(F&& f, double a, double b, double tol)
{
    const std::vector<double> br = graded_breaks(a, b);
    if (br.size() < 2) return T{};
    const double panel_tol = tol / static_cast<double>(br.size() - 1);
    T total{};
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        total += adaptive_simpson<T>(f, br[i], br[i + 1], panel_tol);
    }
    return total;
}

} // namespace bergman
