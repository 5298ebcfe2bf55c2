#include "bergman/disk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

double frac(double x) { return x - std::floor(x); }

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t mod_pow2(std::int64_t m, int level)
{
    const std::int64_t n = std::int64_t{1} << level;
    m %= n;
    return m < 0 ? m + n : m;
}

} // namespace

double unit_angle(cplx z)
{
    double t = std::arg(z) / (2.0 * std::numbers::pi);
    if (t < 0.0) t += 1.0;
    return t >= 1.0 ? 0.0 : t;
}

bool Arc::contains(double t) const
{
    if (length >= 1.0) return true;
    return frac(t - start) < length;
}

double DyadicInterval::start() const
{
    return frac((static_cast<double>(index) + 0.5 * beta2) * length());
}

bool DyadicInterval::contains_angle(double t) const
{
    return level == 0 || arc_index(t, beta2, level) == index;
}

bool DyadicInterval::contains_arc(const Arc& a) const
{
    if (level == 0) return true;
    if (a.length > length()) return false;
    return frac(a.start - start()) + a.length <= length();
}

DyadicInterval DyadicInterval::from_flat(int beta2, std::int64_t flat)
{
    int level = 0;
    while ((std::int64_t{2} << level) - 1 <= flat) ++level;
    return {beta2, level, flat - ((std::int64_t{1} << level) - 1)};
}

std::int64_t arc_index(double t, int beta2, int level)
{
    if (level == 0) return 0;
    const double x = std::ldexp(t, level) - 0.5 * beta2;
    return mod_pow2(static_cast<std::int64_t>(std::floor(x)), level);
}

bool PolarRectangle::contains(cplx z) const
{
    const double r = std::abs(z);
    if (r >= 1.0 - h_inner) return false;
    if (h < 1.0 && r < 1.0 - h) return false;
    return arc.contains(unit_angle(z));
}

PolarRectangle carleson_square(const DyadicInterval& I) { return carleson_square(I.arc()); }

PolarRectangle carleson_square(const Arc& a) { return {a, std::min(1.0, a.length), 0.0}; }

PolarRectangle top_half(const DyadicInterval& I)
{
    const double len = I.length();
    return {I.arc(), std::min(1.0, len), 0.5 * len};
}

std::array<PolarRectangle, 4> cz_children(const PolarRectangle& q)
{
    require(q.arc.length > 0.0 && q.h > q.h_inner, ErrorKind::InvalidArgument, "degenerate rectangle");
    const double half = 0.5 * q.arc.length;
    const Arc a1{q.arc.start, half};
    const Arc a2{frac(q.arc.start + half), half};
    const double mid = 0.5 * (q.h + q.h_inner);
    return {{{a1, mid, q.h_inner}, {a2, mid, q.h_inner}, {a1, q.h, mid}, {a2, q.h, mid}}};
}

DyadicInterval containing_dyadic(const Arc& a)
{
    require(a.length > 0.0, ErrorKind::InvalidArgument, "arc must have positive length");
    require(a.length <= 0.25, ErrorKind::ArcTooLong, "arc longer than 1/4");
    int top = 0;
    while (top < 60 && std::ldexp(1.0, -(top + 1)) >= a.length) ++top;
    for (int level = top; level >= 1; --level) {
        for (int beta2 : {0, 1}) {
            const double t = frac(a.start);
            const DyadicInterval K{beta2, level, arc_index(t, beta2, level)};
            if (K.contains_arc(a)) return K;
        }
    }
    return {0, 0, 0};
}

DyadicInterval minimal_common_square(cplx z, cplx zeta, int beta2)
{
    if (z == 0.0 || zeta == 0.0) return {beta2, 0, 0};
    const double h = std::max(1.0 - std::abs(z), 1.0 - std::abs(zeta));
    require(h > 0.0, ErrorKind::InvalidArgument, "points must lie in the open disk");
    int top = 0;
    while (top < 52 && std::ldexp(1.0, -(top + 1)) >= h) ++top;
    const double tz = unit_angle(z), tw = unit_angle(zeta);
    for (int level = top; level >= 1; --level) {
        const std::int64_t m = arc_index(tz, beta2, level);
        if (m == arc_index(tw, beta2, level)) return {beta2, level, m};
    }
    return {beta2, 0, 0};
}

DiskQuadrature::DiskQuadrature(const RadialMeasure& omega, int J, int j0, double tol)
    : omega_(omega), J_(J), j0_(j0)
{
    require(J >= 1 && J <= 12, ErrorKind::InvalidArgument, "quadrature depth J must be in [1,12]");
    require(j0 >= 0, ErrorKind::InvalidArgument, "j0 must be >= 0");
    require(J + j0 + 1 <= 20, ErrorKind::BudgetExceeded, "quadrature exceeds 2^20 cells");

    const std::size_t total = std::size_t{1} << (J + j0 + 1);
    cells_.reserve(total);
    band_offset_.push_back(0);
    for (int band = 0; band <= J; ++band) {
        const double lo = band == 0 ? 0.0 : 1.0 - std::ldexp(1.0, -band);
        const double hi = 1.0 - std::ldexp(1.0, -band - 1);
        const int n = band == 0 ? j0 + 1 : band + j0;
        const double bm = omega_.integrate([](double r) { return r; }, lo, hi, tol);
        band_moment_.push_back(bm);
        const double width = std::ldexp(1.0, -n);
        const double rmid = 0.5 * (lo + hi);
        const std::int64_t count = std::int64_t{1} << n;
        for (std::int64_t k = 0; k < count; ++k) {
            Cell c;
            c.band = band;
            c.k = k;
            c.angular_exp = n;
            c.r_lo = lo;
            c.r_hi = hi;
            c.theta_lo = static_cast<double>(k) * width;
            c.node_r = rmid;
            c.node_theta = (static_cast<double>(k) + 0.5) * width;
            c.node = std::polar(rmid, 2.0 * std::numbers::pi * c.node_theta);
            c.mass = 2.0 * width * bm;
            cells_.push_back(c);
        }
        band_offset_.push_back(cells_.size());
    }
    masses_.reserve(cells_.size());
    nodes_.reserve(cells_.size());
    for (const Cell& c : cells_) {
        masses_.push_back(c.mass);
        nodes_.push_back(c.node);
    }
}

double DiskQuadrature::total_mass() const
{
    double s = 0.0;
    for (double m : masses_) s += m;
    return s;
}

std::int64_t DiskQuadrature::square_index(std::size_t cell, int beta2, int level) const
{
    if (level == 0) return 0;
    const Cell& c = cells_[cell];
    if (c.band < level) return -1;
    const std::int64_t num =
        (2 * c.k + 1) * (std::int64_t{1} << level) - beta2 * (std::int64_t{1} << c.angular_exp);
    return mod_pow2(floor_div(num, std::int64_t{2} << c.angular_exp), level);
}

bool DiskQuadrature::in_square(std::size_t cell, const DyadicInterval& I) const
{
    return square_index(cell, I.beta2, I.level) == I.index;
}

std::vector<double> DiskQuadrature::square_sums(std::span<const double> w, int beta2, int L) const
{
    require(w.size() == cells_.size(), ErrorKind::QuadratureMismatch, "per-cell array size mismatch");
    std::vector<double> out(static_cast<std::size_t>(square_count(L)), 0.0);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const int top = std::min(L, cells_[i].band);
        for (int level = 0; level <= top; ++level) {
            const std::int64_t m = square_index(i, beta2, level);
            out[static_cast<std::size_t>((std::int64_t{1} << level) - 1 + m)] += w[i];
        }
    }
    return out;
}

std::vector<std::size_t> DiskQuadrature::cells_in(const PolarRectangle& q) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (q.contains(nodes_[i])) out.push_back(i);
    }
    return out;
}

QuadPtr build_quadrature(const RadialMeasure& omega, int J, int j0, double tol)
{
    return std::make_shared<const DiskQuadrature>(omega, J, j0, tol);
}

Field make_field(const QuadPtr& q, const std::function<double(cplx)>& f)
{
    Field out{q, {}};
    out.values.reserve(q->size());
    for (const cplx& z : q->nodes()) out.values.push_back(f(z));
    return out;
}

ComplexField make_complex_field(const QuadPtr& q, const std::function<cplx(cplx)>& f)
{
    ComplexField out{q, {}};
    out.values.reserve(q->size());
    for (const cplx& z : q->nodes()) out.values.push_back(f(z));
    return out;
}

void require_same(const QuadPtr& a, const QuadPtr& b)
{
    require(a && a == b, ErrorKind::QuadratureMismatch, "fields live on different quadratures");
}

double lp_norm(const DiskQuadrature& q, std::span<const double> f, double p, std::span<const double> w)
{
    require(f.size() == q.size() && (w.empty() || w.size() == q.size()), ErrorKind::QuadratureMismatch,
            "per-cell array size mismatch");
    const auto& m = q.masses();
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        s += std::pow(std::fabs(f[i]), p) * wi * m[i];
    }
    return std::pow(s, 1.0 / p);
}

std::vector<std::size_t> disc_family(const DiskQuadrature& q, cplx a, double r)
{
    require(r > 0.0, ErrorKind::InvalidArgument, "disc radius must be positive");
    std::vector<std::size_t> out;
    const auto& nodes = q.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (std::abs(nodes[i] - a) < r) out.push_back(i);
    }
    return out;
}

} // namespace bergman
