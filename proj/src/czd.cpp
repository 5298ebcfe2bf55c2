#include "bergman/czd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bergman/errors.hpp"
#include "bergman/operators.hpp"
#include "bergman/weights.hpp"

namespace bergman {

namespace {

double frac(double x) { return x - std::floor(x); }

// Node membership with the exact dyadic node coordinates of the cell.
bool holds(const PolarRectangle& Q, const Cell& c)
{
    const double h = 1.0 - c.node_r;
    if (!(h > Q.h_inner) || h > Q.h) return false;
    return frac(c.node_theta - Q.arc.start) < Q.arc.length;
}

struct Walker {
    const DiskQuadrature& q;
    std::span<const double> f;
    double lambda;
    CZDecomposition& out;

    void visit(const PolarRectangle& Q, std::vector<std::uint32_t> cells, double parent_mass, int generation)
    {
        ++out.visited;
        const auto& m = q.masses();
        double mass = 0.0, s = 0.0, sa = 0.0;
        for (std::uint32_t i : cells) {
            mass += m[i];
            s += f[i] * m[i];
            sa += std::fabs(f[i]) * m[i];
        }
        if (!(mass > 0.0)) return;
        const double avg = sa / mass;
        if (avg >= lambda) {
            SelectedRectangle sel;
            sel.rect = Q;
            sel.generation = generation;
            sel.mass = mass;
            sel.abs_average = avg;
            sel.average = s / mass;
            sel.parent_ratio = parent_mass / mass;
            sel.cells = std::move(cells);
            out.selected.push_back(std::move(sel));
            return;
        }
        if (cells.size() == 1) {
            out.good_cells.push_back(cells.front());
            return;
        }
        for (const PolarRectangle& child : cz_children(Q)) {
            std::vector<std::uint32_t> sub;
            for (std::uint32_t i : cells) {
                if (holds(child, q.cells()[i])) sub.push_back(i);
            }
            if (!sub.empty()) visit(child, std::move(sub), mass, generation + 1);
        }
    }
};

double corner_radius(const PolarRectangle& Q, cplx centre)
{
    double rho = 0.0;
    for (double r : {1.0 - Q.h, 1.0 - Q.h_inner}) {
        for (double t : {Q.arc.start, Q.arc.start + Q.arc.length}) {
            rho = std::max(rho, std::abs(std::polar(r, 2.0 * std::numbers::pi * t) - centre));
        }
    }
    return rho;
}

} // namespace

PolarRectangle cz_region(int region)
{
    require(region == 1 || region == 2, ErrorKind::InvalidArgument, "region must be 1 or 2");
    return carleson_square(DyadicInterval{0, 1, region - 1});
}

CZDecomposition cz_decompose(const Field& f, double lambda, int region)
{
    require(f.quad && f.values.size() == f.quad->size(), ErrorKind::QuadratureMismatch, "field size mismatch");
    const auto& q = *f.quad;
    const auto& m = q.masses();
    double norm = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) norm += std::fabs(f.values[i]) * m[i];
    require(lambda > norm, ErrorKind::InvalidArgument, "lambda must exceed the L1 norm of f");

    CZDecomposition out;
    out.quad = f.quad;
    out.region = region;
    out.lambda = lambda;
    out.g.assign(q.size(), 0.0);
    out.b.assign(q.size(), 0.0);

    const PolarRectangle R = cz_region(region);
    std::vector<std::uint32_t> cells;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (holds(R, q.cells()[i])) {
            cells.push_back(static_cast<std::uint32_t>(i));
            out.f_norm_region += std::fabs(f.values[i]) * m[i];
        }
    }
    Walker w{q, f.values, lambda, out};
    // ‖f‖ < λ gives avg_R < λ/ω(R)
    w.visit(R, std::move(cells), 1.0, 0);

    for (const auto& sel : out.selected) {
        out.parent_constant = std::max(out.parent_constant, sel.parent_ratio);
        out.omega_selected += sel.mass;
        for (std::uint32_t i : sel.cells) {
            out.g[i] = sel.average;
            out.b[i] = f.values[i] - sel.average;
        }
    }
    for (std::uint32_t i : out.good_cells) {
        out.g[i] = f.values[i];
        if (std::fabs(f.values[i]) > lambda) ++out.unresolved;
    }
    std::sort(out.good_cells.begin(), out.good_cells.end());
    return out;
}

CZWeakReport cz_reconstruct_weak11_bound(const KernelOperator& Pplus, const Field& v, const Field& f, double lambda,
                                         int region)
{
    require(Pplus.mode() == KernelMode::Absolute, ErrorKind::InvalidArgument, "operator must be positive");
    require_same(Pplus.quadrature(), f.quad);
    require_same(v.quad, f.quad);
    validate_weight(v);
    const auto& q = *f.quad;
    const auto& m = q.masses();
    const std::size_t n = q.size();

    Field af{f.quad, f.values};
    for (double& x : af.values) x = std::fabs(x);
    const auto cz = cz_decompose(af, lambda, region);

    CZWeakReport rep;
    rep.b1 = b1_characteristic(v).value;
    rep.rectangles = cz.selected.size();
    rep.parent_constant = cz.parent_constant;

    Vec<double> fr = Vec<double>::Zero(static_cast<Eigen::Index>(n)), b(fr.size());
    double fv = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        b(i) = cz.b[i];
        g2 += cz.g[i] * cz.g[i] * v.values[i] * m[i];
    }
    for (std::uint32_t i : cz.good_cells) fr(i) = af.values[i];
    for (const auto& sel : cz.selected) {
        for (std::uint32_t i : sel.cells) fr(i) = af.values[i];
    }
    for (std::size_t i = 0; i < n; ++i) fv += fr(i) * v.values[i] * m[i];
    if (fv == 0.0) return rep;

    std::vector<char> in_prime(n, 0);
    for (const auto& sel : cz.selected) {
        const auto& Q = sel.rect;
        const cplx centre = std::polar(1.0 - 0.5 * (Q.h + Q.h_inner),
                                       2.0 * std::numbers::pi * (Q.arc.start + 0.5 * Q.arc.length));
        const double rho = 2.0 * corner_radius(Q, centre);
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(q.nodes()[i] - centre) < rho) in_prime[i] = 1;
        }
    }

    const Vec<double> pb = Pplus.apply_raw(b);
    const Vec<double> pf = Pplus.apply_raw(fr);
    double tail = 0.0, prime = 0.0, level = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double vm = v.values[i] * m[i];
        if (in_prime[i]) prime += vm;
        else tail += std::fabs(pb(i)) * vm;
        if (pf(i) > lambda) level += vm;
    }
    rep.good_ratio = g2 / (lambda * rep.b1 * fv);
    rep.bad_tail_ratio = tail / (rep.b1 * rep.b1 * fv);
    rep.omega_prime_ratio = lambda * prime / fv;
    rep.weak_ratio = lambda * level / fv;
    return rep;
}

CZWeakReport cz_reconstruct_weak11_bound(const KernelSpec& spec, const Field& v, const Field& f, double lambda,
                                         int region)
{
    return cz_reconstruct_weak11_bound(positive_operator(f.quad, spec), v, f, lambda, region);
}

} // namespace bergman
