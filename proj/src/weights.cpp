#include "bergman/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "bergman/errors.hpp"
#include "bergman/operators.hpp"

namespace bergman {

namespace {

std::int64_t pow2(int n) { return std::int64_t{1} << n; }

CharacteristicReport characteristic_from_masses(const Field& v, double p, int depth, std::span<const double> mu)
{
    require(p > 1.0 && std::isfinite(p), ErrorKind::InvalidArgument, "B_p characteristic needs 1 < p < inf");
    validate_weight(v);
    const auto& q = *v.quad;
    require(depth >= 0 && depth <= q.depth(), ErrorKind::InvalidArgument, "depth exceeds quadrature depth");
    const double pp = p / (p - 1.0);
    std::vector<double> vm(q.size()), dm(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        vm[i] = v.values[i] * mu[i];
        dm[i] = std::pow(v.values[i], -pp / p) * mu[i];
    }
    CharacteristicReport rep;
    rep.depth = depth;
    rep.per_depth.assign(static_cast<std::size_t>(depth) + 1, 0.0);
    rep.value = 0.0;
    for (int beta2 : {0, 1}) {
        const auto W = q.square_sums(mu, beta2, depth);
        const auto A = q.square_sums(vm, beta2, depth);
        const auto B = q.square_sums(dm, beta2, depth);
        for (int level = 0; level <= depth; ++level) {
            for (std::int64_t m = 0; m < pow2(level); ++m) {
                const auto id = static_cast<std::size_t>(pow2(level) - 1 + m);
                if (!(W[id] > 0.0)) {
                    ++rep.skipped;
                    continue;
                }
                const double val = (A[id] / W[id]) * std::pow(B[id] / W[id], p / pp);
                rep.per_depth[level] = std::max(rep.per_depth[level], val);
                if (val > rep.value) {
                    rep.value = val;
                    rep.witness = {beta2, level, m};
                }
            }
        }
    }
    for (std::size_t l = 1; l < rep.per_depth.size(); ++l) rep.per_depth[l] = std::max(rep.per_depth[l], rep.per_depth[l - 1]);
    return rep;
}

} // namespace

Field make_weight(const QuadPtr& q, const WeightSpec& spec)
{
    require(spec.bump_width > 0.0, ErrorKind::InvalidArgument, "bump width must be positive");
    return make_field(q, [&spec](cplx z) {
        const double h = 1.0 - std::abs(z);
        double v = std::pow(h, spec.eta);
        if (spec.log_power != 0.0) v *= std::pow(std::log(std::numbers::e / h), spec.log_power);
        if (spec.bump_height != 0.0) {
            double gap = std::fabs(unit_angle(z) - spec.bump_center);
            gap = std::min(gap, 1.0 - gap);
            v *= 1.0 + spec.bump_height * std::exp(-(gap / spec.bump_width) * (gap / spec.bump_width));
        }
        return v;
    });
}

Field power_weight(const QuadPtr& q, double eta)
{
    return make_field(q, [eta](cplx z) { return std::pow(1.0 - std::abs(z), eta); });
}

void validate_weight(const Field& v)
{
    require(v.quad && v.values.size() == v.quad->size(), ErrorKind::QuadratureMismatch, "weight size mismatch");
    for (double x : v.values) require(x > 0.0 && std::isfinite(x), ErrorKind::InvalidArgument, "weights must be positive");
}

Field dual_weight(const Field& v, double p)
{
    require(p > 1.0 && std::isfinite(p), ErrorKind::InvalidArgument, "dual weight needs 1 < p < inf");
    const double e = 1.0 - p / (p - 1.0);
    Field out{v.quad, v.values};
    for (double& x : out.values) x = std::pow(x, e);
    return out;
}

CharacteristicReport bp_characteristic(const Field& v, double p, int depth)
{
    return characteristic_from_masses(v, p, depth, v.quad->masses());
}

CharacteristicReport bp_alpha_characteristic(const Field& v, double p, double alpha, int depth)
{
    require(alpha > -1.0, ErrorKind::InvalidArgument, "alpha must exceed -1");
    const auto& q = *v.quad;
    std::vector<double> mu(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const Cell& c = q.cells()[i];
        const double a = 1.0 - c.r_lo * c.r_lo, b = 1.0 - c.r_hi * c.r_hi;
        mu[i] = std::ldexp(1.0, -c.angular_exp) * (std::pow(a, alpha + 1.0) - std::pow(b, alpha + 1.0)) / (alpha + 1.0);
    }
    return characteristic_from_masses(v, p, depth, mu);
}

DiscMaximal::DiscMaximal(QuadPtr q) : q_(std::move(q))
{
    const auto& nodes = q_->nodes();
    std::vector<std::pair<cplx, double>> discs;
    for (const cplx& a : nodes) {
        const double h = 1.0 - std::abs(a);
        for (double k : {1.0, std::numbers::sqrt2, 2.0, 4.0}) discs.emplace_back(a, k * h);
    }
    for (int k = 0; k <= q_->depth() + 1; ++k) {
        const double rho = std::ldexp(1.0, -k);
        const std::int64_t count = pow2(k + 2);
        for (std::int64_t s = 0; s < count; ++s) {
            discs.emplace_back(std::polar(1.0 - rho, 2.0 * std::numbers::pi * static_cast<double>(s) / count), rho);
        }
    }
    discs.emplace_back(0.0, 2.0);
    const auto& m = q_->masses();
    for (const auto& [a, r] : discs) {
        std::vector<std::uint32_t> mem;
        double mass = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (std::abs(nodes[i] - a) < r) {
                mem.push_back(static_cast<std::uint32_t>(i));
                mass += m[i];
            }
        }
        if (mass > 0.0) members_.push_back(std::move(mem));
    }
}

std::vector<double> DiscMaximal::operator()(std::span<const double> f) const
{
    require(f.size() == q_->size(), ErrorKind::QuadratureMismatch, "field size mismatch");
    const auto& m = q_->masses();
    std::vector<double> out(f.size(), 0.0);
    for (const auto& mem : members_) {
        double s = 0.0, w = 0.0;
        for (std::uint32_t i : mem) {
            s += std::fabs(f[i]) * m[i];
            w += m[i];
        }
        const double avg = s / w;
        for (std::uint32_t i : mem) out[i] = std::max(out[i], avg);
    }
    return out;
}

double disc_maximal(const DiscMaximal& M, std::span<const double> f, std::size_t node) { return M(f).at(node); }

CharacteristicReport b1_characteristic(const Field& v, const DiscMaximal& M)
{
    validate_weight(v);
    require_same(v.quad, M.quadrature());
    const auto Mv = M(v.values);
    CharacteristicReport rep;
    rep.depth = v.quad->depth();
    rep.value = 0.0;
    for (std::size_t i = 0; i < Mv.size(); ++i) {
        if (v.quad->masses()[i] == 0.0) continue;
        rep.value = std::max(rep.value, Mv[i] / v.values[i]);
    }
    rep.value = std::max(rep.value, 1.0);
    rep.per_depth = {rep.value};
    return rep;
}

CharacteristicReport b1_characteristic(const Field& v) { return b1_characteristic(v, DiscMaximal(v.quad)); }

std::vector<double> dyadic_maximal(const DiskQuadrature& q, std::span<const double> nu, int beta2,
                                   std::span<const double> f, int L)
{
    require(nu.size() == q.size() && f.size() == q.size(), ErrorKind::QuadratureMismatch, "field size mismatch");
    require(L >= 0 && L <= q.depth(), ErrorKind::InvalidArgument, "level cap exceeds quadrature depth");
    std::vector<double> fn(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) fn[i] = std::fabs(f[i]) * nu[i];
    const auto A = q.square_sums(fn, beta2, L);
    const auto W = q.square_sums(nu, beta2, L);
    std::vector<double> out(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        const int top = std::min(L, q.cells()[i].band);
        for (int level = 0; level <= top; ++level) {
            const auto id = static_cast<std::size_t>(pow2(level) - 1 + q.square_index(i, beta2, level));
            if (W[id] > 0.0) out[i] = std::max(out[i], A[id] / W[id]);
        }
    }
    return out;
}

double weak_type_sup(std::span<const double> g, std::span<const double> nu)
{
    require(g.size() == nu.size(), ErrorKind::QuadratureMismatch, "size mismatch");
    std::vector<std::size_t> idx(g.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return g[a] > g[b]; });
    double cum = 0.0, best = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const double val = g[idx[k]];
        if (!(val > 0.0)) break;
        cum += nu[idx[k]];
        // λ → val⁻ sees every cell with g ≥ val
        if (k + 1 == idx.size() || g[idx[k + 1]] < val) best = std::max(best, val * cum);
    }
    return best;
}

double weak_type_on_grid(std::span<const double> g, std::span<const double> nu, std::span<const double> lambdas)
{
    require(g.size() == nu.size(), ErrorKind::QuadratureMismatch, "size mismatch");
    double best = 0.0;
    for (double lam : lambdas) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g[i] > lam) s += nu[i];
        }
        best = std::max(best, lam * s);
    }
    return best;
}

std::vector<double> geometric_lambda_grid(double lo, double hi)
{
    require(lo > 0.0 && hi >= lo, ErrorKind::InvalidRange, "lambda grid needs 0 < lo <= hi");
    std::vector<double> out;
    for (int k = 0;; ++k) {
        const double lam = lo * std::pow(2.0, 0.25 * k);
        if (lam > hi) break;
        out.push_back(lam);
    }
    return out;
}

double weak11_maximal_check(const DiskQuadrature& q, std::span<const double> nu, int beta2,
                            std::span<const double> f, int L)
{
    double norm = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) norm += std::fabs(f[i]) * nu[i];
    require(norm > 0.0, ErrorKind::InvalidArgument, "f must have positive L1 norm");
    return weak_type_sup(dyadic_maximal(q, nu, beta2, f, L), nu) / norm;
}

WeakProjection weak11_projection_check(const KernelOperator& P, const KernelOperator& Pplus, const Field& v,
                                       const Field& f)
{
    require_same(P.quadrature(), f.quad);
    require_same(Pplus.quadrature(), f.quad);
    require_same(v.quad, f.quad);
    const auto& q = *f.quad;
    const auto& m = q.masses();
    std::vector<double> nu(q.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        nu[i] = v.values[i] * m[i];
        norm += std::fabs(f.values[i]) * nu[i];
    }
    WeakProjection out;
    if (norm == 0.0) return out;
    Vec<cplx> fc(static_cast<Eigen::Index>(q.size()));
    Vec<double> fa(static_cast<Eigen::Index>(q.size()));
    for (std::size_t i = 0; i < q.size(); ++i) {
        fc(i) = f.values[i];
        fa(i) = std::fabs(f.values[i]);
    }
    const Vec<cplx> pf = P.apply_raw(fc);
    const Vec<double> ppf = Pplus.apply_raw(fa);
    std::vector<double> a(q.size()), b(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        a[i] = std::abs(pf(i));
        b[i] = ppf(i);
    }
    out.signed_ratio = weak_type_sup(a, nu) / norm;
    out.positive_ratio = weak_type_sup(b, nu) / norm;
    return out;
}

} // namespace bergman
