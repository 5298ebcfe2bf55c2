#include "bergman/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "bergman/errors.hpp"
#include "bergman/weights.hpp"

namespace bergman {

namespace {

constexpr std::size_t kDenseLimit = 4096;

std::int64_t pow2(int n) { return std::int64_t{1} << n; }

} // namespace

double PsiProfile::operator()(double t) const
{
    require(t > 0.0 && t < 2.0, ErrorKind::InvalidRange, "Psi argument outside (0,2)");
    const double x = 1.0 - t;
    const double res = nu_resolvent(nu, x, tol).real();
    return (gamma == 1.0 ? 1.0 : std::pow(t, 1.0 - gamma)) * res;
}

cplx PsiProfile::operator()(cplx w) const
{
    const cplx res = nu_resolvent(nu, 1.0 - w, tol);
    return (gamma == 1.0 ? cplx(1.0) : std::pow(w, 1.0 - gamma)) * res;
}

PsiProfile psi_from_kernel(const KernelSpec& spec) { return {spec.gamma, spec.nu, spec.series_tolerance}; }

PsiDiagnostics psi_diagnostics(const PsiProfile& psi, int levels)
{
    PsiDiagnostics d;
    const double top = 2.0 - std::ldexp(1.0, -20);
    std::vector<double> t, v;
    for (int k = 0; k <= 4 * levels; ++k) {
        t.push_back(top * std::pow(2.0, -0.25 * k));
        v.push_back(psi(t.back()));
        if (!(v.back() > 0.0)) d.positive = false;
    }
    // t decreases with k: sup_{t1 ≤ t2} Ψ(t2)/Ψ(t1) = sup_k max_{j ≤ k} v_j / v_k
    double run = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        run = std::max(run, v[k]);
        d.decreasing_constant = std::max(d.decreasing_constant, run / v[k]);
    }
    for (std::size_t k = 4; k < v.size(); ++k) d.doubling_constant = std::max(d.doubling_constant, v[k] / v[k - 4]);
    return d;
}

NodeKernel::NodeKernel(QuadPtr q, std::function<cplx(cplx)> g) : q_(std::move(q)), g_(std::move(g))
{
    bands_ = q_->depth() + 1;
    cache_.resize(static_cast<std::size_t>(bands_ * bands_));
    filled_.resize(cache_.size());
}

cplx NodeKernel::operator()(std::size_t i, std::size_t j) const
{
    const Cell& a = q_->cells()[i];
    const Cell& b = q_->cells()[j];
    const int m = std::max(a.angular_exp, b.angular_exp);
    const std::size_t slot = static_cast<std::size_t>(a.band * bands_ + b.band);
    auto& c = cache_[slot];
    auto& f = filled_[slot];
    const std::int64_t period = pow2(m + 1);
    if (c.empty()) {
        c.resize(static_cast<std::size_t>(period));
        f.assign(static_cast<std::size_t>(period), 0);
    }
    std::int64_t d = ((2 * a.k + 1) << (m - a.angular_exp)) - ((2 * b.k + 1) << (m - b.angular_exp));
    d %= period;
    if (d < 0) d += period;
    const auto idx = static_cast<std::size_t>(d);
    if (!f[idx]) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(d) / static_cast<double>(period);
        c[idx] = g_(std::polar(a.node_r * b.node_r, angle));
        f[idx] = 1;
    }
    return c[idx];
}

KernelOperator::KernelOperator(QuadPtr q, std::function<cplx(cplx)> kernel, KernelMode mode)
    : q_(q), K_(q, std::move(kernel)), mode_(mode)
{
}

cplx KernelOperator::centry(std::size_t i, std::size_t j) const
{
    const cplx v = K_(i, j);
    return mode_ == KernelMode::Absolute ? cplx(std::abs(v)) : v;
}

double KernelOperator::entry(std::size_t i, std::size_t j) const { return centry(i, j).real(); }

Vec<cplx> KernelOperator::apply_raw(const Vec<cplx>& f) const
{
    const std::size_t n = q_->size();
    require(static_cast<std::size_t>(f.size()) == n, ErrorKind::QuadratureMismatch, "field size mismatch");
    const auto& m = q_->masses();
    Vec<cplx> fm(f.size());
    for (std::size_t j = 0; j < n; ++j) fm(j) = f(j) * m[j];
    Vec<cplx> out(f.size());
    for (std::size_t i = 0; i < n; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (fm(j) != 0.0) s += centry(i, j) * fm(j);
        }
        out(i) = s;
    }
    return out;
}

Vec<double> KernelOperator::apply_raw(const Vec<double>& f) const
{
    if (q_->size() > kDenseLimit) return apply_matrix_free(f);
    require(mode_ == KernelMode::Absolute, ErrorKind::InvalidArgument, "real application needs a positive kernel");
    require(static_cast<std::size_t>(f.size()) == q_->size(), ErrorKind::QuadratureMismatch, "field size mismatch");
    if (!dense_) dense_ = std::make_shared<const Eigen::MatrixXd>(assemble());
    return (*dense_) * f;
}

Vec<double> KernelOperator::apply_matrix_free(const Vec<double>& f) const
{
    require(mode_ == KernelMode::Absolute, ErrorKind::InvalidArgument, "real application needs a positive kernel");
    const std::size_t n = q_->size();
    require(static_cast<std::size_t>(f.size()) == n, ErrorKind::QuadratureMismatch, "field size mismatch");
    const auto& m = q_->masses();
    Vec<double> fm(f.size());
    for (std::size_t j = 0; j < n; ++j) fm(j) = f(j) * m[j];
    Vec<double> out(f.size());
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (fm(j) != 0.0) s += std::abs(K_(i, j)) * fm(j);
        }
        out(i) = s;
    }
    return out;
}

ComplexField KernelOperator::apply(const ComplexField& f) const
{
    require_same(q_, f.quad);
    const Vec<cplx> in = Eigen::Map<const Vec<cplx>>(f.values.data(), static_cast<Eigen::Index>(f.size()));
    const Vec<cplx> out = apply_raw(in);
    return {q_, std::vector<cplx>(out.data(), out.data() + out.size())};
}

Field KernelOperator::apply(const Field& f) const
{
    require_same(q_, f.quad);
    const Vec<double> in = Eigen::Map<const Vec<double>>(f.values.data(), static_cast<Eigen::Index>(f.size()));
    const Vec<double> out = apply_raw(in);
    return {q_, std::vector<double>(out.data(), out.data() + out.size())};
}

std::vector<cplx> KernelOperator::apply_rows(std::span<const cplx> f, std::span<const std::size_t> rows) const
{
    require(f.size() == q_->size(), ErrorKind::QuadratureMismatch, "field size mismatch");
    const auto& m = q_->masses();
    std::vector<cplx> out;
    out.reserve(rows.size());
    for (std::size_t i : rows) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            if (f[j] != 0.0) s += centry(i, j) * f[j] * m[j];
        }
        out.push_back(s);
    }
    return out;
}

Eigen::MatrixXd KernelOperator::assemble() const
{
    const std::size_t n = q_->size();
    require(n <= kDenseLimit, ErrorKind::BudgetExceeded, "dense assembly limited to 4096 cells");
    const auto& m = q_->masses();
    Eigen::MatrixXd A(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) A(i, j) = entry(i, j) * m[j];
    }
    return A;
}

KernelOperator bergman_operator(const QuadPtr& q, const KernelSpec& spec)
{
    return KernelOperator(q, [spec](cplx w) { return kernel_integral(spec, w); }, KernelMode::Signed);
}

KernelOperator positive_operator(const QuadPtr& q, const KernelSpec& spec)
{
    return KernelOperator(q, [spec](cplx w) { return kernel_integral(spec, w); }, KernelMode::Absolute);
}

KernelOperator positive_psi_operator(const QuadPtr& q, const PsiProfile& psi)
{
    return KernelOperator(q, [psi](cplx w) { return psi(1.0 - w) / (1.0 - w); }, KernelMode::Absolute);
}

SquareOperator::SquareOperator(QuadPtr q, int beta2, int L, std::vector<double> coef)
    : q_(std::move(q)), beta2_(beta2), L_(L), coef_(std::move(coef))
{
    require(beta2 == 0 || beta2 == 1, ErrorKind::InvalidArgument, "beta2 must be 0 or 1");
    require(L >= 0 && L <= q_->depth(), ErrorKind::InvalidArgument, "level cap exceeds quadrature depth");
    require(static_cast<std::int64_t>(coef_.size()) == square_count(L), ErrorKind::InvalidArgument,
            "coefficient table size mismatch");
}

Vec<double> SquareOperator::apply_raw(const Vec<double>& f) const
{
    const std::size_t n = q_->size();
    require(static_cast<std::size_t>(f.size()) == n, ErrorKind::QuadratureMismatch, "field size mismatch");
    const auto& m = q_->masses();
    std::vector<double> fm(n);
    for (std::size_t j = 0; j < n; ++j) fm[j] = f(j) * m[j];
    const auto S = q_->square_sums(fm, beta2_, L_);
    Vec<double> out = Vec<double>::Zero(f.size());
    for (std::size_t i = 0; i < n; ++i) {
        const int top = std::min(L_, q_->cells()[i].band);
        double s = 0.0;
        for (int level = 0; level <= top; ++level) {
            const auto id = static_cast<std::size_t>(pow2(level) - 1 + q_->square_index(i, beta2_, level));
            s += coef_[id] * S[id];
        }
        out(i) = s;
    }
    return out;
}

Field SquareOperator::apply(const Field& f) const
{
    require_same(q_, f.quad);
    const Vec<double> in = Eigen::Map<const Vec<double>>(f.values.data(), static_cast<Eigen::Index>(f.size()));
    const Vec<double> out = apply_raw(in);
    return {q_, std::vector<double>(out.data(), out.data() + out.size())};
}

Eigen::MatrixXd SquareOperator::assemble() const
{
    const std::size_t n = q_->size();
    require(n <= kDenseLimit, ErrorKind::BudgetExceeded, "dense assembly limited to 4096 cells");
    const auto& m = q_->masses();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int level = 0; level <= L_; ++level) {
        std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(pow2(level)));
        for (std::size_t i = 0; i < n; ++i) {
            const auto s = q_->square_index(i, beta2_, level);
            if (s >= 0) members[static_cast<std::size_t>(s)].push_back(i);
        }
        for (std::size_t s = 0; s < members.size(); ++s) {
            const double c = coef_[static_cast<std::size_t>(pow2(level) - 1) + s];
            for (std::size_t i : members[s]) {
                for (std::size_t j : members[s]) A(i, j) += c * m[j];
            }
        }
    }
    return A;
}

SquareOperator dyadic_operator(const QuadPtr& q, int beta2, const PsiProfile& psi, int L)
{
    std::vector<double> coef(static_cast<std::size_t>(square_count(L)));
    for (int level = 0; level <= L; ++level) {
        const double len = std::ldexp(1.0, -level);
        const double c = psi(len) / len;
        for (std::int64_t m = 0; m < pow2(level); ++m) coef[static_cast<std::size_t>(pow2(level) - 1 + m)] = c;
    }
    return SquareOperator(q, beta2, L, std::move(coef));
}

double dyadic_kernel(int beta2, const PsiProfile& psi, cplx z, cplx zeta, int L)
{
    const double rz = std::abs(z), rw = std::abs(zeta);
    const double tz = unit_angle(z), tw = unit_angle(zeta);
    double s = 0.0;
    for (int level = 0; level <= L; ++level) {
        const double len = std::ldexp(1.0, -level);
        if (level > 0) {
            if (rz < 1.0 - len || rw < 1.0 - len) break;
            if (arc_index(tz, beta2, level) != arc_index(tw, beta2, level)) continue;
        }
        s += psi(len) / len;
    }
    return s;
}

double psi_kernel(const PsiProfile& psi, cplx z, cplx zeta)
{
    const double t = std::abs(1.0 - std::conj(zeta) * z);
    return psi(t) / t;
}

Comparability comparability_constants(const PsiProfile& psi, int sample_count, std::uint64_t seed, int L)
{
    require(sample_count > 0, ErrorKind::EmptySample, "comparability needs at least one sample");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> level_value(static_cast<std::size_t>(L) + 1);
    for (int level = 0; level <= L; ++level) level_value[level] = psi(std::ldexp(1.0, -level)) * std::ldexp(1.0, level);
    auto dk = [&](int beta2, cplx z, cplx w) {
        const double rz = std::abs(z), rw = std::abs(w);
        const double tz = unit_angle(z), tw = unit_angle(w);
        double s = 0.0;
        for (int level = 0; level <= L; ++level) {
            const double len = std::ldexp(1.0, -level);
            if (level > 0) {
                if (rz < 1.0 - len || rw < 1.0 - len) break;
                if (arc_index(tz, beta2, level) != arc_index(tw, beta2, level)) continue;
            }
            s += level_value[level];
        }
        return s;
    };
    Comparability c;
    c.c_low = std::numeric_limits<double>::infinity();
    const double span = L + 1.0;
    for (int s = 0; s < sample_count; ++s) {
        const double hz = std::pow(2.0, -span * U(rng));
        const double hw = std::pow(2.0, -span * U(rng));
        const double tz = U(rng);
        const double gap = 0.5 * std::pow(2.0, -span * U(rng)) * (U(rng) < 0.5 ? -1.0 : 1.0);
        const cplx z = std::polar(1.0 - hz, 2.0 * std::numbers::pi * tz);
        const cplx w = std::polar(1.0 - hw, 2.0 * std::numbers::pi * (tz + gap));
        const double ratio = psi_kernel(psi, z, w) / (dk(0, z, w) + dk(1, z, w));
        c.c_low = std::min(c.c_low, ratio);
        c.c_high = std::max(c.c_high, ratio);
    }
    c.samples = sample_count;
    return c;
}

double separation_threshold(double gamma)
{
    auto excess = [gamma](double D) {
        const double c = (1.0 / 3.0 + D) / std::numbers::sqrt2;
        return std::numbers::sqrt2 * (2.0 + gamma) * std::pow(c, gamma) * (3.0 * c + 1.0) /
                   std::pow(c - 1.0, gamma + 2.0) -
               0.5;
    };
    double lo = std::numbers::sqrt2 - 1.0 / 3.0;
    double hi = lo + 1.0;
    while (excess(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return hi;
}

SeparatedBound separated_square_lower_bound(const KernelSpec& spec, const QuadPtr& q, int level, const Field& f)
{
    require_same(q, f.quad);
    require(level >= 1 && level <= q->depth(), ErrorKind::InvalidArgument, "level outside quadrature depth");
    SeparatedBound out;
    out.D1 = separation_threshold(spec.gamma);
    out.D2 = out.D1 + 2.0;
    out.S1 = {0, level, 0};
    const auto s1 = q->cells_in(carleson_square(out.S1));
    for (std::size_t i = 0; i < q->size(); ++i) {
        const bool inside = std::find(s1.begin(), s1.end(), i) != s1.end();
        require(inside || f.values[i] == 0.0, ErrorKind::InvalidArgument, "f must be supported on S1");
        require(f.values[i] >= 0.0, ErrorKind::InvalidArgument, "f must be nonnegative");
    }
    const double len = out.S1.length();
    std::vector<std::size_t> s2;
    bool found = false;
    for (int step = 16; step < 16 * (std::int64_t{1} << level); ++step) {
        const Arc a{step * len / 16.0, len};
        auto cand = q->cells_in(carleson_square(a));
        if (cand.empty()) continue;
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t i : s1) {
            for (std::size_t j : cand) d = std::min(d, std::abs(q->nodes()[i] - q->nodes()[j]));
        }
        if (d >= out.D1 * len && d <= out.D2 * len) {
            out.S2 = a;
            out.distance = d;
            s2 = std::move(cand);
            found = true;
            break;
        }
    }
    require(found, ErrorKind::NoAdmissiblePair, "no square at the requested separation");

    const auto& m = q->masses();
    double mass = 0.0, integral = 0.0;
    for (std::size_t i : s1) {
        mass += m[i];
        integral += f.values[i] * m[i];
    }
    out.average = mass > 0.0 ? integral / mass : 0.0;
    const auto P = bergman_operator(q, spec);
    std::vector<cplx> fc(f.values.begin(), f.values.end());
    const auto vals = P.apply_rows(fc, s2);
    out.min_projection = std::numeric_limits<double>::infinity();
    for (const cplx& v : vals) out.min_projection = std::min(out.min_projection, std::abs(v));
    out.ratio = out.average > 0.0 ? out.min_projection / out.average : 0.0;
    return out;
}

TailDifference tail_difference_bound(const KernelSpec& spec, const Field& v, cplx z0, cplx z, double c)
{
    require(std::abs(z0) >= 0.5 && std::abs(z0) < 1.0, ErrorKind::InvalidArgument, "needs 1/2 <= |z0| < 1");
    require(std::abs(z - z0) <= c * (1.0 - std::abs(z0)), ErrorKind::SeparationViolated,
            "needs |z - z0| <= c(1 - |z0|)");
    const auto& q = *v.quad;
    const auto& nodes = q.nodes();
    const auto& m = q.masses();
    TailDifference out;
    const double excl = 2.0 * std::abs(z - z0);
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (std::abs(nodes[j] - z0) < excl || m[j] == 0.0) continue;
        const cplx a = kernel_integral(spec, std::conj(z0) * nodes[j]);
        const cplx b = kernel_integral(spec, std::conj(z) * nodes[j]);
        out.lhs += std::abs(a - b) * v.values[j] * m[j];
    }
    const DiscMaximal M(v.quad);
    const auto Mv = M(v.values);
    const auto near = disc_family(q, z0, std::numbers::sqrt2 * (1.0 - std::abs(z0)));
    require(!near.empty(), ErrorKind::InvalidArgument, "no node near z0 at this depth");
    out.rhs = std::numeric_limits<double>::infinity();
    for (std::size_t i : near) out.rhs = std::min(out.rhs, Mv[i]);
    out.ratio = out.lhs / out.rhs;
    return out;
}

OperatorNorm weighted_operator_norm(const std::function<Vec<double>(const Vec<double>&)>& A, const DiskQuadrature& q,
                                    std::span<const double> c, std::span<const double> w_in,
                                    std::span<const double> w_out, double p, const std::vector<Vec<double>>& tests,
                                    const std::vector<Vec<double>>& dual_tests)
{
    const auto n = static_cast<Eigen::Index>(q.size());
    require(c.size() == q.size() && w_in.size() == q.size() && w_out.size() == q.size(),
            ErrorKind::QuadratureMismatch, "weight size mismatch");
    require(p > 1.0, ErrorKind::InvalidArgument, "p must exceed 1");
    const auto& m = q.masses();
    auto K = [&](const Vec<double>& x) {
        Vec<double> h(n);
        for (Eigen::Index j = 0; j < n; ++j) h(j) = m[j] > 0.0 ? x(j) / m[j] : 0.0;
        return A(h);
    };
    const double ip = 1.0 / p;
    Vec<double> din(n), dout(n), sin(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const bool live = m[j] > 0.0;
        // x = (w_in m)^{1/p} f; N = diag(dout) K diag(din)
        sin(j) = live ? std::pow(w_in[j] * m[j], ip) : 0.0;
        din(j) = live ? c[j] * m[j] / sin(j) : 0.0;
        dout(j) = live ? std::pow(w_out[j] * m[j], ip) : 0.0;
    }
    const LinearMap<double> N = [&](const Vec<double>& x) -> Vec<double> {
        return dout.cwiseProduct(K(din.cwiseProduct(x)));
    };
    const LinearMap<double> Nt = [&](const Vec<double>& y) -> Vec<double> {
        return din.cwiseProduct(K(dout.cwiseProduct(y)));
    };
    std::vector<Vec<double>> starts;
    for (const auto& f : tests) starts.push_back(sin.cwiseProduct(f));
    OperatorNorm out;
    if (p == 2.0) {
        for (const auto& g : dual_tests) starts.push_back(Nt(dout.cwiseProduct(g)));
        starts.push_back(sin);
        const auto sv = largest_singular_value<double>(N, Nt, n, starts);
        out.value = sv.value;
        out.exact = true;
        out.iterations = sv.iterations;
        return out;
    }
    out.value = boyd_lower_bound(N, Nt, n, p, starts);
    return out;
}

} // namespace bergman
