#include "bergman/kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

bool atoms_only(const RadialMeasure& nu) { return !nu.has_density(); }

} // namespace

cplx nu_resolvent(const RadialMeasure& nu, cplx w, double tol)
{
    if (atoms_only(nu)) {
        cplx s = 0.0;
        for (const Atom& at : nu.atoms()) s += at.mass / (1.0 - at.location * w);
        return s;
    }
    return nu.integrate_complex([w](double r) { return 1.0 / (1.0 - r * w); }, 0.0, 1.0, tol);
}

KernelSpec make_kernel_spec(double gamma, RadialMeasure nu, double tol)
{
    require(gamma >= 1.0, ErrorKind::InvalidArgument, "kernel gamma must be >= 1");
    require(nu.total_mass() > 0.0, ErrorKind::InvalidArgument, "nu must have positive mass");
    KernelSpec spec;
    spec.gamma = gamma;
    spec.nu = std::move(nu);
    spec.series_tolerance = tol;
    return spec;
}

cplx KernelSpec::operator()(cplx w) const { return kernel_integral(*this, w); }

cplx kernel_integral(const KernelSpec& spec, cplx w)
{
    const cplx one_minus = 1.0 - w;
    cplx pre;
    if (spec.gamma == 1.0) {
        pre = 1.0 / one_minus;
    } else if (spec.gamma == 2.0) {
        pre = 1.0 / (one_minus * one_minus);
    } else {
        pre = std::pow(one_minus, -spec.gamma);
    }
    return pre * nu_resolvent(spec.nu, w, spec.series_tolerance);
}

cplx kernel_series(std::span<const double> moments, cplx x, double tol)
{
    const double ax = std::abs(x);
    require(ax <= 1.0 - std::ldexp(1.0, -20), ErrorKind::TruncationInfeasible,
            "|x| too close to 1 for the series");
    require(!moments.empty(), ErrorKind::InvalidMoments, "empty moment sequence");
    cplx sum = 0.0;
    cplx xn = 1.0;
    double axn1 = ax;  // |x|^{n+1}
    for (std::size_t n = 0; n < moments.size(); ++n) {
        const double w = moments[n];
        require(w > 0.0, ErrorKind::InvalidMoments, "nonpositive moment");
        const double coef = 1.0 / (2.0 * w);
        sum += xn * coef;
        if (4.0 * axn1 * coef / (1.0 - ax) < tol) return sum;
        xn *= x;
        axn1 *= ax;
    }
    fail(ErrorKind::TruncationInfeasible, "moment sequence exhausted before tail bound met");
}

std::vector<double> MomentConstruction::odd_moments() const
{
    std::vector<double> out;
    for (std::size_t m = 1; m < constructed_moments.size(); m += 2) out.push_back(constructed_moments[m]);
    return out;
}

double construction_F(const RadialMeasure& nu, double m, double tol)
{
    const double s = 0.5 * (m + 1.0);
    require(s >= 0.0, ErrorKind::InvalidArgument, "construction_F needs m >= -1");
    auto h = [s](double r) {
        const double d = 1.0 - r;
        if (d < 1e-6 && s * d < 1e-6) return s - 0.5 * s * (s - 1.0) * d;
        if (r <= 0.0) return s > 0.0 ? 1.0 : 0.0;
        return -std::expm1(s * std::log1p(-d)) / d;
    };
    return nu.integrate(h, 0.0, 1.0, tol);
}

double constructed_moment(const RadialMeasure& nu, double s, double tol)
{
    return 1.0 / (2.0 * construction_F(nu, s, tol));
}

MomentConstruction construct_omega_from_nu(const RadialMeasure& nu, int m_max, double tol)
{
    require(m_max >= 0, ErrorKind::InvalidArgument, "m_max must be >= 0");
    const double total = nu.total_mass();
    require(total > 0.0 && std::isfinite(total), ErrorKind::InvalidArgument,
            "nu must have finite positive mass");

    MomentConstruction mc;
    mc.F_values.resize(static_cast<std::size_t>(m_max) + 1);
    mc.constructed_moments.resize(mc.F_values.size());
    for (int m = 0; m <= m_max; ++m) {
        const double F = construction_F(nu, m, tol);
        mc.F_values[m] = F;
        mc.constructed_moments[m] = 1.0 / (2.0 * F);
    }

    const int n_max = (m_max - 1) / 2;
    double partial = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        mc.phi_coefficients.push_back(nu.moment(n));
        partial += mc.phi_coefficients.back();
        mc.partial_sum_error =
            std::max(mc.partial_sum_error, std::fabs(mc.F_values[2 * n + 1] - partial));
    }

    const double c15 = 1.0 - std::ldexp(1.0, -15);
    const double c30 = 1.0 - std::ldexp(1.0, -30);
    auto inv = [](double r) { return 1.0 / (1.0 - r); };
    mc.divergence_proxy = nu.integrate(inv, 0.0, c30, tol);
    mc.divergence_tail = nu.integrate(inv, c15, c30, tol);
    const bool atom_at_one = nu.atom_mass_at(1.0) > 0.0;
    mc.divergence_warning = !(atom_at_one || mc.divergence_proxy > 1e3 * total ||
                              mc.divergence_tail >= 1e-3 * total);
    mc.omega_atom_at_one = constructed_moment(nu, std::ldexp(1.0, 40), tol);
    return mc;
}

std::vector<double> stehfest_weights(int terms)
{
    require(terms >= 2 && terms % 2 == 0 && terms <= 20, ErrorKind::InvalidArgument,
            "Stehfest term count must be even in [2,20]");
    const int half = terms / 2;
    auto fact = [](int n) {
        long double f = 1.0L;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    std::vector<double> V(terms + 1, 0.0);
    for (int k = 1; k <= terms; ++k) {
        long double sum = 0.0L;
        for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
            sum += std::pow(static_cast<long double>(j), half) * fact(2 * j) /
                   (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k));
        }
        V[k] = static_cast<double>(((k + half) % 2 == 0 ? 1.0L : -1.0L) * sum);
    }
    return V;
}

double constructed_tail(const RadialMeasure& nu, double x, double tol, int terms)
{
    require(x >= 0.0 && x <= 1.0, ErrorKind::InvalidRange, "tail argument outside [0,1]");
    if (x <= 0.0) return constructed_moment(nu, 0.0, tol);
    if (x >= 1.0) return 0.0;
    const double t = -std::log(x);
    const std::vector<double> V = stehfest_weights(terms);
    const double ln2t = std::log(2.0) / t;
    long double acc = 0.0L;
    for (int k = 1; k <= terms; ++k) {
        const double s = k * ln2t;
        acc += static_cast<long double>(V[k]) * constructed_moment(nu, s, tol) / s;
    }
    return static_cast<double>(acc) * ln2t;
}

MonotonicityReport check_completely_monotone(std::span<const double> seq, int k_max)
{
    require(k_max >= 0 && seq.size() >= static_cast<std::size_t>(k_max) + 1,
            ErrorKind::InvalidArgument, "sequence shorter than k_max + 1");
    MonotonicityReport rep;
    rep.max_order_checked = k_max;
    std::vector<double> d(seq.begin(), seq.end());
    for (int k = 0; k <= k_max; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t n = 0; n < d.size(); ++n) {
            if (sign * d[n] < -1e-12) {
                rep.first_violation = MonotonicityReport::Violation{k, static_cast<int>(n), sign * d[n]};
                rep.passed = false;
                return rep;
            }
        }
        for (std::size_t n = 0; n + 1 < d.size(); ++n) d[n] = d[n + 1] - d[n];
        d.pop_back();
    }
    return rep;
}

ResolventLowerBound resolvent_lower_bound(const RadialMeasure& nu, cplx z, double tol)
{
    require(std::abs(z) < 1.0, ErrorKind::InvalidArgument, "resolvent_lower_bound needs |z| < 1");
    ResolventLowerBound res;
    res.lhs = std::abs(nu_resolvent(nu, z, tol));
    res.rhs = nu.integrate([z](double r) { return 1.0 / std::abs(1.0 - r * z); }, 0.0, 1.0, tol) /
              kSqrt2;
    res.ratio = res.lhs / res.rhs;
    return res;
}

double tail_ratio(const KernelSpec& spec, const std::function<double(double)>& omega_tail, double x)
{
    require(x >= 0.0 && x < 1.0, ErrorKind::InvalidRange, "tail_ratio needs x in [0,1)");
    const double tail = omega_tail(x);
    require(tail > 0.0, ErrorKind::TailVanished, "omega tail vanished");
    const double res = nu_resolvent(spec.nu, x, spec.series_tolerance).real();
    return res * tail / std::pow(1.0 - x, spec.gamma - 1.0);
}

double tail_ratio(const KernelSpec& spec, const RadialMeasure& omega, double x)
{
    return tail_ratio(spec, [&omega](double r) { return omega.tail(r); }, x);
}

double difference_bound_constant(double c, double gamma)
{
    require(c > 1.0, ErrorKind::InvalidArgument, "difference bound needs c > 1");
    return kSqrt2 * (2.0 + gamma) * std::pow(c, gamma + 1.0) * (3.0 * c + 1.0) /
           std::pow(c - 1.0, gamma + 2.0);
}

DifferenceBound difference_bound_check(const KernelSpec& spec, cplx z0, cplx z, cplx zeta, double c)
{
    require(std::abs(z0) < 1.0 && std::abs(z) < 1.0 && std::abs(zeta) < 1.0,
            ErrorKind::InvalidArgument, "points must lie in the open disk");
    const double sep = std::abs(1.0 - std::conj(zeta) * z);
    const double dz = std::abs(z - z0);
    require(sep >= c * dz, ErrorKind::SeparationViolated, "|1 - conj(zeta) z| < c |z - z0|");
    const cplx bz = spec(std::conj(z) * zeta);
    const cplx bz0 = spec(std::conj(z0) * zeta);
    DifferenceBound out;
    out.lhs = std::abs(bz0 - bz);
    out.bound = difference_bound_constant(c, spec.gamma) * (dz / sep) * std::abs(bz);
    return out;
}

EquivalenceRatios one_minus_rz_equivalence(cplx z, double r)
{
    require(std::abs(z) < 1.0, ErrorKind::InvalidArgument, "needs |z| < 1");
    require(r >= 0.0 && r <= 1.0, ErrorKind::InvalidRange, "needs r in [0,1]");
    const double num = std::abs(1.0 - r * z);
    const double a = std::abs(1.0 - z);
    EquivalenceRatios e;
    e.ratio_low = num / ((1.0 - r) + r * a);
    e.ratio_high = num / (1.0 - r * (1.0 - a));
    return e;
}

std::vector<double> hausdorff_nnls(std::span<const double> moments, std::span<const double> grid,
                                   int sweeps)
{
    const Eigen::Index N = static_cast<Eigen::Index>(moments.size());
    const Eigen::Index G = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd A(N, G);
    for (Eigen::Index j = 0; j < G; ++j) {
        double p = 1.0;
        for (Eigen::Index n = 0; n < N; ++n) {
            A(n, j) = p;
            p *= grid[static_cast<std::size_t>(j)];
        }
    }
    Eigen::VectorXd b(N);
    for (Eigen::Index n = 0; n < N; ++n) b(n) = moments[static_cast<std::size_t>(n)];
    const Eigen::MatrixXd Q = A.transpose() * A;
    const Eigen::VectorXd c = A.transpose() * b;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(G);
    Eigen::VectorXd grad = -c;  // Q w - c
    for (int s = 0; s < sweeps; ++s) {
        double change = 0.0;
        for (Eigen::Index i = 0; i < G; ++i) {
            if (Q(i, i) <= 0.0) continue;
            const double next = std::max(0.0, w(i) - grad(i) / Q(i, i));
            const double delta = next - w(i);
            if (delta != 0.0) {
                grad += delta * Q.col(i);
                w(i) = next;
                change = std::max(change, std::fabs(delta));
            }
        }
        if (change < 1e-15) break;
    }
    return std::vector<double>(w.data(), w.data() + G);
}

} // namespace bergman
