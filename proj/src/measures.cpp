#include "bergman/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "bergman/errors.hpp"
#include "bergman/quadrature.hpp"

namespace bergman {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidRange: return "invalid-range";
    case ErrorKind::TruncationInfeasible: return "truncation-infeasible";
    case ErrorKind::InvalidMoments: return "invalid-moments";
    case ErrorKind::TailVanished: return "tail-vanished";
    case ErrorKind::SeparationViolated: return "separation-violated";
    case ErrorKind::ArcTooLong: return "arc-too-long";
    case ErrorKind::EmptySample: return "empty-sample";
    case ErrorKind::QuadratureMismatch: return "quadrature-mismatch";
    case ErrorKind::NoAdmissiblePair: return "no-admissible-pair";
    case ErrorKind::BudgetExceeded: return "budget-exceeded";
    case ErrorKind::Config: return "config-error";
    }
    return "error";
}

std::vector<double> graded_breaks(double a, double b, int levels)
{
    std::vector<double> br;
    if (!(b > a)) return br;
    br.push_back(a);
    double x = 0.5;
    for (int k = 1; k <= levels; ++k) {
        if (x > a && x < b) br.push_back(x);
        x = 1.0 - std::ldexp(1.0, -(k + 1));
    }
    br.push_back(b);
    return br;
}

RadialMeasure::RadialMeasure(std::string name, Density density, std::vector<Atom> atoms)
    : name_(std::move(name)), density_(std::move(density)), atoms_(std::move(atoms))
{
    for (const Atom& at : atoms_) {
        require(at.location >= 0.0 && at.location <= 1.0, ErrorKind::InvalidArgument,
                "atom location outside [0,1]");
        require(at.mass > 0.0, ErrorKind::InvalidArgument, "atom mass must be positive");
    }
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& x, const Atom& y) { return x.location < y.location; });
}

RadialMeasure RadialMeasure::lebesgue()
{
    return RadialMeasure("lebesgue", [](double) { return 1.0; });
}

RadialMeasure RadialMeasure::standard(double alpha)
{
    require(alpha > -1.0, ErrorKind::InvalidArgument, "standard weight needs alpha > -1");
    return RadialMeasure("standard(" + std::to_string(alpha) + ")", [alpha](double r) {
        const double s = std::max(0.0, 1.0 - r * r);
        return (alpha + 1.0) * std::pow(s, alpha);
    });
}

RadialMeasure RadialMeasure::power(double alpha)
{
    require(alpha > -1.0, ErrorKind::InvalidArgument, "power weight needs alpha > -1");
    return RadialMeasure("power(" + std::to_string(alpha) + ")", [alpha](double r) {
        return (alpha + 1.0) * std::pow(std::max(0.0, 1.0 - r), alpha);
    });
}

RadialMeasure RadialMeasure::exponential(double c)
{
    require(c > 0.0, ErrorKind::InvalidArgument, "exponential weight needs c > 0");
    return RadialMeasure("exponential(" + std::to_string(c) + ")", [c](double r) {
        const double s = 1.0 - r;
        return s <= 0.0 ? 0.0 : std::exp(-c / s);
    });
}

RadialMeasure RadialMeasure::atoms_only(std::string name, std::vector<Atom> atoms)
{
    require(!atoms.empty(), ErrorKind::InvalidArgument, "atom list is empty");
    return RadialMeasure(std::move(name), Density{}, std::move(atoms));
}

RadialMeasure RadialMeasure::with_atoms(const std::vector<Atom>& extra, std::string name) const
{
    std::vector<Atom> all = atoms_;
    all.insert(all.end(), extra.begin(), extra.end());
    return RadialMeasure(name.empty() ? name_ + "+atoms" : std::move(name), density_, std::move(all));
}

double RadialMeasure::density(double r) const { return density_ ? density_(r) : 0.0; }

namespace {

bool atom_in(double loc, double a, double b)
{
    if (b >= 1.0) return loc >= a && loc <= 1.0;
    return loc >= a && loc < b;
}

} // namespace

double RadialMeasure::integrate(const std::function<double(double)>& g, double a, double b,
                                double tol) const
{
    require(a <= b, ErrorKind::InvalidRange, "integration range has a > b");
    double total = 0.0;
    if (density_ && b > a) {
        total = graded_simpson<double>([&](double r) { return g(r) * density_(r); }, a, b, tol);
    }
    for (const Atom& at : atoms_) {
        if (atom_in(at.location, a, b)) total += at.mass * g(at.location);
    }
    return total;
}

std::complex<double> RadialMeasure::integrate_complex(
    const std::function<std::complex<double>(double)>& g, double a, double b, double tol) const
{
    require(a <= b, ErrorKind::InvalidRange, "integration range has a > b");
    std::complex<double> total = 0.0;
    if (density_ && b > a) {
        total = graded_simpson<std::complex<double>>(
            [&](double r) { return g(r) * density_(r); }, a, b, tol);
    }
    for (const Atom& at : atoms_) {
        if (atom_in(at.location, a, b)) total += at.mass * g(at.location);
    }
    return total;
}

double RadialMeasure::tail(double r) const
{
    require(r >= 0.0 && r <= 1.0, ErrorKind::InvalidRange, "tail argument outside [0,1]");
    return interval_mass(r, 1.0);
}

double RadialMeasure::moment(double x) const
{
    require(x >= 0.0, ErrorKind::InvalidArgument, "moment order must be nonnegative");
    auto g = [x](double r) { return r <= 0.0 ? (x == 0.0 ? 1.0 : 0.0) : std::pow(r, x); };
    const double coarse = integrate(g, 0.0, 1.0, 1e-8);
    const double tol = std::max(std::min(1e-12, 1e-13 * std::fabs(coarse)), 1e-300);
    return integrate(g, 0.0, 1.0, tol);
}

double RadialMeasure::interval_mass(double a, double b) const
{
    require(a <= b, ErrorKind::InvalidRange, "interval_mass needs a <= b");
    double total = 0.0;
    if (density_ && b > a) {
        total = graded_simpson<double>([&](double r) { return density_(r); }, a, b, 1e-12);
    }
    for (const Atom& at : atoms_) {
        if (at.location >= a && at.location <= b) total += at.mass;
    }
    return total;
}

double RadialMeasure::total_mass() const { return interval_mass(0.0, 1.0); }

double RadialMeasure::atom_mass_at(double location) const
{
    double m = 0.0;
    for (const Atom& at : atoms_) {
        if (at.location == location) m += at.mass;
    }
    return m;
}

DoublingReport doubling_report(const RadialMeasure& omega, int depth)
{
    require(depth >= 1, ErrorKind::InvalidArgument, "doubling_report needs depth >= 1");
    DoublingReport rep;
    rep.depth = depth;

    // Nodes 1 - 2^{-k/2}, k = 0..2*depth; even k are the dyadic probe nodes.
    std::vector<double> x;  // log(1-r)
    std::vector<double> y;  // log tail
    std::vector<bool> dyadic;
    double best = 1.0;
    for (int k = 0; k <= 2 * depth; ++k) {
        const double one_minus = std::exp2(-0.5 * k);
        const double r = 1.0 - one_minus;
        const double t = omega.tail(r);
        if (!(t > 0.0)) {
            rep.not_supported_near_one = true;
            break;
        }
        x.push_back(std::log(one_minus));
        y.push_back(std::log(t));
        dyadic.push_back(k % 2 == 0);
        if (k % 2 == 0) {
            const double t2 = omega.tail(0.5 * (1.0 + r));
            if (!(t2 > 0.0)) {
                rep.not_supported_near_one = true;
                break;
            }
            best = std::max(best, t / t2);
        }
    }
    rep.constant_hat = best;

    // Extremal local slopes between consecutive dyadic nodes.
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (dyadic[i]) idx.push_back(i);
    }
    if (idx.size() >= 2) {
        double gmin = std::numeric_limits<double>::infinity();
        double gmax = -gmin;
        for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
            const double s = (y[idx[i + 1]] - y[idx[i]]) / (x[idx[i + 1]] - x[idx[i]]);
            gmin = std::min(gmin, s);
            gmax = std::max(gmax, s);
        }
        rep.regular_fit.gamma = gmin;
        rep.regular_fit.beta = gmax;

        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(idx.size());
        for (std::size_t i : idx) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        rep.regular_fit.least_squares_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

        // Envelope constant over all probe pairs (half-dyadic nodes included).
        double C = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (std::size_t j = i + 1; j < x.size(); ++j) {
                const double d = x[i] - x[j];  // log((1-r)/(1-t)) >= 0
                const double lo = y[j] + gmin * d - y[i];
                const double hi = y[i] - y[j] - gmax * d;
                C = std::max(C, std::exp(std::max(lo, hi)));
            }
        }
        rep.regular_fit.C = C;
    }

    double idbl = 1.0;
    for (int d = 1; d <= depth; ++d) {
        const int n = 1 << d;
        for (int k = 0; k < n; ++k) {
            const double a = static_cast<double>(k) / n;
            const double b = static_cast<double>(k + 1) / n;
            const double m = 0.5 * (a + b);
            const double whole = omega.interval_mass(a, b);
            if (!(whole > 0.0)) continue;
            const double left = omega.interval_mass(a, m);
            const double right = omega.interval_mass(m, b);
            const double worst = std::min(left, right);
            idbl = std::max(idbl, worst > 0.0 ? whole / worst
                                              : std::numeric_limits<double>::infinity());
        }
    }
    rep.interval_doubling = idbl;
    return rep;
}

} // namespace bergman
