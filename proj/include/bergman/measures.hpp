#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace bergman {

struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

// Positive measure on [0,1]: an optional density on [0,1) plus finitely many atoms.
class RadialMeasure {
public:
    using Density = std::function<double(double)>;

    RadialMeasure() = default;
    RadialMeasure(std::string name, Density density, std::vector<Atom> atoms = {});

    static RadialMeasure lebesgue();
    // (alpha+1)(1-r^2)^alpha
    static RadialMeasure standard(double alpha);
    // (alpha+1)(1-r)^alpha
    static RadialMeasure power(double alpha);
    // exp(-c/(1-r)), rapidly decreasing near the boundary
    static RadialMeasure exponential(double c);
    static RadialMeasure atoms_only(std::string name, std::vector<Atom> atoms);

    RadialMeasure with_atoms(const std::vector<Atom>& extra, std::string name = {}) const;

    const std::string& name() const { return name_; }
    bool has_density() const { return static_cast<bool>(density_); }
    double density(double r) const;
    const std::vector<Atom>& atoms() const { return atoms_; }

    // Integral of g over [a,b) (closed at b when b == 1): density part by graded adaptive
    // Simpson at absolute tolerance tol, atoms summed exactly.
    double integrate(const std::function<double(double)>& g, double a, double b,
                     double tol = 1e-12) const;
    std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& g,
                                           double a, double b, double tol = 1e-12) const;

    // ∫_{[r,1]} dω
    double tail(double r) const;
    // ∫ r^x dω
    double moment(double x) const;
    // ∫_{[a,b]} dω, closed at both ends
    double interval_mass(double a, double b) const;
    double total_mass() const;
    double atom_mass_at(double location) const;

private:
    std::string name_;
    Density density_;
    std::vector<Atom> atoms_;
};

struct RegularFit {
    double gamma = 0.0;
    double beta = 0.0;
    double C = 1.0;
    double least_squares_slope = 0.0;
};

struct DoublingReport {
    double constant_hat = 1.0;
    RegularFit regular_fit;
    double interval_doubling = 1.0;
    bool not_supported_near_one = false;
    int depth = 0;
};

DoublingReport doubling_report(const RadialMeasure& omega, int depth);

} // namespace bergman
