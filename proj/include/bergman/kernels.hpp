#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bergman/measures.hpp"

namespace bergman {

using cplx = std::complex<double>;

// B(w) = (1-w)^{-gamma} ∫ dν(r)/(1-rw); B_z(ζ) = B(conj(z)ζ).
struct KernelSpec {
    double gamma = 1.0;
    RadialMeasure nu;
    std::vector<double> omega_moments;  // ω_{2k+1}, optional cache
    double series_tolerance = 1e-12;

    cplx operator()(cplx w) const;
};

KernelSpec make_kernel_spec(double gamma, RadialMeasure nu, double tol = 1e-12);

// Σ_n x^n / (2 ω_{2n+1}) with the tail-bound truncation rule.
cplx kernel_series(std::span<const double> moments, cplx x, double tol);

cplx kernel_integral(const KernelSpec& spec, cplx w);

// ∫ dν(r)/(1-rw)
cplx nu_resolvent(const RadialMeasure& nu, cplx w, double tol);

struct MomentConstruction {
    double shift_a = 0.5;
    std::vector<double> F_values;            // F(a+m), m = 0..N
    std::vector<double> phi_coefficients;    // φ̂(j) = ∫ r^j dν
    std::vector<double> constructed_moments; // ω_m = 1/(2F(a+m))
    double partial_sum_error = 0.0;          // max |F(a+2n+1) - Σ_{j≤n} φ̂(j)|
    double divergence_proxy = 0.0;           // ∫_0^{1-2^-30} dν/(1-r)
    double divergence_tail = 0.0;            // same integral over [1-2^-15, 1-2^-30)
    bool divergence_warning = false;
    double omega_atom_at_one = 0.0;          // lim_m ω_m estimate

    // ω_{2k+1}, k = 0..
    std::vector<double> odd_moments() const;
};

// F(1/2+m) = ∫ (1 - r^{(m+1)/2})/(1-r) dν, real m >= -1.
double construction_F(const RadialMeasure& nu, double m, double tol = 1e-12);

MomentConstruction construct_omega_from_nu(const RadialMeasure& nu, int m_max, double tol = 1e-12);

// ω_s = ∫ r^s dω for the measure built from ν, any real s >= 0.
double constructed_moment(const RadialMeasure& nu, double s, double tol = 1e-12);

// ω̂(x) for the measure built from ν, by Gaver–Stehfest inversion of s ↦ ω_s / s.
double constructed_tail(const RadialMeasure& nu, double x, double tol = 1e-12, int terms = 14);

std::vector<double> stehfest_weights(int terms);

struct MonotonicityReport {
    int max_order_checked = 0;
    struct Violation {
        int k = 0;
        int n = 0;
        double value = 0.0;
    };
    std::optional<Violation> first_violation;
    bool passed = true;
};

MonotonicityReport check_completely_monotone(std::span<const double> seq, int k_max);

struct ResolventLowerBound {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

ResolventLowerBound resolvent_lower_bound(const RadialMeasure& nu, cplx z, double tol = 1e-12);

double tail_ratio(const KernelSpec& spec, const RadialMeasure& omega, double x);
double tail_ratio(const KernelSpec& spec, const std::function<double(double)>& omega_tail, double x);

double difference_bound_constant(double c, double gamma);

struct DifferenceBound {
    double lhs = 0.0;
    double bound = 0.0;
};

DifferenceBound difference_bound_check(const KernelSpec& spec, cplx z0, cplx z, cplx zeta, double c);

struct EquivalenceRatios {
    double ratio_low = 0.0;
    double ratio_high = 0.0;
};

EquivalenceRatios one_minus_rz_equivalence(cplx z, double r);

// Nonnegative least-squares fit of point masses at the grid nodes to moments m_n = ∫ r^n dω.
std::vector<double> hausdorff_nnls(std::span<const double> moments, std::span<const double> grid,
                                   int sweeps = 4000);

} // namespace bergman
