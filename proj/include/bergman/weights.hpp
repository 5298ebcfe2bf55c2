#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bergman/disk.hpp"

namespace bergman {

class KernelOperator;

// (1-|z|)^eta · log(e/(1-|z|))^log_power · (1 + bump_height·exp(-(angle gap/bump_width)^2))
struct WeightSpec {
    std::string name = "one";
    double eta = 0.0;
    double log_power = 0.0;
    double bump_center = 0.0;  // normalized angle
    double bump_width = 0.1;
    double bump_height = 0.0;
};

Field make_weight(const QuadPtr& q, const WeightSpec& spec);
Field power_weight(const QuadPtr& q, double eta);
// Throws InvalidArgument unless all values are positive and finite.
void validate_weight(const Field& v);

// σ = v^{1-p'}
Field dual_weight(const Field& v, double p);

struct CharacteristicReport {
    double value = 1.0;
    DyadicInterval witness;
    int depth = 0;
    std::vector<double> per_depth;  // running max over levels ≤ ℓ
    int skipped = 0;                // zero-mass squares
};

// sup over S(I), I ∈ D^0 ∪ D^{1/2}, level ≤ depth, of ⟨v⟩_S ⟨v^{-p'/p}⟩_S^{p/p'} w.r.t. the quadrature measure.
CharacteristicReport bp_characteristic(const Field& v, double p, int depth);

// Same sup with the classical measure (1-|z|^2)^alpha dA on each cell, computed from cell geometry.
CharacteristicReport bp_alpha_characteristic(const Field& v, double p, double alpha, int depth);

// Averages over the finite disc family: D(a, k(1-|a|)) for nodes a and k ∈ {1, √2, 2, 4}; discs
// D((1-ρ)e^{2πis/2^{k+2}}, ρ) touching the boundary at ρ = 2^-k, k = 0..J+1; and D(0, 2).
class DiscMaximal {
public:
    explicit DiscMaximal(QuadPtr q);

    // M_ω f at every node.
    std::vector<double> operator()(std::span<const double> f) const;
    std::size_t disc_count() const { return members_.size(); }
    const QuadPtr& quadrature() const { return q_; }

private:
    QuadPtr q_;
    std::vector<std::vector<std::uint32_t>> members_;
};

double disc_maximal(const DiscMaximal& M, std::span<const double> f, std::size_t node);

// max over nodes of M_ω(v)/v
CharacteristicReport b1_characteristic(const Field& v, const DiscMaximal& M);
CharacteristicReport b1_characteristic(const Field& v);

// M_{ν,D^β} f(z) = max over S(I) ∋ z, level ≤ L, ν(S) > 0 of ν(S)^{-1} ∫_S |f| dν.
std::vector<double> dyadic_maximal(const DiskQuadrature& q, std::span<const double> nu, int beta2,
                                   std::span<const double> f, int L);

// sup_λ λ·ν({g > λ}), computed exactly from the sorted values of g.
double weak_type_sup(std::span<const double> g, std::span<const double> nu);
// max over the given λ of λ·ν({g > λ}).
double weak_type_on_grid(std::span<const double> g, std::span<const double> nu, std::span<const double> lambdas);
// λ_k = lo·2^{k/4} up to hi.
std::vector<double> geometric_lambda_grid(double lo, double hi);

// sup_λ λ ν({M f > λ}) / ‖f‖_{L^1_ν}
double weak11_maximal_check(const DiskQuadrature& q, std::span<const double> nu, int beta2,
                            std::span<const double> f, int L);

struct WeakProjection {
    double signed_ratio = 0.0;    // P_ω
    double positive_ratio = 0.0;  // P⁺_ω
};

// sup_λ λ (vω)({|P f| > λ}) / ‖f‖_{L^1_ω(v)} for P = P_ω and P⁺_ω.
WeakProjection weak11_projection_check(const KernelOperator& P, const KernelOperator& Pplus, const Field& v,
                                       const Field& f);

} // namespace bergman
