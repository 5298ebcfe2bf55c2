#pragma once

#include <cstdint>
#include <vector>

#include "bergman/disk.hpp"

namespace bergman {

class KernelOperator;
struct KernelSpec;

// R1 = S([0,1/2)), R2 = S([1/2,1)).
PolarRectangle cz_region(int region);

struct SelectedRectangle {
    PolarRectangle rect;
    int generation = 0;
    std::vector<std::uint32_t> cells;
    double mass = 0.0;
    double abs_average = 0.0;  // ω(Q)^{-1} ∫_Q |f|
    double average = 0.0;      // ω(Q)^{-1} ∫_Q f
    double parent_ratio = 1.0; // ω(parent)/ω(Q); 1/ω(R) for the root
};

struct CZDecomposition {
    QuadPtr quad;
    int region = 1;
    double lambda = 0.0;
    std::vector<SelectedRectangle> selected;
    std::vector<std::uint32_t> good_cells;  // F
    std::vector<double> g;
    std::vector<double> b;
    double parent_constant = 1.0;  // max parent_ratio over selected
    double omega_selected = 0.0;   // ω(Ω)
    double f_norm_region = 0.0;    // ‖f 1_R‖_{L^1_ω}
    int unresolved = 0;            // F cells with |f| > λ
    int visited = 0;
};

// Greedy top-down selection with ≥ λ. Recursion stops at rectangles holding a single cell; empty
// children are dropped. Throws InvalidArgument unless λ > ‖f‖_{L^1_ω}.
CZDecomposition cz_decompose(const Field& f, double lambda, int region);

struct CZWeakReport {
    double b1 = 1.0;
    double good_ratio = 0.0;         // ‖g‖²_{L²(vω)} / (λ B1 ‖f1_R‖_{L¹(vω)})
    double bad_tail_ratio = 0.0;     // ∫_{D\Ω'} P⁺|b| v dω / (B1² ‖f1_R‖_{L¹(vω)})
    double omega_prime_ratio = 0.0;  // λ (vω)(Ω') / ‖f1_R‖_{L¹(vω)}
    double weak_ratio = 0.0;         // λ (vω)({P⁺(f1_R) > λ}) / ‖f1_R‖_{L¹(vω)}
    std::size_t rectangles = 0;
    double parent_constant = 1.0;
};

// Ω' = union of the doubled discs D(z_k, 2ρ_k), z_k the polar centre of Q_k and ρ_k its largest corner distance.
CZWeakReport cz_reconstruct_weak11_bound(const KernelOperator& Pplus, const Field& v, const Field& f, double lambda,
                                         int region);
CZWeakReport cz_reconstruct_weak11_bound(const KernelSpec& spec, const Field& v, const Field& f, double lambda,
                                         int region);

} // namespace bergman
