#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "bergman/measures.hpp"

namespace bergman {

using cplx = std::complex<double>;

// Angle of z normalized to [0,1).
double unit_angle(cplx z);

// Arc of the circle in normalized units: [start, start+length) mod 1.
struct Arc {
    double start = 0.0;
    double length = 1.0;

    bool contains(double t) const;
};

// Arc of D^β at level ℓ: [(m+β)2^-ℓ, (m+1+β)2^-ℓ) mod 1. beta2 = 2β ∈ {0,1}.
// D^0 is nested; D^{1/2} is not (its halves are D^0 arcs one level down).
struct DyadicInterval {
    int beta2 = 0;
    int level = 0;
    std::int64_t index = 0;

    double length() const { return std::ldexp(1.0, -level); }
    double start() const;
    Arc arc() const { return {start(), length()}; }
    bool contains_angle(double t) const;
    bool contains_arc(const Arc& a) const;

    std::int64_t flat_id() const { return (std::int64_t{1} << level) - 1 + index; }
    static DyadicInterval from_flat(int beta2, std::int64_t flat);

    bool operator==(const DyadicInterval&) const = default;
};

// Index m of the D^β arc at level ℓ containing the normalized angle t.
std::int64_t arc_index(double t, int beta2, int level);

// Number of flat square ids at levels 0..L.
inline std::int64_t square_count(int L) { return (std::int64_t{2} << L) - 1; }

// {re^{2πit}: 1-h ≤ r < 1-h', t ∈ arc}. A Carleson square has h' = 0 and h = min(1, |I|).
struct PolarRectangle {
    Arc arc;
    double h = 1.0;
    double h_inner = 0.0;

    bool contains(cplx z) const;
    bool is_carleson() const { return h_inner == 0.0; }
};

PolarRectangle carleson_square(const DyadicInterval& I);
PolarRectangle carleson_square(const Arc& a);
// S(I) minus its two child squares: band [1-|I|, 1-|I|/2) over I.
PolarRectangle top_half(const DyadicInterval& I);

// Arc halves times radial halves; for a Carleson square the first two are the child squares.
std::array<PolarRectangle, 4> cz_children(const PolarRectangle& q);

// Smallest K in D^0 ∪ D^{1/2} with a ⊂ K; ties go to β = 0.
DyadicInterval containing_dyadic(const Arc& a);

// Smallest I in D^β with both angles in I and |I| ≥ max(1-|z|, 1-|ζ|).
DyadicInterval minimal_common_square(cplx z, cplx zeta, int beta2);

struct Cell {
    int band = 0;          // 0 is the core disk r < 1/2
    std::int64_t k = 0;    // angular index within the band
    int angular_exp = 0;   // arc length 2^-angular_exp
    double r_lo = 0.0;
    double r_hi = 0.0;
    double theta_lo = 0.0; // normalized
    cplx node;
    double node_r = 0.0;
    double node_theta = 0.0;
    double mass = 0.0;     // (ω⊗m)(cell) with angular factor dθ/π
};

class DiskQuadrature {
public:
    // Cells: core {r < 1/2} with 2^{j0+1} arcs, bands [1-2^-j, 1-2^-j-1) with 2^{j+j0} arcs, j = 1..J.
    DiskQuadrature(const RadialMeasure& omega, int J, int j0, double tol = 1e-13);

    int depth() const { return J_; }
    int j0() const { return j0_; }
    double truncation_radius() const { return 1.0 - std::ldexp(1.0, -J_ - 1); }
    const RadialMeasure& omega() const { return omega_; }

    std::size_t size() const { return cells_.size(); }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<double>& masses() const { return masses_; }
    const std::vector<cplx>& nodes() const { return nodes_; }
    double total_mass() const;

    std::size_t band_offset(int band) const { return band_offset_[band]; }
    std::size_t band_size(int band) const { return band_offset_[band + 1] - band_offset_[band]; }
    // ∫_band r dω
    double band_moment(int band) const { return band_moment_[band]; }

    // Index of the D^β square of level ℓ containing the cell, or -1 when the cell is below it.
    std::int64_t square_index(std::size_t cell, int beta2, int level) const;
    bool in_square(std::size_t cell, const DyadicInterval& I) const;

    // Per flat square id at levels ≤ L: Σ_{cells in S(I)} w[cell]. Cost O(cells·L).
    std::vector<double> square_sums(std::span<const double> w, int beta2, int L) const;

    std::vector<std::size_t> cells_in(const PolarRectangle& q) const;

private:
    RadialMeasure omega_;
    int J_ = 0;
    int j0_ = 0;
    std::vector<Cell> cells_;
    std::vector<double> masses_;
    std::vector<cplx> nodes_;
    std::vector<std::size_t> band_offset_;
    std::vector<double> band_moment_;
};

using QuadPtr = std::shared_ptr<const DiskQuadrature>;

// Throws BudgetExceeded above 2^20 cells.
QuadPtr build_quadrature(const RadialMeasure& omega, int J, int j0 = 3, double tol = 1e-13);

template <class T>
struct BasicField {
    QuadPtr quad;
    std::vector<T> values;

    std::size_t size() const { return values.size(); }
};

using Field = BasicField<double>;
using ComplexField = BasicField<cplx>;

Field make_field(const QuadPtr& q, const std::function<double(cplx)>& f);
ComplexField make_complex_field(const QuadPtr& q, const std::function<cplx(cplx)>& f);

// Throws QuadratureMismatch when a and b do not share a quadrature.
void require_same(const QuadPtr& a, const QuadPtr& b);

// (Σ |f|^p w mass)^{1/p}; empty w means w ≡ 1.
double lp_norm(const DiskQuadrature& q, std::span<const double> f, double p,
               std::span<const double> w = {});

std::vector<std::size_t> disc_family(const DiskQuadrature& q, cplx a, double r);

} // namespace bergman
