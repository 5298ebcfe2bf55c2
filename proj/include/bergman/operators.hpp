#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bergman/disk.hpp"
#include "bergman/kernels.hpp"
#include "bergman/linalg.hpp"

namespace bergman {

// Ψ(w) = w^{1-γ} ∫ dν(r)/(1-r(1-w)), so that B(x) = Ψ(1-x)/(1-x).
struct PsiProfile {
    double gamma = 1.0;
    RadialMeasure nu;
    double tol = 1e-12;

    double operator()(double t) const;
    cplx operator()(cplx w) const;
};

PsiProfile psi_from_kernel(const KernelSpec& spec);

struct PsiDiagnostics {
    double decreasing_constant = 1.0;  // sup_{t1 ≤ t2} Ψ(t2)/Ψ(t1)
    double doubling_constant = 1.0;    // sup_t Ψ(t)/Ψ(2t)
    bool positive = true;
};

// Probes t = 2^{-k/4}·(2 - 2^-20), k = 0..4·levels.
PsiDiagnostics psi_diagnostics(const PsiProfile& psi, int levels = 40);

// Node-to-node kernel values g(z_i conj(z_j)), cached per band pair and angular difference.
class NodeKernel {
public:
    NodeKernel(QuadPtr q, std::function<cplx(cplx)> g);

    cplx operator()(std::size_t i, std::size_t j) const;
    const QuadPtr& quadrature() const { return q_; }

private:
    QuadPtr q_;
    std::function<cplx(cplx)> g_;
    int bands_ = 0;
    mutable std::vector<std::vector<cplx>> cache_;
    mutable std::vector<std::vector<unsigned char>> filled_;
};

enum class KernelMode { Signed, Absolute };

// out_i = Σ_j K(i,j) f_j mass_j with K = B(z_i conj z_j) (Signed) or |B(z_i conj z_j)| (Absolute).
class KernelOperator {
public:
    KernelOperator(QuadPtr q, std::function<cplx(cplx)> kernel, KernelMode mode);

    ComplexField apply(const ComplexField& f) const;
    Field apply(const Field& f) const;
    // Raw per-cell arrays.
    Vec<cplx> apply_raw(const Vec<cplx>& f) const;
    // Absolute mode only; uses the cached dense matrix up to 4096 cells.
    Vec<double> apply_raw(const Vec<double>& f) const;
    Vec<double> apply_matrix_free(const Vec<double>& f) const;
    // Restricted to the given output rows.
    std::vector<cplx> apply_rows(std::span<const cplx> f, std::span<const std::size_t> rows) const;

    KernelMode mode() const { return mode_; }
    const QuadPtr& quadrature() const { return q_; }
    double entry(std::size_t i, std::size_t j) const;  // real part (Absolute: the entry itself)
    cplx centry(std::size_t i, std::size_t j) const;

    // Dense (cells × cells) matrix of entry(i,j)·mass_j; only up to 4096 cells.
    Eigen::MatrixXd assemble() const;

private:
    QuadPtr q_;
    NodeKernel K_;
    KernelMode mode_;
    mutable std::shared_ptr<const Eigen::MatrixXd> dense_;
};

// P_ω with B = spec.
KernelOperator bergman_operator(const QuadPtr& q, const KernelSpec& spec);
// P⁺_ω
KernelOperator positive_operator(const QuadPtr& q, const KernelSpec& spec);
// P⁺_{Ψ,μ} with μ the quadrature measure; kernel |Ψ(1-ζ̄z)/(1-ζ̄z)|.
KernelOperator positive_psi_operator(const QuadPtr& q, const PsiProfile& psi);

// out(z) = Σ_{I ∈ D^β, level ≤ L, z ∈ S(I)} coef_I · Σ_{cells in S(I)} f·mass.
class SquareOperator {
public:
    SquareOperator(QuadPtr q, int beta2, int L, std::vector<double> coef);

    Field apply(const Field& f) const;
    Vec<double> apply_raw(const Vec<double>& f) const;
    Eigen::MatrixXd assemble() const;

    int beta2() const { return beta2_; }
    int max_level() const { return L_; }
    const std::vector<double>& coefficients() const { return coef_; }
    const QuadPtr& quadrature() const { return q_; }

private:
    QuadPtr q_;
    int beta2_;
    int L_;
    std::vector<double> coef_;
};

// P^β_{Ψ,μ}: coef_I = Ψ(|I|)/|I|.
SquareOperator dyadic_operator(const QuadPtr& q, int beta2, const PsiProfile& psi, int L);

// Σ_{I ∈ D^β, level ≤ L} 1_{S(I)}(z) 1_{S(I)}(ζ) Ψ(|I|)/|I|.
double dyadic_kernel(int beta2, const PsiProfile& psi, cplx z, cplx zeta, int L);

// Ψ(|1-ζ̄z|)/|1-ζ̄z|
double psi_kernel(const PsiProfile& psi, cplx z, cplx zeta);

struct Comparability {
    double c_low = 0.0;
    double c_high = 0.0;
    int samples = 0;
};

// Pairs with 1-|z|, 1-|ζ| and the angular gap log-uniform, all inside r < 1-2^{-L-1}.
Comparability comparability_constants(const PsiProfile& psi, int sample_count, std::uint64_t seed, int L);

// Smallest D with √2(2+γ) c^γ (3c+1)/(c-1)^{γ+2} ≤ 1/2, c = (1/3 + D)/√2, by bisection.
double separation_threshold(double gamma);

struct SeparatedBound {
    double min_projection = 0.0;  // min over S2 nodes of |P_ω f|
    double average = 0.0;         // ∫_{S1} f dμ / μ(S1)
    double ratio = 0.0;
    DyadicInterval S1;
    Arc S2;
    double D1 = 0.0;
    double D2 = 0.0;
    double distance = 0.0;
};

// S1 = D^0 square of the given level at index 0; S2 = S(arc) with |arc| = ℓ = |S1|, the first arc
// start (in steps of ℓ/16) whose node distance to S1 lies in [D1 ℓ, D2 ℓ], D2 = D1 + 2.
SeparatedBound separated_square_lower_bound(const KernelSpec& spec, const QuadPtr& q, int level,
                                            const Field& f);

struct TailDifference {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

// lhs = Σ over cells outside D(z0, 2|z-z0|) of |B_{z0} - B_z| v mass;
// rhs = min over nodes in D(z0, √2(1-|z0|)) of M_ω(v).
TailDifference tail_difference_bound(const KernelSpec& spec, const Field& v, cplx z0, cplx z, double c);

struct OperatorNorm {
    double value = 0.0;
    bool exact = false;  // false: lower bound
    int iterations = 0;
};

// ‖f ↦ A(c·f)‖ from L^p(w_in·μ) to L^p(w_out·μ), A(g)_i = Σ_j K_ij g_j mass_j with K symmetric.
// p = 2: exact largest singular value. Otherwise Boyd lower bound (A must be positive).
// tests: fields in the input space used as extra starts.
OperatorNorm weighted_operator_norm(const std::function<Vec<double>(const Vec<double>&)>& A,
                                    const DiskQuadrature& q, std::span<const double> c,
                                    std::span<const double> w_in, std::span<const double> w_out, double p,
                                    const std::vector<Vec<double>>& tests = {},
                                    const std::vector<Vec<double>>& dual_tests = {});

} // namespace bergman
