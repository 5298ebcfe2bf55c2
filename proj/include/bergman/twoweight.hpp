#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bergman/operators.hpp"
#include "bergman/weights.hpp"

namespace bergman {

// T f = Σ_S τ_S (E^μ_S f) 1_S over the squares of D^β with level ≤ L; τ indexed by flat square id.
class SparseOperator {
public:
    SparseOperator(QuadPtr q, int beta2, int L, std::vector<double> tau);

    Field apply(const Field& f) const;
    Vec<double> apply_raw(const Vec<double>& f) const;
    Eigen::MatrixXd assemble() const;
    // Same operator with τ_S zeroed where keep[id] == 0.
    SparseOperator restricted(const std::vector<char>& keep) const;

    const std::vector<double>& tau() const { return tau_; }
    int beta2() const { return op_.beta2(); }
    int max_level() const { return op_.max_level(); }
    const QuadPtr& quadrature() const { return op_.quadrature(); }

private:
    static std::vector<double> coefficients(const DiskQuadrature& q, int beta2, int L, const std::vector<double>& tau);

    std::vector<double> tau_;
    SquareOperator op_;
};

// τ_{S(I)} = Ψ(|I|) μ(S(I)) / |I|
SparseOperator default_sparse_operator(const QuadPtr& q, int beta2, const PsiProfile& psi, int L);

struct StoppingFamily {
    QuadPtr quad;
    DyadicInterval root;
    int max_level = 0;
    std::vector<std::vector<DyadicInterval>> generations;
    std::vector<double> expectation;      // E^{σμ}_S |f| by flat id (β = 0), 0 for σμ(S) = 0
    std::vector<double> sigma_mass;       // σμ(S) by flat id
    std::vector<std::int64_t> stopping;   // λ(S) as a flat id, -1 outside the root
    std::vector<char> is_stopping;

    std::vector<DyadicInterval> all() const;
};

// Breadth-first L_i generations with factor 4 on the nested grid D^0, levels ≤ L.
// Throws InvalidArgument if E^{σμ}_{S0}|f| = 0.
StoppingFamily stopping_family(const Field& f, const Field& sigma, const DyadicInterval& root, int L);

// Σ_{L ∋ z} E^{σμ}_L |f| at every cell.
std::vector<double> stopping_linearization(const StoppingFamily& family);

struct EmbeddingReport {
    double sum = 0.0;          // Σ_L (E_L|f|)^p σμ(L)
    double f_norm_p = 0.0;     // ‖f‖^p_{L^p(σμ)}
    double maximal_norm_p = 0.0;  // ‖M_{σμ} f‖^p_{L^p(σμ)} on D^0
};

EmbeddingReport carleson_embedding_sum(const StoppingFamily& family, const Field& f, const Field& sigma, double p);

struct TestingReport {
    double C0 = 0.0;        // max_S ‖T(σ1_S)‖^p_{L^p_μ(u)} / σμ(S)
    double C0_star = 0.0;   // max_S ‖T(u1_S)‖^{p'}_{L^{p'}_μ(σ)} / uμ(S)
    double C0_root = 0.0;       // C0^{1/p}
    double C0_star_root = 0.0;  // C0*^{1/p'}
    DyadicInterval witness;
    DyadicInterval witness_star;
    double norm = 0.0;      // ‖T(σ·)‖_{L^p(σ) → L^p(u)}
    bool norm_exact = false;
    double C1_measured = 0.0;  // norm / (C0_root + C0_star_root)
    int skipped = 0;
};

TestingReport testing_constants(const SparseOperator& T, const Field& sigma, const Field& u, double p, int depth);

// in_S1[id] = 1 iff (E^{σμ}_S f)^p σμ(S) ≥ (E^{uμ}_S g)^{p'} uμ(S), for the squares of D^β with level ≤ depth.
std::vector<char> split_by_criterion(const Field& f, const Field& g, const Field& sigma, const Field& u, double p,
                                     int beta2, int depth);

struct OneWeightReport {
    double characteristic = 0.0;  // B_{p,ω}(v)
    double norm = 0.0;            // ‖P⁺_ω‖ on L^p_ω(v)
    bool norm_exact = false;
    double ratio = 0.0;           // norm / B^{max(1, 1/(p-1))}
    double psi_mass_low = 0.0;    // min over levels of Ψ(|I|) μ(S(I)) / |I|
    double psi_mass_high = 0.0;
    double top_half_ratio = 0.0;  // max over levels of μ(S(I)) / μ(T(I))
};

OneWeightReport one_weight_norm_experiment(const KernelSpec& spec, const Field& v, double p, int depth);

// Power law × angular bump with parameters drawn from rng.
WeightSpec random_weight_spec(std::mt19937_64& rng, double eta_low, double eta_high);

} // namespace bergman
