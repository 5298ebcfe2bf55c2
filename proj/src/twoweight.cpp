#include "bergman/twoweight.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

std::int64_t pow2(int n) { return std::int64_t{1} << n; }
std::size_t flat(int level, std::int64_t k) { return static_cast<std::size_t>(pow2(level) - 1 + k); }

double lp_power(const Vec<double>& g, const std::vector<double>& w, const std::vector<double>& m, double p)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) s += std::pow(std::fabs(g(i)), p) * w[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(i)];
    return s;
}

} // namespace

std::vector<double> SparseOperator::coefficients(const DiskQuadrature& q, int beta2, int L, const std::vector<double>& tau)
{
    require(static_cast<std::int64_t>(tau.size()) == square_count(L), ErrorKind::InvalidArgument, "tau table size mismatch");
    const auto mu = q.square_sums(q.masses(), beta2, L);
    std::vector<double> coef(tau.size(), 0.0);
    for (std::size_t id = 0; id < tau.size(); ++id) {
        require(tau[id] >= 0.0 && std::isfinite(tau[id]), ErrorKind::InvalidArgument, "tau must be nonnegative");
        if (mu[id] > 0.0) coef[id] = tau[id] / mu[id];
    }
    return coef;
}

SparseOperator::SparseOperator(QuadPtr q, int beta2, int L, std::vector<double> tau)
    : tau_(std::move(tau)), op_(q, beta2, L, coefficients(*q, beta2, L, tau_))
{
}

Field SparseOperator::apply(const Field& f) const { return op_.apply(f); }
Vec<double> SparseOperator::apply_raw(const Vec<double>& f) const { return op_.apply_raw(f); }
Eigen::MatrixXd SparseOperator::assemble() const { return op_.assemble(); }

SparseOperator SparseOperator::restricted(const std::vector<char>& keep) const
{
    require(keep.size() == tau_.size(), ErrorKind::InvalidArgument, "mask size mismatch");
    std::vector<double> t = tau_;
    for (std::size_t id = 0; id < t.size(); ++id) {
        if (!keep[id]) t[id] = 0.0;
    }
    return {quadrature(), beta2(), max_level(), std::move(t)};
}

SparseOperator default_sparse_operator(const QuadPtr& q, int beta2, const PsiProfile& psi, int L)
{
    const auto mu = q->square_sums(q->masses(), beta2, L);
    std::vector<double> tau(mu.size());
    for (int level = 0; level <= L; ++level) {
        const double len = std::ldexp(1.0, -level);
        for (std::int64_t k = 0; k < pow2(level); ++k) tau[flat(level, k)] = psi(len) * mu[flat(level, k)] / len;
    }
    return {q, beta2, L, std::move(tau)};
}

std::vector<DyadicInterval> StoppingFamily::all() const
{
    std::vector<DyadicInterval> out;
    for (const auto& g : generations) out.insert(out.end(), g.begin(), g.end());
    return out;
}

StoppingFamily stopping_family(const Field& f, const Field& sigma, const DyadicInterval& root, int L)
{
    require_same(f.quad, sigma.quad);
    validate_weight(sigma);
    const auto& q = *f.quad;
    require(root.beta2 == 0, ErrorKind::InvalidArgument, "stopping squares use the nested grid D^0");
    require(L >= root.level && L <= q.depth(), ErrorKind::InvalidArgument, "level cap outside [root level, depth]");
    const auto& m = q.masses();
    std::vector<double> sm(q.size()), fm(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        sm[i] = sigma.values[i] * m[i];
        fm[i] = std::fabs(f.values[i]) * sm[i];
    }
    StoppingFamily fam;
    fam.quad = f.quad;
    fam.root = root;
    fam.max_level = L;
    fam.sigma_mass = q.square_sums(sm, 0, L);
    const auto A = q.square_sums(fm, 0, L);
    fam.expectation.assign(A.size(), 0.0);
    for (std::size_t id = 0; id < A.size(); ++id) {
        if (fam.sigma_mass[id] > 0.0) fam.expectation[id] = A[id] / fam.sigma_mass[id];
    }
    const std::size_t root_id = root.flat_id();
    require(fam.expectation[root_id] > 0.0, ErrorKind::InvalidArgument, "f vanishes on the root square");
    fam.is_stopping.assign(A.size(), 0);
    fam.stopping.assign(A.size(), -1);

    fam.generations.push_back({root});
    fam.is_stopping[root_id] = 1;
    while (true) {
        std::vector<DyadicInterval> next;
        for (const auto& P : fam.generations.back()) {
            const double threshold = 4.0 * fam.expectation[P.flat_id()];
            // maximal squares strictly inside P above the threshold
            std::deque<DyadicInterval> queue;
            if (P.level < L) {
                queue.push_back({0, P.level + 1, 2 * P.index});
                queue.push_back({0, P.level + 1, 2 * P.index + 1});
            }
            while (!queue.empty()) {
                const DyadicInterval S = queue.front();
                queue.pop_front();
                const std::size_t id = S.flat_id();
                if (!(fam.sigma_mass[id] > 0.0)) continue;
                if (fam.expectation[id] > threshold) {
                    next.push_back(S);
                    fam.is_stopping[id] = 1;
                } else if (S.level < L) {
                    queue.push_back({0, S.level + 1, 2 * S.index});
                    queue.push_back({0, S.level + 1, 2 * S.index + 1});
                }
            }
        }
        if (next.empty()) break;
        std::sort(next.begin(), next.end(), [](const DyadicInterval& a, const DyadicInterval& b) { return a.flat_id() < b.flat_id(); });
        fam.generations.push_back(std::move(next));
    }

    // λ(S): top-down inheritance of the nearest stopping ancestor
    fam.stopping[root_id] = static_cast<std::int64_t>(root_id);
    for (int level = root.level + 1; level <= L; ++level) {
        const int shift = level - root.level;
        for (std::int64_t k = root.index << shift; k < (root.index + 1) << shift; ++k) {
            const std::size_t id = flat(level, k);
            fam.stopping[id] = fam.is_stopping[id] ? static_cast<std::int64_t>(id) : fam.stopping[flat(level - 1, k / 2)];
        }
    }
    return fam;
}

std::vector<double> stopping_linearization(const StoppingFamily& family)
{
    const auto& q = *family.quad;
    std::vector<double> out(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        const int top = std::min(family.max_level, q.cells()[i].band);
        for (int level = family.root.level; level <= top; ++level) {
            const std::size_t id = flat(level, q.square_index(i, 0, level));
            if (family.is_stopping[id] && family.stopping[id] >= 0) out[i] += family.expectation[id];
        }
    }
    return out;
}

EmbeddingReport carleson_embedding_sum(const StoppingFamily& family, const Field& f, const Field& sigma, double p)
{
    require(p > 1.0 && std::isfinite(p), ErrorKind::InvalidArgument, "embedding needs 1 < p < inf");
    require_same(f.quad, sigma.quad);
    const auto& q = *f.quad;
    const auto& m = q.masses();
    EmbeddingReport rep;
    for (const auto& L : family.all()) {
        const std::size_t id = L.flat_id();
        rep.sum += std::pow(family.expectation[id], p) * family.sigma_mass[id];
    }
    std::vector<double> nu(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        nu[i] = sigma.values[i] * m[i];
        rep.f_norm_p += std::pow(std::fabs(f.values[i]), p) * nu[i];
    }
    const auto M = dyadic_maximal(q, nu, 0, f.values, family.max_level);
    for (std::size_t i = 0; i < q.size(); ++i) rep.maximal_norm_p += std::pow(M[i], p) * nu[i];
    return rep;
}

TestingReport testing_constants(const SparseOperator& T, const Field& sigma, const Field& u, double p, int depth)
{
    require(p > 1.0 && std::isfinite(p), ErrorKind::InvalidArgument, "testing constants need 1 < p < inf");
    require_same(T.quadrature(), sigma.quad);
    require_same(T.quadrature(), u.quad);
    validate_weight(sigma);
    validate_weight(u);
    require(depth >= 0 && depth <= T.max_level(), ErrorKind::InvalidArgument, "depth exceeds operator level cap");
    const auto& q = *T.quadrature();
    const auto& m = q.masses();
    const std::size_t n = q.size();
    const double pp = p / (p - 1.0);
    const int beta2 = T.beta2();

    TestingReport rep;
    std::vector<Vec<double>> tests, dual_tests;
    double best = -1.0, best_star = -1.0;
    for (int level = 0; level <= depth; ++level) {
        std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(pow2(level)));
        for (std::size_t i = 0; i < n; ++i) {
            const auto s = q.square_index(i, beta2, level);
            if (s >= 0) members[static_cast<std::size_t>(s)].push_back(i);
        }
        for (std::int64_t k = 0; k < pow2(level); ++k) {
            Vec<double> ss = Vec<double>::Zero(static_cast<Eigen::Index>(n)), us = ss, ind = ss;
            double sm = 0.0, um = 0.0;
            for (std::size_t i : members[static_cast<std::size_t>(k)]) {
                ind(i) = 1.0;
                ss(i) = sigma.values[i];
                us(i) = u.values[i];
                sm += sigma.values[i] * m[i];
                um += u.values[i] * m[i];
            }
            if (!(sm > 0.0) || !(um > 0.0)) {
                ++rep.skipped;
                continue;
            }
            const double c0 = lp_power(T.apply_raw(ss), u.values, m, p) / sm;
            const double c0s = lp_power(T.apply_raw(us), sigma.values, m, pp) / um;
            if (c0 > best) {
                best = c0;
                rep.witness = {beta2, level, k};
            }
            if (c0s > best_star) {
                best_star = c0s;
                rep.witness_star = {beta2, level, k};
            }
            if (level <= 2) {
                tests.push_back(ind);
                dual_tests.push_back(ind);
            }
        }
    }
    rep.C0 = std::max(best, 0.0);
    rep.C0_star = std::max(best_star, 0.0);
    rep.C0_root = std::pow(rep.C0, 1.0 / p);
    rep.C0_star_root = std::pow(rep.C0_star, 1.0 / pp);

    // the witnesses are admissible test vectors, so the reported norm dominates both testing constants
    auto indicator = [&](const DyadicInterval& I) {
        Vec<double> v = Vec<double>::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) v(i) = q.in_square(i, I) ? 1.0 : 0.0;
        return v;
    };
    tests.push_back(indicator(rep.witness));
    dual_tests.push_back(indicator(rep.witness_star));
    auto A = [&T](const Vec<double>& x) { return T.apply_raw(x); };
    const auto N = weighted_operator_norm(A, q, sigma.values, sigma.values, u.values, p, tests, dual_tests);
    rep.norm = N.value;
    rep.norm_exact = N.exact;
    // both testing ratios are attained by admissible vectors of the operator or its adjoint
    if (!N.exact) rep.norm = std::max({rep.norm, rep.C0_root, rep.C0_star_root});
    const double denom = rep.C0_root + rep.C0_star_root;
    rep.C1_measured = denom > 0.0 ? rep.norm / denom : 0.0;
    return rep;
}

std::vector<char> split_by_criterion(const Field& f, const Field& g, const Field& sigma, const Field& u, double p,
                                     int beta2, int depth)
{
    require(p > 1.0 && std::isfinite(p), ErrorKind::InvalidArgument, "criterion needs 1 < p < inf");
    require_same(f.quad, g.quad);
    require_same(f.quad, sigma.quad);
    require_same(f.quad, u.quad);
    const auto& q = *f.quad;
    const auto& m = q.masses();
    const double pp = p / (p - 1.0);
    std::vector<double> sm(q.size()), um(q.size()), fs(q.size()), gu(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        require(f.values[i] >= 0.0 && g.values[i] >= 0.0, ErrorKind::InvalidArgument, "f and g must be nonnegative");
        sm[i] = sigma.values[i] * m[i];
        um[i] = u.values[i] * m[i];
        fs[i] = f.values[i] * sm[i];
        gu[i] = g.values[i] * um[i];
    }
    const auto S = q.square_sums(sm, beta2, depth), U = q.square_sums(um, beta2, depth);
    const auto F = q.square_sums(fs, beta2, depth), G = q.square_sums(gu, beta2, depth);
    std::vector<char> out(S.size(), 0);
    for (std::size_t id = 0; id < S.size(); ++id) {
        const double lhs = S[id] > 0.0 ? std::pow(F[id] / S[id], p) * S[id] : 0.0;
        const double rhs = U[id] > 0.0 ? std::pow(G[id] / U[id], pp) * U[id] : 0.0;
        out[id] = lhs >= rhs ? 1 : 0;
    }
    return out;
}

OneWeightReport one_weight_norm_experiment(const KernelSpec& spec, const Field& v, double p, int depth)
{
    validate_weight(v);
    const auto& q = *v.quad;
    OneWeightReport rep;
    rep.characteristic = bp_characteristic(v, p, depth).value;
    const auto Pp = positive_operator(v.quad, spec);
    auto A = [&Pp](const Vec<double>& x) { return Pp.apply_raw(x); };
    const std::vector<double> one(q.size(), 1.0);
    const auto N = weighted_operator_norm(A, q, one, v.values, v.values, p);
    rep.norm = N.value;
    rep.norm_exact = N.exact;
    rep.ratio = rep.norm / std::pow(rep.characteristic, std::max(1.0, 1.0 / (p - 1.0)));

    const PsiProfile psi = psi_from_kernel(spec);
    const auto mu = q.square_sums(q.masses(), 0, depth);
    rep.psi_mass_low = std::numeric_limits<double>::infinity();
    for (int level = 0; level <= depth; ++level) {
        const double len = std::ldexp(1.0, -level);
        const double s = mu[flat(level, 0)];
        const double val = psi(len) * s / len;
        rep.psi_mass_low = std::min(rep.psi_mass_low, val);
        rep.psi_mass_high = std::max(rep.psi_mass_high, val);
        double top = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (q.cells()[i].band == level && q.square_index(i, 0, level) == 0) top += q.masses()[i];
        }
        if (top > 0.0) rep.top_half_ratio = std::max(rep.top_half_ratio, s / top);
    }
    return rep;
}

WeightSpec random_weight_spec(std::mt19937_64& rng, double eta_low, double eta_high)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    WeightSpec w;
    w.name = "random";
    w.eta = eta_low + (eta_high - eta_low) * U(rng);
    w.bump_center = U(rng);
    w.bump_width = 0.02 + 0.2 * U(rng);
    w.bump_height = 10.0 * U(rng) * U(rng);
    return w;
}

} // namespace bergman
