#include "bergman/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "bergman/czd.hpp"
#include "bergman/disk.hpp"
#include "bergman/errors.hpp"
#include "bergman/operators.hpp"
#include "bergman/twoweight.hpp"
#include "bergman/weights.hpp"

namespace bergman {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string kv(const std::string& key, double v)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s=%.6g", key.c_str(), v);
    return buf;
}

std::string join(std::initializer_list<std::string> parts)
{
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += ';';
        out += p;
    }
    return out;
}

class Recorder {
public:
    explicit Recorder(SuiteResult& r) : r_(r), t_(Clock::now()) {}

    void row(int crit, const std::string& name, const std::string& param, double value, double ref,
             const std::string& rel, bool pass)
    {
        const auto now = Clock::now();
        const double dt = std::chrono::duration<double>(now - t_).count();
        t_ = now;
        r_.rows.push_back({crit, name, param, value, ref, rel, pass, dt});
    }
    void at_most(int crit, const std::string& name, const std::string& param, double value, double ref)
    {
        row(crit, name, param, value, ref, "<=", value <= ref);
    }
    void below(int crit, const std::string& name, const std::string& param, double value, double ref)
    {
        row(crit, name, param, value, ref, "<", value < ref);
    }
    void at_least(int crit, const std::string& name, const std::string& param, double value, double ref)
    {
        row(crit, name, param, value, ref, ">=", value >= ref);
    }
    void above(int crit, const std::string& name, const std::string& param, double value, double ref)
    {
        row(crit, name, param, value, ref, ">", value > ref);
    }
    void equal(int crit, const std::string& name, const std::string& param, double value, double ref)
    {
        row(crit, name, param, value, ref, "==", value == ref);
    }
    // Measured quantity without a bound of its own.
    void info(int crit, const std::string& name, const std::string& param, double value)
    {
        row(crit, name, param, value, 0.0, "info", std::isfinite(value));
    }

private:
    SuiteResult& r_;
    Clock::time_point t_;
};

int pick(int configured, int fallback) { return configured >= 0 ? configured : fallback; }

double rel_err(cplx a, double b) { return std::abs(a - b) / std::fabs(b); }

cplx random_disk_point(std::mt19937_64& rng, double rmax = 0.999)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double r = rmax * std::sqrt(U(rng));
    return std::polar(r, 2.0 * std::numbers::pi * U(rng));
}

RadialMeasure atom_at(double r) { return RadialMeasure::atoms_only("atom:" + num(r), {{r, 1.0}}); }

Field zero_field(const QuadPtr& q)
{
    return make_field(q, [](cplx) { return 0.0; });
}

// Sparse heavy-tailed nonnegative-or-signed test function.
Field random_field(const QuadPtr& q, std::mt19937_64& rng, bool signed_values)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double density = 0.02 + 0.98 * U(rng);
    Field f = zero_field(q);
    for (double& x : f.values) {
        if (U(rng) < density) {
            x = std::pow(U(rng), -0.5) - 1.0;
            if (signed_values && U(rng) < 0.5) x = -x;
        }
    }
    f.values[rng() % q->size()] += 10.0;
    return f;
}

std::vector<double> weighted_masses(const Field& v)
{
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v.values[i] * v.quad->masses()[i];
    return out;
}

// ---------------------------------------------------------------- criteria 1-4

void kernel_identities(const ExperimentConfig& cfg, Recorder& rec)
{
    std::vector<double> xs;
    for (int k = 0; k <= 9; ++k) xs.push_back(k / 10.0);

    const int n_moments = 900;
    for (double alpha : {0.0, 1.0, 2.0}) {
        const auto omega = RadialMeasure::standard(alpha);
        std::vector<double> moments(n_moments);
        for (int n = 0; n < n_moments; ++n) moments[static_cast<std::size_t>(n)] = omega.moment(2.0 * n + 1.0);
        for (double x : xs) {
            const double closed = std::pow(1.0 - x, -(alpha + 2.0));
            rec.at_most(1, "standard_kernel_rel_err", join({kv("alpha", alpha), kv("x", x)}),
                        rel_err(kernel_series(moments, x, 1e-14), closed), 1e-8);
        }
    }

    const auto mc = construct_omega_from_nu(RadialMeasure::lebesgue(), 1201, cfg.tolerance);
    const auto odd = mc.odd_moments();
    for (double x : xs) {
        const double closed = x == 0.0 ? 1.0 : std::log(1.0 / (1.0 - x)) / (x * (1.0 - x));
        rec.at_most(2, "lebesgue_nu_kernel_rel_err", kv("x", x), rel_err(kernel_series(odd, x, 1e-14), closed), 1e-6);
    }
    rec.at_most(2, "omega1_abs_err", "target=1/2", std::fabs(mc.constructed_moments[1] - 0.5), 1e-10);
    rec.at_most(2, "omega3_abs_err", "target=1/3", std::fabs(mc.constructed_moments[3] - 1.0 / 3.0), 1e-10);

    // φ̂(j) = 1 + H_j; coefficients of the kernel are partial sums, the oracle is the Cauchy product
    // (1 + Σ_{j≥1} x^j/j)·Σ (k+1) x^k.
    const int N = 64;
    std::vector<double> moments(400);
    double H = 0.0, partial = 0.0;
    for (std::size_t j = 0; j < moments.size(); ++j) {
        if (j > 0) H += 1.0 / static_cast<double>(j);
        partial += 1.0 + H;
        moments[j] = 1.0 / (2.0 * partial);
    }
    double worst = 0.0;
    for (int k = 0; k < N; ++k) {
        double conv = k + 1.0;
        for (int i = 1; i <= k; ++i) conv += (k - i + 1.0) / i;
        const double coef = 1.0 / (2.0 * moments[static_cast<std::size_t>(k)]);
        worst = std::max(worst, std::fabs(coef - conv) / conv);
    }
    rec.at_most(3, "harmonic_coefficients_rel_err", kv("count", N), worst, 1e-8);
    for (double x : {0.1, 0.4, 0.6}) {
        const double closed = std::log(std::numbers::e / (1.0 - x)) / ((1.0 - x) * (1.0 - x));
        rec.at_most(3, "harmonic_series_rel_err", kv("x", x), rel_err(kernel_series(moments, x, 1e-14), closed), 1e-8);
    }

    std::vector<double> harmonic, linear;
    for (int n = 0; n <= 50; ++n) {
        harmonic.push_back(1.0 / (n + 1.0));
        linear.push_back(n);
    }
    const auto h = check_completely_monotone(harmonic, 10);
    rec.equal(4, "harmonic_passes", join({kv("k", 10), kv("N", 50)}), h.passed ? 1.0 : 0.0, 1.0);
    const auto l = check_completely_monotone(linear, 10);
    rec.equal(4, "linear_fails", join({kv("k", 10), kv("N", 50)}), l.passed ? 0.0 : 1.0, 1.0);
    rec.equal(4, "linear_violation_k", "", l.first_violation ? l.first_violation->k : -1.0, 1.0);
    rec.equal(4, "linear_violation_n", "", l.first_violation ? l.first_violation->n : -1.0, 0.0);
}

// ---------------------------------------------------------------- criterion 5

void resolvent_lower_bound_suite(const ExperimentConfig& cfg, Recorder& rec)
{
    const int samples = pick(cfg.samples, 10000);
    const std::pair<std::string, RadialMeasure> nus[] = {
        {"lebesgue", RadialMeasure::lebesgue()},
        {"atom1", atom_at(1.0)},
        {"lebesgue+atom:0.5", RadialMeasure::lebesgue().with_atoms({{0.5, 1.0}}, "lebesgue+atom:0.5")},
    };
    std::mt19937_64 rng(cfg.seed);
    for (const auto& [name, nu] : nus) {
        int violations = 0;
        double lowest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < samples; ++i) {
            const double r = resolvent_lower_bound(nu, random_disk_point(rng), 1e-10).ratio;
            lowest = std::min(lowest, r);
            if (!(r >= 1.0)) ++violations;
        }
        const auto param = join({"nu=" + name, kv("samples", samples)});
        rec.equal(5, "violations", param, violations, 0.0);
        rec.at_least(5, "min_ratio", param, lowest, 1.0);
    }
}

// ---------------------------------------------------------------- criterion 6

void kernel_difference(const ExperimentConfig& cfg, Recorder& rec)
{
    const int samples = pick(cfg.samples, 10000);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const std::pair<double, double> cases[] = {{2.0, 1.0}, {4.0, 1.0}, {2.0, 2.0}};
    for (auto [c, gamma] : cases) {
        const auto spec = make_kernel_spec(gamma, RadialMeasure::lebesgue(), 1e-10);
        int violations = 0, checked = 0;
        double worst = 0.0;
        while (checked < samples) {
            const cplx z = random_disk_point(rng);
            const cplx zeta = random_disk_point(rng);
            const double room = std::abs(1.0 - std::conj(zeta) * z) / c;
            const cplx z0 = z + std::polar(room * U(rng), 2.0 * std::numbers::pi * U(rng));
            if (std::abs(z0) >= 1.0) continue;
            const auto res = difference_bound_check(spec, z0, z, zeta, c);
            worst = std::max(worst, res.lhs / res.bound);
            if (res.lhs > res.bound * (1.0 + 1e-8)) ++violations;
            ++checked;
        }
        const auto param = join({kv("c", c), kv("gamma", gamma), kv("samples", samples)});
        rec.equal(6, "violations", param, violations, 0.0);
        rec.at_most(6, "max_lhs_over_bound", param, worst, 1.0 + 1e-8);
    }
    rec.at_most(6, "constant_2_1_abs_err", "target=84*sqrt(2)",
                std::fabs(difference_bound_constant(2.0, 1.0) - 84.0 * std::numbers::sqrt2), 1e-10);
}

// ---------------------------------------------------------------- criterion 7

void tail_ratio_suite(const ExperimentConfig& cfg, Recorder& rec, SuiteResult& out)
{
    struct Instance {
        std::string name;
        double gamma;
        RadialMeasure nu;
        std::function<double(double, double)> tail;  // (x, tol)
    };
    const auto leb = RadialMeasure::lebesgue();
    const auto std1 = RadialMeasure::standard(1.0);
    const std::vector<Instance> instances = {
        {"gamma=1;nu=atom1;omega=lebesgue", 1.0, atom_at(1.0),
         [leb](double x, double tol) { return leb.integrate([](double) { return 1.0; }, x, 1.0, tol); }},
        {"gamma=1;nu=lebesgue;omega=constructed", 1.0, leb,
         [leb](double x, double tol) { return constructed_tail(leb, x, tol); }},
        {"gamma=3;nu=atom0;omega=standard:1", 3.0, atom_at(0.0),
         [std1](double x, double tol) { return std1.integrate([](double) { return 1.0; }, x, 1.0, tol); }},
    };
    const double tol = cfg.tolerance;
    for (const auto& inst : instances) {
        double band[2][2];
        Series s{inst.name, {}, {}};
        for (int t = 0; t < 2; ++t) {
            const double tt = t == 0 ? tol : tol / 10.0;
            const auto spec = make_kernel_spec(inst.gamma, inst.nu, tt);
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (int k = 0; k <= 12; ++k) {
                const double x = 1.0 - std::ldexp(1.0, -k);
                const double r = tail_ratio(spec, [&](double y) { return inst.tail(y, tt); }, x);
                lo = std::min(lo, r);
                hi = std::max(hi, r);
                if (t == 0) {
                    s.x.push_back(k);
                    s.y.push_back(r);
                }
            }
            band[t][0] = lo;
            band[t][1] = hi;
        }
        rec.above(7, "c_low", inst.name, band[0][0], 0.0);
        rec.below(7, "band_ratio", inst.name, band[0][1] / band[0][0], 10.0);
        const double shift = std::max(std::fabs(band[1][0] / band[0][0] - 1.0), std::fabs(band[1][1] / band[0][1] - 1.0));
        rec.below(7, "endpoint_change_tol_div_10", inst.name, shift, 0.1);
        out.series.push_back(std::move(s));
    }
    out.x_label = "k (x = 1 - 2^-k)";
    out.y_label = "ratio";
}

// ---------------------------------------------------------------- criterion 8

void containment(const ExperimentConfig& cfg, Recorder& rec)
{
    const int samples = pick(cfg.samples, 10000);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int violations = 0;
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double len = i % 2 == 0 ? 0.25 * (1.0 - U(rng)) : 0.25 * std::exp2(-30.0 * U(rng));
        const Arc a{U(rng), len};
        const auto K = containing_dyadic(a);
        const double ratio = K.length() / len;
        worst = std::max(worst, ratio);
        if (!K.contains_arc(a) || ratio > 4.0) ++violations;
    }
    rec.equal(8, "violations", kv("samples", samples), violations, 0.0);
    rec.at_most(8, "max_K_over_I", kv("samples", samples), worst, 4.0);
}

// ---------------------------------------------------------------- criterion 9

void comparability(const ExperimentConfig& cfg, Recorder& rec, SuiteResult& out)
{
    const int samples = pick(cfg.samples, 10000);
    const int L = pick(cfg.dyadic_depth, 8);
    const std::pair<std::string, PsiProfile> psis[] = {
        {"gamma=1;nu=atom1", PsiProfile{1.0, atom_at(1.0)}},
        {"gamma=1;nu=lebesgue", PsiProfile{1.0, RadialMeasure::lebesgue()}},
    };
    for (const auto& [name, psi] : psis) {
        const auto a = comparability_constants(psi, samples, cfg.seed, L);
        const auto b = comparability_constants(psi, samples, cfg.seed, L + 2);
        const auto pa = join({name, kv("L", L)});
        rec.above(9, "c_low", pa, a.c_low, 0.0);
        rec.below(9, "c_high", pa, a.c_high, std::numeric_limits<double>::infinity());
        const auto pb = join({name, kv("L", L + 2)});
        rec.above(9, "c_low", pb, b.c_low, 0.0);
        rec.below(9, "c_high", pb, b.c_high, std::numeric_limits<double>::infinity());
        rec.at_most(9, "c_low_change", name, std::fabs(b.c_low / a.c_low - 1.0), 0.2);
        rec.at_most(9, "c_high_change", name, std::fabs(b.c_high / a.c_high - 1.0), 0.2);
        out.series.push_back({name + " c_low", {double(L), double(L + 2)}, {a.c_low, b.c_low}});
        out.series.push_back({name + " c_high", {double(L), double(L + 2)}, {a.c_high, b.c_high}});
    }
    out.x_label = "L";
    out.y_label = "constant";
}

// ---------------------------------------------------------------- criterion 10

void maximal_weak11(const ExperimentConfig& cfg, Recorder& rec)
{
    const int samples = pick(cfg.samples, 100);
    const int J = pick(cfg.depth, 7);
    const int L = pick(cfg.dyadic_depth, J);
    const auto q = build_quadrature(resolve_measure(cfg.omega), J, cfg.j0);
    std::mt19937_64 rng(cfg.seed);
    for (int beta2 : {0, 1}) {
        double worst = 0.0;
        int violations = 0;
        for (int s = 0; s < samples; ++s) {
            const auto v = make_weight(q, random_weight_spec(rng, -0.9, 0.9));
            const auto nu = weighted_masses(v);
            const auto f = random_field(q, rng, true);
            const double r = weak11_maximal_check(*q, nu, beta2, f.values, L);
            worst = std::max(worst, r);
            if (r > 2.0 + 1e-10) ++violations;
        }
        const auto param = join({kv("beta", beta2 / 2.0), kv("J", J), kv("L", L), kv("samples", samples)});
        rec.equal(10, "violations", param, violations, 0.0);
        rec.at_most(10, "max_weak_ratio", param, worst, 2.0 + 1e-10);
    }
}

// ---------------------------------------------------------------- criterion 11

std::vector<std::size_t> node_cells(const DiskQuadrature& q, const PolarRectangle& Q)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const Cell& c = q.cells()[i];
        const double h = 1.0 - c.node_r;
        const double t = c.node_theta - Q.arc.start;
        if (h > Q.h_inner && h <= Q.h && t - std::floor(t) < Q.arc.length) out.push_back(i);
    }
    return out;
}

void czd_suite(const ExperimentConfig& cfg, Recorder& rec)
{
    const int samples = pick(cfg.samples, 50);
    const int J = pick(cfg.depth, 6);
    const auto q = build_quadrature(resolve_measure(cfg.omega), J, cfg.j0);
    const auto& m = q->masses();
    const double eps = std::numeric_limits<double>::epsilon();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::map<std::string, int> bad;
    for (const char* k : {"disjoint_cover", "g_plus_b", "mean_zero_b", "omega_lambda_bound", "good_below_lambda",
                          "selection_at_least_lambda", "property_iv_parent_constant", "property_iv_parent_ratio"})
        bad[k] = 0;
    double parent_constant = 0.0;
    std::size_t rectangles = 0;
    for (int s = 0; s < samples; ++s) {
        Field f = random_field(q, rng, true);
        f.values[rng() % q->size()] = 50.0 * (1.0 + U(rng));
        const int region = 1 + static_cast<int>(rng() % 2);
        const auto R = node_cells(*q, cz_region(region));
        std::vector<char> in_R(q->size(), 0);
        double norm = 0.0;
        for (auto i : R) {
            in_R[i] = 1;
            norm += std::fabs(f.values[i]) * m[i];
        }
        double total = 0.0;
        for (std::size_t i = 0; i < q->size(); ++i) total += std::fabs(f.values[i]) * m[i];
        const double lambda = total * (1.0 + 20.0 * U(rng));
        const auto cz = cz_decompose(f, lambda, region);
        parent_constant = std::max(parent_constant, cz.parent_constant);
        rectangles += cz.selected.size();

        std::vector<int> seen(q->size(), 0);
        for (const auto& sel : cz.selected)
            for (auto i : sel.cells) ++seen[i];
        for (auto i : cz.good_cells) ++seen[i];
        for (std::size_t i = 0; i < q->size(); ++i) {
            if (seen[i] != in_R[i]) ++bad["disjoint_cover"];
            const double fr = in_R[i] ? f.values[i] : 0.0;
            if (std::fabs(cz.g[i] + cz.b[i] - fr) > 4.0 * eps * (std::fabs(fr) + std::fabs(cz.g[i]))) ++bad["g_plus_b"];
        }
        double omega = 0.0;
        for (const auto& sel : cz.selected) {
            double sb = 0.0, sa = 0.0;
            for (auto i : sel.cells) {
                sb += cz.b[i] * m[i];
                sa += std::fabs(f.values[i]) * m[i];
            }
            if (std::fabs(sb) > 1e-12 * sa) ++bad["mean_zero_b"];
            if (sel.abs_average < lambda) ++bad["selection_at_least_lambda"];
            if (sel.abs_average > cz.parent_constant * lambda) ++bad["property_iv_parent_constant"];
            if (!(sel.abs_average < sel.parent_ratio * lambda)) ++bad["property_iv_parent_ratio"];
            omega += sel.mass;
        }
        if (omega * lambda > norm * (1.0 + 1e-14)) ++bad["omega_lambda_bound"];
        for (auto i : cz.good_cells)
            if (!(std::fabs(f.values[i]) < lambda)) ++bad["good_below_lambda"];
    }
    const auto param = join({kv("J", J), kv("samples", samples)});
    for (const auto& [name, count] : bad) rec.equal(11, name + "_violations", param, count, 0.0);
    rec.info(11, "measured_parent_constant", param, parent_constant);
    rec.info(11, "selected_rectangles", param, static_cast<double>(rectangles));
}

// ---------------------------------------------------------------- criterion 12

void stopping_suite(const ExperimentConfig& cfg, Recorder& rec)
{
    const int samples = pick(cfg.samples, 50);
    const int J = pick(cfg.depth, 7);
    const int L = pick(cfg.dyadic_depth, J);
    const double p = cfg.p;
    const auto q = build_quadrature(resolve_measure(cfg.omega), J, cfg.j0);
    std::mt19937_64 rng(cfg.seed);
    int growth = 0, partition = 0, pointwise = 0, embedding = 0, used = 0;
    std::vector<EmbeddingReport> reps;
    for (int s = 0; s < samples; ++s) {
        const auto sigma = make_weight(q, random_weight_spec(rng, -0.5, 0.5));
        Field f = random_field(q, rng, true);
        const int level = static_cast<int>(rng() % 3);
        const DyadicInterval root{0, level, static_cast<std::int64_t>(rng() % (std::uint64_t{1} << level))};
        double on_root = 0.0;
        for (std::size_t i = 0; i < q->size(); ++i) on_root += q->in_square(i, root) ? std::fabs(f.values[i]) : 0.0;
        if (on_root == 0.0) {
            for (std::size_t i = 0; i < q->size(); ++i) {
                if (q->in_square(i, root)) {
                    f.values[i] = 1.0;
                    break;
                }
            }
        }
        ++used;
        const auto fam = stopping_family(f, sigma, root, L);
        for (const auto& S : fam.all()) {
            if (S == root) continue;
            const DyadicInterval parent{0, S.level - 1, S.index / 2};
            const auto up = fam.stopping[static_cast<std::size_t>(parent.flat_id())];
            if (up < 0 || !(fam.expectation[static_cast<std::size_t>(S.flat_id())] > 4.0 * fam.expectation[static_cast<std::size_t>(up)]))
                ++growth;
        }
        for (int l = root.level; l <= L; ++l) {
            const int shift = l - root.level;
            for (std::int64_t k = root.index << shift; k < (root.index + 1) << shift; ++k) {
                const auto lam = fam.stopping[static_cast<std::size_t>((std::int64_t{1} << l) - 1 + k)];
                if (lam < 0) {
                    ++partition;
                    continue;
                }
                const auto S = DyadicInterval::from_flat(0, lam);
                if (!fam.is_stopping[static_cast<std::size_t>(lam)] || S.level > l || (k >> (l - S.level)) != S.index)
                    ++partition;
            }
        }
        const auto nu = weighted_masses(sigma);
        const auto lin = stopping_linearization(fam);
        const auto M = dyadic_maximal(*q, nu, 0, f.values, L);
        for (std::size_t i = 0; i < q->size(); ++i)
            if (lin[i] > (4.0 / 3.0) * M[i] * (1.0 + 1e-10)) ++pointwise;
        const auto e = carleson_embedding_sum(fam, f, sigma, p);
        if (e.sum > std::pow(4.0 / 3.0, p) * e.maximal_norm_p * (1.0 + 1e-10)) ++embedding;
        reps.push_back(e);
    }
    double K = 0.0;
    for (const auto& e : reps) K = std::max(K, e.sum / e.f_norm_p);
    int over = 0;
    for (const auto& e : reps)
        if (e.sum > K * e.f_norm_p * (1.0 + 1e-12)) ++over;
    const auto param = join({kv("J", J), kv("L", L), kv("p", p), kv("samples", used)});
    rec.equal(12, "growth_violations", param, growth, 0.0);
    rec.equal(12, "partition_violations", param, partition, 0.0);
    rec.equal(12, "pointwise_violations", param, pointwise, 0.0);
    rec.equal(12, "embedding_vs_maximal_violations", param, embedding, 0.0);
    rec.equal(12, "global_K_violations", param, over, 0.0);
    // Doob on the nested grid: ‖M f‖_p ≤ p' ‖f‖_p
    const double pp = p / (p - 1.0);
    rec.at_most(12, "global_K", param, K, std::pow(4.0 / 3.0 * pp, p));
}

// ---------------------------------------------------------------- criterion 13

void twoweight_suite(const ExperimentConfig& cfg, Recorder& rec, SuiteResult& out)
{
    const int samples = pick(cfg.samples, 20);
    const int J = pick(cfg.depth, 6);
    const int L = pick(cfg.dyadic_depth, J);
    const auto q = build_quadrature(resolve_measure(cfg.omega), J, cfg.j0);
    require(q->size() <= 4096, ErrorKind::BudgetExceeded, "two-weight suite is limited to 4096 cells");
    const PsiProfile psi = psi_from_kernel(resolve_kernel(cfg.kernel));
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> ratios;
    Series s{"C1 instance ratio", {}, {}};
    for (int k = 0; k < samples; ++k) {
        const auto sigma = make_weight(q, random_weight_spec(rng, -0.6, 0.6));
        const auto u = make_weight(q, random_weight_spec(rng, -0.6, 0.6));
        const int beta2 = static_cast<int>(rng() % 2);
        auto tau = default_sparse_operator(q, beta2, psi, L).tau();
        for (double& t : tau) t *= U(rng) < 0.3 ? 0.0 : 0.1 + 0.9 * U(rng);
        tau[0] = std::max(tau[0], 1e-3);
        const SparseOperator T(q, beta2, L, tau);
        const auto t = testing_constants(T, sigma, u, cfg.p, L);
        const auto param = join({kv("instance", k), kv("beta", beta2 / 2.0), kv("p", cfg.p)});
        rec.at_most(13, "C0_root_le_norm", param, t.C0_root, t.norm * (1.0 + 1e-8));
        rec.at_most(13, "C0_star_root_le_norm", param, t.C0_star_root, t.norm * (1.0 + 1e-8));
        rec.equal(13, "norm_exact", param, t.norm_exact ? 1.0 : 0.0, 1.0);
        rec.info(13, "instance_ratio", param, t.C1_measured);
        ratios.push_back(t.C1_measured);
        s.x.push_back(k);
        s.y.push_back(t.C1_measured);
    }
    const double C1 = *std::max_element(ratios.begin(), ratios.end());
    auto sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    int over = 0;
    for (double r : ratios)
        if (r > C1) ++over;
    const auto param = join({kv("J", J), kv("L", L), kv("samples", samples)});
    rec.equal(13, "single_C1_violations", param, over, 0.0);
    rec.below(13, "C1", join({param, kv("median", median)}), C1, 10.0 * median);
    out.series.push_back(std::move(s));
    out.x_label = "instance";
    out.y_label = "norm / (C0^(1/p) + C0*^(1/p'))";
}

// ---------------------------------------------------------------- criterion 14

void oneweight_suite(const ExperimentConfig& cfg, Recorder& rec, SuiteResult& out)
{
    const int Jn = pick(cfg.depth, 7);
    const std::vector<int> depths = cfg.depth >= 0 ? std::vector<int>{Jn - 2, Jn - 1, Jn} : std::vector<int>{6, 7, 8};
    require(depths.front() >= 1, ErrorKind::Config, "oneweight needs depth J >= 3");
    const auto omega = resolve_measure(cfg.omega);
    const auto spec = resolve_kernel(cfg.kernel);
    const double p = cfg.p;
    const bool defaults = cfg.eta.empty();
    const std::vector<double> etas = defaults ? std::vector<double>{-0.5, 0.0, 0.5} : cfg.eta;

    std::vector<QuadPtr> grids;
    for (int J : depths) grids.push_back(build_quadrature(omega, J, cfg.j0));
    auto char_series = [&](double eta) {
        Series s{kv("eta", eta), {}, {}};
        for (std::size_t k = 0; k < depths.size(); ++k) {
            const auto r = bp_characteristic(power_weight(grids[k], eta), p, depths[k]);
            s.x.push_back(depths[k]);
            s.y.push_back(r.value);
        }
        return s;
    };

    const auto qn = build_quadrature(omega, Jn, cfg.j0);
    std::vector<double> ratios;
    for (double eta : etas) {
        auto s = char_series(eta);
        for (std::size_t k = 0; k < depths.size(); ++k)
            rec.below(14, "B_characteristic", join({kv("eta", eta), kv("J", depths[k]), kv("p", p)}), s.y[k],
                      std::numeric_limits<double>::infinity());
        rec.at_most(14, "B_depth_change", join({kv("eta", eta), kv("J_from", depths.front()), kv("J_to", depths.back())}),
                    std::fabs(s.y.back() / s.y.front() - 1.0), 0.1);
        const auto r = one_weight_norm_experiment(spec, power_weight(qn, eta), p, Jn);
        const auto param = join({kv("eta", eta), kv("J", Jn), kv("p", p)});
        rec.info(14, "norm_B_characteristic", param, r.characteristic);
        rec.info(14, r.norm_exact ? "norm" : "norm_lower_bound", param, r.norm);
        rec.info(14, "norm_over_B", param, r.ratio);
        ratios.push_back(r.ratio);
        out.series.push_back(std::move(s));
    }
    if (ratios.size() > 1) {
        const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
        rec.below(14, "ratio_spread", kv("J", Jn), *hi / *lo, 3.0);
    }
    if (defaults) {
        // boundary exponent: B keeps growing with depth
        auto s = char_series(1.0);
        for (std::size_t k = 0; k < depths.size(); ++k)
            rec.info(14, "B_characteristic_boundary", join({kv("eta", 1.0), kv("J", depths[k]), kv("p", p)}), s.y[k]);
        for (std::size_t k = 1; k < depths.size(); ++k)
            rec.above(14, "boundary_growth_step", join({kv("eta", 1.0), kv("J", depths[k])}), s.y[k] - s.y[k - 1], 0.0);
        const double first = s.y[1] - s.y[0], last = s.y.back() - s.y[s.y.size() - 2];
        rec.at_least(14, "boundary_increment_ratio", kv("eta", 1.0), last / first, 0.5);
        out.series.push_back(std::move(s));
    }
    out.x_label = "J";
    out.y_label = "B_p characteristic";
}

// ---------------------------------------------------------------- criterion 15

// sup over λ of λ (vω)({|P f| > λ}) / ‖f‖_{L¹(vω)} for a finitely supported f.
double sparse_weak_ratio(const KernelOperator& P, const Field& v, const std::vector<std::pair<std::size_t, double>>& f)
{
    const auto& q = *P.quadrature();
    const auto& m = q.masses();
    std::vector<double> g(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        cplx s = 0.0;
        for (const auto& [j, x] : f) s += P.centry(i, j) * (x * m[j]);
        g[i] = std::abs(s);
    }
    double norm = 0.0;
    for (const auto& [j, x] : f) norm += std::fabs(x) * v.values[j] * m[j];
    return weak_type_sup(g, weighted_masses(v)) / norm;
}

void weak11_suite(const ExperimentConfig& cfg, Recorder& rec, SuiteResult& out)
{
    const int samples = pick(cfg.samples, 20);
    const int Jn = pick(cfg.depth, 8);
    const std::vector<int> depths{Jn - 2, Jn - 1, Jn};
    require(depths.front() >= 1, ErrorKind::Config, "weak11 needs depth J >= 3");
    const auto omega = resolve_measure(cfg.omega);
    const auto spec = resolve_kernel(cfg.kernel);
    const std::pair<std::string, double> weights[] = {{"eta=-0.25", -0.25}, {"eta=0.5", 0.5}};
    Series sr[2], sb[2];
    for (int w = 0; w < 2; ++w) {
        sr[w].name = weights[w].first + " weak ratio";
        sb[w].name = weights[w].first + " B1";
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int J : depths) {
        const auto q = build_quadrature(omega, J, cfg.j0);
        const auto P = bergman_operator(q, spec);
        Field v[2] = {power_weight(q, weights[0].second), power_weight(q, weights[1].second)};
        double worst[2] = {0.0, 0.0};
        for (int s = 0; s < samples; ++s) {
            std::vector<std::pair<std::size_t, double>> f;
            const int support = 1 + static_cast<int>(rng() % 8);
            for (int k = 0; k < support; ++k) f.emplace_back(rng() % q->size(), (U(rng) < 0.5 ? -1.0 : 1.0) * (0.1 + U(rng)));
            for (int w = 0; w < 2; ++w) worst[w] = std::max(worst[w], sparse_weak_ratio(P, v[w], f));
        }
        for (int w = 0; w < 2; ++w) {
            const auto param = join({weights[w].first, kv("J", J), kv("samples", samples)});
            rec.info(15, "max_weak_ratio", param, worst[w]);
            const double b1 = b1_characteristic(v[w]).value;
            rec.info(15, "B1_diagnostic", param, b1);
            sr[w].x.push_back(J);
            sr[w].y.push_back(worst[w]);
            sb[w].x.push_back(J);
            sb[w].y.push_back(b1);
        }
    }
    const auto& a = sr[0].y;
    rec.at_most(15, "bounded_weight_ratio_growth", join({weights[0].first, kv("J_from", depths.front())}),
                *std::max_element(a.begin(), a.end()) / a.front(), 1.5);
    rec.at_most(15, "bounded_weight_B1_change", weights[0].first, std::fabs(sb[0].y.back() / sb[0].y.front() - 1.0), 0.1);
    for (std::size_t k = 1; k < depths.size(); ++k) {
        rec.at_least(15, "diverging_weight_ratio_growth", join({weights[1].first, kv("J", depths[k])}),
                     sr[1].y[k] / sr[1].y[k - 1], 1.15);
        rec.at_least(15, "diverging_weight_B1_growth", join({weights[1].first, kv("J", depths[k])}),
                     sb[1].y[k] / sb[1].y[k - 1], 1.15);
    }
    for (auto& s : sr) out.series.push_back(std::move(s));
    for (auto& s : sb) out.series.push_back(std::move(s));
    out.x_label = "J";
    out.y_label = "value";
}

// ---------------------------------------------------------------- criterion 16

void determinism_suite(const ExperimentConfig& cfg, Recorder& rec)
{
    for (const auto& info : suite_catalog()) {
        if (info.name == "determinism") continue;
        ExperimentConfig c = cfg;
        c.suite = info.name;
        const auto first = to_csv(run_suite(c), false);
        const auto second = to_csv(run_suite(c), false);
        rec.equal(16, "byte_identical_csv", join({"suite=" + info.name, kv("bytes", double(first.size()))}),
                  first == second ? 1.0 : 0.0, 1.0);
    }
}

using SuiteFn = std::function<void(const ExperimentConfig&, Recorder&, SuiteResult&)>;

const std::map<std::string, SuiteFn>& suite_functions()
{
    static const std::map<std::string, SuiteFn> fns = {
        {"kernel-identities", [](auto& c, auto& r, auto&) { kernel_identities(c, r); }},
        {"resolvent-lower-bound", [](auto& c, auto& r, auto&) { resolvent_lower_bound_suite(c, r); }},
        {"kernel-difference", [](auto& c, auto& r, auto&) { kernel_difference(c, r); }},
        {"tail-ratio", tail_ratio_suite},
        {"containment", [](auto& c, auto& r, auto&) { containment(c, r); }},
        {"comparability", comparability},
        {"maximal-weak11", [](auto& c, auto& r, auto&) { maximal_weak11(c, r); }},
        {"czd", [](auto& c, auto& r, auto&) { czd_suite(c, r); }},
        {"stopping", [](auto& c, auto& r, auto&) { stopping_suite(c, r); }},
        {"twoweight", twoweight_suite},
        {"oneweight", oneweight_suite},
        {"weak11", weak11_suite},
        {"determinism", [](auto& c, auto& r, auto&) { determinism_suite(c, r); }},
    };
    return fns;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

bool SuiteResult::passed() const
{
    return std::all_of(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.pass; });
}

std::map<int, bool> SuiteResult::criteria() const
{
    std::map<int, bool> out;
    for (const auto& r : rows) {
        auto it = out.emplace(r.criterion, true).first;
        it->second = it->second && r.pass;
    }
    return out;
}

const std::vector<SuiteInfo>& suite_catalog()
{
    static const std::vector<SuiteInfo> suites = {
        {"kernel-identities", {1, 2, 3, 4}, "kernel series identities and complete monotonicity"},
        {"resolvent-lower-bound", {5}, "lower bound for the ν-resolvent on random points"},
        {"kernel-difference", {6}, "explicit-constant kernel difference bound on admissible triples"},
        {"tail-ratio", {7}, "resolvent times tail over (1-x)^(γ-1) along x = 1 - 2^-k"},
        {"containment", {8}, "containing dyadic arc from D^0 or D^1/2 with |K| ≤ 4|I|"},
        {"comparability", {9}, "kernel vs dyadic kernel comparability constants"},
        {"maximal-weak11", {10}, "weak (1,1) of the dyadic maximal function"},
        {"czd", {11}, "Calderón-Zygmund decomposition properties"},
        {"stopping", {12}, "stopping family growth, linearization and Carleson embedding"},
        {"twoweight", {13}, "testing constants of sparse operators at p = 2"},
        {"oneweight", {14}, "B_p characteristic and norm of P⁺ for power weights"},
        {"weak11", {15}, "weak (1,1) of P_ω with a B1 weight and a diverging contrast weight"},
        {"determinism", {16}, "byte-identical CSV on rerun of every other suite"},
    };
    return suites;
}

bool is_known_suite(const std::string& name) { return suite_functions().count(name) > 0; }

SuiteResult run_suite(const ExperimentConfig& cfg)
{
    validate_config(cfg);
    SuiteResult out;
    out.suite = cfg.suite;
    Recorder rec(out);
    suite_functions().at(cfg.suite)(cfg, rec, out);
    return out;
}

std::string to_csv(const SuiteResult& r, bool timestamp)
{
    std::ostringstream os;
    if (timestamp) {
        const std::time_t now = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        os << "# generated " << buf << '\n';
    }
    os << "suite,criterion,case,param,value,reference,relation,pass,runtime_s\n";
    for (const auto& row : r.rows) {
        os << csv_field(r.suite) << ',' << row.criterion << ',' << csv_field(row.case_name) << ','
           << csv_field(row.param) << ',' << num(row.value) << ',' << num(row.reference) << ','
           << csv_field(row.relation) << ',' << (row.pass ? "pass" : "fail") << ','
           << num(timestamp ? row.runtime : 0.0) << '\n';
    }
    return os.str();
}

std::string to_svg(const SuiteResult& r)
{
    const double W = 720, H = 440, left = 80, right = 220, top = 40, bottom = 60;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    bool positive = true;
    for (const auto& s : r.series) {
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.y[k])) continue;
            xmin = std::min(xmin, s.x[k]);
            xmax = std::max(xmax, s.x[k]);
            ymin = std::min(ymin, s.y[k]);
            ymax = std::max(ymax, s.y[k]);
            positive = positive && s.y[k] > 0.0;
        }
    }
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left << "\" y=\"24\" font-size=\"16\" font-family=\"sans-serif\">" << xml_escape(r.suite)
       << "</text>\n";
    if (!(xmin <= xmax)) {
        os << "</svg>\n";
        return os.str();
    }
    auto ty = [&](double y) { return positive ? std::log10(y) : y; };
    double y0 = ty(ymin), y1 = ty(ymax);
    if (y1 - y0 < 1e-12) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + ph - (ty(y) - y0) / (y1 - y0) * ph; };
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    auto label = [&](double x, double y, const std::string& text, const char* anchor) {
        os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\""
           << anchor << "\">" << xml_escape(text) << "</text>\n";
    };
    label(left, top + ph + 16, num(xmin), "middle");
    label(left + pw, top + ph + 16, num(xmax), "middle");
    label(left - 6, top + ph, num(ymin), "end");
    label(left - 6, top + 10, num(ymax), "end");
    label(left + pw / 2, H - 20, r.x_label, "middle");
    label(left - 6, top - 8, r.y_label + (positive ? " (log)" : ""), "start");
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    std::size_t c = 0;
    for (const auto& s : r.series) {
        const char* col = colors[c % 8];
        os << "<path fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" d=\"";
        bool first = true;
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.y[k])) continue;
            os << (first ? "M" : " L") << num(px(s.x[k])) << ' ' << num(py(s.y[k]));
            first = false;
        }
        os << "\"/>\n";
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.y[k])) continue;
            os << "<circle cx=\"" << num(px(s.x[k])) << "\" cy=\"" << num(py(s.y[k])) << "\" r=\"2.5\" fill=\"" << col
               << "\"/>\n";
        }
        const double ly = top + 14 + 16.0 * static_cast<double>(c);
        os << "<path stroke=\"" << col << "\" stroke-width=\"2\" d=\"M" << num(left + pw + 10) << ' ' << num(ly - 4)
           << " L" << num(left + pw + 30) << ' ' << num(ly - 4) << "\"/>\n";
        label(left + pw + 34, ly, s.name, "start");
        ++c;
    }
    os << "</svg>\n";
    return os.str();
}

std::string catalog_text()
{
    std::ostringstream os;
    os << "measures (model.omega, and ν inside kernel references):\n"
       << "  lebesgue              dr on [0,1)\n"
       << "  standard:α            (α+1)(1-r²)^α dr\n"
       << "  power:α               (α+1)(1-r)^α dr\n"
       << "  exponential:c         exp(-c/(1-r)) dr\n"
       << "  atom1                 unit point mass at r = 1\n"
       << "  atom:r                unit point mass at r\n"
       << "  lebesgue+atom:r       dr plus a unit point mass at r\n"
       << "  constructions (kernel-identities suite):\n"
       << "    example1            ω built from ν = lebesgue, kernel (1/(1-x))(1/x)log(1/(1-x))\n"
       << "    harmonic            moments from φ̂(j) = 1 + H_j, kernel log(e/(1-x))/(1-x)²\n"
       << "kernels (model.kernel), B(w) = (1-w)^-γ ∫ dν(r)/(1-rw):\n"
       << "  bergman               γ = 1, ν = atom1: (1-w)^-2\n"
       << "  standard:α            γ = α+2, ν = atom:0: (1-w)^-(α+2)\n"
       << "  example1              γ = 1, ν = lebesgue: (1/(1-w))(1/w)log(1/(1-w))\n"
       << "  γ/<measure>           e.g. 2/lebesgue+atom:0.5\n"
       << "weights (model.weight):\n"
       << "  one                   v ≡ 1\n"
       << "  power:η               (1-|z|)^η\n"
       << "  log:η:k               (1-|z|)^η log(e/(1-|z|))^k\n"
       << "  bump:η:c:w:h          power weight times 1 + h·exp(-(angle gap/w)²) around angle c\n"
       << "suites:\n";
    for (const auto& s : suite_catalog()) {
        std::string crit;
        for (int c : s.criteria) crit += (crit.empty() ? "" : ",") + std::to_string(c);
        char buf[256];
        std::snprintf(buf, sizeof buf, "  %-20s [%s] %s\n", s.name.c_str(), crit.c_str(), s.description.c_str());
        os << buf;
    }
    return os.str();
}

} // namespace bergman
