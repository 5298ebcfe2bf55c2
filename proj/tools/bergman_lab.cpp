#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "bergman/config.hpp"
#include "bergman/czd.hpp"
#include "bergman/errors.hpp"
#include "bergman/operators.hpp"
#include "bergman/suites.hpp"
#include "bergman/twoweight.hpp"
#include "bergman/weights.hpp"

using namespace bergman;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitContract = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr std::size_t kApplyBudget = 16384;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string table_csv(const Table& t, bool timestamp)
{
    std::ostringstream os;
    if (timestamp) {
        const std::time_t now = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        os << "# generated " << buf << '\n';
    }
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
        os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::Config, "cannot write " + path.string());
    out << text;
}

struct Options {
    std::string config_path;
    std::string suite;
    std::uint64_t seed = 0;
    int depth = -1;
    std::string out;
    bool no_timestamp = false;
    bool svg = false;
};

ExperimentConfig effective_config(const Options& o, const CLI::App& app)
{
    ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    if (app.count("--suite")) cfg.suite = o.suite;
    if (app.count("--seed")) cfg.seed = o.seed;
    if (app.count("--depth")) cfg.depth = o.depth;
    if (app.count("--out")) cfg.out_dir = o.out;
    if (o.no_timestamp) cfg.timestamp = false;
    if (o.svg) cfg.svg = true;
    return cfg;
}

int emit(const ExperimentConfig& cfg, const std::string& name, const Table& t)
{
    const auto text = table_csv(t, cfg.timestamp);
    write_file(std::filesystem::path(cfg.out_dir) / (name + ".csv"), text);
    std::cout << text;
    return kExitPass;
}

int run_named_suite(const ExperimentConfig& cfg)
{
    const auto r = run_suite(cfg);
    const auto dir = std::filesystem::path(cfg.out_dir);
    write_file(dir / (cfg.suite + ".csv"), to_csv(r, cfg.timestamp));
    if (cfg.svg) write_file(dir / (cfg.suite + ".svg"), to_svg(r));
    int failed = 0;
    for (const auto& row : r.rows) {
        if (!row.pass) {
            ++failed;
            std::cerr << "FAIL criterion " << row.criterion << ' ' << row.case_name << " [" << row.param
                      << "] value=" << num(row.value) << ' ' << row.relation << ' ' << num(row.reference) << '\n';
        }
    }
    std::cout << "suite " << cfg.suite << ": " << (failed ? "FAIL" : "PASS") << " (" << r.rows.size() << " rows, "
              << failed << " failed) -> " << (dir / (cfg.suite + ".csv")).string() << '\n';
    return failed ? kExitContract : kExitPass;
}

void require_p(double p)
{
    require(std::isfinite(p) && p > 1.0, ErrorKind::Config, "p must be finite and > 1, got " + num(p));
}

QuadPtr grid_for(const ExperimentConfig& cfg, int fallback)
{
    const int J = cfg.depth >= 0 ? cfg.depth : fallback;
    require(J >= 1 && J <= 12, ErrorKind::Config, "grid depth J must be in [1, 12]");
    return build_quadrature(resolve_measure(cfg.omega), J, cfg.j0);
}

Field test_function(const QuadPtr& q, const std::string& name)
{
    if (name == "one") return make_field(q, [](cplx) { return 1.0; });
    if (name == "re-zbar") return make_field(q, [](cplx z) { return z.real(); });
    if (name == "disc") {
        return make_field(q, [](cplx z) { return std::abs(z - 0.6) < 0.3 ? 1.0 : 0.0; });
    }
    fail(ErrorKind::Config, "unknown test function '" + name + "' (one, re-zbar, disc)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"bergman-lab: weighted Bergman projection experiments"};
    app.fallthrough();
    app.require_subcommand(0, 1);
    Options o;
    app.add_option("--config", o.config_path, "INI config file")->check(CLI::ExistingFile);
    app.add_option("--suite", o.suite, "suite name (see catalog)");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--depth", o.depth, "grid depth J");
    app.add_option("--out", o.out, "output directory");
    app.add_flag("--no-timestamp", o.no_timestamp, "omit the timestamp line and runtimes");
    app.add_flag("--svg", o.svg, "also write an SVG plot");

    std::string kernel_ref, omega_ref, weight_ref, fname = "one";
    double p = 2.0, eta = 0.0, lambda_factor = 4.0;
    int samples = -1, region = 1, level = -1;
    bool p_set = false;

    auto* run = app.add_subcommand("run", "run a named suite");
    auto* catalog = app.add_subcommand("catalog", "list measures, kernels, weights and suites");

    auto* proj = app.add_subcommand("proj", "projection operators");
    proj->require_subcommand(1);
    auto* proj_apply = proj->add_subcommand("apply", "apply P_ω to a test function");
    proj_apply->add_option("--f", fname, "one | re-zbar | disc");
    auto* proj_norm = proj->add_subcommand("norm", "norm of P⁺_ω on L^p_ω((1-|z|)^η)");
    proj_norm->add_option("--p", p);
    proj_norm->add_option("--eta", eta);
    auto* proj_cmp = proj->add_subcommand("compare-dyadic", "comparability of the kernel with the dyadic kernel");
    proj_cmp->add_option("--samples", samples);
    proj_cmp->add_option("--level", level, "dyadic depth L");

    auto* weights = app.add_subcommand("weights", "weight characteristics");
    weights->require_subcommand(1);
    auto* w_char = weights->add_subcommand("char", "B_p characteristic per dyadic depth");
    w_char->add_option("--p", p);
    auto* w_weak = weights->add_subcommand("weak11", "weak (1,1) ratios of M and P_ω on random f");
    w_weak->add_option("--samples", samples);

    auto* czd = app.add_subcommand("czd", "Calderón-Zygmund decomposition");
    czd->require_subcommand(1);
    auto* czd_run = czd->add_subcommand("run", "decompose a test function");
    czd_run->add_option("--f", fname, "one | re-zbar | disc");
    czd_run->add_option("--lambda-factor", lambda_factor, "λ = factor · ‖f‖₁");
    czd_run->add_option("--region", region, "1 or 2");

    auto* tw = app.add_subcommand("twoweight", "two-weight testing");
    tw->require_subcommand(1);
    auto* tw_test = tw->add_subcommand("test", "testing constants and norm for a random sparse operator");
    tw_test->add_option("--p", p);

    auto* ow = app.add_subcommand("oneweight", "one-weight bound");
    ow->require_subcommand(1);
    auto* ow_norm = ow->add_subcommand("norm", "B_p characteristic, norm and ratio for (1-|z|)^η");
    ow_norm->add_option("--p", p);
    ow_norm->add_option("--eta", eta);

    for (auto* sub : {proj_apply, proj_norm, proj_cmp, w_char, w_weak, czd_run, tw_test, ow_norm}) {
        sub->add_option("--kernel", kernel_ref, "kernel reference");
        sub->add_option("--omega", omega_ref, "measure reference");
    }
    for (auto* sub : {w_char, w_weak, tw_test}) sub->add_option("--weight", weight_ref, "weight reference");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*catalog) {
            std::cout << catalog_text();
            return kExitPass;
        }
        ExperimentConfig cfg = effective_config(o, app);
        if (!kernel_ref.empty()) cfg.kernel = kernel_ref;
        if (!omega_ref.empty()) cfg.omega = omega_ref;
        if (!weight_ref.empty()) cfg.weight = weight_ref;
        for (auto* sub : {proj_norm, w_char, tw_test, ow_norm}) p_set = p_set || sub->count("--p") > 0;
        if (p_set) cfg.p = p;
        if (samples > 0) cfg.samples = samples;
        // p is validated here so that p ≤ 1 reports a config error rather than a contract failure
        require_p(cfg.p);

        if (*run || (app.get_subcommands().empty() && !cfg.suite.empty())) {
            require(!cfg.suite.empty(), ErrorKind::Config, "no suite given (--suite NAME or suite in the config)");
            return run_named_suite(cfg);
        }
        if (*proj_apply) {
            const auto q = grid_for(cfg, 6);
            require(q->size() <= kApplyBudget, ErrorKind::BudgetExceeded,
                    "proj apply is quadratic in the cell count; limit " + std::to_string(kApplyBudget) + " cells");
            const auto P = bergman_operator(q, resolve_kernel(cfg.kernel));
            const auto f = test_function(q, fname);
            ComplexField fc{q, std::vector<cplx>(f.values.begin(), f.values.end())};
            const auto g = P.apply(fc);
            Table t{{"cell", "band", "node_re", "node_im", "f", "Pf_re", "Pf_im"}, {}};
            for (std::size_t i = 0; i < q->size(); ++i) {
                const auto& c = q->cells()[i];
                const auto v = g.values[i];
                t.rows.push_back({std::to_string(i), std::to_string(c.band), num(c.node.real()), num(c.node.imag()),
                                  num(f.values[i]), num(std::real(v)), num(std::imag(v))});
            }
            return emit(cfg, "proj-apply", t);
        }
        if (*proj_norm || *ow_norm) {
            const auto q = grid_for(cfg, 7);
            const auto r = one_weight_norm_experiment(resolve_kernel(cfg.kernel), power_weight(q, eta), cfg.p,
                                                      q->depth());
            Table t{{"eta", "p", "J", "B_characteristic", "norm", "norm_exact", "ratio", "psi_mass_low", "psi_mass_high",
                     "top_half_ratio"},
                    {}};
            t.rows.push_back({num(eta), num(cfg.p), std::to_string(q->depth()), num(r.characteristic), num(r.norm),
                              r.norm_exact ? "1" : "0", num(r.ratio), num(r.psi_mass_low), num(r.psi_mass_high),
                              num(r.top_half_ratio)});
            return emit(cfg, *ow_norm ? "oneweight-norm" : "proj-norm", t);
        }
        if (*proj_cmp) {
            const auto psi = psi_from_kernel(resolve_kernel(cfg.kernel));
            const int L = level >= 0 ? level : 8;
            const int n = cfg.samples > 0 ? cfg.samples : 10000;
            Table t{{"kernel", "L", "samples", "c_low", "c_high"}, {}};
            for (int l : {L, L + 2}) {
                const auto c = comparability_constants(psi, n, cfg.seed, l);
                t.rows.push_back({cfg.kernel, std::to_string(l), std::to_string(c.samples), num(c.c_low), num(c.c_high)});
            }
            return emit(cfg, "proj-compare-dyadic", t);
        }
        if (*w_char) {
            const auto q = grid_for(cfg, 7);
            const auto v = make_weight(q, resolve_weight(cfg.weight));
            const auto r = bp_characteristic(v, cfg.p, q->depth());
            Table t{{"weight", "p", "level", "B_running_max"}, {}};
            for (std::size_t l = 0; l < r.per_depth.size(); ++l)
                t.rows.push_back({cfg.weight, num(cfg.p), std::to_string(l), num(r.per_depth[l])});
            return emit(cfg, "weights-char", t);
        }
        if (*w_weak) {
            const auto q = grid_for(cfg, 6);
            const auto v = make_weight(q, resolve_weight(cfg.weight));
            const auto spec = resolve_kernel(cfg.kernel);
            const auto P = bergman_operator(q, spec);
            const auto Pp = positive_operator(q, spec);
            std::vector<double> nu(q->size());
            for (std::size_t i = 0; i < q->size(); ++i) nu[i] = v.values[i] * q->masses()[i];
            std::mt19937_64 rng(cfg.seed);
            std::uniform_real_distribution<double> U(0.0, 1.0);
            const int n = cfg.samples > 0 ? cfg.samples : 10;
            Table t{{"weight", "sample", "maximal_beta0", "maximal_beta1", "P_signed", "P_positive"}, {}};
            for (int s = 0; s < n; ++s) {
                Field f = make_field(q, [](cplx) { return 0.0; });
                for (int k = 0; k < 8; ++k) f.values[rng() % q->size()] = U(rng) - 0.5;
                const int L = q->depth();
                const auto w = weak11_projection_check(P, Pp, v, f);
                t.rows.push_back({cfg.weight, std::to_string(s), num(weak11_maximal_check(*q, nu, 0, f.values, L)),
                                  num(weak11_maximal_check(*q, nu, 1, f.values, L)), num(w.signed_ratio),
                                  num(w.positive_ratio)});
            }
            return emit(cfg, "weights-weak11", t);
        }
        if (*czd_run) {
            const auto q = grid_for(cfg, 6);
            const auto f = test_function(q, fname);
            double norm = 0.0;
            for (std::size_t i = 0; i < q->size(); ++i) norm += std::fabs(f.values[i]) * q->masses()[i];
            require(norm > 0.0, ErrorKind::Config, "test function vanishes");
            const auto cz = cz_decompose(f, lambda_factor * norm, region);
            Table t{{"generation", "arc_start", "arc_length", "h", "h_inner", "cells", "mass", "abs_average",
                     "parent_ratio"},
                    {}};
            for (const auto& s : cz.selected) {
                t.rows.push_back({std::to_string(s.generation), num(s.rect.arc.start), num(s.rect.arc.length),
                                  num(s.rect.h), num(s.rect.h_inner), std::to_string(s.cells.size()), num(s.mass),
                                  num(s.abs_average), num(s.parent_ratio)});
            }
            std::cerr << "lambda=" << num(cz.lambda) << " selected=" << cz.selected.size()
                      << " parent_constant=" << num(cz.parent_constant) << " omega(Omega)=" << num(cz.omega_selected)
                      << '\n';
            return emit(cfg, "czd-run", t);
        }
        if (*tw_test) {
            const auto q = grid_for(cfg, 6);
            std::mt19937_64 rng(cfg.seed);
            const auto sigma = make_weight(q, resolve_weight(cfg.weight));
            const auto u = make_weight(q, random_weight_spec(rng, -0.6, 0.6));
            const int L = q->depth();
            const auto T = default_sparse_operator(q, 0, psi_from_kernel(resolve_kernel(cfg.kernel)), L);
            const auto r = testing_constants(T, sigma, u, cfg.p, L);
            Table t{{"p", "J", "C0", "C0_star", "C0_root", "C0_star_root", "norm", "norm_exact", "C1_measured"}, {}};
            t.rows.push_back({num(cfg.p), std::to_string(q->depth()), num(r.C0), num(r.C0_star), num(r.C0_root),
                              num(r.C0_star_root), num(r.norm), r.norm_exact ? "1" : "0", num(r.C1_measured)});
            return emit(cfg, "twoweight-test", t);
        }
        std::cerr << app.help();
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (e.kind() == ErrorKind::Config) return kExitConfig;
        if (e.kind() == ErrorKind::BudgetExceeded) return kExitBudget;
        return kExitContract;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitContract;
    }
}
