#include "bergman/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <set>

#include "bergman/errors.hpp"
#include "bergman/suites.hpp"

namespace bergman {

namespace {

namespace pt = boost::property_tree;

double parse_number(const std::string& text, const std::string& what)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::Config, "cannot read a number from '" + text + "' in " + what);
}

std::vector<std::string> split(const std::string& text, const char* seps)
{
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(seps));
    for (auto& s : parts) boost::trim(s);
    return parts;
}

bool parse_bool(const std::string& text, const std::string& key)
{
    const auto t = boost::to_lower_copy(boost::trim_copy(text));
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    fail(ErrorKind::Config, "expected a boolean for " + key + ", got '" + text + "'");
}

const std::set<std::string> kKnownKeys = {
    "experiment.suite", "experiment.seed", "experiment.samples", "grid.depth", "grid.j0", "grid.dyadic_depth",
    "model.omega", "model.kernel", "model.weight", "model.p", "model.eta", "numerics.tolerance",
    "output.dir", "output.timestamp", "output.svg",
};

} // namespace

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    for (const auto& s : split(text, ",")) {
        if (!s.empty()) out.push_back(parse_number(s, "list '" + text + "'"));
    }
    return out;
}

ExperimentConfig load_config(const std::string& path)
{
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorKind::Config, e.what());
    }
    for (const auto& [section, body] : tree) {
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            require(kKnownKeys.count(full) > 0, ErrorKind::Config, "unknown key " + full + " in " + path);
        }
    }
    ExperimentConfig cfg;
    auto get = [&](const std::string& key) { return tree.get_optional<std::string>(pt::ptree::path_type(key, '.')); };
    auto get_int = [&](const std::string& key, auto& field) {
        if (auto v = get(key)) {
            const double d = parse_number(*v, key);
            require(d == std::floor(d), ErrorKind::Config, key + " must be an integer");
            field = static_cast<std::remove_reference_t<decltype(field)>>(d);
        }
    };
    if (auto v = get("experiment.suite")) cfg.suite = *v;
    if (auto v = get("experiment.seed")) {
        try {
            cfg.seed = std::stoull(*v);
        } catch (const std::exception&) {
            fail(ErrorKind::Config, "experiment.seed must be a nonnegative integer");
        }
    }
    get_int("experiment.samples", cfg.samples);
    get_int("grid.depth", cfg.depth);
    get_int("grid.j0", cfg.j0);
    get_int("grid.dyadic_depth", cfg.dyadic_depth);
    if (auto v = get("model.omega")) cfg.omega = *v;
    if (auto v = get("model.kernel")) cfg.kernel = *v;
    if (auto v = get("model.weight")) cfg.weight = *v;
    if (auto v = get("model.p")) cfg.p = parse_number(*v, "model.p");
    if (auto v = get("model.eta")) cfg.eta = parse_list(*v);
    if (auto v = get("numerics.tolerance")) cfg.tolerance = parse_number(*v, "numerics.tolerance");
    if (auto v = get("output.dir")) cfg.out_dir = *v;
    if (auto v = get("output.timestamp")) cfg.timestamp = parse_bool(*v, "output.timestamp");
    if (auto v = get("output.svg")) cfg.svg = parse_bool(*v, "output.svg");
    return cfg;
}

void validate_config(const ExperimentConfig& cfg)
{
    require(is_known_suite(cfg.suite), ErrorKind::Config, "unknown suite '" + cfg.suite + "'");
    require(cfg.depth == -1 || (cfg.depth >= 1 && cfg.depth <= 12), ErrorKind::Config, "grid depth J must be in [1, 12]");
    require(cfg.j0 >= 0 && cfg.j0 <= 8, ErrorKind::Config, "j0 must be in [0, 8]");
    require(cfg.dyadic_depth == -1 || (cfg.dyadic_depth >= 0 && cfg.dyadic_depth <= 24), ErrorKind::Config,
            "dyadic depth must be in [0, 24]");
    require(cfg.samples == -1 || cfg.samples >= 1, ErrorKind::Config, "samples must be positive");
    require(std::isfinite(cfg.p) && cfg.p > 1.0, ErrorKind::Config, "p must be finite and > 1");
    require(cfg.tolerance > 0.0 && cfg.tolerance < 1e-2, ErrorKind::Config, "tolerance must be in (0, 1e-2)");
    for (double e : cfg.eta) require(std::isfinite(e) && std::fabs(e) < 4.0, ErrorKind::Config, "eta out of range");
    resolve_measure(cfg.omega);
    resolve_kernel(cfg.kernel);
    resolve_weight(cfg.weight);
}

RadialMeasure resolve_measure(const std::string& ref)
{
    const auto parts = split(ref, ":");
    const auto& head = parts[0];
    auto arg = [&](std::size_t k) {
        require(parts.size() > k, ErrorKind::Config, "measure '" + ref + "' needs a parameter");
        return parse_number(parts[k], "measure '" + ref + "'");
    };
    if (head == "lebesgue" && parts.size() == 1) return RadialMeasure::lebesgue();
    if (head == "atom1" && parts.size() == 1) return RadialMeasure::atoms_only("atom1", {{1.0, 1.0}});
    if (head == "standard") {
        const double a = arg(1);
        require(a > -1.0, ErrorKind::Config, "standard:α needs α > -1");
        return RadialMeasure::standard(a);
    }
    if (head == "power") {
        const double a = arg(1);
        require(a > -1.0, ErrorKind::Config, "power:α needs α > -1");
        return RadialMeasure::power(a);
    }
    if (head == "exponential") {
        const double c = arg(1);
        require(c > 0.0, ErrorKind::Config, "exponential:c needs c > 0");
        return RadialMeasure::exponential(c);
    }
    if (head == "atom") {
        const double r = arg(1);
        require(r >= 0.0 && r <= 1.0, ErrorKind::Config, "atom:r needs r in [0,1]");
        return RadialMeasure::atoms_only(ref, {{r, 1.0}});
    }
    if (head == "lebesgue+atom") {
        const double r = arg(1);
        require(r >= 0.0 && r <= 1.0, ErrorKind::Config, "lebesgue+atom:r needs r in [0,1]");
        return RadialMeasure::lebesgue().with_atoms({{r, 1.0}}, ref);
    }
    fail(ErrorKind::Config, "unresolvable measure reference '" + ref + "'");
}

KernelSpec resolve_kernel(const std::string& ref, double tol)
{
    if (ref == "bergman") return make_kernel_spec(1.0, resolve_measure("atom1"), tol);
    if (ref == "example1") return make_kernel_spec(1.0, RadialMeasure::lebesgue(), tol);
    if (boost::starts_with(ref, "standard:")) {
        const double a = parse_number(ref.substr(9), "kernel '" + ref + "'");
        require(a > -1.0, ErrorKind::Config, "standard:α needs α > -1");
        return make_kernel_spec(a + 2.0, RadialMeasure::atoms_only("atom0", {{0.0, 1.0}}), tol);
    }
    const auto slash = ref.find('/');
    require(slash != std::string::npos, ErrorKind::Config, "unresolvable kernel reference '" + ref + "'");
    const double gamma = parse_number(ref.substr(0, slash), "kernel '" + ref + "'");
    require(gamma > 0.0, ErrorKind::Config, "kernel γ must be positive");
    return make_kernel_spec(gamma, resolve_measure(ref.substr(slash + 1)), tol);
}

WeightSpec resolve_weight(const std::string& ref)
{
    const auto parts = split(ref, ":");
    std::vector<double> args;
    for (std::size_t k = 1; k < parts.size(); ++k) args.push_back(parse_number(parts[k], "weight '" + ref + "'"));
    WeightSpec w;
    w.name = ref;
    if (parts[0] == "one" && args.empty()) return w;
    if (parts[0] == "power" && args.size() == 1) {
        w.eta = args[0];
        return w;
    }
    if (parts[0] == "log" && args.size() == 2) {
        w.eta = args[0];
        w.log_power = args[1];
        return w;
    }
    if (parts[0] == "bump" && args.size() == 4) {
        require(args[2] > 0.0 && args[3] >= 0.0, ErrorKind::Config, "bump needs width > 0 and height >= 0");
        w.eta = args[0];
        w.bump_center = args[1];
        w.bump_width = args[2];
        w.bump_height = args[3];
        return w;
    }
    fail(ErrorKind::Config, "unresolvable weight reference '" + ref + "'");
}

} // namespace bergman
