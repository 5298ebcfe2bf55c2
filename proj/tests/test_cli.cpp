#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "bergman/config.hpp"
#include "bergman/errors.hpp"
#include "bergman/suites.hpp"

using namespace bergman;

namespace {

std::string write_temp(const std::string& name, const std::string& text)
{
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path.string();
}

} // namespace

TEST_CASE("config file round trip")
{
    const auto path = write_temp("bergman_cfg_ok.ini", "[experiment]\nsuite = oneweight\nseed = 42\n"
                                                       "[grid]\ndepth = 8\nj0 = 2\n"
                                                       "[model]\np = 3\neta = -0.5, 0, 0.5\nweight = power:0.25\n"
                                                       "[output]\ndir = somewhere\ntimestamp = false\nsvg = yes\n");
    const auto cfg = load_config(path);
    CHECK(cfg.suite == "oneweight");
    CHECK(cfg.seed == 42);
    CHECK(cfg.depth == 8);
    CHECK(cfg.j0 == 2);
    CHECK(cfg.p == 3.0);
    REQUIRE(cfg.eta.size() == 3);
    CHECK(cfg.eta[0] == -0.5);
    CHECK(cfg.weight == "power:0.25");
    CHECK(cfg.out_dir == "somewhere");
    CHECK_FALSE(cfg.timestamp);
    CHECK(cfg.svg);
    CHECK_NOTHROW(validate_config(cfg));
}

TEST_CASE("config errors")
{
    auto kind = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;
    };
    CHECK(kind([] { load_config(write_temp("bergman_cfg_key.ini", "[model]\ncolour = blue\n")); }) == ErrorKind::Config);
    CHECK(kind([] { load_config(write_temp("bergman_cfg_num.ini", "[grid]\ndepth = eight\n")); }) == ErrorKind::Config);
    CHECK(kind([] { load_config(write_temp("bergman_cfg_int.ini", "[grid]\ndepth = 7.5\n")); }) == ErrorKind::Config);
    CHECK(kind([] { load_config("/nonexistent/bergman.ini"); }) == ErrorKind::Config);

    ExperimentConfig cfg;
    cfg.suite = "oneweight";
    CHECK_NOTHROW(validate_config(cfg));
    auto bad = [&](auto mutate) {
        ExperimentConfig c = cfg;
        mutate(c);
        return kind([&] { validate_config(c); });
    };
    CHECK(bad([](ExperimentConfig& c) { c.suite = "no-such-suite"; }) == ErrorKind::Config);
    CHECK(bad([](ExperimentConfig& c) { c.depth = 13; }) == ErrorKind::Config);
    CHECK(bad([](ExperimentConfig& c) { c.p = 1.0; }) == ErrorKind::Config);
    CHECK(bad([](ExperimentConfig& c) { c.omega = "gaussian"; }) == ErrorKind::Config);
    CHECK(bad([](ExperimentConfig& c) { c.kernel = "2/unknown"; }) == ErrorKind::Config);
    CHECK(bad([](ExperimentConfig& c) { c.weight = "power"; }) == ErrorKind::Config);
    CHECK(bad([](ExperimentConfig& c) { c.omega = "standard:-1"; }) == ErrorKind::Config);
}

TEST_CASE("references resolve to the catalog objects")
{
    CHECK(resolve_measure("lebesgue").total_mass() == doctest::Approx(1.0));
    CHECK(resolve_measure("standard:1").total_mass() == doctest::Approx(4.0 / 3.0));
    CHECK(resolve_measure("atom1").atom_mass_at(1.0) == 1.0);
    CHECK(resolve_measure("lebesgue+atom:0.5").total_mass() == doctest::Approx(2.0));

    const cplx w(0.3, 0.2);
    CHECK(std::abs(resolve_kernel("bergman")(w) - 1.0 / ((1.0 - w) * (1.0 - w))) < 1e-12);
    CHECK(std::abs(resolve_kernel("standard:1")(w) - std::pow(1.0 - w, -3.0)) < 1e-12);
    const double x = 0.4;
    CHECK(std::abs(resolve_kernel("example1")(x) - std::log(1.0 / (1.0 - x)) / (x * (1.0 - x))) < 1e-10);
    CHECK(resolve_kernel("2/atom:0.5").gamma == 2.0);

    const auto b = resolve_weight("bump:0.5:0.25:0.1:2");
    CHECK(b.eta == 0.5);
    CHECK(b.bump_center == 0.25);
    CHECK(b.bump_height == 2.0);
    CHECK(resolve_weight("log:-0.5:1").log_power == 1.0);
    CHECK(parse_list("1, 2.5,-3") == std::vector<double>{1.0, 2.5, -3.0});
}

TEST_CASE("csv layout and timestamp suppression")
{
    SuiteResult r;
    r.suite = "demo";
    r.rows.push_back({3, "case,with comma", "a=1;b=2", 0.1, 1.0 / 3.0, "<=", true, 1.25});
    r.rows.push_back({3, "second", "", 2.0, 1.0, "<", false, 0.5});
    const auto plain = to_csv(r, false);
    CHECK(plain == "suite,criterion,case,param,value,reference,relation,pass,runtime_s\n"
                   "demo,3,\"case,with comma\",a=1;b=2,0.1,0.3333333333,<=,pass,0\n"
                   "demo,3,second,,2,1,<,fail,0\n");
    const auto stamped = to_csv(r, true);
    CHECK(stamped.rfind("# generated ", 0) == 0);
    CHECK(stamped.find("1.25") != std::string::npos);
    CHECK_FALSE(r.passed());
    CHECK(r.criteria().at(3) == false);
}

TEST_CASE("svg emission")
{
    SuiteResult r;
    r.suite = "demo <plot>";
    r.series.push_back({"a&b", {6, 7, 8}, {1.0, 2.0, 4.0}});
    r.series.push_back({"flat", {6, 7, 8}, {1.5, 1.5, 1.5}});
    const auto svg = to_svg(r);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("demo &lt;plot&gt;") != std::string::npos);
    CHECK(svg.find("a&amp;b") != std::string::npos);
    std::size_t paths = 0;
    for (std::size_t k = svg.find("<path"); k != std::string::npos; k = svg.find("<path", k + 1)) ++paths;
    CHECK(paths == 4);  // one curve and one legend stroke per series
    CHECK(to_svg(SuiteResult{}).find("</svg>") != std::string::npos);
}

TEST_CASE("catalog lists measures, kernels and suites")
{
    const auto text = catalog_text();
    CHECK(text.find("lebesgue") != std::string::npos);
    CHECK(text.find("example1") != std::string::npos);
    CHECK(text.find("power:α") != std::string::npos);
    for (const auto& s : suite_catalog()) {
        CHECK(text.find(s.name) != std::string::npos);
        CHECK(is_known_suite(s.name));
    }
    std::set<int> covered;
    for (const auto& s : suite_catalog()) covered.insert(s.criteria.begin(), s.criteria.end());
    CHECK(covered.size() == 16);
}

TEST_CASE("kernel-identities suite with defaults")
{
    ExperimentConfig cfg;
    cfg.suite = "kernel-identities";
    const auto r = run_suite(cfg);
    CHECK(r.rows.size() >= 3);
    CHECK(r.passed());
    CHECK(to_csv(r, false) == to_csv(run_suite(cfg), false));
}

TEST_CASE("suite seeds change random draws only")
{
    ExperimentConfig a;
    a.suite = "containment";
    a.samples = 500;
    ExperimentConfig b = a;
    b.seed = 2;
    const auto ra = run_suite(a), rb = run_suite(b);
    CHECK(ra.passed());
    CHECK(rb.passed());
    CHECK(ra.rows[0].value == rb.rows[0].value);  // zero violations either way
    CHECK(ra.rows[1].value != rb.rows[1].value);
}
