#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bergman/kernels.hpp"
#include "bergman/measures.hpp"
#include "bergman/weights.hpp"

namespace bergman {

// Defaults of -1 (or empty) mean "use the suite default".
struct ExperimentConfig {
    std::string suite;
    std::uint64_t seed = 1;
    int samples = -1;

    int depth = -1;         // J
    int j0 = 3;
    int dyadic_depth = -1;  // L

    std::string omega = "lebesgue";
    std::string kernel = "bergman";
    std::string weight = "one";
    double p = 2.0;
    std::vector<double> eta;
    double tolerance = 1e-12;

    std::string out_dir = ".";
    bool timestamp = true;
    bool svg = false;
};

// INI file with sections [experiment], [grid], [model], [numerics], [output]. Throws ErrorKind::Config.
ExperimentConfig load_config(const std::string& path);

// Throws ErrorKind::Config on unknown suites, unresolvable references and out-of-range fields.
void validate_config(const ExperimentConfig& cfg);

// lebesgue | standard:α | power:α | exponential:c | atom1 | atom:r | lebesgue+atom:r
RadialMeasure resolve_measure(const std::string& ref);

// bergman | standard:α | example1 | γ/<measure ref>
KernelSpec resolve_kernel(const std::string& ref, double tol = 1e-12);

// one | power:η | log:η:k | bump:η:center:width:height
WeightSpec resolve_weight(const std::string& ref);

std::vector<double> parse_list(const std::string& text);

} // namespace bergman
