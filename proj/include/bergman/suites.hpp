#pragma once

#include <map>
#include <string>
#include <vector>

#include "bergman/config.hpp"

namespace bergman {

struct SuiteRow {
    int criterion = 0;
    std::string case_name;
    std::string param;
    double value = 0.0;
    double reference = 0.0;
    std::string relation;  // how value is compared with reference
    bool pass = true;
    double runtime = 0.0;  // seconds since the previous row
};

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct SuiteResult {
    std::string suite;
    std::vector<SuiteRow> rows;
    std::vector<Series> series;
    std::string x_label = "depth";
    std::string y_label = "value";

    bool passed() const;
    // criterion -> all of its rows pass
    std::map<int, bool> criteria() const;
};

struct SuiteInfo {
    std::string name;
    std::vector<int> criteria;
    std::string description;
};

const std::vector<SuiteInfo>& suite_catalog();
bool is_known_suite(const std::string& name);

// Runs one named suite. Throws Error (Config for unknown names, BudgetExceeded for oversized grids).
SuiteResult run_suite(const ExperimentConfig& cfg);

// Header row, then one line per row; numbers as %.10g. The timestamp comment line and the
// runtime column are only filled when timestamp is true.
std::string to_csv(const SuiteResult& r, bool timestamp);

// Line plot of every series, y on a log scale when all values are positive.
std::string to_svg(const SuiteResult& r);

std::string catalog_text();

} // namespace bergman
