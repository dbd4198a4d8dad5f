#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hk/measure.hpp"

namespace hk {

struct CheckRow {
    std::string name;
    double worst = 0.0;
    double tol   = 0.0;
    bool pass    = false;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckRow> rows;
    bool all_pass() const;
};

/// Suite names accepted by run_suite (plus "all").
const std::vector<std::string>& verify_suite_names();

/// Runs one property suite with a fixed seed; deterministic.
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

std::vector<SuiteResult> run_all_suites(std::uint64_t seed);

/// Deterministic random instances used by the suites and tests.
DiscreteMeasure random_measure(std::mt19937_64& rng, int dim, int max_atoms,
                               double box = 1.6, double mass_lo = 0.2,
                               double mass_hi = 2.5);
ConePoint random_cone_point(std::mt19937_64& rng, int dim, double box = 2.0,
                            double r_hi = 2.0);

} // namespace hk
