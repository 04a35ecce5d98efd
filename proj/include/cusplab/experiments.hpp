#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cusplab {

struct Verdict {
    std::string id;       // stable identifier of the checked invariant
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string note;
};

struct Report {
    std::string experiment;
    int schema_version = 1;
    nlohmann::json spec;     // parameter echo
    nlohmann::json results;  // named tables and scalars
    std::vector<Verdict> verdicts;
    std::uint64_t seed = 0;
    std::string tool_version = "cusplab 0.1.0";

    bool all_pass() const;
    nlohmann::json to_json() const;
    // one CSV file per table, "<prefix><table>.csv", columns declared in a header row
    void write_csv(const std::string& prefix) const;
};

struct ExperimentDef {
    std::string group;  // metrics | geodesic | strata | cat0 | limits | asymptotics
    std::string name;
    std::string claim;  // one-line statement of the fact the experiment checks
    std::function<Report(const nlohmann::json& params, unsigned jobs)> run;
};

const std::vector<ExperimentDef>& experiment_catalog();
const ExperimentDef* find_experiment(const std::string& group, const std::string& name);
Report run_experiment(const std::string& group, const std::string& name,
                      const nlohmann::json& params, unsigned jobs = 1);

// Deterministic sub-seed for grid point i of a seeded experiment.
std::uint64_t subseed(std::uint64_t seed, std::uint64_t i);

void parallel_for(int total, unsigned jobs, const std::function<void(int)>& fn);

} // namespace cusplab
