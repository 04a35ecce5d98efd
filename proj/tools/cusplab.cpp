// cusplab: batch experiment runner for the cuspidal-metric laboratory.
// Exit status: 0 all verdicts pass, 1 any failure or solver error, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cusplab/experiments.hpp"

namespace {

using nlohmann::json;

// parse "key=value" into the params object, guessing number vs string
void apply_kv(json& params, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
        throw CLI::ValidationError("--set expects key=value, got: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    char* end = nullptr;
    const double num = std::strtod(val.c_str(), &end);
    if (end && *end == '\0' && !val.empty()) {
        if (num == static_cast<long long>(num) && val.find('.') == std::string::npos &&
            val.find('e') == std::string::npos)
            params[key] = static_cast<long long>(num);
        else
            params[key] = num;
    } else {
        params[key] = val;
    }
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

struct GroupArgs {
    std::string experiment;
    std::vector<std::string> sets;
    std::string out_path;
    std::string csv_prefix;
    std::string klist;
    std::string tlist;
    std::string model;
    std::string profile;
    std::uint64_t seed = 7;
    unsigned jobs = 1;
    int count = -1;
    int nmax = -1;
    int alpha = -1;
    int grid = -1;
    int perturbations = -1;
    double r0 = std::nan("");
    double r1 = std::nan("");
    double r = std::nan("");
    double eps = std::nan("");
    double delta = std::nan("");
};

void add_group(CLI::App& app, const std::string& group, std::vector<std::pair<std::string, GroupArgs>>& runs) {
    auto args = std::make_shared<GroupArgs>();
    CLI::App* sub = app.add_subcommand(group, "experiments in the '" + group + "' group");
    sub->add_option("experiment", args->experiment, "experiment name (see `cusplab list`)")
        ->required();
    sub->add_option("--seed", args->seed, "random seed for the experiment");
    sub->add_option("--jobs", args->jobs, "parallel grid workers")->envname("CUSPLAB_JOBS");
    sub->add_option("--out", args->out_path, "write the JSON report here");
    sub->add_option("--csv", args->csv_prefix, "write per-table CSV files with this prefix");
    sub->add_option("--set", args->sets, "extra key=value experiment parameters");
    sub->add_option("--count", args->count, "sample count");
    sub->add_option("--grid", args->grid, "grid resolution");
    sub->add_option("--nmax", args->nmax, "largest family index");
    sub->add_option("--perturbations", args->perturbations, "certification perturbation count");
    sub->add_option("--r0", args->r0, "first base radius");
    sub->add_option("--r1", args->r1, "second base radius");
    sub->add_option("--r", args->r, "base radius");
    sub->add_option("--eps", args->eps, "perturbation strength");
    sub->add_option("--delta", args->delta, "thinness constant");
    sub->add_option("--alpha", args->alpha, "power weight for the collar integrand");
    sub->add_option("--k", args->klist, "comma list of collar parameters k");
    sub->add_option("--t", args->tlist, "comma list of plumbing parameters t");
    sub->add_option("--model", args->model, "model selector (experiment specific)");
    sub->add_option("--profile", args->profile, "perturbation profile name");
    sub->callback([&runs, group, args] { runs.emplace_back(group, *args); });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cusplab: numerical experiments on cuspidal product metrics"};
    app.set_config("--config", "", "key=value configuration file");
    app.require_subcommand(0, 1);

    bool list_flag = false;
    CLI::App* list_cmd = app.add_subcommand("list", "print the experiment catalog");
    list_cmd->callback([&list_flag] { list_flag = true; });

    std::vector<std::pair<std::string, GroupArgs>> runs;
    for (const std::string& group :
         {"metrics", "geodesic", "strata", "cat0", "limits", "asymptotics"})
        add_group(app, group, runs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (list_flag) {
        for (const auto& def : cusplab::experiment_catalog())
            std::cout << def.group << "/" << def.name << " -- " << def.claim << "\n";
        return 0;
    }
    if (runs.empty()) {
        std::cout << app.help();
        return 2;
    }

    const auto& [group, a] = runs.front();
    json params;
    params["seed"] = a.seed;
    if (a.count >= 0) params["count"] = a.count;
    if (a.grid >= 0) params["grid"] = a.grid;
    if (a.nmax >= 0) params["nmax"] = a.nmax;
    if (a.perturbations >= 0) params["perturbations"] = a.perturbations;
    if (a.alpha >= 0) params["alpha"] = a.alpha;
    if (!std::isnan(a.r0)) params["r0"] = a.r0;
    if (!std::isnan(a.r1)) params["r1"] = a.r1;
    if (!std::isnan(a.r)) params["r"] = a.r;
    if (!std::isnan(a.eps)) params["eps"] = a.eps;
    if (!std::isnan(a.delta)) params["delta"] = a.delta;
    if (!a.klist.empty()) params["ks"] = parse_list(a.klist);
    if (!a.tlist.empty()) params["ts"] = parse_list(a.tlist);
    if (!a.model.empty()) params["model"] = a.model;
    if (!a.profile.empty()) params["profile"] = a.profile;
    try {
        for (const auto& kv : a.sets) apply_kv(params, kv);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    cusplab::Report rep;
    int rc = 0;
    try {
        if (cusplab::find_experiment(group, a.experiment) == nullptr) {
            std::cerr << "unknown experiment: " << group << "/" << a.experiment
                      << " (try `cusplab list`)\n";
            return 2;
        }
        rep = cusplab::run_experiment(group, a.experiment, params, std::max(1u, a.jobs));
        rc = rep.all_pass() ? 0 : 1;
    } catch (const std::exception& e) {
        rep.experiment = group + "/" + a.experiment;
        rep.spec = params;
        rep.results["error"] = e.what();
        rep.verdicts.push_back(cusplab::Verdict{"run-completed", false, 0.0, 0.0, e.what()});
        rc = 1;
    }

    for (const auto& v : rep.verdicts)
        std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << v.id << "  measured=" << v.measured
                  << "  threshold=" << v.threshold << (v.note.empty() ? "" : "  # " + v.note)
                  << "\n";

    if (!a.out_path.empty()) {
        std::ofstream os(a.out_path);
        os << rep.to_json().dump(2) << "\n";
    }
    if (!a.csv_prefix.empty()) rep.write_csv(a.csv_prefix);
    return rc;
}
