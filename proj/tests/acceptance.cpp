// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion.  Exit status 0 only when all pass.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "cusplab/experiments.hpp"

namespace {

using nlohmann::json;

struct Criterion {
    std::string id;
    std::string title;
    std::vector<std::pair<std::string, json>> experiments;  // "group/name" -> params
};

unsigned pick_jobs() {
    if (const char* env = std::getenv("CUSPLAB_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return static_cast<unsigned>(j);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : std::min(hw, 4u);
}

} // namespace

int main() {
    const unsigned jobs = pick_jobs();
    const std::vector<Criterion> criteria = {
        {"AC-01", "series expansion of the annulus density factor",
         {{"metrics/series", {{"theta_min", 0.01}, {"theta_max", 0.30}, {"steps", 30}}}}},
        {"AC-02", "collar norm integral: k^3/pi growth, bounded remainders",
         {{"asymptotics/collar", {{"ks", {5.0, 10.0, 20.0, 40.0}}}}}},
        {"AC-03", "plumbing pairing: -pi/t, vanishing modes, profile independence",
         {{"asymptotics/pairing", {{"ts", {0.1, 0.05, 0.01}}}}}},
        {"AC-04", "block determinant and inverse bounds over 10^4 ensembles",
         {{"asymptotics/block", {{"count", 10000}, {"calibration", 10000}, {"seed", 7}}}}},
        {"AC-05", "exact normal form pullback and the rho dictionary",
         {{"asymptotics/normal-form", {{"count", 1000}, {"seed", 7}}}}},
        {"AC-06", "geodesic engine: Christoffel forms, conservation, two solvers",
         {{"metrics/christoffel", {}},
          {"geodesic/conservation", {{"count", 20}, {"seed", 7}}},
          {"geodesic/ab-agreement", {{"count", 50}, {"seed", 7}}},
          {"geodesic/uniqueness", {{"inits", 20}, {"seed", 7}}}}},
        {"AC-07", "non-refraction shortcut and corner inequality",
         {{"strata/refraction", {{"count", 200}, {"seed", 7}}},
          {"strata/corner", {{"count", 50}, {"seed", 7}}}}},
        {"AC-08", "comparison-triangle slack and convexity of displacement",
         {{"cat0/triangles", {{"count", 50}, {"grid", 9}, {"seed", 7}}},
          {"cat0/convexity", {{"count", 10}, {"seed", 7}}}}},
        {"AC-09", "stratum distance: closed form and perturbation scaling",
         {{"strata/stratum-distance", {{"eps", 0.1}, {"grid", 8}}}}},
        {"AC-10", "maximal flat rank and the thinness probe",
         {{"cat0/flat-rank", {{"max_complexity", 6}}},
          {"cat0/thinness", {{"delta", 1.0}}}}},
        {"AC-11", "twisted families converge to the polygonal path",
         {{"limits/twist-family", {{"r0", 1.0}, {"r1", 1.0}, {"nmax", 64}}}}},
        {"AC-12", "non-uniqueness at the quotient cusp",
         {{"limits/nonunique", {{"r", 0.2}, {"perturbations", 20}, {"seed", 7}}},
          {"limits/linking-loop", {{"r", 0.2}}}}},
    };

    bool all_ok = true;
    for (const auto& crit : criteria) {
        bool ok = true;
        std::string worst;
        std::vector<cusplab::Verdict> failed;
        for (const auto& [path, params] : crit.experiments) {
            const auto slash = path.find('/');
            try {
                const cusplab::Report rep = cusplab::run_experiment(
                    path.substr(0, slash), path.substr(slash + 1), params, jobs);
                for (const auto& v : rep.verdicts) {
                    if (!v.pass) {
                        ok = false;
                        failed.push_back(v);
                    }
                }
            } catch (const std::exception& e) {
                ok = false;
                failed.push_back(cusplab::Verdict{path + " raised", false, 0.0, 0.0, e.what()});
            }
        }
        all_ok = all_ok && ok;
        std::printf("[%s] %s  %s\n", ok ? "PASS" : "FAIL", crit.id.c_str(), crit.title.c_str());
        for (const auto& v : failed)
            std::printf("        failed: %s  measured=%.6g threshold=%.6g  %s\n", v.id.c_str(),
                        v.measured, v.threshold, v.note.c_str());
        std::fflush(stdout);
    }
    std::printf("%s\n", all_ok ? "acceptance: all criteria passed" : "acceptance: FAILURES");
    return all_ok ? 0 : 1;
}
