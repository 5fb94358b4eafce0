#ifndef SPINDEX_SCENARIO_HPP
#define SPINDEX_SCENARIO_HPP

#include <string>
#include <vector>

#include "spindex/blowup_glue.hpp"
#include "spindex/resonance.hpp"

namespace spindex {

/// Declarative end-to-end experiment: Hamiltonian, iterate, census and
/// resonance parameters, optional gluing, output location, and the seed that
/// pins any randomized perturbation.
struct Scenario {
    int schema_version = 1;
    std::string name = "scenario";
    HamiltonianSpec hamiltonian;
    int iterate_k = 1;
    CensusOptions census;
    ResonanceConfig resonance;
    bool glue_enabled = false;
    double tau = 0.5;
    int glue_nz = 96;
    int glue_ntheta = 192;
    std::vector<int> gap_iterates{4, 8, 16};
    std::string out_dir = "out";
    unsigned long long seed = 1;
};

/// Schema and range diagnostics; empty means the scenario is valid.
std::vector<std::string> validate_scenario_json(const std::string& text);

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);

struct RunOutcome {
    bool verdicts_passed = true;
    std::string summary;
    std::vector<std::string> files_written;
};

/// Executes flow -> census -> indices -> resonance -> (optional) blow-up,
/// glue, flux -> verdicts, writing the report bundle into out_dir.
RunOutcome run_scenario(const Scenario& scenario);

}  // namespace spindex

#endif
