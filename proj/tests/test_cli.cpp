#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spindex/scenario.hpp"

using namespace spindex;
namespace fs = std::filesystem;

namespace {

std::string tiny_scenario(const std::string& out_dir) {
    return std::string(R"({
  "schema_version": 1,
  "name": "rotation-golden-tiny",
  "hamiltonian": {"kind": "rotation", "params": {"alpha": 0.6180339887},
                  "schedule": {"delta_h": 0.05, "zeta": "smoothstep"}},
  "iterate_k": 1,
  "census": {"grid_nz": 32, "grid_ntheta": 64, "newton_tol": 1e-10, "newton_step": 0.004},
  "resonance": {"N": 2, "n": 1, "a_max": 20, "tol": 1e-6},
  "glue": {"enabled": false, "tau": 0.5},
  "out_dir": ")") + out_dir + R"(",
  "seed": 1
})";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_cli(const std::string& args, std::string* output = nullptr) {
    fs::path out = fs::temp_directory_path() / "spindex_cli_out.txt";
    std::string cmd = std::string(SPINDEX_BINARY_PATH) + " " + args + " > " + out.string() +
                      " 2>&1";
    int rc = std::system(cmd.c_str());
    if (output != nullptr) *output = slurp(out);
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("validate: clean scenario, missing kind, out-of-range alpha, zero tau") {
    CHECK(validate_scenario_json(tiny_scenario("x")).empty());

    std::string no_kind = R"({"hamiltonian": {"params": {"alpha": 0.5}}})";
    auto diags = validate_scenario_json(no_kind);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("hamiltonian.kind") != std::string::npos);

    std::string bad_alpha =
        R"({"hamiltonian": {"kind": "rotation", "params": {"alpha": 1.5}}})";
    diags = validate_scenario_json(bad_alpha);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("alpha") != std::string::npos);

    std::string bad_tau =
        R"({"hamiltonian": {"kind": "rotation", "params": {"alpha": 0.5}},
            "glue": {"enabled": true, "tau": 0.0}})";
    diags = validate_scenario_json(bad_tau);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("glue.tau") != std::string::npos);
}

TEST_CASE("scenario json round trip") {
    Scenario s = scenario_from_json(tiny_scenario("roundtrip"));
    CHECK(s.name == "rotation-golden-tiny");
    CHECK(s.hamiltonian.alpha == doctest::Approx(0.6180339887));
    Scenario back = scenario_from_json(scenario_to_json(s));
    CHECK(scenario_to_json(back) == scenario_to_json(s));
}

TEST_CASE("cli validate subcommand exit codes") {
    fs::path dir = fs::temp_directory_path() / "spindex_cli_test";
    fs::create_directories(dir);
    fs::path good = dir / "good.json";
    std::ofstream(good) << tiny_scenario((dir / "out").string());
    CHECK(run_cli("validate --scenario " + good.string()) == 0);

    fs::path bad = dir / "bad.json";
    std::ofstream(bad) << R"({"hamiltonian": {"params": {}}})";
    std::string output;
    CHECK(run_cli("validate --scenario " + bad.string(), &output) == 2);
    CHECK(output.find("hamiltonian.kind") != std::string::npos);
}

TEST_CASE("cli run: golden rotation scenario passes and is bitwise deterministic") {
    fs::path dir = fs::temp_directory_path() / "spindex_cli_run";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::path scen = dir / "scenario.json";
    std::ofstream(scen) << tiny_scenario((dir / "out").string());

    CHECK(run_cli("run --scenario " + scen.string()) == 0);
    std::string first = slurp(dir / "out" / "report.json");
    REQUIRE_FALSE(first.empty());
    CHECK(first.find("\"pass\": true") != std::string::npos);

    CHECK(run_cli("run --scenario " + scen.string()) == 0);
    std::string second = slurp(dir / "out" / "report.json");
    CHECK(first == second);

    CHECK(fs::exists(dir / "out" / "census.csv"));
    CHECK(fs::exists(dir / "out" / "phase_portrait.svg"));
}

TEST_CASE("cli index subcommand on a rotation path file") {
    fs::path dir = fs::temp_directory_path() / "spindex_cli_index";
    fs::create_directories(dir);
    SymplecticPath2 path = sample_path("rot", 2001, [](double t) {
        return Mat2::rotation(kTwoPi * 0.3 * t);
    });
    fs::path pf = dir / "path.json";
    std::ofstream(pf) << path_to_json(path);
    std::string output;
    CHECK(run_cli("index --path " + pf.string(), &output) == 0);
    CHECK(output.find("\"mu\":1") != std::string::npos);
    CHECK(run_cli("index --path " + pf.string() + " --iterate 3", &output) == 0);
    CHECK(output.find("\"delta\":1.8") != std::string::npos);
    CHECK(output.find("\"mu\":1") != std::string::npos);
}

TEST_CASE("run_scenario: rational-rotation iterate reports the continuum and skips resonance") {
    fs::path dir = fs::temp_directory_path() / "spindex_run_third";
    fs::remove_all(dir);
    std::string text = std::string(R"({
  "hamiltonian": {"kind": "rotation", "params": {"alpha": 0.33333333333333331}},
  "iterate_k": 3,
  "census": {"newton_step": 0.004},
  "out_dir": ")") + (dir / "out").string() + R"("})";
    Scenario s = scenario_from_json(text);
    RunOutcome outcome = run_scenario(s);
    CHECK(outcome.verdicts_passed);  // informational outcome, nothing failed
    CHECK(outcome.summary.find("continuum") != std::string::npos);
    std::string report = slurp(dir / "out" / "report.json");
    CHECK(report.find("\"continuum_flag\": true") != std::string::npos);
    CHECK(report.find("\"two_point\": null") != std::string::npos);
}

TEST_CASE("cli sphere subcommand reports pole indices") {
    fs::path dir = fs::temp_directory_path() / "spindex_cli_sphere";
    fs::create_directories(dir);
    fs::path hf = dir / "rot.json";
    std::ofstream(hf) << hamiltonian_to_json(make_rotation(0.25));
    std::string output;
    int rc = run_cli("sphere --hamiltonian " + hf.string() +
                         " --point 0,0,1 --excluded 0,0,-1 --time 1 --trajectory-out " +
                         (dir / "traj.csv").string(),
                     &output);
    CHECK(rc == 0);
    size_t at = output.find("\"delta\":");
    REQUIRE(at != std::string::npos);
    CHECK(std::stod(output.substr(at + 8)) == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(output.find("\"mu\":-1") != std::string::npos);
    CHECK(fs::exists(dir / "traj.csv"));
}

TEST_CASE("shipped scenario catalog validates cleanly") {
    fs::path scen_dir = fs::path(SPINDEX_SOURCE_DIR) / "scenarios";
    REQUIRE(fs::exists(scen_dir));
    int count = 0;
    for (const auto& entry : fs::directory_iterator(scen_dir)) {
        if (entry.path().extension() != ".json") continue;
        ++count;
        auto diags = validate_scenario_json(slurp(entry.path()));
        for (const auto& d : diags) MESSAGE(entry.path().string(), ": ", d);
        CHECK(diags.empty());
    }
    CHECK(count >= 5);
}

TEST_CASE("run_scenario writes the full bundle and reports pass") {
    fs::path dir = fs::temp_directory_path() / "spindex_run_direct";
    fs::remove_all(dir);
    Scenario s = scenario_from_json(tiny_scenario((dir / "out").string()));
    RunOutcome outcome = run_scenario(s);
    CHECK(outcome.verdicts_passed);
    CHECK(outcome.files_written.size() >= 3);
    std::string report = slurp(dir / "out" / "report.json");
    CHECK(report.find("\"two_point\"") != std::string::npos);
    CHECK(report.find("\"config\"") != std::string::npos);
}
