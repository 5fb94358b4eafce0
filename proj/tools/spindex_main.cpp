#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spindex/scenario.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

spindex::SpherePoint parse_point(const std::string& csv) {
    double x, y, z;
    if (std::sscanf(csv.c_str(), "%lf,%lf,%lf", &x, &y, &z) != 3)
        throw std::runtime_error("point must be x,y,z");
    return spindex::SpherePoint(x, y, z);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spindex: indices, censuses, resonances, and glued-torus checks for "
                 "area-preserving sphere maps"};
    app.require_subcommand(1);

    // index: mean/Conley-Zehnder indices of a path file
    auto* cmd_index = app.add_subcommand("index", "index report for a symplectic path JSON file");
    std::string path_file;
    int path_iterate = 1;
    cmd_index->add_option("--path", path_file, "path JSON file")->required();
    cmd_index->add_option("--iterate", path_iterate, "iterate the path k times first");

    // sphere: flow + linearized indices of one orbit
    auto* cmd_sphere = app.add_subcommand("sphere", "flow an orbit and report its indices");
    std::string ham_file, point_csv = "0,0,1", excluded_csv = "0,0,-1", traj_out;
    double total_time = 1.0, step = 1e-3;
    cmd_sphere->add_option("--hamiltonian", ham_file, "Hamiltonian JSON file")->required();
    cmd_sphere->add_option("--point", point_csv, "initial point x,y,z");
    cmd_sphere->add_option("--time", total_time, "integration time");
    cmd_sphere->add_option("--excluded", excluded_csv, "trivialization excluded point x,y,z");
    cmd_sphere->add_option("--step", step, "integrator step");
    cmd_sphere->add_option("--trajectory-out", traj_out, "write the trajectory CSV here");

    // resonance: brute-force relations among mean indices
    auto* cmd_res = app.add_subcommand("resonance", "integer resonance relations mod 2N");
    std::string deltas_csv;
    int a_max = 20;
    double res_tol = 1e-6;
    cmd_res->add_option("--deltas", deltas_csv, "comma-separated mean indices")->required();
    cmd_res->add_option("--amax", a_max, "coefficient bound");
    cmd_res->add_option("--tol", res_tol, "residue tolerance");

    // glue: blow up + glue + flux for a Hamiltonian
    auto* cmd_glue = app.add_subcommand("glue", "blow up at the poles, glue, and compute flux");
    std::string glue_ham, glue_out = "out";
    int glue_k = 1, glue_nz = 96, glue_ntheta = 192;
    double tau = 0.5;
    cmd_glue->add_option("--hamiltonian", glue_ham, "Hamiltonian JSON file")->required();
    cmd_glue->add_option("--iterate", glue_k, "iterate k");
    cmd_glue->add_option("--tau", tau, "connecting cylinder width (0,1]");
    cmd_glue->add_option("--grid-nz", glue_nz, "cylinder grid rows");
    cmd_glue->add_option("--grid-ntheta", glue_ntheta, "cylinder grid columns");
    cmd_glue->add_option("--out", glue_out, "output directory");

    // run / validate: scenario pipeline
    auto* cmd_run = app.add_subcommand("run", "run a scenario end to end");
    std::string scenario_file, out_dir;
    int threads = 0;
    unsigned long long seed = 0;
    bool seed_set = false;
    cmd_run->add_option("--scenario", scenario_file, "scenario JSON file")->required();
    cmd_run->add_option("--out", out_dir, "output directory (overrides the scenario)");
    cmd_run->add_option("--threads", threads, "worker threads (default: logical cores)");
    cmd_run->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
        seed_set = true;
    });

    auto* cmd_validate = app.add_subcommand("validate", "schema-check a scenario file");
    std::string validate_file;
    cmd_validate->add_option("--scenario", validate_file, "scenario JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_index->parsed()) {
            spindex::SymplecticPath2 path = spindex::path_from_json(slurp(path_file));
            if (path_iterate > 1) path = spindex::iterate_path(path, path_iterate);
            std::cout << spindex::report_to_json(spindex::index_report(path)) << "\n";
            return 0;
        }
        if (cmd_sphere->parsed()) {
            spindex::HamiltonianSpec spec = spindex::hamiltonian_from_json(slurp(ham_file));
            spindex::SpherePoint p0 = parse_point(point_csv);
            spindex::TrivializationRecord triv;
            triv.excluded_point = parse_point(excluded_csv);
            spindex::FlowOptions opts;
            opts.step = step;
            if (!traj_out.empty()) {
                std::ofstream out(traj_out, std::ios::binary);
                out << spindex::trajectory_to_csv(spindex::flow(spec, p0, total_time, opts));
            }
            spindex::SymplecticPath2 path =
                spindex::linearized_flow(spec, p0, total_time, triv, opts);
            std::cout << spindex::report_to_json(spindex::index_report(path)) << "\n";
            return 0;
        }
        if (cmd_res->parsed()) {
            std::vector<double> deltas;
            std::stringstream ss(deltas_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) deltas.push_back(std::stod(tok));
            spindex::ResonanceConfig cfg;
            cfg.a_max = a_max;
            cfg.tol = res_tol;
            std::cout << spindex::resonance_to_json(spindex::find_resonances(deltas, cfg)) << "\n";
            return 0;
        }
        if (cmd_glue->parsed()) {
            spindex::HamiltonianSpec spec = spindex::hamiltonian_from_json(slurp(glue_ham));
            spindex::BlowUpOptions bopts;
            bopts.nz = glue_nz;
            bopts.ntheta = glue_ntheta;
            spindex::CylinderMap cyl =
                spindex::blow_up(spec, glue_k, spindex::north_pole(), spindex::south_pole(), bopts);
            spindex::TorusIsotopy iso = spindex::glue(cyl, tau);
            spindex::FluxVector fv = spindex::flux(iso);
            spindex::DichotomyVerdict dv = spindex::dichotomy_verdict(fv, iso);
            std::filesystem::create_directories(glue_out);
            std::ofstream header(std::filesystem::path(glue_out) / "cylinder_header.json",
                                 std::ios::binary);
            header << spindex::cylinder_to_json_header(cyl, tau);
            std::ofstream payload(std::filesystem::path(glue_out) / "cylinder.csv",
                                  std::ios::binary);
            payload << spindex::cylinder_to_csv(cyl);
            std::cout << spindex::flux_to_json(fv, &dv) << "\n";
            return 0;
        }
        if (cmd_validate->parsed()) {
            auto diags = spindex::validate_scenario_json(slurp(validate_file));
            for (const auto& d : diags) std::cout << d << "\n";
            return diags.empty() ? 0 : 2;
        }
        if (cmd_run->parsed()) {
            std::string text = slurp(scenario_file);
            auto diags = spindex::validate_scenario_json(text);
            if (!diags.empty()) {
                for (const auto& d : diags) std::cerr << d << "\n";
                return 2;
            }
            spindex::Scenario s = spindex::scenario_from_json(text);
            if (!out_dir.empty()) s.out_dir = out_dir;
            if (seed_set) s.seed = seed;
            if (threads > 0) {
                setenv("SPINDEX_THREADS", std::to_string(threads).c_str(), 1);
            }
            spindex::RunOutcome outcome = spindex::run_scenario(s);
            std::cout << outcome.summary << "\n";
            for (const auto& f : outcome.files_written) std::cout << "wrote " << f << "\n";
            return outcome.verdicts_passed ? 0 : 1;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
