#include "spindex/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spindex/svg.hpp"

namespace spindex {

namespace {

using nlohmann::json;

void check_range(std::vector<std::string>& diags, const json& j, const std::string& path,
                 double lo, double hi, bool lo_open = false, bool hi_open = false) {
    if (!j.is_number()) {
        diags.push_back(path + ": expected a number");
        return;
    }
    double v = j.get<double>();
    bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
    if (!ok) {
        std::ostringstream os;
        os << path << ": value " << v << " outside " << (lo_open ? "(" : "[") << lo << ", " << hi
           << (hi_open ? ")" : "]");
        diags.push_back(os.str());
    }
}

}  // namespace

std::vector<std::string> validate_scenario_json(const std::string& text) {
    std::vector<std::string> diags;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        diags.push_back(std::string("parse error: ") + e.what());
        return diags;
    }
    if (!j.is_object()) {
        diags.push_back("top level: expected an object");
        return diags;
    }
    if (!j.contains("hamiltonian")) {
        diags.push_back("hamiltonian: missing");
    } else {
        const json& h = j["hamiltonian"];
        if (!h.contains("kind")) {
            diags.push_back("hamiltonian.kind: missing");
        } else {
            std::string kind = h["kind"].is_string() ? h["kind"].get<std::string>() : "";
            if (kind != "zero" && kind != "rotation" && kind != "perturbed_rotation" &&
                kind != "tabulated")
                diags.push_back("hamiltonian.kind: unknown kind '" + kind + "'");
            if ((kind == "rotation" || kind == "perturbed_rotation")) {
                if (!h.contains("params") || !h["params"].contains("alpha"))
                    diags.push_back("hamiltonian.params.alpha: missing");
                else
                    check_range(diags, h["params"]["alpha"], "hamiltonian.params.alpha", 0.0, 1.0,
                                true, true);
            }
        }
        if (h.contains("schedule") && h["schedule"].contains("delta_h"))
            check_range(diags, h["schedule"]["delta_h"], "hamiltonian.schedule.delta_h", 0.0,
                        0.49);
    }
    if (j.contains("iterate_k")) {
        if (!j["iterate_k"].is_number_integer() || j["iterate_k"].get<int>() < 1)
            diags.push_back("iterate_k: must be a positive integer");
    }
    if (j.contains("census")) {
        const json& c = j["census"];
        if (c.contains("grid_nz") && c["grid_nz"].get<double>() < 32)
            diags.push_back("census.grid_nz: grid density must be at least 32");
        if (c.contains("grid_ntheta") && c["grid_ntheta"].get<double>() < 64)
            diags.push_back("census.grid_ntheta: grid density must be at least 64");
        if (c.contains("newton_tol") && c["newton_tol"].get<double>() > 1e-10)
            diags.push_back("census.newton_tol: must be <= 1e-10");
    }
    if (j.contains("resonance")) {
        const json& r = j["resonance"];
        if (r.contains("a_max")) check_range(diags, r["a_max"], "resonance.a_max", 1, 20);
        if (r.contains("N") && r.contains("n") &&
            r["N"].get<int>() < r["n"].get<int>() + 1)
            diags.push_back("resonance: requires n + 1 <= N");
    }
    if (j.contains("glue")) {
        const json& g = j["glue"];
        if (g.contains("tau")) check_range(diags, g["tau"], "glue.tau", 0.0, 1.0, true);
    }
    if (j.contains("seed") && !j["seed"].is_number())
        diags.push_back("seed: must be an unsigned integer");
    return diags;
}

Scenario scenario_from_json(const std::string& text) {
    auto diags = validate_scenario_json(text);
    if (!diags.empty()) {
        std::ostringstream os;
        os << "scenario schema violation:";
        for (const auto& d : diags) os << "\n  " << d;
        throw std::invalid_argument(os.str());
    }
    json j = json::parse(text);
    Scenario s;
    s.schema_version = j.value("schema_version", 1);
    s.name = j.value("name", std::string("scenario"));
    s.hamiltonian = hamiltonian_from_json(j["hamiltonian"].dump());
    s.iterate_k = j.value("iterate_k", 1);
    if (j.contains("census")) {
        const json& c = j["census"];
        s.census.grid_nz = c.value("grid_nz", 32);
        s.census.grid_ntheta = c.value("grid_ntheta", 64);
        s.census.newton_tol = c.value("newton_tol", 1e-10);
        s.census.dedupe_radius = c.value("dedupe_radius", 1e-6);
        s.census.flow.step = c.value("step", 1e-3);
        s.census.newton_step = c.value("newton_step", 2e-3);
    }
    if (j.contains("resonance")) {
        const json& r = j["resonance"];
        s.resonance.N = r.value("N", 2);
        s.resonance.n = r.value("n", 1);
        s.resonance.a_max = r.value("a_max", 20);
        s.resonance.tol = r.value("tol", 1e-6);
        s.resonance.qmax = r.value("qmax", 10000LL);
        s.resonance.rational_tol = r.value("rational_tol", 1e-9);
    }
    if (j.contains("glue")) {
        const json& g = j["glue"];
        s.glue_enabled = g.value("enabled", false);
        s.tau = g.value("tau", 0.5);
        s.glue_nz = g.value("grid_nz", 96);
        s.glue_ntheta = g.value("grid_ntheta", 192);
    }
    if (j.contains("gap_iterates")) s.gap_iterates = j["gap_iterates"].get<std::vector<int>>();
    s.out_dir = j.value("out_dir", std::string("out"));
    s.seed = j.value("seed", 1ULL);
    return s;
}

std::string scenario_to_json(const Scenario& s) {
    nlohmann::ordered_json j;
    j["schema_version"] = s.schema_version;
    j["name"] = s.name;
    j["hamiltonian"] = json::parse(hamiltonian_to_json(s.hamiltonian));
    j["iterate_k"] = s.iterate_k;
    j["census"] = {{"grid_nz", s.census.grid_nz},
                   {"grid_ntheta", s.census.grid_ntheta},
                   {"newton_tol", s.census.newton_tol},
                   {"dedupe_radius", s.census.dedupe_radius},
                   {"step", s.census.flow.step},
                   {"newton_step", s.census.newton_step}};
    j["resonance"] = {{"N", s.resonance.N},         {"n", s.resonance.n},
                      {"a_max", s.resonance.a_max}, {"tol", s.resonance.tol},
                      {"qmax", s.resonance.qmax},   {"rational_tol", s.resonance.rational_tol}};
    j["glue"] = {{"enabled", s.glue_enabled},
                 {"tau", s.tau},
                 {"grid_nz", s.glue_nz},
                 {"grid_ntheta", s.glue_ntheta}};
    j["gap_iterates"] = s.gap_iterates;
    j["out_dir"] = s.out_dir;
    j["seed"] = s.seed;
    return j.dump(2);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::string>& files) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    files.push_back(path.string());
}

std::string phase_portrait_svg(const HamiltonianSpec& spec, const CensusReport& census,
                               const FlowOptions& flow_opts) {
    SvgCanvas svg(0.0, kTwoPi, -1.0, 1.0);
    // background orbits from a seed lattice
    for (double z0 : {-0.85, -0.6, -0.35, -0.1, 0.15, 0.4, 0.65, 0.9}) {
        for (double th0 : {0.0, 2.1, 4.2}) {
            double R = std::sqrt(1.0 - z0 * z0);
            SpherePoint p0(R * std::cos(th0), R * std::sin(th0), z0);
            Trajectory traj = flow(spec, p0, 6.0, flow_opts);
            std::vector<Vec2> seg;
            double prev_th = th0;
            for (size_t i = 0; i < traj.samples.size(); i += 5) {
                const Vec3& p = traj.samples[i].p;
                double th = positive_mod(std::atan2(p.y, p.x), kTwoPi);
                if (!seg.empty() && std::abs(th - prev_th) > kPi) {
                    svg.polyline(seg, "#7799cc", 0.7);
                    seg.clear();
                }
                seg.push_back({th, p.z});
                prev_th = th;
            }
            svg.polyline(seg, "#7799cc", 0.7);
        }
    }
    for (const auto& o : census.orbits) {
        double th = positive_mod(std::atan2(o.point.p.y, o.point.p.x), kTwoPi);
        const char* color = o.classification == OrbitClass::Elliptic    ? "#207020"
                            : o.classification == OrbitClass::Hyperbolic ? "#b03030"
                                                                         : "#777777";
        svg.circle({th, o.point.p.z}, 4.0, color, o.classification == OrbitClass::Elliptic);
    }
    svg.frame_and_axes("theta", "z");
    return svg.finish();
}

std::string index_growth_svg(const TorusIsotopy& iso, const std::vector<int>& iterates,
                             const std::string& base_tag) {
    double max_gap = 1.0;
    std::vector<std::pair<int, IndexGapReport>> reports;
    for (int k : iterates) {
        reports.emplace_back(k, index_gap_report(iso, base_tag, k));
        for (const auto& r : reports.back().second.rows) max_gap = std::max(max_gap, r.gap);
    }
    int kmax = iterates.empty() ? 1 : iterates.back();
    SvgCanvas svg(0.0, kmax + 1.0, 0.0, max_gap * 1.1);
    if (!reports.empty()) {
        size_t pairs = reports.front().second.rows.size();
        for (size_t pr = 0; pr < pairs; ++pr) {
            std::vector<Vec2> pts{{0.0, 0.0}};
            for (const auto& [k, rep] : reports) pts.push_back({static_cast<double>(k), rep.rows[pr].gap});
            svg.polyline(pts, pr % 2 ? "#3355aa" : "#aa7733", 1.2);
        }
    }
    std::vector<Vec2> threshold{{0.0, 3.0}, {kmax + 1.0, 3.0}};
    svg.polyline(threshold, "#cc2222", 1.0);
    svg.text({0.3, 3.05}, "gap = 3", 11, "#cc2222");
    svg.frame_and_axes("iterate k", "pairwise index gap");
    return svg.finish();
}

}  // namespace

RunOutcome run_scenario(const Scenario& scenario) {
    RunOutcome outcome;
    std::filesystem::path dir(scenario.out_dir);
    std::filesystem::create_directories(dir);

    HamiltonianSpec spec = scenario.hamiltonian;
    if (spec.fourier.has_value()) spec.fourier->seed = scenario.seed;
    spec.validate();

    nlohmann::ordered_json report;
    report["schema_version"] = scenario.schema_version;
    report["name"] = scenario.name;
    report["config"] = nlohmann::json::parse(scenario_to_json(scenario));

    CensusReport census = find_fixed_points(spec, scenario.iterate_k, scenario.census);
    report["census"] = nlohmann::json::parse(census_to_json(census));
    write_file(dir / "census.csv", census_to_csv(census), outcome.files_written);
    write_file(dir / "phase_portrait.svg",
               phase_portrait_svg(spec, census, scenario.census.flow), outcome.files_written);

    bool pass = true;
    std::ostringstream summary;
    if (census.continuum_flag) {
        summary << "census: continuum of fixed points, resonance checks skipped";
        report["two_point"] = nullptr;
    } else {
        if (census.lefschetz_sum.has_value() && *census.lefschetz_sum != 2) pass = false;
        TwoPointVerdict v = verify_two_point_theorem(census, scenario.resonance);
        report["two_point"] = nlohmann::json::parse(verdict_to_json(v, scenario.resonance));
        if (v.kind == TwoPointVerdict::Kind::Fail ||
            v.kind == TwoPointVerdict::Kind::Violation)
            pass = false;
        summary << "census: " << census.orbits.size() << " orbits, two-point verdict: "
                << v.message;

        if (scenario.glue_enabled) {
            BlowUpOptions bopts;
            bopts.nz = scenario.glue_nz;
            bopts.ntheta = scenario.glue_ntheta;
            bopts.flow = scenario.census.flow;
            CylinderMap cyl =
                blow_up(spec, scenario.iterate_k, north_pole(), south_pole(), bopts);
            write_file(dir / "cylinder_header.json", cylinder_to_json_header(cyl, scenario.tau),
                       outcome.files_written);
            write_file(dir / "cylinder.csv", cylinder_to_csv(cyl), outcome.files_written);
            TorusIsotopy iso = glue(cyl, scenario.tau, &census);
            FluxVector fv = flux(iso);
            DichotomyVerdict dv = dichotomy_verdict(fv, iso);
            report["flux"] = nlohmann::json::parse(flux_to_json(fv, &dv));
            if (dv.kind == DichotomyKind::Inconsistent) pass = false;
            if (!iso.fixed_points.empty()) {
                std::string base = iso.fixed_points.front().tag;
                nlohmann::ordered_json gaps = nlohmann::ordered_json::array();
                for (int k : scenario.gap_iterates) {
                    IndexGapReport rep = index_gap_report(iso, base, k);
                    gaps.push_back(nlohmann::ordered_json::parse(index_gaps_to_json(rep)));
                }
                report["index_gaps"] = gaps;
                write_file(dir / "index_growth.svg",
                           index_growth_svg(iso, scenario.gap_iterates, base),
                           outcome.files_written);
            }
            summary << "; glued torus flux (" << fv.A1 << ", " << fv.A2 << "), " << dv.message;
        }
    }

    report["pass"] = pass;
    write_file(dir / "report.json", report.dump(2) + "\n", outcome.files_written);
    outcome.verdicts_passed = pass;
    outcome.summary = summary.str();
    return outcome;
}

}  // namespace spindex
