#include "spindex/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace spindex {

void ResonanceConfig::validate() const {
    if (N < n + 1) throw std::invalid_argument("resonance theory requires n + 1 <= N");
    if (a_max < 1 || a_max > 20) throw std::invalid_argument("a_max must lie in [1, 20]");
    if (tol <= 0.0) throw std::invalid_argument("tol must be positive");
}

namespace {

double residue_mod(double x, double modulus) {
    double r = positive_mod(x, modulus);
    return std::min(r, modulus - r);
}

long vec_gcd(const std::vector<long>& v) {
    long g = 0;
    for (long x : v) g = std::gcd(g, std::labs(x));
    return g;
}

void sign_normalize(std::vector<long>& v) {
    for (long x : v) {
        if (x > 0) return;
        if (x < 0) {
            for (long& y : v) y = -y;
            return;
        }
    }
}

// Rank of an integer matrix (rows = vectors) by fraction-free elimination.
int lattice_rank(std::vector<std::vector<long>> rows) {
    int rank = 0;
    size_t cols = rows.empty() ? 0 : rows[0].size();
    size_t rpos = 0;
    for (size_t c = 0; c < cols && rpos < rows.size(); ++c) {
        size_t pivot = rpos;
        while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rpos], rows[pivot]);
        for (size_t r = rpos + 1; r < rows.size(); ++r) {
            if (rows[r][c] == 0) continue;
            long a = rows[rpos][c], b = rows[r][c];
            long g = std::gcd(std::labs(a), std::labs(b));
            long fa = b / g, fb = a / g;
            for (size_t cc = 0; cc < cols; ++cc)
                rows[r][cc] = rows[r][cc] * fb - rows[rpos][cc] * fa;
        }
        ++rpos;
        ++rank;
    }
    return rank;
}

}  // namespace

ResonanceSet find_resonances(const std::vector<double>& deltas, const ResonanceConfig& cfg) {
    cfg.validate();
    if (deltas.empty()) throw std::invalid_argument("find_resonances: deltas must be nonempty");
    size_t m = deltas.size();
    double box = std::pow(2.0 * cfg.a_max + 1.0, static_cast<double>(m));
    if (box > 1e8)
        throw std::invalid_argument("resonance scan budget exceeded; use smaller a_max");

    ResonanceSet rs;
    rs.deltas = deltas;
    rs.modulus = cfg.modulus();
    rs.tol = cfg.tol;

    std::vector<long> a(m, -cfg.a_max);
    bool done = false;
    while (!done) {
        bool zero = std::all_of(a.begin(), a.end(), [](long x) { return x == 0; });
        if (!zero) {
            double s = 0.0;
            for (size_t i = 0; i < m; ++i) s += a[i] * deltas[i];
            if (residue_mod(s, rs.modulus) <= cfg.tol) {
                // keep vectors primitive within the resonance group: divide
                // by the largest divisor that still solves the relation
                std::vector<long> v = a;
                long g = vec_gcd(v);
                for (long div = g; div >= 2; --div) {
                    if (g % div != 0) continue;
                    double sd = 0.0;
                    for (size_t i = 0; i < m; ++i) sd += (a[i] / div) * deltas[i];
                    if (residue_mod(sd, rs.modulus) <= cfg.tol) {
                        for (long& x : v) x /= div;
                        break;
                    }
                }
                sign_normalize(v);
                if (std::find(rs.vectors.begin(), rs.vectors.end(), v) == rs.vectors.end())
                    rs.vectors.push_back(v);
            }
        }
        // advance the box counter
        size_t i = 0;
        while (true) {
            if (i == m) {
                done = true;
                break;
            }
            if (++a[i] <= cfg.a_max) break;
            a[i] = -cfg.a_max;
            ++i;
        }
    }
    std::sort(rs.vectors.begin(), rs.vectors.end());
    rs.rank_estimate = lattice_rank(rs.vectors);
    return rs;
}

GeneratorVerdict check_generator_bound(const ResonanceSet& rs, const ResonanceConfig& cfg) {
    GeneratorVerdict v;
    v.bound = static_cast<double>(cfg.N) / (cfg.N - cfg.n);
    if (rs.rank_estimate != 1) {
        v.message = "bound inapplicable: resonance rank is " + std::to_string(rs.rank_estimate);
        return v;
    }
    v.applicable = true;
    // pick the shortest primitive vector as the generator
    std::vector<long> best;
    long best_norm = 0;
    for (const auto& vec : rs.vectors) {
        long norm = 0;
        for (long x : vec) norm += x * x;
        if (best.empty() || norm < best_norm) {
            best = vec;
            best_norm = norm;
        }
    }
    v.generator = best;
    bool all_nonneg = std::all_of(best.begin(), best.end(), [](long x) { return x >= 0; });
    bool all_nonpos = std::all_of(best.begin(), best.end(), [](long x) { return x <= 0; });
    if (!all_nonneg && all_nonpos) {
        for (long& x : v.generator) x = -x;
        all_nonneg = true;
    }
    long sum = 0;
    for (long x : v.generator) sum += std::labs(x);
    v.coefficient_sum = sum;
    v.pass = all_nonneg && static_cast<double>(sum) <= v.bound + 1e-12;
    v.message = v.pass ? "generator satisfies the coefficient bound"
                       : "generator violates the coefficient bound";
    return v;
}

TwoPointVerdict verify_two_point_theorem(const CensusReport& census, const ResonanceConfig& cfg) {
    cfg.validate();
    if (census.continuum_flag)
        throw std::invalid_argument("two-point check requires an isolated census");
    TwoPointVerdict v;
    v.orbit_count = static_cast<int>(census.orbits.size());
    if (census.orbits.size() > 2) {
        v.kind = TwoPointVerdict::Kind::Informational;
        v.message = "census has more than two fixed points: the theorem predicts infinitely "
                    "many periodic points for higher iterates";
        return v;
    }
    if (census.orbits.size() < 2) {
        v.kind = TwoPointVerdict::Kind::Fail;
        v.message = "census has fewer than two fixed points; Lefschetz theory makes this "
                    "impossible for a sphere map, census incomplete";
        return v;
    }
    const PeriodicOrbit& P = census.orbits[0];
    const PeriodicOrbit& Q = census.orbits[1];
    for (const PeriodicOrbit* o : {&P, &Q}) {
        if (o->classification == OrbitClass::Degenerate) {
            v.kind = TwoPointVerdict::Kind::Violation;
            v.message = "two-point census contains a degenerate fixed point: violates the "
                        "two-point theorem (falsification hook)";
            return v;
        }
        if (o->classification != OrbitClass::Elliptic) {
            v.kind = TwoPointVerdict::Kind::Fail;
            v.message = "two-point census contains a hyperbolic fixed point";
            return v;
        }
    }
    v.rationality.push_back(rationality_test(P.modular_delta.value, cfg.qmax, cfg.rational_tol));
    v.rationality.push_back(rationality_test(Q.modular_delta.value, cfg.qmax, cfg.rational_tol));
    double sum = P.modular_delta.value + Q.modular_delta.value;
    v.sum_mod = positive_mod(sum, cfg.modulus());
    v.residual = std::min(v.sum_mod, cfg.modulus() - v.sum_mod);
    v.resonances = find_resonances({P.modular_delta.value, Q.modular_delta.value}, cfg);
    v.generator = check_generator_bound(v.resonances, cfg);
    bool irrational = !v.rationality[0].is_rational && !v.rationality[1].is_rational;
    bool sum_ok = v.residual <= cfg.tol;
    if (irrational && sum_ok) {
        v.kind = TwoPointVerdict::Kind::Pass;
        v.message = "two fixed points, both strongly nondegenerate elliptic, irrational mean "
                    "indices summing to 0 mod 4";
    } else {
        v.kind = TwoPointVerdict::Kind::Fail;
        std::ostringstream os;
        os << "two-point conclusions fail:";
        if (!irrational) os << " a mean index admits a rational approximation;";
        if (!sum_ok) os << " index sum residual " << v.residual << " exceeds tol " << cfg.tol;
        v.message = os.str();
    }
    return v;
}

std::string resonance_to_json(const ResonanceSet& rs) {
    nlohmann::ordered_json j;
    j["deltas"] = rs.deltas;
    j["modulus"] = rs.modulus;
    j["tol"] = rs.tol;
    j["vectors"] = rs.vectors;
    j["rank_estimate"] = rs.rank_estimate;
    return j.dump();
}

std::string verdict_to_json(const TwoPointVerdict& v, const ResonanceConfig& cfg) {
    nlohmann::ordered_json j;
    const char* kinds[] = {"pass", "fail", "informational", "violation"};
    j["kind"] = kinds[static_cast<int>(v.kind)];
    j["message"] = v.message;
    j["orbit_count"] = v.orbit_count;
    j["sum_mod"] = v.sum_mod;
    j["residual"] = v.residual;
    j["config"] = {{"N", cfg.N},       {"n", cfg.n},     {"a_max", cfg.a_max},
                   {"tol", cfg.tol},   {"qmax", cfg.qmax}, {"rational_tol", cfg.rational_tol}};
    nlohmann::ordered_json rat = nlohmann::ordered_json::array();
    for (const auto& r : v.rationality) {
        rat.push_back({{"is_rational", r.is_rational},
                       {"p", r.p},
                       {"q", r.q},
                       {"error", r.error},
                       {"qmax", r.qmax},
                       {"tol", r.tol}});
    }
    j["rationality"] = rat;
    j["resonance_vectors"] = v.resonances.vectors;
    j["resonance_rank"] = v.resonances.rank_estimate;
    if (v.generator.applicable) {
        j["generator"] = {{"vector", v.generator.generator},
                          {"coefficient_sum", v.generator.coefficient_sum},
                          {"bound", v.generator.bound},
                          {"pass", v.generator.pass}};
    }
    return j.dump(2);
}

}  // namespace spindex
