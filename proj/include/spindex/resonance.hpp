#ifndef SPINDEX_RESONANCE_HPP
#define SPINDEX_RESONANCE_HPP

#include <string>
#include <vector>

#include "spindex/orbit_census.hpp"

namespace spindex {

/// Configuration for resonance detection on a manifold with minimal Chern
/// number N and half-dimension n; the sphere instance is N = 2, n = 1,
/// indices mod 2N = 4.
struct ResonanceConfig {
    int N = 2;
    int n = 1;
    int a_max = 20;
    double tol = 1e-6;
    long long qmax = 10000;        // rationality scan bound
    double rational_tol = 1e-9;

    double modulus() const { return 2.0 * N; }
    void validate() const;
};

/// Integer vectors a with a . Delta = 0 (mod 2N) within tol, primitive and
/// sign-normalized, plus the rank of the lattice they span.
struct ResonanceSet {
    std::vector<double> deltas;
    std::vector<std::vector<long>> vectors;
    int rank_estimate = 0;
    double modulus = 4.0;
    double tol = 1e-6;
};

/// Exhaustive scan over the box |a_i| <= a_max.
ResonanceSet find_resonances(const std::vector<double>& deltas, const ResonanceConfig& cfg);

struct GeneratorVerdict {
    bool applicable = false;  // rank must be 1
    bool pass = false;
    std::vector<long> generator;
    long coefficient_sum = 0;
    double bound = 0.0;       // N / (N - n)
    std::string message;
};

/// Checks the structure of a rank-one resonance set: the generator must be
/// sign-normalizable to nonnegative entries with coefficient sum at most
/// N/(N-n) (= 2 on the sphere).
GeneratorVerdict check_generator_bound(const ResonanceSet& rs, const ResonanceConfig& cfg);

struct TwoPointVerdict {
    enum class Kind { Pass, Fail, Informational, Violation } kind = Kind::Informational;
    std::string message;
    int orbit_count = 0;
    double sum_mod = 0.0;          // (Delta(P)+Delta(Q)) mod 4, for two-orbit censuses
    double residual = 0.0;         // distance of sum_mod to 0 mod 4
    std::vector<RationalityVerdict> rationality;
    ResonanceSet resonances;
    GeneratorVerdict generator;
};

/// Checks the two-fixed-point conclusions on a census: exactly two orbits
/// must be nondegenerate elliptic with irrational mean indices summing to
/// 0 mod 4; more orbits yield an informational verdict.
TwoPointVerdict verify_two_point_theorem(const CensusReport& census, const ResonanceConfig& cfg);

std::string resonance_to_json(const ResonanceSet& rs);
std::string verdict_to_json(const TwoPointVerdict& v, const ResonanceConfig& cfg);

}  // namespace spindex

#endif
