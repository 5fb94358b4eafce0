#ifndef SPINDEX_ORBIT_CENSUS_HPP
#define SPINDEX_ORBIT_CENSUS_HPP

#include <optional>
#include <string>
#include <vector>

#include "spindex/sphere_flow.hpp"

namespace spindex {

enum class OrbitClass { Elliptic, Hyperbolic, Degenerate };

/// Fixed point of the k-th iterate of the time-1 map, with its linearization
/// data and indices.
struct PeriodicOrbit {
    SpherePoint point;
    int period = 1;
    double trace = 2.0;
    OrbitClass classification = OrbitClass::Degenerate;
    IndexReport index_report;
    double delta_lifted = 0.0;
    ModularIndex modular_delta;
    TrivializationRecord trivialization;
    std::string homotopy_tag = "w0";
    SymplecticPath2 linearized_path;  // over one period, normalized to [0,1]
};

struct CensusReport {
    std::vector<PeriodicOrbit> orbits;
    std::optional<int> lefschetz_sum;  // set when no degenerate orbit and no continuum
    bool continuum_flag = false;
    std::string diagnostics;           // e.g. "census incomplete: Lefschetz sum 0 != 2"
    int iterate = 1;
};

struct CensusOptions {
    int grid_nz = 32;
    int grid_ntheta = 64;
    double newton_tol = 1e-10;
    double dedupe_radius = 1e-6;
    double newton_step = 2e-3;  // integrator step during Newton iterations
    FlowOptions flow;           // final polish / index computation step
    int max_newton_iter = 40;
};

/// Locates all fixed points of the k-th iterate of the time-1 map by
/// seed-grid Newton iteration on the displacement map in local Darboux
/// charts, dedupes, classifies, and computes indices.
CensusReport find_fixed_points(const HamiltonianSpec& spec, int k, const CensusOptions& opts = {});

/// Single Newton search from one seed; empty when the iteration diverges.
std::optional<SpherePoint> newton_fixed_point(const HamiltonianSpec& spec, const SpherePoint& seed,
                                              int k, const CensusOptions& opts = {});

OrbitClass classify(double trace);

/// Sum over nondegenerate fixed points of sign(det(I - D)); equals the Euler
/// characteristic 2 for any complete census of a sphere map isotopic to the
/// identity.  Throws std::domain_error when a degenerate orbit or a continuum
/// makes the sum inapplicable.
int lefschetz_sum(const CensusReport& report);

/// Attaches a time-localized quadratic twist at a static fixed point R of the
/// flow.  R remains a static fixed point; the lifted mean index at R grows by
/// exactly lambda/pi, lambda = lambda0 * integral(kappa).
HamiltonianSpec twist_perturbation(const HamiltonianSpec& spec, const SpherePoint& R,
                                   const TwistPerturbation& tp);

/// Small seeded Fourier-mode perturbation standing in for a generic
/// nondegeneracy perturbation.
HamiltonianSpec apply_generic_perturbation(const HamiltonianSpec& spec, unsigned long long seed,
                                           double amplitude, int max_mode = 3);

struct RationalityVerdict {
    bool is_rational = false;
    long long p = 0;
    long long q = 1;
    double error = 0.0;   // |delta - p/q| for the best candidate
    long long qmax = 0;
    double tol = 0.0;
};

/// Continued-fraction scan for a rational p/q with q <= qmax within tol of
/// delta.  Convergents and semiconvergents are examined; for tol below
/// 1/(2 qmax^2) the scan is exhaustive by the classical approximation bound.
RationalityVerdict rationality_test(double delta, long long qmax, double tol);

std::string census_to_json(const CensusReport& report);
std::string census_to_csv(const CensusReport& report);

}  // namespace spindex

#endif
