#ifndef SPINDEX_BLOWUP_GLUE_HPP
#define SPINDEX_BLOWUP_GLUE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spindex/orbit_census.hpp"

namespace spindex {

/// Sphere map punctured at two elliptic static fixed points (the poles, with
/// the first marked point on top) and completed to the closed cylinder
/// [-1,1] x R/2piZ.  Boundary circles act as rigid rotations; rot_top and
/// rot_bottom are continuously lifted angles in cylinder-theta orientation.
struct CylinderMap {
    int nz = 0, ntheta = 0;
    std::vector<Vec2> images;          // (z', theta'-lifted), row-major nz x ntheta
    double rot_top = 0.0, rot_bottom = 0.0;
    HamiltonianSpec spec;
    int iterate = 1;
    double area_drift = 0.0;           // measured on small centered test cells
    double boundary_rigidity = 0.0;    // extrapolated non-uniformity at the boundary
    // lifted boundary angles as functions of isotopy time, sampled uniformly
    std::vector<double> beta_top, beta_bottom;

    double beta_at(bool top, double t) const;
    double z_at(int i) const { return -1.0 + 2.0 * i / (nz - 1); }
    double theta_at(int j) const { return kTwoPi * j / ntheta; }
};

struct BlowUpOptions {
    int nz = 256;
    int ntheta = 512;
    FlowOptions flow;
    int beta_samples = 256;
};

/// Transfers the time-k map to closed-cylinder coordinates, with the marked
/// points blown up to boundary circles.  Both marked points must be elliptic
/// static fixed points at the poles (first point on top); hyperbolic or
/// degenerate marked points are rejected.
CylinderMap blow_up(const HamiltonianSpec& spec, int k, const SpherePoint& P,
                    const SpherePoint& Q_or_R, const BlowUpOptions& opts = {});

struct TorusFixedPoint {
    std::string tag;        // e.g. "2+" / "2-"
    double zeta = 0.0, theta = 0.0;
    SpherePoint sphere_point;
    double trace = 2.0;
    OrbitClass classification = OrbitClass::Degenerate;
    double delta1 = 0.0;    // lifted mean index over one period
    std::string homotopy_tag = "w0";
    SymplecticPath2 path;   // linearized path over one period
};

/// Area-preserving isotopy of the glued torus.  Coordinates (zeta, theta)
/// with zeta of period 4 + 2 tau and Omega = dzeta ^ dtheta; layout
/// [0,2] big cylinder (+), [2, 2+tau] connecting cylinder, [2+tau, 4+tau]
/// big cylinder (-), [4+tau, 4+2tau] connecting cylinder.
struct TorusIsotopy {
    double tau = 0.5;
    double length = 5.0;               // 4 + 2 tau
    double total_area = 0.0;           // (8 + 4 tau) * pi, exact by construction
    std::vector<TorusFixedPoint> fixed_points;
    std::string label = "glued";
    // generating vector field (zeta_dot, theta_dot) at isotopy time t
    std::function<Vec2(double t, double zeta, double theta)> field;
    // minimal collar rotation distance to 0 mod 2pi (fixed-point-free margin)
    double collar_margin = 0.0;

    Vec2 field_at(double t, double zeta, double theta) const { return field(t, zeta, theta); }
};

/// Glues two copies of the cylinder map head-to-tail with two connecting
/// cylinders of width tau, interpolating the adjacent boundary rotations
/// monotonically; no fixed points appear in the collars when both boundary
/// angles stay >= 1e-3 away from 0 mod 2pi.  A sphere census (marked points
/// included) may be supplied to populate the doubled fixed-point list.
TorusIsotopy glue(const CylinderMap& cyl, double tau,
                  const CensusReport* sphere_census = nullptr);

/// Values of the flux on the two torus generators: A1 pairs with the theta
/// loop {zeta = const}, A2 with the zeta loop {theta = const}.  For the
/// translation isotopy (zeta, theta) -> (zeta + t u, theta + t v) this
/// convention yields (A1, A2) = (-2 pi u, L v); the period lattice is
/// (2 pi L Z)^2.
struct FluxVector {
    double A1 = 0.0, A2 = 0.0;
    double lattice = 0.0;  // 2 pi L

    double reduced1() const { return positive_mod(A1, lattice); }
    double reduced2() const { return positive_mod(A2, lattice); }
    double distance_to_zero() const;
};

struct FluxOptions {
    int t_samples = 128;     // >= 64 required
    int loop_samples = 512;
    double zeta_probe = 1.0; // theta-loop location for the A1 pairing
    double theta_probe = 0.0;
};

/// Quadrature of the flux one-forms over [0,1] x generators.
FluxVector flux(const TorusIsotopy& iso, const FluxOptions& opts = {});

enum class DichotomyKind { HamiltonianLike, FixedPointFreeLike, Inconsistent };

struct DichotomyVerdict {
    DichotomyKind kind = DichotomyKind::Inconsistent;
    std::string message;
    double flux_distance = 0.0;
    int census_size = 0;
    int torus_lefschetz = 0;
};

/// Flux-level surrogate of the Floer-homology dichotomy: vanishing flux must
/// come with a nonempty census of zero Lefschetz sum, nonzero flux is
/// consistent with an empty census.
DichotomyVerdict dichotomy_verdict(const FluxVector& fv, const TorusIsotopy& iso,
                                   double tol = 1e-6);

struct IndexGapRow {
    std::string tag_i, tag_j;
    double delta_i = 0.0, delta_j = 0.0;
    double gap = 0.0;
    bool equal = false;
    bool flagged = false;  // gap > 3
};

struct IndexGapReport {
    int k = 1;
    std::string base_tag;
    std::string homotopy_class;
    std::vector<IndexGapRow> rows;
};

/// Pairwise lifted mean-index gaps at iterate k among the fixed points in the
/// same homotopy class as the base orbit, computed through the iteration of
/// the stored linearized paths.
IndexGapReport index_gap_report(const TorusIsotopy& iso, const std::string& base_tag, int k);

// ---- synthetic isotopies for flux-level tests --------------------------------

TorusIsotopy identity_isotopy(double tau);
TorusIsotopy translation_isotopy(double tau, double zeta_rate, double theta_rate);
/// Flow of a time-independent torus function F(zeta, theta).
TorusIsotopy hamiltonian_isotopy(double tau,
                                 const std::function<double(double, double)>& F,
                                 double fd_step = 1e-5);
/// Time-concatenation: first, then second (as isotopies of maps).
TorusIsotopy concatenate(const TorusIsotopy& first, const TorusIsotopy& second);

/// Sweeps Newton seeds over the torus and reports roots that are not within
/// match_radius of a listed fixed point; used to certify the doubled census.
struct TorusCensusCheck {
    int matched = 0;
    int unmatched = 0;
    double collar_min_rotation = 0.0;  // min |rotation| mod 2pi over the collars
};
TorusCensusCheck verify_torus_census(const TorusIsotopy& iso, const CylinderMap& cyl,
                                     int grid_nzeta = 48, int grid_ntheta = 48,
                                     double match_radius = 1e-5);

std::string cylinder_to_json_header(const CylinderMap& cyl, double tau);
std::string cylinder_to_csv(const CylinderMap& cyl);
std::string flux_to_json(const FluxVector& fv, const DichotomyVerdict* verdict = nullptr);
std::string index_gaps_to_json(const IndexGapReport& report);

}  // namespace spindex

#endif
