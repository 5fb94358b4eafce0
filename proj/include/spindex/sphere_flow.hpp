#ifndef SPINDEX_SPHERE_FLOW_HPP
#define SPINDEX_SPHERE_FLOW_HPP

#include <string>
#include <vector>

#include "spindex/hamiltonian.hpp"
#include "spindex/index_core.hpp"
#include "spindex/symplectic_path.hpp"

namespace spindex {

/// Point on the unit sphere, renormalized on construction.
struct SpherePoint {
    Vec3 p{0.0, 0.0, 1.0};

    SpherePoint() = default;
    explicit SpherePoint(const Vec3& v) : p(v.normalized()) {}
    SpherePoint(double x, double y, double z) : SpherePoint(Vec3(x, y, z)) {}

    double chordal(const SpherePoint& o) const { return (p - o.p).norm(); }
};

inline SpherePoint north_pole() { return SpherePoint(0.0, 0.0, 1.0); }
inline SpherePoint south_pole() { return SpherePoint(0.0, 0.0, -1.0); }

/// Darboux chart atlas for the area form dz ^ dtheta: a cylindrical chart on
/// |z| < 1 - eps_cap and two polar cap charts in (rho = r^2/2)-type
/// coordinates.  All charts have unit symplectic area and positive
/// orientation with respect to dz ^ dtheta.
enum class ChartId { Cylinder, CapNorth, CapSouth };

struct ChartPoint {
    ChartId chart = ChartId::Cylinder;
    Vec2 q;
};

namespace chart {

constexpr double kCapEnter = 0.8;   // |z| threshold for switching to a cap chart
constexpr double kCapLeave = 0.78;  // hysteresis on the way out
constexpr double kEpsCap = 0.05;    // cylindrical chart never evaluated beyond 1 - eps

Vec3 to_sphere(const ChartPoint& c);
ChartPoint from_sphere(ChartId id, const Vec3& p);
ChartId preferred(const Vec3& p, ChartId current);

/// Tangent basis d p / d q as two ambient vectors (columns).
void tangent_basis(const ChartPoint& c, Vec3& e1, Vec3& e2);

/// Transition Jacobian d(chart_to)/d(chart_from) at a sphere point.
Mat2 transition(const ChartPoint& from, ChartId to);

/// Hamiltonian value/derivatives pulled into the chart: first-order partials
/// and the symmetric second-order partials of H restricted to the chart.
struct ChartDerivs {
    double H;
    Vec2 dH;       // (dH/dq1, dH/dq2)
    double d11, d12, d22;
};
ChartDerivs pull_back(const HamiltonianSpec& spec, double t, const ChartPoint& c);

}  // namespace chart

/// Trivialization of the tangent bundle along an orbit: the symplectic frame
/// of the stereographic chart from excluded_point (positively oriented for
/// dz ^ dtheta), plus an integer number of extra full turns.
struct TrivializationRecord {
    SpherePoint excluded_point = south_pole();
    int winding_correction = 0;
    std::string reference_loop_class = "contractible";
};

/// The 2x2 frame F_p expressed on the tangent basis of `c`'s chart:
/// F expresses chart-basis tangent vectors in trivialization coordinates,
/// normalized to determinant 1.
Mat2 trivialization_frame(const TrivializationRecord& triv, const ChartPoint& c);

struct TrajectorySample {
    double t;
    Vec3 p;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<std::string> warnings;
    const Vec3& endpoint() const { return samples.back().p; }
};

struct FlowOptions {
    double step = 1e-3;
    // 4th-order triple-jump composition of implicit-midpoint substeps.
    bool fourth_order = true;
};

/// Hamiltonian vector field at (t, p) in the ambient embedding.
Vec3 vector_field(const HamiltonianSpec& spec, double t, const SpherePoint& p);

/// Flow of the Hamiltonian field from p0 over [0, T].
Trajectory flow(const HamiltonianSpec& spec, const SpherePoint& p0, double T,
                const FlowOptions& opts = {});

/// Linearized flow along the trajectory from p0 over [0, T], expressed in the
/// trivialization frame; returns a path in SL(2,R) on the rescaled time [0,1].
/// Throws std::runtime_error("trivialization breakdown ...") when the orbit
/// approaches the excluded point.
SymplecticPath2 linearized_flow(const HamiltonianSpec& spec, const SpherePoint& p0, double T,
                                const TrivializationRecord& triv, const FlowOptions& opts = {});

struct OrbitIndex {
    double delta_lifted;
    ModularIndex delta_mod;
};

/// Lifted mean index of a closed orbit (endpoint within 1e-7 of the start)
/// for the given trivialization, plus its reduction mod 4.
OrbitIndex mean_index_orbit(const HamiltonianSpec& spec, const SpherePoint& p0, double T,
                            const TrivializationRecord& triv, const FlowOptions& opts = {});

/// Time-k map and its chart-frame linearization at a point (used by the
/// census and the blow-up).  Returns the image point; D is expressed from the
/// chart at p to the chart at the image.
SpherePoint time_k_map(const HamiltonianSpec& spec, const SpherePoint& p, int k,
                       Mat2* linearization = nullptr, const FlowOptions& opts = {});

std::string trajectory_to_csv(const Trajectory& traj);

}  // namespace spindex

#endif
