#ifndef SPINDEX_HAMILTONIAN_HPP
#define SPINDEX_HAMILTONIAN_HPP

#include <optional>
#include <string>
#include <vector>

#include "spindex/linalg.hpp"

namespace spindex {

/// C-infinity monotone ramp s : [0,1] -> [0,1] with all derivatives vanishing
/// at the endpoints, s(u) + s(1-u) = 1.
double smooth_ramp(double u);
double smooth_ramp_d1(double u);
double smooth_ramp_d2(double u);

/// Time reparameterization zeta : [0,1] -> [0,1], smooth, nondecreasing, onto,
/// constant on [0, delta_h] and [1 - delta_h, 1].  The flow of
/// zeta'(t) * H0 reaches the same time-1 map as H0 while giving the
/// Hamiltonian a flat window of half-width delta_h around t = 0 (mod 1).
struct Schedule {
    double delta_h = 0.05;
    std::string zeta = "smoothstep";

    double zeta_value(double t) const;
    double zeta_rate(double t) const;  // zeta'(t), 1-periodic
    bool in_flat_window(double t) const;
};

/// Localized time-periodic twist: kappa(t) * G(p), with G equal to
/// (lambda0/2) * |p - center|^2 near the center (Darboux radial coordinate),
/// tapered off beyond support_radius.  kappa is a C-infinity bump equal to 1
/// on the middle half of its window; the window must sit inside the base
/// schedule's flat window.  A window of width >= 1 means kappa == 1.
struct TwistPerturbation {
    Vec3 center{0.0, 0.0, -1.0};
    double lambda0 = 0.1;
    double support_radius = 0.5;          // chordal radius of spatial support
    double window_center = 0.0;           // mod 1
    double window_width = 0.05;

    double kappa(double t) const;
    double kappa_integral() const;        // closed form: min(1, 3/4 * width)
    double lambda() const { return lambda0 * kappa_integral(); }

    // G and its ambient-extension derivatives as functions of u = |p - c|^2.
    double g_value(double u) const;
    double g_d1(double u) const;
    double g_d2(double u) const;
};

/// Deterministic small perturbation built from a few random smooth sphere
/// harmonics Re(c_j (px + i py)^{m_j}) * pz^{n_j}; stands in for the generic
/// nondegeneracy perturbation, reproducible from the seed.
struct FourierPerturbation {
    unsigned long long seed = 0;
    double amplitude = 0.0;
    int max_mode = 3;

    struct Term {
        double coeff_re, coeff_im;
        int m, n;
    };
    std::vector<Term> terms() const;
};

enum class HamiltonianKind { Zero, Rotation, PerturbedRotation, Tabulated };
enum class PerturbProfile { Zonal, Squared };

/// Tabulated Hamiltonian on a (z, theta) tensor grid, constant outside
/// |z| <= z_band (so the polar caps are static).  Bicubic in theta
/// (periodic), cubic in z.
struct TabulatedGrid {
    int nz = 0, ntheta = 0;
    double z_band = 0.8;
    std::vector<double> values;  // row-major, nz x ntheta

    double at(int i, int j) const { return values[static_cast<size_t>(i) * ntheta + j]; }
};

/// Declarative time-periodic Hamiltonian on the sphere: catalog base kind,
/// schedule, optional twist and Fourier terms.  H(t, p) =
/// zeta'(t) * [base(p) + fourier(p)] + kappa(t) * G_twist(p).
struct HamiltonianSpec {
    HamiltonianKind kind = HamiltonianKind::Rotation;
    double alpha = 0.0;                    // rotation / perturbed rotation
    double epsilon = 0.0;                  // perturbation strength
    int mode = 3;                          // angular mode m
    PerturbProfile profile = PerturbProfile::Zonal;
    TabulatedGrid grid;
    Schedule schedule;
    std::optional<TwistPerturbation> twist;
    std::optional<FourierPerturbation> fourier;

    /// Autonomous part (base + fourier) at a sphere point; conserved along
    /// the untwisted flow.
    double base_value(const Vec3& p) const;

    /// Value, ambient-extension gradient, and Hessian of the autonomous part.
    void base_derivatives(const Vec3& p, double& value, Vec3& grad, Mat3& hess) const;

    /// Full time-dependent value, gradient, Hessian at (t, p).
    void derivatives(double t, const Vec3& p, double& value, Vec3& grad, Mat3& hess) const;

    double value(double t, const Vec3& p) const;

    bool autonomous() const { return !twist.has_value(); }

    void validate() const;
};

HamiltonianSpec make_rotation(double alpha);
HamiltonianSpec make_zero();
HamiltonianSpec make_perturbed_rotation(double alpha, double epsilon, int mode,
                                        PerturbProfile profile);

std::string hamiltonian_to_json(const HamiltonianSpec& spec);
HamiltonianSpec hamiltonian_from_json(const std::string& text);

}  // namespace spindex

#endif
