#ifndef SPINDEX_INDEX_CORE_HPP
#define SPINDEX_INDEX_CORE_HPP

#include <complex>
#include <optional>
#include <string>

#include "spindex/symplectic_path.hpp"

namespace spindex {

/// Mean index / Conley-Zehnder report for a single path, in half-dimension n = 1.
/// mu is empty when the endpoint has an eigenvalue within 1e-8 of 1.
struct IndexReport {
    double delta = 0.0;
    std::optional<long> mu;
    int n = 1;
    std::array<std::complex<double>, 2> endpoint_eigenvalues;

    bool degenerate() const { return !mu.has_value(); }
};

/// Mean index reduced modulo twice the minimal Chern number (2N = 4 on the sphere).
struct ModularIndex {
    double value = 0.0;
    double modulus = 4.0;
};

constexpr double kDegenerateEigTol = 1e-8;
constexpr double kMaxAngleStep = kPi / 2.0;

/// Circle map on SL(2,R) underlying the mean index: the eigenvalue argument
/// on the elliptic region oriented by the invariant splitting (sign of the
/// lower-left entry), locally constant 0 / pi on the hyperbolic regions.
/// Throws std::invalid_argument for a non-symplectic matrix.
double rho_angle(const Mat2& m);

/// Total continuous lift of rho_angle along the path, divided by pi.
/// Throws std::runtime_error("undersampled path ...") if any angle increment
/// exceeds pi/2.
double mean_index(const SymplecticPath2& path);

/// Conley-Zehnder index for a nondegenerate endpoint, via the crossing count
/// of the lifted angle through integer multiples of 2*pi plus the endpoint
/// correction (0 on trace > 2, 1 on trace < 2).  Returns nullopt when the
/// endpoint is degenerate (eigenvalue within 1e-8 of 1).
std::optional<long> cz_index(const SymplecticPath2& path);

/// Full report: delta, mu, endpoint eigenvalues.
IndexReport index_report(const SymplecticPath2& path);

/// Dimension-two shortcut: the odd integer closest to delta.  Requires delta
/// at distance > 1e-9 from every integer; throws std::domain_error
/// ("lemma inapplicable") otherwise.  Serves as a cross-check for cz_index.
long cz_via_closest_odd(double delta);

/// k-th iterate path: t -> A(kt - j) * A(1)^j on [j/k, (j+1)/k], resampled so
/// the step-size and angle-lifting bounds hold.
SymplecticPath2 iterate_path(const SymplecticPath2& path, int k);

/// delta mod modulus into [0, modulus); modulus must be a positive even integer.
ModularIndex reduce_mod(double delta, double modulus);

/// Endpoint eigenvalue within tol of 1?
bool endpoint_degenerate(const Mat2& endpoint, double tol = kDegenerateEigTol);

std::string report_to_json(const IndexReport& report);

}  // namespace spindex

#endif
