#ifndef SPINDEX_SYMPLECTIC_PATH_HPP
#define SPINDEX_SYMPLECTIC_PATH_HPP

#include <functional>
#include <string>
#include <vector>

#include "spindex/linalg.hpp"

namespace spindex {

/// Discretized path in Sp(2) = SL(2,R), starting at the identity at t = 0
/// and ending at t = 1.  Carrier of the mean index and Conley-Zehnder index.
struct PathSample {
    double t = 0.0;
    Mat2 m;
};

struct SymplecticPath2 {
    std::vector<PathSample> samples;
    std::string source;  // provenance label, e.g. "rotation" or "linearized:<name>"

    static constexpr double kDetTol = 1e-8;
    static constexpr double kStepBound = 0.5;

    const Mat2& endpoint() const { return samples.back().m; }

    /// Checks all structural invariants; throws std::invalid_argument on the
    /// first violation (identity start, det within 1e-8 of 1, strictly
    /// increasing t ending at 1, consecutive step <= 0.5 in Frobenius norm).
    void validate() const;

    /// Piecewise-linear refinement in matrix entries, with each inserted
    /// sample projected back to det = 1.  Guarantees consecutive steps
    /// <= max_step afterwards.
    SymplecticPath2 refined(double max_step) const;
};

/// Builds a path by sampling a matrix-valued function on [0,1].
SymplecticPath2 sample_path(const std::string& source, int n,
                            const std::function<Mat2(double)>& f);

/// JSON exchange format: array of {t, m:[m11,m12,m21,m22]}, 17 significant digits.
std::string path_to_json(const SymplecticPath2& path);
SymplecticPath2 path_from_json(const std::string& text);

}  // namespace spindex

#endif
