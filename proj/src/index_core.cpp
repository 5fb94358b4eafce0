#include "spindex/index_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace spindex {

double rho_angle(const Mat2& m) {
    double f2 = m.frobenius();
    f2 *= f2;
    // large matrices only determine their det to ~eps * |M|^2
    double tol = SymplecticPath2::kDetTol + 32.0 * 2.2e-16 * f2;
    if (std::abs(m.det() - 1.0) > tol) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "rho_angle: matrix is not symplectic, |det - 1| = %.3e",
                      std::abs(m.det() - 1.0));
        throw std::invalid_argument(buf);
    }
    double tr = m.trace();
    if (std::abs(tr) < 2.0) {
        double th = std::acos(std::clamp(tr / 2.0, -1.0, 1.0));
        // Elliptic matrices have b*c < 0; the sign of c picks the rotation sense.
        if (m.c < 0.0) th = kTwoPi - th;
        return th;
    }
    return tr > 0.0 ? 0.0 : kPi;
}

namespace {

/// Continuous lift of rho_angle along the path, starting at rho(A(0)).
/// Enforces the per-step angle bound of pi/2.
double total_lift(const SymplecticPath2& path) {
    double total = 0.0;
    double prev = rho_angle(path.samples.front().m);
    for (size_t i = 1; i < path.samples.size(); ++i) {
        double cur = rho_angle(path.samples[i].m);
        double step = wrap_angle(cur - prev);
        if (std::abs(step) > kMaxAngleStep)
            throw std::runtime_error("undersampled path: angle jump " + std::to_string(step) +
                                     " at t = " + std::to_string(path.samples[i].t));
        total += step;
        prev = cur;
    }
    return total;
}

}  // namespace

double mean_index(const SymplecticPath2& path) {
    path.validate();
    return total_lift(path) / kPi;
}

bool endpoint_degenerate(const Mat2& endpoint, double tol) {
    auto eig = endpoint.eigenvalues();
    double d0 = std::abs(eig[0] - std::complex<double>(1.0, 0.0));
    double d1 = std::abs(eig[1] - std::complex<double>(1.0, 0.0));
    return std::min(d0, d1) <= tol;
}

std::optional<long> cz_index(const SymplecticPath2& path) {
    path.validate();
    const Mat2& end = path.endpoint();
    if (endpoint_degenerate(end)) return std::nullopt;
    double lift = total_lift(path);
    double tr = end.trace();
    if (tr > 2.0) {
        // rho(A(1)) = 0 mod 2*pi: the lift ends at a multiple of 2*pi.
        return 2 * std::lround(lift / kTwoPi);
    }
    return 2 * static_cast<long>(std::floor(lift / kTwoPi)) + 1;
}

IndexReport index_report(const SymplecticPath2& path) {
    IndexReport r;
    r.delta = mean_index(path);
    r.mu = cz_index(path);
    r.endpoint_eigenvalues = path.endpoint().eigenvalues();
    return r;
}

long cz_via_closest_odd(double delta) {
    double nearest_int = std::round(delta);
    if (std::abs(delta - nearest_int) <= 1e-9)
        throw std::domain_error("lemma inapplicable: delta is an integer");
    long low = static_cast<long>(std::floor(delta));
    // delta lies in (low, low+1): the nearest odd integer is low when low is
    // odd, low+1 otherwise.
    return (low % 2 == 0) ? low + 1 : low;
}

SymplecticPath2 iterate_path(const SymplecticPath2& path, int k) {
    path.validate();
    if (k < 1) throw std::invalid_argument("iterate count must be positive");
    if (k == 1) return path;

    Mat2 end = path.endpoint();
    // Steps of copy j get multiplied by A(1)^j on the right; refine so the
    // worst copy still meets the step bound, then verify the lift bound.
    double pw = 1.0;
    Mat2 p = Mat2::identity();
    for (int j = 1; j < k; ++j) {
        p = end * p;
        pw = std::max(pw, p.opnorm());
    }
    double target = 0.4 * SymplecticPath2::kStepBound / std::min(pw, 100.0);

    for (int attempt = 0; attempt < 8; ++attempt) {
        SymplecticPath2 base = path.refined(std::max(target, 1e-7));
        SymplecticPath2 out;
        out.source = path.source + " iterate^" + std::to_string(k);
        out.samples.reserve(1 + k * (base.samples.size() - 1));
        out.samples.push_back({0.0, Mat2::identity()});
        Mat2 power = Mat2::identity();
        for (int j = 0; j < k; ++j) {
            for (size_t i = 1; i < base.samples.size(); ++i) {
                double t = (j + base.samples[i].t) / k;
                out.samples.push_back({t, base.samples[i].m * power});
            }
            power = end * power;
        }
        out.samples.back().t = 1.0;

        // The matrix step bound does not by itself bound the rho increments;
        // check and refine again if lifting would be ambiguous.
        bool ok = true;
        double prev = rho_angle(out.samples.front().m);
        for (size_t i = 1; i < out.samples.size() && ok; ++i) {
            double cur = rho_angle(out.samples[i].m);
            if (std::abs(wrap_angle(cur - prev)) > 0.9 * kMaxAngleStep) ok = false;
            prev = cur;
        }
        if (ok) return out;
        target *= 0.25;
    }
    throw std::runtime_error("iterate_path: could not refine to an unambiguous lift");
}

ModularIndex reduce_mod(double delta, double modulus) {
    if (modulus <= 0.0 || std::abs(modulus / 2.0 - std::round(modulus / 2.0)) > 1e-12)
        throw std::invalid_argument("modulus must be a positive even integer");
    return {positive_mod(delta, modulus), modulus};
}

std::string report_to_json(const IndexReport& report) {
    nlohmann::ordered_json j;
    j["delta"] = report.delta;
    if (report.mu.has_value())
        j["mu"] = *report.mu;
    else
        j["mu"] = "degenerate";
    j["n"] = report.n;
    j["eigenvalues"] = {{report.endpoint_eigenvalues[0].real(), report.endpoint_eigenvalues[0].imag()},
                        {report.endpoint_eigenvalues[1].real(), report.endpoint_eigenvalues[1].imag()}};
    return j.dump();
}

}  // namespace spindex
