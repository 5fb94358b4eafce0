#include "spindex/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace spindex {

namespace {

double bump_f(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
double bump_f1(double u) { return u > 0.0 ? bump_f(u) / (u * u) : 0.0; }
double bump_f2(double u) {
    if (u <= 0.0) return 0.0;
    return bump_f(u) * (1.0 / (u * u * u * u) - 2.0 / (u * u * u));
}

}  // namespace

double smooth_ramp(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double a = bump_f(u), b = bump_f(1.0 - u);
    return a / (a + b);
}

double smooth_ramp_d1(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    double a = bump_f(u), b = bump_f(1.0 - u);
    double da = bump_f1(u), db = -bump_f1(1.0 - u);
    double s = a + b;
    return (da * s - a * (da + db)) / (s * s);
}

double smooth_ramp_d2(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    double a = bump_f(u), b = bump_f(1.0 - u);
    double da = bump_f1(u), db = -bump_f1(1.0 - u);
    double d2a = bump_f2(u), d2b = bump_f2(1.0 - u);
    double s = a + b, ds = da + db, d2s = d2a + d2b;
    // (a/s)'' = (a'' s - a s'')/s^2 - 2 s' (a' s - a s')/s^3
    return (d2a * s - a * d2s) / (s * s) - 2.0 * ds * (da * s - a * ds) / (s * s * s);
}

double Schedule::zeta_value(double t) const {
    double d = delta_h;
    if (d <= 0.0) return t;
    if (2.0 * d >= 1.0) throw std::invalid_argument("schedule delta_h must be < 1/2");
    return smooth_ramp((t - d) / (1.0 - 2.0 * d));
}

double Schedule::zeta_rate(double t) const {
    double d = delta_h;
    if (d <= 0.0) return 1.0;
    if (2.0 * d >= 1.0) throw std::invalid_argument("schedule delta_h must be < 1/2");
    double u = t - std::floor(t);
    return smooth_ramp_d1((u - d) / (1.0 - 2.0 * d)) / (1.0 - 2.0 * d);
}

bool Schedule::in_flat_window(double t) const {
    double u = t - std::floor(t);
    return u <= delta_h || u >= 1.0 - delta_h;
}

double TwistPerturbation::kappa(double t) const {
    if (window_width >= 1.0) return 1.0;
    double u = t - window_center;
    u -= std::round(u);  // nearest representative in [-1/2, 1/2)
    double w = window_width;
    if (std::abs(u) >= w / 2.0) return 0.0;
    double x = u / w + 0.5;  // in (0, 1)
    double r = 0.25;         // quarter-window ramps: plateau is the middle half
    if (x < r) return smooth_ramp(x / r);
    if (x > 1.0 - r) return smooth_ramp((1.0 - x) / r);
    return 1.0;
}

double TwistPerturbation::kappa_integral() const {
    if (window_width >= 1.0) return 1.0;
    return 0.75 * window_width;  // plateau w/2 plus two symmetric ramps of mean 1/2
}

namespace {

// Spatial cutoff chi(v), v = u / support_radius^2 with u the squared chordal
// distance: 1 for v <= 1/4, 0 for v >= 1.
double chi(double v) {
    if (v <= 0.25) return 1.0;
    if (v >= 1.0) return 0.0;
    return smooth_ramp((1.0 - v) / 0.75);
}
double chi_d1(double v) {
    if (v <= 0.25 || v >= 1.0) return 0.0;
    return -smooth_ramp_d1((1.0 - v) / 0.75) / 0.75;
}
double chi_d2(double v) {
    if (v <= 0.25 || v >= 1.0) return 0.0;
    return smooth_ramp_d2((1.0 - v) / 0.75) / (0.75 * 0.75);
}

}  // namespace

double TwistPerturbation::g_value(double u) const {
    double s2 = support_radius * support_radius;
    return 0.5 * lambda0 * u * chi(u / s2);
}

double TwistPerturbation::g_d1(double u) const {
    double s2 = support_radius * support_radius;
    double v = u / s2;
    return 0.5 * lambda0 * (chi(v) + u * chi_d1(v) / s2);
}

double TwistPerturbation::g_d2(double u) const {
    double s2 = support_radius * support_radius;
    double v = u / s2;
    return 0.5 * lambda0 * (2.0 * chi_d1(v) / s2 + u * chi_d2(v) / (s2 * s2));
}

std::vector<FourierPerturbation::Term> FourierPerturbation::terms() const {
    std::vector<Term> out;
    if (amplitude == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int m = 1; m <= max_mode; ++m) {
        for (int n = 0; n <= 1; ++n) {
            Term t;
            t.coeff_re = amplitude * unit(rng) / (m + n);
            t.coeff_im = amplitude * unit(rng) / (m + n);
            t.m = m;
            t.n = n;
            out.push_back(t);
        }
    }
    return out;
}

namespace {

// Accumulates value/gradient/Hessian of coeff * Re((px + i py)^m) * pz^n
// (and the Im companion) as polynomials on R^3.
void add_harmonic(double cre, double cim, int m, int n, const Vec3& p, double& value,
                  Vec3& grad, Mat3& hess) {
    // powers of w = px + i py
    auto wpow = [&](int k) {
        std::complex<double> w(p.x, p.y), r(1.0, 0.0);
        for (int i = 0; i < k; ++i) r *= w;
        return r;
    };
    double zn = 1.0, znm1 = 0.0, znm2 = 0.0;
    for (int i = 0; i < n; ++i) { znm2 = znm1; znm1 = zn; zn *= p.z; }
    std::complex<double> c(cre, cim);
    std::complex<double> wm = wpow(m), wm1 = m >= 1 ? wpow(m - 1) : 0.0,
                         wm2 = m >= 2 ? wpow(m - 2) : 0.0;
    // value: Re(c * w^m) * z^n
    value += (c * wm).real() * zn;
    // d/dx Re(c w^m) = Re(c m w^{m-1}); d/dy = Re(c m i w^{m-1}) = -Im(c m w^{m-1})
    std::complex<double> d = c * static_cast<double>(m) * wm1;
    grad.x += d.real() * zn;
    grad.y += -d.imag() * zn;
    grad.z += (c * wm).real() * static_cast<double>(n) * znm1;
    std::complex<double> d2 = c * static_cast<double>(m) * static_cast<double>(m - 1) * wm2;
    hess(0, 0) += d2.real() * zn;
    hess(0, 1) += -d2.imag() * zn;
    hess(1, 0) += -d2.imag() * zn;
    hess(1, 1) += -d2.real() * zn;
    hess(0, 2) += d.real() * n * znm1;
    hess(2, 0) += d.real() * n * znm1;
    hess(1, 2) += -d.imag() * n * znm1;
    hess(2, 1) += -d.imag() * n * znm1;
    hess(2, 2) += (c * wm).real() * n * (n - 1) * znm2;
}

Mat3 zero_mat3() {
    Mat3 z;
    for (int i = 0; i < 9; ++i) z.m[i] = 0.0;
    return z;
}

// Catmull-Rom cubic through 4 samples; returns value and first/second
// derivatives with respect to the local coordinate s in [0,1].
void cubic4(const double y[4], double s, double& v, double& d1, double& d2) {
    double a = -0.5 * y[0] + 1.5 * y[1] - 1.5 * y[2] + 0.5 * y[3];
    double b = y[0] - 2.5 * y[1] + 2.0 * y[2] - 0.5 * y[3];
    double c = 0.5 * (y[2] - y[0]);
    double d = y[1];
    v = ((a * s + b) * s + c) * s + d;
    d1 = (3.0 * a * s + 2.0 * b) * s + c;
    d2 = 6.0 * a * s + 2.0 * b;
}

// Bicubic evaluation of a tabulated (z, theta) grid: theta periodic, z
// clamped (constant beyond the band).  Returns H and partials up to order 2.
void tabulated_eval(const TabulatedGrid& g, double z, double theta, double& H, double& Hz,
                    double& Hth, double& Hzz, double& Hzth, double& Hthth) {
    double zb = g.z_band;
    double dz = 2.0 * zb / (g.nz - 1);
    double dth = kTwoPi / g.ntheta;
    double fz = (std::clamp(z, -zb, zb) + zb) / dz;
    int iz = std::clamp(static_cast<int>(std::floor(fz)), 0, g.nz - 2);
    double sz = fz - iz;
    double fth = positive_mod(theta, kTwoPi) / dth;
    int ith = std::clamp(static_cast<int>(std::floor(fth)), 0, g.ntheta - 1);
    double sth = fth - ith;

    auto zi = [&](int i) { return std::clamp(i, 0, g.nz - 1); };
    auto ti = [&](int j) { return (j % g.ntheta + g.ntheta) % g.ntheta; };

    double col[4], colz[4], colzz[4];
    for (int j = -1; j <= 2; ++j) {
        double y[4];
        for (int i = -1; i <= 2; ++i) y[i + 1] = g.at(zi(iz + i), ti(ith + j));
        cubic4(y, sz, col[j + 1], colz[j + 1], colzz[j + 1]);
    }
    double dum1, dum2;
    cubic4(col, sth, H, Hth, Hthth);
    cubic4(colz, sth, Hz, Hzth, dum1);
    cubic4(colzz, sth, Hzz, dum2, dum1);
    // rescale local derivatives to (z, theta) units
    Hz /= dz;
    Hzz /= dz * dz;
    Hzth /= dz * dth;
    Hth /= dth;
    Hthth /= dth * dth;
    if (z < -zb || z > zb) {
        // constant extension beyond the band: caps are static
        Hz = Hzz = Hzth = 0.0;
    }
}

void tabulated_derivatives(const TabulatedGrid& g, const Vec3& p, double& value, Vec3& grad,
                           Mat3& hess) {
    double H, Hz, Hth, Hzz, Hzth, Hthth;
    double theta = std::atan2(p.y, p.x);
    tabulated_eval(g, p.z, theta, H, Hz, Hth, Hzz, Hzth, Hthth);
    value = H;
    if (std::abs(p.z) >= g.z_band) {
        grad = Vec3();
        hess = zero_mat3();
        return;
    }
    double r2 = p.x * p.x + p.y * p.y;
    Vec3 gz(0.0, 0.0, 1.0);
    Vec3 gth(-p.y / r2, p.x / r2, 0.0);
    grad = Hz * gz + Hth * gth;
    hess = zero_mat3();
    double gzv[3] = {gz.x, gz.y, gz.z};
    double gthv[3] = {gth.x, gth.y, gth.z};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            hess(i, j) = Hzz * gzv[i] * gzv[j] + Hzth * (gzv[i] * gthv[j] + gthv[i] * gzv[j]) +
                         Hthth * gthv[i] * gthv[j];
    // curvature of theta as an ambient function
    double r4 = r2 * r2;
    double ht[3][3] = {{2.0 * p.x * p.y / r4, (p.y * p.y - p.x * p.x) / r4, 0.0},
                       {(p.y * p.y - p.x * p.x) / r4, -2.0 * p.x * p.y / r4, 0.0},
                       {0.0, 0.0, 0.0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) hess(i, j) += Hth * ht[i][j];
}

}  // namespace

double HamiltonianSpec::base_value(const Vec3& p) const {
    double v;
    Vec3 g;
    Mat3 h;
    base_derivatives(p, v, g, h);
    return v;
}

void HamiltonianSpec::base_derivatives(const Vec3& p, double& value, Vec3& grad,
                                       Mat3& hess) const {
    value = 0.0;
    grad = Vec3();
    hess = zero_mat3();
    switch (kind) {
        case HamiltonianKind::Zero:
            break;
        case HamiltonianKind::Rotation:
            value = kTwoPi * alpha * p.z;
            grad.z = kTwoPi * alpha;
            break;
        case HamiltonianKind::PerturbedRotation:
            value = kTwoPi * alpha * p.z;
            grad.z = kTwoPi * alpha;
            if (profile == PerturbProfile::Zonal) {
                add_harmonic(epsilon, 0.0, mode, 0, p, value, grad, hess);
            } else {
                value += epsilon * p.x * p.x;
                grad.x += 2.0 * epsilon * p.x;
                hess(0, 0) += 2.0 * epsilon;
            }
            break;
        case HamiltonianKind::Tabulated:
            if (grid.nz < 4 || grid.ntheta < 4)
                throw std::invalid_argument("tabulated grid needs at least 4x4 samples");
            tabulated_derivatives(grid, p, value, grad, hess);
            break;
    }
    if (fourier.has_value()) {
        for (const auto& t : fourier->terms())
            add_harmonic(t.coeff_re, t.coeff_im, t.m, t.n, p, value, grad, hess);
    }
}

void HamiltonianSpec::derivatives(double t, const Vec3& p, double& value, Vec3& grad,
                                  Mat3& hess) const {
    base_derivatives(p, value, grad, hess);
    double rate = schedule.zeta_rate(t);
    value *= rate;
    grad = grad * rate;
    for (int i = 0; i < 9; ++i) hess.m[i] *= rate;
    if (twist.has_value()) {
        double k = twist->kappa(t);
        if (k != 0.0) {
            Vec3 d = p - twist->center;
            double u = d.dot(d);
            double g1 = twist->g_d1(u), g2 = twist->g_d2(u);
            value += k * twist->g_value(u);
            grad += k * 2.0 * g1 * d;
            // Hess(g(u)) = 2 g' I + 4 g'' d d^T
            for (int i = 0; i < 3; ++i) hess(i, i) += k * 2.0 * g1;
            double dd[3] = {d.x, d.y, d.z};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) hess(i, j) += k * 4.0 * g2 * dd[i] * dd[j];
        }
    }
}

double HamiltonianSpec::value(double t, const Vec3& p) const {
    double v;
    Vec3 g;
    Mat3 h;
    derivatives(t, p, v, g, h);
    return v;
}

void HamiltonianSpec::validate() const {
    if (kind == HamiltonianKind::Rotation || kind == HamiltonianKind::PerturbedRotation) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("rotation alpha must lie in (0, 1)");
    }
    if (schedule.delta_h < 0.0 || schedule.delta_h >= 0.5)
        throw std::invalid_argument("schedule delta_h must lie in [0, 1/2)");
    if (twist.has_value()) {
        if (twist->lambda0 < 0.0) throw std::invalid_argument("twist lambda0 must be >= 0");
        if (twist->window_width < 1.0 && kind != HamiltonianKind::Zero) {
            // twist window must avoid the base's active window [delta_h, 1-delta_h]
            double half = twist->window_width / 2.0;
            double d = schedule.delta_h;
            double c = twist->window_center - std::round(twist->window_center);
            double lo = c - half, hi = c + half;
            if (lo < -d || hi > d)
                throw std::invalid_argument(
                    "twist window overlaps the base Hamiltonian's active window");
        }
        if (twist->window_width >= 1.0 && kind != HamiltonianKind::Zero)
            throw std::invalid_argument(
                "full-width twist windows require a zero base Hamiltonian");
    }
}

HamiltonianSpec make_rotation(double alpha) {
    HamiltonianSpec s;
    s.kind = HamiltonianKind::Rotation;
    s.alpha = alpha;
    return s;
}

HamiltonianSpec make_zero() {
    HamiltonianSpec s;
    s.kind = HamiltonianKind::Zero;
    return s;
}

HamiltonianSpec make_perturbed_rotation(double alpha, double epsilon, int mode,
                                        PerturbProfile profile) {
    HamiltonianSpec s;
    s.kind = HamiltonianKind::PerturbedRotation;
    s.alpha = alpha;
    s.epsilon = epsilon;
    s.mode = mode;
    s.profile = profile;
    return s;
}

namespace {

std::string kind_name(HamiltonianKind k) {
    switch (k) {
        case HamiltonianKind::Zero: return "zero";
        case HamiltonianKind::Rotation: return "rotation";
        case HamiltonianKind::PerturbedRotation: return "perturbed_rotation";
        case HamiltonianKind::Tabulated: return "tabulated";
    }
    return "?";
}

}  // namespace

std::string hamiltonian_to_json(const HamiltonianSpec& spec) {
    nlohmann::ordered_json j;
    j["kind"] = kind_name(spec.kind);
    nlohmann::ordered_json params;
    if (spec.kind == HamiltonianKind::Rotation || spec.kind == HamiltonianKind::PerturbedRotation)
        params["alpha"] = spec.alpha;
    if (spec.kind == HamiltonianKind::PerturbedRotation) {
        params["epsilon"] = spec.epsilon;
        params["mode"] = spec.mode;
        params["profile"] = spec.profile == PerturbProfile::Zonal ? "zonal" : "squared";
    }
    j["params"] = params;
    j["schedule"] = {{"delta_h", spec.schedule.delta_h}, {"zeta", spec.schedule.zeta}};
    if (spec.twist.has_value()) {
        j["twist"] = {{"center", {spec.twist->center.x, spec.twist->center.y, spec.twist->center.z}},
                      {"lambda0", spec.twist->lambda0},
                      {"support_radius", spec.twist->support_radius},
                      {"window_center", spec.twist->window_center},
                      {"window_width", spec.twist->window_width}};
    }
    if (spec.fourier.has_value()) {
        j["fourier"] = {{"seed", spec.fourier->seed},
                        {"amplitude", spec.fourier->amplitude},
                        {"max_mode", spec.fourier->max_mode}};
    }
    return j.dump();
}

HamiltonianSpec hamiltonian_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    HamiltonianSpec s;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero")
        s.kind = HamiltonianKind::Zero;
    else if (kind == "rotation")
        s.kind = HamiltonianKind::Rotation;
    else if (kind == "perturbed_rotation")
        s.kind = HamiltonianKind::PerturbedRotation;
    else if (kind == "tabulated")
        s.kind = HamiltonianKind::Tabulated;
    else
        throw std::invalid_argument("unknown hamiltonian kind: " + kind);
    if (j.contains("params")) {
        const auto& p = j["params"];
        if (p.contains("alpha")) s.alpha = p["alpha"].get<double>();
        if (p.contains("epsilon")) s.epsilon = p["epsilon"].get<double>();
        if (p.contains("mode")) s.mode = p["mode"].get<int>();
        if (p.contains("profile"))
            s.profile = p["profile"].get<std::string>() == "squared" ? PerturbProfile::Squared
                                                                     : PerturbProfile::Zonal;
    }
    if (j.contains("schedule")) {
        s.schedule.delta_h = j["schedule"].value("delta_h", 0.05);
        s.schedule.zeta = j["schedule"].value("zeta", std::string("smoothstep"));
    }
    if (j.contains("twist")) {
        TwistPerturbation tw;
        auto c = j["twist"]["center"];
        tw.center = Vec3(c[0].get<double>(), c[1].get<double>(), c[2].get<double>());
        tw.lambda0 = j["twist"]["lambda0"].get<double>();
        tw.support_radius = j["twist"].value("support_radius", 0.5);
        tw.window_center = j["twist"].value("window_center", 0.0);
        tw.window_width = j["twist"].value("window_width", 0.05);
        s.twist = tw;
    }
    if (j.contains("fourier")) {
        FourierPerturbation f;
        f.seed = j["fourier"].value("seed", 0ULL);
        f.amplitude = j["fourier"].value("amplitude", 0.0);
        f.max_mode = j["fourier"].value("max_mode", 3);
        s.fourier = f;
    }
    return s;
}

}  // namespace spindex
