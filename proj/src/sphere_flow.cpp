#include "spindex/sphere_flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace spindex {

namespace chart {

Vec3 to_sphere(const ChartPoint& c) {
    switch (c.chart) {
        case ChartId::Cylinder: {
            double z = c.q.x, th = c.q.y;
            double R = std::sqrt(std::max(0.0, 1.0 - z * z));
            return {R * std::cos(th), R * std::sin(th), z};
        }
        case ChartId::CapNorth: {
            double rho = 0.5 * (c.q.x * c.q.x + c.q.y * c.q.y);
            double cc = std::sqrt(1.0 - rho / 2.0);
            return {cc * c.q.x, -cc * c.q.y, 1.0 - rho};
        }
        case ChartId::CapSouth: {
            double rho = 0.5 * (c.q.x * c.q.x + c.q.y * c.q.y);
            double cc = std::sqrt(1.0 - rho / 2.0);
            return {cc * c.q.x, cc * c.q.y, rho - 1.0};
        }
    }
    throw std::logic_error("bad chart id");
}

ChartPoint from_sphere(ChartId id, const Vec3& p) {
    switch (id) {
        case ChartId::Cylinder:
            return {id, {p.z, std::atan2(p.y, p.x)}};
        case ChartId::CapNorth: {
            double rho = 1.0 - p.z;
            double cc = std::sqrt(1.0 - rho / 2.0);
            return {id, {p.x / cc, -p.y / cc}};
        }
        case ChartId::CapSouth: {
            double rho = 1.0 + p.z;
            double cc = std::sqrt(1.0 - rho / 2.0);
            return {id, {p.x / cc, p.y / cc}};
        }
    }
    throw std::logic_error("bad chart id");
}

ChartId preferred(const Vec3& p, ChartId current) {
    if (current == ChartId::CapNorth && p.z >= kCapLeave) return ChartId::CapNorth;
    if (current == ChartId::CapSouth && p.z <= -kCapLeave) return ChartId::CapSouth;
    if (p.z >= kCapEnter) return ChartId::CapNorth;
    if (p.z <= -kCapEnter) return ChartId::CapSouth;
    return ChartId::Cylinder;
}

void tangent_basis(const ChartPoint& c, Vec3& e1, Vec3& e2) {
    switch (c.chart) {
        case ChartId::Cylinder: {
            double z = c.q.x, th = c.q.y;
            double R = std::sqrt(std::max(1e-300, 1.0 - z * z));
            double cs = std::cos(th), sn = std::sin(th);
            e1 = {-z * cs / R, -z * sn / R, 1.0};
            e2 = {-R * sn, R * cs, 0.0};
            return;
        }
        case ChartId::CapNorth: {
            double x = c.q.x, y = c.q.y;
            double rho = 0.5 * (x * x + y * y);
            double cc = std::sqrt(1.0 - rho / 2.0);
            double cp = -1.0 / (4.0 * cc);
            e1 = {cc + cp * x * x, -cp * x * y, -x};
            e2 = {cp * x * y, -cc - cp * y * y, -y};
            return;
        }
        case ChartId::CapSouth: {
            double x = c.q.x, y = c.q.y;
            double rho = 0.5 * (x * x + y * y);
            double cc = std::sqrt(1.0 - rho / 2.0);
            double cp = -1.0 / (4.0 * cc);
            e1 = {cc + cp * x * x, cp * x * y, x};
            e2 = {cp * x * y, cc + cp * y * y, y};
            return;
        }
    }
}

namespace {

// Second derivatives of the chart parameterization, d^2 p / dqi dqj.
void second_basis(const ChartPoint& c, Vec3& p11, Vec3& p12, Vec3& p22) {
    switch (c.chart) {
        case ChartId::Cylinder: {
            double z = c.q.x, th = c.q.y;
            double R = std::sqrt(std::max(1e-300, 1.0 - z * z));
            double cs = std::cos(th), sn = std::sin(th);
            double R3 = R * R * R;
            p11 = {-cs / R3, -sn / R3, 0.0};
            p12 = {z * sn / R, -z * cs / R, 0.0};
            p22 = {-R * cs, -R * sn, 0.0};
            return;
        }
        case ChartId::CapNorth: {
            double x = c.q.x, y = c.q.y;
            double rho = 0.5 * (x * x + y * y);
            double cc = std::sqrt(1.0 - rho / 2.0);
            double cp = -1.0 / (4.0 * cc);
            double cpp = -1.0 / (16.0 * cc * cc * cc);
            p11 = {3.0 * cp * x + cpp * x * x * x, -(cp * y + cpp * x * x * y), -1.0};
            p12 = {cp * y + cpp * x * x * y, -(cp * x + cpp * x * y * y), 0.0};
            p22 = {cp * x + cpp * x * y * y, -(3.0 * cp * y + cpp * y * y * y), -1.0};
            return;
        }
        case ChartId::CapSouth: {
            double x = c.q.x, y = c.q.y;
            double rho = 0.5 * (x * x + y * y);
            double cc = std::sqrt(1.0 - rho / 2.0);
            double cp = -1.0 / (4.0 * cc);
            double cpp = -1.0 / (16.0 * cc * cc * cc);
            p11 = {3.0 * cp * x + cpp * x * x * x, cp * y + cpp * x * x * y, 1.0};
            p12 = {cp * y + cpp * x * x * y, cp * x + cpp * x * y * y, 0.0};
            p22 = {cp * x + cpp * x * y * y, 3.0 * cp * y + cpp * y * y * y, 1.0};
            return;
        }
    }
}

}  // namespace

Mat2 transition(const ChartPoint& from, ChartId to) {
    Vec3 f1, f2, t1, t2;
    tangent_basis(from, f1, f2);
    Vec3 p = to_sphere(from);
    ChartPoint cto = from_sphere(to, p);
    tangent_basis(cto, t1, t2);
    // solve [t1 t2] * T = [f1 f2] by normal equations on the tangent plane
    Mat2 g(t1.dot(t1), t1.dot(t2), t2.dot(t1), t2.dot(t2));
    Vec2 c1 = solve2x2(g, {t1.dot(f1), t2.dot(f1)});
    Vec2 c2 = solve2x2(g, {t1.dot(f2), t2.dot(f2)});
    return {c1.x, c2.x, c1.y, c2.y};
}

ChartDerivs pull_back(const HamiltonianSpec& spec, double t, const ChartPoint& c) {
    Vec3 p = to_sphere(c);
    double value;
    Vec3 grad;
    Mat3 hess;
    spec.derivatives(t, p, value, grad, hess);
    Vec3 e1, e2, p11, p12, p22;
    tangent_basis(c, e1, e2);
    second_basis(c, p11, p12, p22);
    ChartDerivs d;
    d.H = value;
    d.dH = {grad.dot(e1), grad.dot(e2)};
    Vec3 he1 = hess * e1, he2 = hess * e2;
    d.d11 = e1.dot(he1) + grad.dot(p11);
    d.d12 = e1.dot(he2) + grad.dot(p12);
    d.d22 = e2.dot(he2) + grad.dot(p22);
    return d;
}

}  // namespace chart

Vec3 vector_field(const HamiltonianSpec& spec, double t, const SpherePoint& p) {
    double value;
    Vec3 grad;
    Mat3 hess;
    spec.derivatives(t, p.p, value, grad, hess);
    return grad.cross(p.p);  // X_H = grad x p realizes i_X (dz^dtheta) = -dH
}

namespace {

struct IntegratorState {
    ChartPoint c;
    Mat2 L = Mat2::identity();
    double t = 0.0;
};

Vec2 field_at(const HamiltonianSpec& spec, double t, const ChartPoint& c) {
    chart::ChartDerivs d = chart::pull_back(spec, t, c);
    return {-d.dH.y, d.dH.x};
}

// One implicit-midpoint substep of size g for position and variational matrix.
void midpoint_substep(const HamiltonianSpec& spec, IntegratorState& s, double g) {
    double tm = s.t + g / 2.0;
    Vec2 q = s.c.q;
    ChartPoint probe = s.c;
    Vec2 y = q + g * field_at(spec, tm, probe);  // explicit predictor
    double prev_move = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
        probe.q = {(q.x + y.x) / 2.0, (q.y + y.y) / 2.0};
        Vec2 ynew = q + g * field_at(spec, tm, probe);
        double move = (ynew - y).norm();
        y = ynew;
        if (move < 1e-15) break;
        // at the roundoff floor the iterates cycle without shrinking further
        if (move >= prev_move && move < 1e-11) break;
        if (it == 59) throw std::runtime_error("implicit midpoint failed to converge");
        prev_move = move;
    }
    probe.q = {(q.x + y.x) / 2.0, (q.y + y.y) / 2.0};
    chart::ChartDerivs d = chart::pull_back(spec, tm, probe);
    // variational generator, trace-free by construction
    Mat2 S(-d.d12, -d.d22, d.d11, d.d12);
    Mat2 half = S * (g / 2.0);
    Mat2 cay = (Mat2::identity() - half).inverse() * (Mat2::identity() + half);
    s.c.q = y;
    s.L = cay * s.L;
    s.t += g;
}

// 4th-order triple-jump composition of the midpoint substep.
void step(const HamiltonianSpec& spec, IntegratorState& s, double h, bool fourth_order) {
    if (!fourth_order) {
        midpoint_substep(spec, s, h);
    } else {
        static const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
        double w2 = 1.0 - 2.0 * w1;
        midpoint_substep(spec, s, w1 * h);
        midpoint_substep(spec, s, w2 * h);
        midpoint_substep(spec, s, w1 * h);
    }
    // chart hand-off
    Vec3 p = chart::to_sphere(s.c);
    ChartId want = chart::preferred(p, s.c.chart);
    if (want != s.c.chart) {
        Mat2 T = chart::transition(s.c, want);
        s.L = T * s.L;
        s.c = chart::from_sphere(want, p);
    }
}

}  // namespace

Trajectory flow(const HamiltonianSpec& spec, const SpherePoint& p0, double T,
                const FlowOptions& opts) {
    if (opts.step <= 0.0) throw std::invalid_argument("step must be positive");
    Trajectory traj;
    if (opts.step > 0.02)
        traj.warnings.push_back(
            "step " + std::to_string(opts.step) +
            " may be too coarse for unambiguous angle lifting downstream");
    IntegratorState s;
    s.c = chart::from_sphere(chart::preferred(p0.p, ChartId::Cylinder), p0.p);
    traj.samples.push_back({0.0, p0.p});
    if (T == 0.0) return traj;
    double dir = T > 0.0 ? 1.0 : -1.0;
    double remaining = std::abs(T);
    while (remaining > 1e-15) {
        double h = std::min(opts.step, remaining);
        step(spec, s, dir * h, opts.fourth_order);
        remaining -= h;
        traj.samples.push_back({T > 0 ? T - remaining * dir : -(std::abs(T) - remaining),
                                chart::to_sphere(s.c)});
    }
    traj.samples.back().t = T;
    return traj;
}

Mat2 trivialization_frame(const TrivializationRecord& triv, const ChartPoint& c) {
    Vec3 p = chart::to_sphere(c);
    const Vec3& e = triv.excluded_point.p;
    // rotation taking the excluded point to the south pole
    Vec3 s(0.0, 0.0, -1.0);
    Mat3 g;
    double dot = e.dot(s);
    if (dot > 1.0 - 1e-14) {
        g = Mat3::identity();
    } else if (dot < -1.0 + 1e-14) {
        g = Mat3::axis_angle({1.0, 0.0, 0.0}, kPi);
    } else {
        Vec3 axis = e.cross(s);
        g = Mat3::axis_angle(axis, std::acos(std::clamp(dot, -1.0, 1.0)));
    }
    Vec3 q = g * p;
    double w = 1.0 + q.z;
    if (w < 1e-12)
        throw std::runtime_error("trivialization breakdown: point at the excluded point");
    // conjugate stereographic chart (u, v) = (q_x, -q_y) / (1 + q_z),
    // positively oriented for dz ^ dtheta
    Vec3 du(1.0 / w, 0.0, -q.x / (w * w));
    Vec3 dv(0.0, -1.0 / w, q.y / (w * w));
    Vec3 e1, e2;
    chart::tangent_basis(c, e1, e2);
    Vec3 ge1 = g * e1, ge2 = g * e2;
    Mat2 G(du.dot(ge1), du.dot(ge2), dv.dot(ge1), dv.dot(ge2));
    double det = G.det();
    if (det <= 0.0)
        throw std::logic_error("trivialization frame lost orientation");
    return G * (1.0 / std::sqrt(det));
}

SymplecticPath2 linearized_flow(const HamiltonianSpec& spec, const SpherePoint& p0, double T,
                                const TrivializationRecord& triv, const FlowOptions& opts) {
    if (T <= 0.0) throw std::invalid_argument("linearized_flow needs T > 0");
    double margin = 10.0 * opts.step;
    IntegratorState s;
    s.c = chart::from_sphere(chart::preferred(p0.p, ChartId::Cylinder), p0.p);

    struct Rec {
        double t;
        ChartPoint c;
        Mat2 L;
    };
    std::vector<Rec> recs;
    recs.push_back({0.0, s.c, s.L});
    double remaining = T;
    double worst = 2.0;
    Vec3 worst_p;
    while (remaining > 1e-15) {
        double h = std::min(opts.step, remaining);
        step(spec, s, h, opts.fourth_order);
        remaining -= h;
        recs.push_back({T - remaining, s.c, s.L});
        Vec3 p = chart::to_sphere(s.c);
        double d = (p - triv.excluded_point.p).norm();
        if (d < worst) {
            worst = d;
            worst_p = p;
        }
    }
    if (worst < margin) {
        Vec3 suggestion = worst_p * -1.0;
        std::ostringstream os;
        os << "trivialization breakdown: orbit approaches the excluded point (distance "
           << worst << " < " << margin << "); try excluded point (" << suggestion.x << ", "
           << suggestion.y << ", " << suggestion.z << ")";
        throw std::runtime_error(os.str());
    }

    Mat2 G0 = trivialization_frame(triv, recs.front().c);
    Mat2 G0inv = G0.inverse();
    SymplecticPath2 path;
    path.source = "linearized:" + std::string(spec.kind == HamiltonianKind::Zero ? "zero" : "flow");
    path.samples.reserve(recs.size());
    for (const Rec& r : recs) {
        Mat2 A = trivialization_frame(triv, r.c) * r.L * G0inv;
        double tn = r.t / T;
        if (triv.winding_correction != 0)
            A = Mat2::rotation(kTwoPi * triv.winding_correction * tn) * A;
        path.samples.push_back({tn, A});
    }
    path.samples.front() = {0.0, Mat2::identity()};
    path.samples.back().t = 1.0;
    return path;
}

OrbitIndex mean_index_orbit(const HamiltonianSpec& spec, const SpherePoint& p0, double T,
                            const TrivializationRecord& triv, const FlowOptions& opts) {
    Trajectory traj = flow(spec, p0, T, opts);
    double gap = (traj.endpoint() - p0.p).norm();
    if (gap > 1e-7)
        throw std::invalid_argument("mean_index_orbit: orbit is not closed (gap " +
                                    std::to_string(gap) + ")");
    SymplecticPath2 path = linearized_flow(spec, p0, T, triv, opts);
    double delta = mean_index(path);
    return {delta, reduce_mod(delta, 4.0)};
}

SpherePoint time_k_map(const HamiltonianSpec& spec, const SpherePoint& p, int k,
                       Mat2* linearization, const FlowOptions& opts) {
    if (k < 1) throw std::invalid_argument("iterate must be positive");
    IntegratorState s;
    s.c = chart::from_sphere(chart::preferred(p.p, ChartId::Cylinder), p.p);
    double remaining = static_cast<double>(k);
    while (remaining > 1e-15) {
        double h = std::min(opts.step, remaining);
        step(spec, s, h, opts.fourth_order);
        remaining -= h;
    }
    if (linearization) *linearization = s.L;
    return SpherePoint(chart::to_sphere(s.c));
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream os;
    os << "t,x,y,z\n";
    char buf[160];
    for (const auto& s : traj.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", s.t, s.p.x, s.p.y, s.p.z);
        os << buf;
    }
    return os.str();
}

}  // namespace spindex
