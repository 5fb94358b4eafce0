#include "spindex/orbit_census.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "spindex/parallel.hpp"

namespace spindex {

namespace {

// Rotation taking p to the north pole; identity when p is already there.
Mat3 rotation_to_north(const Vec3& p) {
    Vec3 n(0.0, 0.0, 1.0);
    double dot = p.dot(n);
    if (dot > 1.0 - 1e-14) return Mat3::identity();
    if (dot < -1.0 + 1e-14) return Mat3::axis_angle({1.0, 0.0, 0.0}, kPi);
    return Mat3::axis_angle(p.cross(n), std::acos(std::clamp(dot, -1.0, 1.0)));
}

// Displacement of the time-k map in the Darboux cap chart centered at p,
// together with the Jacobian of the map expressed in that chart.  Returns
// false when the image leaves the chart's safe range.
bool displacement_map(const HamiltonianSpec& spec, const SpherePoint& p, int k, double step,
                      Vec2& disp, Mat2& jac) {
    Mat3 g = rotation_to_north(p.p);
    Mat3 gt = g.transposed();
    Mat2 L;
    FlowOptions opts;
    opts.step = step;
    SpherePoint image = time_k_map(spec, p, k, &L, opts);
    Vec3 qi = g * image.p;
    if (qi.z < -0.2) return false;  // image near the chart's antipode
    ChartPoint centered = chart::from_sphere(ChartId::CapNorth, qi);
    disp = centered.q;

    // chart bases of the atlas charts at p and image, rotated into the
    // centered frame, expressed on the centered chart's basis
    auto to_centered = [&](const SpherePoint& x) {
        ChartPoint atlas = chart::from_sphere(chart::preferred(x.p, ChartId::Cylinder), x.p);
        Vec3 a1, a2;
        chart::tangent_basis(atlas, a1, a2);
        ChartPoint cen = chart::from_sphere(ChartId::CapNorth, g * x.p);
        Vec3 c1, c2;
        chart::tangent_basis(cen, c1, c2);
        // pull centered basis back to the sphere frame at x
        Vec3 b1 = gt * c1, b2 = gt * c2;
        Mat2 gram(b1.dot(b1), b1.dot(b2), b2.dot(b1), b2.dot(b2));
        Vec2 x1 = solve2x2(gram, {b1.dot(a1), b2.dot(a1)});
        Vec2 x2 = solve2x2(gram, {b1.dot(a2), b2.dot(a2)});
        return Mat2(x1.x, x2.x, x1.y, x2.y);
    };
    Mat2 Cp = to_centered(p);
    Mat2 Ci = to_centered(image);
    jac = Ci * L * Cp.inverse();
    return true;
}

SpherePoint move_in_centered_chart(const SpherePoint& p, const Vec2& delta) {
    Mat3 g = rotation_to_north(p.p);
    ChartPoint c{ChartId::CapNorth, delta};
    return SpherePoint(g.transposed() * chart::to_sphere(c));
}

struct NewtonResult {
    bool converged = false;
    SpherePoint root;
    double residual = 0.0;
};

NewtonResult newton_from_seed(const HamiltonianSpec& spec, SpherePoint p, int k,
                              const CensusOptions& opts) {
    NewtonResult res;
    double best = std::numeric_limits<double>::infinity();
    int stale = 0;
    for (int it = 0; it < opts.max_newton_iter; ++it) {
        Vec2 d;
        Mat2 J;
        if (!displacement_map(spec, p, k, opts.newton_step, d, J)) return res;
        if (d.norm() <= opts.newton_tol) {
            res.converged = true;
            res.root = p;
            res.residual = d.norm();
            return res;
        }
        // drop seeds whose displacement stops shrinking
        if (d.norm() < 0.9 * best) {
            best = d.norm();
            stale = 0;
        } else if (++stale >= 4) {
            return res;
        }
        Mat2 A = J - Mat2::identity();
        Vec2 delta;
        if (std::abs(A.det()) < 1e-12) {
            // singular Jacobian: bisection-style shrink of the displacement
            // norm along the displacement direction
            double n = d.norm();
            double scale = 0.5;
            bool improved = false;
            for (int b = 0; b < 12; ++b) {
                SpherePoint trial = move_in_centered_chart(p, {-d.x * scale, -d.y * scale});
                Vec2 dt;
                Mat2 Jt;
                if (displacement_map(spec, trial, k, opts.newton_step, dt, Jt) && dt.norm() < n) {
                    p = trial;
                    improved = true;
                    break;
                }
                scale *= 0.5;
            }
            if (!improved) return res;
            continue;
        }
        delta = solve2x2(A, {-d.x, -d.y});
        double dn = delta.norm();
        if (dn > 0.5) delta = delta * (0.5 / dn);  // trust region
        p = move_in_centered_chart(p, delta);
    }
    return res;
}

std::string winding_tag(const Trajectory& traj) {
    double total = 0.0;
    double prev = std::atan2(traj.samples.front().p.y, traj.samples.front().p.x);
    bool near_pole = false;
    for (const auto& s : traj.samples) {
        double R2 = s.p.x * s.p.x + s.p.y * s.p.y;
        if (R2 < 1e-12) {
            near_pole = true;
            continue;
        }
        double cur = std::atan2(s.p.y, s.p.x);
        total += wrap_angle(cur - prev);
        prev = cur;
    }
    if (near_pole) return "w0";
    long w = std::lround(total / kTwoPi);
    return "w" + std::to_string(w);
}

}  // namespace

std::optional<SpherePoint> newton_fixed_point(const HamiltonianSpec& spec, const SpherePoint& seed,
                                              int k, const CensusOptions& opts) {
    NewtonResult r = newton_from_seed(spec, seed, k, opts);
    if (!r.converged) return std::nullopt;
    return r.root;
}

OrbitClass classify(double trace) {
    if (std::abs(trace) < 2.0 - 1e-8) return OrbitClass::Elliptic;
    if (std::abs(trace) > 2.0 + 1e-8) return OrbitClass::Hyperbolic;
    return OrbitClass::Degenerate;
}

CensusReport find_fixed_points(const HamiltonianSpec& spec, int k, const CensusOptions& opts) {
    if (opts.grid_nz < 32 || opts.grid_ntheta < 64)
        throw std::invalid_argument("census grid density must be at least 32x64");
    if (opts.newton_tol > 1e-10)
        throw std::invalid_argument("census newton tolerance must be <= 1e-10");
    spec.validate();

    CensusReport report;
    report.iterate = k;

    // seed grid plus the poles
    std::vector<SpherePoint> seeds;
    for (int i = 0; i < opts.grid_nz; ++i) {
        double z = -1.0 + 2.0 * (i + 0.5) / opts.grid_nz;
        double R = std::sqrt(1.0 - z * z);
        for (int j = 0; j < opts.grid_ntheta; ++j) {
            double th = kTwoPi * j / opts.grid_ntheta;
            seeds.push_back(SpherePoint(R * std::cos(th), R * std::sin(th), z));
        }
    }
    seeds.push_back(north_pole());
    seeds.push_back(south_pole());

    std::vector<NewtonResult> results(seeds.size());
    parallel_for(static_cast<int>(seeds.size()), [&](int i) {
        results[i] = newton_from_seed(spec, seeds[i], k, opts);
    });

    std::vector<SpherePoint> roots;
    for (const auto& r : results)
        if (r.converged) roots.push_back(r.root);

    // deterministic order, then dedupe by chordal distance
    std::sort(roots.begin(), roots.end(), [](const SpherePoint& a, const SpherePoint& b) {
        if (a.p.z != b.p.z) return a.p.z < b.p.z;
        double ta = std::atan2(a.p.y, a.p.x), tb = std::atan2(b.p.y, b.p.x);
        if (ta != tb) return ta < tb;
        return a.p.x < b.p.x;
    });
    std::vector<SpherePoint> distinct;
    for (const auto& r : roots) {
        bool dup = false;
        for (const auto& d : distinct)
            if (d.chordal(r) <= opts.dedupe_radius) {
                dup = true;
                break;
            }
        if (!dup) distinct.push_back(r);
    }

    // continuum detection: an implausibly large census, or chains of distinct
    // roots spaced below 10x the dedupe radius
    int chained = 0;
    for (size_t i = 0; i < distinct.size(); ++i) {
        for (size_t j = 0; j < distinct.size(); ++j) {
            if (i != j && distinct[i].chordal(distinct[j]) < 10.0 * opts.dedupe_radius) {
                ++chained;
                break;
            }
        }
    }
    if (distinct.size() > 64 || chained >= 8) {
        report.continuum_flag = true;
        report.diagnostics = "continuum of fixed points detected (" +
                             std::to_string(distinct.size()) + " roots)";
        return report;
    }

    // polish at the fine step and build orbit records
    for (const auto& root : distinct) {
        SpherePoint p = root;
        for (int it = 0; it < 6; ++it) {
            Vec2 d;
            Mat2 J;
            if (!displacement_map(spec, p, k, opts.flow.step, d, J)) break;
            if (d.norm() <= opts.newton_tol * 0.1) break;
            Mat2 A = J - Mat2::identity();
            if (std::abs(A.det()) < 1e-12) break;
            Vec2 delta = solve2x2(A, {-d.x, -d.y});
            p = move_in_centered_chart(p, delta);
        }

        PeriodicOrbit orbit;
        orbit.point = p;
        orbit.period = k;
        orbit.trivialization.excluded_point = SpherePoint(p.p * -1.0);
        Trajectory traj = flow(spec, p, static_cast<double>(k), opts.flow);
        orbit.homotopy_tag = winding_tag(traj);
        orbit.trivialization.reference_loop_class = orbit.homotopy_tag;
        orbit.linearized_path =
            linearized_flow(spec, p, static_cast<double>(k), orbit.trivialization, opts.flow);
        orbit.trace = orbit.linearized_path.endpoint().trace();
        orbit.classification = classify(orbit.trace);
        orbit.index_report = index_report(orbit.linearized_path);
        orbit.delta_lifted = orbit.index_report.delta;
        orbit.modular_delta = reduce_mod(orbit.delta_lifted, 4.0);
        if (orbit.classification == OrbitClass::Elliptic) {
            // elliptic endpoints must carry eigenvalues e^{+-i pi Delta}
            double expected = 2.0 * std::cos(kPi * orbit.delta_lifted);
            if (std::abs(expected - orbit.trace) > 1e-6)
                report.diagnostics += "elliptic eigenvalue mismatch at orbit; ";
        }
        report.orbits.push_back(std::move(orbit));
    }

    bool any_degenerate = std::any_of(report.orbits.begin(), report.orbits.end(),
                                      [](const PeriodicOrbit& o) {
                                          return o.classification == OrbitClass::Degenerate;
                                      });
    if (!any_degenerate) {
        int sum = 0;
        for (const auto& o : report.orbits) sum += (o.trace < 2.0) ? 1 : -1;
        report.lefschetz_sum = sum;
        if (sum != 2)
            report.diagnostics +=
                "census incomplete: Lefschetz sum " + std::to_string(sum) + " != 2";
    }
    return report;
}

int lefschetz_sum(const CensusReport& report) {
    if (report.continuum_flag)
        throw std::domain_error("Lefschetz inapplicable: continuum of fixed points");
    for (const auto& o : report.orbits)
        if (o.classification == OrbitClass::Degenerate)
            throw std::domain_error("Lefschetz inapplicable: degenerate fixed point present");
    int sum = 0;
    for (const auto& o : report.orbits) sum += (o.trace < 2.0) ? 1 : -1;
    return sum;
}

HamiltonianSpec twist_perturbation(const HamiltonianSpec& spec, const SpherePoint& R,
                                   const TwistPerturbation& tp) {
    if (spec.twist.has_value())
        throw std::invalid_argument("spec already carries a twist");
    // R must be a static fixed point of the flow
    for (double t : {0.0, 0.21, 0.37, 0.5, 0.63, 0.85}) {
        Vec3 X = vector_field(spec, t, R);
        if (X.norm() > 1e-9)
            throw std::invalid_argument("twist center is not a static fixed point of the flow");
    }
    HamiltonianSpec out = spec;
    TwistPerturbation t = tp;
    t.center = R.p;
    out.twist = t;
    out.validate();  // rejects overlapping time supports
    return out;
}

HamiltonianSpec apply_generic_perturbation(const HamiltonianSpec& spec, unsigned long long seed,
                                           double amplitude, int max_mode) {
    HamiltonianSpec out = spec;
    FourierPerturbation f;
    f.seed = seed;
    f.amplitude = amplitude;
    f.max_mode = max_mode;
    out.fourier = f;
    return out;
}

RationalityVerdict rationality_test(double delta, long long qmax, double tol) {
    if (qmax < 2) throw std::invalid_argument("qmax must be at least 2");
    RationalityVerdict v;
    v.qmax = qmax;
    v.tol = tol;
    v.error = std::numeric_limits<double>::infinity();

    auto consider = [&](long long p, long long q) {
        if (q < 1 || q > qmax) return;
        double err = std::abs(delta - static_cast<double>(p) / static_cast<double>(q));
        if (err < v.error) {
            long long g = std::gcd(std::llabs(p), q);
            if (g == 0) g = 1;
            v.error = err;
            v.p = p / g;
            v.q = q / g;
        }
    };

    // continued-fraction convergents p_k/q_k plus the semiconvergents of the
    // final level that still satisfy q <= qmax
    double x = delta;
    long long p0 = 1, q0 = 0;  // p_{-1}, q_{-1}
    long long p1 = static_cast<long long>(std::floor(x)), q1 = 1;
    consider(p1, q1);
    consider(p1 + 1, q1);
    double frac = x - std::floor(x);
    for (int level = 0; level < 64 && frac > 1e-15; ++level) {
        x = 1.0 / frac;
        double fa = std::floor(x);
        if (fa > 1e15) break;
        long long a = static_cast<long long>(fa);
        frac = x - fa;
        // semiconvergents (p0 + j p1) / (q0 + j q1), j = 1..a
        for (long long j = 1; j <= a; ++j) {
            long long ps = p0 + j * p1, qs = q0 + j * q1;
            if (qs > qmax) break;
            consider(ps, qs);
        }
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > qmax) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    v.is_rational = v.error <= tol;
    return v;
}

namespace {

const char* class_name(OrbitClass c) {
    switch (c) {
        case OrbitClass::Elliptic: return "elliptic";
        case OrbitClass::Hyperbolic: return "hyperbolic";
        case OrbitClass::Degenerate: return "degenerate";
    }
    return "?";
}

}  // namespace

std::string census_to_json(const CensusReport& report) {
    nlohmann::ordered_json j;
    j["iterate"] = report.iterate;
    j["continuum_flag"] = report.continuum_flag;
    if (report.lefschetz_sum.has_value())
        j["lefschetz_sum"] = *report.lefschetz_sum;
    else
        j["lefschetz_sum"] = nullptr;
    if (!report.diagnostics.empty()) j["diagnostics"] = report.diagnostics;
    nlohmann::ordered_json orbits = nlohmann::ordered_json::array();
    for (const auto& o : report.orbits) {
        nlohmann::ordered_json rec;
        rec["point"] = {o.point.p.x, o.point.p.y, o.point.p.z};
        rec["period"] = o.period;
        rec["trace"] = o.trace;
        rec["class"] = class_name(o.classification);
        rec["delta_lifted"] = o.delta_lifted;
        rec["delta_mod4"] = o.modular_delta.value;
        if (o.index_report.mu.has_value())
            rec["mu"] = *o.index_report.mu;
        else
            rec["mu"] = "degenerate";
        rec["homotopy_tag"] = o.homotopy_tag;
        orbits.push_back(rec);
    }
    j["orbits"] = orbits;
    return j.dump(2);
}

std::string census_to_csv(const CensusReport& report) {
    std::ostringstream os;
    os << "x,y,z,period,trace,class,delta_lifted,delta_mod4,mu,homotopy_tag\n";
    char buf[340];
    for (const auto& o : report.orbits) {
        std::string mu = o.index_report.mu.has_value() ? std::to_string(*o.index_report.mu)
                                                       : "degenerate";
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,%.17g,%s,%.17g,%.17g,%s,%s\n",
                      o.point.p.x, o.point.p.y, o.point.p.z, o.period, o.trace,
                      class_name(o.classification), o.delta_lifted, o.modular_delta.value,
                      mu.c_str(), o.homotopy_tag.c_str());
        os << buf;
    }
    return os.str();
}

}  // namespace spindex
