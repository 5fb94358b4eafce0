#include "spindex/blowup_glue.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "spindex/parallel.hpp"

namespace spindex {

namespace {

bool is_pole(const SpherePoint& p, double z_sign) {
    return std::abs(p.p.x) < 1e-9 && std::abs(p.p.y) < 1e-9 && p.p.z * z_sign > 0.0;
}

// Lifted theta displacement along a trajectory.
double theta_displacement(const Trajectory& traj) {
    double total = 0.0;
    double prev = std::atan2(traj.samples.front().p.y, traj.samples.front().p.x);
    for (const auto& s : traj.samples) {
        double cur = std::atan2(s.p.y, s.p.x);
        total += wrap_angle(cur - prev);
        prev = cur;
    }
    return total;
}

// Angular rate of the boundary circle at time t: the z -> +-1 limit of
// k * dH/dz along the k-times-sped-up flow.
double boundary_rate(const HamiltonianSpec& spec, int k, bool top, double t) {
    double z = top ? 1.0 - 1e-9 : -1.0 + 1e-9;
    ChartPoint c{ChartId::Cylinder, {z, 0.0}};
    chart::ChartDerivs d = chart::pull_back(spec, k * t, c);
    return k * d.dH.x;
}

double collar_blend(double s) { return smooth_ramp(s); }

}  // namespace

double CylinderMap::beta_at(bool top, double t) const {
    const std::vector<double>& b = top ? beta_top : beta_bottom;
    if (b.empty()) return 0.0;
    double x = std::clamp(t, 0.0, 1.0) * (b.size() - 1);
    size_t i = std::min(static_cast<size_t>(x), b.size() - 2);
    double w = x - i;
    return b[i] * (1.0 - w) + b[i + 1] * w;
}

CylinderMap blow_up(const HamiltonianSpec& spec, int k, const SpherePoint& P,
                    const SpherePoint& Q_or_R, const BlowUpOptions& opts) {
    spec.validate();
    if (k < 1) throw std::invalid_argument("iterate must be positive");
    if (!is_pole(P, +1.0) || !is_pole(Q_or_R, -1.0))
        throw std::invalid_argument(
            "blow_up expects the marked points at the poles (first on top); rotate the "
            "Hamiltonian so the marked pair sits on the vertical axis");

    // both marked points must be static fixed points of the flow
    for (const SpherePoint* m : {&P, &Q_or_R}) {
        for (double t : {0.0, 0.21, 0.37, 0.5, 0.63, 0.85}) {
            if (vector_field(spec, t, *m).norm() > 1e-9)
                throw std::invalid_argument("marked point is not a static fixed point");
        }
    }

    CylinderMap cyl;
    cyl.spec = spec;
    cyl.iterate = k;
    cyl.nz = opts.nz;
    cyl.ntheta = opts.ntheta;

    // elliptic check and lifted boundary angles from the pole linearizations
    for (bool top : {true, false}) {
        const SpherePoint& m = top ? P : Q_or_R;
        TrivializationRecord triv;
        triv.excluded_point = SpherePoint(m.p * -1.0);
        SymplecticPath2 path = linearized_flow(spec, m, static_cast<double>(k), triv, opts.flow);
        double trace = path.endpoint().trace();
        if (classify(trace) != OrbitClass::Elliptic)
            throw std::invalid_argument(
                "marked point is not elliptic: cylinder completion undefined");
        // boundary rotation in cylinder orientation: the top cap chart is
        // theta-reversing, the bottom one is not
        double lift = mean_index(path) * kPi;
        double beta_end = top ? -lift : lift;
        std::vector<double>& b = top ? cyl.beta_top : cyl.beta_bottom;
        b.resize(opts.beta_samples + 1);
        // integrate the boundary rate for the time profile, then rescale to
        // land exactly on the lifted endpoint
        double acc = 0.0;
        std::vector<double> raw(opts.beta_samples + 1, 0.0);
        for (int i = 1; i <= opts.beta_samples; ++i) {
            double t0 = static_cast<double>(i - 1) / opts.beta_samples;
            double t1 = static_cast<double>(i) / opts.beta_samples;
            double mid = boundary_rate(spec, k, top, 0.5 * (t0 + t1));
            acc += mid * (t1 - t0);
            raw[i] = acc;
        }
        double scale = (std::abs(acc) > 1e-12) ? beta_end / acc : 0.0;
        for (int i = 0; i <= opts.beta_samples; ++i)
            b[i] = (scale != 0.0) ? raw[i] * scale : beta_end * i / opts.beta_samples;
        if (std::abs(acc - beta_end) > 1e-5)
            throw std::runtime_error("boundary action is not a rigid rotation at the marked point");
        (top ? cyl.rot_top : cyl.rot_bottom) = beta_end;
    }

    // grid transfer, parallel over rows; boundary rows act by the exact
    // boundary rotations
    cyl.images.assign(static_cast<size_t>(cyl.nz) * cyl.ntheta, Vec2());
    parallel_for(cyl.nz, [&](int i) {
        double z = cyl.z_at(i);
        for (int j = 0; j < cyl.ntheta; ++j) {
            double th = cyl.theta_at(j);
            if (i == 0 || i == cyl.nz - 1) {
                cyl.images[static_cast<size_t>(i) * cyl.ntheta + j] =
                    Vec2(z, th + (i == 0 ? cyl.rot_bottom : cyl.rot_top));
                continue;
            }
            double R = std::sqrt(1.0 - z * z);
            SpherePoint p0(R * std::cos(th), R * std::sin(th), z);
            Trajectory traj = flow(spec, p0, static_cast<double>(k), opts.flow);
            cyl.images[static_cast<size_t>(i) * cyl.ntheta + j] =
                Vec2(traj.endpoint().z, th + theta_displacement(traj));
        }
    });

    // interior area drift on small centered cells; Richardson extrapolation
    // in the cell size removes the O(s^2) finite-size bias
    auto cell_ratio = [&](double z0, double th0, double s) {
        Vec2 img[4];
        const double dz[4] = {-s, s, s, -s};
        const double dt[4] = {-s, -s, s, s};
        for (int c = 0; c < 4; ++c) {
            double z = z0 + dz[c], th = th0 + dt[c];
            double R = std::sqrt(1.0 - z * z);
            SpherePoint p0(R * std::cos(th), R * std::sin(th), z);
            Trajectory traj = flow(spec, p0, static_cast<double>(k), opts.flow);
            img[c] = Vec2(traj.endpoint().z, th + theta_displacement(traj));
        }
        double area = 0.0;
        for (int c = 0; c < 4; ++c) {
            const Vec2& a = img[c];
            const Vec2& b = img[(c + 1) % 4];
            area += a.x * b.y - b.x * a.y;
        }
        return std::abs(area) / 2.0 / (4.0 * s * s);
    };
    double drift = 0.0;
    for (double z0 : {-0.6, -0.2, 0.3, 0.7}) {
        for (double th0 : {0.4, 2.0, 4.4}) {
            double r1 = cell_ratio(z0, th0, 1e-4);
            double r2 = cell_ratio(z0, th0, 2e-4);
            drift = std::max(drift, std::abs((4.0 * r1 - r2) / 3.0 - 1.0));
        }
    }
    cyl.area_drift = drift;

    // boundary rigidity by three-level Richardson extrapolation in the
    // latitude offset (removes the O(delta) and O(delta^2) probe bias)
    double rigidity = 0.0;
    for (bool top : {true, false}) {
        double base = top ? 1.0 : -1.0;
        double beta_end = top ? cyl.rot_top : cyl.rot_bottom;
        const double delta = 1e-3;
        for (double th = 0.0; th < kTwoPi; th += kTwoPi / 8) {
            double d[3];
            for (int lvl = 0; lvl < 3; ++lvl) {
                double z = base - base * delta * (lvl + 1);
                double R = std::sqrt(1.0 - z * z);
                SpherePoint p0(R * std::cos(th), R * std::sin(th), z);
                Trajectory traj = flow(spec, p0, static_cast<double>(k), opts.flow);
                d[lvl] = theta_displacement(traj);
            }
            double extrap = 3.0 * d[0] - 3.0 * d[1] + d[2];
            rigidity = std::max(rigidity, std::abs(extrap - beta_end));
        }
    }
    cyl.boundary_rigidity = rigidity;
    return cyl;
}

TorusIsotopy glue(const CylinderMap& cyl, double tau, const CensusReport* sphere_census) {
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
    double rt = positive_mod(cyl.rot_top, kTwoPi);
    double rb = positive_mod(cyl.rot_bottom, kTwoPi);
    for (double r : {rt, rb}) {
        if (std::min(r, kTwoPi - r) < 1e-3)
            throw std::invalid_argument(
                "cannot guarantee fixed-point-free collar: boundary rotation within 1e-3 of 0 "
                "mod 2pi");
    }
    // the monotone interpolation of the lifted endpoint angles must itself
    // avoid 0 mod 2pi
    double lo = std::min(cyl.rot_top, cyl.rot_bottom);
    double hi = std::max(cyl.rot_top, cyl.rot_bottom);
    double margin = kTwoPi;
    for (long m = static_cast<long>(std::floor(lo / kTwoPi)) - 1;
         m <= static_cast<long>(std::ceil(hi / kTwoPi)) + 1; ++m) {
        double c = m * kTwoPi;
        if (c >= lo - 1e-12 && c <= hi + 1e-12)
            throw std::invalid_argument(
                "cannot guarantee fixed-point-free collar: the lifted boundary angles straddle "
                "a multiple of 2pi");
        margin = std::min(margin, std::min(std::abs(lo - c), std::abs(hi - c)));
    }

    TorusIsotopy iso;
    iso.tau = tau;
    iso.length = 4.0 + 2.0 * tau;
    iso.total_area = (8.0 + 4.0 * tau) * kPi;
    iso.collar_margin = margin;
    iso.label = "glued";

    int k = cyl.iterate;
    HamiltonianSpec spec = cyl.spec;
    double L = iso.length;

    iso.field = [spec, k, tau, L](double t, double zeta, double theta) -> Vec2 {
        zeta = positive_mod(zeta, L);
        auto sphere_field = [&](double z) -> Vec2 {
            z = std::clamp(z, -1.0 + 1e-12, 1.0 - 1e-12);
            ChartPoint c{ChartId::Cylinder, {z, theta}};
            chart::ChartDerivs d = chart::pull_back(spec, k * t, c);
            return {-k * d.dH.y, k * d.dH.x};  // (z_dot, theta_dot)
        };
        if (zeta <= 2.0) return sphere_field(zeta - 1.0);
        if (zeta >= 2.0 + tau && zeta <= 4.0 + tau) return sphere_field(zeta - (3.0 + tau));
        // connecting cylinders: rigid rotation blended between the boundary rates
        bool top_collar = zeta < 2.0 + tau;
        double s = top_collar ? (zeta - 2.0) / tau : (zeta - (4.0 + tau)) / tau;
        double from = boundary_rate(spec, k, top_collar, t);        // adjacent big-cylinder end
        double to = boundary_rate(spec, k, !top_collar, t);
        double w = collar_blend(s);
        return {0.0, from * (1.0 - w) + to * w};
    };

    if (sphere_census != nullptr) {
        if (sphere_census->continuum_flag)
            throw std::invalid_argument("cannot glue a census with a fixed-point continuum");
        int idx = 0;
        for (const auto& orbit : sphere_census->orbits) {
            if (std::abs(orbit.point.p.z) > 1.0 - 1e-6) continue;  // marked poles
            for (int copy = 0; copy < 2; ++copy) {
                TorusFixedPoint fp;
                fp.tag = std::to_string(idx) + (copy == 0 ? "+" : "-");
                fp.sphere_point = orbit.point;
                double z = orbit.point.p.z;
                fp.zeta = copy == 0 ? z + 1.0 : z + 3.0 + tau;
                fp.theta = positive_mod(std::atan2(orbit.point.p.y, orbit.point.p.x), kTwoPi);
                fp.trace = orbit.trace;
                fp.classification = orbit.classification;
                fp.delta1 = orbit.delta_lifted;
                fp.homotopy_tag = orbit.homotopy_tag;
                fp.path = orbit.linearized_path;
                iso.fixed_points.push_back(std::move(fp));
            }
            ++idx;
        }
    }
    return iso;
}

double FluxVector::distance_to_zero() const {
    auto dist = [&](double x) {
        double r = positive_mod(x, lattice);
        return std::min(r, lattice - r);
    };
    return std::max(dist(A1), dist(A2));
}

namespace {

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on Legendre
// polynomials.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int j = 2; j <= n; ++j) {
            double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = 0.5 * (1.0 - t);  // note: reversed order is harmless
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
}

}  // namespace

FluxVector flux(const TorusIsotopy& iso, const FluxOptions& opts) {
    if (opts.t_samples < 64)
        throw std::invalid_argument("flux needs at least 64 time samples");
    double L = iso.length;

    // generator loop integrands at fixed t
    auto loop_theta = [&](double t) {  // -(integral of u over the theta loop)
        double acc = 0.0;
        int n = opts.loop_samples;
        for (int j = 0; j < n; ++j) {
            double th = kTwoPi * j / n;
            acc += iso.field_at(t, opts.zeta_probe, th).x;
        }
        return -acc * kTwoPi / n;
    };
    // piecewise-smooth zeta loop: integrate per region with Gauss-Legendre
    auto loop_zeta = [&](double t) {
        static std::vector<double> gx, gw;
        if (gx.empty()) gauss_legendre(48, gx, gw);
        double seams[5] = {0.0, 2.0, 2.0 + iso.tau, 4.0 + iso.tau, L};
        double acc = 0.0;
        for (int r = 0; r < 4; ++r) {
            double a = seams[r], b = seams[r + 1];
            for (size_t i = 0; i < gx.size(); ++i) {
                double zeta = a + (b - a) * gx[i];
                acc += gw[i] * (b - a) * iso.field_at(t, zeta, opts.theta_probe).y;
            }
        }
        return acc;
    };

    // smooth 1-periodic t-dependence: periodic trapezoid is spectrally accurate
    double A1 = 0.0, A2 = 0.0;
    int nt = opts.t_samples;
    for (int i = 0; i < nt; ++i) {
        double t = static_cast<double>(i) / nt;
        A1 += loop_theta(t);
        A2 += loop_zeta(t);
    }
    FluxVector fv;
    fv.A1 = A1 / nt;
    fv.A2 = A2 / nt;
    fv.lattice = kTwoPi * L;

    // area-preservation sanity: the generating field must be divergence-free
    double div = 0.0;
    const double h = 1e-5;
    for (double t : {0.13, 0.57}) {
        for (double zeta : {0.7, 2.0 + iso.tau / 2.0, 3.1}) {
            double du = (iso.field_at(t, zeta + h, 1.1).x - iso.field_at(t, zeta - h, 1.1).x) /
                        (2.0 * h);
            double dv = (iso.field_at(t, zeta, 1.1 + h).y - iso.field_at(t, zeta, 1.1 - h).y) /
                        (2.0 * h);
            div = std::max(div, std::abs(du + dv));
        }
    }
    if (div > 1e-6)
        throw std::invalid_argument("flux input is not area preserving (divergence " +
                                    std::to_string(div) + ")");
    return fv;
}

DichotomyVerdict dichotomy_verdict(const FluxVector& fv, const TorusIsotopy& iso, double tol) {
    DichotomyVerdict v;
    v.flux_distance = fv.distance_to_zero();
    v.census_size = static_cast<int>(iso.fixed_points.size());
    int lef = 0;
    for (const auto& fp : iso.fixed_points) lef += (fp.trace < 2.0) ? 1 : -1;
    v.torus_lefschetz = lef;
    bool flux_zero = v.flux_distance <= tol;
    if (flux_zero && v.census_size > 0 && lef == 0) {
        v.kind = DichotomyKind::HamiltonianLike;
        v.message = "flux vanishes mod the period lattice and the census is consistent with a "
                    "Hamiltonian time-1 map";
    } else if (!flux_zero && lef == 0) {
        v.kind = DichotomyKind::FixedPointFreeLike;
        v.message = v.census_size == 0
                        ? "nonzero flux with an empty census: consistent with a fixed-point-free "
                          "map"
                        : "nonzero flux: not Hamiltonian; census pairs cancel in the Lefschetz sum";
    } else {
        v.kind = DichotomyKind::Inconsistent;
        v.message = "flux and census contradict each other";
    }
    return v;
}

IndexGapReport index_gap_report(const TorusIsotopy& iso, const std::string& base_tag, int k) {
    IndexGapReport report;
    report.k = k;
    report.base_tag = base_tag;
    const TorusFixedPoint* base = nullptr;
    for (const auto& fp : iso.fixed_points)
        if (fp.tag == base_tag) base = &fp;
    if (base == nullptr) throw std::invalid_argument("unknown base orbit tag: " + base_tag);
    report.homotopy_class = base->homotopy_tag;

    std::vector<const TorusFixedPoint*> members;
    for (const auto& fp : iso.fixed_points)
        if (fp.homotopy_tag == base->homotopy_tag) members.push_back(&fp);

    std::vector<double> delta_k(members.size());
    for (size_t i = 0; i < members.size(); ++i) {
        delta_k[i] = (k == 1) ? mean_index(members[i]->path)
                              : mean_index(iterate_path(members[i]->path, k));
    }
    for (size_t i = 0; i < members.size(); ++i) {
        for (size_t j = i + 1; j < members.size(); ++j) {
            IndexGapRow row;
            row.tag_i = members[i]->tag;
            row.tag_j = members[j]->tag;
            row.delta_i = delta_k[i];
            row.delta_j = delta_k[j];
            row.gap = std::abs(delta_k[i] - delta_k[j]);
            row.equal = row.gap <= 1e-6;
            row.flagged = row.gap > 3.0;
            report.rows.push_back(row);
        }
    }
    return report;
}

TorusIsotopy identity_isotopy(double tau) {
    TorusIsotopy iso;
    iso.tau = tau;
    iso.length = 4.0 + 2.0 * tau;
    iso.total_area = (8.0 + 4.0 * tau) * kPi;
    iso.label = "identity";
    iso.field = [](double, double, double) { return Vec2(0.0, 0.0); };
    return iso;
}

TorusIsotopy translation_isotopy(double tau, double zeta_rate, double theta_rate) {
    TorusIsotopy iso = identity_isotopy(tau);
    iso.label = "translation";
    iso.field = [zeta_rate, theta_rate](double, double, double) {
        return Vec2(zeta_rate, theta_rate);
    };
    return iso;
}

TorusIsotopy hamiltonian_isotopy(double tau, const std::function<double(double, double)>& F,
                                 double fd_step) {
    TorusIsotopy iso = identity_isotopy(tau);
    iso.label = "hamiltonian";
    double h = fd_step;
    iso.field = [F, h](double, double zeta, double theta) {
        double Fz = (F(zeta + h, theta) - F(zeta - h, theta)) / (2.0 * h);
        double Ft = (F(zeta, theta + h) - F(zeta, theta - h)) / (2.0 * h);
        return Vec2(-Ft, Fz);  // i_X (dzeta ^ dtheta) = -dF
    };
    return iso;
}

TorusIsotopy concatenate(const TorusIsotopy& first, const TorusIsotopy& second) {
    if (std::abs(first.tau - second.tau) > 1e-12)
        throw std::invalid_argument("cannot concatenate isotopies of different tori");
    TorusIsotopy iso = first;
    iso.label = first.label + "*" + second.label;
    auto f1 = first.field, f2 = second.field;
    iso.field = [f1, f2](double t, double zeta, double theta) {
        if (t < 0.5) return f1(2.0 * t, zeta, theta) * 2.0;
        return f2(2.0 * t - 1.0, zeta, theta) * 2.0;
    };
    iso.fixed_points = second.fixed_points;
    return iso;
}

TorusCensusCheck verify_torus_census(const TorusIsotopy& iso, const CylinderMap& cyl,
                                     int grid_nzeta, int grid_ntheta, double match_radius) {
    TorusCensusCheck check;
    CensusOptions copts;
    copts.grid_nz = 32;  // unused here; Newton is driven per-seed below
    double tau = iso.tau;

    // collar margin: minimal rotation distance to 0 mod 2pi over both collars
    double margin = kTwoPi;
    for (double s = 0.0; s <= 1.0; s += 1.0 / 64) {
        double w = collar_blend(s);
        double ang = cyl.rot_top * (1.0 - w) + cyl.rot_bottom * w;
        double r = positive_mod(ang, kTwoPi);
        margin = std::min(margin, std::min(r, kTwoPi - r));
    }
    check.collar_min_rotation = margin;

    // Newton sweep over the big-cylinder regions through the sphere dynamics
    for (int i = 0; i < grid_nzeta; ++i) {
        double zeta = iso.length * (i + 0.5) / grid_nzeta;
        double z;
        bool plus_copy;
        if (zeta <= 2.0) {
            z = zeta - 1.0;
            plus_copy = true;
        } else if (zeta >= 2.0 + tau && zeta <= 4.0 + tau) {
            z = zeta - (3.0 + tau);
            plus_copy = false;
        } else {
            continue;  // collars certified by the rotation margin
        }
        if (std::abs(z) > 0.92) continue;
        for (int j = 0; j < grid_ntheta; ++j) {
            double th = kTwoPi * j / grid_ntheta;
            double R = std::sqrt(1.0 - z * z);
            SpherePoint seed(R * std::cos(th), R * std::sin(th), z);
            auto root = newton_fixed_point(cyl.spec, seed, cyl.iterate, copts);
            if (!root.has_value()) continue;
            if (std::abs(root->p.z) > 1.0 - 1e-6) continue;  // marked poles, blown up
            double rz = root->p.z;
            double rth = positive_mod(std::atan2(root->p.y, root->p.x), kTwoPi);
            double rzeta = plus_copy ? rz + 1.0 : rz + 3.0 + tau;
            bool matched = false;
            for (const auto& fp : iso.fixed_points) {
                double dz = rzeta - fp.zeta;
                double dt = wrap_angle(rth - fp.theta);
                if (std::sqrt(dz * dz + dt * dt) <= match_radius &&
                    ((plus_copy && fp.tag.back() == '+') || (!plus_copy && fp.tag.back() == '-'))) {
                    matched = true;
                    break;
                }
            }
            if (matched)
                ++check.matched;
            else
                ++check.unmatched;
        }
    }
    return check;
}

std::string cylinder_to_json_header(const CylinderMap& cyl, double tau) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["nz"] = cyl.nz;
    j["ntheta"] = cyl.ntheta;
    j["iterate"] = cyl.iterate;
    j["rot_top"] = cyl.rot_top;
    j["rot_bottom"] = cyl.rot_bottom;
    j["tau"] = tau;
    j["area_drift"] = cyl.area_drift;
    j["boundary_rigidity"] = cyl.boundary_rigidity;
    j["payload"] = "csv rows z,theta,z_image,theta_image (row-major over the z x theta grid)";
    return j.dump(2);
}

std::string cylinder_to_csv(const CylinderMap& cyl) {
    std::ostringstream os;
    os << "z,theta,z_image,theta_image\n";
    char buf[180];
    for (int i = 0; i < cyl.nz; ++i) {
        for (int j = 0; j < cyl.ntheta; ++j) {
            const Vec2& img = cyl.images[static_cast<size_t>(i) * cyl.ntheta + j];
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", cyl.z_at(i),
                          cyl.theta_at(j), img.x, img.y);
            os << buf;
        }
    }
    return os.str();
}

std::string flux_to_json(const FluxVector& fv, const DichotomyVerdict* verdict) {
    nlohmann::ordered_json j;
    j["A1"] = fv.A1;
    j["A2"] = fv.A2;
    j["lattice"] = fv.lattice;
    j["A1_mod"] = fv.reduced1();
    j["A2_mod"] = fv.reduced2();
    j["distance_to_zero"] = fv.distance_to_zero();
    if (verdict != nullptr) {
        const char* kinds[] = {"hamiltonian-like", "fixed-point-free-like", "inconsistent"};
        j["verdict"] = kinds[static_cast<int>(verdict->kind)];
        j["message"] = verdict->message;
        j["census_size"] = verdict->census_size;
        j["torus_lefschetz"] = verdict->torus_lefschetz;
    }
    return j.dump(2);
}

std::string index_gaps_to_json(const IndexGapReport& report) {
    nlohmann::ordered_json j;
    j["k"] = report.k;
    j["base_tag"] = report.base_tag;
    j["homotopy_class"] = report.homotopy_class;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"i", r.tag_i},
                        {"j", r.tag_j},
                        {"delta_i", r.delta_i},
                        {"delta_j", r.delta_j},
                        {"gap", r.gap},
                        {"equal", r.equal},
                        {"flagged", r.flagged}});
    }
    j["pairs"] = rows;
    return j.dump(2);
}

}  // namespace spindex
