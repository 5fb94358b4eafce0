#include <doctest.h>

#include <cmath>

#include "spindex/orbit_census.hpp"
#include "spindex/sphere_flow.hpp"

using namespace spindex;

namespace {
const double kGolden = 0.6180339887;

SpherePoint equator_point(double theta) {
    return SpherePoint(std::cos(theta), std::sin(theta), 0.0);
}
}  // namespace

TEST_CASE("vector field of the rotation family") {
    HamiltonianSpec rot = make_rotation(kGolden);
    // theta_dot = dH/dz = 2 pi alpha on the equator, z_dot = 0: the ambient
    // speed equals 2 pi alpha and the field is tangent to the latitude
    Vec3 X = vector_field(rot, 0.5, equator_point(0.3));
    double rate = rot.schedule.zeta_rate(0.5);
    CHECK(X.norm() == doctest::Approx(kTwoPi * kGolden * rate).epsilon(1e-12));
    CHECK(std::abs(X.z) < 1e-15);
    CHECK(X.dot(equator_point(0.3).p) == doctest::Approx(0.0).epsilon(1e-14));
    // counterclockwise in theta: X at theta=0.3 points along d/dtheta
    Vec3 dtheta(-std::sin(0.3), std::cos(0.3), 0.0);
    CHECK(X.dot(dtheta) > 0.0);

    CHECK(vector_field(rot, 0.1, north_pole()).norm() == 0.0);
    CHECK(vector_field(rot, 0.7, south_pole()).norm() == 0.0);

    HamiltonianSpec pert = make_perturbed_rotation(kGolden, 0.0, 3, PerturbProfile::Zonal);
    Vec3 Xp = vector_field(pert, 0.5, equator_point(1.1));
    Vec3 Xr = vector_field(rot, 0.5, equator_point(1.1));
    CHECK((Xp - Xr).norm() == 0.0);
}

TEST_CASE("flow of the rotation family") {
    HamiltonianSpec rot = make_rotation(kGolden);
    Trajectory traj = flow(rot, equator_point(0.0), 1.0);
    Vec3 end = traj.endpoint();
    CHECK(end.z == doctest::Approx(0.0).epsilon(1e-10));
    double theta_end = std::atan2(end.y, end.x);
    double circ = positive_mod(theta_end - kTwoPi * kGolden, kTwoPi);
    CHECK(std::min(circ, kTwoPi - circ) < 1e-9);

    Trajectory still = flow(rot, equator_point(0.4), 0.0);
    CHECK(still.samples.size() == 1);
    CHECK((still.endpoint() - equator_point(0.4).p).norm() == 0.0);

    // rational rotation closes after q iterations; irrational ones never do
    HamiltonianSpec third = make_rotation(1.0 / 3.0);
    Trajectory closed = flow(third, equator_point(1.0), 3.0);
    CHECK((closed.endpoint() - equator_point(1.0).p).norm() < 1e-8);
    for (double T : {1.0, 2.0, 3.0, 5.0, 8.0}) {
        Trajectory open_orbit = flow(rot, equator_point(1.0), T);
        CHECK((open_orbit.endpoint() - equator_point(1.0).p).norm() > 1e-3);
    }
}

TEST_CASE("energy conservation and linearized determinant") {
    HamiltonianSpec spec = make_perturbed_rotation(0.11, 0.55, 4, PerturbProfile::Zonal);
    SpherePoint p0(0.6, 0.3, std::sqrt(1.0 - 0.36 - 0.09));
    Trajectory traj = flow(spec, p0, 1.0);
    double h0 = spec.base_value(p0.p);
    double worst = 0.0;
    for (const auto& s : traj.samples)
        worst = std::max(worst, std::abs(spec.base_value(s.p) - h0));
    CHECK(worst <= 1e-8);

    TrivializationRecord triv;
    triv.excluded_point = south_pole();
    SymplecticPath2 path = linearized_flow(spec, p0, 1.0, triv);
    for (const auto& s : path.samples) CHECK(std::abs(s.m.det() - 1.0) <= 1e-8);
}

TEST_CASE("area preservation of the time-1 map on test cells") {
    HamiltonianSpec spec = make_perturbed_rotation(0.11, 0.55, 4, PerturbProfile::Zonal);
    // area ratio of a small centered cell, measured at size s; the finite-size
    // bias is O(s^2), removed below by Richardson extrapolation
    auto ratio = [&](double z0, double th0, double s) {
        const double dz[4] = {-s, s, s, -s};
        const double dt[4] = {-s, -s, s, s};
        Vec2 img[4];
        for (int c = 0; c < 4; ++c) {
            double z = z0 + dz[c], th = th0 + dt[c];
            double R = std::sqrt(1.0 - z * z);
            Trajectory t = flow(spec, SpherePoint(R * std::cos(th), R * std::sin(th), z), 1.0);
            double rel = std::atan2(t.endpoint().y, t.endpoint().x);
            img[c] = {t.endpoint().z, rel};
        }
        // unwrap theta around the first corner
        for (int c = 1; c < 4; ++c) img[c].y = img[0].y + wrap_angle(img[c].y - img[0].y);
        double area = 0.0;
        for (int c = 0; c < 4; ++c) {
            const Vec2& a = img[c];
            const Vec2& b = img[(c + 1) % 4];
            area += a.x * b.y - b.x * a.y;
        }
        return std::abs(area) / 2.0 / (4.0 * s * s);
    };
    double worst = 0.0;
    for (double z0 : {-0.4, 0.2, 0.55}) {
        for (double th0 : {0.9, 3.8}) {
            double r1 = ratio(z0, th0, 1e-4);
            double r2 = ratio(z0, th0, 2e-4);
            double extrap = (4.0 * r1 - r2) / 3.0;
            worst = std::max(worst, std::abs(extrap - 1.0));
        }
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("linearized flow at the poles of the rotation") {
    HamiltonianSpec rot = make_rotation(kGolden);
    TrivializationRecord excl_south;
    excl_south.excluded_point = south_pole();
    SymplecticPath2 north_path = linearized_flow(rot, north_pole(), 1.0, excl_south);
    // positively oriented symplectic frames: the north pole of H = 2 pi a z
    // is a local maximum and rotates negatively
    CHECK(mean_index(north_path) == doctest::Approx(-2.0 * kGolden).epsilon(1e-9));

    TrivializationRecord excl_north;
    excl_north.excluded_point = north_pole();
    SymplecticPath2 south_path = linearized_flow(rot, south_pole(), 1.0, excl_north);
    CHECK(mean_index(south_path) == doctest::Approx(2.0 * kGolden).epsilon(1e-9));

    // endpoint eigenvalues e^{+-i pi Delta} either way
    auto eig = north_path.endpoint().eigenvalues();
    CHECK(std::abs(eig[0].real() - std::cos(kTwoPi * kGolden)) < 1e-9);
}

TEST_CASE("winding correction adds two units of Delta per turn") {
    HamiltonianSpec rot = make_rotation(0.3);
    TrivializationRecord triv;
    triv.excluded_point = south_pole();
    double base = mean_index(linearized_flow(rot, north_pole(), 1.0, triv));
    triv.winding_correction = 2;
    double corrected = mean_index(linearized_flow(rot, north_pole(), 1.0, triv));
    CHECK(corrected - base == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("static quadratic model: Delta = lambda0 / pi for a full-width twist") {
    // H == 0 twisted by the quadratic bump at the south pole, kappa == 1
    HamiltonianSpec spec = make_zero();
    TwistPerturbation tp;
    tp.lambda0 = kPi * 0.4;
    tp.support_radius = 0.8;
    tp.window_width = 1.0;
    spec = twist_perturbation(spec, south_pole(), tp);
    TrivializationRecord triv;
    triv.excluded_point = north_pole();
    OrbitIndex oi = mean_index_orbit(spec, south_pole(), 1.0, triv);
    CHECK(oi.delta_lifted == doctest::Approx(0.4).epsilon(1e-8));
    CHECK(oi.delta_mod.value == doctest::Approx(0.4).epsilon(1e-8));
}

TEST_CASE("mean_index_orbit on the rotation poles and the zero Hamiltonian") {
    HamiltonianSpec rot = make_rotation(kGolden);
    TrivializationRecord excl_s{south_pole(), 0, "contractible"};
    TrivializationRecord excl_n{north_pole(), 0, "contractible"};
    OrbitIndex north = mean_index_orbit(rot, north_pole(), 1.0, excl_s);
    OrbitIndex south = mean_index_orbit(rot, south_pole(), 1.0, excl_n);
    CHECK(north.delta_lifted == doctest::Approx(-2.0 * kGolden).epsilon(1e-9));
    CHECK(south.delta_lifted == doctest::Approx(2.0 * kGolden).epsilon(1e-9));
    // reductions mod 4 sum to zero mod 4
    double sum = positive_mod(north.delta_mod.value + south.delta_mod.value, 4.0);
    CHECK(std::min(sum, 4.0 - sum) < 1e-9);

    HamiltonianSpec zero = make_zero();
    OrbitIndex z = mean_index_orbit(zero, equator_point(0.7), 1.0, excl_n);
    CHECK(z.delta_lifted == 0.0);
    CHECK(z.delta_mod.value == 0.0);

    HamiltonianSpec fast = make_rotation(0.9);
    CHECK_THROWS_AS(mean_index_orbit(fast, equator_point(0.0), 1.0, excl_n),
                    std::invalid_argument);
}

TEST_CASE("trivialization breakdown near the excluded point") {
    HamiltonianSpec rot = make_rotation(kGolden);
    TrivializationRecord bad;
    bad.excluded_point = north_pole();
    CHECK_THROWS_WITH_AS(static_cast<void>(linearized_flow(rot, north_pole(), 1.0, bad)),
                         doctest::Contains("trivialization breakdown"), std::runtime_error);
}

TEST_CASE("mod-4 invariance: excluded point changes the lift by a multiple of 4") {
    // equator orbit of the 1/3 rotation closes after 3 periods; the two polar
    // excluded points span opposite discs
    HamiltonianSpec third = make_rotation(1.0 / 3.0);
    SpherePoint p0 = equator_point(0.0);
    TrivializationRecord excl_s{south_pole(), 0, "contractible"};
    TrivializationRecord excl_n{north_pole(), 0, "contractible"};
    OrbitIndex with_s = mean_index_orbit(third, p0, 3.0, excl_s);
    OrbitIndex with_n = mean_index_orbit(third, p0, 3.0, excl_n);
    CHECK(with_s.delta_lifted == doctest::Approx(-2.0).epsilon(1e-8));
    CHECK(with_n.delta_lifted == doctest::Approx(2.0).epsilon(1e-8));
    double diff = with_n.delta_lifted - with_s.delta_lifted;
    CHECK(std::abs(diff - 4.0) <= 1e-6);
    CHECK(std::abs(with_n.delta_mod.value - with_s.delta_mod.value) <= 1e-8);
}

TEST_CASE("chart transitions preserve the area form") {
    // random-ish points in the overlap bands
    for (double z : {0.79, 0.81, -0.79, -0.81}) {
        for (double th : {0.3, 2.2, 5.1}) {
            ChartPoint cyl{ChartId::Cylinder, {z, th}};
            ChartId cap = z > 0 ? ChartId::CapNorth : ChartId::CapSouth;
            Mat2 T = chart::transition(cyl, cap);
            CHECK(T.det() == doctest::Approx(1.0).epsilon(1e-10));
            Mat2 back = chart::transition(chart::from_sphere(cap, chart::to_sphere(cyl)),
                                          ChartId::Cylinder);
            CHECK((back * T - Mat2::identity()).frobenius() < 1e-10);
        }
    }
}

TEST_CASE("chart pullback second derivatives match finite differences") {
    HamiltonianSpec spec = make_perturbed_rotation(0.2, 0.3, 3, PerturbProfile::Zonal);
    for (ChartId id : {ChartId::Cylinder, ChartId::CapNorth, ChartId::CapSouth}) {
        Vec2 q = id == ChartId::Cylinder ? Vec2(0.35, 1.2) : Vec2(0.3, -0.2);
        ChartPoint c{id, q};
        chart::ChartDerivs d = chart::pull_back(spec, 0.5, c);
        const double h = 1e-5;
        auto H_at = [&](double dx, double dy) {
            ChartPoint cc{id, {q.x + dx, q.y + dy}};
            return chart::pull_back(spec, 0.5, cc).H;
        };
        double d11 = (H_at(h, 0) - 2 * d.H + H_at(-h, 0)) / (h * h);
        double d22 = (H_at(0, h) - 2 * d.H + H_at(0, -h)) / (h * h);
        double d12 = (H_at(h, h) - H_at(h, -h) - H_at(-h, h) + H_at(-h, -h)) / (4 * h * h);
        CHECK(d.d11 == doctest::Approx(d11).epsilon(1e-4));
        CHECK(d.d22 == doctest::Approx(d22).epsilon(1e-4));
        CHECK(d.d12 == doctest::Approx(d12).epsilon(1e-4));
        double g1 = (H_at(h, 0) - H_at(-h, 0)) / (2 * h);
        double g2 = (H_at(0, h) - H_at(0, -h)) / (2 * h);
        CHECK(d.dH.x == doctest::Approx(g1).epsilon(1e-7));
        CHECK(d.dH.y == doctest::Approx(g2).epsilon(1e-7));
    }
}

TEST_CASE("tabulated Hamiltonians flow like their analytic source") {
    // tabulate H = 2 pi a z on the band and compare the time-1 maps
    HamiltonianSpec tab;
    tab.kind = HamiltonianKind::Tabulated;
    tab.grid.nz = 48;
    tab.grid.ntheta = 48;
    tab.grid.z_band = 0.8;
    tab.grid.values.resize(48 * 48);
    for (int i = 0; i < 48; ++i) {
        double z = -0.8 + 1.6 * i / 47.0;
        for (int j = 0; j < 48; ++j)
            tab.grid.values[static_cast<size_t>(i) * 48 + j] = kTwoPi * 0.25 * z;
    }
    Trajectory traj = flow(tab, equator_point(0.2), 1.0);
    double dtheta = std::atan2(traj.endpoint().y, traj.endpoint().x) - 0.2;
    CHECK(positive_mod(dtheta, kTwoPi) == doctest::Approx(kTwoPi * 0.25).epsilon(1e-5));
    CHECK(traj.endpoint().z == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("hamiltonians are one-periodic in time and serialize losslessly") {
    HamiltonianSpec spec = make_perturbed_rotation(0.11, 0.55, 4, PerturbProfile::Zonal);
    spec.schedule.delta_h = 0.1;
    TwistPerturbation tp;
    tp.lambda0 = 0.07;
    tp.window_width = 0.12;
    tp.support_radius = 0.3;
    spec = twist_perturbation(spec, north_pole(), tp);

    Vec3 p = Vec3(0.3, -0.5, 0.81).normalized();
    for (double t : {0.03, 0.2, 0.77}) {
        CHECK(spec.value(t, p) == doctest::Approx(spec.value(t + 1.0, p)).epsilon(1e-14));
        CHECK((vector_field(spec, t, SpherePoint(p)) -
               vector_field(spec, t + 1.0, SpherePoint(p)))
                  .norm() < 1e-14);
    }
    // the base is constant (zero) on the flat window
    CHECK(spec.schedule.zeta_rate(0.02) == 0.0);
    CHECK(spec.schedule.zeta_rate(0.95) == 0.0);

    HamiltonianSpec back = hamiltonian_from_json(hamiltonian_to_json(spec));
    CHECK(hamiltonian_to_json(back) == hamiltonian_to_json(spec));
    CHECK(back.value(0.4, p) == spec.value(0.4, p));
}

TEST_CASE("coarse steps leave a lifting warning on the trajectory") {
    HamiltonianSpec rot = make_rotation(0.3);
    FlowOptions coarse;
    coarse.step = 0.05;
    Trajectory traj = flow(rot, equator_point(0.1), 1.0, coarse);
    REQUIRE(traj.warnings.size() == 1);
    CHECK(traj.warnings[0].find("lifting") != std::string::npos);
    CHECK(flow(rot, equator_point(0.1), 1.0).warnings.empty());
}

TEST_CASE("trajectory csv format") {
    HamiltonianSpec rot = make_rotation(0.25);
    FlowOptions opts;
    opts.step = 0.25;
    Trajectory traj = flow(rot, equator_point(0.0), 1.0, opts);
    std::string csv = trajectory_to_csv(traj);
    CHECK(csv.rfind("t,x,y,z\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // header + 5 samples
}
