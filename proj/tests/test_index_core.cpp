#include <doctest.h>

#include <cmath>
#include <random>

#include "spindex/index_core.hpp"
#include "spindex/symplectic_path.hpp"

using namespace spindex;

namespace {

SymplecticPath2 rotation_path(double total_angle, int n = 2001) {
    return sample_path("rotation", n, [=](double t) { return Mat2::rotation(total_angle * t); });
}

SymplecticPath2 hyperbolic_path(double sigma = 1.0, int n = 2001) {
    return sample_path("hyperbolic", n, [=](double t) {
        return Mat2::diagonal(std::exp(sigma * t), std::exp(-sigma * t));
    });
}

// Random smooth symplectic paths: integrate Mdot = S(t) M for a random
// sl(2)-valued Fourier polynomial S, with Cayley steps (det stays 1).
struct RandomPaths {
    std::mt19937_64 rng;
    explicit RandomPaths(unsigned long long seed) : rng(seed) {}

    SymplecticPath2 next(double scale = 1.5, int nsteps = 3000) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        const int J = 3;
        double a[J][3], c[3];
        for (auto& row : a)
            for (double& v : row) v = gauss(rng) * scale;
        for (double& v : c) v = gauss(rng) * scale;
        auto S = [&](double t) {
            double v[3] = {c[0], c[1], c[2]};
            for (int j = 0; j < J; ++j) {
                double cs = std::cos(kTwoPi * (j + 1) * t), sn = std::sin(kTwoPi * (j + 1) * t);
                for (int i = 0; i < 3; ++i) v[i] += a[j][i] * cs / (j + 1) + a[j][2 - i] * sn / (j + 1);
            }
            return Mat2(v[0], v[1], v[2], -v[0]);
        };
        SymplecticPath2 path;
        path.source = "random";
        Mat2 M = Mat2::identity();
        path.samples.push_back({0.0, M});
        double h = 1.0 / nsteps;
        for (int i = 0; i < nsteps; ++i) {
            Mat2 Sm = S((i + 0.5) * h);
            Mat2 half = Sm * (h / 2.0);
            M = (Mat2::identity() - half).inverse() * (Mat2::identity() + half) * M;
            path.samples.push_back({(i + 1.0) * h, M});
        }
        path.samples.back().t = 1.0;
        return path;
    }
};

}  // namespace

TEST_CASE("rho_angle on the catalog matrices") {
    CHECK(rho_angle(Mat2::rotation(0.3)) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(rho_angle(Mat2::diagonal(2.0, 0.5)) == 0.0);
    CHECK(rho_angle(Mat2::diagonal(-2.0, -0.5)) == doctest::Approx(kPi));
    // opposite rotation sense lands in (pi, 2pi)
    CHECK(rho_angle(Mat2::rotation(-0.3)) == doctest::Approx(kTwoPi - 0.3).epsilon(1e-12));
    CHECK_THROWS_AS(rho_angle(Mat2::diagonal(2.0, 2.0)), std::invalid_argument);
}

TEST_CASE("mean index of rotation, identity, and hyperbolic paths") {
    double alpha = 0.6180339887;
    CHECK(mean_index(rotation_path(kTwoPi * alpha)) == doctest::Approx(2 * alpha).epsilon(1e-9));

    SymplecticPath2 id_path = sample_path("id", 11, [](double) { return Mat2::identity(); });
    CHECK(mean_index(id_path) == 0.0);

    CHECK(mean_index(hyperbolic_path()) == 0.0);
}

TEST_CASE("mean index is independent of sampling refinement") {
    RandomPaths gen(606);
    for (int trial = 0; trial < 10; ++trial) {
        SymplecticPath2 path = gen.next(1.0, 1500);
        double d = mean_index(path);
        CHECK(std::abs(mean_index(path.refined(0.01)) - d) <= 1e-6);
        SymplecticPath2 coarse = gen.next(1.0, 3000);
        // resampling an already-fine path must not move the result at all
        CHECK(mean_index(coarse.refined(0.002)) == doctest::Approx(mean_index(coarse)).epsilon(1e-12));
    }
}

TEST_CASE("mean index of the hyperbolic path agrees with the mu(A^k)/k oracle") {
    SymplecticPath2 path = hyperbolic_path(1.0, 4001);
    for (int k : {1, 2, 4, 8, 16, 32, 64}) {
        SymplecticPath2 it = iterate_path(path, k);
        auto mu = cz_index(it);
        REQUIRE(mu.has_value());
        // oracle: lim mu(A^k)/k; bound |mu/k - Delta| <= 2/k
        CHECK(std::abs(static_cast<double>(*mu) / k - 0.0) <= 2.0 / k);
    }
}

TEST_CASE("undersampled paths are rejected") {
    // A stretched elliptic family [[cos s, -B sin s],[sin s / B, cos s]]: the
    // angle rho equals s while the matrix norm scales with B, so a jump from
    // s to pi - s is small in matrix norm yet ambiguous for lifting.
    SymplecticPath2 path;
    path.source = "stretched";
    auto stretched = [](double s, double B) {
        return Mat2(std::cos(s), -B * std::sin(s), std::sin(s) / B, std::cos(s));
    };
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
        double u = static_cast<double>(i) / n;
        path.samples.push_back({0.99 * u, stretched(0.7 * u, 1.0 + 99.0 * u)});
    }
    path.samples.push_back({1.0, stretched(kPi - 0.7, 100.0)});
    CHECK_THROWS_WITH_AS(static_cast<void>(mean_index(path)), doctest::Contains("undersampled"),
                         std::runtime_error);
}

TEST_CASE("cz index via crossings: rotation and hyperbolic endpoints") {
    CHECK(*cz_index(rotation_path(kTwoPi * 0.3)) == 1);
    CHECK(*cz_index(rotation_path(kTwoPi * 1.4)) == 3);
    CHECK(*cz_index(hyperbolic_path()) == 0);
    // degenerate endpoint: full rotation ends at the identity
    CHECK_FALSE(cz_index(rotation_path(kTwoPi)).has_value());
}

TEST_CASE("closest odd integer rule") {
    CHECK(cz_via_closest_odd(1.236) == 1);
    CHECK(cz_via_closest_odd(2.8) == 3);
    CHECK(cz_via_closest_odd(-0.4) == -1);
    CHECK(cz_via_closest_odd(0.6) == 1);
    CHECK(cz_via_closest_odd(-2.8) == -3);
    CHECK_THROWS_AS(cz_via_closest_odd(2.0), std::domain_error);
}

TEST_CASE("iterate_path: rotations, identity, hyperbolic") {
    double alpha = 0.23;
    SymplecticPath2 rot = rotation_path(kTwoPi * alpha);
    CHECK(mean_index(iterate_path(rot, 3)) == doctest::Approx(6 * alpha).epsilon(1e-10));

    SymplecticPath2 id_path = sample_path("id", 11, [](double) { return Mat2::identity(); });
    for (int k : {2, 5}) CHECK(mean_index(iterate_path(id_path, k)) == 0.0);

    CHECK(mean_index(iterate_path(hyperbolic_path(), 5)) == 0.0);
}

TEST_CASE("reduce_mod") {
    CHECK(reduce_mod(6.472, 4).value == doctest::Approx(2.472).epsilon(1e-14));
    CHECK(reduce_mod(-1.236, 4).value == doctest::Approx(2.764).epsilon(1e-14));
    CHECK(reduce_mod(4.0, 4).value == 0.0);
    CHECK_THROWS_AS(reduce_mod(1.0, 3.0), std::invalid_argument);
}

TEST_CASE("path invariants are enforced") {
    SymplecticPath2 bad = rotation_path(1.0, 101);
    bad.samples[5].m = Mat2::diagonal(1.1, 1.0);  // det != 1
    CHECK_THROWS_AS(mean_index(bad), std::invalid_argument);

    SymplecticPath2 shifted = rotation_path(1.0, 101);
    shifted.samples[0].m = Mat2::rotation(0.1);
    CHECK_THROWS_AS(mean_index(shifted), std::invalid_argument);
}

TEST_CASE("property: |mu - Delta| <= 1, strict off the degenerate set") {
    RandomPaths gen(20260810);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        SymplecticPath2 path = gen.next(1.2, 2500);
        auto mu = cz_index(path);
        if (!mu.has_value()) continue;
        double delta = mean_index(path);
        ++checked;
        CHECK(std::abs(static_cast<double>(*mu) - delta) < 1.0);
    }
    CHECK(checked > 900);
}

TEST_CASE("property: iteration linearity of the mean index") {
    RandomPaths gen(77);
    for (int trial = 0; trial < 200; ++trial) {
        SymplecticPath2 path = gen.next(1.0, 2500);
        double d1 = mean_index(path);
        for (int k = 2; k <= 10; ++k) {
            double dk = mean_index(iterate_path(path, k));
            CHECK(std::abs(dk - k * d1) <= 1e-8);
        }
    }
}

TEST_CASE("property: crossing-based mu equals the closest odd integer to Delta") {
    RandomPaths gen(4242);
    int checked = 0, attempts = 0;
    while (checked < 1000 && attempts < 8000) {
        ++attempts;
        SymplecticPath2 path = gen.next(1.0, 2500);
        if (std::abs(path.endpoint().trace()) >= 2.0 - 1e-6) continue;  // want elliptic endpoints
        double delta = mean_index(path);
        if (std::abs(delta - std::round(delta)) <= 1e-6) continue;
        auto mu = cz_index(path);
        REQUIRE(mu.has_value());  // non-integer Delta forces an elliptic endpoint
        ++checked;
        CHECK(*mu == cz_via_closest_odd(delta));
    }
    CHECK(checked == 1000);
}

TEST_CASE("property: mean index continuity under sample perturbation") {
    RandomPaths gen(999);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        SymplecticPath2 path = gen.next(1.0, 3000);
        double d0 = mean_index(path);
        double eps = 1e-3;
        SymplecticPath2 pert = path;
        double actual = 0.0;
        for (size_t i = 1; i < pert.samples.size(); ++i) {
            // perturb inside SL(2,R) to keep the det invariant; the identity
            // start stays pinned
            PathSample& s = pert.samples[i];
            Mat2 g(gauss(rng), gauss(rng), gauss(rng), 0.0);
            g.d = -g.a;
            Mat2 half = g * (eps / (2.0 * std::max(1.0, g.frobenius())));
            Mat2 e = (Mat2::identity() - half).inverse() * (Mat2::identity() + half);
            Mat2 np = e * s.m;
            actual = std::max(actual, (np - s.m).opnorm());
            s.m = np;
        }
        double d1 = mean_index(pert);
        if (actual > 0.0) worst_ratio = std::max(worst_ratio, std::abs(d1 - d0) / actual);
    }
    MESSAGE("calibrated continuity constant C = ", worst_ratio);
    CHECK(worst_ratio <= 25.0);
}

TEST_CASE("mean index agrees with the iterate oracle mu(A^k)/k within 2/k") {
    RandomPaths gen(31415);
    for (int trial = 0; trial < 25; ++trial) {
        SymplecticPath2 path = gen.next(1.0, 2500);
        double delta = mean_index(path);
        for (int k : {4, 16, 64}) {
            auto mu = cz_index(iterate_path(path, k));
            if (!mu.has_value()) continue;
            CHECK(std::abs(static_cast<double>(*mu) / k - delta) <= 2.0 / k);
        }
    }
}

TEST_CASE("json round trip preserves samples") {
    SymplecticPath2 path = rotation_path(1.0, 51);
    SymplecticPath2 back = path_from_json(path_to_json(path));
    REQUIRE(back.samples.size() == path.samples.size());
    for (size_t i = 0; i < back.samples.size(); ++i) {
        CHECK(back.samples[i].t == path.samples[i].t);
        CHECK((back.samples[i].m - path.samples[i].m).frobenius() == 0.0);
    }
    CHECK(mean_index(back) == mean_index(path));
}

TEST_CASE("index report json") {
    IndexReport r = index_report(rotation_path(kTwoPi * 0.3));
    CHECK(r.mu.has_value());
    CHECK(*r.mu == 1);
    CHECK(r.delta == doctest::Approx(0.6).epsilon(1e-10));
    CHECK(std::abs(r.endpoint_eigenvalues[0] - std::polar(1.0, kTwoPi * 0.3)) < 1e-9);
    std::string js = report_to_json(r);
    CHECK(js.find("\"delta\"") != std::string::npos);
    CHECK(js.find("\"mu\":1") != std::string::npos);
}
