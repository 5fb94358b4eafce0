#ifndef SPINDEX_LINALG_HPP
#define SPINDEX_LINALG_HPP

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace spindex {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    double norm() const { return std::hypot(x, y); }
};
inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        if (n == 0.0) throw std::domain_error("cannot normalize zero vector");
        return *this * (1.0 / n);
    }
};
inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Row-major 2x2 matrix.
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;  // [[a,b],[c,d]]

    Mat2() = default;
    Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 rotation(double t) {
        double cs = std::cos(t), sn = std::sin(t);
        return {cs, -sn, sn, cs};
    }
    static Mat2 diagonal(double u, double v) { return {u, 0.0, 0.0, v}; }

    double trace() const { return a + d; }
    double det() const { return a * d - b * c; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

    Mat2 inverse() const {
        double dt = det();
        if (std::abs(dt) < 1e-300) throw std::domain_error("singular 2x2 matrix");
        double inv = 1.0 / dt;
        return {d * inv, -b * inv, -c * inv, a * inv};
    }

    /// Frobenius norm; used for path step-size bounds.
    double frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }

    /// Spectral norm via the exact 2x2 singular value formula.
    double opnorm() const {
        double f2 = a * a + b * b + c * c + d * d;
        double dt = det();
        double disc = f2 * f2 - 4.0 * dt * dt;
        if (disc < 0.0) disc = 0.0;
        return std::sqrt(0.5 * (f2 + std::sqrt(disc)));
    }

    /// Eigenvalues of a real 2x2 matrix.
    std::array<std::complex<double>, 2> eigenvalues() const {
        double tr = trace(), dt = det();
        std::complex<double> disc = std::complex<double>(tr * tr / 4.0 - dt, 0.0);
        std::complex<double> s = std::sqrt(disc);
        return {tr / 2.0 + s, tr / 2.0 - s};
    }
};

inline Vec2 solve2x2(const Mat2& m, const Vec2& rhs) {
    double dt = m.det();
    if (std::abs(dt) < 1e-300) throw std::domain_error("singular 2x2 system");
    double inv = 1.0 / dt;
    return {(m.d * rhs.x - m.b * rhs.y) * inv, (-m.c * rhs.x + m.a * rhs.y) * inv};
}

/// Row-major 3x3 matrix, enough for SO(3) work.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Mat3 identity() { return {}; }

    double operator()(int i, int j) const { return m[3 * i + j]; }
    double& operator()(int i, int j) { return m[3 * i + j]; }

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }
    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    /// Rotation by angle t about a unit axis (Rodrigues).
    static Mat3 axis_angle(const Vec3& axis, double t) {
        Vec3 u = axis.normalized();
        double c = std::cos(t), s = std::sin(t), v = 1.0 - c;
        Mat3 r;
        r(0, 0) = c + u.x * u.x * v;
        r(0, 1) = u.x * u.y * v - u.z * s;
        r(0, 2) = u.x * u.z * v + u.y * s;
        r(1, 0) = u.y * u.x * v + u.z * s;
        r(1, 1) = c + u.y * u.y * v;
        r(1, 2) = u.y * u.z * v - u.x * s;
        r(2, 0) = u.z * u.x * v - u.y * s;
        r(2, 1) = u.z * u.y * v + u.x * s;
        r(2, 2) = c + u.z * u.z * v;
        return r;
    }
};

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

/// Reduce an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a > kPi) a -= kTwoPi;
    if (a <= -kPi) a += kTwoPi;
    return a;
}

/// Reduce to [0, m).
inline double positive_mod(double x, double m) {
    double r = std::fmod(x, m);
    if (r < 0.0) r += m;
    if (r >= m) r = 0.0;  // guard against fmod returning m - eps rounding to m
    return r;
}

}  // namespace spindex

#endif
