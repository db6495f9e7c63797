#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace pintswim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr const double& operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double a) { x *= a; y *= a; z *= a; return *this; }
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator*(double a, Vec3 v) { return v *= a; }
constexpr Vec3 operator*(Vec3 v, double a) { return v *= a; }
constexpr Vec3 operator/(Vec3 v, double a) { return v *= (1.0 / a); }
constexpr Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
constexpr double norm2(const Vec3& v) { return dot(v, v); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }

/// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> m{};

    constexpr double& operator()(std::size_t i, std::size_t j) { return m[3 * i + j]; }
    constexpr const double& operator()(std::size_t i, std::size_t j) const { return m[3 * i + j]; }

    static constexpr Mat3 identity() {
        Mat3 r;
        r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return r;
    }
    static constexpr Mat3 zero() { return Mat3{}; }

    constexpr Mat3& operator+=(const Mat3& o) {
        for (std::size_t i = 0; i < 9; ++i) m[i] += o.m[i];
        return *this;
    }
    constexpr Mat3& operator-=(const Mat3& o) {
        for (std::size_t i = 0; i < 9; ++i) m[i] -= o.m[i];
        return *this;
    }
    constexpr Mat3& operator*=(double a) {
        for (std::size_t i = 0; i < 9; ++i) m[i] *= a;
        return *this;
    }
};

constexpr Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
constexpr Mat3 operator-(Mat3 a, const Mat3& b) { return a -= b; }
constexpr Mat3 operator*(double a, Mat3 mm) { return mm *= a; }

constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

constexpr Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
            a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
            a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
}

constexpr Mat3 transpose(const Mat3& a) {
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) r(i, j) = a(j, i);
    return r;
}

/// a b^T
constexpr Mat3 outer(const Vec3& a, const Vec3& b) {
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
    return r;
}

/// Skew matrix K(n) with K(n) v = n x v.
constexpr Mat3 skew(const Vec3& n) {
    Mat3 r;
    r.m = {0, -n.z, n.y, n.z, 0, -n.x, -n.y, n.x, 0};
    return r;
}

constexpr double trace(const Mat3& a) { return a(0, 0) + a(1, 1) + a(2, 2); }

constexpr double det(const Mat3& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

inline double frobenius_norm(const Mat3& a) {
    double s = 0.0;
    for (double v : a.m) s += v * v;
    return std::sqrt(s);
}

}  // namespace pintswim
