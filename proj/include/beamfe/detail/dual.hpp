#pragma once

#include <array>
#include <cmath>

namespace beamfe::detail {

// Forward-mode scalar carrying a value, a gradient, and the packed lower
// triangle of a Hessian with respect to up to N seed directions. Element
// kernels evaluate their energy densities on these to obtain exact
// residuals and tangents; N stays small because each integrand term is
// seeded with its local intermediates only.
template <int N>
struct Dual2 {
    static constexpr int kDirs = N;
    static constexpr int kPacked = N * (N + 1) / 2;

    double v = 0.0;
    std::array<double, N> g{};
    std::array<double, kPacked> h{};

    Dual2() = default;
    Dual2(double value) : v(value) {}  // constants promote implicitly

    // packed index of Hessian entry (i, j), requires i >= j
    static constexpr int packed(int i, int j) { return i * (i + 1) / 2 + j; }

    static Dual2 seed(double value, int direction) {
        Dual2 d(value);
        d.g[direction] = 1.0;
        return d;
    }
};

inline double value(double x) { return x; }

template <int N>
double value(const Dual2<N>& x) {
    return x.v;
}

// r = f(a) with first/second derivative d, dd
template <int N>
Dual2<N> chain_unary(const Dual2<N>& a, double f, double d, double dd) {
    Dual2<N> r(f);
    for (int i = 0; i < N; ++i) r.g[i] = d * a.g[i];
    int p = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j <= i; ++j, ++p) r.h[p] = d * a.h[p] + dd * a.g[i] * a.g[j];
    return r;
}

// r = f(a, b) with partials fa, fb, faa, fab, fbb
template <int N>
Dual2<N> chain_binary(const Dual2<N>& a, const Dual2<N>& b, double f, double fa, double fb,
                      double faa, double fab, double fbb) {
    Dual2<N> r(f);
    for (int i = 0; i < N; ++i) r.g[i] = fa * a.g[i] + fb * b.g[i];
    int p = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j <= i; ++j, ++p)
            r.h[p] = fa * a.h[p] + fb * b.h[p] + faa * a.g[i] * a.g[j] + fbb * b.g[i] * b.g[j] +
                     fab * (a.g[i] * b.g[j] + a.g[j] * b.g[i]);
    return r;
}

template <int N>
Dual2<N> operator+(const Dual2<N>& a, const Dual2<N>& b) {
    Dual2<N> r(a.v + b.v);
    for (int i = 0; i < N; ++i) r.g[i] = a.g[i] + b.g[i];
    for (int p = 0; p < Dual2<N>::kPacked; ++p) r.h[p] = a.h[p] + b.h[p];
    return r;
}

template <int N>
Dual2<N> operator+(const Dual2<N>& a, double b) {
    Dual2<N> r = a;
    r.v += b;
    return r;
}

template <int N>
Dual2<N> operator+(double a, const Dual2<N>& b) {
    return b + a;
}

template <int N>
Dual2<N> operator-(const Dual2<N>& a) {
    Dual2<N> r(-a.v);
    for (int i = 0; i < N; ++i) r.g[i] = -a.g[i];
    for (int p = 0; p < Dual2<N>::kPacked; ++p) r.h[p] = -a.h[p];
    return r;
}

template <int N>
Dual2<N> operator-(const Dual2<N>& a, const Dual2<N>& b) {
    Dual2<N> r(a.v - b.v);
    for (int i = 0; i < N; ++i) r.g[i] = a.g[i] - b.g[i];
    for (int p = 0; p < Dual2<N>::kPacked; ++p) r.h[p] = a.h[p] - b.h[p];
    return r;
}

template <int N>
Dual2<N> operator-(const Dual2<N>& a, double b) {
    Dual2<N> r = a;
    r.v -= b;
    return r;
}

template <int N>
Dual2<N> operator-(double a, const Dual2<N>& b) {
    return -b + a;
}

template <int N>
Dual2<N> operator*(const Dual2<N>& a, const Dual2<N>& b) {
    Dual2<N> r(a.v * b.v);
    for (int i = 0; i < N; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    int p = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j <= i; ++j, ++p)
            r.h[p] = a.h[p] * b.v + a.v * b.h[p] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    return r;
}

template <int N>
Dual2<N> operator*(const Dual2<N>& a, double b) {
    Dual2<N> r(a.v * b);
    for (int i = 0; i < N; ++i) r.g[i] = a.g[i] * b;
    for (int p = 0; p < Dual2<N>::kPacked; ++p) r.h[p] = a.h[p] * b;
    return r;
}

template <int N>
Dual2<N> operator*(double a, const Dual2<N>& b) {
    return b * a;
}

template <int N>
Dual2<N> reciprocal(const Dual2<N>& a) {
    const double iv = 1.0 / a.v;
    return chain_unary(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}

template <int N>
Dual2<N> operator/(const Dual2<N>& a, const Dual2<N>& b) {
    return a * reciprocal(b);
}

template <int N>
Dual2<N> operator/(const Dual2<N>& a, double b) {
    return a * (1.0 / b);
}

template <int N>
Dual2<N> operator/(double a, const Dual2<N>& b) {
    return reciprocal(b) * a;
}

template <int N>
Dual2<N> sqrt(const Dual2<N>& a) {
    const double s = std::sqrt(a.v);
    return chain_unary(a, s, 0.5 / s, -0.25 / (s * a.v));
}

template <int N>
Dual2<N> sin(const Dual2<N>& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return chain_unary(a, s, c, -s);
}

template <int N>
Dual2<N> cos(const Dual2<N>& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return chain_unary(a, c, -s, -c);
}

template <int N>
Dual2<N> atan2(const Dual2<N>& y, const Dual2<N>& x) {
    const double f = std::atan2(y.v, x.v);
    const double r2 = x.v * x.v + y.v * y.v;
    const double fy = x.v / r2;
    const double fx = -y.v / r2;
    const double r4 = r2 * r2;
    const double fyy = -2.0 * x.v * y.v / r4;
    const double fxx = 2.0 * x.v * y.v / r4;
    const double fyx = (y.v * y.v - x.v * x.v) / r4;
    return chain_binary(y, x, f, fy, fx, fyy, fyx, fxx);
}

}  // namespace beamfe::detail
