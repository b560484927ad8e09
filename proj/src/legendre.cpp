#include "beamfe/legendre.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace beamfe {

LegendreEval legendre_basis(int k, double xi) {
    if (k < 0) throw std::invalid_argument("legendre_basis: k must be >= 0");
    LegendreEval e;
    e.value.resize(k + 1);
    e.deriv.resize(k + 1);
    e.value[0] = 1.0;
    e.deriv[0] = 0.0;
    if (k == 0) return e;
    e.value[1] = xi;
    e.deriv[1] = 1.0;
    for (int j = 2; j <= k; ++j) {
        // (j) P_j = (2j-1) xi P_{j-1} - (j-1) P_{j-2}
        e.value[j] = ((2.0 * j - 1.0) * xi * e.value[j - 1] - (j - 1.0) * e.value[j - 2]) / j;
        // P'_j = P'_{j-2} + (2j-1) P_{j-1}
        e.deriv[j] = e.deriv[j - 2] + (2.0 * j - 1.0) * e.value[j - 1];
    }
    return e;
}

namespace {

QuadratureRule compute_gauss(int n) {
    QuadratureRule r;
    r.points.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            const LegendreEval e = legendre_basis(n, x);
            dp = e.deriv[n];
            const double dx = e.value[n] / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const LegendreEval e = legendre_basis(n, x);
        dp = e.deriv[n];
        r.points[n - 1 - i] = x;  // ascending order
        r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace

const QuadratureRule& gauss_rule(int n) {
    if (n < 1) throw std::invalid_argument("gauss_rule: n must be >= 1");
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<QuadratureRule>(compute_gauss(n))).first;
    return *it->second;
}

QuadraturePair quadrature_rules(int k) {
    if (k < 1) throw std::invalid_argument("quadrature_rules: k must be >= 1");
    return {gauss_rule(k + 1), gauss_rule(k)};
}

}  // namespace beamfe
