#pragma once

#include <Eigen/Dense>

namespace beamfe {

/// Values and derivatives of the Legendre polynomials P_0 .. P_k at xi.
struct LegendreEval {
    Eigen::VectorXd value;
    Eigen::VectorXd deriv;
};

LegendreEval legendre_basis(int k, double xi);

/// Quadrature rule on the reference interval [-1, 1].
struct QuadratureRule {
    Eigen::VectorXd points;
    Eigen::VectorXd weights;
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1.
/// Cached; the reference stays valid for the program lifetime.
const QuadratureRule& gauss_rule(int n);

struct QuadraturePair {
    QuadratureRule full;     // (k+1)-point, exact to degree 2k+1
    QuadratureRule reduced;  // k-point, exact to degree 2k-1
};

/// Integration rules used by an order-k element. The reduced rule applied
/// to the force-strain energy is equivalent to projecting gamma onto
/// polynomials of degree k-1.
QuadraturePair quadrature_rules(int k);

}  // namespace beamfe
