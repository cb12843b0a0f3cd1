#pragma once

#include <Eigen/Dense>

namespace fsiplate {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Linear Lagrange basis on the reference triangle {(0,0),(1,0),(0,1)},
// ordered by vertex.
struct P1Values {
    Eigen::Vector3d values;
    Eigen::Matrix<double, 3, 2> gradients;
};
P1Values p1_shape_eval(double x, double y);

// Quadratic Lagrange basis on the reference triangle.
// Local order: vertices 0,1,2 then edge midpoints (01), (12), (02).
struct P2Values {
    Vector6d values;
    Eigen::Matrix<double, 6, 2> gradients;
};
P2Values p2_shape_eval(double x, double y);

// Quintic Hermite basis on [0,1], dual to the six functionals
//   p(0), p(1), p(1/3), p(2/3), p'(0), p'(1)
// in that order: basis k has functional k equal to 1 and the others 0.
class HermiteQuinticBasis {
  public:
    HermiteQuinticBasis();

    Vector6d values(double x) const;
    Vector6d first_derivatives(double x) const;
    Vector6d second_derivatives(double x) const;

    // column j holds the monomial coefficients (ascending powers) of basis j
    const Matrix6d& coefficients() const { return coeff_; }

  private:
    Matrix6d coeff_;
};

const HermiteQuinticBasis& hermite_quintic_basis();

struct QuadratureRule {
    Eigen::MatrixXd points;   // one row per point (2 columns on triangles, 1 on segments)
    Eigen::VectorXd weights;  // positive, summing to the reference measure
};

// Symmetric positive rule on the reference triangle, exact for all
// polynomials of total degree <= degree.  Supported degrees: 4..7.
QuadratureRule triangle_quadrature(int degree);

// Gauss-Legendre rule on [0,1], exact to degree 2*points-1.  Supported
// point counts: 6..12.
QuadratureRule segment_quadrature(int points);

}  // namespace fsiplate
