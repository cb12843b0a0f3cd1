#include "fsiplate/elements.hpp"

#include <cmath>
#include <stdexcept>

namespace fsiplate {

P1Values p1_shape_eval(double x, double y) {
    P1Values out;
    out.values << 1.0 - x - y, x, y;
    out.gradients << -1.0, -1.0,
                      1.0,  0.0,
                      0.0,  1.0;
    return out;
}

P2Values p2_shape_eval(double x, double y) {
    const double l0 = 1.0 - x - y;
    const double l1 = x;
    const double l2 = y;
    const Eigen::RowVector2d d0(-1.0, -1.0);
    const Eigen::RowVector2d d1(1.0, 0.0);
    const Eigen::RowVector2d d2(0.0, 1.0);

    P2Values out;
    out.values << l0 * (2.0 * l0 - 1.0),
                  l1 * (2.0 * l1 - 1.0),
                  l2 * (2.0 * l2 - 1.0),
                  4.0 * l0 * l1,
                  4.0 * l1 * l2,
                  4.0 * l0 * l2;
    out.gradients.row(0) = (4.0 * l0 - 1.0) * d0;
    out.gradients.row(1) = (4.0 * l1 - 1.0) * d1;
    out.gradients.row(2) = (4.0 * l2 - 1.0) * d2;
    out.gradients.row(3) = 4.0 * (l1 * d0 + l0 * d1);
    out.gradients.row(4) = 4.0 * (l2 * d1 + l1 * d2);
    out.gradients.row(5) = 4.0 * (l2 * d0 + l0 * d2);
    return out;
}

HermiteQuinticBasis::HermiteQuinticBasis() {
    // Interpolation conditions (rows) against monomials x^k (columns).
    Matrix6d V = Matrix6d::Zero();
    const double nodes[4] = {0.0, 1.0, 1.0 / 3.0, 2.0 / 3.0};
    for (int r = 0; r < 4; ++r) {
        double p = 1.0;
        for (int k = 0; k < 6; ++k) {
            V(r, k) = p;
            p *= nodes[r];
        }
    }
    for (int k = 1; k < 6; ++k) {
        V(4, k) = (k == 1) ? 1.0 : 0.0;       // p'(0)
        V(5, k) = static_cast<double>(k);     // p'(1)
    }
    Eigen::FullPivLU<Matrix6d> lu(V);
    if (!lu.isInvertible())
        throw std::runtime_error("elements: Hermite interpolation system is singular");
    coeff_ = lu.solve(Matrix6d::Identity());
}

Vector6d HermiteQuinticBasis::values(double x) const {
    Vector6d pow;
    double p = 1.0;
    for (int k = 0; k < 6; ++k) {
        pow(k) = p;
        p *= x;
    }
    return coeff_.transpose() * pow;
}

Vector6d HermiteQuinticBasis::first_derivatives(double x) const {
    Vector6d pow = Vector6d::Zero();
    double p = 1.0;
    for (int k = 1; k < 6; ++k) {
        pow(k) = k * p;
        p *= x;
    }
    return coeff_.transpose() * pow;
}

Vector6d HermiteQuinticBasis::second_derivatives(double x) const {
    Vector6d pow = Vector6d::Zero();
    double p = 1.0;
    for (int k = 2; k < 6; ++k) {
        pow(k) = k * (k - 1) * p;
        p *= x;
    }
    return coeff_.transpose() * pow;
}

const HermiteQuinticBasis& hermite_quintic_basis() {
    static const HermiteQuinticBasis basis;
    return basis;
}

namespace {

// Gauss-Legendre on [0,1] via the Golub-Welsch tridiagonal eigenproblem.
void gauss_legendre_01(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("elements: Gauss-Legendre eigensolve failed");
    x = (es.eigenvalues().array() + 1.0) * 0.5;
    w = es.eigenvectors().row(0).array().square();  // weights on [0,1] sum to 1
}

void push_symmetrized(std::vector<Eigen::RowVector2d>& pts, std::vector<double>& wts,
                      double x, double y, double w) {
    // average over the three rotations of the reference triangle
    pts.emplace_back(x, y);
    pts.emplace_back(1.0 - x - y, x);
    pts.emplace_back(y, 1.0 - x - y);
    wts.push_back(w / 3.0);
    wts.push_back(w / 3.0);
    wts.push_back(w / 3.0);
}

QuadratureRule make_rule(const std::vector<Eigen::RowVector2d>& pts, const std::vector<double>& wts) {
    QuadratureRule rule;
    rule.points.resize(static_cast<Eigen::Index>(pts.size()), 2);
    rule.weights.resize(static_cast<Eigen::Index>(wts.size()));
    for (size_t i = 0; i < pts.size(); ++i) {
        rule.points.row(static_cast<Eigen::Index>(i)) = pts[i];
        rule.weights(static_cast<Eigen::Index>(i)) = wts[i];
    }
    return rule;
}

QuadratureRule triangle_orbit_rule_deg4() {
    // two three-point orbits, exact to total degree 4 (weights on area 1/2)
    const double a1 = 0.445948490915965;
    const double w1 = 0.223381589678011 * 0.5;
    const double a2 = 0.091576213509771;
    const double w2 = 0.109951743655322 * 0.5;
    std::vector<Eigen::RowVector2d> pts;
    std::vector<double> wts;
    for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
        pts.emplace_back(a, a);
        pts.emplace_back(1.0 - 2.0 * a, a);
        pts.emplace_back(a, 1.0 - 2.0 * a);
        wts.insert(wts.end(), 3, w);
    }
    return make_rule(pts, wts);
}

QuadratureRule triangle_orbit_rule_deg5() {
    // centroid plus two three-point orbits, exact to total degree 5
    const double s15 = std::sqrt(15.0);
    const double aP = (6.0 + s15) / 21.0;
    const double wP = (155.0 + s15) / 1200.0 * 0.5;
    const double aM = (6.0 - s15) / 21.0;
    const double wM = (155.0 - s15) / 1200.0 * 0.5;
    std::vector<Eigen::RowVector2d> pts;
    std::vector<double> wts;
    pts.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    wts.push_back(9.0 / 40.0 * 0.5);
    for (auto [a, w] : {std::pair{aP, wP}, std::pair{aM, wM}}) {
        pts.emplace_back(a, a);
        pts.emplace_back(1.0 - 2.0 * a, a);
        pts.emplace_back(a, 1.0 - 2.0 * a);
        wts.insert(wts.end(), 3, w);
    }
    return make_rule(pts, wts);
}

// Conical-product rule (Duffy map x = xi, y = eta*(1-xi)) symmetrized over
// the triangle's rotations.  Positive weights, exact to the given degree.
QuadratureRule triangle_product_rule(int degree) {
    const int m_xi = (degree + 3) / 2;   // integrates degree+1 in xi
    const int m_eta = (degree + 2) / 2;  // integrates degree in eta
    Eigen::VectorXd xi, wxi, eta, weta;
    gauss_legendre_01(m_xi, xi, wxi);
    gauss_legendre_01(m_eta, eta, weta);
    std::vector<Eigen::RowVector2d> pts;
    std::vector<double> wts;
    for (int a = 0; a < m_xi; ++a)
        for (int b = 0; b < m_eta; ++b)
            push_symmetrized(pts, wts, xi(a), eta(b) * (1.0 - xi(a)),
                             wxi(a) * weta(b) * (1.0 - xi(a)));
    return make_rule(pts, wts);
}

}  // namespace

QuadratureRule triangle_quadrature(int degree) {
    switch (degree) {
        case 4: return triangle_orbit_rule_deg4();
        case 5: return triangle_orbit_rule_deg5();
        case 6:
        case 7: return triangle_product_rule(degree);
        default:
            throw std::invalid_argument("elements: unsupported triangle quadrature degree " +
                                        std::to_string(degree) + " (supported: 4..7)");
    }
}

QuadratureRule segment_quadrature(int points) {
    if (points < 6 || points > 12)
        throw std::invalid_argument("elements: unsupported segment quadrature point count " +
                                    std::to_string(points) + " (supported: 6..12)");
    Eigen::VectorXd x, w;
    gauss_legendre_01(points, x, w);
    QuadratureRule rule;
    rule.points = x;
    rule.weights = w;
    return rule;
}

}  // namespace fsiplate
