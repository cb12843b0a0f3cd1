#pragma once

#include "fsiplate/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <iosfwd>
#include <string>

namespace fsiplate {

using SpMat = Eigen::SparseMatrix<double>;
using Matrix63d = Eigen::Matrix<double, 6, 3>;

// --- element-level matrices -------------------------------------------------

// affine geometry of one triangle, from its vertex coordinates
struct TriangleGeometry {
    Eigen::Matrix2d jacobian;
    Eigen::Matrix2d inv_transpose;
    double det = 0.0;
};
TriangleGeometry triangle_geometry(const Eigen::Matrix<double, 3, 2>& coords);

Eigen::Matrix<double, 6, 6> p2_element_mass(const TriangleGeometry& g);
Eigen::Matrix<double, 6, 6> p2_element_stiffness(const TriangleGeometry& g);
// (d phi_i / d component, psi_j) on the element; component is 0 or 1
Matrix63d divergence_element(const TriangleGeometry& g, int component);
Eigen::Vector3d p1_element_load(const TriangleGeometry& g);  // integrals of psi_j

// quintic Hermite element matrices on an element of width h, in local dof
// order (slope dofs carry the physical scaling by h)
Eigen::Matrix<double, 6, 6> hermite_element_mass(double h);
Eigen::Matrix<double, 6, 6> hermite_element_stiffness(double h);  // second derivatives
Eigen::Matrix<double, 6, 1> hermite_element_load(double h);       // integrals of theta_j

// --- global matrices ----------------------------------------------------------

SpMat assemble_fluid_mass(const Mesh2D& mesh);        // (phi_i, phi_j), M x M
SpMat assemble_fluid_stiffness(const Mesh2D& mesh);   // (grad phi_i, grad phi_j)
// (d phi_i / dx, psi_j) and (d phi_i / dy, psi_j), M x M_p
std::pair<SpMat, SpMat> assemble_divergence(const Mesh2D& mesh);
Eigen::VectorXd assemble_pressure_mean(const Mesh2D& mesh);  // integrals of psi_j

SpMat assemble_plate_mass(const PlateMesh& plate);       // <theta_i, theta_j>
SpMat assemble_plate_stiffness(const PlateMesh& plate);  // <theta_i'', theta_j''>

// interface evaluation rows and the plate load row
struct CouplingMap {
    SpMat T;                    // one row per interface node, dof_count columns
    Eigen::RowVectorXd Es;      // integrals of the plate basis functions
};
CouplingMap assemble_coupling(const Mesh2D& mesh, const PlateMesh& plate, const DofMap& dofs);

struct AssembledMatrices {
    SpMat Mf, Kf, Bx, By;       // fluid blocks
    SpMat Ms, S;                // plate blocks
    Eigen::VectorXd mq;         // pressure means
    CouplingMap coupling;
};
AssembledMatrices assemble_all(const Mesh2D& mesh, const PlateMesh& plate, const DofMap& dofs);

// --- constrained (reduced) system --------------------------------------------

// Everything the coupled solvers need, on the reduced unknowns
//   x = (a1, a2, w1, w2):  u1 = P a1,  u2 = P a2 + W w2,  w = R w1 / R w2.
// Boundary conditions and the interface slaving are eliminated; the
// vertical velocity on the moving edge is carried by the plate unknowns.
struct ReducedBlocks {
    int n_interior = 0;
    int n_plate = 0;
    int pressure_count = 0;

    SpMat P;   // fluid expansion, M x n_interior
    SpMat W;   // interface expansion, M x n_plate
    SpMat R;   // plate expansion, dof_count x n_plate

    SpMat Ma, Ka;          // interior fluid mass / stiffness
    SpMat Maw, Kaw;        // interior x interface couplings
    Eigen::MatrixXd Mww, Kww;  // interface x interface
    Eigen::MatrixXd Ms_r, S_r; // plate mass / bending on unclamped dofs
    SpMat Bx_i, By_i;      // interior divergence blocks, n_interior x M_p
    Eigen::MatrixXd Bw;    // interface divergence block, n_plate x M_p
    Eigen::RowVectorXd Es_r;   // plate load row on unclamped dofs
    Eigen::VectorXd mq;        // pressure means

    int state_size() const { return 2 * n_interior + 2 * n_plate; }
    int system_size() const { return state_size() + pressure_count + 2; }

    int offset_u1() const { return 0; }
    int offset_u2() const { return n_interior; }
    int offset_w1() const { return 2 * n_interior; }
    int offset_w2() const { return 2 * n_interior + n_plate; }
    int offset_q() const { return state_size(); }
    int offset_c_tilde() const { return state_size() + pressure_count; }
    int offset_mu() const { return state_size() + pressure_count + 1; }
};

ReducedBlocks apply_constraints(const AssembledMatrices& mats, const DofMap& dofs);

// Ms (Ms^{-1} S)^p via the generalized eigendecomposition S v = lambda Ms v,
// V^T Ms V = I: returns Ms V diag(lambda^p) V^T Ms.  Power 1 reproduces S.
Eigen::MatrixXd plate_spectral_power(const Eigen::MatrixXd& S_r, const Eigen::MatrixXd& Ms_r,
                                     double p);

// damping block of the damped plate: power eta/2 of the bending pencil
Eigen::MatrixXd plate_fractional_damping(const Eigen::MatrixXd& S_r, const Eigen::MatrixXd& Ms_r,
                                         double eta);

// coordinate-format dump: one "row col value" line per stored entry
void write_coordinate_file(const Eigen::MatrixXd& A, std::ostream& out,
                           const std::string& header_extra);

}  // namespace fsiplate
