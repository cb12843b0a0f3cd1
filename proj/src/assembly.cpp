#include "fsiplate/assembly.hpp"

#include "fsiplate/elements.hpp"

#include <ostream>
#include <stdexcept>
#include <vector>

namespace fsiplate {

namespace {

constexpr int kTriangleDegree = 4;   // exact for every P2 x P2 product on affine elements
constexpr int kSegmentPoints = 6;    // exact to degree 11, covers quintic products

Eigen::Matrix<double, 3, 2> triangle_coords(const Mesh2D& mesh, int t) {
    Eigen::Matrix<double, 3, 2> coords;
    for (int l = 0; l < 3; ++l) coords.row(l) = mesh.vertices.row(mesh.triangles(t, l));
    return coords;
}

void add_block(std::vector<Eigen::Triplet<double>>& trips, const Eigen::MatrixXd& B,
               int row0, int col0, double scale = 1.0) {
    for (int i = 0; i < B.rows(); ++i)
        for (int j = 0; j < B.cols(); ++j)
            if (B(i, j) != 0.0) trips.emplace_back(row0 + i, col0 + j, scale * B(i, j));
}

}  // namespace

TriangleGeometry triangle_geometry(const Eigen::Matrix<double, 3, 2>& coords) {
    TriangleGeometry g;
    g.jacobian.col(0) = (coords.row(1) - coords.row(0)).transpose();
    g.jacobian.col(1) = (coords.row(2) - coords.row(0)).transpose();
    g.det = g.jacobian.determinant();
    if (g.det <= 0.0) throw std::invalid_argument("assembly: triangle is degenerate or inverted");
    g.inv_transpose = g.jacobian.inverse().transpose();
    return g;
}

Eigen::Matrix<double, 6, 6> p2_element_mass(const TriangleGeometry& g) {
    const QuadratureRule rule = triangle_quadrature(kTriangleDegree);
    Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
    for (int q = 0; q < rule.weights.size(); ++q) {
        const P2Values sh = p2_shape_eval(rule.points(q, 0), rule.points(q, 1));
        A += (g.det * rule.weights(q)) * (sh.values * sh.values.transpose());
    }
    return A;
}

Eigen::Matrix<double, 6, 6> p2_element_stiffness(const TriangleGeometry& g) {
    const QuadratureRule rule = triangle_quadrature(kTriangleDegree);
    Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
    for (int q = 0; q < rule.weights.size(); ++q) {
        const P2Values sh = p2_shape_eval(rule.points(q, 0), rule.points(q, 1));
        const Eigen::Matrix<double, 6, 2> grad = sh.gradients * g.inv_transpose.transpose();
        A += (g.det * rule.weights(q)) * (grad * grad.transpose());
    }
    return A;
}

Matrix63d divergence_element(const TriangleGeometry& g, int component) {
    if (component < 0 || component > 1)
        throw std::invalid_argument("assembly: divergence component must be 0 or 1");
    const QuadratureRule rule = triangle_quadrature(kTriangleDegree);
    Matrix63d A = Matrix63d::Zero();
    for (int q = 0; q < rule.weights.size(); ++q) {
        const P2Values sh = p2_shape_eval(rule.points(q, 0), rule.points(q, 1));
        const P1Values p1 = p1_shape_eval(rule.points(q, 0), rule.points(q, 1));
        const Eigen::Matrix<double, 6, 2> grad = sh.gradients * g.inv_transpose.transpose();
        A += (g.det * rule.weights(q)) * (grad.col(component) * p1.values.transpose());
    }
    return A;
}

Eigen::Vector3d p1_element_load(const TriangleGeometry& g) {
    const QuadratureRule rule = triangle_quadrature(kTriangleDegree);
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    for (int q = 0; q < rule.weights.size(); ++q)
        v += (g.det * rule.weights(q)) *
             p1_shape_eval(rule.points(q, 0), rule.points(q, 1)).values;
    return v;
}

namespace {

// local dof scalings on an element of width h: slope dofs represent the
// physical derivative, so their basis functions pick up a factor h
Eigen::Matrix<double, 6, 1> hermite_dof_scales(double h) {
    Eigen::Matrix<double, 6, 1> s;
    s << 1.0, 1.0, 1.0, 1.0, h, h;
    return s;
}

}  // namespace

Eigen::Matrix<double, 6, 6> hermite_element_mass(double h) {
    if (h <= 0.0) throw std::invalid_argument("assembly: element width must be positive");
    const auto& basis = hermite_quintic_basis();
    const QuadratureRule rule = segment_quadrature(kSegmentPoints);
    Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
    for (int q = 0; q < rule.weights.size(); ++q) {
        const Vector6d v = basis.values(rule.points(q, 0));
        A += (h * rule.weights(q)) * (v * v.transpose());
    }
    const auto s = hermite_dof_scales(h);
    return s.asDiagonal() * A * s.asDiagonal();
}

Eigen::Matrix<double, 6, 6> hermite_element_stiffness(double h) {
    if (h <= 0.0) throw std::invalid_argument("assembly: element width must be positive");
    const auto& basis = hermite_quintic_basis();
    const QuadratureRule rule = segment_quadrature(kSegmentPoints);
    Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
    // theta'' in physical coordinates carries 1/h^2
    for (int q = 0; q < rule.weights.size(); ++q) {
        const Vector6d v = basis.second_derivatives(rule.points(q, 0));
        A += (rule.weights(q) / (h * h * h)) * (v * v.transpose());
    }
    const auto s = hermite_dof_scales(h);
    return s.asDiagonal() * A * s.asDiagonal();
}

Eigen::Matrix<double, 6, 1> hermite_element_load(double h) {
    if (h <= 0.0) throw std::invalid_argument("assembly: element width must be positive");
    const auto& basis = hermite_quintic_basis();
    const QuadratureRule rule = segment_quadrature(kSegmentPoints);
    Vector6d v = Vector6d::Zero();
    for (int q = 0; q < rule.weights.size(); ++q)
        v += (h * rule.weights(q)) * basis.values(rule.points(q, 0));
    return hermite_dof_scales(h).asDiagonal() * v;
}

SpMat assemble_fluid_mass(const Mesh2D& mesh) {
    std::vector<Eigen::Triplet<double>> trips;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto g = triangle_geometry(triangle_coords(mesh, t));
        const Eigen::Matrix<double, 6, 6> A = p2_element_mass(g);
        const auto nodes = mesh.triangle_p2_nodes(t);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) trips.emplace_back(nodes[i], nodes[j], A(i, j));
    }
    SpMat M(mesh.p2_node_count(), mesh.p2_node_count());
    M.setFromTriplets(trips.begin(), trips.end());
    M.makeCompressed();
    return M;
}

SpMat assemble_fluid_stiffness(const Mesh2D& mesh) {
    std::vector<Eigen::Triplet<double>> trips;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto g = triangle_geometry(triangle_coords(mesh, t));
        const Eigen::Matrix<double, 6, 6> A = p2_element_stiffness(g);
        const auto nodes = mesh.triangle_p2_nodes(t);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) trips.emplace_back(nodes[i], nodes[j], A(i, j));
    }
    SpMat K(mesh.p2_node_count(), mesh.p2_node_count());
    K.setFromTriplets(trips.begin(), trips.end());
    K.makeCompressed();
    return K;
}

std::pair<SpMat, SpMat> assemble_divergence(const Mesh2D& mesh) {
    std::vector<Eigen::Triplet<double>> tx, ty;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto g = triangle_geometry(triangle_coords(mesh, t));
        const Matrix63d Ax = divergence_element(g, 0);
        const Matrix63d Ay = divergence_element(g, 1);
        const auto nodes = mesh.triangle_p2_nodes(t);
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 3; ++j) {
                tx.emplace_back(nodes[i], mesh.triangles(t, j), Ax(i, j));
                ty.emplace_back(nodes[i], mesh.triangles(t, j), Ay(i, j));
            }
        }
    }
    SpMat Bx(mesh.p2_node_count(), mesh.vertex_count());
    SpMat By(mesh.p2_node_count(), mesh.vertex_count());
    Bx.setFromTriplets(tx.begin(), tx.end());
    By.setFromTriplets(ty.begin(), ty.end());
    Bx.makeCompressed();
    By.makeCompressed();
    return {Bx, By};
}

Eigen::VectorXd assemble_pressure_mean(const Mesh2D& mesh) {
    Eigen::VectorXd mq = Eigen::VectorXd::Zero(mesh.vertex_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto g = triangle_geometry(triangle_coords(mesh, t));
        const Eigen::Vector3d v = p1_element_load(g);
        for (int j = 0; j < 3; ++j) mq(mesh.triangles(t, j)) += v(j);
    }
    return mq;
}

SpMat assemble_plate_mass(const PlateMesh& plate) {
    std::vector<Eigen::Triplet<double>> trips;
    const Eigen::Matrix<double, 6, 6> A = hermite_element_mass(plate.element_width());
    for (int e = 0; e < plate.elements; ++e) {
        const auto dofs = plate.element_dofs(e);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) trips.emplace_back(dofs[i], dofs[j], A(i, j));
    }
    SpMat M(plate.dof_count(), plate.dof_count());
    M.setFromTriplets(trips.begin(), trips.end());
    M.makeCompressed();
    return M;
}

SpMat assemble_plate_stiffness(const PlateMesh& plate) {
    std::vector<Eigen::Triplet<double>> trips;
    const Eigen::Matrix<double, 6, 6> A = hermite_element_stiffness(plate.element_width());
    for (int e = 0; e < plate.elements; ++e) {
        const auto dofs = plate.element_dofs(e);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) trips.emplace_back(dofs[i], dofs[j], A(i, j));
    }
    SpMat S(plate.dof_count(), plate.dof_count());
    S.setFromTriplets(trips.begin(), trips.end());
    S.makeCompressed();
    return S;
}

CouplingMap assemble_coupling(const Mesh2D& mesh, const PlateMesh& plate, const DofMap& dofs) {
    CouplingMap cm;
    std::vector<Eigen::Triplet<double>> trips;
    for (size_t r = 0; r < dofs.interface_pairs.size(); ++r) {
        const auto& pair = dofs.interface_pairs[r];
        for (int d = 0; d < pair.coefficients.size(); ++d)
            if (pair.coefficients(d) != 0.0)
                trips.emplace_back(static_cast<int>(r), d, pair.coefficients(d));
    }
    cm.T.resize(static_cast<int>(dofs.interface_pairs.size()), plate.dof_count());
    cm.T.setFromTriplets(trips.begin(), trips.end());
    cm.T.makeCompressed();

    cm.Es = Eigen::RowVectorXd::Zero(plate.dof_count());
    const Eigen::Matrix<double, 6, 1> load = hermite_element_load(plate.element_width());
    for (int e = 0; e < plate.elements; ++e) {
        const auto edofs = plate.element_dofs(e);
        for (int l = 0; l < 6; ++l) cm.Es(edofs[l]) += load(l);
    }
    (void)mesh;
    return cm;
}

AssembledMatrices assemble_all(const Mesh2D& mesh, const PlateMesh& plate, const DofMap& dofs) {
    AssembledMatrices out;
    out.Mf = assemble_fluid_mass(mesh);
    out.Kf = assemble_fluid_stiffness(mesh);
    std::tie(out.Bx, out.By) = assemble_divergence(mesh);
    out.mq = assemble_pressure_mean(mesh);
    out.Ms = assemble_plate_mass(plate);
    out.S = assemble_plate_stiffness(plate);
    out.coupling = assemble_coupling(mesh, plate, dofs);
    return out;
}

ReducedBlocks apply_constraints(const AssembledMatrices& mats, const DofMap& dofs) {
    const int M = static_cast<int>(mats.Mf.rows());
    const int dof_s = static_cast<int>(mats.Ms.rows());
    if (mats.Kf.rows() != M || mats.Bx.rows() != M || mats.By.rows() != M ||
        static_cast<int>(dofs.fluid_u1.size()) != M || mats.S.rows() != dof_s ||
        static_cast<int>(dofs.plate_w1.size()) != dof_s ||
        mats.Bx.cols() != static_cast<int>(dofs.pressure.size()) ||
        mats.coupling.T.cols() != dof_s)
        throw std::logic_error("assembly: dimension mismatch between matrices and dof map");

    ReducedBlocks rb;
    rb.n_interior = dofs.n_interior;
    rb.n_plate = dofs.n_plate;
    rb.pressure_count = dofs.pressure_count;

    // interior selection P and plate selection R
    std::vector<Eigen::Triplet<double>> tp, tr, tw;
    for (int id = 0; id < M; ++id)
        if (dofs.fluid_u1[id] != kConstrained) tp.emplace_back(id, dofs.fluid_u1[id], 1.0);
    rb.P.resize(M, rb.n_interior);
    rb.P.setFromTriplets(tp.begin(), tp.end());

    for (int d = 0; d < dof_s; ++d)
        if (dofs.plate_w1[d] != kConstrained)
            tr.emplace_back(d, dofs.plate_w1[d] - dofs.offset_w1(), 1.0);
    rb.R.resize(dof_s, rb.n_plate);
    rb.R.setFromTriplets(tr.begin(), tr.end());

    // interface expansion W: rows of T on the unclamped plate columns
    for (const auto& pair : dofs.interface_pairs)
        for (int d = 0; d < dof_s; ++d)
            if (pair.coefficients(d) != 0.0 && dofs.plate_w1[d] != kConstrained)
                tw.emplace_back(pair.fluid_node, dofs.plate_w1[d] - dofs.offset_w1(),
                                pair.coefficients(d));
    rb.W.resize(M, rb.n_plate);
    rb.W.setFromTriplets(tw.begin(), tw.end());
    rb.P.makeCompressed();
    rb.R.makeCompressed();
    rb.W.makeCompressed();

    const SpMat Pt = rb.P.transpose();
    const SpMat Wt = rb.W.transpose();
    rb.Ma = (Pt * mats.Mf * rb.P).pruned();
    rb.Ka = (Pt * mats.Kf * rb.P).pruned();
    rb.Maw = (Pt * mats.Mf * rb.W).pruned();
    rb.Kaw = (Pt * mats.Kf * rb.W).pruned();
    rb.Mww = Eigen::MatrixXd(Wt * mats.Mf * rb.W);
    rb.Kww = Eigen::MatrixXd(Wt * mats.Kf * rb.W);
    rb.Ms_r = Eigen::MatrixXd(SpMat(rb.R.transpose() * mats.Ms * rb.R));
    rb.S_r = Eigen::MatrixXd(SpMat(rb.R.transpose() * mats.S * rb.R));
    rb.Bx_i = (Pt * mats.Bx).pruned();
    rb.By_i = (Pt * mats.By).pruned();
    rb.Bw = Eigen::MatrixXd(Wt * mats.By);
    rb.Es_r = mats.coupling.Es * rb.R;
    rb.mq = mats.mq;

    rb.Ma.makeCompressed();
    rb.Ka.makeCompressed();
    rb.Maw.makeCompressed();
    rb.Kaw.makeCompressed();
    rb.Bx_i.makeCompressed();
    rb.By_i.makeCompressed();
    return rb;
}

Eigen::MatrixXd plate_spectral_power(const Eigen::MatrixXd& S_r, const Eigen::MatrixXd& Ms_r,
                                     double p) {
    if (S_r.rows() != S_r.cols() || Ms_r.rows() != Ms_r.cols() || S_r.rows() != Ms_r.rows())
        throw std::invalid_argument("assembly: spectral power needs square matrices of equal size");
    Eigen::LLT<Eigen::MatrixXd> mass_llt(Ms_r);
    if (mass_llt.info() != Eigen::Success)
        throw std::runtime_error("assembly: plate mass matrix is not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S_r, Ms_r);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("assembly: generalized eigensolve of the plate pencil failed");
    const Eigen::VectorXd lam = es.eigenvalues();
    if (!lam.allFinite() || lam.minCoeff() <= 0.0)
        throw std::runtime_error("assembly: plate pencil is not positive definite");
    const Eigen::MatrixXd V = es.eigenvectors();  // V^T Ms V = I
    const Eigen::MatrixXd MsV = Ms_r * V;
    return MsV * lam.array().pow(p).matrix().asDiagonal() * MsV.transpose();
}

Eigen::MatrixXd plate_fractional_damping(const Eigen::MatrixXd& S_r, const Eigen::MatrixXd& Ms_r,
                                         double eta) {
    return plate_spectral_power(S_r, Ms_r, 0.5 * eta);
}

void write_coordinate_file(const Eigen::MatrixXd& A, std::ostream& out,
                           const std::string& header_extra) {
    out << "# row col value " << header_extra << "\n";
    char buf[96];
    for (int i = 0; i < A.rows(); ++i) {
        for (int j = 0; j < A.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i, j, A(i, j));
            out << buf;
        }
    }
}

}  // namespace fsiplate
