#include "fsiplate/mesh.hpp"

#include "fsiplate/elements.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fsiplate {

const char* to_string(BoundaryTag tag) {
    switch (tag) {
        case BoundaryTag::Interior: return "interior";
        case BoundaryTag::S: return "S";
        case BoundaryTag::Omega: return "Omega";
        case BoundaryTag::Corner: return "corner";
    }
    return "?";
}

Eigen::Vector2d Mesh2D::p2_node(int id) const {
    const int nv = vertex_count();
    if (id < nv) return vertices.row(id);
    const int e = id - nv;
    return 0.5 * (vertices.row(edges(e, 0)) + vertices.row(edges(e, 1)));
}

std::array<int, 6> Mesh2D::triangle_p2_nodes(int t) const {
    const int nv = vertex_count();
    return {triangles(t, 0), triangles(t, 1), triangles(t, 2),
            nv + triangle_edges(t, 0), nv + triangle_edges(t, 1), nv + triangle_edges(t, 2)};
}

namespace {

// tag from integer lattice coordinates scaled to the 2n grid (vertices sit
// at even coordinates, edge midpoints at the sums of their endpoints)
BoundaryTag tag_from_lattice(int ix, int iy, int two_n) {
    const bool on_boundary = ix == 0 || ix == two_n || iy == 0 || iy == two_n;
    if (!on_boundary) return BoundaryTag::Interior;
    if (iy == two_n) {
        if (ix == 0 || ix == two_n) return BoundaryTag::Corner;
        return BoundaryTag::Omega;
    }
    return BoundaryTag::S;
}

}  // namespace

Mesh2D build_fluid_mesh(int n) {
    if (n < 1) throw std::invalid_argument("mesh: subdivision count must be >= 1");

    Mesh2D mesh;
    mesh.n = n;
    const int nv1 = n + 1;
    mesh.vertices.resize(nv1 * nv1, 2);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            mesh.vertices.row(j * nv1 + i) << static_cast<double>(i) / n,
                                              static_cast<double>(j) / n;

    mesh.triangles.resize(2 * n * n, 3);
    int t = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = j * nv1 + i;
            const int v10 = v00 + 1;
            const int v01 = v00 + nv1;
            const int v11 = v01 + 1;
            // split along the bottom-left -> top-right diagonal
            mesh.triangles.row(t++) << v00, v10, v11;
            mesh.triangles.row(t++) << v00, v11, v01;
        }
    }

    std::map<std::pair<int, int>, int> edge_ids;
    std::vector<std::pair<int, int>> edge_list;
    mesh.triangle_edges.resize(mesh.triangles.rows(), 3);
    for (int k = 0; k < mesh.triangles.rows(); ++k) {
        const int v[3] = {mesh.triangles(k, 0), mesh.triangles(k, 1), mesh.triangles(k, 2)};
        const std::pair<int, int> local[3] = {{v[0], v[1]}, {v[1], v[2]}, {v[0], v[2]}};
        for (int l = 0; l < 3; ++l) {
            auto key = std::minmax(local[l].first, local[l].second);
            auto [it, inserted] = edge_ids.try_emplace({key.first, key.second},
                                                       static_cast<int>(edge_list.size()));
            if (inserted) edge_list.push_back({key.first, key.second});
            mesh.triangle_edges(k, l) = it->second;
        }
    }
    mesh.edges.resize(static_cast<Eigen::Index>(edge_list.size()), 2);
    for (size_t e = 0; e < edge_list.size(); ++e)
        mesh.edges.row(static_cast<Eigen::Index>(e)) << edge_list[e].first, edge_list[e].second;

    // tags: vertices then midpoints, via exact lattice arithmetic
    mesh.node_tags.resize(mesh.p2_node_count());
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            mesh.node_tags[j * nv1 + i] = tag_from_lattice(2 * i, 2 * j, 2 * n);
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const int a = mesh.edges(e, 0), b = mesh.edges(e, 1);
        const int ia = a % nv1, ja = a / nv1, ib = b % nv1, jb = b / nv1;
        mesh.node_tags[mesh.vertex_count() + e] = tag_from_lattice(ia + ib, ja + jb, 2 * n);
    }
    return mesh;
}

void write_mesh_nodes_csv(const Mesh2D& mesh, std::ostream& out, const std::string& header_extra) {
    out << "# " << header_extra << "\n";
    out << "node_id,x,y,tag\n";
    char buf[128];
    for (int id = 0; id < mesh.p2_node_count(); ++id) {
        const Eigen::Vector2d p = mesh.p2_node(id);
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%s\n", id, p.x(), p.y(),
                      to_string(mesh.node_tags[id]));
        out << buf;
    }
}

void write_mesh_triangles_csv(const Mesh2D& mesh, std::ostream& out, const std::string& header_extra) {
    out << "# " << header_extra << "\n";
    out << "tri_id,v0,v1,v2\n";
    for (int t = 0; t < mesh.triangle_count(); ++t)
        out << t << ',' << mesh.triangles(t, 0) << ',' << mesh.triangles(t, 1) << ','
            << mesh.triangles(t, 2) << '\n';
}

PlateMesh build_plate_mesh(int elements) {
    if (elements < 1) throw std::invalid_argument("mesh: plate element count must be >= 1");
    PlateMesh plate;
    plate.elements = elements;
    plate.lagrange_nodes.resize(3 * elements + 1);
    for (int k = 0; k <= 3 * elements; ++k)
        plate.lagrange_nodes(k) = static_cast<double>(k) / (3 * elements);
    plate.hermite_nodes.resize(elements + 1);
    for (int k = 0; k <= elements; ++k)
        plate.hermite_nodes(k) = static_cast<double>(k) / elements;
    return plate;
}

std::array<int, 6> PlateMesh::element_dofs(int e) const {
    if (e < 0 || e >= elements) throw std::out_of_range("mesh: plate element index out of range");
    return {value_dof(3 * e), value_dof(3 * e + 3), value_dof(3 * e + 1), value_dof(3 * e + 2),
            derivative_dof(e), derivative_dof(e + 1)};
}

std::array<int, 4> PlateMesh::clamped_dofs() const {
    return {value_dof(0), value_dof(lagrange_count() - 1),
            derivative_dof(0), derivative_dof(elements)};
}

double evaluate_plate_field(const PlateMesh& plate, const Eigen::VectorXd& dofs, double x) {
    if (dofs.size() != plate.dof_count())
        throw std::invalid_argument("mesh: plate dof vector has wrong size");
    const double h = plate.element_width();
    int e = std::min(std::max(static_cast<int>(x / h), 0), plate.elements - 1);
    const double xhat = (x - plate.element_left(e)) / h;
    const Vector6d vals = hermite_quintic_basis().values(xhat);
    const auto edofs = plate.element_dofs(e);
    double out = 0.0;
    for (int l = 0; l < 6; ++l) out += dofs(edofs[l]) * ((l < 4) ? vals(l) : h * vals(l));
    return out;
}

Eigen::VectorXd interpolate_plate(const PlateMesh& plate,
                                  const std::function<double(double)>& f,
                                  const std::function<double(double)>& df) {
    Eigen::VectorXd dofs(plate.dof_count());
    for (int k = 0; k < plate.lagrange_count(); ++k)
        dofs(plate.value_dof(k)) = f(plate.lagrange_nodes(k));
    for (int k = 0; k < static_cast<int>(plate.hermite_nodes.size()); ++k)
        dofs(plate.derivative_dof(k)) = df(plate.hermite_nodes(k));
    return dofs;
}

DofMap build_dof_map(const Mesh2D& mesh, const PlateMesh& plate) {
    DofMap dm;
    const int nn = mesh.p2_node_count();
    dm.fluid_u1.assign(nn, kConstrained);
    dm.fluid_u2.assign(nn, kConstrained);

    int interior = 0;
    for (int id = 0; id < nn; ++id)
        if (mesh.node_tags[id] == BoundaryTag::Interior) ++interior;
    dm.n_interior = interior;

    int next = 0;
    for (int id = 0; id < nn; ++id) {
        if (mesh.node_tags[id] == BoundaryTag::Interior) {
            dm.fluid_u1[id] = next;
            dm.fluid_u2[id] = dm.n_interior + next;
            ++next;
        } else if (mesh.node_tags[id] == BoundaryTag::Omega) {
            dm.fluid_u2[id] = kInterface;
        }
    }

    // plate dofs: clamped entries removed, the rest numbered in dof order
    const int dof_s = plate.dof_count();
    std::vector<bool> clamped(dof_s, false);
    for (int d : plate.clamped_dofs()) clamped[d] = true;
    dm.plate_w1.assign(dof_s, kConstrained);
    dm.plate_w2.assign(dof_s, kConstrained);
    dm.n_plate = dof_s - 4;
    int p = 0;
    for (int d = 0; d < dof_s; ++d) {
        if (clamped[d]) continue;
        dm.plate_w1[d] = dm.offset_w1() + p;
        dm.plate_w2[d] = dm.offset_w2() + p;
        ++p;
    }

    dm.pressure_count = mesh.vertex_count();
    dm.pressure.resize(dm.pressure_count);
    for (int v = 0; v < dm.pressure_count; ++v) dm.pressure[v] = dm.offset_q() + v;

    // slave each top-edge fluid node to the plate through basis evaluation
    const double x_lo = plate.lagrange_nodes(0);
    const double x_hi = plate.lagrange_nodes(plate.lagrange_count() - 1);
    const auto& basis = hermite_quintic_basis();
    const double h = plate.element_width();
    for (int id = 0; id < nn; ++id) {
        if (mesh.node_tags[id] != BoundaryTag::Omega) continue;
        const double x = mesh.p2_node(id).x();
        if (x < x_lo - 1e-12 || x > x_hi + 1e-12)
            throw std::runtime_error("mesh: plate mesh does not cover interface node at x=" +
                                     std::to_string(x));
        int e = std::min(static_cast<int>(x / h), plate.elements - 1);
        const double xhat = (x - plate.element_left(e)) / h;
        const Vector6d vals = basis.values(xhat);
        InterfacePair pair;
        pair.fluid_node = id;
        pair.coefficients = Eigen::VectorXd::Zero(dof_s);
        const auto dofs = plate.element_dofs(e);
        for (int l = 0; l < 6; ++l)
            pair.coefficients(dofs[l]) = (l < 4) ? vals(l) : h * vals(l);  // slope dofs scale by h
        dm.interface_pairs.push_back(std::move(pair));
    }
    return dm;
}

}  // namespace fsiplate
