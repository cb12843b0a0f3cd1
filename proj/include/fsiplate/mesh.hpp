#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

namespace fsiplate {

// Boundary classification of a fluid node.  Omega is the moving top edge
// (y = 1, 0 < x < 1); Corner marks the two clamped top corners; S is the
// remaining rigid wall (bottom corners included).
enum class BoundaryTag { Interior, S, Omega, Corner };

const char* to_string(BoundaryTag tag);

// Structured triangulation of the unit square: n x n squares, each split
// along its bottom-left -> top-right diagonal.  P2 nodes are the vertices
// followed by the edge midpoints.
struct Mesh2D {
    int n = 0;
    Eigen::MatrixX2d vertices;     // (n+1)^2 rows, lexicographic by (j,i)
    Eigen::MatrixX3i triangles;    // counterclockwise vertex triples
    Eigen::MatrixX3i triangle_edges;  // edge ids for local edges (01), (12), (02)
    Eigen::MatrixX2i edges;        // canonical (min,max) vertex pairs
    std::vector<BoundaryTag> node_tags;  // one per P2 node

    int vertex_count() const { return static_cast<int>(vertices.rows()); }
    int triangle_count() const { return static_cast<int>(triangles.rows()); }
    int edge_count() const { return static_cast<int>(edges.rows()); }
    int p2_node_count() const { return vertex_count() + edge_count(); }

    // coordinates of a P2 node (vertex or edge midpoint)
    Eigen::Vector2d p2_node(int id) const;
    // global P2 node ids of a triangle in local basis order
    std::array<int, 6> triangle_p2_nodes(int t) const;
};

Mesh2D build_fluid_mesh(int n);

void write_mesh_nodes_csv(const Mesh2D& mesh, std::ostream& out, const std::string& header_extra);
void write_mesh_triangles_csv(const Mesh2D& mesh, std::ostream& out, const std::string& header_extra);

// Uniform partition of [0,1] into `elements` quintic Hermite elements.
// Scalar unknowns: values at the 3*elements+1 Lagrange points (element
// endpoints and interior thirds), then first derivatives at the
// elements+1 endpoints.
struct PlateMesh {
    int elements = 0;
    Eigen::VectorXd lagrange_nodes;  // 3*elements + 1 points
    Eigen::VectorXd hermite_nodes;   // elements + 1 points

    int lagrange_count() const { return static_cast<int>(lagrange_nodes.size()); }
    int dof_count() const { return lagrange_count() + static_cast<int>(hermite_nodes.size()); }

    int value_dof(int lagrange_node) const { return lagrange_node; }
    int derivative_dof(int hermite_node) const { return lagrange_count() + hermite_node; }

    double element_width() const { return 1.0 / elements; }
    double element_left(int e) const { return static_cast<double>(e) / elements; }

    // global dofs of an element, ordered as the local quintic basis:
    // values at (left, right, left+h/3, left+2h/3), slopes at (left, right)
    std::array<int, 6> element_dofs(int e) const;

    // the four dofs removed by the clamped conditions w(0)=w(1)=w'(0)=w'(1)=0
    std::array<int, 4> clamped_dofs() const;
};

PlateMesh build_plate_mesh(int elements);

// evaluate a plate field given its full dof vector (values then slopes)
double evaluate_plate_field(const PlateMesh& plate, const Eigen::VectorXd& dofs, double x);

// dof vector interpolating f (values) and df (slopes)
Eigen::VectorXd interpolate_plate(const PlateMesh& plate,
                                  const std::function<double(double)>& f,
                                  const std::function<double(double)>& df);

constexpr int kConstrained = -1;
constexpr int kInterface = -2;

// One interface fluid node slaved to the plate: the vertical velocity at
// that node equals coefficients . plate_dofs.
struct InterfacePair {
    int fluid_node = 0;
    Eigen::VectorXd coefficients;  // length dof_count(), six nonzeros
};

// Global unknown numbering for the coupled system: interior u1, interior
// u2, unclamped plate displacement, unclamped plate velocity, pressure at
// every vertex, then two scalar multipliers.
struct DofMap {
    std::vector<int> fluid_u1;   // node -> unknown index, or kConstrained
    std::vector<int> fluid_u2;   // node -> unknown index, kConstrained, or kInterface
    std::vector<int> plate_w1;   // plate dof -> unknown index or kConstrained
    std::vector<int> plate_w2;
    std::vector<int> pressure;   // vertex -> unknown index
    std::vector<InterfacePair> interface_pairs;  // ascending fluid node id

    int n_interior = 0;       // interior P2 nodes per velocity component
    int n_plate = 0;          // unclamped plate dofs per plate field
    int pressure_count = 0;

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

DofMap build_dof_map(const Mesh2D& mesh, const PlateMesh& plate);

}  // namespace fsiplate
