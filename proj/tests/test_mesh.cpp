#include "fsiplate/mesh.hpp"

#include "doctest.h"

#include <set>
#include <sstream>

using namespace fsiplate;

TEST_SUITE("mesh") {

TEST_CASE("fluid mesh counts follow the structured pattern") {
    for (int n = 1; n <= 5; ++n) {
        const Mesh2D mesh = build_fluid_mesh(n);
        CHECK(mesh.vertex_count() == (n + 1) * (n + 1));
        CHECK(mesh.triangle_count() == 2 * n * n);
        CHECK(mesh.edge_count() == 3 * n * n + 2 * n);
        CHECK(mesh.p2_node_count() == (n + 1) * (n + 1) + 3 * n * n + 2 * n);
    }
    CHECK_THROWS_AS(build_fluid_mesh(0), std::invalid_argument);
}

TEST_CASE("triangles are counterclockwise and tile the unit square") {
    for (int n : {1, 2, 4}) {
        const Mesh2D mesh = build_fluid_mesh(n);
        double total = 0.0;
        for (int t = 0; t < mesh.triangle_count(); ++t) {
            const Eigen::Vector2d a = mesh.vertices.row(mesh.triangles(t, 0));
            const Eigen::Vector2d b = mesh.vertices.row(mesh.triangles(t, 1));
            const Eigen::Vector2d c = mesh.vertices.row(mesh.triangles(t, 2));
            const double twice_area =
                (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
            CHECK(twice_area > 0.0);
            CHECK(twice_area == doctest::Approx(1.0 / (n * n)).epsilon(1e-14));
            total += 0.5 * twice_area;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("triangle edge ids point back to the endpoint pairs") {
    const Mesh2D mesh = build_fluid_mesh(3);
    const int local_pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};
    for (int t = 0; t < mesh.triangle_count(); ++t)
        for (int le = 0; le < 3; ++le) {
            const int e = mesh.triangle_edges(t, le);
            const int a = mesh.triangles(t, local_pairs[le][0]);
            const int b = mesh.triangles(t, local_pairs[le][1]);
            CHECK(mesh.edges(e, 0) == std::min(a, b));
            CHECK(mesh.edges(e, 1) == std::max(a, b));
        }
}

TEST_CASE("p2 midpoint nodes sit at edge midpoints") {
    const Mesh2D mesh = build_fluid_mesh(3);
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const Eigen::Vector2d mid = mesh.p2_node(mesh.vertex_count() + e);
        const Eigen::Vector2d expect =
            0.5 * (mesh.vertices.row(mesh.edges(e, 0)) + mesh.vertices.row(mesh.edges(e, 1)));
        CHECK((mid - expect).norm() < 1e-15);
    }
}

TEST_CASE("boundary tags partition the nodes as the geometry dictates") {
    for (int n : {2, 3, 5}) {
        const Mesh2D mesh = build_fluid_mesh(n);
        int interior = 0, wall = 0, omega = 0, corner = 0;
        for (int id = 0; id < mesh.p2_node_count(); ++id) {
            const Eigen::Vector2d x = mesh.p2_node(id);
            const BoundaryTag tag = mesh.node_tags[id];
            if (tag == BoundaryTag::Interior) ++interior;
            if (tag == BoundaryTag::S) ++wall;
            if (tag == BoundaryTag::Omega) ++omega;
            if (tag == BoundaryTag::Corner) ++corner;
            const bool on_boundary = x.x() < 1e-14 || x.x() > 1 - 1e-14 || x.y() < 1e-14 ||
                                     x.y() > 1 - 1e-14;
            if (!on_boundary) {
                CHECK(tag == BoundaryTag::Interior);
            } else if (x.y() > 1 - 1e-14 && x.x() > 1e-14 && x.x() < 1 - 1e-14) {
                CHECK(tag == BoundaryTag::Omega);
            } else if (x.y() > 1 - 1e-14) {
                CHECK(tag == BoundaryTag::Corner);
            } else {
                CHECK(tag == BoundaryTag::S);
            }
        }
        CHECK(interior == (2 * n - 1) * (2 * n - 1));
        CHECK(omega == 2 * n - 1);
        CHECK(corner == 2);
        CHECK(wall == 6 * n - 1);
    }
}

TEST_CASE("tag names are stable") {
    CHECK(std::string(to_string(BoundaryTag::Interior)) == "interior");
    CHECK(std::string(to_string(BoundaryTag::Omega)) == "Omega");
    CHECK(std::string(to_string(BoundaryTag::S)) == "S");
}

TEST_CASE("mesh csv writers emit one line per entity") {
    const Mesh2D mesh = build_fluid_mesh(2);
    std::ostringstream nodes, tris;
    write_mesh_nodes_csv(mesh, nodes, "extra");
    write_mesh_triangles_csv(mesh, tris, "extra");
    auto count_lines = [](const std::string& text) {
        int count = 0;
        for (char c : text)
            if (c == '\n') ++count;
        return count;
    };
    // header comment + column row + data
    CHECK(count_lines(nodes.str()) == 2 + mesh.p2_node_count());
    CHECK(count_lines(tris.str()) == 2 + mesh.triangle_count());
    CHECK(nodes.str().rfind("# extra", 0) == 0);
}

TEST_CASE("plate dof count is 4L+2 for L in 1..10") {
    for (int L = 1; L <= 10; ++L) {
        const PlateMesh plate = build_plate_mesh(L);
        const int m_tilde = plate.lagrange_count();
        CHECK(m_tilde == 3 * L + 1);
        CHECK(plate.dof_count() == m_tilde + (m_tilde + 2) / 3);
        CHECK(plate.dof_count() == 4 * L + 2);
    }
    CHECK_THROWS_AS(build_plate_mesh(0), std::invalid_argument);
}

TEST_CASE("plate element dofs follow the local quintic order") {
    const PlateMesh plate = build_plate_mesh(4);
    const int m = plate.lagrange_count();  // 13
    const auto d0 = plate.element_dofs(0);
    CHECK(d0 == std::array<int, 6>{0, 3, 1, 2, m, m + 1});
    const auto d3 = plate.element_dofs(3);
    CHECK(d3 == std::array<int, 6>{9, 12, 10, 11, m + 3, m + 4});
    const auto clamped = plate.clamped_dofs();
    CHECK(clamped == std::array<int, 4>{0, 12, 13, 17});
}

TEST_CASE("plate interpolation is exact for quintic polynomials") {
    const PlateMesh plate = build_plate_mesh(3);
    auto f = [](double x) { return x * x * x * x * x - 2.0 * x * x * x + x; };
    auto df = [](double x) { return 5.0 * x * x * x * x - 6.0 * x * x + 1.0; };
    const Eigen::VectorXd dofs = interpolate_plate(plate, f, df);
    for (int k = 0; k <= 100; ++k) {
        const double x = k / 100.0;
        CHECK(evaluate_plate_field(plate, dofs, x) == doctest::Approx(f(x)).epsilon(1e-12));
    }
}

TEST_CASE("plate field is continuous across element boundaries") {
    const PlateMesh plate = build_plate_mesh(5);
    Eigen::VectorXd dofs = Eigen::VectorXd::Zero(plate.dof_count());
    for (int i = 0; i < dofs.size(); ++i) dofs(i) = std::sin(3.7 * i + 0.4);
    for (int e = 1; e < plate.elements; ++e) {
        const double x = plate.element_left(e);
        const double left = evaluate_plate_field(plate, dofs, x - 1e-13);
        const double right = evaluate_plate_field(plate, dofs, x + 1e-13);
        CHECK(left == doctest::Approx(right).epsilon(1e-9));
    }
}

TEST_CASE("dof map separates interior, wall, and interface unknowns") {
    const int n = 3;
    const Mesh2D mesh = build_fluid_mesh(n);
    const PlateMesh plate = build_plate_mesh(n);
    const DofMap dofs = build_dof_map(mesh, plate);

    CHECK(dofs.n_interior == (2 * n - 1) * (2 * n - 1));
    CHECK(dofs.n_plate == plate.dof_count() - 4);
    CHECK(dofs.pressure_count == (n + 1) * (n + 1));
    CHECK(dofs.system_size() ==
          2 * dofs.n_interior + 2 * dofs.n_plate + dofs.pressure_count + 2);
    CHECK(static_cast<int>(dofs.interface_pairs.size()) == 2 * n - 1);

    std::set<int> seen_u1, seen_u2;
    for (int id = 0; id < mesh.p2_node_count(); ++id) {
        const BoundaryTag tag = mesh.node_tags[id];
        if (tag == BoundaryTag::Interior) {
            CHECK(dofs.fluid_u1[id] >= 0);
            CHECK(dofs.fluid_u2[id] == dofs.fluid_u1[id] + dofs.n_interior);
            seen_u1.insert(dofs.fluid_u1[id]);
            seen_u2.insert(dofs.fluid_u2[id]);
        } else if (tag == BoundaryTag::Omega) {
            CHECK(dofs.fluid_u1[id] == kConstrained);
            CHECK(dofs.fluid_u2[id] == kInterface);
        } else {
            CHECK(dofs.fluid_u1[id] == kConstrained);
            CHECK(dofs.fluid_u2[id] == kConstrained);
        }
    }
    CHECK(static_cast<int>(seen_u1.size()) == dofs.n_interior);
    CHECK(*seen_u1.begin() == 0);
    CHECK(*seen_u1.rbegin() == dofs.n_interior - 1);
    CHECK(*seen_u2.begin() == dofs.n_interior);

    // every pressure vertex is numbered
    std::set<int> seen_p(dofs.pressure.begin(), dofs.pressure.end());
    CHECK(static_cast<int>(seen_p.size()) == dofs.pressure_count);
}

TEST_CASE("interface rows evaluate the plate trace exactly") {
    const Mesh2D mesh = build_fluid_mesh(4);
    const PlateMesh plate = build_plate_mesh(2);  // plate elements independent of the grid
    const DofMap dofs = build_dof_map(mesh, plate);
    auto f = [](double x) { return x * x * (1 - x) * (1 - x) * (0.3 + x); };
    auto df = [](double x) {
        return 2 * x * (1 - x) * (1 - x) * (0.3 + x) - 2 * x * x * (1 - x) * (0.3 + x) +
               x * x * (1 - x) * (1 - x);
    };
    const Eigen::VectorXd w = interpolate_plate(plate, f, df);
    for (const InterfacePair& pair : dofs.interface_pairs) {
        const double x = mesh.p2_node(pair.fluid_node).x();
        CHECK(pair.coefficients.size() == plate.dof_count());
        CHECK(pair.coefficients.dot(w) == doctest::Approx(f(x)).epsilon(1e-12));
    }
}

}  // TEST_SUITE
