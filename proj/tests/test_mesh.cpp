#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "nkcert/error.hpp"
#include "nkcert/mesh.hpp"

using namespace nkcert;

TEST(Mesh, SmallestMeshCounts) {
    const Mesh m = Mesh::build_uniform(1);
    EXPECT_EQ(m.num_vertices(), 4u);
    EXPECT_EQ(m.num_triangles(), 2u);
    EXPECT_EQ(m.num_faces(), 5u);
    for (std::size_t t = 0; t < 2; ++t) EXPECT_NEAR(m.geometry(t).diameter, std::sqrt(2.0), 1e-15);
    EXPECT_TRUE(m.free_vertices().empty());
}

TEST(Mesh, TwoByTwoCountsMatchEuler) {
    const Mesh m = Mesh::build_uniform(2);
    EXPECT_EQ(m.num_vertices(), 9u);
    EXPECT_EQ(m.num_triangles(), 8u);
    EXPECT_EQ(m.num_faces(), 16u);
    EXPECT_EQ(static_cast<long>(m.num_vertices()) - static_cast<long>(m.num_faces()) +
                  static_cast<long>(m.num_triangles()),
              1);
    ASSERT_EQ(m.free_vertices().size(), 1u);
    EXPECT_EQ(m.vertex(m.free_vertices()[0]), Point(0.5, 0.5));
}

TEST(Mesh, DiameterAtSixteen) {
    const Mesh m = Mesh::build_uniform(16);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) EXPECT_NEAR(m.geometry(t).diameter, 8.838835e-02, 5e-9);
}

TEST(Mesh, RejectsNonPositive) {
    EXPECT_THROW(Mesh::build_uniform(0), Error);
    EXPECT_THROW(Mesh::build_uniform(-3), Error);
}

TEST(Mesh, AreasSumToOneAndOrientationIsPositive) {
    for (int N : {1, 3, 8, 17}) {
        const Mesh m = Mesh::build_uniform(N);
        double total = 0.0;
        for (std::size_t t = 0; t < m.num_triangles(); ++t) {
            const auto& tri = m.triangle(t);
            const Point e1 = m.vertex(tri[1]) - m.vertex(tri[0]);
            const Point e2 = m.vertex(tri[2]) - m.vertex(tri[0]);
            const double signed_area = 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
            EXPECT_GT(signed_area, 0.0);
            EXPECT_NEAR(signed_area, m.geometry(t).area, 1e-15);
            total += m.geometry(t).area;
        }
        EXPECT_NEAR(total, 1.0, 1e-13);
        EXPECT_EQ(m.num_faces(), 3u * N * N + 2u * N);
    }
}

TEST(Mesh, DiagonalFaceOfSingleCell) {
    const Mesh m = Mesh::build_uniform(1);
    int found = 0;
    for (std::size_t f = 0; f < m.num_faces(); ++f) {
        const FacePatch p = m.face_patch(f);
        if (p.minus) {
            ++found;
            EXPECT_NEAR(p.length, std::sqrt(2.0), 1e-15);
            EXPECT_NE(p.plus, *p.minus);
        }
    }
    EXPECT_EQ(found, 1);
}

TEST(Mesh, BottomFaceNormalPointsDown) {
    const Mesh m = Mesh::build_uniform(1);
    bool seen = false;
    for (std::size_t f = 0; f < m.num_faces(); ++f) {
        const FacePatch p = m.face_patch(f);
        if (std::abs(p.barycenter.y()) < 1e-15) {
            seen = true;
            EXPECT_FALSE(p.minus.has_value());
            EXPECT_NEAR(p.normal.x(), 0.0, 1e-15);
            EXPECT_NEAR(p.normal.y(), -1.0, 1e-15);
        }
    }
    EXPECT_TRUE(seen);
}

TEST(Mesh, FacePatchOutOfRangeThrows) {
    const Mesh m = Mesh::build_uniform(2);
    EXPECT_THROW(m.face_patch(m.num_faces()), Error);
}

TEST(Mesh, OutwardNormalsAndFaceIncidence) {
    const Mesh m = Mesh::build_uniform(5);
    std::vector<int> incidence(m.num_faces(), 0);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        const Point c = m.geometry(t).barycenter;
        for (int k = 0; k < 3; ++k) {
            const std::size_t f = m.element_face(t, k);
            ++incidence[f];
            const Face& face = m.face(f);
            // The outward normal points from the barycenter towards the face.
            EXPECT_GT(m.outward_normal(t, k).dot(face.barycenter - c), 0.0);
            // Face k is opposite local vertex k.
            const std::size_t v = m.triangle(t)[k];
            EXPECT_TRUE(face.vertices[0] != v && face.vertices[1] != v);
            EXPECT_NEAR(face.normal.norm(), 1.0, 1e-15);
        }
    }
    for (std::size_t f = 0; f < m.num_faces(); ++f) EXPECT_EQ(incidence[f], m.face(f).on_boundary() ? 1 : 2);
}

TEST(Mesh, BarycentricGradientsSumToZero) {
    const Mesh m = Mesh::build_uniform(4);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        const auto g = m.barycentric_gradients(t);
        EXPECT_LT((g[0] + g[1] + g[2]).norm(), 1e-12);
        const auto& tri = m.triangle(t);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                EXPECT_NEAR(g[a].dot(m.vertex(tri[b]) - m.vertex(tri[(b + 1) % 3])),
                            (a == b ? 1.0 : 0.0) - (a == (b + 1) % 3 ? 1.0 : 0.0), 1e-12);
    }
}

TEST(Mesh, FreeIndexIsInverseOfFreeVertices) {
    const Mesh m = Mesh::build_uniform(6);
    EXPECT_EQ(m.free_vertices().size(), 25u);
    for (std::size_t i = 0; i < m.free_vertices().size(); ++i) EXPECT_EQ(m.free_index(m.free_vertices()[i]), i);
    for (std::size_t v = 0; v < m.num_vertices(); ++v)
        EXPECT_EQ(m.vertex_on_boundary(v), m.free_index(v) == kBoundary);
    for (std::size_t i = 0; i < m.interior_faces().size(); ++i)
        EXPECT_EQ(m.interior_face_index(m.interior_faces()[i]), i);
}

TEST(Mesh, DumpHasSections) {
    const Mesh m = Mesh::build_uniform(1);
    std::ostringstream os;
    m.dump(os);
    const std::string s = os.str();
    EXPECT_NE(s.find("vertices"), std::string::npos);
    EXPECT_NE(s.find("triangles"), std::string::npos);
    EXPECT_NE(s.find("faces"), std::string::npos);
}
