#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nkcert/error.hpp"
#include "nkcert/quadrature.hpp"

using namespace nkcert;

namespace {

// int_{ref} x^a y^b = a! b! / (a + b + 2)!
double monomial_exact(int a, int b) { return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); }

const std::array<Point, 3> kReference{Point(0, 0), Point(1, 0), Point(0, 1)};

}  // namespace

TEST(Quadrature, WeightsSumToOne) {
    for (const QuadratureRule* r : {&rule_degree5(), &rule_degree7()}) {
        double s = 0.0;
        for (double w : r->weights) s += w;
        EXPECT_NEAR(s, 1.0, 1e-15);
        for (const auto& l : r->points) EXPECT_NEAR(l[0] + l[1] + l[2], 1.0, 1e-15);
    }
}

TEST(Quadrature, DeclaredDegrees) {
    EXPECT_EQ(rule_degree5().degree, 5);
    EXPECT_EQ(rule_degree7().degree, 7);
    EXPECT_EQ(&rule_for_degree(5), &rule_degree5());
    EXPECT_EQ(&rule_for_degree(7), &rule_degree7());
    EXPECT_THROW(rule_for_degree(4), Error);
}

class Exactness : public ::testing::TestWithParam<int> {};

TEST_P(Exactness, AllMonomialsUpToDegree) {
    const QuadratureRule& rule = rule_for_degree(GetParam());
    for (int a = 0; a <= rule.degree; ++a) {
        for (int b = 0; a + b <= rule.degree; ++b) {
            const double q =
                integrate(rule, kReference, [a, b](const Point& p) { return std::pow(p.x(), a) * std::pow(p.y(), b); });
            EXPECT_NEAR(q, monomial_exact(a, b), 1e-14) << "x^" << a << " y^" << b;
        }
    }
}

TEST_P(Exactness, FailsOneDegreeHigher) {
    const QuadratureRule& rule = rule_for_degree(GetParam());
    const int d = rule.degree + 1;
    double worst = 0.0;
    for (int a = 0; a <= d; ++a) {
        const double q = integrate(rule, kReference,
                                   [a, d](const Point& p) { return std::pow(p.x(), a) * std::pow(p.y(), d - a); });
        worst = std::max(worst, std::abs(q - monomial_exact(a, d - a)));
    }
    EXPECT_GT(worst, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Rules, Exactness, ::testing::Values(5, 7));

TEST(Quadrature, ConstantGivesArea) {
    const std::array<Point, 3> tri{Point(0.2, 0.1), Point(1.3, 0.4), Point(0.5, 1.7)};
    const double area = 0.5 * std::abs((1.1) * (1.6) - (0.3) * (0.3));
    for (int d : {5, 7}) EXPECT_NEAR(integrate(rule_for_degree(d), tri, [](const Point&) { return 1.0; }), area, 1e-14);
}

TEST(Quadrature, LinearOnReference) {
    EXPECT_NEAR(integrate(rule_degree5(), kReference, [](const Point& p) { return p.x(); }), 1.0 / 6.0, 1e-15);
}

TEST(Quadrature, DegenerateElementThrows) {
    const std::array<Point, 3> flat{Point(0, 0), Point(1, 1), Point(2, 2)};
    EXPECT_THROW(integrate(rule_degree5(), flat, [](const Point&) { return 1.0; }), Error);
}

TEST(Quadrature, SineSquaredOverFineMesh) {
    const Mesh m = Mesh::build_uniform(64);
    const double pi = std::numbers::pi;
    const double v = integrate_domain(rule_degree7(), m, [pi](const Point& p) {
        const double s = std::sin(pi * p.x()) * std::sin(pi * p.y());
        return s * s;
    });
    EXPECT_NEAR(v, 0.25, 1e-6);
}

TEST(Quadrature, ElementIntegralMatchesCornerForm) {
    const Mesh m = Mesh::build_uniform(3);
    const ScalarField f = [](const Point& p) { return std::exp(p.x()) * std::cos(p.y()); };
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangle(t);
        const std::array<Point, 3> c{m.vertex(tri[0]), m.vertex(tri[1]), m.vertex(tri[2])};
        EXPECT_NEAR(integrate(rule_degree7(), m, t, f), integrate(rule_degree7(), c, f), 1e-15);
    }
}
