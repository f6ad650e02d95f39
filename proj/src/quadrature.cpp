#include "nkcert/quadrature.hpp"

#include <cmath>
#include <string>

#include "nkcert/error.hpp"

namespace nkcert {
namespace {

void add_orbit3(QuadratureRule& r, double a, double w) {
    const double b = 1.0 - 2.0 * a;
    r.points.push_back({a, a, b});
    r.points.push_back({a, b, a});
    r.points.push_back({b, a, a});
    r.weights.insert(r.weights.end(), 3, w);
}

void add_orbit6(QuadratureRule& r, double a, double b, double w) {
    const double c = 1.0 - a - b;
    r.points.push_back({a, b, c});
    r.points.push_back({a, c, b});
    r.points.push_back({b, a, c});
    r.points.push_back({b, c, a});
    r.points.push_back({c, a, b});
    r.points.push_back({c, b, a});
    r.weights.insert(r.weights.end(), 6, w);
}

QuadratureRule make_degree5() {
    QuadratureRule r;
    r.degree = 5;
    const double s15 = std::sqrt(15.0);
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(9.0 / 40.0);
    add_orbit3(r, (6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
    add_orbit3(r, (6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
    return r;
}

// Dunavant's 13-point rule, orbit data re-solved to 25 digits from the
// invariant moment equations.
QuadratureRule make_degree7() {
    QuadratureRule r;
    r.degree = 7;
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(-0.1495700444676817506297113);
    add_orbit3(r, 0.2603459660790398269262425, 0.1756152574332078117535194);
    add_orbit3(r, 0.06513010290221581153802591, 0.05334723560883849126998729);
    add_orbit6(r, 0.04869031542531641179302156, 0.3128654960048738614066445, 0.07711376089025714025986519);
    return r;
}

}  // namespace

const QuadratureRule& rule_degree5() {
    static const QuadratureRule rule = make_degree5();
    return rule;
}

const QuadratureRule& rule_degree7() {
    static const QuadratureRule rule = make_degree7();
    return rule;
}

const QuadratureRule& rule_for_degree(int degree) {
    if (degree == 5) return rule_degree5();
    if (degree == 7) return rule_degree7();
    throw Error("rule_for_degree: no shipped rule of degree " + std::to_string(degree));
}

double integrate(const QuadratureRule& rule, const std::array<Point, 3>& corners, const ScalarField& f) {
    const Point e1 = corners[1] - corners[0];
    const Point e2 = corners[2] - corners[0];
    const double area = 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    NKCERT_REQUIRE(area > 0.0, "integrate: degenerate element");
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& l = rule.points[q];
        sum += rule.weights[q] * f(l[0] * corners[0] + l[1] * corners[1] + l[2] * corners[2]);
    }
    return area * sum;
}

double integrate(const QuadratureRule& rule, const Mesh& mesh, std::size_t t, const ScalarField& f) {
    const auto& tri = mesh.triangle(t);
    return integrate(rule, {mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2])}, f);
}

double integrate_domain(const QuadratureRule& rule, const Mesh& mesh, const ScalarField& f) {
    double sum = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) sum += integrate(rule, mesh, t, f);
    return sum;
}

}  // namespace nkcert
