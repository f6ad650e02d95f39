#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "nkcert/mesh.hpp"

namespace nkcert {

/// Symmetric triangle rule in barycentric coordinates; weights are
/// normalised to sum to one, so a rule applied to T is scaled by |T|.
struct QuadratureRule {
    int degree = 0;
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

/// 7-point degree-5 rule (closed form). Default for assembly and estimators.
const QuadratureRule& rule_degree5();
/// 13-point degree-7 rule; used for reference integrals against exact fields.
const QuadratureRule& rule_degree7();
/// Rule of the given exactness degree (5 or 7).
const QuadratureRule& rule_for_degree(int degree);

using ScalarField = std::function<double(const Point&)>;

/// Integral of f over triangle t of the mesh.
double integrate(const QuadratureRule& rule, const Mesh& mesh, std::size_t t, const ScalarField& f);

/// Integral of f over the triangle with the given (counterclockwise or not) corners.
double integrate(const QuadratureRule& rule, const std::array<Point, 3>& corners, const ScalarField& f);

/// Sum of integrate() over all triangles.
double integrate_domain(const QuadratureRule& rule, const Mesh& mesh, const ScalarField& f);

}  // namespace nkcert
