#include "nkcert/outputs.hpp"

#include <cmath>

#include "nkcert/error.hpp"
#include "nkcert/fluxrecon.hpp"

namespace nkcert {

QoISpec QoISpec::linear(ScalarField psi, std::string name) {
    NKCERT_REQUIRE(static_cast<bool>(psi), "QoISpec::linear: missing weight");
    return {QoIKind::kLinear, std::move(psi), std::move(name)};
}

QoISpec QoISpec::quadratic_l2(std::string name) { return {QoIKind::kQuadraticL2, {}, std::move(name)}; }

double eval_qoi(const QoISpec& spec, const P1Function& u) {
    const Mesh& mesh = u.mesh();
    const QuadratureRule& rule = rule_degree5();
    if (spec.kind == QoIKind::kQuadraticL2) {
        const double n = l2_norm(u, rule);
        return 0.5 * n * n;
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        double local = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.points[q];
            local += rule.weights[q] * spec.psi(mesh.map_to_physical(t, l)) * u.value(t, l);
        }
        sum += mesh.geometry(t).area * local;
    }
    return sum;
}

QoIConstants qoi_constants(const QoISpec& spec, const P1Function& u, double rho, double C2) {
    NKCERT_REQUIRE(rho >= 0.0, "qoi_constants: rho must be nonnegative");
    if (spec.kind == QoIKind::kLinear) return {C2 * l2_norm(u.mesh(), spec.psi), 0.0};
    return {C2 * (l2_norm(u) + C2 * rho), C2 * C2};
}

Enclosure baseline_enclosure(const QoISpec& spec, const P1Function& u, double rho, double C2) {
    NKCERT_REQUIRE(rho >= 0.0, "baseline_enclosure: rho must be nonnegative");
    const QoIConstants k = qoi_constants(spec, u, rho, C2);
    Enclosure e;
    e.kind = EnclosureKind::kBaseline;
    e.center = eval_qoi(spec, u);
    e.half_width = k.L_J * rho + 0.5 * k.M_J * rho * rho;
    e.lo = e.center - e.half_width;
    e.hi = e.center + e.half_width;
    return e;
}

P1Function solve_adjoint(const P1Function& u, const QoISpec& spec) {
    const Mesh& mesh = u.mesh();
    const Eigen::VectorXd rhs = spec.kind == QoIKind::kLinear ? assemble_load(mesh, spec.psi) : assemble_load(u);
    return P1Function::from_free_values(mesh, solve_spd(assemble_jacobian(u), rhs));
}

double adjoint_residual_bound(const P1Function& u, const P1Function& z, const QoISpec& spec) {
    const Mesh& mesh = u.mesh();
    NKCERT_REQUIRE(&z.mesh() == &mesh, "adjoint_residual_bound: primal and adjoint live on different meshes");
    // G(z)(v) = -[ int grad z . grad v + int (3u^2 z - psi) v ], so the adjoint residual has the
    // primal form with source 3u^2 z - psi and the reconstructed flux approximates grad z.
    const ElementSource source = [&](std::size_t t, const std::array<double, 3>& l) {
        const double uq = u.value(t, l);
        const double psi = spec.kind == QoIKind::kLinear ? spec.psi(mesh.map_to_physical(t, l)) : uq;
        return 3.0 * uq * uq * z.value(t, l) - psi;
    };
    const PiecewiseConstantField r = project_elementwise(mesh, source);
    const Reconstruction rec = reconstruct_rt0(solve_cr(r), r);
    return equilibrated_bound(z, rec, source).r_bound;
}

Enclosure adjoint_enclosure(const QoISpec& spec, const P1Function& u, const P1Function& z, const NKReport& nk,
                            const CertConstants& consts, const ScalarField& f) {
    NKCERT_REQUIRE(nk.admissible && nk.path != SearchPath::kFail,
                   "adjoint_enclosure: the verification radius is not admissible");
    const double rho = nk.rho;
    const double half_L_rho2 = 0.5 * consts.lipschitz(rho) * rho * rho;
    const QoIConstants k = qoi_constants(spec, u, rho, consts.C2);

    Enclosure e;
    e.kind = EnclosureKind::kAdjoint;
    e.center = eval_qoi(spec, u);
    e.adjoint_norm = energy_norm(z);
    e.adjoint_residual = adjoint_residual_bound(u, z, spec);
    e.budget.residual_pairing = std::abs(assemble_residual(u, f).dot(z.free_values()));
    e.budget.remainder_adjoint = half_L_rho2 * e.adjoint_norm;
    e.budget.adjoint_error = (consts.r_bound + half_L_rho2) / consts.alpha * e.adjoint_residual;
    e.budget.output_curvature = 0.5 * k.M_J * rho * rho;
    e.half_width = e.budget.sum();
    e.lo = e.center - e.half_width;
    e.hi = e.center + e.half_width;
    return e;
}

}  // namespace nkcert
