#pragma once

#include <string>

#include "nkcert/certify.hpp"
#include "nkcert/fem.hpp"

namespace nkcert {

enum class QoIKind { kLinear, kQuadraticL2 };

/// J(v) = int psi v (linear) or J(v) = 1/2 ||v||^2_{L2} (quadratic).
struct QoISpec {
    QoIKind kind = QoIKind::kLinear;
    ScalarField psi;  ///< weight of the linear kind
    std::string name;

    static QoISpec linear(ScalarField psi, std::string name = "linear");
    static QoISpec quadratic_l2(std::string name = "quadratic");
};

enum class EnclosureKind { kBaseline, kAdjoint };

struct AdjointBudget {
    double residual_pairing = 0.0;     ///< |<F(u_h), z_h>|
    double remainder_adjoint = 0.0;    ///< 1/2 L(rho) rho^2 ||z_h||_V
    double adjoint_error = 0.0;        ///< (r + 1/2 L(rho) rho^2) alpha^{-1} ||G(z_h)||_{V*}
    double output_curvature = 0.0;     ///< 1/2 M_J rho^2

    double sum() const { return residual_pairing + remainder_adjoint + adjoint_error + output_curvature; }
};

struct Enclosure {
    EnclosureKind kind = EnclosureKind::kBaseline;
    double center = 0.0;
    double half_width = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    AdjointBudget budget;  ///< populated for the adjoint kind
    double adjoint_residual = 0.0;  ///< bound on ||G(z_h)||_{V*} (adjoint kind)
    double adjoint_norm = 0.0;      ///< ||z_h||_V (adjoint kind)

    bool contains(double value) const { return lo <= value && value <= hi; }
};

double eval_qoi(const QoISpec& spec, const P1Function& u);

struct QoIConstants {
    double L_J = 0.0;
    double M_J = 0.0;
};

QoIConstants qoi_constants(const QoISpec& spec, const P1Function& u, double rho, double C2);

/// Half-width L_J(rho) rho + 1/2 M_J rho^2.
Enclosure baseline_enclosure(const QoISpec& spec, const P1Function& u, double rho, double C2);

/// P1 solution z of B_u(v, z) = j(v) for all v, with B_u the linearised form.
P1Function solve_adjoint(const P1Function& u, const QoISpec& spec);

/// Equilibrated-flux bound on the adjoint residual dual norm; the element source is 3u^2 z - psi.
double adjoint_residual_bound(const P1Function& u, const P1Function& z, const QoISpec& spec);

Enclosure adjoint_enclosure(const QoISpec& spec, const P1Function& u, const P1Function& z, const NKReport& nk,
                            const CertConstants& consts, const ScalarField& f);

}  // namespace nkcert
