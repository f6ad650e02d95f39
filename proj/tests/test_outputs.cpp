#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nkcert/error.hpp"
#include "nkcert/fluxrecon.hpp"
#include "nkcert/manufactured.hpp"
#include "nkcert/outputs.hpp"

using namespace nkcert;

namespace {

const QoISpec kJ1 = QoISpec::linear([](const Point&) { return 1.0; }, "J1");
const QoISpec kJ2 = QoISpec::quadratic_l2("J2");

double exact(const QoISpec& s) { return s.kind == QoIKind::kLinear ? manufactured::kLinearQoi : manufactured::kQuadraticQoi; }

struct Certified {
    Mesh mesh;
    P1Function u;
    CertConstants constants;
    NKReport nk;

    explicit Certified(int N) : mesh(Mesh::build_uniform(N)), u(mesh) {
        u = newton_solve(mesh, manufactured::source).solution;
        const auto r = project_source(u, manufactured::source);
        const ResidualBound b = residual_bound(u, reconstruct_rt0(solve_cr(r), r), manufactured::source);
        const AffineLipschitz l = lipschitz_affine(u, kDefaultC4);
        constants = CertConstants::make(b.r_bound, stability_constant(u).alpha, l.L0, l.L1);
        nk = select_radius(constants);
    }
    Certified(const Certified&) = delete;
};

// Prolongation of a coarse P1 function to the nested mesh refined `k` times per direction.
P1Function prolong(const P1Function& v, const Mesh& fine) {
    const int N = v.mesh().subdivisions();
    const auto& c = v.coefficients();
    return P1Function::interpolate(fine, [&](const Point& p) {
        const int i = std::min(static_cast<int>(p.x() * N), N - 1), j = std::min(static_cast<int>(p.y() * N), N - 1);
        const double s = p.x() * N - i, t = p.y() * N - j;
        const auto at = [&](int a, int b) { return c[(j + b) * (N + 1) + i + a]; };
        return t <= s ? at(0, 0) + s * (at(1, 0) - at(0, 0)) + t * (at(1, 1) - at(1, 0))
                      : at(0, 0) + t * (at(0, 1) - at(0, 0)) + s * (at(1, 1) - at(0, 1));
    });
}

}  // namespace

TEST(EvalQoi, AnalyticAndTrivialValues) {
    const Mesh m = Mesh::build_uniform(4);
    EXPECT_EQ(eval_qoi(kJ2, P1Function(m)), 0.0);
    EXPECT_EQ(eval_qoi(kJ1, P1Function(m)), 0.0);
    EXPECT_NEAR(manufactured::kLinearQoi, 0.4052847, 1e-7);
    const Mesh fine = Mesh::build_uniform(128);
    const P1Function ui = P1Function::interpolate(fine, manufactured::exact_solution);
    EXPECT_NEAR(eval_qoi(kJ1, ui), manufactured::kLinearQoi, 1e-4);
    EXPECT_NEAR(eval_qoi(kJ2, ui), manufactured::kQuadraticQoi, 1e-4);
    EXPECT_THROW(QoISpec::linear(ScalarField{}), Error);
}

TEST(EvalQoi, ReferenceCentersAtSixteen) {
    const Certified c(16);
    EXPECT_NEAR(eval_qoi(kJ1, c.u) / 4.0167887497496990e-01, 1.0, 1e-8);
    EXPECT_NEAR(eval_qoi(kJ2, c.u) / 1.2280009514167282e-01, 1.0, 1e-8);
}

TEST(QoiConstants, ClosedForms) {
    const Mesh m = Mesh::build_uniform(4);
    const QoIConstants lin = qoi_constants(kJ1, P1Function(m), 0.3, kDefaultC2);
    EXPECT_NEAR(lin.L_J, kDefaultC2, 1e-15);
    EXPECT_EQ(lin.M_J, 0.0);
    const QoIConstants quad = qoi_constants(kJ2, P1Function(m), 0.0, kDefaultC2);
    EXPECT_EQ(quad.L_J, 0.0);
    EXPECT_NEAR(quad.M_J, kDefaultC2 * kDefaultC2, 1e-17);
    EXPECT_THROW(qoi_constants(kJ1, P1Function(m), -1.0, kDefaultC2), Error);
}

TEST(Baseline, ReferenceRadiusReproducesReferenceWidths) {
    // With the tabulated radius the baseline formula is independent of the residual estimator.
    const Certified c(16);
    const double rho = 7.1060674001423230e-01;
    EXPECT_NEAR(qoi_constants(kJ2, c.u, rho, kDefaultC2).L_J, 0.1475, 5e-4);
    EXPECT_NEAR(baseline_enclosure(kJ1, c.u, rho, kDefaultC2).half_width / 1.599427e-01, 1.0, 1e-6);
    EXPECT_NEAR(baseline_enclosure(kJ2, c.u, rho, kDefaultC2).half_width / 1.176370e-01, 1.0, 1e-6);
}

TEST(Baseline, ZeroRadiusDegenerates) {
    const Certified c(8);
    const Enclosure e = baseline_enclosure(kJ2, c.u, 0.0, kDefaultC2);
    EXPECT_EQ(e.half_width, 0.0);
    EXPECT_EQ(e.lo, e.center);
    EXPECT_EQ(e.hi, e.center);
}

TEST(Adjoint, ZeroWeightGivesZero) {
    const Certified c(6);
    const QoISpec zero = QoISpec::linear([](const Point&) { return 0.0; });
    const P1Function z = solve_adjoint(c.u, zero);
    EXPECT_EQ(z.coefficients().norm(), 0.0);
    EXPECT_LT(adjoint_residual_bound(c.u, z, zero), 1e-15);
}

TEST(Adjoint, SingleUnknownPoisson) {
    const Mesh m = Mesh::build_uniform(2);
    const P1Function z = solve_adjoint(P1Function(m), kJ1);
    // K = 4 and the load is six triangles of area 1/8 divided by three.
    EXPECT_NEAR(z.free_values()[0], 0.25 / 4.0, 1e-15);
}

TEST(Adjoint, SolvesLinearisedSystem) {
    const Certified c(8);
    for (const QoISpec* s : {&kJ1, &kJ2}) {
        const P1Function z = solve_adjoint(c.u, *s);
        const Eigen::VectorXd rhs = s->kind == QoIKind::kLinear ? assemble_load(c.mesh, s->psi) : assemble_load(c.u);
        EXPECT_LT((assemble_jacobian(c.u).matrix() * z.free_values() - rhs).norm(), 1e-12);
    }
}

TEST(Adjoint, ResidualBoundDominatesFineMeshDualNorm) {
    const Certified c(8);
    const Mesh fine = Mesh::build_uniform(64);
    const P1Function uf = prolong(c.u, fine);
    const SparseSymMatrix K = assemble_stiffness(fine);
    std::mt19937 gen(17);
    std::normal_distribution<double> d;
    for (const QoISpec* s : {&kJ1, &kJ2}) {
        const P1Function z = solve_adjoint(c.u, *s);
        const double bound = adjoint_residual_bound(c.u, z, *s);
        const Eigen::VectorXd load =
            s->kind == QoIKind::kLinear ? assemble_load(fine, s->psi, rule_degree7()) : assemble_load(uf, rule_degree7());
        const Eigen::VectorXd G = assemble_jacobian(uf, rule_degree7()).matrix() * prolong(z, fine).free_values() - load;
        EXPECT_LE(std::sqrt(G.dot(solve_spd(K, G))), bound) << s->name;
        for (int trial = 0; trial < 50; ++trial) {
            Eigen::VectorXd v(G.size());
            for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = d(gen);
            EXPECT_LE(std::abs(G.dot(v)), bound * std::sqrt(K.quadratic_form(v))) << s->name;
        }
    }
}

TEST(Adjoint, BudgetIdentityContainmentAndImprovement) {
    for (int N : {8, 16, 32}) {
        const Certified c(N);
        ASSERT_TRUE(c.nk.admissible);
        for (const QoISpec* s : {&kJ1, &kJ2}) {
            const Enclosure base = baseline_enclosure(*s, c.u, c.nk.rho, kDefaultC2);
            const Enclosure adj =
                adjoint_enclosure(*s, c.u, solve_adjoint(c.u, *s), c.nk, c.constants, manufactured::source);
            EXPECT_EQ(adj.kind, EnclosureKind::kAdjoint);
            EXPECT_EQ(adj.half_width, adj.budget.sum());
            for (double term : {adj.budget.residual_pairing, adj.budget.remainder_adjoint, adj.budget.adjoint_error,
                                adj.budget.output_curvature})
                EXPECT_GE(term, 0.0);
            EXPECT_EQ(adj.lo, adj.center - adj.half_width);
            EXPECT_EQ(adj.hi, adj.center + adj.half_width);
            EXPECT_EQ(adj.center, base.center);
            EXPECT_TRUE(base.contains(exact(*s))) << s->name << " N=" << N;
            EXPECT_TRUE(adj.contains(exact(*s))) << s->name << " N=" << N;
            if (N >= 16) EXPECT_LT(adj.half_width, base.half_width) << s->name << " N=" << N;
        }
    }
}

TEST(Adjoint, ZeroAdjointStillEncloses) {
    const Certified c(16);
    const Enclosure e = adjoint_enclosure(kJ1, c.u, P1Function(c.mesh), c.nk, c.constants, manufactured::source);
    EXPECT_EQ(e.budget.residual_pairing, 0.0);
    EXPECT_EQ(e.budget.remainder_adjoint, 0.0);
    EXPECT_GT(e.budget.adjoint_error, 0.0);
    EXPECT_TRUE(e.contains(manufactured::kLinearQoi));
}

TEST(Adjoint, RequiresAdmissibleRadius) {
    const Certified c(4);
    NKReport failed = c.nk;
    failed.admissible = false;
    failed.path = SearchPath::kFail;
    EXPECT_THROW(adjoint_enclosure(kJ1, c.u, solve_adjoint(c.u, kJ1), failed, c.constants, manufactured::source),
                 Error);
}
