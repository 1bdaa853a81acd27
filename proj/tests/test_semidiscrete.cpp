#include <Eigen/Dense>
#include <catch_amalgamated.hpp>
#include <random>

#include "bswave/mms.hpp"
#include "bswave/semidiscrete.hpp"
#include "bswave/timestepping.hpp"

using namespace bswave;
using Catch::Approx;

namespace {

State random_state(const FeSpace& space, double eta_amp, double phi_amp,
                   unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  State s;
  s.eta.resize(space.n_dofs());
  s.phi.resize(space.n_dofs());
  for (auto& v : s.eta) v = eta_amp * u(rng);
  for (auto& v : s.phi) v = phi_amp * u(rng);
  return s;
}

}  // namespace

TEST_CASE("A_op equals M + b S for constant depth one", "[semidiscrete]") {
  Mesh mesh = generate_rectangle({0, 1}, {0, 1}, 3, 3);
  FeSpace space(mesh, 1);
  ModelParams p = params_from_theta(1.0, 1.0);  // b = 1/3
  DiscreteOperators ops = build_operators(space, constant_field(1.0), p);

  CsrMatrix m = assemble_mass(space);
  CsrMatrix k = assemble_stiffness(space);  // D^2 = 1
  for (int r = 0; r < m.rows; ++r)
    for (int kk = m.row_ptr[r]; kk < m.row_ptr[r + 1]; ++kk) {
      int c = m.col_idx[kk];
      CHECK(ops.a_op().get(r, c) ==
            Approx(m.get(r, c) + k.get(r, c) / 3.0).margin(1e-15));
    }
}

TEST_CASE("depth-squared weight scales the stiffness", "[semidiscrete]") {
  Mesh mesh = generate_rectangle({0, 1}, {0, 1}, 4, 4);
  FeSpace space(mesh, 2);
  ModelParams p = params_from_theta(0.9, 9.81);
  DiscreteOperators ops(space, constant_field(2.0), p);
  CsrMatrix k = assemble_stiffness(space);
  for (int r = 0; r < k.rows; ++r)
    for (int kk = k.row_ptr[r]; kk < k.row_ptr[r + 1]; ++kk)
      CHECK(ops.stiffness().get(r, k.col_idx[kk]) ==
            Approx(4.0 * k.vals[kk]).margin(1e-13));
}

TEST_CASE("A_op is positive definite over the sloping depth",
          "[semidiscrete][oracle]") {
  // dense eigendecomposition oracle on a tiny mesh
  Mesh mesh = generate_rectangle({0, 1}, {0, 1}, 2, 2);
  FeSpace space(mesh, 1);
  MmsProblem mms;
  ModelParams p = params_from_theta(1.0, 1.0);
  DiscreteOperators ops(space, mms.depth(), p);

  const int n = space.n_dofs();
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int k = ops.a_op().row_ptr[r]; k < ops.a_op().row_ptr[r + 1]; ++k)
      dense(r, ops.a_op().col_idx[k]) = ops.a_op().vals[k];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("nonpositive depth is rejected with a location", "[semidiscrete]") {
  Mesh mesh = generate_rectangle({0, 1}, {0, 1}, 2, 2);
  FeSpace space(mesh, 1);
  ScalarField bad{[](Vec2 p) { return p.x - 0.4; }, {}};
  CHECK_THROWS_AS(
      DiscreteOperators(space, bad, params_from_theta(1.0, 1.0)),
      ModelError);
}

TEST_CASE("lake at rest is a fixed point", "[semidiscrete]") {
  Mesh mesh = generate_rectangle({-50, 20}, {0, 1}, 35, 2);
  FeSpace space(mesh, 1);
  ScalarField shoal{[](Vec2 p) { return p.x <= 0 ? 0.7 : 0.7 - p.x / 50.0; },
                    {}};
  DiscreteOperators ops(space, shoal, params_from_theta(1.0, 9.81));

  State rest;
  rest.eta.assign(space.n_dofs(), 0.0);
  rest.phi.assign(space.n_dofs(), 3.14);  // any constant potential
  std::vector<double> de, dp;
  ops.rhs(rest, de, dp);
  for (double v : de) CHECK(std::abs(v) < 1e-12);
  for (double v : dp) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("rhs ignores constant shifts of the potential", "[semidiscrete]") {
  Mesh mesh = generate_rectangle({0, 1}, {0, 1}, 4, 4);
  FeSpace space(mesh, 2);
  DiscreteOperators ops(space, constant_field(1.0), params_from_theta(0.9, 9.81));
  State s = random_state(space, 0.1, 0.5, 77);
  std::vector<double> de1, dp1, de2, dp2;
  ops.rhs(s, de1, dp1);
  for (auto& v : s.phi) v += 42.0;
  ops.rhs(s, de2, dp2);
  for (int i = 0; i < space.n_dofs(); ++i) {
    CHECK(de2[i] == Approx(de1[i]).margin(1e-11));
    CHECK(dp2[i] == Approx(dp1[i]).margin(1e-11));
  }
}

TEST_CASE("manufactured state reproduces its exact time derivative",
          "[semidiscrete][oracle]") {
  // at t = 0 the exact time derivatives equal the fields themselves
  MmsProblem mms;
  mms.params = params_from_theta(1.0, 1.0);
  Forcing forcing{[&](double t) { return mms.forcing_eta(t); },
                  [&](double t) { return mms.forcing_phi(t); }};

  double err_prev = 0.0;
  for (int n : {8, 16}) {
    Mesh mesh = generate_rectangle({0, 1}, {0, 1}, n, n);
    FeSpace space(mesh, 1);
    DiscreteOperators ops(space, mms.depth(), mms.params);
    State s0 = initial_state(ops, mms.eta_field(0.0), mms.phi_field(0.0));
    std::vector<double> de, dp;
    ops.rhs(s0, de, dp, &forcing);
    double err = error_norms(FeFunction(space, de), mms.eta_field(0.0)).l2 +
                 error_norms(FeFunction(space, dp), mms.phi_field(0.0)).l2;
    if (n == 16) {
      // O(h^2) for P1: halving h divides the error by about 4
      CHECK(err_prev / err > 3.0);
      CHECK(err_prev / err < 5.5);
    }
    err_prev = err;
  }
}

TEST_CASE("solitary state moves at the wave speed", "[semidiscrete][oracle]") {
  // eta_dot should approximate -c_s d(eta)/dxi; convergence under refinement
  const double th = 9.0 / 11.0;
  SolitaryWave wave = analytic_solitary(th, 1.0, 1.0, {1, 0});
  ModelParams p = params_from_theta(th, 1.0);

  auto run = [&](int nx) {
    Mesh mesh = generate_rectangle({-20, 20}, {0, 1}, nx, std::max(2, nx / 40));
    FeSpace space(mesh, 1);
    DiscreteOperators ops(space, constant_field(1.0), p);
    State s0 = initial_state(ops, wave.eta_field(), wave.potential_field());
    std::vector<double> de, dp;
    ops.rhs(s0, de, dp);
    // exact: eta_t = -c_s eta_xi
    ScalarField target{[&](Vec2 q) {
                         return -wave.params.speed * wave.eta_gradient(q, 0).x;
                       },
                       {}};
    FeFunction diff(space, de);
    double err2 = 0.0;
    const TriangleRule& rule = triangle_rule(8);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      ElementMap em(mesh, t);
      for (int q = 0; q < rule.size(); ++q) {
        Vec2 pt = em.to_physical(rule.points[q]);
        double d = diff.value_in_cell(t, rule.points[q]) - target.value(pt);
        err2 += rule.weights[q] * em.area() * d * d;
      }
    }
    return std::sqrt(err2);
  };

  double e1 = run(80), e2 = run(160);
  CHECK(e1 / e2 > 3.0);  // O(h^2) for r=1
}

TEST_CASE("conserved functionals on simple states", "[semidiscrete]") {
  Mesh mesh = generate_rectangle({0, 1}, {0, 1}, 4, 4);
  FeSpace space(mesh, 1);
  ModelParams p = params_from_theta(1.0, 1.0);  // c = 1/3, g = 1
  DiscreteOperators ops(space, constant_field(1.0), p);

  SECTION("constant elevation") {
    State s;
    s.eta.assign(space.n_dofs(), 1.0);
    s.phi.assign(space.n_dofs(), 0.0);
    auto c = ops.conserved(s);
    CHECK(c.mass == Approx(1.0).epsilon(1e-14));
    CHECK(c.energy == Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(c.vorticity) < 1e-12);
  }

  SECTION("unit-gradient potential") {
    State s;
    s.eta.assign(space.n_dofs(), 0.0);
    s.phi.resize(space.n_dofs());
    for (int i = 0; i < space.n_dofs(); ++i)
      s.phi[i] = space.dof_coords()[i].x;
    auto c = ops.conserved(s);
    CHECK(c.mass == Approx(0.0).margin(1e-14));
    CHECK(c.energy == Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(c.vorticity) < 1e-12);
  }
}

TEST_CASE("solitary initial mass matches 2AW/lambda", "[semidiscrete]") {
  const double th = 9.0 / 11.0;
  SolitaryWave wave = analytic_solitary(th, 1.0, 1.0, {1, 0});
  Mesh mesh = generate_rectangle({-50, 50}, {-5, 5}, 100, 10);
  FeSpace space(mesh, 1);
  DiscreteOperators ops(space, constant_field(1.0), params_from_theta(th, 1.0));
  State s0 = initial_state(ops, wave.eta_field(), wave.potential_field());
  // projection preserves the quadrature integral; versus the analytic mass
  // the difference is the quadrature error of sech^2 on this coarse mesh
  CHECK(ops.conserved(s0).mass ==
        Approx(wave.channel_mass(10.0)).epsilon(1e-4));
  CHECK(wave.channel_mass(10.0) == Approx(31.13995776646).epsilon(1e-11));
}

TEST_CASE("semidiscrete invariants for random states",
          "[semidiscrete][property]") {
  Mesh mesh = generate_rectangle({0, 2}, {0, 1}, 6, 3, DiagonalRule::union_jack);
  MmsProblem mms;
  for (int r : {1, 2}) {
    FeSpace space(mesh, r);
    DiscreteOperators ops(space, constant_field(1.0),
                          params_from_theta(0.9, 9.81));
    for (unsigned seed : {1u, 2u, 3u}) {
      State s = random_state(space, 0.2, 0.5, seed);
      std::vector<double> de, dp;
      ops.rhs(s, de, dp);

      // discrete mass conservation: the load-of-one pairing with eta_dot
      double mdot = 0.0;
      for (int i = 0; i < space.n_dofs(); ++i)
        mdot += ops.load_of_one()[i] * de[i];
      CHECK(std::abs(mdot) < 1e-12);

      // discrete energy conservation: dE/dt = Gamma/2 with d = (eta_dot,
      // phi_dot)
      UpdateDirection d;
      d.eta = de;
      d.phi = dp;
      double A, B, C;
      detail::relaxation_coefficients(ops, s, d, A, B, C);
      double energy = ops.energy_functional(s);
      CHECK(std::abs(0.5 * C) < 1e-10 * (1.0 + energy));

      // vorticity vanishes structurally
      CHECK(std::abs(ops.vorticity_functional(s)) < 1e-12);
    }
  }
}

TEST_CASE("eliminated mixed fields satisfy their identities",
          "[semidiscrete][oracle]") {
  Mesh mesh = generate_rectangle({0, 1}, {0, 1}, 4, 4);
  FeSpace space(mesh, 1);
  MmsProblem mms;
  ModelParams p = params_from_theta(1.0, 1.0);
  DiscreteOperators ops(space, mms.depth(), p);
  State s = random_state(space, 0.2, 0.5, 13);

  MixedFields mf = reconstruct_mixed_fields(ops, s);
  std::vector<double> de, dp;
  ops.rhs(s, de, dp);

  // first equation: A_op eta_dot = M w
  auto lhs1 = ops.a_op().multiply(de);
  auto rhs1 = ops.mass().multiply(mf.w);
  for (int i = 0; i < space.n_dofs(); ++i)
    CHECK(lhs1[i] == Approx(rhs1[i]).margin(1e-10));

  // second equation: A_op phi_dot = c g M v - g M eta - (1/2) M f
  auto lhs2 = ops.a_op().multiply(dp);
  auto mv = ops.mass().multiply(mf.v);
  auto me = ops.mass().multiply(s.eta);
  auto mfv = ops.mass().multiply(mf.f);
  for (int i = 0; i < space.n_dofs(); ++i)
    CHECK(lhs2[i] == Approx(p.c * p.g * mv[i] - p.g * me[i] - 0.5 * mfv[i])
                         .margin(1e-10));
}
