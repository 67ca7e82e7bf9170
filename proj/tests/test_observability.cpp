#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "liecast/coefficients.hpp"
#include "liecast/ensemble.hpp"
#include "liecast/lie_core.hpp"
#include "liecast/observability.hpp"
#include "liecast/rng.hpp"
#include "liecast/structure.hpp"

using namespace liecast;

namespace {

ParametrizationSet rho_sigma() {
  return ParametrizationSet::make({[](double s) { return s; }}, {"sigma"});
}

GeneratorSet so3() { return catalog_set(Family::so, 3, "standard"); }

Profile random_profile(const ParamGrid& grid, const AlgebraDescriptor& d,
                       Rng& rng) {
  Profile p;
  p.grid = grid;
  for (int q = 0; q < grid.size(); ++q)
    p.states.push_back(random_group_element(d, rng));
  return p;
}

}  // namespace

TEST_CASE("moment_table: constant identity profile on [1,2]") {
  ParamGrid grid = build_grid(1.0, 2.0, 5, QuadratureRule::gauss_legendre);
  CoefficientFamily fam = CoefficientFamily::make(so3());
  Profile p = Profile::constant(grid, GroupElement::identity(Family::so, 3));
  MomentTable table = moment_table(p, fam, rho_sigma(), 2, grid);
  REQUIRE(table.dict.size() == 3);
  REQUIRE(table.dict.exponents[0] == std::vector<int>{0});

  Eigen::MatrixXd y = ensemble_output(p, fam, grid);
  CHECK((table.values[0] - y).norm() == 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double d1 = (i == j) ? 2.0 * 1.5 : 0.0;        // integral of sigma
      double d2 = (i == j) ? 2.0 * (7.0 / 3.0) : 0.0;  // integral of sigma^2
      CHECK(std::abs(table.values[1](i, j) - d1) < 1e-12);
      CHECK(std::abs(table.values[2](i, j) - d2) < 1e-12);
    }
}

TEST_CASE("moment_table: validates designated function and grid match") {
  CoefficientFamily fam = CoefficientFamily::make(so3());
  ParamGrid bad =
      ParamGrid::make(-1.0, 1.0, {-0.5, 0.0, 0.5}, {2.0 / 3, 2.0 / 3, 2.0 / 3});
  Profile p = Profile::constant(bad, GroupElement::identity(Family::so, 3));
  CHECK_THROWS_AS(moment_table(p, fam, rho_sigma(), 2, bad), Error);

  ParamGrid grid = build_grid(1.0, 2.0, 4, QuadratureRule::uniform_trapezoid);
  ParamGrid other = build_grid(1.0, 2.0, 5, QuadratureRule::uniform_trapezoid);
  Profile good = Profile::constant(grid, GroupElement::identity(Family::so, 3));
  CHECK_THROWS_AS(moment_table(good, fam, rho_sigma(), 2, other), Error);
}

TEST_CASE("moment_table: quadrature functional is linear in the profile sum") {
  ParamGrid grid = build_grid(1.0, 2.0, 4, QuadratureRule::gauss_legendre);
  CoefficientFamily fam = CoefficientFamily::make(so3());
  Rng rng(5);
  Profile p1 = random_profile(grid, fam.base.descriptor, rng);
  Profile p2 = random_profile(grid, fam.base.descriptor, rng);
  MomentTable t1 = moment_table(p1, fam, rho_sigma(), 2, grid);
  MomentTable t2 = moment_table(p2, fam, rho_sigma(), 2, grid);
  MonomialDictionary dict = MonomialDictionary::make(1, 0, 2);
  for (int pm = 0; pm < dict.size(); ++pm) {
    Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(3, 3);
    for (int q = 0; q < grid.size(); ++q) {
      double w = grid.weights[q] * dict.eval(rho_sigma(), pm, grid.nodes[q]);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          direct(i, j) += w * (phi_eval(fam, p1.states[q], i, j) +
                               phi_eval(fam, p2.states[q], i, j));
    }
    CHECK((direct - (t1.values[pm] + t2.values[pm])).norm() <= 1e-12);
  }
}

TEST_CASE("center_shift_profile: catalog validation and identity case") {
  ParamGrid grid = build_grid(1.0, 2.0, 3, QuadratureRule::uniform_trapezoid);
  GeneratorSet s = so3();
  Rng rng(11);
  Profile p = random_profile(grid, s.descriptor, rng);
  Profile same = center_shift_profile(p, GroupElement::identity(Family::so, 3));
  CHECK(profile_sup_distance(p, same) == 0.0);
  // A rotation by pi about the third axis is not central in this group.
  GroupElement not_central = group_exp(3.14159265358979323846 * s.elements[2]);
  CHECK_THROWS_AS(center_shift_profile(p, not_central), Error);
}

TEST_CASE("moment_table: central translation leaves the table unchanged") {
  ParamGrid grid = build_grid(1.0, 2.0, 4, QuadratureRule::gauss_legendre);
  GeneratorSet su2 = catalog_set(Family::su, 2, "compact");
  CoefficientFamily fam = CoefficientFamily::make(su2);
  Rng rng(17);
  Profile p = random_profile(grid, su2.descriptor, rng);
  GroupElement minus_i = center_elements(Family::su, 2).elements[1];
  Profile shifted = center_shift_profile(p, minus_i);
  MomentTable t1 = moment_table(p, fam, rho_sigma(), 3, grid);
  MomentTable t2 = moment_table(shifted, fam, rho_sigma(), 3, grid);
  for (size_t pm = 0; pm < t1.values.size(); ++pm)
    CHECK((t1.values[pm] - t2.values[pm]).norm() == 0.0);
}

TEST_CASE("moment_separation_test: identical profiles are indistinguishable") {
  ParamGrid grid = build_grid(1.0, 2.0, 5, QuadratureRule::gauss_legendre);
  CoefficientFamily fam = CoefficientFamily::make(so3());
  Rng rng(3);
  Profile p = random_profile(grid, fam.base.descriptor, rng);
  Profile copy = p;
  SeparationVerdict v =
      moment_separation_test(p, copy, fam, rho_sigma(), 4, 1e-12);
  CHECK_FALSE(v.separated);
  CHECK(v.max_gap == 0.0);
}

TEST_CASE("moment_separation_test: identity vs rotation curve separates") {
  ParamGrid grid = build_grid(1.0, 2.0, 9, QuadratureRule::gauss_legendre);
  GeneratorSet s = so3();
  CoefficientFamily fam = CoefficientFamily::make(s);
  Profile p1 = Profile::constant(grid, GroupElement::identity(Family::so, 3));
  Profile p2;
  p2.grid = grid;
  for (int q = 0; q < grid.size(); ++q)
    p2.states.push_back(group_exp((grid.nodes[q] - 1.0) * s.elements[2]));

  SeparationVerdict v =
      moment_separation_test(p1, p2, fam, rho_sigma(), 2, 1e-3);
  CHECK(v.separated);
  CHECK(v.monomial == 0);
  CHECK(v.i == 0);
  CHECK(v.j == 0);
  // Degree-0 gap: integral over [1,2] of 2 cos(sigma - 1) - 2 d sigma.
  double exact = std::abs(2.0 * std::sin(1.0) - 2.0);
  CHECK(std::abs(std::abs(v.gap) - exact) < 1e-12);
  CHECK(v.gap > 1e-3);

  // Consistency: a deeper table separates at the same leading entry.
  SeparationVerdict v4 =
      moment_separation_test(p1, p2, fam, rho_sigma(), 4, 1e-3);
  CHECK(v4.separated);
  CHECK(v4.monomial == v.monomial);
  CHECK(v4.i == v.i);
  CHECK(v4.j == v.j);
  CHECK(v4.gap == v.gap);
}

TEST_CASE("moment_separation_test: center translates stay indistinguishable") {
  ParamGrid grid = build_grid(1.0, 2.0, 4, QuadratureRule::gauss_legendre);
  GeneratorSet su2 = catalog_set(Family::su, 2, "compact");
  CoefficientFamily fam = CoefficientFamily::make(su2);
  Rng rng(29);
  Profile p = random_profile(grid, su2.descriptor, rng);
  Profile shifted =
      center_shift_profile(p, center_elements(Family::su, 2).elements[1]);
  SeparationVerdict v =
      moment_separation_test(p, shifted, fam, rho_sigma(), 4, 1e-12);
  CHECK_FALSE(v.separated);
  CHECK(v.max_gap == 0.0);
}

TEST_CASE("ProfileAnsatz: realize matches the closed-form curve") {
  ParamGrid grid = build_grid(1.0, 2.0, 5, QuadratureRule::gauss_legendre);
  GeneratorSet s = so3();
  ProfileAnsatz ans = ProfileAnsatz::zero(s, 1);
  CHECK(ans.a.rows() == 3);
  CHECK(ans.a.cols() == 2);
  Profile idp = ans.realize(s, grid);
  for (int q = 0; q < grid.size(); ++q)
    CHECK((idp.states[q].m - Mat::Identity(3, 3)).norm() == 0.0);

  ans.a(2, 1) = 1.0;  // sigma X3
  Profile curve = ans.realize(s, grid);
  for (int q = 0; q < grid.size(); ++q) {
    GroupElement expect = group_exp(grid.nodes[q] * s.elements[2]);
    CHECK((curve.states[q].m - expect.m).norm() <= 1e-14);
  }
}

TEST_CASE("reconstruct_profile: identity truth converges at the zero seed") {
  ParamGrid grid = build_grid(1.0, 2.0, 5, QuadratureRule::gauss_legendre);
  GeneratorSet s = so3();
  CoefficientFamily fam = CoefficientFamily::make(s);
  Profile truth = Profile::constant(grid, GroupElement::identity(Family::so, 3));
  MomentTable table = moment_table(truth, fam, rho_sigma(), 3, grid);
  ReconstructionReport rep =
      reconstruct_profile(table, 1, fam, rho_sigma(), grid, 1, &truth);
  CHECK(rep.converged);
  CHECK(rep.residual <= 1e-10);
  CHECK(rep.best_seed == 0);
  CHECK(rep.center_resolved_distance <= 1e-10);
  REQUIRE(rep.seed_initial_residuals.size() == 1);
  CHECK(rep.residual <= rep.seed_initial_residuals[0] + 1e-15);
}

TEST_CASE("reconstruct_profile: degree-1 truth recovered from its table") {
  ParamGrid grid = build_grid(1.0, 2.0, 5, QuadratureRule::gauss_legendre);
  GeneratorSet s = so3();
  CoefficientFamily fam = CoefficientFamily::make(s);
  ProfileAnsatz truth_ansatz = ProfileAnsatz::zero(s, 1);
  truth_ansatz.a(2, 1) = 1.0;
  Profile truth = truth_ansatz.realize(s, grid);
  MomentTable table = moment_table(truth, fam, rho_sigma(), 3, grid);
  ReconstructionReport rep =
      reconstruct_profile(table, 1, fam, rho_sigma(), grid, 8, &truth);
  CHECK(rep.converged);
  CHECK(rep.center_resolved_distance <= 1e-6);
  CHECK(rep.seed_residuals.size() <= 8);
  for (size_t k = 0; k < rep.seed_residuals.size(); ++k)
    CHECK(rep.seed_residuals[k] <= rep.seed_initial_residuals[k] + 1e-15);
}

TEST_CASE("reconstruct_profile: center translate is an accepted answer") {
  ParamGrid grid = build_grid(1.0, 2.0, 4, QuadratureRule::gauss_legendre);
  GeneratorSet su2 = catalog_set(Family::su, 2, "compact");
  CoefficientFamily fam = CoefficientFamily::make(su2);
  ProfileAnsatz truth_ansatz = ProfileAnsatz::zero(su2, 1);
  truth_ansatz.a(2, 1) = 0.8;
  Profile truth = truth_ansatz.realize(su2, grid);
  Profile translated =
      center_shift_profile(truth, center_elements(Family::su, 2).elements[1]);
  MomentTable t_truth = moment_table(truth, fam, rho_sigma(), 3, grid);
  MomentTable t_trans = moment_table(translated, fam, rho_sigma(), 3, grid);
  for (size_t pm = 0; pm < t_truth.values.size(); ++pm)
    CHECK((t_truth.values[pm] - t_trans.values[pm]).norm() == 0.0);

  ReconstructionReport rep =
      reconstruct_profile(t_truth, 1, fam, rho_sigma(), grid, 8, &truth);
  CHECK(rep.converged);
  CHECK(rep.center_resolved_distance <= 1e-6);
}

TEST_CASE("reconstruct_profile: failure report without matching ansatz") {
  // d_max = 0 cannot represent a sigma-dependent profile; the report must
  // flag non-convergence and still carry the best attempt.
  ParamGrid grid = build_grid(1.0, 2.0, 5, QuadratureRule::gauss_legendre);
  GeneratorSet s = so3();
  CoefficientFamily fam = CoefficientFamily::make(s);
  ProfileAnsatz truth_ansatz = ProfileAnsatz::zero(s, 1);
  truth_ansatz.a(2, 1) = 2.5;
  truth_ansatz.a(0, 1) = -1.0;
  Profile truth = truth_ansatz.realize(s, grid);
  MomentTable table = moment_table(truth, fam, rho_sigma(), 3, grid);
  ReconstructionReport rep =
      reconstruct_profile(table, 0, fam, rho_sigma(), grid, 2, nullptr, 1e-10);
  CHECK_FALSE(rep.converged);
  CHECK(rep.residual > 1e-10);
  CHECK(rep.center_resolved_distance == -1.0);
  CHECK(std::isfinite(rep.residual));
}

TEST_CASE("reconstruct_profile: deterministic across repeat runs") {
  ParamGrid grid = build_grid(1.0, 2.0, 4, QuadratureRule::gauss_legendre);
  GeneratorSet s = so3();
  CoefficientFamily fam = CoefficientFamily::make(s);
  ProfileAnsatz truth_ansatz = ProfileAnsatz::zero(s, 1);
  truth_ansatz.a(1, 0) = 0.4;
  Profile truth = truth_ansatz.realize(s, grid);
  MomentTable table = moment_table(truth, fam, rho_sigma(), 3, grid);
  ReconstructionReport r1 =
      reconstruct_profile(table, 1, fam, rho_sigma(), grid, 4, &truth);
  ReconstructionReport r2 =
      reconstruct_profile(table, 1, fam, rho_sigma(), grid, 4, &truth);
  CHECK(r1.residual == r2.residual);
  CHECK(r1.best_seed == r2.best_seed);
  CHECK((r1.estimate.a - r2.estimate.a).norm() == 0.0);
}
