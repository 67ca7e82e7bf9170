#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "liecast/coefficients.hpp"
#include "liecast/ensemble.hpp"
#include "liecast/lie_core.hpp"

namespace liecast {

struct SpherePoint {
  Eigen::VectorXd x;  // unit vector

  int n() const { return static_cast<int>(x.size()); }
  static SpherePoint make(const Eigen::VectorXd& x, double tol = kTolGrp);
};

struct SphereProfile {
  ParamGrid grid;
  std::vector<SpherePoint> points;  // one per node

  static SphereProfile constant(const ParamGrid& grid, const SpherePoint& x);
};

// Induced action field of a rotation generator: tau(X)(x) = X x, tangent to
// the sphere. Throws on a non-so element or a dimension mismatch.
Eigen::VectorXd tau_field(const AlgebraElement& x_alg, const SpherePoint& x);

// Deterministic rotation g with g e1 = x (Householder reflection pair). Near
// x = e1 the section is the identity; near the antipode it is the fixed
// half-turn about e2, diag(-1, 1, -1, 1, ...).
GroupElement sphere_section(const Eigen::VectorXd& x);

// Trapezoid average over the circle stabilizing e1 of phi^{ij}(g h(theta)),
// with g a section for x and j defaulting to the e1 generator slot. S^2 only.
double average_over_stabilizer(const CoefficientFamily& fam, int i,
                               const SpherePoint& x, int h_quadrature_points,
                               int j = 0);
// Same average at an explicit section; any g with g e1 = x gives the same
// value, which is what makes the descended functions well defined.
double average_over_stabilizer_at(const CoefficientFamily& fam, int i,
                                  const GroupElement& section,
                                  int h_quadrature_points, int j = 0);

struct HomogeneousReport {
  bool ok = false;
  int n_samples = 0;
  double max_bracket_residual = 0.0;     // [tau_i, tau_j] + det tau_k
  double max_derivative_residual = 0.0;  // tau_i phibar^j - det phibar^k
  double max_tangency_defect = 0.0;      // <x, tau(X) x>
  double min_tangent_sigma = 0.0;        // 2nd singular value, tau fields
  double min_differential_sigma = 0.0;   // 2nd singular value, d phibar
  std::string failure;                   // empty when ok
};

// Checks the S^2 bracket sign law, the coefficient derivative law, and the
// rank-2 spanning of both the induced fields and the descended differentials
// at canonical points (poles, equator) plus random samples.
HomogeneousReport verify_homogeneous_relations(int n_samples, double tol,
                                               std::uint64_t seed = 1);

struct SphereTrajectory {
  std::vector<double> times;
  std::vector<SphereProfile> profiles;
  double max_norm_defect = 0.0;
};

// Per-node sphere dynamics x' = A(t, sigma) x via the rotation-exponential
// update x <- exp(h A) x, steps split at input switching times. Unit norm is
// measured, never restored; drift past 100 x tol_grp aborts.
SphereTrajectory integrate_sphere_ensemble(const ParamGrid& grid,
                                           const SphereProfile& init,
                                           const GeneratorSet& s,
                                           const ParametrizationSet& ps,
                                           const PiecewiseConstantInput& u,
                                           double T, double dt,
                                           int threads = 1);

}  // namespace liecast
