#pragma once

#include <cstdint>
#include <vector>

#include "liecast/coefficients.hpp"
#include "liecast/ensemble.hpp"
#include "liecast/lie_core.hpp"
#include "liecast/monomial.hpp"

namespace liecast {

// Quadrature moments m^{ij}_p = sum_q w_q p(sigma_q) phi^{ij}(g_q) for every
// monomial of degree <= k_obs. The empty monomial column reproduces
// ensemble_output exactly.
struct MomentTable {
  MonomialDictionary dict;  // degrees 0..k_obs, graded-lex
  std::vector<Eigen::MatrixXd> values;  // per monomial: (i, j) entries
  int k_obs = 0;
};

MomentTable moment_table(const Profile& profile, const CoefficientFamily& fam,
                         const ParametrizationSet& ps, int k_obs,
                         const ParamGrid& grid);

struct SeparationVerdict {
  bool separated = false;
  // First entry past tol in (monomial, i, j) order.
  int monomial = -1;
  int i = -1;
  int j = -1;
  double gap = 0.0;      // table difference at that entry
  double max_gap = 0.0;  // largest difference over the whole table
};

// Compares the two moment tables entry by entry in the fixed ordering.
SeparationVerdict moment_separation_test(const Profile& p1, const Profile& p2,
                                         const CoefficientFamily& fam,
                                         const ParametrizationSet& ps,
                                         int k_obs, double tol);

// Node-wise right translation by a catalog center element.
Profile center_shift_profile(const Profile& p, const GroupElement& z);

// sigma -> g0 exp(sum_{i,d} a(i,d) sigma^d X_i), algebra-valued polynomial
// curve of degree <= d_max over one generator set.
struct ProfileAnsatz {
  GroupElement g0;
  int d_max = 0;
  Eigen::MatrixXd a;  // (generator) x (degree 0..d_max)

  static ProfileAnsatz zero(const GeneratorSet& s, int d_max);
  Profile realize(const GeneratorSet& s, const ParamGrid& grid) const;
};

struct ReconstructionReport {
  ProfileAnsatz estimate;
  double residual = 0.0;  // Euclidean norm of the table mismatch at optimum
  // min over center elements z of sup distance between estimate z and the
  // truth; -1 when no truth was supplied.
  double center_resolved_distance = -1.0;
  int best_seed = -1;
  bool converged = false;
  std::vector<double> seed_initial_residuals;
  std::vector<double> seed_residuals;
};

// Levenberg-Marquardt on the squared table mismatch over the ansatz
// coefficients, multi-start: seed 0 starts at zero, later seeds draw
// parameters uniformly from [-1, 1]. Best result by (residual, seed index).
// Never throws on non-convergence; the report carries the best attempt.
ReconstructionReport reconstruct_profile(const MomentTable& target, int d_max,
                                         const CoefficientFamily& fam,
                                         const ParametrizationSet& ps,
                                         const ParamGrid& grid, int seeds = 8,
                                         const Profile* truth = nullptr,
                                         double residual_threshold = 1e-8,
                                         std::uint64_t rng_seed = 1);

}  // namespace liecast
