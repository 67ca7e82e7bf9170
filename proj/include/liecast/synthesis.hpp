#pragma once

#include <functional>
#include <vector>

#include "liecast/ensemble.hpp"
#include "liecast/lie_core.hpp"
#include "liecast/monomial.hpp"
#include "liecast/structure.hpp"

namespace liecast {

// Profile trajectory to be tracked: uniformly spaced sample times, one
// profile per time, all on one grid. The optional map gives exact states.
struct TargetTrajectory {
  std::vector<double> times;
  std::vector<Profile> profiles;
  std::function<GroupElement(double, double)> exact;  // (t, sigma), optional

  static TargetTrajectory make(std::vector<double> times,
                               std::vector<Profile> profiles);
  // Samples the map on times x grid nodes.
  static TargetTrajectory from_map(
      const std::vector<double>& times, const ParamGrid& grid,
      const std::function<GroupElement(double, double)>& map);
  static TargetTrajectory from_trajectory(const Trajectory& traj);
};

// Frame coefficients c_i(t_k, sigma_q) of a target, one sample per
// displacement interval [t_k, t_{k+1}].
struct CoefficientField {
  std::vector<double> times;  // interval start times, size N
  ParamGrid grid;
  std::vector<Eigen::MatrixXd> samples;  // per time: (generator) x (node)
  double max_residual = 0.0;  // worst frame-reconstruction defect
};

// Body velocity log(g_k^{-1} g_{k+1}) / dt minus drift, expanded over the
// generators by minimal-norm least squares in the B_theta inner product.
// Throws if the set does not span, if a displacement log leaves the principal
// branch (Frobenius norm >= pi/2), or if a frame residual exceeds tol_frame.
CoefficientField extract_coefficients(const TargetTrajectory& target,
                                      const DriftMap& drift,
                                      const GeneratorSet& s,
                                      double tol_frame = 1e-8);

struct FitResult {
  ControlSignal signal;  // monomial degrees in [1, K+1]
  double delta = 0.0;    // sup over (i, t, node) of |fit - c_i|
  bool rank_deficient = false;
  int rank = 0;
};

// Per (i, t): least squares for rho_1^{-1} c_i over monomials of degree <= K,
// multiplied back by the designated rho_1. Rank deficiency falls back to the
// pseudoinverse and sets the warning flag.
FitResult fit_monomials(const CoefficientField& c, const ParametrizationSet& ps,
                        int k);

struct TrackResult {
  Trajectory trajectory;
  double epsilon = 0.0;  // sup over target times of profile_sup_distance
};

// Simulates the extended ensemble under the fitted signal and measures the
// tracking error against the target at the target's sample times. dt must
// divide the target spacing. T = 0 returns the initial profile and zero.
TrackResult track_extended(const Profile& init, const ControlSignal& u,
                           const DriftMap& drift, const GeneratorSet& s,
                           const ParametrizationSet& ps, double T, double dt,
                           const TargetTrajectory& target, int threads = 1);

struct StudyRow {
  int k = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  double seconds = 0.0;  // wall time; the one nondeterministic column
};

// Extracts once, then fits and tracks per degree. Rows are sorted by degree.
std::vector<StudyRow> convergence_study(const TargetTrajectory& target,
                                        const DriftMap& drift,
                                        const GeneratorSet& s,
                                        const ParametrizationSet& ps,
                                        const std::vector<int>& degrees,
                                        double dt, int threads = 1);

}  // namespace liecast
