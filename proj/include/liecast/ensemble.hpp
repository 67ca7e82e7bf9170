#pragma once

#include <functional>
#include <string>
#include <vector>

#include "liecast/coefficients.hpp"
#include "liecast/lie_core.hpp"
#include "liecast/monomial.hpp"
#include "liecast/structure.hpp"

namespace liecast {

struct ParamGrid {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> nodes;    // strictly increasing in [a, b]
  std::vector<double> weights;  // sum = b - a

  int size() const { return static_cast<int>(nodes.size()); }

  // Validates the invariants; use for hand-built grids.
  static ParamGrid make(double a, double b, std::vector<double> nodes,
                        std::vector<double> weights);
};

enum class QuadratureRule { uniform_trapezoid, gauss_legendre };

// Nodes and weights on [a, b], 0 < a < b, Q >= 2.
ParamGrid build_grid(double a, double b, int q, QuadratureRule rule);

struct ParametrizationSet {
  std::vector<std::function<double(double)>> funcs;
  std::vector<std::string> names;
  int designated = 0;  // index of the nonvanishing function

  int size() const { return static_cast<int>(funcs.size()); }
  double eval(int s, double sigma) const { return funcs.at(s)(sigma); }

  static ParametrizationSet make(
      std::vector<std::function<double(double)>> funcs,
      std::vector<std::string> names, int designated = 0);
};

struct SeparatingVerdict {
  bool separating = false;
  bool nonvanishing = false;
  int witness_q = -1;  // offending node pair (separation) or node (vanishing)
  int witness_qp = -1;

  bool ok() const { return separating && nonvanishing; }
};

// Pairwise node separation of {rho_s} (or {rho_s^2} with the flag), plus the
// nonvanishing check of the designated function.
SeparatingVerdict check_separating(const ParametrizationSet& ps,
                                   const ParamGrid& grid, bool squared = false);

struct Profile {
  ParamGrid grid;
  std::vector<GroupElement> states;  // one per node

  static Profile constant(const ParamGrid& grid, const GroupElement& g);
};

double profile_sup_distance(const Profile& p1, const Profile& p2);

// Segments (i, s, nu, t_end): on (t_{p-1}, t_p] the only active control is
// u_{i,s} = nu. Switching times strictly increasing, the last equals T.
struct PiecewiseConstantInput {
  struct Segment {
    int i = 0;
    int s = 0;
    double nu = 0.0;
    double t_end = 0.0;
  };
  std::vector<Segment> segments;

  static PiecewiseConstantInput make(std::vector<Segment> segments);
};

// Sampled extended control u_{i,p}(t): one m x P coefficient matrix per time
// sample, piecewise linear in t between samples.
struct ControlSignal {
  std::vector<double> times;  // ascending, uniform spacing
  MonomialDictionary dict;
  std::vector<Eigen::MatrixXd> coeffs;  // per time: (generator) x (monomial)

  Eigen::MatrixXd eval(double t) const;  // linear interpolation, clamped

  static ControlSignal make(std::vector<double> times, MonomialDictionary dict,
                            std::vector<Eigen::MatrixXd> coeffs);
};

using DriftMap = std::function<AlgebraElement(double)>;  // sigma -> Z(sigma)

struct Trajectory {
  std::vector<double> times;
  std::vector<Profile> profiles;
  double max_group_defect = 0.0;
};

// Fixed-step classical RK4 on the per-node matrix equation g' = g A(t, sigma),
// A = drift(sigma) + controls. Steps split at input switching times. States
// are never re-orthonormalized; the constraint defect is measured and the run
// aborts past 100 x tol_grp. dt must divide T within 1e-12.
Trajectory integrate_ensemble(const ParamGrid& grid, const Profile& init,
                              const DriftMap& drift, const GeneratorSet& s,
                              const ParametrizationSet& ps,
                              const PiecewiseConstantInput& u, double T,
                              double dt, int threads = 1);

Trajectory integrate_ensemble(const ParamGrid& grid, const Profile& init,
                              const DriftMap& drift, const GeneratorSet& s,
                              const ParametrizationSet& ps,
                              const ControlSignal& u, double T, double dt,
                              int threads = 1);

// y^{ij} = sum_q w_q phi^{ij}(g_q).
Eigen::MatrixXd ensemble_output(const Profile& profile,
                                const CoefficientFamily& fam,
                                const ParamGrid& grid);

}  // namespace liecast
