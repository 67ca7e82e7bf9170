#include "liecast/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "liecast/rng.hpp"

namespace liecast {

namespace {

void check_profile_grid(const Profile& p, const ParamGrid& grid) {
  if (static_cast<int>(p.states.size()) != grid.size())
    throw Error("profile does not match the grid");
  for (int q = 0; q < grid.size(); ++q)
    if (std::abs(p.grid.nodes[q] - grid.nodes[q]) > 1e-12)
      throw Error("profile does not match the grid");
}

}  // namespace

MomentTable moment_table(const Profile& profile, const CoefficientFamily& fam,
                         const ParametrizationSet& ps, int k_obs,
                         const ParamGrid& grid) {
  if (k_obs < 0) throw Error("moment depth must be nonnegative");
  check_profile_grid(profile, grid);
  for (int q = 0; q < grid.size(); ++q)
    if (std::abs(ps.eval(ps.designated, grid.nodes[q])) <= 1e-12)
      throw Error("designated parametrization vanishes on a grid node");

  MomentTable table;
  table.k_obs = k_obs;
  table.dict = MonomialDictionary::make(ps.size(), 0, k_obs);
  int m = fam.size();
  table.values.assign(static_cast<size_t>(table.dict.size()),
                      Eigen::MatrixXd::Zero(m, m));
  // Node-major accumulation; the degree-0 slice then matches ensemble_output
  // term for term.
  for (int q = 0; q < grid.size(); ++q) {
    for (int p = 0; p < table.dict.size(); ++p) {
      double w = grid.weights[q] * table.dict.eval(ps, p, grid.nodes[q]);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          table.values[static_cast<size_t>(p)](i, j) +=
              w * phi_eval(fam, profile.states[q], i, j);
    }
  }
  return table;
}

SeparationVerdict moment_separation_test(const Profile& p1, const Profile& p2,
                                         const CoefficientFamily& fam,
                                         const ParametrizationSet& ps,
                                         int k_obs, double tol) {
  if (p1.states.size() != p2.states.size())
    throw Error("profiles live on different grids");
  for (size_t q = 0; q < p1.grid.nodes.size(); ++q)
    if (std::abs(p1.grid.nodes[q] - p2.grid.nodes[q]) > 1e-12)
      throw Error("profiles live on different grids");

  MomentTable t1 = moment_table(p1, fam, ps, k_obs, p1.grid);
  MomentTable t2 = moment_table(p2, fam, ps, k_obs, p1.grid);
  SeparationVerdict v;
  int m = fam.size();
  for (int p = 0; p < t1.dict.size(); ++p)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double diff = t1.values[static_cast<size_t>(p)](i, j) -
                      t2.values[static_cast<size_t>(p)](i, j);
        v.max_gap = std::max(v.max_gap, std::abs(diff));
        if (!v.separated && std::abs(diff) > tol) {
          v.separated = true;
          v.monomial = p;
          v.i = i;
          v.j = j;
          v.gap = std::abs(diff);
        }
      }
  return v;
}

Profile center_shift_profile(const Profile& p, const GroupElement& z) {
  if (p.states.empty()) throw Error("profile is empty");
  CenterCatalog catalog = center_elements(z.family, z.n);
  bool central = false;
  for (const GroupElement& c : catalog.elements)
    if ((c.m - z.m).norm() <= 1e-12) {
      central = true;
      break;
    }
  if (!central) throw Error("element is not in the center catalog");
  Profile out;
  out.grid = p.grid;
  out.states.reserve(p.states.size());
  for (const GroupElement& g : p.states) out.states.push_back(g * z);
  return out;
}

ProfileAnsatz ProfileAnsatz::zero(const GeneratorSet& s, int d_max) {
  if (d_max < 0) throw Error("ansatz degree must be nonnegative");
  ProfileAnsatz a;
  a.g0 = GroupElement::identity(s.descriptor.family, s.descriptor.n);
  a.d_max = d_max;
  a.a = Eigen::MatrixXd::Zero(s.size(), d_max + 1);
  return a;
}

Profile ProfileAnsatz::realize(const GeneratorSet& s,
                               const ParamGrid& grid) const {
  if (a.rows() != s.size() || a.cols() != d_max + 1)
    throw Error("ansatz coefficient shape mismatch");
  Family fam = s.descriptor.family;
  int n = s.descriptor.n;
  Profile p;
  p.grid = grid;
  p.states.reserve(static_cast<size_t>(grid.size()));
  for (int q = 0; q < grid.size(); ++q) {
    double sigma = grid.nodes[q];
    Mat combo = Mat::Zero(n, n);
    double power = 1.0;
    for (int d = 0; d <= d_max; ++d) {
      for (int i = 0; i < s.size(); ++i)
        if (a(i, d) != 0.0) combo += (a(i, d) * power) * s.elements[i].m;
      power *= sigma;
    }
    GroupElement g = group_exp(AlgebraElement::make(fam, combo));
    p.states.push_back(g0.n == n ? g0 * g : g);
  }
  return p;
}

namespace {

Eigen::VectorXd table_mismatch(const MomentTable& have,
                               const MomentTable& want) {
  int m = static_cast<int>(want.values.front().rows());
  Eigen::VectorXd r(static_cast<Eigen::Index>(want.values.size()) * m * m);
  Eigen::Index at = 0;
  for (size_t p = 0; p < want.values.size(); ++p)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) r(at++) = have.values[p](i, j) -
                                            want.values[p](i, j);
  return r;
}

}  // namespace

ReconstructionReport reconstruct_profile(const MomentTable& target, int d_max,
                                         const CoefficientFamily& fam,
                                         const ParametrizationSet& ps,
                                         const ParamGrid& grid, int seeds,
                                         const Profile* truth,
                                         double residual_threshold,
                                         std::uint64_t rng_seed) {
  if (seeds < 1) throw Error("reconstruction needs at least one seed");
  const GeneratorSet& s = fam.base;
  int m = s.size();
  int n_params = m * (d_max + 1);

  auto unpack = [&](const Eigen::VectorXd& theta) {
    ProfileAnsatz a = ProfileAnsatz::zero(s, d_max);
    for (int d = 0; d <= d_max; ++d)
      for (int i = 0; i < m; ++i) a.a(i, d) = theta(d * m + i);
    return a;
  };
  auto residual_vec = [&](const Eigen::VectorXd& theta) {
    MomentTable t = moment_table(unpack(theta).realize(s, grid), fam, ps,
                                 target.k_obs, grid);
    return table_mismatch(t, target);
  };

  ReconstructionReport report;
  report.residual = std::numeric_limits<double>::infinity();
  Rng rng(rng_seed);

  for (int seed = 0; seed < seeds; ++seed) {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n_params);
    if (seed > 0)
      for (int k = 0; k < n_params; ++k) theta(k) = rng.uniform(-1.0, 1.0);

    Eigen::VectorXd r = residual_vec(theta);
    double f = r.squaredNorm();
    report.seed_initial_residuals.push_back(std::sqrt(f));

    double mu = 1e-3;
    for (int iter = 0; iter < 200; ++iter) {
      if (std::sqrt(f) <= 1e-13) break;
      Eigen::MatrixXd jac(r.size(), n_params);
      const double h = 1e-6;
      for (int k = 0; k < n_params; ++k) {
        Eigen::VectorXd tp = theta, tm = theta;
        tp(k) += h;
        tm(k) -= h;
        jac.col(k) = (residual_vec(tp) - residual_vec(tm)) / (2.0 * h);
      }
      Eigen::MatrixXd lhs = jac.transpose() * jac;
      lhs.diagonal().array() += mu;
      Eigen::VectorXd step = lhs.ldlt().solve(-jac.transpose() * r);
      if (!step.allFinite()) {
        mu *= 2.0;
        continue;
      }
      Eigen::VectorXd trial = theta + step;
      Eigen::VectorXd r_trial = residual_vec(trial);
      double f_trial = r_trial.squaredNorm();
      if (f_trial < f) {
        theta = trial;
        r = r_trial;
        f = f_trial;
        mu = std::max(mu / 3.0, 1e-14);
        if (step.norm() <= 1e-14) break;
      } else {
        mu *= 2.0;
        if (mu > 1e14) break;
      }
    }

    double final_res = std::sqrt(f);
    report.seed_residuals.push_back(final_res);
    if (final_res < report.residual) {
      report.residual = final_res;
      report.best_seed = seed;
      report.estimate = unpack(theta);
    }
  }

  report.converged = report.residual <= residual_threshold;
  if (truth != nullptr) {
    Profile est = report.estimate.realize(s, grid);
    CenterCatalog catalog =
        center_elements(s.descriptor.family, s.descriptor.n);
    double best = std::numeric_limits<double>::infinity();
    for (const GroupElement& z : catalog.elements)
      best = std::min(best,
                      profile_sup_distance(center_shift_profile(est, z), *truth));
    report.center_resolved_distance = best;
  }
  return report;
}

}  // namespace liecast
