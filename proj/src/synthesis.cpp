#include "liecast/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace liecast {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_uniform_times(const std::vector<double>& times) {
  if (times.empty()) throw Error("target needs at least one sample time");
  if (times.size() < 2) return;
  double spacing = times[1] - times[0];
  if (!(spacing > 0.0)) throw Error("target times must increase");
  for (size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - times[k - 1] - spacing) > 1e-12)
      throw Error("target times must be uniformly spaced");
}

void check_shared_grid(const std::vector<Profile>& profiles) {
  for (size_t k = 1; k < profiles.size(); ++k) {
    if (profiles[k].grid.nodes.size() != profiles[0].grid.nodes.size())
      throw Error("target profiles must share one grid");
    for (size_t q = 0; q < profiles[0].grid.nodes.size(); ++q)
      if (std::abs(profiles[k].grid.nodes[q] - profiles[0].grid.nodes[q]) >
          1e-12)
        throw Error("target profiles must share one grid");
  }
}

int span_rank(const std::vector<AlgebraElement>& elems) {
  int n = elems.front().n;
  Eigen::MatrixXd v(2 * n * n, static_cast<Eigen::Index>(elems.size()));
  for (size_t c = 0; c < elems.size(); ++c)
    for (int col = 0; col < n; ++col)
      for (int row = 0; row < n; ++row) {
        v(col * n + row, static_cast<Eigen::Index>(c)) =
            elems[c].m(row, col).real();
        v(n * n + col * n + row, static_cast<Eigen::Index>(c)) =
            elems[c].m(row, col).imag();
      }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
  double top = svd.singularValues()(0);
  int rank = 0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > 1e-10 * top) ++rank;
  return rank;
}

}  // namespace

TargetTrajectory TargetTrajectory::make(std::vector<double> times,
                                        std::vector<Profile> profiles) {
  check_uniform_times(times);
  if (times.size() != profiles.size())
    throw Error("target needs one profile per sample time");
  check_shared_grid(profiles);
  TargetTrajectory t;
  t.times = std::move(times);
  t.profiles = std::move(profiles);
  return t;
}

TargetTrajectory TargetTrajectory::from_map(
    const std::vector<double>& times, const ParamGrid& grid,
    const std::function<GroupElement(double, double)>& map) {
  if (!map) throw Error("target map is empty");
  std::vector<Profile> profiles;
  profiles.reserve(times.size());
  for (double t : times) {
    Profile p;
    p.grid = grid;
    p.states.reserve(static_cast<size_t>(grid.size()));
    for (int q = 0; q < grid.size(); ++q)
      p.states.push_back(map(t, grid.nodes[q]));
    profiles.push_back(std::move(p));
  }
  TargetTrajectory t = make(times, std::move(profiles));
  t.exact = map;
  return t;
}

TargetTrajectory TargetTrajectory::from_trajectory(const Trajectory& traj) {
  return make(traj.times, traj.profiles);
}

CoefficientField extract_coefficients(const TargetTrajectory& target,
                                      const DriftMap& drift,
                                      const GeneratorSet& s, double tol_frame) {
  if (target.times.size() < 2)
    throw Error("coefficient extraction needs at least two target times");
  Family fam = s.descriptor.family;
  int n = s.descriptor.n;
  int m = s.size();
  if (span_rank(s.elements) != algebra_dim(fam, n))
    throw Error("generator set does not span the algebra");

  // Gram matrix of the generators in the B_theta inner product; the
  // minimal-norm expansion solves G c = v with the pseudoinverse.
  Eigen::MatrixXd gram(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      gram(i, j) = btheta(s.elements[i], s.elements[j]);
  Eigen::JacobiSVD<Eigen::MatrixXd> gram_svd(
      gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
  gram_svd.setThreshold(1e-12);

  const ParamGrid& grid = target.profiles.front().grid;
  double spacing = target.times[1] - target.times[0];
  int n_samples = static_cast<int>(target.times.size()) - 1;

  CoefficientField field;
  field.grid = grid;
  field.times.assign(target.times.begin(), target.times.end() - 1);
  field.samples.reserve(static_cast<size_t>(n_samples));

  for (int k = 0; k < n_samples; ++k) {
    Eigen::MatrixXd ck(m, grid.size());
    for (int q = 0; q < grid.size(); ++q) {
      Mat d = inverse(target.profiles[k].states[q]).m *
              target.profiles[k + 1].states[q].m;
      Mat l = d.log();
      if (!(l.norm() < 0.5 * kPi))
        throw Error("displacement log outside the principal branch; "
                    "reduce the target spacing");
      Mat v = l / spacing;
      if (drift) {
        AlgebraElement z = drift(grid.nodes[q]);
        if (z.family != fam || z.n != n)
          throw Error("drift element does not match the generator set");
        v -= z.m;
      }
      AlgebraElement velem = AlgebraElement::make(fam, v, 1e-4);
      Eigen::VectorXd rhs(m);
      for (int i = 0; i < m; ++i) rhs(i) = btheta(s.elements[i], velem);
      Eigen::VectorXd coef = gram_svd.solve(rhs);
      Mat recon = Mat::Zero(n, n);
      for (int i = 0; i < m; ++i) recon += coef(i) * s.elements[i].m;
      double residual = (recon - v).norm();
      if (residual > tol_frame)
        throw Error("frame reconstruction residual " +
                    std::to_string(residual) + " exceeds the tolerance");
      field.max_residual = std::max(field.max_residual, residual);
      for (int i = 0; i < m; ++i) ck(i, q) = coef(i);
    }
    field.samples.push_back(std::move(ck));
  }
  return field;
}

FitResult fit_monomials(const CoefficientField& c, const ParametrizationSet& ps,
                        int k) {
  if (c.samples.empty()) throw Error("coefficient field is empty");
  if (k < 0) throw Error("degree must be nonnegative");
  int m = static_cast<int>(c.samples.front().rows());
  int nq = c.grid.size();
  std::vector<double> rho1(static_cast<size_t>(nq));
  for (int q = 0; q < nq; ++q) {
    rho1[static_cast<size_t>(q)] = ps.eval(ps.designated, c.grid.nodes[q]);
    if (std::abs(rho1[static_cast<size_t>(q)]) <= 1e-12)
      throw Error("designated parametrization vanishes on a grid node");
  }

  // Fit rho_1^{-1} c over degrees <= k, then shift every exponent tuple by
  // the designated function so the delivered monomials have degree >= 1.
  MonomialDictionary fit_dict = MonomialDictionary::make(ps.size(), 0, k);
  MonomialDictionary out_dict = MonomialDictionary::make(ps.size(), 1, k + 1);
  std::map<std::vector<int>, int> out_index;
  for (int p = 0; p < out_dict.size(); ++p)
    out_index[out_dict.exponents[p]] = p;

  Eigen::MatrixXd design(nq, fit_dict.size());
  for (int q = 0; q < nq; ++q)
    for (int p = 0; p < fit_dict.size(); ++p)
      design(q, p) = fit_dict.eval(ps, p, c.grid.nodes[q]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  int rank = static_cast<int>(svd.rank());

  FitResult out;
  out.rank = rank;
  out.rank_deficient = rank < fit_dict.size();

  std::vector<Eigen::MatrixXd> coeffs;
  coeffs.reserve(c.samples.size());
  for (const Eigen::MatrixXd& ck : c.samples) {
    Eigen::MatrixXd uk = Eigen::MatrixXd::Zero(m, out_dict.size());
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd rhs(nq);
      for (int q = 0; q < nq; ++q)
        rhs(q) = ck(i, q) / rho1[static_cast<size_t>(q)];
      Eigen::VectorXd sol = svd.solve(rhs);
      Eigen::VectorXd fitted = design * sol;
      for (int q = 0; q < nq; ++q) {
        double value = fitted(q) * rho1[static_cast<size_t>(q)];
        out.delta = std::max(out.delta, std::abs(value - ck(i, q)));
      }
      for (int p = 0; p < fit_dict.size(); ++p) {
        std::vector<int> e = fit_dict.exponents[p];
        e[static_cast<size_t>(ps.designated)] += 1;
        uk(i, out_index.at(e)) = sol(p);
      }
    }
    coeffs.push_back(std::move(uk));
  }

  std::vector<double> times = c.times;
  if (times.size() == 1) {
    // A signal needs two samples; a single-interval field is constant.
    times.push_back(times.front() + 1.0);
    coeffs.push_back(coeffs.front());
  }
  out.signal = ControlSignal::make(std::move(times), out_dict,
                                   std::move(coeffs));
  return out;
}

TrackResult track_extended(const Profile& init, const ControlSignal& u,
                           const DriftMap& drift, const GeneratorSet& s,
                           const ParametrizationSet& ps, double T, double dt,
                           const TargetTrajectory& target, int threads) {
  if (profile_sup_distance(init, target.profiles.front()) > 1e-12)
    throw Error("initial profile must equal the target head");
  TrackResult out;
  if (T == 0.0) {
    out.trajectory.times = {0.0};
    out.trajectory.profiles = {init};
    out.epsilon = 0.0;
    return out;
  }
  if (target.times.size() < 2)
    throw Error("tracking a moving target needs at least two target times");
  double spacing = target.times[1] - target.times[0];
  int stride = static_cast<int>(std::llround(spacing / dt));
  if (stride < 1 || std::abs(stride * dt - spacing) > 1e-12)
    throw Error("dt must divide the target spacing");

  out.trajectory = integrate_ensemble(target.profiles.front().grid, init,
                                      drift, s, ps, u, T, dt, threads);
  for (size_t k = 0; k < target.times.size(); ++k) {
    size_t idx = k * static_cast<size_t>(stride);
    if (idx >= out.trajectory.profiles.size()) break;
    out.epsilon = std::max(
        out.epsilon,
        profile_sup_distance(out.trajectory.profiles[idx], target.profiles[k]));
  }
  return out;
}

std::vector<StudyRow> convergence_study(const TargetTrajectory& target,
                                        const DriftMap& drift,
                                        const GeneratorSet& s,
                                        const ParametrizationSet& ps,
                                        const std::vector<int>& degrees,
                                        double dt, int threads) {
  std::vector<int> sorted = degrees;
  std::sort(sorted.begin(), sorted.end());
  CoefficientField c = extract_coefficients(target, drift, s);
  double T = target.times.back() - target.times.front();
  std::vector<StudyRow> rows;
  rows.reserve(sorted.size());
  for (int k : sorted) {
    auto t0 = std::chrono::steady_clock::now();
    FitResult fit = fit_monomials(c, ps, k);
    TrackResult tr = track_extended(target.profiles.front(), fit.signal, drift,
                                    s, ps, T, dt, target, threads);
    auto t1 = std::chrono::steady_clock::now();
    StudyRow row;
    row.k = k;
    row.delta = fit.delta;
    row.epsilon = tr.epsilon;
    row.seconds = std::chrono::duration<double>(t1 - t0).count();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace liecast
