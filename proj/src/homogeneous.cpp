#include "liecast/homogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "liecast/rng.hpp"
#include "liecast/structure.hpp"

namespace liecast {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Circle stabilizing e1 in SO(3); equals exp(theta X1) for the standard
// catalog, so Ad(h) fixes X1 and rotates the (X2, X3) plane.
Eigen::Matrix3d stabilizer_rotation(double theta) {
  double c = std::cos(theta);
  double s = std::sin(theta);
  Eigen::Matrix3d h;
  h << 1.0, 0.0, 0.0, 0.0, c, s, 0.0, -s, c;
  return h;
}

int sphere_step_count(double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0)) throw Error("horizon and dt must be positive");
  int n = static_cast<int>(std::llround(T / dt));
  if (n < 1 || std::abs(n * dt - T) > 1e-12 * std::max(1.0, T))
    throw Error("dt must divide the horizon T");
  return n;
}

struct SphereSubStep {
  double t0 = 0.0;
  double t1 = 0.0;
};

std::vector<SphereSubStep> split_sphere_step(double t0, double t1,
                                             const std::vector<double>& breaks) {
  std::vector<SphereSubStep> subs;
  double cur = t0;
  for (double b : breaks) {
    if (b > t0 + 1e-13 && b < t1 - 1e-13) {
      subs.push_back({cur, b});
      cur = b;
    }
  }
  subs.push_back({cur, t1});
  return subs;
}

int sphere_segment_at(const std::vector<PiecewiseConstantInput::Segment>& segs,
                      double t) {
  for (int p = 0; p < static_cast<int>(segs.size()); ++p)
    if (t <= segs[p].t_end) return p;
  return static_cast<int>(segs.size()) - 1;
}

}  // namespace

SpherePoint SpherePoint::make(const Eigen::VectorXd& x, double tol) {
  if (x.size() < 2) throw Error("sphere points need dimension at least 2");
  if (std::abs(x.norm() - 1.0) > tol)
    throw Error("sphere point is not unit length");
  SpherePoint p;
  p.x = x;
  return p;
}

SphereProfile SphereProfile::constant(const ParamGrid& grid,
                                      const SpherePoint& x) {
  SphereProfile p;
  p.grid = grid;
  p.points.assign(static_cast<size_t>(grid.size()), x);
  return p;
}

Eigen::VectorXd tau_field(const AlgebraElement& x_alg, const SpherePoint& x) {
  if (x_alg.family != Family::so)
    throw Error("induced sphere fields need an so(n) element");
  if (x_alg.n != x.n())
    throw Error("algebra element dimension does not match the sphere point");
  return x_alg.m.real() * x.x;
}

GroupElement sphere_section(const Eigen::VectorXd& x) {
  int n = static_cast<int>(x.size());
  if (n < 2) throw Error("sphere sections need dimension at least 2");
  if (std::abs(x.norm() - 1.0) > kTolGrp)
    throw Error("sphere section input is not unit length");

  Eigen::VectorXd e1 = Eigen::VectorXd::Unit(n, 0);
  Eigen::MatrixXd g;
  if ((x - e1).norm() < 1e-8) {
    g = Eigen::MatrixXd::Identity(n, n);
  } else if ((x + e1).norm() < 1e-8) {
    // The Householder direction degenerates only at x = e1, but near the
    // antipode we still pin a fixed half-turn about e2 for determinism.
    g = Eigen::MatrixXd::Identity(n, n);
    g(0, 0) = -1.0;
    if (n >= 3)
      g(2, 2) = -1.0;
    else
      g(1, 1) = -1.0;
  } else {
    // Reflection pair: H_u maps e1 to x with det -1; the fixed reflection of
    // e2 restores det +1 while leaving e1 alone.
    Eigen::VectorXd u = (e1 - x).normalized();
    Eigen::MatrixXd h =
        Eigen::MatrixXd::Identity(n, n) - 2.0 * (u * u.transpose());
    g = h;
    g.col(1) *= -1.0;
  }
  return GroupElement::checked(Family::so, g.cast<Cplx>(), kTolGrp);
}

double average_over_stabilizer_at(const CoefficientFamily& fam, int i,
                                  const GroupElement& section,
                                  int h_quadrature_points, int j) {
  if (fam.base.descriptor.family != Family::so || fam.base.descriptor.n != 3)
    throw Error("stabilizer averaging is implemented for the S^2 case only");
  if (section.family != Family::so || section.n != 3)
    throw Error("section must be a rotation of R^3");
  if (i < 0 || i >= fam.size() || j < 0 || j >= fam.size())
    throw Error("coefficient index out of range");
  if (h_quadrature_points < 1)
    throw Error("stabilizer average needs at least one quadrature point");

  double sum = 0.0;
  for (int k = 0; k < h_quadrature_points; ++k) {
    double theta = 2.0 * kPi * k / h_quadrature_points;
    Mat gh = section.m * stabilizer_rotation(theta).cast<Cplx>();
    sum += phi_eval(fam, GroupElement::checked(Family::so, gh, kTolGrp), i, j);
  }
  return sum / h_quadrature_points;
}

double average_over_stabilizer(const CoefficientFamily& fam, int i,
                               const SpherePoint& x, int h_quadrature_points,
                               int j) {
  if (x.n() != 3) throw Error("stabilizer averaging needs a point on S^2");
  return average_over_stabilizer_at(fam, i, sphere_section(x.x),
                                    h_quadrature_points, j);
}

HomogeneousReport verify_homogeneous_relations(int n_samples, double tol,
                                               std::uint64_t seed) {
  if (n_samples < 0) throw Error("sample count must be nonnegative");

  GeneratorSet s = catalog_set(Family::so, 3, "standard");
  Eigen::Matrix3d gen[3];
  for (int i = 0; i < 3; ++i) gen[i] = s.elements[i].m.real();
  // det(e_i, e_j, e_k) with k the remaining index.
  const double det[3][3] = {{0, 1, -1}, {-1, 0, 1}, {1, -1, 0}};

  std::vector<Eigen::Vector3d> pts;
  pts.push_back(Eigen::Vector3d::UnitX());
  pts.push_back(-Eigen::Vector3d::UnitX());
  pts.push_back(Eigen::Vector3d::UnitY());
  pts.push_back(Eigen::Vector3d::UnitZ());
  pts.push_back(Eigen::Vector3d(1, 1, 0).normalized());
  pts.push_back(Eigen::Vector3d(0, 1, 1).normalized());
  Rng rng(seed);
  for (int k = 0; k < n_samples; ++k) {
    Eigen::Vector3d v;
    do {
      v = Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
    } while (v.norm() < 1e-12);
    pts.push_back(v.normalized());
  }

  HomogeneousReport rep;
  rep.n_samples = static_cast<int>(pts.size());
  rep.min_tangent_sigma = std::numeric_limits<double>::infinity();
  rep.min_differential_sigma = std::numeric_limits<double>::infinity();
  const double sigma_floor = 1e-6;

  auto note_failure = [&](const std::string& what, const Eigen::Vector3d& x) {
    if (!rep.failure.empty()) return;
    rep.failure = what + " at x = (" + std::to_string(x(0)) + ", " +
                  std::to_string(x(1)) + ", " + std::to_string(x(2)) + ")";
  };

  for (const Eigen::Vector3d& x : pts) {
    Eigen::Matrix3d tangent;
    for (int i = 0; i < 3; ++i) tangent.col(i) = gen[i] * x;

    for (int i = 0; i < 3; ++i) {
      double defect = std::abs(x.dot(tangent.col(i)));
      rep.max_tangency_defect = std::max(rep.max_tangency_defect, defect);
      if (defect > tol) note_failure("tangency defect", x);
    }

    // Bracket of linear fields, via the exact quadratic formula:
    // [tau_i, tau_j](x) = (X_i X_j - X_j X_i) x = -det(e_i,e_j,e_k) tau_k(x).
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        int k = 3 - i - j;
        Eigen::Vector3d lhs = (gen[i] * gen[j] - gen[j] * gen[i]) * x;
        double res = (lhs + det[i][j] * tangent.col(k)).norm();
        rep.max_bracket_residual = std::max(rep.max_bracket_residual, res);
        if (res > tol) note_failure("bracket relation", x);
      }

    // Derivative law on the averaged coefficients phibar^j(x) = 2 x_j:
    // tau_i phibar^j = 2 (X_i x)_j = det(e_i,e_j,e_k) phibar^k.
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double lhs = 2.0 * tangent.col(i)(j);
        double rhs = (i == j) ? 0.0 : det[i][j] * 2.0 * x(3 - i - j);
        double res = std::abs(lhs - rhs);
        rep.max_derivative_residual = std::max(rep.max_derivative_residual, res);
        if (res > tol) note_failure("derivative relation", x);
      }

    Eigen::JacobiSVD<Eigen::Matrix3d> tsvd(tangent);
    rep.min_tangent_sigma =
        std::min(rep.min_tangent_sigma, tsvd.singularValues()(1));
    if (tsvd.singularValues()(1) <= sigma_floor)
      note_failure("tangent fields do not span", x);

    Eigen::Matrix3d diff =
        2.0 * (Eigen::Matrix3d::Identity() - x * x.transpose());
    Eigen::JacobiSVD<Eigen::Matrix3d> dsvd(diff);
    rep.min_differential_sigma =
        std::min(rep.min_differential_sigma, dsvd.singularValues()(1));
    if (dsvd.singularValues()(1) <= sigma_floor)
      note_failure("coefficient differentials do not span", x);
  }

  rep.ok = rep.failure.empty();
  return rep;
}

SphereTrajectory integrate_sphere_ensemble(const ParamGrid& grid,
                                           const SphereProfile& init,
                                           const GeneratorSet& s,
                                           const ParametrizationSet& ps,
                                           const PiecewiseConstantInput& u,
                                           double T, double dt, int threads) {
  if (s.size() == 0) throw Error("generator set is empty");
  if (s.descriptor.family != Family::so)
    throw Error("sphere dynamics need so(n) generators");
  int n = s.descriptor.n;
  int nq = grid.size();
  if (static_cast<int>(init.points.size()) != nq ||
      static_cast<int>(init.grid.nodes.size()) != nq)
    throw Error("initial profile does not match the grid");
  for (int q = 0; q < nq; ++q) {
    if (std::abs(init.grid.nodes[q] - grid.nodes[q]) > 1e-12)
      throw Error("initial profile does not match the grid");
    if (init.points[q].n() != n)
      throw Error("initial point dimension does not match the generator set");
  }
  if (std::abs(u.segments.back().t_end - T) > 1e-12)
    throw Error("final switching time must equal the horizon T");
  for (const auto& seg : u.segments) {
    if (seg.i >= s.size()) throw Error("segment generator index out of range");
    if (seg.s >= ps.size())
      throw Error("segment parametrization index out of range");
  }
  int n_steps = sphere_step_count(T, dt);

  int np = static_cast<int>(u.segments.size());
  std::vector<std::vector<Eigen::MatrixXd>> seg_a(static_cast<size_t>(nq));
  std::vector<std::vector<Eigen::MatrixXd>> seg_e(static_cast<size_t>(nq));
  for (int q = 0; q < nq; ++q) {
    double sigma = grid.nodes[q];
    seg_a[q].reserve(static_cast<size_t>(np));
    seg_e[q].reserve(static_cast<size_t>(np));
    for (const auto& seg : u.segments) {
      Eigen::MatrixXd a =
          seg.nu * ps.eval(seg.s, sigma) * s.elements[seg.i].m.real();
      seg_a[q].push_back(a);
      seg_e[q].push_back((dt * a).exp());
    }
  }

  std::vector<double> breaks;
  for (int p = 0; p + 1 < np; ++p) breaks.push_back(u.segments[p].t_end);

  std::vector<std::vector<Eigen::VectorXd>> states(
      static_cast<size_t>(n_steps) + 1,
      std::vector<Eigen::VectorXd>(static_cast<size_t>(nq)));
  for (int q = 0; q < nq; ++q) states[0][q] = init.points[q].x;

  auto run_node = [&](int q) {
    Eigen::VectorXd x = states[0][q];
    for (int k = 0; k < n_steps; ++k) {
      double t0 = k * dt;
      double t1 = (k + 1 == n_steps) ? T : (k + 1) * dt;
      for (const SphereSubStep& sub : split_sphere_step(t0, t1, breaks)) {
        int p = sphere_segment_at(u.segments, 0.5 * (sub.t0 + sub.t1));
        double h = sub.t1 - sub.t0;
        if (std::abs(h - dt) <= 1e-14)
          x = seg_e[q][p] * x;
        else
          x = (h * seg_a[q][p]).exp() * x;
      }
      states[static_cast<size_t>(k) + 1][q] = x;
    }
  };

  if (threads <= 1 || nq == 1) {
    for (int q = 0; q < nq; ++q) run_node(q);
  } else {
    int workers = std::min(threads, nq);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w]() {
        for (int q = w; q < nq; q += workers) run_node(q);
      });
    for (std::thread& th : pool) th.join();
  }

  // Unit norm is measured, never restored; the scan runs in (time, node)
  // order so the first offender is deterministic under any thread count.
  SphereTrajectory traj;
  double abort_tol = 100.0 * kTolGrp;
  for (int k = 0; k <= n_steps; ++k) {
    SphereProfile p;
    p.grid = grid;
    p.points.reserve(static_cast<size_t>(nq));
    for (int q = 0; q < nq; ++q) {
      double defect = std::abs(states[k][q].norm() - 1.0);
      if (!(defect <= abort_tol))
        throw Error("sphere norm defect " + std::to_string(defect) +
                    " at t = " + std::to_string(k * dt) + ", node " +
                    std::to_string(q));
      traj.max_norm_defect = std::max(traj.max_norm_defect, defect);
      p.points.push_back(SpherePoint{std::move(states[k][q])});
    }
    traj.times.push_back(k == n_steps ? T : k * dt);
    traj.profiles.push_back(std::move(p));
  }
  return traj;
}

}  // namespace liecast
