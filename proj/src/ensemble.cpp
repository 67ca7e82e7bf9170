#include "liecast/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace liecast {

namespace {

constexpr double kPi = 3.14159265358979323846;

// P_q(x) and its derivative via the three-term recurrence.
void legendre(int q, double x, double* p, double* dp) {
  double pm1 = 1.0;
  double pj = x;
  for (int j = 1; j < q; ++j) {
    double pj1 = ((2 * j + 1) * x * pj - j * pm1) / (j + 1);
    pm1 = pj;
    pj = pj1;
  }
  *p = pj;
  *dp = q * (x * pj - pm1) / (x * x - 1.0);
}

struct SubStep {
  double t0 = 0.0;
  double t1 = 0.0;
  int segment = -1;  // piecewise-constant segment index, -1 for signals
};

Mat rk4_step(const Mat& g, double t, double h,
             const std::function<Mat(double)>& a) {
  Mat a0 = a(t);
  Mat am = a(t + 0.5 * h);
  Mat a1 = a(t + h);
  Mat k1 = g * a0;
  Mat k2 = (g + (0.5 * h) * k1) * am;
  Mat k3 = (g + (0.5 * h) * k2) * am;
  Mat k4 = (g + h * k3) * a1;
  return g + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

int step_count(double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0)) throw Error("horizon and dt must be positive");
  int n = static_cast<int>(std::llround(T / dt));
  if (n < 1 || std::abs(n * dt - T) > 1e-12 * std::max(1.0, T))
    throw Error("dt must divide the horizon T");
  return n;
}

// Sub-steps for base step [t0, t1], split at the break times inside.
std::vector<SubStep> split_step(double t0, double t1,
                                const std::vector<double>& breaks) {
  std::vector<SubStep> subs;
  double cur = t0;
  for (double b : breaks) {
    if (b > t0 + 1e-13 && b < t1 - 1e-13) {
      subs.push_back({cur, b, -1});
      cur = b;
    }
  }
  subs.push_back({cur, t1, -1});
  return subs;
}

// Segment active at time t: the first one with t <= t_end. Selection is done
// with the sub-step midpoint, so boundaries are never sampled.
int segment_at(const std::vector<PiecewiseConstantInput::Segment>& segs,
               double t) {
  for (int p = 0; p < static_cast<int>(segs.size()); ++p)
    if (t <= segs[p].t_end) return p;
  return static_cast<int>(segs.size()) - 1;
}

void validate_common(const ParamGrid& grid, const Profile& init,
                     const GeneratorSet& s) {
  if (s.size() == 0) throw Error("generator set is empty");
  if (static_cast<int>(init.states.size()) != grid.size())
    throw Error("initial profile does not match the grid");
  if (static_cast<int>(init.grid.nodes.size()) != grid.size())
    throw Error("initial profile does not match the grid");
  for (int q = 0; q < grid.size(); ++q)
    if (std::abs(init.grid.nodes[q] - grid.nodes[q]) > 1e-12)
      throw Error("initial profile does not match the grid");
  for (const GroupElement& g : init.states)
    if (g.family != s.descriptor.family || g.n != s.descriptor.n)
      throw Error("initial state family does not match the generator set");
}

Mat drift_matrix(const DriftMap& drift, const GeneratorSet& s, double sigma) {
  int n = s.descriptor.n;
  if (!drift) return Mat::Zero(n, n);
  AlgebraElement z = drift(sigma);
  if (z.family != s.descriptor.family || z.n != s.descriptor.n)
    throw Error("drift element does not match the generator set");
  return z.m;
}

// Shared driver. substep_a builds the t -> A(t, sigma_q) map for one sub-step
// of one node; nodes are fully decoupled so thread partitioning cannot change
// any arithmetic.
Trajectory integrate_core(
    const ParamGrid& grid, const Profile& init, const GeneratorSet& s,
    double T, double dt, int threads, const std::vector<double>& breaks,
    const std::function<std::function<Mat(double)>(int, const SubStep&)>&
        substep_a) {
  int n_steps = step_count(T, dt);
  int nq = grid.size();

  std::vector<std::vector<Mat>> states(
      static_cast<size_t>(n_steps) + 1,
      std::vector<Mat>(static_cast<size_t>(nq)));
  for (int q = 0; q < nq; ++q) states[0][q] = init.states[q].m;

  auto run_node = [&](int q) {
    Mat g = states[0][q];
    for (int k = 0; k < n_steps; ++k) {
      double t0 = k * dt;
      double t1 = (k + 1 == n_steps) ? T : (k + 1) * dt;
      for (const SubStep& sub : split_step(t0, t1, breaks)) {
        std::function<Mat(double)> a = substep_a(q, sub);
        g = rk4_step(g, sub.t0, sub.t1 - sub.t0, a);
      }
      states[static_cast<size_t>(k) + 1][q] = g;
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

  // Constraint defects are scanned in (time, node) order after the fact so
  // the first offender is deterministic under any thread count.
  Trajectory traj;
  traj.max_group_defect = 0.0;
  Family fam = s.descriptor.family;
  double abort_tol = 100.0 * kTolGrp;
  for (int k = 0; k <= n_steps; ++k) {
    Profile p;
    p.grid = grid;
    p.states.reserve(static_cast<size_t>(nq));
    for (int q = 0; q < nq; ++q) {
      GroupElement g = GroupElement::from_integration(
          fam, states[k][q], std::numeric_limits<double>::infinity());
      if (!(g.residual <= abort_tol))
        throw Error("group constraint defect " + std::to_string(g.residual) +
                    " at t = " + std::to_string(k * dt) + ", node " +
                    std::to_string(q));
      traj.max_group_defect = std::max(traj.max_group_defect, g.residual);
      p.states.push_back(std::move(g));
    }
    traj.times.push_back(k == n_steps ? T : k * dt);
    traj.profiles.push_back(std::move(p));
  }
  return traj;
}

}  // namespace

ParamGrid ParamGrid::make(double a, double b, std::vector<double> nodes,
                          std::vector<double> weights) {
  if (!(a < b)) throw Error("grid interval needs a < b");
  if (nodes.empty()) throw Error("grid needs at least one node");
  if (nodes.size() != weights.size())
    throw Error("grid nodes and weights must have equal length");
  double sum = 0.0;
  for (size_t q = 0; q < nodes.size(); ++q) {
    if (nodes[q] < a - 1e-12 || nodes[q] > b + 1e-12)
      throw Error("grid node outside the interval");
    if (q > 0 && !(nodes[q] > nodes[q - 1]))
      throw Error("grid nodes must be strictly increasing");
    if (!(weights[q] > 0.0)) throw Error("grid weights must be positive");
    sum += weights[q];
  }
  if (std::abs(sum - (b - a)) > 1e-12 * std::max(1.0, b - a))
    throw Error("grid weights must sum to the interval length");
  ParamGrid g;
  g.a = a;
  g.b = b;
  g.nodes = std::move(nodes);
  g.weights = std::move(weights);
  return g;
}

ParamGrid build_grid(double a, double b, int q, QuadratureRule rule) {
  if (!(0.0 < a && a < b)) throw Error("build_grid needs 0 < a < b");
  if (q < 2) throw Error("build_grid needs at least two nodes");
  std::vector<double> nodes(q), weights(q);
  if (rule == QuadratureRule::uniform_trapezoid) {
    double h = (b - a) / (q - 1);
    for (int k = 0; k < q; ++k) {
      nodes[k] = a + k * h;
      weights[k] = (k == 0 || k == q - 1) ? 0.5 * h : h;
    }
    nodes[q - 1] = b;
  } else {
    // Gauss-Legendre on [-1, 1] by Newton iteration, then affine transport.
    for (int k = 1; k <= q; ++k) {
      double x = std::cos(kPi * (k - 0.25) / (q + 0.5));
      double p = 0.0, dp = 1.0;
      for (int it = 0; it < 100; ++it) {
        legendre(q, x, &p, &dp);
        double step = p / dp;
        x -= step;
        if (std::abs(step) < 1e-15) break;
      }
      legendre(q, x, &p, &dp);
      // Roots arrive in descending order.
      nodes[q - k] = a + 0.5 * (b - a) * (x + 1.0);
      weights[q - k] = (b - a) / ((1.0 - x * x) * dp * dp);
    }
  }
  return ParamGrid::make(a, b, std::move(nodes), std::move(weights));
}

ParametrizationSet ParametrizationSet::make(
    std::vector<std::function<double(double)>> funcs,
    std::vector<std::string> names, int designated) {
  if (funcs.empty()) throw Error("parametrization set is empty");
  if (funcs.size() != names.size())
    throw Error("parametrization names must match the functions");
  if (designated < 0 || designated >= static_cast<int>(funcs.size()))
    throw Error("designated parametrization index out of range");
  for (const auto& f : funcs)
    if (!f) throw Error("parametrization function is empty");
  ParametrizationSet ps;
  ps.funcs = std::move(funcs);
  ps.names = std::move(names);
  ps.designated = designated;
  return ps;
}

SeparatingVerdict check_separating(const ParametrizationSet& ps,
                                   const ParamGrid& grid, bool squared) {
  SeparatingVerdict v;
  v.separating = true;
  v.nonvanishing = true;
  auto value = [&](int s, double sigma) {
    double f = ps.eval(s, sigma);
    return squared ? f * f : f;
  };
  for (int q = 0; q < grid.size() && v.separating; ++q) {
    for (int qp = q + 1; qp < grid.size(); ++qp) {
      bool distinguished = false;
      for (int s = 0; s < ps.size(); ++s) {
        double va = value(s, grid.nodes[q]);
        double vb = value(s, grid.nodes[qp]);
        if (std::abs(va - vb) >
            1e-12 * std::max({1.0, std::abs(va), std::abs(vb)})) {
          distinguished = true;
          break;
        }
      }
      if (!distinguished) {
        v.separating = false;
        v.witness_q = q;
        v.witness_qp = qp;
        break;
      }
    }
  }
  for (int q = 0; q < grid.size(); ++q) {
    if (std::abs(ps.eval(ps.designated, grid.nodes[q])) <= 1e-12) {
      v.nonvanishing = false;
      if (v.separating) v.witness_q = q;
      break;
    }
  }
  return v;
}

Profile Profile::constant(const ParamGrid& grid, const GroupElement& g) {
  Profile p;
  p.grid = grid;
  p.states.assign(static_cast<size_t>(grid.size()), g);
  return p;
}

double profile_sup_distance(const Profile& p1, const Profile& p2) {
  if (p1.states.size() != p2.states.size())
    throw Error("profiles live on different grids");
  for (size_t q = 0; q < p1.grid.nodes.size(); ++q)
    if (std::abs(p1.grid.nodes[q] - p2.grid.nodes[q]) > 1e-12)
      throw Error("profiles live on different grids");
  double d = 0.0;
  for (size_t q = 0; q < p1.states.size(); ++q)
    d = std::max(d, (p1.states[q].m - p2.states[q].m).norm());
  return d;
}

PiecewiseConstantInput PiecewiseConstantInput::make(
    std::vector<Segment> segments) {
  if (segments.empty()) throw Error("piecewise input needs a segment");
  double prev = 0.0;
  for (const Segment& seg : segments) {
    if (seg.i < 0 || seg.s < 0)
      throw Error("piecewise input indices must be nonnegative");
    if (!(seg.t_end > prev))
      throw Error("switching times must be strictly increasing from 0");
    prev = seg.t_end;
  }
  PiecewiseConstantInput u;
  u.segments = std::move(segments);
  return u;
}

ControlSignal ControlSignal::make(std::vector<double> times,
                                  MonomialDictionary dict,
                                  std::vector<Eigen::MatrixXd> coeffs) {
  if (times.size() < 2) throw Error("control signal needs two time samples");
  if (times.size() != coeffs.size())
    throw Error("control signal times and coefficients must match");
  for (size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]))
      throw Error("control signal times must be strictly increasing");
  Eigen::Index rows = coeffs.front().rows();
  for (const Eigen::MatrixXd& c : coeffs)
    if (c.rows() != rows || c.cols() != dict.size())
      throw Error("control signal coefficient shape mismatch");
  ControlSignal sig;
  sig.times = std::move(times);
  sig.dict = std::move(dict);
  sig.coeffs = std::move(coeffs);
  return sig;
}

Eigen::MatrixXd ControlSignal::eval(double t) const {
  if (t <= times.front()) return coeffs.front();
  if (t >= times.back()) return coeffs.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  size_t hi = static_cast<size_t>(it - times.begin());
  size_t lo = hi - 1;
  double w = (t - times[lo]) / (times[hi] - times[lo]);
  return coeffs[lo] + w * (coeffs[hi] - coeffs[lo]);
}

Trajectory integrate_ensemble(const ParamGrid& grid, const Profile& init,
                              const DriftMap& drift, const GeneratorSet& s,
                              const ParametrizationSet& ps,
                              const PiecewiseConstantInput& u, double T,
                              double dt, int threads) {
  validate_common(grid, init, s);
  if (std::abs(u.segments.back().t_end - T) > 1e-12)
    throw Error("final switching time must equal the horizon T");
  for (const auto& seg : u.segments) {
    if (seg.i >= s.size()) throw Error("segment generator index out of range");
    if (seg.s >= ps.size())
      throw Error("segment parametrization index out of range");
  }

  int nq = grid.size();
  int np = static_cast<int>(u.segments.size());
  // A is constant on every segment at every node; precompute all of them.
  std::vector<std::vector<Mat>> seg_a(static_cast<size_t>(nq));
  for (int q = 0; q < nq; ++q) {
    double sigma = grid.nodes[q];
    Mat z = drift_matrix(drift, s, sigma);
    seg_a[q].reserve(static_cast<size_t>(np));
    for (const auto& seg : u.segments)
      seg_a[q].push_back(z + seg.nu * ps.eval(seg.s, sigma) *
                                 s.elements[seg.i].m);
  }

  std::vector<double> breaks;
  for (int p = 0; p + 1 < np; ++p) breaks.push_back(u.segments[p].t_end);

  auto substep_a = [&](int q, const SubStep& sub) -> std::function<Mat(double)> {
    int p = segment_at(u.segments, 0.5 * (sub.t0 + sub.t1));
    return [a = seg_a[static_cast<size_t>(q)][static_cast<size_t>(p)]](double) {
      return a;
    };
  };
  return integrate_core(grid, init, s, T, dt, threads, breaks, substep_a);
}

Trajectory integrate_ensemble(const ParamGrid& grid, const Profile& init,
                              const DriftMap& drift, const GeneratorSet& s,
                              const ParametrizationSet& ps,
                              const ControlSignal& u, double T, double dt,
                              int threads) {
  validate_common(grid, init, s);
  if (u.coeffs.front().rows() != s.size())
    throw Error("control signal row count must match the generator set");

  int nq = grid.size();
  int np = u.dict.size();
  Eigen::MatrixXd monos = u.dict.eval_on_grid(ps, grid);  // P x Q
  std::vector<Mat> drifts(static_cast<size_t>(nq));
  for (int q = 0; q < nq; ++q)
    drifts[q] = drift_matrix(drift, s, grid.nodes[q]);

  // Interpolation kinks sit at the sample times; split steps there too so
  // every RK4 stage sees a smooth integrand.
  std::vector<double> breaks;
  for (double t : u.times)
    if (t > 1e-13 && t < T - 1e-13) breaks.push_back(t);

  auto substep_a = [&, np](int q, const SubStep&) -> std::function<Mat(double)> {
    return [&, q, np](double t) {
      Eigen::MatrixXd c = u.eval(t);  // m x P
      Mat a = drifts[static_cast<size_t>(q)];
      for (int i = 0; i < s.size(); ++i) {
        double ui = 0.0;
        for (int p = 0; p < np; ++p) ui += c(i, p) * monos(p, q);
        if (ui != 0.0) a += ui * s.elements[i].m;
      }
      return a;
    };
  };
  return integrate_core(grid, init, s, T, dt, threads, breaks, substep_a);
}

Eigen::MatrixXd ensemble_output(const Profile& profile,
                                const CoefficientFamily& fam,
                                const ParamGrid& grid) {
  if (static_cast<int>(profile.states.size()) != grid.size())
    throw Error("profile does not match the grid");
  int m = fam.size();
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(m, m);
  // Fixed node order keeps the reduction deterministic.
  for (int q = 0; q < grid.size(); ++q)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        y(i, j) += grid.weights[q] * phi_eval(fam, profile.states[q], i, j);
  return y;
}

}  // namespace liecast
