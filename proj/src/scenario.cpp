#include "liecast/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "liecast/coefficients.hpp"
#include "liecast/homogeneous.hpp"
#include "liecast/monomial.hpp"
#include "liecast/observability.hpp"
#include "liecast/structure.hpp"
#include "liecast/synthesis.hpp"

namespace liecast {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw ParseError("");
    return d;
  } catch (...) {
    throw ParseError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw ParseError("");
    return i;
  } catch (...) {
    throw ParseError("key '" + key + "': expected an integer, got '" + v +
                     "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    unsigned long long i = std::stoull(v, &pos);
    if (pos != v.size() || (!v.empty() && v[0] == '-')) throw ParseError("");
    return i;
  } catch (...) {
    throw ParseError("key '" + key + "': expected an unsigned integer, got '" +
                     v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ParseError("key '" + key + "': expected true or false, got '" + v +
                   "'");
}

// Flat TOML-style key-value file: `key = value` lines, '#' comment lines,
// dotted keys for grouping, quoted or bare values. No sections, no inline
// comments; every key is consumed exactly once.
struct KeyMap {
  std::map<std::string, std::string> kv;
  std::set<std::string> used;

  bool has(const std::string& k) const { return kv.count(k) != 0; }
  std::string take(const std::string& k) {
    used.insert(k);
    return kv.at(k);
  }
  std::string want(const std::string& k) {
    if (!has(k)) throw ParseError("missing required key '" + k + "'");
    return take(k);
  }
  std::string opt(const std::string& k, const std::string& dflt) {
    return has(k) ? take(k) : dflt;
  }
  void finish() const {
    for (const auto& [k, v] : kv)
      if (used.count(k) == 0) throw ParseError("unknown key '" + k + "'");
  }
};

KeyMap parse_keys(const std::string& text) {
  KeyMap m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) +
                       ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw ParseError("line " + std::to_string(lineno) + ": empty key");
    for (char c : key)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_')
        throw ParseError("line " + std::to_string(lineno) + ": bad key '" +
                         key + "'");
    if (!val.empty() && val.front() == '"') {
      if (val.size() < 2 || val.back() != '"')
        throw ParseError("line " + std::to_string(lineno) +
                         ": unterminated string");
      val = val.substr(1, val.size() - 2);
    }
    if (val.empty())
      throw ParseError("line " + std::to_string(lineno) +
                       ": empty value for key '" + key + "'");
    if (!m.kv.emplace(key, val).second)
      throw ParseError("duplicate key '" + key + "'");
  }
  return m;
}

std::vector<std::string> take_numbered(KeyMap& m, const std::string& prefix) {
  std::vector<std::string> out;
  for (int i = 1;; ++i) {
    std::string key = prefix + "." + std::to_string(i);
    if (!m.has(key)) break;
    out.push_back(m.take(key));
  }
  return out;
}

ParametrizationSet rho_set(const Scenario& sc) {
  std::vector<std::function<double(double)>> funcs;
  std::vector<std::string> names;
  for (const SigmaExpr& e : sc.rho) {
    funcs.push_back([e](double s) { return sigma_expr_eval(e, s); });
    names.push_back(e.text);
  }
  return ParametrizationSet::make(funcs, names);
}

ParamGrid scenario_grid(const Scenario& sc) {
  return build_grid(sc.grid_a, sc.grid_b, sc.grid_q, sc.grid_rule);
}

Profile ansatz_profile(const GeneratorSet& s, const ParamGrid& grid,
                       const std::vector<std::tuple<int, int, double>>& triples) {
  int d_max = 0;
  for (const auto& [i, d, v] : triples) d_max = std::max(d_max, d);
  ProfileAnsatz pa = ProfileAnsatz::zero(s, d_max);
  for (const auto& [i, d, v] : triples) pa.a(i, d) = v;
  return pa.realize(s, grid);
}

void run_verify(const Scenario& sc, const GeneratorSet& s,
                std::vector<Verdict>& verdicts, json& extra) {
  double tol = sc.tolerance > 0.0 ? sc.tolerance : kTolClosure;
  DistinguishedReport dr = verify_distinguished(s, tol);

  Verdict v;
  v.name = "distinguished";
  v.pass = dr.ok;
  if (!dr.ok)
    v.note = std::string(verify_outcome_name(dr.outcome)) + ": " + dr.message;
  v.metrics = {{"span_rank", static_cast<double>(dr.span_rank)},
               {"max_residual", dr.max_residual},
               {"min_hit_lambda", dr.min_hit_lambda}};
  verdicts.push_back(v);

  json table = json::array();
  for (const auto& [ij, e] : dr.table.entries) {
    json row;
    row["i"] = ij.first;
    row["j"] = ij.second;
    row["zero"] = e.zero;
    row["k"] = e.k;
    row["lambda"] = e.lambda;
    row["residual"] = e.residual;
    table.push_back(row);
  }
  extra["bracket_table"] = table;

  if (sc.codistinguished) {
    Verdict cv;
    cv.name = "codistinguished";
    if (!dr.ok) {
      cv.pass = false;
      cv.note = "skipped: the set is not distinguished";
    } else {
      CoefficientFamily fam = CoefficientFamily::make(s);
      double ctol = sc.tolerance > 0.0 ? sc.tolerance : 1e-6;
      CodistinguishedReport cr =
          verify_codistinguished(fam, dr.table, sc.samples, ctol, sc.seed);
      cv.pass = cr.ok;
      if (!cr.ok) {
        cv.note = !cr.relation_witness.empty() ? cr.relation_witness
                                               : cr.separation_witness;
        if (cv.note.empty()) cv.note = cr.note;
      }
      cv.metrics = {{"min_sigma", cr.min_sigma},
                    {"max_relation_residual", cr.max_relation_residual},
                    {"max_center_disagreement", cr.max_center_disagreement},
                    {"min_separation_gap", cr.min_separation_gap},
                    {"separation_pairs",
                     static_cast<double>(cr.separation_pairs)}};
    }
    verdicts.push_back(cv);
  }
}

void run_closure(const Scenario& sc, const GeneratorSet& s,
                 std::vector<Verdict>& verdicts, json& extra) {
  double tol = sc.tolerance > 0.0 ? sc.tolerance : kTolClosure;
  PreDistinguishedReport pr = verify_pre_distinguished(s, sc.max_depth, tol);

  Verdict v;
  v.name = "pre-distinguished";
  v.pass = pr.ok;
  if (!pr.ok) v.note = pr.distinguished.message;
  v.metrics = {
      {"representatives",
       static_cast<double>(pr.closure.representatives.size())},
      {"max_depth", static_cast<double>(pr.closure.max_depth)},
      {"finite", pr.closure.finite_flag ? 1.0 : 0.0}};
  verdicts.push_back(v);

  json first_depths = json::array();
  for (int d : pr.closure.first_depth) first_depths.push_back(d);
  extra["closure"] = {{"first_depths", first_depths}};

  if (!sc.subset.empty()) {
    std::vector<AlgebraElement> elems;
    std::vector<std::string> labels;
    for (int idx : sc.subset) {
      elems.push_back(s.elements[idx]);
      labels.push_back(s.labels[idx]);
    }
    GeneratorSet subset = GeneratorSet::make(s.descriptor, elems, labels);
    std::vector<IndicatorSequence> seqs =
        indicator_sequences(subset, s, sc.max_depth);

    bool all = true;
    json jseqs = json::array();
    for (const IndicatorSequence& q : seqs) {
      all = all && q.has_pattern;
      json row;
      row["label"] = q.label;
      json depths = json::array();
      for (int d : q.depths) depths.push_back(d);
      row["depths"] = depths;
      row["has_pattern"] = q.has_pattern;
      row["delta0"] = q.delta0;
      row["delta"] = q.delta;
      jseqs.push_back(row);
    }
    extra["indicators"] = jseqs;

    Verdict iv;
    iv.name = "indicator-patterns";
    iv.pass = all;
    if (!all) iv.note = "some reference element has no depth pattern";
    verdicts.push_back(iv);
  }
}

void run_simulate(const Scenario& sc, const GeneratorSet& s,
                  std::vector<Verdict>& verdicts,
                  std::vector<std::pair<std::string, std::string>>& artifacts,
                  std::vector<std::pair<std::string, std::string>>& csvs) {
  ParamGrid grid = scenario_grid(sc);
  ParametrizationSet ps = rho_set(sc);
  Profile init =
      Profile::constant(grid, GroupElement::identity(s.descriptor.family,
                                                     s.descriptor.n));
  PiecewiseConstantInput u = PiecewiseConstantInput::make(sc.segments);
  Trajectory traj = integrate_ensemble(grid, init, DriftMap{}, s, ps, u, sc.T,
                                       sc.dt, sc.threads);

  // Trajectory rows hold the state matrices themselves, row-major. su(n)
  // states have complex entries; those go through the canonical real form
  // [[Re, -Im], [Im, Re]] so every column is still one real matrix entry and
  // the state stays recoverable from the file.
  const bool complex_rep = s.descriptor.family == Family::su;
  const int n = s.descriptor.n;
  const int d = complex_rep ? 2 * n : n;
  auto entry = [&](const Mat& g, int i, int j) -> double {
    if (!complex_rep) return g(i, j).real();
    const int bi = i / n;
    const int bj = j / n;
    const std::complex<double> z = g(i % n, j % n);
    if (bi == bj) return z.real();
    return bi == 1 ? z.imag() : -z.imag();
  };

  std::ostringstream csv;
  csv << "t,sigma";
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) csv << ",m" << i << j;
  csv << "\n";
  for (size_t k = 0; k < traj.times.size(); ++k) {
    for (int q = 0; q < grid.size(); ++q) {
      csv << csv_number(traj.times[k]) << "," << csv_number(grid.nodes[q]);
      const Mat& g = traj.profiles[k].states[q].m;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) csv << "," << csv_number(entry(g, i, j));
      csv << "\n";
    }
  }
  artifacts.push_back({"trajectory", "trajectory.csv"});
  csvs.push_back({"trajectory.csv", csv.str()});

  // Aggregated output series y^{ij}(t) = sum_q w_q phi^{ij}(g_q(t)), one row
  // per (t, i, j).
  CoefficientFamily fam = CoefficientFamily::make(s);
  int m = fam.size();
  std::ostringstream out;
  out << "t,i,j,y\n";
  for (size_t k = 0; k < traj.times.size(); ++k) {
    Eigen::MatrixXd y = ensemble_output(traj.profiles[k], fam, grid);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        out << csv_number(traj.times[k]) << "," << i << "," << j << ","
            << csv_number(y(i, j)) << "\n";
  }
  artifacts.push_back({"outputs", "outputs.csv"});
  csvs.push_back({"outputs.csv", out.str()});

  double tol = sc.tolerance > 0.0 ? sc.tolerance : kTolGrp;
  Verdict v;
  v.name = "group-defect";
  v.pass = traj.max_group_defect <= tol;
  v.metrics = {{"max_group_defect", traj.max_group_defect},
               {"tolerance", tol}};
  verdicts.push_back(v);
}

void run_synthesize(
    const Scenario& sc, const GeneratorSet& s, std::vector<Verdict>& verdicts,
    std::vector<std::pair<std::string, std::string>>& artifacts,
    std::vector<std::pair<std::string, std::string>>& csvs, json& extra) {
  ParamGrid grid = scenario_grid(sc);
  ParametrizationSet ps = rho_set(sc);

  std::vector<double> times(static_cast<size_t>(sc.target_samples));
  for (int k = 0; k < sc.target_samples; ++k)
    times[static_cast<size_t>(k)] = sc.T * k / (sc.target_samples - 1);
  AlgebraElement gen = s.elements[sc.target_i];
  SigmaExpr expr = sc.target_c;
  TargetTrajectory target = TargetTrajectory::from_map(
      times, grid, [gen, expr](double t, double sigma) {
        return group_exp((t * sigma_expr_eval(expr, sigma)) * gen);
      });

  std::vector<StudyRow> rows =
      convergence_study(target, DriftMap{}, s, ps, sc.degrees, sc.dt,
                        sc.threads);

  std::ostringstream csv;
  csv << "K,delta,epsilon,seconds\n";
  json jrows = json::array();
  for (const StudyRow& r : rows) {
    char secs[32];
    std::snprintf(secs, sizeof(secs), "%.6f", r.seconds);
    csv << r.k << "," << csv_number(r.delta) << "," << csv_number(r.epsilon)
        << "," << secs << "\n";
    jrows.push_back({{"K", r.k}, {"delta", r.delta}, {"epsilon", r.epsilon}});
  }
  artifacts.push_back({"study", "study.csv"});
  csvs.push_back({"study.csv", csv.str()});
  extra["study"] = jrows;

  Verdict v;
  v.name = "convergence";
  const StudyRow& last = rows.back();
  v.pass = (sc.delta_max <= 0.0 || last.delta <= sc.delta_max) &&
           (sc.epsilon_max <= 0.0 || last.epsilon <= sc.epsilon_max);
  v.metrics = {{"delta", last.delta},
               {"epsilon", last.epsilon},
               {"K", static_cast<double>(last.k)}};
  if (!v.pass) v.note = "largest-degree fit misses the requested bounds";
  verdicts.push_back(v);
}

void run_observe(const Scenario& sc, const GeneratorSet& s,
                 std::vector<Verdict>& verdicts,
                 std::vector<std::pair<std::string, std::string>>& artifacts,
                 std::vector<std::pair<std::string, std::string>>& csvs) {
  ParamGrid grid = scenario_grid(sc);
  ParametrizationSet ps = rho_set(sc);
  CoefficientFamily fam = CoefficientFamily::make(s);

  Profile p1 = ansatz_profile(s, grid, sc.ansatz);
  MomentTable table = moment_table(p1, fam, ps, sc.k_obs, grid);

  std::ostringstream csv;
  csv << "i,j,exponents,value\n";
  for (int p = 0; p < table.dict.size(); ++p)
    for (int i = 0; i < fam.size(); ++i)
      for (int j = 0; j < fam.size(); ++j)
        csv << i << "," << j << "," << table.dict.exponent_string(p) << ","
            << csv_number(table.values[static_cast<size_t>(p)](i, j)) << "\n";
  artifacts.push_back({"moments", "moments.csv"});
  csvs.push_back({"moments.csv", csv.str()});

  if (sc.has_ansatz2) {
    Profile p2 = ansatz_profile(s, grid, sc.ansatz2);
    double tol = sc.tolerance > 0.0 ? sc.tolerance : kTolAlg;
    SeparationVerdict sv =
        moment_separation_test(p1, p2, fam, ps, sc.k_obs, tol);
    Verdict v;
    v.name = "separated";
    v.pass = sv.separated;
    v.metrics = {{"gap", sv.gap},
                 {"max_gap", sv.max_gap},
                 {"monomial", static_cast<double>(sv.monomial)},
                 {"i", static_cast<double>(sv.i)},
                 {"j", static_cast<double>(sv.j)}};
    if (!sv.separated)
      v.note = "profiles indistinguishable through degree " +
               std::to_string(sc.k_obs);
    verdicts.push_back(v);
  }
}

void run_sphere(const Scenario& sc, const GeneratorSet& s,
                std::vector<Verdict>& verdicts,
                std::vector<std::pair<std::string, std::string>>& artifacts,
                std::vector<std::pair<std::string, std::string>>& csvs) {
  ParamGrid grid = scenario_grid(sc);
  ParametrizationSet ps = rho_set(sc);
  int n = s.descriptor.n;

  Eigen::VectorXd x0;
  if (sc.init_point.empty()) {
    x0 = Eigen::VectorXd::Unit(n, 0);
  } else {
    x0.resize(n);
    for (int i = 0; i < n; ++i) x0(i) = sc.init_point[static_cast<size_t>(i)];
  }
  SphereProfile init = SphereProfile::constant(grid, SpherePoint::make(x0));
  PiecewiseConstantInput u = PiecewiseConstantInput::make(sc.segments);
  SphereTrajectory traj =
      integrate_sphere_ensemble(grid, init, s, ps, u, sc.T, sc.dt, sc.threads);

  std::ostringstream csv;
  csv << "t,sigma";
  for (int i = 1; i <= n; ++i) csv << ",x" << i;
  csv << "\n";
  for (size_t k = 0; k < traj.times.size(); ++k) {
    for (int q = 0; q < grid.size(); ++q) {
      csv << csv_number(traj.times[k]) << "," << csv_number(grid.nodes[q]);
      const Eigen::VectorXd& x = traj.profiles[k].points[q].x;
      for (int i = 0; i < n; ++i) csv << "," << csv_number(x(i));
      csv << "\n";
    }
  }
  artifacts.push_back({"sphere", "sphere.csv"});
  csvs.push_back({"sphere.csv", csv.str()});

  double tol = sc.tolerance > 0.0 ? sc.tolerance : 1e-9;
  Verdict v;
  v.name = "norm-defect";
  v.pass = traj.max_norm_defect <= tol;
  v.metrics = {{"max_norm_defect", traj.max_norm_defect}, {"tolerance", tol}};
  verdicts.push_back(v);
}

}  // namespace

SigmaExpr parse_sigma_expr(const std::string& text, bool allow_inverse) {
  SigmaExpr e;
  e.text = trim(text);
  const std::string& t = e.text;
  if (t == "sigma") {
    e.kind = SigmaExpr::Kind::sigma;
    return e;
  }
  if (t == "sin") {
    e.kind = SigmaExpr::Kind::sine;
    return e;
  }
  if (t == "exp") {
    e.kind = SigmaExpr::Kind::exponential;
    return e;
  }
  if (t == "inv" || t == "1/sigma") {
    if (!allow_inverse)
      throw ParseError(
          "rho functions must be sigma, sigma^k, a constant, sin, or exp; "
          "got '" +
          t + "'");
    e.kind = SigmaExpr::Kind::inverse;
    return e;
  }
  if (t.rfind("sigma^", 0) == 0) {
    long long k = parse_int("sigma power", t.substr(6));
    if (k < 1 || k > 64) throw ParseError("sigma power must be in [1, 64]");
    e.kind = SigmaExpr::Kind::power;
    e.k = static_cast<int>(k);
    return e;
  }
  e.kind = SigmaExpr::Kind::constant;
  e.c = parse_double("sigma expression", t);
  return e;
}

double sigma_expr_eval(const SigmaExpr& e, double sigma) {
  switch (e.kind) {
    case SigmaExpr::Kind::sigma:
      return sigma;
    case SigmaExpr::Kind::power: {
      double v = 1.0;
      for (int i = 0; i < e.k; ++i) v *= sigma;
      return v;
    }
    case SigmaExpr::Kind::constant:
      return e.c;
    case SigmaExpr::Kind::sine:
      return std::sin(sigma);
    case SigmaExpr::Kind::exponential:
      return std::exp(sigma);
    case SigmaExpr::Kind::inverse:
      return 1.0 / sigma;
  }
  throw Error("unreachable sigma expression kind");
}

Scenario parse_scenario_text(const std::string& text) {
  KeyMap m = parse_keys(text);
  Scenario sc;

  sc.command = m.want("command");
  static const std::set<std::string> kCommands = {
      "verify", "closure", "simulate", "synthesize", "observe", "sphere"};
  if (kCommands.count(sc.command) == 0)
    throw ParseError("unknown command '" + sc.command + "'");

  try {
    sc.family = family_from_name(m.want("family"));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  long long n = parse_int("n", m.want("n"));
  if (n < 2 || n > 16) throw ParseError("n must be in [2, 16]");
  sc.n = static_cast<int>(n);
  sc.variant = m.want("variant");
  GeneratorSet s;
  try {
    s = catalog_set(sc.family, sc.n, sc.variant);
  } catch (const Error& e) {
    throw ParseError(std::string("catalog: ") + e.what());
  }

  if (m.has("seed")) sc.seed = parse_u64("seed", m.take("seed"));
  if (m.has("threads")) {
    long long th = parse_int("threads", m.take("threads"));
    if (th < 1 || th > 256) throw ParseError("threads must be in [1, 256]");
    sc.threads = static_cast<int>(th);
  }
  if (m.has("tolerance")) {
    sc.tolerance = parse_double("tolerance", m.take("tolerance"));
    if (!(sc.tolerance > 0.0)) throw ParseError("tolerance must be positive");
  }

  bool any_grid = m.has("grid.a") || m.has("grid.b") || m.has("grid.q") ||
                  m.has("grid.rule");
  if (any_grid) {
    sc.grid_a = parse_double("grid.a", m.want("grid.a"));
    sc.grid_b = parse_double("grid.b", m.want("grid.b"));
    long long q = parse_int("grid.q", m.want("grid.q"));
    if (q < 2 || q > 100000) throw ParseError("grid.q must be in [2, 100000]");
    sc.grid_q = static_cast<int>(q);
    std::string rule = m.want("grid.rule");
    if (rule == "trapezoid")
      sc.grid_rule = QuadratureRule::uniform_trapezoid;
    else if (rule == "gauss")
      sc.grid_rule = QuadratureRule::gauss_legendre;
    else
      throw ParseError("grid.rule must be trapezoid or gauss");
    try {
      build_grid(sc.grid_a, sc.grid_b, sc.grid_q, sc.grid_rule);
    } catch (const Error& e) {
      throw ParseError(std::string("grid: ") + e.what());
    }
    sc.has_grid = true;
  }

  for (const std::string& raw : take_numbered(m, "rho"))
    sc.rho.push_back(parse_sigma_expr(raw, false));

  for (const std::string& raw : take_numbered(m, "control")) {
    std::vector<std::string> parts = split_ws(raw);
    if (parts.size() != 4)
      throw ParseError("control segments are 'i s nu t_end'; got '" + raw +
                       "'");
    PiecewiseConstantInput::Segment seg;
    long long i = parse_int("control generator", parts[0]);
    long long si = parse_int("control parametrization", parts[1]);
    if (i < 0 || i >= s.size())
      throw ParseError("control generator index out of range");
    if (si < 0 || si >= static_cast<long long>(sc.rho.size()))
      throw ParseError("control parametrization index out of range");
    seg.i = static_cast<int>(i);
    seg.s = static_cast<int>(si);
    seg.nu = parse_double("control rate", parts[2]);
    seg.t_end = parse_double("control switch time", parts[3]);
    sc.segments.push_back(seg);
  }
  if (!sc.segments.empty()) {
    try {
      PiecewiseConstantInput::make(sc.segments);
    } catch (const Error& e) {
      throw ParseError(std::string("control: ") + e.what());
    }
  }

  if (m.has("T")) sc.T = parse_double("T", m.take("T"));
  if (m.has("dt")) sc.dt = parse_double("dt", m.take("dt"));
  if (!(sc.T > 0.0) || !(sc.dt > 0.0))
    throw ParseError("T and dt must be positive");

  if (m.has("max_depth")) {
    long long d = parse_int("max_depth", m.take("max_depth"));
    if (d < 1 || d > 32) throw ParseError("max_depth must be in [1, 32]");
    sc.max_depth = static_cast<int>(d);
  }
  if (m.has("subset")) {
    for (const std::string& tok : split_ws(m.take("subset"))) {
      long long idx = parse_int("subset", tok);
      if (idx < 0 || idx >= s.size())
        throw ParseError("subset index out of range");
      sc.subset.push_back(static_cast<int>(idx));
    }
    if (sc.subset.empty()) throw ParseError("subset must list indices");
  }

  if (m.has("codistinguished"))
    sc.codistinguished = parse_bool("codistinguished",
                                    m.take("codistinguished"));
  if (m.has("samples")) {
    long long k = parse_int("samples", m.take("samples"));
    if (k < 1 || k > 100000) throw ParseError("samples must be in [1, 1e5]");
    sc.samples = static_cast<int>(k);
  }

  if (m.has("target.i") || m.has("target.c") || m.has("target.samples")) {
    long long ti = parse_int("target.i", m.want("target.i"));
    if (ti < 0 || ti >= s.size())
      throw ParseError("target.i out of range for the generator set");
    sc.target_i = static_cast<int>(ti);
    sc.target_c = parse_sigma_expr(m.want("target.c"), true);
    if (m.has("target.samples")) {
      long long ts = parse_int("target.samples", m.take("target.samples"));
      if (ts < 2 || ts > 100000)
        throw ParseError("target.samples must be at least 2");
      sc.target_samples = static_cast<int>(ts);
    }
  }
  if (m.has("degrees")) {
    for (const std::string& tok : split_ws(m.take("degrees"))) {
      long long d = parse_int("degrees", tok);
      if (d < 0 || d > 64) throw ParseError("degrees must be in [0, 64]");
      sc.degrees.push_back(static_cast<int>(d));
    }
    if (sc.degrees.empty()) throw ParseError("degrees must list at least one");
  }
  if (m.has("delta_max")) {
    sc.delta_max = parse_double("delta_max", m.take("delta_max"));
    if (!(sc.delta_max > 0.0)) throw ParseError("delta_max must be positive");
  }
  if (m.has("epsilon_max")) {
    sc.epsilon_max = parse_double("epsilon_max", m.take("epsilon_max"));
    if (!(sc.epsilon_max > 0.0))
      throw ParseError("epsilon_max must be positive");
  }

  if (m.has("k_obs")) {
    long long k = parse_int("k_obs", m.take("k_obs"));
    if (k < 0 || k > 32) throw ParseError("k_obs must be in [0, 32]");
    sc.k_obs = static_cast<int>(k);
  }
  auto parse_ansatz = [&](const std::string& prefix,
                          std::vector<std::tuple<int, int, double>>& out) {
    for (const std::string& raw : take_numbered(m, prefix)) {
      std::vector<std::string> parts = split_ws(raw);
      if (parts.size() != 3)
        throw ParseError(prefix + " entries are 'i degree value'; got '" +
                         raw + "'");
      long long i = parse_int(prefix, parts[0]);
      long long d = parse_int(prefix, parts[1]);
      if (i < 0 || i >= s.size())
        throw ParseError(prefix + " generator index out of range");
      if (d < 0 || d > 32)
        throw ParseError(prefix + " degree must be in [0, 32]");
      out.push_back({static_cast<int>(i), static_cast<int>(d),
                     parse_double(prefix, parts[2])});
    }
  };
  parse_ansatz("ansatz", sc.ansatz);
  parse_ansatz("ansatz2", sc.ansatz2);
  sc.has_ansatz2 = !sc.ansatz2.empty();

  if (m.has("init")) {
    for (const std::string& tok : split_ws(m.take("init")))
      sc.init_point.push_back(parse_double("init", tok));
    if (static_cast<int>(sc.init_point.size()) != sc.n)
      throw ParseError("init must list exactly n coordinates");
    double norm = 0.0;
    for (double c : sc.init_point) norm += c * c;
    if (std::abs(std::sqrt(norm) - 1.0) > 1e-8)
      throw ParseError("init must be a unit vector");
  }

  // Per-command requirements, so a missing block fails at parse time.
  bool needs_grid = sc.command == "simulate" || sc.command == "synthesize" ||
                    sc.command == "observe" || sc.command == "sphere";
  if (needs_grid) {
    if (!sc.has_grid) throw ParseError(sc.command + " needs a [grid] block");
    if (sc.rho.empty())
      throw ParseError(sc.command + " needs at least rho.1");
  }
  if ((sc.command == "simulate" || sc.command == "sphere") &&
      sc.segments.empty())
    throw ParseError(sc.command + " needs at least control.1");
  if (sc.command == "synthesize") {
    if (sc.target_i < 0) throw ParseError("synthesize needs target.i");
    if (sc.degrees.empty()) throw ParseError("synthesize needs degrees");
  }
  if (sc.command == "sphere" && sc.family != Family::so)
    throw ParseError("sphere scenarios need the so family");

  m.finish();
  return sc;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read scenario file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_scenario_text(buf.str());
}

RunResults run_scenario(const Scenario& sc) {
  GeneratorSet s = catalog_set(sc.family, sc.n, sc.variant);

  std::vector<Verdict> verdicts;
  std::vector<std::pair<std::string, std::string>> artifacts;
  std::vector<std::pair<std::string, std::string>> csvs;
  json extra = json::object();

  if (sc.command == "verify") {
    run_verify(sc, s, verdicts, extra);
  } else if (sc.command == "closure") {
    run_closure(sc, s, verdicts, extra);
  } else if (sc.command == "simulate") {
    run_simulate(sc, s, verdicts, artifacts, csvs);
  } else if (sc.command == "synthesize") {
    run_synthesize(sc, s, verdicts, artifacts, csvs, extra);
  } else if (sc.command == "observe") {
    run_observe(sc, s, verdicts, artifacts, csvs);
  } else if (sc.command == "sphere") {
    run_sphere(sc, s, verdicts, artifacts, csvs);
  } else {
    throw Error("unhandled command '" + sc.command + "'");
  }

  RunResults r;
  r.command = sc.command;
  r.pass = true;
  for (const Verdict& v : verdicts) r.pass = r.pass && v.pass;
  r.report_json = render_report_json(
      sc.command, family_name(sc.family), sc.n, sc.variant, sc.seed, verdicts,
      artifacts, extra.empty() ? "" : extra.dump());
  r.csv_files = std::move(csvs);
  return r;
}

}  // namespace liecast
