#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "liecast/ensemble.hpp"
#include "liecast/lie_core.hpp"
#include "liecast/report.hpp"

namespace liecast {

// Scenario-file problems: unreadable file, bad syntax, unknown or missing
// keys, values outside the catalog. Maps to process exit code 2.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

// Closed expression set for scalar functions of sigma. Scenario rho functions
// exclude the inverse; synthesis targets may use it.
struct SigmaExpr {
  enum class Kind { sigma, power, constant, sine, exponential, inverse };
  Kind kind = Kind::sigma;
  int k = 1;       // power exponent
  double c = 0.0;  // constant value
  std::string text;
};

SigmaExpr parse_sigma_expr(const std::string& text, bool allow_inverse);
double sigma_expr_eval(const SigmaExpr& e, double sigma);

struct Scenario {
  std::string command;
  Family family = Family::so;
  int n = 0;
  std::string variant;
  std::uint64_t seed = 1;
  int threads = 1;
  double tolerance = 0.0;  // 0 means the command default

  bool has_grid = false;
  double grid_a = 0.0;
  double grid_b = 0.0;
  int grid_q = 0;
  QuadratureRule grid_rule = QuadratureRule::uniform_trapezoid;

  std::vector<SigmaExpr> rho;  // rho.1 is the designated function

  std::vector<PiecewiseConstantInput::Segment> segments;
  double T = 1.0;
  double dt = 1e-2;

  // closure
  int max_depth = 6;
  std::vector<int> subset;  // indicator subset, empty = none

  // verify
  bool codistinguished = false;
  int samples = 100;

  // synthesize
  int target_i = -1;
  SigmaExpr target_c;
  int target_samples = 11;
  std::vector<int> degrees;
  double delta_max = 0.0;    // 0 = informational only
  double epsilon_max = 0.0;  // 0 = informational only

  // observe
  int k_obs = 2;
  std::vector<std::tuple<int, int, double>> ansatz;   // (i, degree, value)
  std::vector<std::tuple<int, int, double>> ansatz2;  // comparison profile
  bool has_ansatz2 = false;

  // sphere
  std::vector<double> init_point;  // empty = e1
};

Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario_file(const std::string& path);

// Executes a parsed scenario and assembles the full report in memory. Throws
// Error on internal failures (exit code 3); verdict failures only lower
// RunResults::pass (exit code 1).
RunResults run_scenario(const Scenario& sc);

}  // namespace liecast
