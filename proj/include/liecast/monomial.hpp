#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace liecast {

struct ParametrizationSet;
struct ParamGrid;

// Graded-lexicographic dictionary of monomials prod_s rho_s^{k_s} with total
// degree in [min_degree, max_degree]. Degree 0 (the empty monomial, p = 1) is
// admitted only when min_degree = 0.
struct MonomialDictionary {
  int r = 0;
  int min_degree = 0;
  int max_degree = 0;
  std::vector<std::vector<int>> exponents;  // graded, then lex ascending

  int size() const { return static_cast<int>(exponents.size()); }

  static MonomialDictionary make(int r, int min_degree, int max_degree);

  double eval(const ParametrizationSet& ps, int idx, double sigma) const;
  // P x Q matrix of monomial values at the grid nodes.
  Eigen::MatrixXd eval_on_grid(const ParametrizationSet& ps,
                               const ParamGrid& grid) const;
  // Exponent tuple rendered as "k1;k2;...".
  std::string exponent_string(int idx) const;
};

}  // namespace liecast
