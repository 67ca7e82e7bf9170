#include "liecast/monomial.hpp"

#include "liecast/ensemble.hpp"
#include "liecast/lie_core.hpp"

namespace liecast {

namespace {

void enumerate_degree(int r, int degree, std::vector<int>& partial,
                      std::vector<std::vector<int>>& out) {
  if (static_cast<int>(partial.size()) == r - 1) {
    partial.push_back(degree);
    out.push_back(partial);
    partial.pop_back();
    return;
  }
  for (int k = 0; k <= degree; ++k) {
    partial.push_back(k);
    enumerate_degree(r, degree - k, partial, out);
    partial.pop_back();
  }
}

}  // namespace

MonomialDictionary MonomialDictionary::make(int r, int min_degree,
                                            int max_degree) {
  if (r < 1) throw Error("monomial dictionary needs at least one function");
  if (min_degree < 0 || max_degree < min_degree)
    throw Error("monomial dictionary needs 0 <= min_degree <= max_degree");
  MonomialDictionary d;
  d.r = r;
  d.min_degree = min_degree;
  d.max_degree = max_degree;
  std::vector<int> partial;
  for (int deg = min_degree; deg <= max_degree; ++deg)
    enumerate_degree(r, deg, partial, d.exponents);
  return d;
}

double MonomialDictionary::eval(const ParametrizationSet& ps, int idx,
                                double sigma) const {
  if (ps.size() != r)
    throw Error("parametrization count does not match the dictionary");
  const std::vector<int>& e = exponents.at(idx);
  double value = 1.0;
  for (int s = 0; s < r; ++s) {
    double base = ps.eval(s, sigma);
    for (int k = 0; k < e[s]; ++k) value *= base;
  }
  return value;
}

Eigen::MatrixXd MonomialDictionary::eval_on_grid(const ParametrizationSet& ps,
                                                 const ParamGrid& grid) const {
  Eigen::MatrixXd vals(size(), grid.size());
  for (int p = 0; p < size(); ++p)
    for (int q = 0; q < grid.size(); ++q)
      vals(p, q) = eval(ps, p, grid.nodes[q]);
  return vals;
}

std::string MonomialDictionary::exponent_string(int idx) const {
  const std::vector<int>& e = exponents.at(idx);
  std::string out;
  for (int s = 0; s < r; ++s) {
    if (s > 0) out += ';';
    out += std::to_string(e[s]);
  }
  return out;
}

}  // namespace liecast
