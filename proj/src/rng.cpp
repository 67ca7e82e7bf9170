#include "liecast/rng.hpp"

#include <cmath>

namespace liecast {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform01();
  } while (u1 <= 1e-300);
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * kPi * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * kPi * u2);
}

AlgebraElement random_algebra_element(const AlgebraDescriptor& d, Rng& rng,
                                      double max_norm) {
  std::vector<double> c(d.dim);
  for (auto& v : c) v = rng.uniform(-1.0, 1.0);
  AlgebraElement x = from_coordinates(d, c);
  double nrm = x.norm();
  if (nrm < 1e-12) {
    x = d.basis[0];
    nrm = x.norm();
  }
  double target = rng.uniform(0.05, 1.0) * max_norm;
  return (target / nrm) * x;
}

GroupElement random_group_element(const AlgebraDescriptor& d, Rng& rng) {
  return group_exp(random_algebra_element(d, rng, kPi));
}

}  // namespace liecast
