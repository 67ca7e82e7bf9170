#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace liecast {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// Default tolerances. Scenario files may override them; library entry points
// take explicit values where it matters.
inline constexpr double kTolAlg = 1e-9;
inline constexpr double kTolGrp = 1e-8;
inline constexpr double kTolClosure = 1e-9;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Matrix algebra families: so(n) real skew-symmetric, sl(n,R) real traceless,
// su(n) traceless anti-Hermitian.
enum class Family { so, sl, su };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

// Relative Frobenius defect from the family's defining constraints.
double algebra_invariant_residual(Family f, const Mat& m);
// Relative defect from the corresponding group constraints
// (orthogonal/unimodular/unitary, det = 1).
double group_invariant_residual(Family f, const Mat& m);

struct AlgebraElement {
  Family family = Family::so;
  int n = 0;
  Mat m;

  // Validates membership within tol, then canonicalizes storage for the real
  // families (imaginary parts are a representation artifact and are zeroed).
  static AlgebraElement make(Family f, const Mat& entries, double tol = kTolAlg);
  static AlgebraElement zero(Family f, int n);

  double norm() const { return m.norm(); }
};

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator*(double s, const AlgebraElement& a);

struct GroupElement {
  Family family = Family::so;
  int n = 0;
  Mat m;
  double residual = 0.0;  // measured constraint defect at construction

  static GroupElement checked(Family f, const Mat& entries, double tol = kTolGrp);
  // Wraps integrator output: records the defect, aborts only past abort_tol.
  static GroupElement from_integration(Family f, const Mat& entries,
                                       double abort_tol);
  static GroupElement identity(Family f, int n);
};

GroupElement operator*(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& g);

// Bracket is the negated matrix commutator; every structure table in this
// library assumes it.
AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);

GroupElement group_exp(const AlgebraElement& x);
AlgebraElement group_adjoint(const GroupElement& g, const AlgebraElement& x);

// Trace-form realization of the Killing form, with the family constant
// validated against the ad-trace definition at descriptor construction.
double killing_form(const AlgebraElement& x, const AlgebraElement& y);

// Global involution theta(X) = -X^dagger (identity on the compact families).
AlgebraElement cartan_theta(const AlgebraElement& x);

// Positive definite inner product -killing(X, theta(Y)) = c tr(X Y^dagger).
double btheta(const AlgebraElement& x, const AlgebraElement& y);

double killing_constant(Family f, int n);
int algebra_dim(Family f, int n);

struct AlgebraDescriptor {
  Family family = Family::so;
  int n = 0;
  int dim = 0;
  double killing_c = 0.0;
  std::vector<AlgebraElement> basis;  // btheta-orthonormal

  // Builds the basis and validates killing_c against the ad-trace oracle.
  static AlgebraDescriptor make(Family f, int n);
};

std::vector<double> btheta_coordinates(const AlgebraDescriptor& d,
                                       const AlgebraElement& x);
AlgebraElement from_coordinates(const AlgebraDescriptor& d,
                                const std::vector<double>& coords);

}  // namespace liecast
