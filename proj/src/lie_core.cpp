#include "liecast/lie_core.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace liecast {

namespace {

AlgebraElement raw(Family f, int n, Mat m) {
  AlgebraElement e;
  e.family = f;
  e.n = n;
  e.m = std::move(m);
  return e;
}

void require_square(const Mat& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 2)
    throw Error(std::string(what) + ": need a square matrix of size >= 2");
}

void require_same(const AlgebraElement& a, const AlgebraElement& b,
                  const char* what) {
  if (a.family != b.family || a.n != b.n)
    throw Error(std::string(what) + ": family/size mismatch");
}

int min_n(Family f) { return f == Family::so ? 3 : 2; }

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::so: return "so";
    case Family::sl: return "sl";
    case Family::su: return "su";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "so") return Family::so;
  if (name == "sl") return Family::sl;
  if (name == "su") return Family::su;
  throw Error("unknown algebra family: " + name);
}

double algebra_invariant_residual(Family f, const Mat& m) {
  double scale = std::max(1.0, m.norm());
  switch (f) {
    case Family::so:
      return std::max(m.imag().norm(), (m + m.transpose()).norm()) / scale;
    case Family::sl:
      return std::max(m.imag().norm(), std::abs(m.trace())) / scale;
    case Family::su:
      return std::max((m + m.adjoint()).norm(), std::abs(m.trace())) / scale;
  }
  return 0.0;
}

double group_invariant_residual(Family f, const Mat& m) {
  const Mat id = Mat::Identity(m.rows(), m.cols());
  double scale = std::max(1.0, m.norm());
  double det_defect = std::abs(m.determinant() - Cplx(1.0, 0.0));
  switch (f) {
    case Family::so:
      return std::max({m.imag().norm() / scale,
                       (m.transpose() * m - id).norm() / scale, det_defect});
    case Family::sl:
      return std::max(m.imag().norm() / scale, det_defect);
    case Family::su:
      return std::max((m.adjoint() * m - id).norm() / scale, det_defect);
  }
  return 0.0;
}

AlgebraElement AlgebraElement::make(Family f, const Mat& entries, double tol) {
  require_square(entries, "AlgebraElement");
  int n = static_cast<int>(entries.rows());
  if (n < min_n(f))
    throw Error(std::string("AlgebraElement: ") + family_name(f) +
                " supported for n >= " + std::to_string(min_n(f)));
  double res = algebra_invariant_residual(f, entries);
  if (res > tol) {
    std::ostringstream os;
    os << "AlgebraElement: not in " << family_name(f) << "(" << n
       << ") within tol " << tol << " (residual " << res << ")";
    throw Error(os.str());
  }
  Mat m = entries;
  if (f != Family::su) m.imag().setZero();
  return raw(f, n, std::move(m));
}

AlgebraElement AlgebraElement::zero(Family f, int n) {
  return raw(f, n, Mat::Zero(n, n));
}

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  require_same(a, b, "operator+");
  return raw(a.family, a.n, a.m + b.m);
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  require_same(a, b, "operator-");
  return raw(a.family, a.n, a.m - b.m);
}

AlgebraElement operator*(double s, const AlgebraElement& a) {
  return raw(a.family, a.n, s * a.m);
}

GroupElement GroupElement::checked(Family f, const Mat& entries, double tol) {
  require_square(entries, "GroupElement");
  GroupElement g;
  g.family = f;
  g.n = static_cast<int>(entries.rows());
  g.m = entries;
  if (f != Family::su) g.m.imag().setZero();
  g.residual = group_invariant_residual(f, entries);
  if (g.residual > tol) {
    std::ostringstream os;
    os << "GroupElement: constraint defect " << g.residual << " exceeds tol "
       << tol << " for " << family_name(f) << "(" << g.n << ")";
    throw Error(os.str());
  }
  return g;
}

GroupElement GroupElement::from_integration(Family f, const Mat& entries,
                                            double abort_tol) {
  GroupElement g;
  g.family = f;
  g.n = static_cast<int>(entries.rows());
  g.m = entries;
  g.residual = group_invariant_residual(f, entries);
  if (g.residual > abort_tol) {
    std::ostringstream os;
    os << "integration left the group: defect " << g.residual
       << " exceeds abort threshold " << abort_tol;
    throw Error(os.str());
  }
  return g;
}

GroupElement GroupElement::identity(Family f, int n) {
  GroupElement g;
  g.family = f;
  g.n = n;
  g.m = Mat::Identity(n, n);
  g.residual = 0.0;
  return g;
}

GroupElement operator*(const GroupElement& a, const GroupElement& b) {
  if (a.family != b.family || a.n != b.n) throw Error("operator*: mismatch");
  GroupElement g;
  g.family = a.family;
  g.n = a.n;
  g.m = a.m * b.m;
  g.residual = group_invariant_residual(g.family, g.m);
  return g;
}

GroupElement inverse(const GroupElement& g) {
  GroupElement r;
  r.family = g.family;
  r.n = g.n;
  r.m = g.m.inverse();
  r.residual = group_invariant_residual(r.family, r.m);
  return r;
}

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  require_same(x, y, "bracket");
  return raw(x.family, x.n, -(x.m * y.m - y.m * x.m));
}

GroupElement group_exp(const AlgebraElement& x) {
  GroupElement g;
  g.family = x.family;
  g.n = x.n;
  g.m = x.m.exp();
  g.residual = group_invariant_residual(g.family, g.m);
  return g;
}

AlgebraElement group_adjoint(const GroupElement& g, const AlgebraElement& x) {
  if (g.family != x.family || g.n != x.n) throw Error("group_adjoint: mismatch");
  Mat r = g.m * x.m * g.m.inverse();
  if (g.family != Family::su) r.imag().setZero();
  return raw(x.family, x.n, std::move(r));
}

double killing_constant(Family f, int n) {
  switch (f) {
    case Family::so: return static_cast<double>(n - 2);
    case Family::sl: return 2.0 * n;
    case Family::su: return 2.0 * n;
  }
  return 0.0;
}

int algebra_dim(Family f, int n) {
  return f == Family::so ? n * (n - 1) / 2 : n * n - 1;
}

double killing_form(const AlgebraElement& x, const AlgebraElement& y) {
  require_same(x, y, "killing_form");
  return killing_constant(x.family, x.n) * (x.m * y.m).trace().real();
}

AlgebraElement cartan_theta(const AlgebraElement& x) {
  return raw(x.family, x.n, -x.m.adjoint());
}

double btheta(const AlgebraElement& x, const AlgebraElement& y) {
  require_same(x, y, "btheta");
  return killing_constant(x.family, x.n) * (x.m * y.m.adjoint()).trace().real();
}

namespace {

std::vector<Mat> raw_basis(Family f, int n) {
  std::vector<Mat> out;
  const Cplx i1(0.0, 1.0);
  if (f == Family::so) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Mat m = Mat::Zero(n, n);
        m(i, j) = 1.0;
        m(j, i) = -1.0;
        out.push_back(m);
      }
  } else if (f == Family::sl) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) {
          Mat m = Mat::Zero(n, n);
          m(i, j) = 1.0;
          out.push_back(m);
        }
    for (int k = 0; k + 1 < n; ++k) {
      Mat m = Mat::Zero(n, n);
      m(k, k) = 1.0;
      m(k + 1, k + 1) = -1.0;
      out.push_back(m);
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Mat a = Mat::Zero(n, n);
        a(i, j) = 1.0;
        a(j, i) = -1.0;
        out.push_back(a);
        Mat b = Mat::Zero(n, n);
        b(i, j) = i1;
        b(j, i) = i1;
        out.push_back(b);
      }
    for (int k = 0; k + 1 < n; ++k) {
      Mat m = Mat::Zero(n, n);
      m(k, k) = i1;
      m(k + 1, k + 1) = -i1;
      out.push_back(m);
    }
  }
  return out;
}

}  // namespace

AlgebraDescriptor AlgebraDescriptor::make(Family f, int n) {
  if (n < min_n(f))
    throw Error(std::string("AlgebraDescriptor: ") + family_name(f) +
                " supported for n >= " + std::to_string(min_n(f)));
  AlgebraDescriptor d;
  d.family = f;
  d.n = n;
  d.dim = algebra_dim(f, n);

  // Frobenius-orthonormal intermediate basis (modified Gram-Schmidt).
  std::vector<Mat> fro;
  for (Mat v : raw_basis(f, n)) {
    for (const Mat& u : fro) v -= (u.adjoint() * v).trace().real() * u;
    double nv = v.norm();
    if (nv < 1e-12) throw Error("AlgebraDescriptor: degenerate raw basis");
    fro.push_back(v / nv);
  }
  if (static_cast<int>(fro.size()) != d.dim)
    throw Error("AlgebraDescriptor: basis size mismatch");

  // Validate the trace-form constant against the ad-trace definition of the
  // Killing form on the full basis Gram.
  const double c = killing_constant(f, n);
  auto coords = [&](const Mat& m) {
    Eigen::VectorXd out(d.dim);
    for (int k = 0; k < d.dim; ++k)
      out(k) = (fro[k].adjoint() * m).trace().real();
    return out;
  };
  std::vector<Eigen::MatrixXd> ad(d.dim);
  for (int k = 0; k < d.dim; ++k) {
    ad[k].resize(d.dim, d.dim);
    for (int l = 0; l < d.dim; ++l) {
      Mat br = -(fro[l] * fro[k] - fro[k] * fro[l]);  // bracket(F_l, F_k)
      ad[k].col(l) = coords(br);
    }
  }
  double worst = 0.0;
  for (int a = 0; a < d.dim; ++a)
    for (int b = a; b < d.dim; ++b) {
      double oracle = (ad[a] * ad[b]).trace();
      double model = c * (fro[a] * fro[b]).trace().real();
      worst = std::max(worst, std::abs(oracle - model));
    }
  if (worst > 1e-9 * std::max(1.0, c))
    throw Error("AlgebraDescriptor: killing constant failed ad-trace validation");
  d.killing_c = c;

  const double s = 1.0 / std::sqrt(c);
  d.basis.reserve(d.dim);
  for (const Mat& m : fro) d.basis.push_back(raw(f, n, s * m));
  return d;
}

std::vector<double> btheta_coordinates(const AlgebraDescriptor& d,
                                       const AlgebraElement& x) {
  if (d.family != x.family || d.n != x.n)
    throw Error("btheta_coordinates: mismatch");
  std::vector<double> out(d.dim);
  for (int k = 0; k < d.dim; ++k) out[k] = btheta(x, d.basis[k]);
  return out;
}

AlgebraElement from_coordinates(const AlgebraDescriptor& d,
                                const std::vector<double>& coords) {
  if (static_cast<int>(coords.size()) != d.dim)
    throw Error("from_coordinates: wrong length");
  Mat m = Mat::Zero(d.n, d.n);
  for (int k = 0; k < d.dim; ++k) m += coords[k] * d.basis[k].m;
  return raw(d.family, d.n, std::move(m));
}

}  // namespace liecast
