#include "liecast/coefficients.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "liecast/rng.hpp"

namespace liecast {

namespace {

constexpr double kPi = 3.14159265358979323846;

double real_trace_checked(const Cplx& tr, const char* where) {
  if (std::abs(tr.imag()) > 1e-12 * std::max(1.0, std::abs(tr.real())))
    throw Error(std::string(where) + ": trace has a non-real part");
  return tr.real();
}

int span_rank(const GeneratorSet& s) {
  int n = s.descriptor.n;
  Eigen::MatrixXd v(2 * n * n, s.size());
  for (int c = 0; c < s.size(); ++c)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        v(i * n + j, c) = s.elements[c].m(i, j).real();
        v(n * n + i * n + j, c) = s.elements[c].m(i, j).imag();
      }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  return rank;
}

}  // namespace

CoefficientFamily CoefficientFamily::make(GeneratorSet base,
                                          Orientation orientation,
                                          double scale) {
  if (scale <= 0.0) throw Error("coefficient family: scale must be positive");
  if (span_rank(base) < base.descriptor.dim)
    throw Error("coefficient family: base set does not span the algebra");
  return CoefficientFamily{std::move(base), orientation, scale};
}

CoefficientFamily CoefficientFamily::make_unchecked(GeneratorSet base,
                                                    Orientation orientation,
                                                    double scale) {
  return CoefficientFamily{std::move(base), orientation, scale};
}

double phi_eval(const CoefficientFamily& fam, const GroupElement& g, int i,
                int j) {
  if (i < 0 || j < 0 || i >= fam.size() || j >= fam.size())
    throw Error("phi_eval: index out of range");
  Mat gm = (fam.orientation == Orientation::left) ? g.m : inverse(g).m;
  Mat ginv = gm.inverse();
  Cplx tr = (gm * fam.base.elements[j].m * ginv *
             fam.base.elements[i].m.adjoint())
                .trace();
  return fam.scale * real_trace_checked(tr, "phi_eval");
}

double phi_lie_derivative(const CoefficientFamily& fam, const GroupElement& g,
                          const AlgebraElement& x, int i, int j) {
  if (i < 0 || j < 0 || i >= fam.size() || j >= fam.size())
    throw Error("phi_lie_derivative: index out of range");
  if (x.family != fam.base.descriptor.family || x.n != fam.base.descriptor.n)
    throw Error("phi_lie_derivative: direction family mismatch");
  const Mat& xi = fam.base.elements[i].m;
  const Mat& xj = fam.base.elements[j].m;
  Cplx tr;
  if (fam.orientation == Orientation::left) {
    Mat ginv = g.m.inverse();
    tr = (g.m * bracket(fam.base.elements[j], x).m * ginv * xi.adjoint())
             .trace();
  } else {
    Mat ginv = g.m.inverse();
    Mat a = ginv * xj * g.m;
    tr = ((a * x.m - x.m * a) * xi.adjoint()).trace();
  }
  return fam.scale * real_trace_checked(tr, "phi_lie_derivative");
}

double ad_trace(const AlgebraDescriptor& d, const GroupElement& g) {
  double sum = 0.0;
  for (const auto& b : d.basis) sum += btheta(group_adjoint(g, b), b);
  return sum;
}

CenterCatalog center_elements(Family family, int n) {
  CenterCatalog cat;
  cat.family = family;
  cat.n = n;
  if (family == Family::su) {
    if (n < 2) throw Error("center_elements: su(n) requires n >= 2");
    for (int k = 0; k < n; ++k) {
      Cplx w = std::polar(1.0, 2.0 * kPi * k / n);
      // Roots landing on the axes must be exact so central translation is an
      // exact symmetry of the coefficient functions, not an approximate one.
      double re = std::abs(w.real()) < 1e-15 ? 0.0 : w.real();
      double im = std::abs(w.imag()) < 1e-15 ? 0.0 : w.imag();
      if (std::abs(std::abs(re) - 1.0) < 1e-15) re = re > 0 ? 1.0 : -1.0;
      if (std::abs(std::abs(im) - 1.0) < 1e-15) im = im > 0 ? 1.0 : -1.0;
      w = Cplx(re, im);
      cat.elements.push_back(
          GroupElement::checked(family, w * Mat::Identity(n, n)));
    }
  } else {
    if (n < (family == Family::so ? 3 : 2))
      throw Error("center_elements: unsupported size for this family");
    cat.elements.push_back(GroupElement::identity(family, n));
    if (n % 2 == 0)
      cat.elements.push_back(
          GroupElement::checked(family, -Mat::Identity(n, n)));
  }
  cat.chi = static_cast<int>(cat.elements.size());

  AlgebraDescriptor d = AlgebraDescriptor::make(family, n);
  for (const auto& z : cat.elements)
    for (const auto& b : d.basis)
      if ((group_adjoint(z, b).m - b.m).norm() > 1e-12)
        throw Error("center_elements: catalog element does not fix the algebra");
  return cat;
}

CodistinguishedReport verify_codistinguished(const CoefficientFamily& fam,
                                             const BracketTable& bt,
                                             int n_samples, double tol,
                                             std::uint64_t seed) {
  const int m = fam.size();
  const int dim = fam.base.descriptor.dim;
  if (bt.size != m)
    throw Error("verify_codistinguished: bracket table size mismatch");
  if (n_samples < 1) throw Error("verify_codistinguished: need samples");

  CodistinguishedReport r;
  r.killing_c = killing_constant(fam.base.descriptor.family,
                                 fam.base.descriptor.n);
  r.note = "samples are exponentials; only the identity component is covered";

  Rng rng(seed);
  std::vector<GroupElement> samples;
  for (int s = 0; s < n_samples; ++s)
    samples.push_back(random_group_element(fam.base.descriptor, rng));

  // Verdict 1: one-forms d phi^{ij} evaluated on the base frame directions.
  r.spanning_ok = true;
  bool first_sigma = true;
  for (int s = 0; s < n_samples; ++s) {
    Eigen::MatrixXd mat(m * m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int a = 0; a < m; ++a)
          mat(i * m + j, a) =
              phi_lie_derivative(fam, samples[s], fam.base.elements[a], i, j);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
    const auto& sv = svd.singularValues();
    double sigma_dim = (sv.size() >= dim) ? sv(dim - 1) : 0.0;
    double rel = (sv.size() > 0 && sv(0) > 0.0) ? sigma_dim / sv(0) : 0.0;
    if (first_sigma || sigma_dim < r.min_sigma) r.min_sigma = sigma_dim;
    if (first_sigma || rel < r.min_sigma_rel) r.min_sigma_rel = rel;
    first_sigma = false;
    if (rel <= tol) {
      if (r.spanning_ok) r.spanning_witness = s;
      r.spanning_ok = false;
    }
  }

  // Verdict 2: the bracket-table relations, pointwise. Diagonal directions
  // (i = j) must annihilate every phi^{i'...} row as well.
  r.relations_ok = true;
  for (int s = 0; s < n_samples; ++s) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int ip = 0; ip < m; ++ip) {
          double lhs =
              phi_lie_derivative(fam, samples[s], fam.base.elements[i], ip, j);
          double rhs = 0.0;
          if (i != j) {
            const BracketEntry& e = bt.at(i, j);
            if (!e.zero) rhs = -e.lambda * phi_eval(fam, samples[s], ip, e.k);
          }
          double resid = std::abs(lhs - rhs);
          if (resid > r.max_relation_residual) {
            r.max_relation_residual = resid;
            std::ostringstream os;
            os << "sample " << s << " (i=" << i << ", i'=" << ip << ", j=" << j
               << ")";
            r.relation_witness = os.str();
          }
        }
  }
  if (r.max_relation_residual > tol) r.relations_ok = false;

  // Verdict 3: separation up to the center.
  CenterCatalog center =
      center_elements(fam.base.descriptor.family, fam.base.descriptor.n);
  r.center_trivial = (center.chi == 1);
  for (int s = 0; s < n_samples; ++s)
    for (const GroupElement& z : center.elements) {
      GroupElement gz = samples[s] * z;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          r.max_center_disagreement =
              std::max(r.max_center_disagreement,
                       std::abs(phi_eval(fam, gz, i, j) -
                                phi_eval(fam, samples[s], i, j)));
    }

  const int n_pairs = 200;
  bool gap_ok = true;
  bool first_gap = true;
  for (int p = 0; p < n_pairs; ++p) {
    GroupElement g = random_group_element(fam.base.descriptor, rng);
    GroupElement gp = random_group_element(fam.base.descriptor, rng);
    Mat rel = inverse(g).m * gp.m;
    bool central = false;
    for (const GroupElement& z : center.elements)
      if ((rel - z.m).norm() <= 1e-6) central = true;
    if (central) continue;
    ++r.separation_pairs;
    double gap = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        gap = std::max(gap,
                       std::abs(phi_eval(fam, g, i, j) - phi_eval(fam, gp, i, j)));
    if (first_gap || gap < r.min_separation_gap) r.min_separation_gap = gap;
    first_gap = false;
    if (gap <= tol) {
      gap_ok = false;
      std::ostringstream os;
      os << "pair " << p << " not separated";
      r.separation_witness = os.str();
    }
  }
  r.separation_ok = gap_ok && (r.max_center_disagreement <= 1e-12);
  r.ok = r.spanning_ok && r.relations_ok && r.separation_ok;
  return r;
}

}  // namespace liecast
