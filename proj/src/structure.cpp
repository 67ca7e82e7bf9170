#include "liecast/structure.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liecast {

namespace {

const Cplx kI(0.0, 1.0);

Mat unit_entry(int n, int i, int j) {
  Mat e = Mat::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

std::string pair_label(const char* prefix, int i, int j) {
  std::ostringstream os;
  os << prefix << (i + 1) << (j + 1);
  return os.str();
}

// Canonical ray representative: unit Frobenius norm, sign fixed by the first
// entry above 1e-12 in row-major order (positive real part, or positive
// imaginary part when the real part vanishes).
Mat canonical_ray(const Mat& w) {
  Mat u = w / w.norm();
  for (int r = 0; r < u.rows(); ++r)
    for (int c = 0; c < u.cols(); ++c) {
      Cplx e = u(r, c);
      if (std::abs(e) <= 1e-12) continue;
      if (std::abs(e.real()) > 1e-12) {
        if (e.real() < 0) u = -u;
      } else if (e.imag() < 0) {
        u = -u;
      }
      return u;
    }
  return u;
}

// |cos angle| between unit rays.
double ray_cosine(const Mat& a, const Mat& b) {
  return std::abs((a.adjoint() * b).trace().real());
}

int real_span_rank(const std::vector<AlgebraElement>& elems) {
  int n = elems[0].n;
  Eigen::MatrixXd v(2 * n * n, static_cast<int>(elems.size()));
  for (int c = 0; c < static_cast<int>(elems.size()); ++c) {
    const Mat& m = elems[c].m;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        v(i * n + j, c) = m(i, j).real();
        v(n * n + i * n + j, c) = m(i, j).imag();
      }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  return rank;
}

}  // namespace

GeneratorSet GeneratorSet::make(AlgebraDescriptor descriptor,
                                std::vector<AlgebraElement> elements,
                                std::vector<std::string> labels) {
  if (elements.empty()) throw Error("generator set: empty");
  if (labels.size() != elements.size())
    throw Error("generator set: label count mismatch");
  for (const auto& e : elements) {
    if (e.family != descriptor.family || e.n != descriptor.n)
      throw Error("generator set: element family mismatch");
    if (e.norm() <= 1e-14) throw Error("generator set: zero element");
  }
  return GeneratorSet{std::move(descriptor), std::move(elements),
                      std::move(labels)};
}

GeneratorSet catalog_set(Family family, int n, const std::string& variant) {
  std::vector<AlgebraElement> elems;
  std::vector<std::string> labels;
  auto add = [&](const Mat& m, std::string label) {
    elems.push_back(AlgebraElement::make(family, m));
    labels.push_back(std::move(label));
  };

  if (family == Family::so) {
    if (n < 3) throw Error("catalog: so(n) requires n >= 3");
    if (variant != "standard") throw Error("catalog: unknown so variant " + variant);
    if (n == 3) {
      // Cyclic set: X_i = e_j e_k^T - e_k e_j^T, (i, j, k) cyclic.
      for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        add(unit_entry(3, j, k) - unit_entry(3, k, j),
            "X" + std::to_string(i + 1));
      }
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          add(unit_entry(n, i, j) - unit_entry(n, j, i), pair_label("O", i, j));
    }
  } else if (family == Family::sl) {
    if (n < 2) throw Error("catalog: sl(n) requires n >= 2");
    if (variant == "A" || variant == "Aprime") {
      if (n != 2) throw Error("catalog: variant " + variant + " is sl(2) only");
      Mat h(2, 2), x(2, 2), y(2, 2);
      h << 1, 0, 0, -1;
      if (variant == "A") {
        x << 0, 1, 0, 0;
        y << 0, 0, 1, 0;
        add(h, "H");
        add(x, "X");
        add(y, "Y");
      } else {
        x << 0, 1, 1, 0;
        y << 0, 1, -1, 0;
        add(h, "H'");
        add(x, "X'");
        add(y, "Y'");
      }
    } else if (variant == "chevalley") {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          add(unit_entry(n, i, i) - unit_entry(n, j, j), pair_label("H", i, j));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) add(unit_entry(n, i, j), pair_label("E", i, j));
    } else {
      throw Error("catalog: unknown sl variant " + variant);
    }
  } else {
    if (n < 2) throw Error("catalog: su(n) requires n >= 2");
    if (variant == "compact" && n == 2) {
      Mat s1(2, 2), s2(2, 2), s3(2, 2);
      s1 << 0, kI, kI, 0;
      s2 << 0, 1, -1, 0;
      s3 << kI, 0, 0, -kI;
      add(s1, "is1");
      add(s2, "is2");
      add(s3, "is3");
    } else if (variant == "compact-pair" || (variant == "compact" && n >= 3)) {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          add(unit_entry(n, i, j) - unit_entry(n, j, i), pair_label("Y", i, j));
          add(kI * (unit_entry(n, i, j) + unit_entry(n, j, i)),
              pair_label("Z", i, j));
        }
    } else {
      throw Error("catalog: unknown su variant " + variant);
    }
  }

  return GeneratorSet::make(AlgebraDescriptor::make(family, n), std::move(elems),
                            std::move(labels));
}

const char* verify_outcome_name(VerifyOutcome o) {
  switch (o) {
    case VerifyOutcome::ok:
      return "ok";
    case VerifyOutcome::span_deficient:
      return "span_deficient";
    case VerifyOutcome::closure_failure:
      return "closure_failure";
    case VerifyOutcome::surjectivity_failure:
      return "surjectivity_failure";
  }
  return "unknown";
}

DistinguishedReport verify_distinguished(const GeneratorSet& s,
                                         double tol_closure) {
  const int m = s.size();
  const int dim = s.descriptor.dim;
  if (m < dim) throw Error("verify_distinguished: fewer elements than dim");

  DistinguishedReport r;
  r.table.size = m;
  r.span_rank = real_span_rank(s.elements);
  if (r.span_rank < dim) {
    r.outcome = VerifyOutcome::span_deficient;
    r.message = "span rank " + std::to_string(r.span_rank) + " below dimension " +
                std::to_string(dim);
    return r;
  }

  std::vector<double> hit_strength(m, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      AlgebraElement br = bracket(s.elements[i], s.elements[j]);
      double scale = std::max(s.elements[i].norm(), s.elements[j].norm());
      BracketEntry e;
      if (br.norm() <= tol_closure * scale * scale) {
        e.zero = true;
      } else {
        bool matched = false;
        for (int k = 0; k < m && !matched; ++k) {
          const Mat& xk = s.elements[k].m;
          double lam = (xk.adjoint() * br.m).trace().real() / xk.squaredNorm();
          double resid = (br.m - lam * xk).norm() / br.norm();
          if (resid <= tol_closure) {
            e.k = k;
            e.lambda = lam;
            e.residual = resid;
            matched = true;
          }
        }
        if (!matched) {
          r.outcome = VerifyOutcome::closure_failure;
          r.witness = {i, j};
          r.message = "bracket (" + s.labels[i] + ", " + s.labels[j] +
                      ") matches no single generator";
          return r;
        }
        r.max_residual = std::max(r.max_residual, e.residual);
        hit_strength[e.k] = std::max(hit_strength[e.k], std::abs(e.lambda));
      }
      r.table.entries[{i, j}] = e;
      BracketEntry mirror = e;
      mirror.lambda = -e.lambda;
      r.table.entries[{j, i}] = mirror;
    }
  }

  std::vector<int> unhit;
  double weakest = 0.0;
  bool first = true;
  for (int k = 0; k < m; ++k) {
    if (hit_strength[k] == 0.0) {
      unhit.push_back(k);
    } else {
      weakest = first ? hit_strength[k] : std::min(weakest, hit_strength[k]);
      first = false;
    }
  }
  if (!unhit.empty()) {
    r.outcome = VerifyOutcome::surjectivity_failure;
    r.witness = unhit;
    r.message = "elements never produced by a bracket: " +
                std::to_string(unhit.size());
    return r;
  }
  r.min_hit_lambda = weakest;
  r.ok = true;
  r.message = "distinguished";
  return r;
}

ProjectiveClosure lie_closure(const GeneratorSet& s, int max_depth,
                              double tol_proj, int safety_factor) {
  if (max_depth < 0) throw Error("lie_closure: negative depth");
  const int cap = safety_factor * s.descriptor.dim;

  struct ClassInfo {
    Mat rep;
    std::set<int> depths;
    int first_depth;
  };
  std::vector<ClassInfo> classes;
  std::vector<std::vector<int>> levels(max_depth + 1);

  auto classify = [&](const Mat& w, int depth) {
    Mat u = canonical_ray(w);
    for (int c = 0; c < static_cast<int>(classes.size()); ++c) {
      if (ray_cosine(classes[c].rep, u) >= 1.0 - tol_proj) {
        if (classes[c].depths.insert(depth).second) levels[depth].push_back(c);
        return;
      }
    }
    classes.push_back({u, {depth}, depth});
    levels[depth].push_back(static_cast<int>(classes.size()) - 1);
    if (static_cast<int>(classes.size()) > cap)
      throw Error("lie_closure: class count exceeds safety cap; set is not "
                  "projectively finite at this tolerance");
  };

  for (const auto& e : s.elements) classify(e.m, 0);

  for (int k = 1; k <= max_depth; ++k) {
    for (int a = 0; 2 * a <= k - 1; ++a) {
      int b = k - 1 - a;
      for (size_t ui = 0; ui < levels[a].size(); ++ui) {
        size_t start = (a == b) ? ui + 1 : 0;
        for (size_t vi = start; vi < levels[b].size(); ++vi) {
          int u = levels[a][ui], v = levels[b][vi];
          if (u == v) continue;
          const Mat& mu = classes[u].rep;
          const Mat& mv = classes[v].rep;
          Mat w = -(mu * mv - mv * mu);
          if (w.norm() <= tol_proj) continue;
          classify(w, k);
        }
      }
    }
  }

  ProjectiveClosure out;
  out.max_depth = max_depth;
  for (const auto& c : classes) {
    out.representatives.push_back(
        AlgebraElement::make(s.descriptor.family, c.rep));
    out.depths.push_back(c.depths);
    out.first_depth.push_back(c.first_depth);
  }
  out.finite_flag = true;
  for (const auto& c : classes)
    if (c.first_depth >= max_depth - 1) out.finite_flag = false;
  return out;
}

PreDistinguishedReport verify_pre_distinguished(const GeneratorSet& s,
                                                int max_depth,
                                                double tol_closure,
                                                double tol_proj) {
  PreDistinguishedReport r;
  r.closure = lie_closure(s, max_depth, tol_proj);
  if (!r.closure.finite_flag) {
    r.ok = false;
    return r;
  }
  std::vector<std::string> labels;
  for (size_t i = 0; i < r.closure.representatives.size(); ++i)
    labels.push_back("B" + std::to_string(i));
  GeneratorSet closed = GeneratorSet::make(s.descriptor,
                                           r.closure.representatives, labels);
  r.distinguished = verify_distinguished(closed, tol_closure);
  r.ok = r.distinguished.ok;
  return r;
}

std::vector<IndicatorSequence> indicator_sequences(const GeneratorSet& subset,
                                                   const GeneratorSet& reference,
                                                   int max_depth,
                                                   double tol_proj) {
  if (subset.descriptor.family != reference.descriptor.family ||
      subset.descriptor.n != reference.descriptor.n)
    throw Error("indicator_sequences: subset and reference algebras differ");
  for (const auto& e : subset.elements) {
    Mat u = canonical_ray(e.m);
    bool found = false;
    for (const auto& ref : reference.elements)
      if (ray_cosine(u, canonical_ray(ref.m)) >= 1.0 - tol_proj) found = true;
    if (!found)
      throw Error("indicator_sequences: subset element not in the reference set");
  }

  ProjectiveClosure c = lie_closure(subset, max_depth, tol_proj);

  std::vector<IndicatorSequence> out;
  for (int i = 0; i < reference.size(); ++i) {
    IndicatorSequence seq;
    seq.label = reference.labels[i];
    Mat target = canonical_ray(reference.elements[i].m);
    for (size_t cidx = 0; cidx < c.representatives.size(); ++cidx) {
      if (ray_cosine(c.representatives[cidx].m, target) >= 1.0 - tol_proj) {
        seq.depths = c.depths[cidx];
        break;
      }
    }

    if (seq.depths.size() < 2) {
      seq.note = "fewer than two appearances within the horizon";
    } else {
      for (auto it = seq.depths.begin(); it != seq.depths.end() && !seq.has_pattern;
           ++it) {
        for (int delta = 1; delta <= 4 && !seq.has_pattern; ++delta) {
          int terms = 0;
          bool full = true;
          for (int d = *it; d <= max_depth; d += delta) {
            if (seq.depths.count(d) == 0) {
              full = false;
              break;
            }
            ++terms;
          }
          if (full && terms >= 2) {
            seq.has_pattern = true;
            seq.delta0 = *it;
            seq.delta = delta;
          }
        }
      }
      if (!seq.has_pattern)
        seq.note = "no arithmetic progression fills the horizon";
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace liecast
