#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "liecast/lie_core.hpp"

namespace liecast {

struct GeneratorSet {
  AlgebraDescriptor descriptor;
  std::vector<AlgebraElement> elements;
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(elements.size()); }

  // Validates: common family/size, no zero elements, labels match.
  static GeneratorSet make(AlgebraDescriptor descriptor,
                           std::vector<AlgebraElement> elements,
                           std::vector<std::string> labels);
};

// Catalog of generator sets.
//   so(n):  "standard"  (n = 3: the cyclic X_i; n > 3: Omega_ij, i < j)
//   sl(2):  "A" {H, X, Y} and "Aprime" {H', X', Y'}
//   sl(n):  "chevalley" {H_a over positive roots} + {E_ij, i != j}
//   su(2):  "compact" = {i s1, i s2, i s3}
//   su(n):  "compact-pair" {E_ij - E_ji, i(E_ij + E_ji), i < j}; for n >= 3
//           "compact" is the same set
GeneratorSet catalog_set(Family family, int n, const std::string& variant);

struct BracketEntry {
  bool zero = false;
  int k = -1;          // 0-based target index; -1 for zero entries
  double lambda = 0.0;
  double residual = 0.0;
};

// Ordered pairs (i, j), i != j; the (j, i) entry carries exactly -lambda.
struct BracketTable {
  int size = 0;
  std::map<std::pair<int, int>, BracketEntry> entries;

  const BracketEntry& at(int i, int j) const { return entries.at({i, j}); }
};

enum class VerifyOutcome {
  ok,
  span_deficient,
  closure_failure,
  surjectivity_failure,
};

const char* verify_outcome_name(VerifyOutcome o);

struct DistinguishedReport {
  VerifyOutcome outcome = VerifyOutcome::ok;
  bool ok = false;
  std::string message;
  std::vector<int> witness;  // indices of the first violation
  int span_rank = 0;
  double max_residual = 0.0;   // worst accepted closure residual
  double min_hit_lambda = 0.0; // weakest surjectivity hit
  BracketTable table;          // complete iff ok
};

DistinguishedReport verify_distinguished(const GeneratorSet& s,
                                         double tol_closure = kTolClosure);

struct ProjectiveClosure {
  // Unit Frobenius norm, canonical sign; class order is discovery order.
  std::vector<AlgebraElement> representatives;
  std::vector<std::set<int>> depths;  // depths at which each class appears
  std::vector<int> first_depth;
  int max_depth = 0;
  bool finite_flag = false;  // no new class in the final two depths
};

// Breadth-first bracket generation by depth, with angle-based projective
// dedup (classes are rays over the reals).
ProjectiveClosure lie_closure(const GeneratorSet& s, int max_depth,
                              double tol_proj = 1e-9, int safety_factor = 10);

struct PreDistinguishedReport {
  bool ok = false;
  ProjectiveClosure closure;
  DistinguishedReport distinguished;  // over the closure representatives
};

PreDistinguishedReport verify_pre_distinguished(const GeneratorSet& s,
                                                int max_depth,
                                                double tol_closure = kTolClosure,
                                                double tol_proj = 1e-9);

struct IndicatorSequence {
  std::string label;      // element of the reference set
  std::set<int> depths;   // depths at which some product is parallel to it
  bool has_pattern = false;
  int delta0 = 0;
  int delta = 0;
  std::string note;
};

// Depth sets of each reference element against products of the subset, with
// arithmetic-progression detection: delta0 scans observed depths ascending,
// delta in [1,4]; the progression must fill the horizon and contain at least
// two terms.
std::vector<IndicatorSequence> indicator_sequences(const GeneratorSet& subset,
                                                   const GeneratorSet& reference,
                                                   int max_depth,
                                                   double tol_proj = 1e-9);

}  // namespace liecast
