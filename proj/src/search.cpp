#include "cgn/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cgn/classifier.hpp"
#include "cgn/errors.hpp"
#include "cgn/model.hpp"

namespace cgn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_partition(const JanPartition& p) {
  std::vector<int> seen;
  for (const auto& g : p.groups) {
    if (g.empty()) throw ContractViolation("JanPartition: empty group");
    for (int a : g) {
      if (a == p.class_index) throw ContractViolation("JanPartition: class inside a group");
      seen.push_back(a);
    }
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw ContractViolation("JanPartition: attribute in two groups");
}

}  // namespace

int JanPartition::n_attrs() const {
  int n = 0;
  for (const auto& g : groups) n += static_cast<int>(g.size());
  return n;
}

std::vector<int> JanPartition::attrs() const {
  std::vector<int> out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  std::sort(out.begin(), out.end());
  return out;
}

JanPartition canonical(const JanPartition& p) {
  JanPartition out = p;
  for (auto& g : out.groups) std::sort(g.begin(), g.end());
  std::sort(out.groups.begin(), out.groups.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              return a.front() < b.front();
            });
  return out;
}

bool same_partition(const JanPartition& a, const JanPartition& b) {
  const JanPartition ca = canonical(a), cb = canonical(b);
  return ca.class_index == cb.class_index && ca.groups == cb.groups;
}

CgnStructure jan_to_structure(const JanPartition& p) {
  check_partition(p);
  const JanPartition c = canonical(p);
  std::vector<StructureNode> nodes;
  nodes.push_back({c.class_index, VarKind::Discrete, {}});
  for (const auto& g : c.groups) {
    for (size_t j = 0; j < g.size(); ++j) {
      StructureNode n{g[j], VarKind::Continuous, {c.class_index}};
      n.parents.insert(n.parents.end(), g.begin(), g.begin() + static_cast<long>(j));
      nodes.push_back(std::move(n));
    }
  }
  return CgnStructure(std::move(nodes));
}

std::vector<JanPartition> fw_candidates(const JanPartition& p,
                                        const std::vector<int>& all_attrs) {
  check_partition(p);
  const JanPartition base = canonical(p);
  const auto present = base.attrs();
  std::vector<JanPartition> out;
  for (int a : all_attrs) {
    if (std::binary_search(present.begin(), present.end(), a)) continue;
    for (size_t g = 0; g < base.groups.size(); ++g) {
      JanPartition cand = base;
      cand.groups[g].push_back(a);
      out.push_back(canonical(cand));
    }
    JanPartition fresh = base;
    fresh.groups.push_back({a});
    out.push_back(canonical(fresh));
  }
  return out;
}

std::vector<JanPartition> bw_candidates(const JanPartition& p) {
  check_partition(p);
  const JanPartition base = canonical(p);
  std::vector<JanPartition> out;
  for (size_t g = 0; g < base.groups.size(); ++g) {
    for (size_t j = 0; j < base.groups[g].size(); ++j) {
      JanPartition cand = base;
      cand.groups[g].erase(cand.groups[g].begin() + static_cast<long>(j));
      if (cand.groups[g].empty()) cand.groups.erase(cand.groups.begin() + static_cast<long>(g));
      out.push_back(canonical(cand));
    }
  }
  for (size_t g = 0; g < base.groups.size(); ++g) {
    for (size_t h = g + 1; h < base.groups.size(); ++h) {
      JanPartition cand = base;
      cand.groups[g].insert(cand.groups[g].end(), base.groups[h].begin(), base.groups[h].end());
      cand.groups.erase(cand.groups.begin() + static_cast<long>(h));
      out.push_back(canonical(cand));
    }
  }
  return out;
}

std::vector<JanPartition> wc_candidates(const JanPartition& p) {
  check_partition(p);
  const JanPartition base = canonical(p);
  std::vector<JanPartition> out;
  for (size_t g = 0; g < base.groups.size(); ++g) {
    for (size_t j = 0; j < base.groups[g].size(); ++j) {
      JanPartition cand = base;
      cand.groups[g].erase(cand.groups[g].begin() + static_cast<long>(j));
      if (cand.groups[g].empty()) cand.groups.erase(cand.groups.begin() + static_cast<long>(g));
      out.push_back(canonical(cand));
    }
  }
  return out;
}

namespace {

// Per-fold train/test materialization, shared by every candidate of one
// search invocation.
struct FoldData {
  Dataset train;
  Dataset test;
};

double fold_accuracy(const CgnStructure& s, const FoldData& fold, int class_var) {
  if (!is_acceptable(s, fold.train).acceptable) return kNegInf;
  const CgnModel model = fit_ml(s, fold.train);
  int correct = 0;
  for (int r = 0; r < fold.test.n_rows(); ++r) {
    const Observation obs = fold.test.row(r);
    const auto post = class_posterior_ml(model, class_var, obs);
    if (predict(post) == obs.disc[class_var]) ++correct;
  }
  return fold.test.n_rows() == 0
             ? kNegInf
             : static_cast<double>(correct) / static_cast<double>(fold.test.n_rows());
}

double score_partition(const JanPartition& p, const std::vector<FoldData>& folds) {
  const CgnStructure s = jan_to_structure(p);
  double total = 0.0;
  for (const auto& fold : folds) {
    const double a = fold_accuracy(s, fold, p.class_index);
    if (a == kNegInf) return kNegInf;
    total += a;
  }
  return total / static_cast<double>(folds.size());
}

}  // namespace

std::pair<JanPartition, SearchTrace> wrapper_search(const Dataset& data,
                                                    CandidateGenerator generator,
                                                    int cv_folds, std::uint64_t seed) {
  const auto splits = stratified_kfold(data, cv_folds, seed);
  std::vector<FoldData> folds;
  folds.reserve(splits.size());
  for (const auto& sp : splits)
    folds.push_back({subset(data, sp.train), subset(data, sp.test)});

  const std::vector<int> all_attrs = data.continuous_vars();

  JanPartition incumbent;
  incumbent.class_index = data.class_index();
  switch (generator) {
    case CandidateGenerator::Forward:
      break;  // class node only
    case CandidateGenerator::Backward:
      for (int a : all_attrs) incumbent.groups.push_back({a});
      break;
    case CandidateGenerator::Condensed:
      if (!all_attrs.empty()) incumbent.groups.push_back(all_attrs);
      break;
  }
  incumbent = canonical(incumbent);

  double incumbent_score = score_partition(incumbent, folds);
  if (incumbent_score == kNegInf)
    throw SearchError("wrapper_search: initial structure is not acceptable on the "
                      "cross-validation folds");

  SearchTrace trace;
  trace.cv_folds = cv_folds;
  trace.seed = seed;
  trace.iterations.push_back({1, incumbent_score, incumbent});

  auto generate = [&](const JanPartition& p) {
    switch (generator) {
      case CandidateGenerator::Forward:
        return fw_candidates(p, all_attrs);
      case CandidateGenerator::Backward:
        return bw_candidates(p);
      default:
        return wc_candidates(p);
    }
  };

  for (;;) {
    const auto candidates = generate(incumbent);
    if (candidates.empty()) break;

    double best_score = kNegInf;
    long best_params = 0;
    int best = -1;
    for (size_t i = 0; i < candidates.size(); ++i) {
      const double score = score_partition(candidates[i], folds);
      if (score == kNegInf) continue;
      const long params = count_parameters(jan_to_structure(candidates[i]), data);
      if (best < 0 || score > best_score ||
          (score == best_score && params < best_params)) {
        best = static_cast<int>(i);
        best_score = score;
        best_params = params;
      }
    }
    // strict improvement required; ties stop the search
    if (best < 0 || best_score <= incumbent_score) break;
    incumbent = candidates[best];
    incumbent_score = best_score;
    trace.iterations.push_back({static_cast<int>(candidates.size()), best_score, incumbent});
  }

  trace.final = incumbent;
  return {incumbent, trace};
}

JanPartition kbox_partition(const std::vector<int>& attrs, int class_index, int k) {
  if (attrs.empty()) throw ContractViolation("kbox: no attributes");
  if (k < 1 || k > static_cast<int>(attrs.size()))
    throw ContractViolation("kbox: k must be in [1, n_attrs]");
  JanPartition p;
  p.class_index = class_index;
  for (size_t start = 0; start < attrs.size(); start += static_cast<size_t>(k))
    p.groups.emplace_back(attrs.begin() + static_cast<long>(start),
                          attrs.begin() + static_cast<long>(std::min(start + static_cast<size_t>(k),
                                                                     attrs.size())));
  return p;
}

CgnStructure kbox_structure(int n_attrs, int k) {
  std::vector<int> attrs(static_cast<size_t>(n_attrs));
  for (int i = 0; i < n_attrs; ++i) attrs[static_cast<size_t>(i)] = i;
  return jan_to_structure(kbox_partition(attrs, n_attrs, k));
}

CgnStructure kband_structure_over(const std::vector<int>& attrs, int class_index, int k) {
  if (attrs.empty()) throw ContractViolation("kband: no attributes");
  if (k < 1 || k > static_cast<int>(attrs.size()))
    throw ContractViolation("kband: k must be in [1, n_attrs]");
  std::vector<int> ordered = attrs;
  std::sort(ordered.begin(), ordered.end());
  std::vector<StructureNode> nodes;
  nodes.push_back({class_index, VarKind::Discrete, {}});
  for (size_t j = 0; j < ordered.size(); ++j) {
    StructureNode n{ordered[j], VarKind::Continuous, {class_index}};
    const size_t first = j >= static_cast<size_t>(k - 1) ? j - static_cast<size_t>(k - 1) : 0;
    for (size_t i = first; i < j; ++i) n.parents.push_back(ordered[i]);
    nodes.push_back(std::move(n));
  }
  return CgnStructure(std::move(nodes));
}

CgnStructure kband_structure(int n_attrs, int k) {
  std::vector<int> attrs(static_cast<size_t>(n_attrs));
  for (int i = 0; i < n_attrs; ++i) attrs[static_cast<size_t>(i)] = i;
  return kband_structure_over(attrs, n_attrs, k);
}

}  // namespace cgn
