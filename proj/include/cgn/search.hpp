#ifndef CGN_SEARCH_HPP
#define CGN_SEARCH_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "cgn/dataset.hpp"
#include "cgn/errors.hpp"
#include "cgn/structure.hpp"

namespace cgn {

// Raised when a wrapper search cannot even evaluate its initial structure.
class SearchError : public Error {
 public:
  explicit SearchError(const std::string& msg) : Error(msg) {}
};

// Class-conditional partition of continuous attributes into mutually
// independent, internally fully dependent groups. Attributes absent from
// every group are left out of the classifier.
struct JanPartition {
  std::vector<std::vector<int>> groups;
  int class_index = -1;

  int n_attrs() const;
  std::vector<int> attrs() const;  // all grouped attributes, ascending
};

// Groups sorted internally and by first element; the comparison form.
JanPartition canonical(const JanPartition& p);
bool same_partition(const JanPartition& a, const JanPartition& b);

enum class CandidateGenerator { Forward, Backward, Condensed };

struct SearchIteration {
  int candidate_count = 0;
  double best_score = 0.0;
  JanPartition chosen;
};

struct SearchTrace {
  std::vector<SearchIteration> iterations;
  JanPartition final;
  int cv_folds = 0;
  std::uint64_t seed = 0;
};

// Class parent of every grouped attribute; inside a group the lower-indexed
// members parent the higher-indexed ones (a complete DAG in canonical order).
CgnStructure jan_to_structure(const JanPartition& p);

// One candidate per absent attribute and target group, plus one per absent
// attribute as a fresh singleton group.
std::vector<JanPartition> fw_candidates(const JanPartition& p,
                                        const std::vector<int>& all_attrs);

// One candidate per removed attribute plus one per merged group pair.
std::vector<JanPartition> bw_candidates(const JanPartition& p);

// One candidate per removed attribute.
std::vector<JanPartition> wc_candidates(const JanPartition& p);

// Greedy wrapper loop: score candidates by mean cross-validated accuracy of
// the ML-fitted classifier over one fixed fold split, keep the best while it
// strictly improves. Folds that make a structure unacceptable score -inf.
std::pair<JanPartition, SearchTrace> wrapper_search(const Dataset& data,
                                                    CandidateGenerator generator,
                                                    int cv_folds, std::uint64_t seed);

// Contiguous disjoint groups of k attributes (smaller trailing group when k
// does not divide the count).
JanPartition kbox_partition(const std::vector<int>& attrs, int class_index, int k);
CgnStructure kbox_structure(int n_attrs, int k);

// Each attribute depends on the class and the (at most) k-1 attributes that
// precede it.
CgnStructure kband_structure_over(const std::vector<int>& attrs, int class_index, int k);
CgnStructure kband_structure(int n_attrs, int k);

}  // namespace cgn

#endif  // CGN_SEARCH_HPP
