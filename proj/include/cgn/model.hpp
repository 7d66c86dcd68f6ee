#ifndef CGN_MODEL_HPP
#define CGN_MODEL_HPP

#include <string>
#include <vector>

#include "cgn/dataset.hpp"
#include "cgn/distributions.hpp"
#include "cgn/errors.hpp"
#include "cgn/structure.hpp"

namespace cgn {

// Multinomial table of one discrete node: one row per joint assignment of
// its (discrete) parents.
struct DiscreteCpt {
  int var = -1;
  CellIndexer parent_cells;
  std::vector<MultinomialParams> rows;  // indexed by parent cell code
};

// Per-cell Gaussian linear regressions of one continuous node. The regressor
// vector is [1, y_pc] with pc sorted by variable index.
struct ContinuousCpd {
  int var = -1;
  CellIndexer pd_cells;
  std::vector<int> pc_vars;
  std::vector<GaussLinRegParams> cells;  // indexed by pd cell code
};

struct CgnModel {
  CgnStructure structure;
  std::vector<DiscreteCpt> discrete;
  std::vector<ContinuousCpd> continuous;

  const DiscreteCpt& cpt(int var) const;
  const ContinuousCpd& cpd(int var) const;
};

enum class ViolationReason { EmptyCell, SingularSsd };

struct AcceptabilityViolation {
  int var = -1;
  Cell cell;
  ViolationReason reason = ViolationReason::EmptyCell;
};

struct AcceptabilityReport {
  bool acceptable = true;
  std::vector<AcceptabilityViolation> violations;
  std::string describe() const;
};

// Thrown by fit_ml on a non-acceptable sample; carries the diagnosis.
class NotAcceptableError : public Error {
 public:
  NotAcceptableError(const std::string& msg, AcceptabilityReport r)
      : Error(msg), report(std::move(r)) {}
  AcceptabilityReport report;
};

// Sample acceptability for a structure: every discrete node/parent-cell
// combination observed, and for every continuous node each discrete-parent
// cell is nonempty with a positive-definite ssd over pc(v) + {v}.
AcceptabilityReport is_acceptable(const CgnStructure& s, const Dataset& data);

// Maximum-likelihood parameters: count ratios for discrete nodes;
// regressions recovered from the per-cell covariance estimate for
// continuous nodes. Requires an acceptable sample.
CgnModel fit_ml(const CgnStructure& s, const Dataset& data);

// Sum of the per-node log factors of the full assignment.
double joint_logdensity(const CgnModel& m, const Observation& x);

// Training log-likelihood: joint_logdensity summed over all rows.
double total_loglik(const CgnModel& m, const Dataset& data);

}  // namespace cgn

#endif  // CGN_MODEL_HPP
