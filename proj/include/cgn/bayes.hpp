#ifndef CGN_BAYES_HPP
#define CGN_BAYES_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "cgn/dataset.hpp"
#include "cgn/distributions.hpp"
#include "cgn/errors.hpp"
#include "cgn/structure.hpp"

namespace cgn {

// A continuous variable whose empirical variance vanished while building the
// suggested prior; the message names it.
class DegeneratePriorError : public Error {
 public:
  explicit DegeneratePriorError(const std::string& msg) : Error(msg) {}
};

struct PriorConfig {
  double dirichlet_pseudocount = 0.01;
  double rho_base = 1.1;
};

// Dirichlet hyperparameters of one discrete node. Cells are materialized on
// update; anything untouched falls back to the node's default prior row.
struct NodeDirichletTable {
  int var = -1;
  CellIndexer pa_cells;
  DirichletParams default_psi;
  std::unordered_map<long, DirichletParams> cells;

  const DirichletParams& at(long cell) const {
    auto it = cells.find(cell);
    return it == cells.end() ? default_psi : it->second;
  }
};

// NIG hyperparameters of one continuous node, per discrete-parent cell.
struct NodeNigTable {
  int var = -1;
  CellIndexer pd_cells;
  std::vector<int> pc_vars;
  NigParams default_prior;
  std::unordered_map<long, NigParams> cells;

  const NigParams& at(long cell) const {
    auto it = cells.find(cell);
    return it == cells.end() ? default_prior : it->second;
  }
};

// The full hyperparameter set of the conjugate hyper-distribution over CGN
// parameters: one Dirichlet per discrete node and cell, one NIG per
// continuous node and cell.
class DhdnigParams {
 public:
  DhdnigParams() = default;
  DhdnigParams(CgnStructure s, std::vector<NodeDirichletTable> d,
               std::vector<NodeNigTable> c)
      : structure_(std::move(s)), discrete_(std::move(d)), continuous_(std::move(c)) {}

  const CgnStructure& structure() const { return structure_; }
  const std::vector<NodeDirichletTable>& discrete() const { return discrete_; }
  const std::vector<NodeNigTable>& continuous() const { return continuous_; }
  const NodeDirichletTable& dirichlet(int var) const;
  const NodeNigTable& nig(int var) const;

 private:
  friend DhdnigParams posterior(const DhdnigParams&, const Dataset&);
  CgnStructure structure_;
  std::vector<NodeDirichletTable> discrete_;
  std::vector<NodeNigTable> continuous_;
};

// The suggested prior: every Dirichlet entry equals the configured
// pseudo-count; per continuous node the NIG is centered on the pooled mean
// with a scale built from per-variable empirical variances, materialized
// cell-by-cell with cell-conditional parent means where the training split
// has rows (pooled means otherwise).
DhdnigParams init_prior(const CgnStructure& s, const Dataset& data,
                        const PriorConfig& cfg = {});

// Conjugate update of every hyperparameter from the sample.
DhdnigParams posterior(const DhdnigParams& prior, const Dataset& data);

// Log posterior-predictive density of a full assignment: Dirichlet ratio
// factors for discrete nodes, Student factors for continuous ones.
double predictive_logdensity(const DhdnigParams& psi, const Observation& x);

// Line-oriented serialization; numeric fields round-trip bit-exactly.
std::string serialize_dhdnig(const DhdnigParams& psi);
DhdnigParams parse_dhdnig(const std::string& text);

}  // namespace cgn

#endif  // CGN_BAYES_HPP
