#ifndef CGN_DATASET_HPP
#define CGN_DATASET_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cgn/linalg.hpp"

namespace cgn {

enum class VarKind { Discrete, Continuous };

struct VariableMeta {
  std::string name;
  VarKind kind = VarKind::Continuous;
  int cardinality = 0;  // discrete only; 0 lets load_csv discover the labels
  int index = -1;
  std::vector<std::string> labels;  // discrete category labels, code order
};

// One full assignment: disc[v] / cont[v] indexed by variable index; only the
// slot matching the variable's kind is meaningful.
struct Observation {
  std::vector<int> disc;
  std::vector<double> cont;
};

// A joint assignment to an ordered subset of discrete variables.
struct Cell {
  std::vector<int> indexes;
  std::vector<int> values;
};

// Per-cell counts and moment matrices over a continuous index set B:
// n, d(i_A), s, ybar, ss, ssd and sigma_hat = ssd/n. For an empty cell the
// sums are zero and mean/sigma_hat are left empty.
struct SufficientStats {
  long n = 0;
  std::vector<int> member_rows;
  Vector s;
  Vector mean;
  Matrix ss;
  Matrix ssd;
  Matrix sigma_hat;
};

// Immutable mixed discrete/continuous dataset with a designated discrete
// class variable. Column storage; rows carry provenance ids through
// subset/subsample so experiment bookkeeping can be audited.
class Dataset {
 public:
  Dataset(std::vector<VariableMeta> meta, int class_index);

  int n_rows() const { return n_rows_; }
  int n_vars() const { return static_cast<int>(meta_.size()); }
  int class_index() const { return class_index_; }
  const std::vector<VariableMeta>& meta() const { return meta_; }
  const VariableMeta& var(int v) const { return meta_.at(v); }
  bool is_discrete(int v) const { return var(v).kind == VarKind::Discrete; }
  int cardinality(int v) const { return var(v).cardinality; }

  // All continuous variable indexes, ascending; all discrete likewise.
  std::vector<int> continuous_vars() const;
  std::vector<int> discrete_vars() const;

  int dvalue(int row, int v) const { return dcols_[slot_[v]][row]; }
  double cvalue(int row, int v) const { return ccols_[slot_[v]][row]; }
  const std::vector<int>& dcolumn(int v) const { return dcols_[slot_[v]]; }
  const std::vector<double>& ccolumn(int v) const { return ccols_[slot_[v]]; }

  Observation row(int r) const;
  void append_row(const Observation& obs, std::int64_t origin = -1);

  // Provenance: for each row, its row id in the originally loaded/generated
  // dataset, composed through subset() and subsample().
  const std::vector<std::int64_t>& origins() const { return origins_; }

 private:
  std::vector<VariableMeta> meta_;
  int class_index_;
  int n_rows_ = 0;
  std::vector<int> slot_;                   // variable index -> column slot
  std::vector<std::vector<int>> dcols_;     // discrete columns
  std::vector<std::vector<double>> ccols_;  // continuous columns
  std::vector<std::int64_t> origins_;
};

// Parse a headered comma-separated file against the schema. Discrete columns
// either declare their labels up front or get dense codes in first-appearance
// order. Errors name the offending 1-based line.
Dataset load_csv(const std::string& path, const std::vector<VariableMeta>& schema,
                 int class_index);

// Same parser over in-memory text (the file contents, header included).
Dataset parse_csv(const std::string& text, const std::vector<VariableMeta>& schema,
                  int class_index, const std::string& origin_name = "<memory>");

void write_csv(const Dataset& data, const std::string& path);

// Rows of `data` whose listed discrete variables match the cell.
std::vector<int> rows_in_cell(const Dataset& data, const Cell& cell);

// Statistics of the continuous set B over the rows falling in `cell`,
// computed with the two-pass centered accumulation.
SufficientStats cell_stats(const Dataset& data, const Cell& cell,
                           const std::vector<int>& b_vars);
SufficientStats stats_over_rows(const Dataset& data, const std::vector<int>& rows,
                                const std::vector<int>& b_vars);

struct FoldSplit {
  std::vector<int> train;
  std::vector<int> test;
};

// Deterministic stratified k-fold split: per-class counts in each fold differ
// from exact proportionality by at most one row.
std::vector<FoldSplit> stratified_kfold(const Dataset& data, int k, std::uint64_t seed);

// Deterministic stratified subsample of ceil(fraction * n) rows, at least one
// row per class, original row order preserved.
Dataset subsample(const Dataset& data, double fraction, std::uint64_t seed);

// Rows (by position) extracted into a new dataset, order preserved.
Dataset subset(const Dataset& data, const std::vector<int>& rows);

// Grouping of row indexes by the joint value of `vars` (all discrete).
std::map<std::vector<int>, std::vector<int>> group_rows(const Dataset& data,
                                                        const std::vector<int>& vars);

}  // namespace cgn

#endif  // CGN_DATASET_HPP
