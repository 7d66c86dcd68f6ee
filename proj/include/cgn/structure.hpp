#ifndef CGN_STRUCTURE_HPP
#define CGN_STRUCTURE_HPP

#include <optional>
#include <string>
#include <vector>

#include "cgn/dataset.hpp"

namespace cgn {

struct StructureNode {
  int var = -1;
  VarKind kind = VarKind::Continuous;
  std::vector<int> parents;  // variable indexes, kept sorted ascending
};

enum class ViolationKind { Cycle, ContinuousParentOfDiscrete, UnknownParent, DuplicateNode };

struct StructureViolation {
  ViolationKind kind;
  std::string message;
};

// A DAG over mixed variables. Nodes reference variables by their dataset
// index; a structure may cover only a subset of a dataset's variables
// (selective classifiers drop attributes entirely).
class CgnStructure {
 public:
  CgnStructure() = default;
  explicit CgnStructure(std::vector<StructureNode> nodes);

  const std::vector<StructureNode>& nodes() const { return nodes_; }
  bool contains(int var) const;
  const StructureNode& node(int var) const;

  // pa(v) restricted to discrete / continuous parents.
  std::vector<int> discrete_parents(int var) const;   // pd(v)
  std::vector<int> continuous_parents(int var) const;  // pc(v)

  std::vector<int> discrete_nodes() const;
  std::vector<int> continuous_nodes() const;

 private:
  std::vector<StructureNode> nodes_;  // sorted by var
};

// Acyclicity, the no-continuous-parent-of-discrete rule, parent references.
// An empty result means the structure is valid.
std::vector<StructureViolation> validate_structure(const CgnStructure& s);

// Line-oriented text format, one line per node:
//   node <index> <kind> parents=<comma-separated indexes>
std::string serialize_structure(const CgnStructure& s);
CgnStructure parse_structure(const std::string& text);
CgnStructure load_structure(const std::string& path);
void save_structure(const CgnStructure& s, const std::string& path);

// Number of free parameters of the CGN over `data`'s cardinalities:
// (card-1) per discrete cell, |pc|+2 per continuous cell.
long count_parameters(const CgnStructure& s, const Dataset& data);

// Mixed-radix coding of joint assignments to a fixed list of discrete
// variables. An empty variable list has the single code 0.
class CellIndexer {
 public:
  CellIndexer() = default;
  CellIndexer(std::vector<int> vars, const Dataset& data);
  CellIndexer(std::vector<int> vars, std::vector<int> cards);

  const std::vector<int>& vars() const { return vars_; }
  const std::vector<int>& cards() const { return cards_; }
  long n_cells() const { return n_cells_; }

  long code(const std::vector<int>& values) const;
  long code_row(const Dataset& data, int row) const;
  long code_obs(const Observation& obs) const;
  std::vector<int> values(long code) const;
  Cell cell(long code) const;

 private:
  std::vector<int> vars_;
  std::vector<int> cards_;
  long n_cells_ = 1;
};

}  // namespace cgn

#endif  // CGN_STRUCTURE_HPP
