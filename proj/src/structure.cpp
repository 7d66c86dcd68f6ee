#include "cgn/structure.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "cgn/errors.hpp"

namespace cgn {

CgnStructure::CgnStructure(std::vector<StructureNode> nodes) : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const StructureNode& a, const StructureNode& b) { return a.var < b.var; });
  for (auto& n : nodes_) std::sort(n.parents.begin(), n.parents.end());
}

bool CgnStructure::contains(int var) const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [var](const StructureNode& n) { return n.var == var; });
}

const StructureNode& CgnStructure::node(int var) const {
  for (const auto& n : nodes_)
    if (n.var == var) return n;
  throw ContractViolation("CgnStructure: no node with index " + std::to_string(var));
}

std::vector<int> CgnStructure::discrete_parents(int var) const {
  std::vector<int> out;
  for (int p : node(var).parents)
    if (node(p).kind == VarKind::Discrete) out.push_back(p);
  return out;
}

std::vector<int> CgnStructure::continuous_parents(int var) const {
  std::vector<int> out;
  for (int p : node(var).parents)
    if (node(p).kind == VarKind::Continuous) out.push_back(p);
  return out;
}

std::vector<int> CgnStructure::discrete_nodes() const {
  std::vector<int> out;
  for (const auto& n : nodes_)
    if (n.kind == VarKind::Discrete) out.push_back(n.var);
  return out;
}

std::vector<int> CgnStructure::continuous_nodes() const {
  std::vector<int> out;
  for (const auto& n : nodes_)
    if (n.kind == VarKind::Continuous) out.push_back(n.var);
  return out;
}

std::vector<StructureViolation> validate_structure(const CgnStructure& s) {
  std::vector<StructureViolation> out;
  std::map<int, const StructureNode*> by_var;
  for (const auto& n : s.nodes()) {
    if (!by_var.emplace(n.var, &n).second)
      out.push_back({ViolationKind::DuplicateNode,
                     "duplicate node " + std::to_string(n.var)});
  }
  for (const auto& n : s.nodes()) {
    for (int p : n.parents) {
      auto it = by_var.find(p);
      if (it == by_var.end()) {
        out.push_back({ViolationKind::UnknownParent,
                       "node " + std::to_string(n.var) + " references missing parent " +
                           std::to_string(p)});
        continue;
      }
      if (n.kind == VarKind::Discrete && it->second->kind == VarKind::Continuous)
        out.push_back({ViolationKind::ContinuousParentOfDiscrete,
                       "discrete node " + std::to_string(n.var) +
                           " has continuous parent " + std::to_string(p)});
    }
  }

  // Kahn's algorithm; whatever cannot be peeled lies on a cycle.
  std::map<int, int> indegree;
  std::map<int, std::vector<int>> children;
  for (const auto& n : s.nodes()) indegree[n.var] = 0;
  for (const auto& n : s.nodes())
    for (int p : n.parents)
      if (by_var.count(p)) {
        ++indegree[n.var];
        children[p].push_back(n.var);
      }
  std::vector<int> queue;
  for (auto& [v, d] : indegree)
    if (d == 0) queue.push_back(v);
  size_t seen = 0;
  while (!queue.empty()) {
    const int v = queue.back();
    queue.pop_back();
    ++seen;
    for (int c : children[v])
      if (--indegree[c] == 0) queue.push_back(c);
  }
  if (seen != indegree.size()) {
    std::ostringstream os;
    os << "cycle through nodes:";
    for (auto& [v, d] : indegree)
      if (d > 0) os << " " << v;
    out.push_back({ViolationKind::Cycle, os.str()});
  }
  return out;
}

std::string serialize_structure(const CgnStructure& s) {
  std::ostringstream os;
  for (const auto& n : s.nodes()) {
    os << "node " << n.var << " "
       << (n.kind == VarKind::Discrete ? "discrete" : "continuous") << " parents=";
    for (size_t i = 0; i < n.parents.size(); ++i) os << (i ? "," : "") << n.parents[i];
    os << "\n";
  }
  return os.str();
}

CgnStructure parse_structure(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<StructureNode> nodes;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag, kind, parents;
    StructureNode n;
    if (!(ls >> tag >> n.var >> kind >> parents) || tag != "node" ||
        parents.rfind("parents=", 0) != 0) {
      throw ParseError("structure line " + std::to_string(line_no) + ": expected `node <index> <kind> parents=...`");
    }
    if (kind == "discrete")
      n.kind = VarKind::Discrete;
    else if (kind == "continuous")
      n.kind = VarKind::Continuous;
    else
      throw ParseError("structure line " + std::to_string(line_no) + ": unknown kind \"" + kind + "\"");
    std::string list = parents.substr(8);
    std::stringstream ps(list);
    std::string item;
    while (std::getline(ps, item, ',')) {
      if (item.empty()) continue;
      n.parents.push_back(std::stoi(item));
    }
    nodes.push_back(std::move(n));
  }
  return CgnStructure(std::move(nodes));
}

CgnStructure load_structure(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError(path + ": cannot open structure file");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_structure(buf.str());
}

void save_structure(const CgnStructure& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": cannot open for writing");
  f << serialize_structure(s);
  if (!f) throw IoError(path + ": write failed");
}

long count_parameters(const CgnStructure& s, const Dataset& data) {
  long total = 0;
  for (const auto& n : s.nodes()) {
    if (n.kind == VarKind::Discrete) {
      CellIndexer cells(n.parents, data);
      total += cells.n_cells() * (data.cardinality(n.var) - 1);
    } else {
      CellIndexer cells(s.discrete_parents(n.var), data);
      const long per_cell = static_cast<long>(s.continuous_parents(n.var).size()) + 2;
      total += cells.n_cells() * per_cell;
    }
  }
  return total;
}

CellIndexer::CellIndexer(std::vector<int> vars, const Dataset& data) : vars_(std::move(vars)) {
  cards_.reserve(vars_.size());
  for (int v : vars_) {
    if (!data.is_discrete(v))
      throw ContractViolation("CellIndexer: variable " + std::to_string(v) + " is not discrete");
    cards_.push_back(data.cardinality(v));
    n_cells_ *= data.cardinality(v);
  }
}

CellIndexer::CellIndexer(std::vector<int> vars, std::vector<int> cards)
    : vars_(std::move(vars)), cards_(std::move(cards)) {
  if (vars_.size() != cards_.size())
    throw ContractViolation("CellIndexer: vars/cards length mismatch");
  for (int c : cards_) {
    if (c < 1) throw ContractViolation("CellIndexer: cardinality must be >= 1");
    n_cells_ *= c;
  }
}

long CellIndexer::code(const std::vector<int>& values) const {
  if (values.size() != vars_.size())
    throw ContractViolation("CellIndexer: value count mismatch");
  long c = 0;
  for (size_t i = 0; i < vars_.size(); ++i) {
    if (values[i] < 0 || values[i] >= cards_[i])
      throw ContractViolation("CellIndexer: value out of range for variable " +
                              std::to_string(vars_[i]));
    c = c * cards_[i] + values[i];
  }
  return c;
}

long CellIndexer::code_row(const Dataset& data, int row) const {
  long c = 0;
  for (size_t i = 0; i < vars_.size(); ++i) {
    const int v = data.dvalue(row, vars_[i]);
    if (v < 0 || v >= cards_[i])
      throw ContractViolation("CellIndexer: row value out of range");
    c = c * cards_[i] + v;
  }
  return c;
}

long CellIndexer::code_obs(const Observation& obs) const {
  long c = 0;
  for (size_t i = 0; i < vars_.size(); ++i) {
    const int v = obs.disc[vars_[i]];
    if (v < 0 || v >= cards_[i])
      throw ContractViolation("CellIndexer: observation value out of range for variable " +
                              std::to_string(vars_[i]));
    c = c * cards_[i] + v;
  }
  return c;
}

std::vector<int> CellIndexer::values(long code) const {
  std::vector<int> out(vars_.size());
  for (size_t i = vars_.size(); i-- > 0;) {
    out[i] = static_cast<int>(code % cards_[i]);
    code /= cards_[i];
  }
  return out;
}

Cell CellIndexer::cell(long code) const {
  return Cell{vars_, values(code)};
}

}  // namespace cgn
