#include "cgn/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "cgn/errors.hpp"

namespace cgn {

namespace {

void require_valid(const CgnStructure& s) {
  const auto violations = validate_structure(s);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "invalid structure:";
    for (const auto& v : violations) os << " [" << v.message << "]";
    throw ContractViolation(os.str());
  }
}

std::unordered_map<long, std::vector<int>> rows_by_cell(const Dataset& data,
                                                        const CellIndexer& cells) {
  std::unordered_map<long, std::vector<int>> groups;
  for (int r = 0; r < data.n_rows(); ++r) groups[cells.code_row(data, r)].push_back(r);
  return groups;
}

// The suggested scale matrix: for regressors z = [1, y_pc] centered at m with
// per-variable variances k,
//   V = [ 1 + m'K^-1 m   -m'K^-1 ]
//       [ -K^-1 m          K^-1  ]
Matrix suggested_scale(const Vector& m, const Vector& k_inv_diag) {
  const Eigen::Index q = m.size();
  Matrix v(q + 1, q + 1);
  const Vector km = k_inv_diag.cwiseProduct(m);
  v(0, 0) = 1.0 + m.dot(km);
  v.block(0, 1, 1, q) = -km.transpose();
  v.block(1, 0, q, 1) = -km;
  v.block(1, 1, q, q) = Matrix(k_inv_diag.asDiagonal());
  return v;
}

// Design matrix [1, y_pc] and response column of one cell's rows.
void cell_design(const Dataset& data, const std::vector<int>& rows, int var,
                 const std::vector<int>& pc_vars, Matrix& design, Vector& responses) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto q = static_cast<Eigen::Index>(pc_vars.size());
  design.resize(n, q + 1);
  responses.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < q; ++j)
      design(i, j + 1) = data.cvalue(rows[i], pc_vars[j]);
    responses[i] = data.cvalue(rows[i], var);
  }
}

void append_doubles(std::ostringstream& os, const char* key, const double* v, long n) {
  char buf[40];
  os << key << "=";
  for (long i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    os << (i ? "," : "") << buf;
  }
}

std::vector<double> parse_doubles(const std::string& list, int line_no) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ParseError("hyperparameter line " + std::to_string(line_no) +
                       ": bad number \"" + item + "\"");
    }
  }
  return out;
}

std::vector<int> parse_ints(const std::string& list, int line_no) {
  std::vector<int> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ParseError("hyperparameter line " + std::to_string(line_no) +
                       ": bad integer \"" + item + "\"");
    }
  }
  return out;
}

// "key=value" fields of a record line, after the fixed prefix tokens.
std::string field(const std::string& line, const std::string& key, int line_no) {
  const std::string want = " " + key + "=";
  const auto pos = line.find(want);
  if (pos == std::string::npos)
    throw ParseError("hyperparameter line " + std::to_string(line_no) + ": missing field " + key);
  const auto start = pos + want.size();
  auto end = line.find(' ', start);
  if (end == std::string::npos) end = line.size();
  return line.substr(start, end - start);
}

}  // namespace

const NodeDirichletTable& DhdnigParams::dirichlet(int var) const {
  for (const auto& t : discrete_)
    if (t.var == var) return t;
  throw ContractViolation("DhdnigParams: no Dirichlet table for variable " +
                          std::to_string(var));
}

const NodeNigTable& DhdnigParams::nig(int var) const {
  for (const auto& t : continuous_)
    if (t.var == var) return t;
  throw ContractViolation("DhdnigParams: no NIG table for variable " + std::to_string(var));
}

DhdnigParams init_prior(const CgnStructure& s, const Dataset& data, const PriorConfig& cfg) {
  require_valid(s);
  if (data.n_rows() < 1) throw ContractViolation("init_prior: empty dataset");
  if (!(cfg.dirichlet_pseudocount > 0.0) || !(cfg.rho_base > 0.0))
    throw ContractViolation("init_prior: prior configuration values must be > 0");

  // pooled empirical mean and ML variance per continuous variable
  std::vector<double> pooled_mean(data.n_vars(), 0.0), pooled_var(data.n_vars(), 0.0);
  for (int v = 0; v < data.n_vars(); ++v) {
    if (data.is_discrete(v)) continue;
    const auto& col = data.ccolumn(v);
    double sum = 0.0;
    for (double x : col) sum += x;
    const double mean = sum / static_cast<double>(col.size());
    double ssd = 0.0;
    for (double x : col) ssd += (x - mean) * (x - mean);
    pooled_mean[v] = mean;
    pooled_var[v] = ssd / static_cast<double>(col.size());
  }

  std::vector<NodeDirichletTable> discrete;
  for (int var : s.discrete_nodes()) {
    NodeDirichletTable t;
    t.var = var;
    t.pa_cells = CellIndexer(s.node(var).parents, data);
    t.default_psi = DirichletParams(
        Vector::Constant(data.cardinality(var), cfg.dirichlet_pseudocount));
    discrete.push_back(std::move(t));
  }

  std::vector<NodeNigTable> continuous;
  for (int var : s.continuous_nodes()) {
    NodeNigTable t;
    t.var = var;
    t.pd_cells = CellIndexer(s.discrete_parents(var), data);
    t.pc_vars = s.continuous_parents(var);
    const auto q = static_cast<Eigen::Index>(t.pc_vars.size());

    if (pooled_var[var] <= 0.0)
      throw DegeneratePriorError("init_prior: variable \"" + data.var(var).name +
                                 "\" (index " + std::to_string(var) +
                                 ") has zero empirical variance");
    Vector k_inv(q);
    for (Eigen::Index j = 0; j < q; ++j) {
      const int pv = t.pc_vars[j];
      if (pooled_var[pv] <= 0.0)
        throw DegeneratePriorError("init_prior: variable \"" + data.var(pv).name +
                                   "\" (index " + std::to_string(pv) +
                                   ") has zero empirical variance");
      k_inv[j] = 1.0 / pooled_var[pv];
    }

    Vector mu = Vector::Zero(q + 1);
    mu[0] = pooled_mean[var];
    const double rho = cfg.rho_base + 0.5 * static_cast<double>(q);
    const double phi = 0.5 * pooled_var[var];

    Vector pooled_pc(q);
    for (Eigen::Index j = 0; j < q; ++j) pooled_pc[j] = pooled_mean[t.pc_vars[j]];
    t.default_prior = NigParams(mu, suggested_scale(pooled_pc, k_inv), rho, phi);

    // Cells seen in the training split use cell-conditional moments: the
    // hyperparameters carry the cell subscript, so the empirical mean and
    // variance condition on the cell wherever it has rows. The response
    // variance keeps the pooled fallback when a cell is constant.
    for (const auto& [code, rows] : rows_by_cell(data, t.pd_cells)) {
      const double n_cell = static_cast<double>(rows.size());
      Vector cell_pc(q);
      for (Eigen::Index j = 0; j < q; ++j) {
        double sum = 0.0;
        for (int r : rows) sum += data.cvalue(r, t.pc_vars[j]);
        cell_pc[j] = sum / n_cell;
      }
      double cell_sum = 0.0;
      for (int r : rows) cell_sum += data.cvalue(r, t.var);
      const double cell_mean = cell_sum / n_cell;
      double cell_ssd = 0.0;
      for (int r : rows) {
        const double d = data.cvalue(r, t.var) - cell_mean;
        cell_ssd += d * d;
      }
      const double cell_var = cell_ssd / n_cell;
      Vector cell_mu = Vector::Zero(q + 1);
      cell_mu[0] = cell_mean;
      const double cell_phi = cell_var > 0.0 ? 0.5 * cell_var : phi;
      t.cells.emplace(code,
                      NigParams(cell_mu, suggested_scale(cell_pc, k_inv), rho, cell_phi));
    }
    continuous.push_back(std::move(t));
  }

  return DhdnigParams(s, std::move(discrete), std::move(continuous));
}

DhdnigParams posterior(const DhdnigParams& prior, const Dataset& data) {
  DhdnigParams post = prior;

  for (auto& t : post.discrete_) {
    const int card = static_cast<int>(t.default_psi.size());
    std::unordered_map<long, std::vector<long>> counts;
    for (int r = 0; r < data.n_rows(); ++r) {
      const long cell = t.pa_cells.code_row(data, r);
      auto& row = counts[cell];
      if (row.empty()) row.assign(card, 0);
      const int value = data.dvalue(r, t.var);
      if (value < 0 || value >= card)
        throw ContractViolation("posterior: discrete value out of range for variable " +
                                std::to_string(t.var));
      ++row[value];
    }
    for (const auto& [cell, row] : counts)
      t.cells[cell] = dirichlet_posterior(t.at(cell), row);
  }

  for (auto& t : post.continuous_) {
    Matrix design;
    Vector responses;
    for (const auto& [cell, rows] : rows_by_cell(data, t.pd_cells)) {
      cell_design(data, rows, t.var, t.pc_vars, design, responses);
      t.cells[cell] = nig_posterior(t.at(cell), design, responses);
    }
  }

  return post;
}

double predictive_logdensity(const DhdnigParams& psi, const Observation& x) {
  double total = 0.0;
  for (const auto& t : psi.discrete()) {
    const auto& row = t.at(t.pa_cells.code_obs(x));
    const int value = x.disc[t.var];
    if (value < 0 || value >= row.size())
      throw ContractViolation("predictive_logdensity: discrete value out of range for variable " +
                              std::to_string(t.var));
    total += std::log(row.psi[value] / row.total());
  }
  for (const auto& t : psi.continuous()) {
    const auto& nig = t.at(t.pd_cells.code_obs(x));
    const auto q = static_cast<Eigen::Index>(t.pc_vars.size());
    Vector z(q + 1);
    z[0] = 1.0;
    for (Eigen::Index j = 0; j < q; ++j) z[j + 1] = x.cont[t.pc_vars[j]];
    total += log_student(x.cont[t.var], nig_predictive(nig, z));
  }
  return total;
}

std::string serialize_dhdnig(const DhdnigParams& psi) {
  std::ostringstream os;
  os << serialize_structure(psi.structure());

  auto write_ints = [&os](const char* key, const std::vector<int>& v) {
    os << key << "=";
    for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  };
  auto sorted_keys = [](const auto& m) {
    std::vector<long> keys;
    for (const auto& [k, v] : m) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    return keys;
  };

  for (const auto& t : psi.discrete()) {
    os << "dtable " << t.var << " ";
    write_ints("cards", t.pa_cells.cards());
    os << "\n";
    os << "drow " << t.var << " default ";
    append_doubles(os, "psi", t.default_psi.psi.data(), t.default_psi.size());
    os << "\n";
    for (long code : sorted_keys(t.cells)) {
      os << "drow " << t.var << " ";
      write_ints("cell", t.pa_cells.values(code));
      os << " ";
      const auto& row = t.cells.at(code);
      append_doubles(os, "psi", row.psi.data(), row.size());
      os << "\n";
    }
  }

  auto write_nig = [&os](const NigParams& p) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", p.rho);
    os << "rho=" << buf << " ";
    std::snprintf(buf, sizeof buf, "%.17g", p.phi);
    os << "phi=" << buf << " ";
    append_doubles(os, "mu", p.mu.data(), p.dim());
    os << " ";
    // row-major scan of the scale matrix
    Matrix vt = p.V.transpose();
    append_doubles(os, "V", vt.data(), vt.size());
  };

  for (const auto& t : psi.continuous()) {
    os << "ntable " << t.var << " ";
    write_ints("cards", t.pd_cells.cards());
    os << " ";
    write_ints("pc", t.pc_vars);
    os << "\n";
    os << "nrow " << t.var << " default ";
    write_nig(t.default_prior);
    os << "\n";
    for (long code : sorted_keys(t.cells)) {
      os << "nrow " << t.var << " ";
      write_ints("cell", t.pd_cells.values(code));
      os << " ";
      write_nig(t.cells.at(code));
      os << "\n";
    }
  }
  return os.str();
}

DhdnigParams parse_dhdnig(const std::string& text) {
  // structure lines first, then tables
  std::istringstream in(text);
  std::string line;
  std::ostringstream structure_text;
  std::vector<std::string> rest;
  std::vector<int> rest_lines;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("node ", 0) == 0)
      structure_text << line << "\n";
    else {
      rest.push_back(line);
      rest_lines.push_back(line_no);
    }
  }
  CgnStructure structure = parse_structure(structure_text.str());
  require_valid(structure);

  std::vector<NodeDirichletTable> discrete;
  std::vector<NodeNigTable> continuous;

  auto parse_nig_fields = [](const std::string& l, int ln) {
    const double rho = std::stod(field(l, "rho", ln));
    const double phi = std::stod(field(l, "phi", ln));
    const auto mu_vals = parse_doubles(field(l, "mu", ln), ln);
    const auto v_vals = parse_doubles(field(l, "V", ln), ln);
    const auto p = static_cast<Eigen::Index>(mu_vals.size());
    if (v_vals.size() != mu_vals.size() * mu_vals.size())
      throw ParseError("hyperparameter line " + std::to_string(ln) + ": V size mismatch");
    Vector mu(p);
    for (Eigen::Index i = 0; i < p; ++i) mu[i] = mu_vals[i];
    Matrix v(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < p; ++j) v(i, j) = v_vals[i * p + j];
    return NigParams(std::move(mu), std::move(v), rho, phi);
  };

  for (size_t i = 0; i < rest.size(); ++i) {
    const std::string& l = rest[i];
    const int ln = rest_lines[i];
    std::istringstream ls(l);
    std::string tag;
    int var;
    ls >> tag >> var;
    if (!ls) throw ParseError("hyperparameter line " + std::to_string(ln) + ": malformed record");

    if (tag == "dtable") {
      NodeDirichletTable t;
      t.var = var;
      t.pa_cells = CellIndexer(structure.node(var).parents, parse_ints(field(l, "cards", ln), ln));
      discrete.push_back(std::move(t));
    } else if (tag == "drow") {
      if (discrete.empty() || discrete.back().var != var)
        throw ParseError("hyperparameter line " + std::to_string(ln) + ": drow before dtable");
      auto& t = discrete.back();
      const auto psi_vals = parse_doubles(field(l, "psi", ln), ln);
      Vector psi(static_cast<Eigen::Index>(psi_vals.size()));
      for (size_t k = 0; k < psi_vals.size(); ++k) psi[static_cast<Eigen::Index>(k)] = psi_vals[k];
      std::string mode;
      ls >> mode;
      if (mode == "default")
        t.default_psi = DirichletParams(std::move(psi));
      else
        t.cells.emplace(t.pa_cells.code(parse_ints(field(l, "cell", ln), ln)),
                        DirichletParams(std::move(psi)));
    } else if (tag == "ntable") {
      NodeNigTable t;
      t.var = var;
      t.pd_cells = CellIndexer(structure.discrete_parents(var),
                               parse_ints(field(l, "cards", ln), ln));
      t.pc_vars = parse_ints(field(l, "pc", ln), ln);
      continuous.push_back(std::move(t));
    } else if (tag == "nrow") {
      if (continuous.empty() || continuous.back().var != var)
        throw ParseError("hyperparameter line " + std::to_string(ln) + ": nrow before ntable");
      auto& t = continuous.back();
      std::string mode;
      ls >> mode;
      if (mode == "default")
        t.default_prior = parse_nig_fields(l, ln);
      else
        t.cells.emplace(t.pd_cells.code(parse_ints(field(l, "cell", ln), ln)),
                        parse_nig_fields(l, ln));
    } else {
      throw ParseError("hyperparameter line " + std::to_string(ln) + ": unknown record \"" +
                       tag + "\"");
    }
  }

  return DhdnigParams(std::move(structure), std::move(discrete), std::move(continuous));
}

}  // namespace cgn
