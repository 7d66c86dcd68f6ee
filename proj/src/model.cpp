#include "cgn/model.hpp"

#include <algorithm>
#include <cmath>
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

// Rows grouped by parent-cell code in one pass.
std::unordered_map<long, std::vector<int>> rows_by_cell(const Dataset& data,
                                                        const CellIndexer& cells) {
  std::unordered_map<long, std::vector<int>> groups;
  for (int r = 0; r < data.n_rows(); ++r) groups[cells.code_row(data, r)].push_back(r);
  return groups;
}

}  // namespace

const DiscreteCpt& CgnModel::cpt(int var) const {
  for (const auto& t : discrete)
    if (t.var == var) return t;
  throw ContractViolation("CgnModel: no discrete table for variable " + std::to_string(var));
}

const ContinuousCpd& CgnModel::cpd(int var) const {
  for (const auto& t : continuous)
    if (t.var == var) return t;
  throw ContractViolation("CgnModel: no continuous table for variable " + std::to_string(var));
}

std::string AcceptabilityReport::describe() const {
  if (acceptable) return "acceptable";
  std::ostringstream os;
  os << violations.size() << " violation(s):";
  for (const auto& v : violations) {
    os << " [node " << v.var
       << (v.reason == ViolationReason::EmptyCell ? " empty-cell (" : " singular-ssd (");
    for (size_t i = 0; i < v.cell.indexes.size(); ++i)
      os << (i ? "," : "") << v.cell.indexes[i] << "=" << v.cell.values[i];
    os << ")]";
  }
  return os.str();
}

AcceptabilityReport is_acceptable(const CgnStructure& s, const Dataset& data) {
  require_valid(s);
  AcceptabilityReport report;

  for (int var : s.discrete_nodes()) {
    std::vector<int> family = s.node(var).parents;
    family.push_back(var);
    std::sort(family.begin(), family.end());
    CellIndexer cells(family, data);
    std::vector<long> counts(cells.n_cells(), 0);
    for (int r = 0; r < data.n_rows(); ++r) ++counts[cells.code_row(data, r)];
    for (long c = 0; c < cells.n_cells(); ++c)
      if (counts[c] == 0)
        report.violations.push_back({var, cells.cell(c), ViolationReason::EmptyCell});
  }

  for (int var : s.continuous_nodes()) {
    CellIndexer cells(s.discrete_parents(var), data);
    std::vector<int> b_vars = s.continuous_parents(var);
    b_vars.push_back(var);
    std::sort(b_vars.begin(), b_vars.end());
    auto groups = rows_by_cell(data, cells);
    for (long c = 0; c < cells.n_cells(); ++c) {
      auto it = groups.find(c);
      if (it == groups.end() || it->second.empty()) {
        report.violations.push_back({var, cells.cell(c), ViolationReason::EmptyCell});
        continue;
      }
      const auto st = stats_over_rows(data, it->second, b_vars);
      if (!is_positive_definite(st.ssd))
        report.violations.push_back({var, cells.cell(c), ViolationReason::SingularSsd});
    }
  }

  report.acceptable = report.violations.empty();
  return report;
}

CgnModel fit_ml(const CgnStructure& s, const Dataset& data) {
  auto report = is_acceptable(s, data);
  if (!report.acceptable)
    throw NotAcceptableError("fit_ml: sample not acceptable: " + report.describe(),
                             std::move(report));

  CgnModel model;
  model.structure = s;

  for (int var : s.discrete_nodes()) {
    DiscreteCpt cpt;
    cpt.var = var;
    cpt.parent_cells = CellIndexer(s.node(var).parents, data);
    const int card = data.cardinality(var);
    std::vector<std::vector<long>> counts(cpt.parent_cells.n_cells(),
                                          std::vector<long>(card, 0));
    for (int r = 0; r < data.n_rows(); ++r)
      ++counts[cpt.parent_cells.code_row(data, r)][data.dvalue(r, var)];
    for (long c = 0; c < cpt.parent_cells.n_cells(); ++c) {
      long total = 0;
      for (long k : counts[c]) total += k;
      Vector theta(card);
      for (int k = 0; k < card; ++k)
        theta[k] = static_cast<double>(counts[c][k]) / static_cast<double>(total);
      cpt.rows.emplace_back(std::move(theta));
    }
    model.discrete.push_back(std::move(cpt));
  }

  for (int var : s.continuous_nodes()) {
    ContinuousCpd cpd;
    cpd.var = var;
    cpd.pd_cells = CellIndexer(s.discrete_parents(var), data);
    cpd.pc_vars = s.continuous_parents(var);

    std::vector<int> b_vars = cpd.pc_vars;
    b_vars.push_back(var);
    std::sort(b_vars.begin(), b_vars.end());
    const int self = static_cast<int>(
        std::find(b_vars.begin(), b_vars.end(), var) - b_vars.begin());
    const int q = static_cast<int>(cpd.pc_vars.size());

    auto groups = rows_by_cell(data, cpd.pd_cells);
    for (long c = 0; c < cpd.pd_cells.n_cells(); ++c) {
      const auto st = stats_over_rows(data, groups[c], b_vars);
      const Matrix& m = st.sigma_hat;

      Vector beta(q + 1);
      double sigma2;
      if (q == 0) {
        beta[0] = st.mean[self];
        sigma2 = m(self, self);
      } else {
        // indexes of pc within b_vars (b_vars minus the node itself)
        std::vector<int> pc_pos;
        for (int j = 0; j <= q; ++j)
          if (j != self) pc_pos.push_back(j);
        Matrix m_pcpc(q, q);
        Vector m_pc_self(q), mean_pc(q);
        for (int i = 0; i < q; ++i) {
          m_pc_self[i] = m(pc_pos[i], self);
          mean_pc[i] = st.mean[pc_pos[i]];
          for (int j = 0; j < q; ++j) m_pcpc(i, j) = m(pc_pos[i], pc_pos[j]);
        }
        const auto l = cholesky(m_pcpc);
        if (!l)
          throw NumericalError("fit_ml: covariance block not factorizable for node " +
                               std::to_string(var));
        const Vector r = cholesky_solve(*l, m_pc_self);  // slope over pc, sorted order
        beta[0] = st.mean[self] - r.dot(mean_pc);
        beta.tail(q) = r;
        sigma2 = m(self, self) - r.dot(m_pc_self);
      }
      cpd.cells.push_back(GaussLinRegParams(std::move(beta), sigma2));
    }
    model.continuous.push_back(std::move(cpd));
  }

  return model;
}

double joint_logdensity(const CgnModel& m, const Observation& x) {
  double total = 0.0;
  for (const auto& cpt : m.discrete) {
    const long cell = cpt.parent_cells.code_obs(x);
    const int value = x.disc[cpt.var];
    const auto& row = cpt.rows[cell];
    if (value < 0 || value >= row.size())
      throw ContractViolation("joint_logdensity: discrete value out of range for variable " +
                              std::to_string(cpt.var));
    total += std::log(row.theta[value]);
  }
  for (const auto& cpd : m.continuous) {
    const long cell = cpd.pd_cells.code_obs(x);
    const auto& reg = cpd.cells[cell];
    double mean = reg.beta[0];
    for (size_t j = 0; j < cpd.pc_vars.size(); ++j)
      mean += reg.beta[static_cast<Eigen::Index>(j) + 1] * x.cont[cpd.pc_vars[j]];
    total += log_gaussian(x.cont[cpd.var], mean, reg.sigma2);
  }
  return total;
}

double total_loglik(const CgnModel& m, const Dataset& data) {
  double total = 0.0;
  for (int r = 0; r < data.n_rows(); ++r) total += joint_logdensity(m, data.row(r));
  return total;
}

}  // namespace cgn
