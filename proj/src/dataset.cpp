#include "cgn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cgn/errors.hpp"
#include "cgn/rng.hpp"

namespace cgn {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim spaces and stray CR
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& field, int line_no, const std::string& col) {
  double value = 0.0;
  const char* begin = field.c_str();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    std::ostringstream os;
    os << "line " << line_no << ": value \"" << field << "\" in continuous column \""
       << col << "\" is not numeric";
    throw ParseError(os.str());
  }
  return value;
}

}  // namespace

Dataset::Dataset(std::vector<VariableMeta> meta, int class_index)
    : meta_(std::move(meta)), class_index_(class_index) {
  const int nv = static_cast<int>(meta_.size());
  if (class_index_ < 0 || class_index_ >= nv)
    throw ContractViolation("Dataset: class index out of range");
  slot_.resize(nv);
  for (int v = 0; v < nv; ++v) {
    if (meta_[v].index != v) meta_[v].index = v;
    if (meta_[v].kind == VarKind::Discrete) {
      slot_[v] = static_cast<int>(dcols_.size());
      dcols_.emplace_back();
    } else {
      slot_[v] = static_cast<int>(ccols_.size());
      ccols_.emplace_back();
    }
  }
  if (meta_[class_index_].kind != VarKind::Discrete)
    throw ContractViolation("Dataset: class variable must be discrete");
}

std::vector<int> Dataset::continuous_vars() const {
  std::vector<int> out;
  for (int v = 0; v < n_vars(); ++v)
    if (!is_discrete(v)) out.push_back(v);
  return out;
}

std::vector<int> Dataset::discrete_vars() const {
  std::vector<int> out;
  for (int v = 0; v < n_vars(); ++v)
    if (is_discrete(v)) out.push_back(v);
  return out;
}

Observation Dataset::row(int r) const {
  Observation obs;
  obs.disc.assign(n_vars(), -1);
  obs.cont.assign(n_vars(), 0.0);
  for (int v = 0; v < n_vars(); ++v) {
    if (is_discrete(v))
      obs.disc[v] = dvalue(r, v);
    else
      obs.cont[v] = cvalue(r, v);
  }
  return obs;
}

void Dataset::append_row(const Observation& obs, std::int64_t origin) {
  for (int v = 0; v < n_vars(); ++v) {
    if (is_discrete(v)) {
      const int code = obs.disc[v];
      if (code < 0 || code >= cardinality(v))
        throw ContractViolation("Dataset: discrete value out of range");
      dcols_[slot_[v]].push_back(code);
    } else {
      ccols_[slot_[v]].push_back(obs.cont[v]);
    }
  }
  origins_.push_back(origin < 0 ? n_rows_ : origin);
  ++n_rows_;
}

Dataset parse_csv(const std::string& text, const std::vector<VariableMeta>& schema,
                  int class_index, const std::string& origin_name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(origin_name + ": empty file");
  const auto header = split_line(line);
  if (header.size() != schema.size()) {
    std::ostringstream os;
    os << origin_name << ": header has " << header.size() << " columns, schema declares "
       << schema.size();
    throw ParseError(os.str());
  }
  for (size_t i = 0; i < schema.size(); ++i) {
    if (header[i] != schema[i].name) {
      std::ostringstream os;
      os << origin_name << ": header column " << i + 1 << " is \"" << header[i]
         << "\", schema expects \"" << schema[i].name << "\"";
      throw ParseError(os.str());
    }
  }

  std::vector<VariableMeta> meta = schema;
  const int nv = static_cast<int>(meta.size());
  // label -> code per discrete column; pre-filled when labels are declared
  std::vector<std::map<std::string, int>> codes(nv);
  std::vector<bool> declared(nv, false);
  for (int v = 0; v < nv; ++v) {
    if (meta[v].kind != VarKind::Discrete) continue;
    if (!meta[v].labels.empty()) {
      declared[v] = true;
      for (size_t c = 0; c < meta[v].labels.size(); ++c)
        codes[v][meta[v].labels[c]] = static_cast<int>(c);
      meta[v].cardinality = static_cast<int>(meta[v].labels.size());
    } else {
      meta[v].cardinality = 0;
    }
  }

  struct RawRow {
    std::vector<int> disc;
    std::vector<double> cont;
  };
  std::vector<RawRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const auto fields = split_line(line);
    if (static_cast<int>(fields.size()) != nv) {
      std::ostringstream os;
      os << "line " << line_no << ": expected " << nv << " fields, found " << fields.size();
      throw ParseError(os.str());
    }
    RawRow row;
    row.disc.assign(nv, -1);
    row.cont.assign(nv, 0.0);
    for (int v = 0; v < nv; ++v) {
      if (meta[v].kind == VarKind::Discrete) {
        auto it = codes[v].find(fields[v]);
        if (it == codes[v].end()) {
          if (declared[v]) {
            std::ostringstream os;
            os << "line " << line_no << ": unknown category \"" << fields[v]
               << "\" in column \"" << meta[v].name << "\"";
            throw ParseError(os.str());
          }
          const int code = static_cast<int>(codes[v].size());
          it = codes[v].emplace(fields[v], code).first;
          meta[v].labels.push_back(fields[v]);
          meta[v].cardinality = code + 1;
        }
        row.disc[v] = it->second;
      } else {
        row.cont[v] = parse_double(fields[v], line_no, meta[v].name);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(origin_name + ": no data rows");
  for (int v = 0; v < nv; ++v) {
    if (meta[v].kind == VarKind::Discrete && meta[v].cardinality < 2) {
      std::ostringstream os;
      os << origin_name << ": discrete column \"" << meta[v].name
         << "\" has cardinality " << meta[v].cardinality << " (need >= 2)";
      throw ParseError(os.str());
    }
  }

  Dataset data(std::move(meta), class_index);
  Observation obs;
  for (const auto& r : rows) {
    obs.disc = r.disc;
    obs.cont = r.cont;
    data.append_row(obs);
  }
  return data;
}

Dataset load_csv(const std::string& path, const std::vector<VariableMeta>& schema,
                 int class_index) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_csv(buf.str(), schema, class_index, path);
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": cannot open for writing");
  for (int v = 0; v < data.n_vars(); ++v)
    f << (v ? "," : "") << data.var(v).name;
  f << "\n";
  char buf[64];
  for (int r = 0; r < data.n_rows(); ++r) {
    for (int v = 0; v < data.n_vars(); ++v) {
      if (v) f << ",";
      if (data.is_discrete(v)) {
        const auto& labels = data.var(v).labels;
        const int code = data.dvalue(r, v);
        if (!labels.empty())
          f << labels[code];
        else
          f << code;
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", data.cvalue(r, v));
        f << buf;
      }
    }
    f << "\n";
  }
  if (!f) throw IoError(path + ": write failed");
}

std::vector<int> rows_in_cell(const Dataset& data, const Cell& cell) {
  if (cell.indexes.size() != cell.values.size())
    throw ContractViolation("Cell: indexes/values length mismatch");
  for (size_t i = 0; i < cell.indexes.size(); ++i) {
    const int v = cell.indexes[i];
    if (!data.is_discrete(v)) throw ContractViolation("Cell: index is not discrete");
    if (cell.values[i] < 0 || cell.values[i] >= data.cardinality(v))
      throw ContractViolation("Cell: value out of range");
  }
  std::vector<int> rows;
  for (int r = 0; r < data.n_rows(); ++r) {
    bool match = true;
    for (size_t i = 0; i < cell.indexes.size() && match; ++i)
      match = data.dvalue(r, cell.indexes[i]) == cell.values[i];
    if (match) rows.push_back(r);
  }
  return rows;
}

SufficientStats stats_over_rows(const Dataset& data, const std::vector<int>& rows,
                                const std::vector<int>& b_vars) {
  for (int v : b_vars)
    if (data.is_discrete(v))
      throw ContractViolation("cell_stats: B must contain continuous indexes only");
  const int d = static_cast<int>(b_vars.size());
  SufficientStats st;
  st.n = static_cast<long>(rows.size());
  st.member_rows = rows;
  st.s = Vector::Zero(d);
  st.ss = Matrix::Zero(d, d);
  st.ssd = Matrix::Zero(d, d);
  if (st.n == 0) return st;

  Vector y(d);
  for (int r : rows) {
    for (int j = 0; j < d; ++j) y[j] = data.cvalue(r, b_vars[j]);
    st.s += y;
    st.ss.noalias() += y * y.transpose();
  }
  st.mean = st.s / static_cast<double>(st.n);
  // second pass over centered values; more stable than ss - s s'/n
  Vector c(d);
  for (int r : rows) {
    for (int j = 0; j < d; ++j) c[j] = data.cvalue(r, b_vars[j]) - st.mean[j];
    st.ssd.noalias() += c * c.transpose();
  }
  st.sigma_hat = st.ssd / static_cast<double>(st.n);
  return st;
}

SufficientStats cell_stats(const Dataset& data, const Cell& cell,
                           const std::vector<int>& b_vars) {
  return stats_over_rows(data, rows_in_cell(data, cell), b_vars);
}

std::map<std::vector<int>, std::vector<int>> group_rows(const Dataset& data,
                                                        const std::vector<int>& vars) {
  std::map<std::vector<int>, std::vector<int>> groups;
  std::vector<int> key(vars.size());
  for (int r = 0; r < data.n_rows(); ++r) {
    for (size_t i = 0; i < vars.size(); ++i) key[i] = data.dvalue(r, vars[i]);
    groups[key].push_back(r);
  }
  return groups;
}

std::vector<FoldSplit> stratified_kfold(const Dataset& data, int k, std::uint64_t seed) {
  if (k < 2) throw ContractViolation("stratified_kfold: k must be >= 2");
  if (k > data.n_rows()) throw ContractViolation("stratified_kfold: k exceeds row count");

  const int c = data.class_index();
  std::vector<std::vector<int>> by_class(data.cardinality(c));
  for (int r = 0; r < data.n_rows(); ++r) by_class[data.dvalue(r, c)].push_back(r);

  SplitRng rng(seed);
  std::vector<std::vector<int>> folds(k);
  int offset = 0;  // rotates the starting fold so fold sizes stay balanced
  for (size_t cls = 0; cls < by_class.size(); ++cls) {
    auto& rows = by_class[cls];
    SplitRng stream = rng.split(cls);
    stream.shuffle(rows.begin(), rows.end());
    for (size_t i = 0; i < rows.size(); ++i)
      folds[(offset + static_cast<int>(i)) % k].push_back(rows[i]);
    offset = (offset + static_cast<int>(rows.size())) % k;
  }

  std::vector<FoldSplit> out(k);
  for (int f = 0; f < k; ++f) {
    auto& test = folds[f];
    std::sort(test.begin(), test.end());
    out[f].test = test;
    for (int g = 0; g < k; ++g)
      if (g != f) out[f].train.insert(out[f].train.end(), folds[g].begin(), folds[g].end());
    std::sort(out[f].train.begin(), out[f].train.end());
  }
  return out;
}

Dataset subset(const Dataset& data, const std::vector<int>& rows) {
  Dataset out(data.meta(), data.class_index());
  for (int r : rows) {
    if (r < 0 || r >= data.n_rows()) throw ContractViolation("subset: row out of range");
    out.append_row(data.row(r), data.origins()[r]);
  }
  return out;
}

Dataset subsample(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw ContractViolation("subsample: fraction must be in (0, 1]");
  const int n = data.n_rows();
  const long target = static_cast<long>(std::ceil(fraction * n - 1e-9));

  const int c = data.class_index();
  std::vector<std::vector<int>> by_class(data.cardinality(c));
  for (int r = 0; r < n; ++r) by_class[data.dvalue(r, c)].push_back(r);
  const size_t n_classes = by_class.size();

  // proportional quotas, largest remainder, then at least one per
  // represented class
  std::vector<long> quota(n_classes);
  std::vector<std::pair<double, size_t>> rem;
  long assigned = 0;
  for (size_t cls = 0; cls < n_classes; ++cls) {
    const double exact = fraction * static_cast<double>(by_class[cls].size());
    quota[cls] = static_cast<long>(std::floor(exact + 1e-9));
    assigned += quota[cls];
    rem.push_back({-(exact - static_cast<double>(quota[cls])), cls});
  }
  std::sort(rem.begin(), rem.end());
  for (size_t i = 0; assigned < target && i < rem.size(); ++i, ++assigned) ++quota[rem[i].second];
  for (size_t cls = 0; cls < n_classes; ++cls) {
    if (!by_class[cls].empty() && quota[cls] == 0) {
      quota[cls] = 1;
      // keep the total if some other class can give one up
      size_t donor = n_classes;
      for (size_t d = 0; d < n_classes; ++d)
        if (quota[d] > 1 && (donor == n_classes || quota[d] > quota[donor])) donor = d;
      if (donor != n_classes) --quota[donor];
    }
    if (quota[cls] > static_cast<long>(by_class[cls].size()))
      quota[cls] = static_cast<long>(by_class[cls].size());
  }

  SplitRng rng(seed);
  std::vector<int> chosen;
  for (size_t cls = 0; cls < n_classes; ++cls) {
    auto rows = by_class[cls];
    SplitRng stream = rng.split(cls);
    stream.shuffle(rows.begin(), rows.end());
    chosen.insert(chosen.end(), rows.begin(), rows.begin() + quota[cls]);
  }
  std::sort(chosen.begin(), chosen.end());
  return subset(data, chosen);
}

}  // namespace cgn
