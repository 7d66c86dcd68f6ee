#include "cgn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cgn/classifier.hpp"
#include "cgn/model.hpp"
#include "cgn/rng.hpp"

namespace cgn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double normal_sf_two_sided(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Midranks of the pooled sample, doubled so ties stay integral.
std::vector<long> scaled_midranks(const std::vector<double>& pooled) {
  const size_t n = pooled.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return pooled[a] < pooled[b]; });
  std::vector<long> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // midrank of positions i..j (1-based) is (i+j)/2 + 1; doubled: i+j+2
    const long scaled = static_cast<long>(i + j) + 2;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = scaled;
    i = j + 1;
  }
  return ranks;
}

// Exact permutation distribution of the scaled rank sum of a size-m subset:
// dp[j][s] counts subsets of size j with scaled-rank total s.
std::pair<double, double> exact_tail_probs(const std::vector<long>& scaled_ranks,
                                           size_t m, long observed_sum) {
  long max_sum = 0;
  std::vector<long> sorted = scaled_ranks;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = sorted.size() - m; i < sorted.size(); ++i) max_sum += sorted[i];

  std::vector<std::vector<double>> dp(m + 1, std::vector<double>(max_sum + 1, 0.0));
  dp[0][0] = 1.0;
  for (long r : scaled_ranks) {
    for (size_t j = m; j >= 1; --j) {
      auto& row = dp[j];
      const auto& prev = dp[j - 1];
      for (long s = max_sum; s >= r; --s) row[s] += prev[s - r];
    }
  }

  double total = 0.0, le = 0.0, ge = 0.0;
  for (long s = 0; s <= max_sum; ++s) {
    const double c = dp[m][s];
    total += c;
    if (s <= observed_sum) le += c;
    if (s >= observed_sum) ge += c;
  }
  return {le / total, ge / total};
}

struct RankInfo {
  double r_a = 0.0;  // rank sum of a (midranks)
  double tie_term = 0.0;  // sum over tie groups of t^3 - t
  std::vector<long> scaled;
};

RankInfo rank_stats(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  RankInfo info;
  info.scaled = scaled_midranks(pooled);
  for (size_t i = 0; i < a.size(); ++i) info.r_a += 0.5 * static_cast<double>(info.scaled[i]);

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  size_t i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    info.tie_term += t * t * t - t;
    i = j + 1;
  }
  return info;
}

}  // namespace

const char* learner_name(Learner l) { return l == Learner::ML ? "ML" : "BA"; }

const char* verdict_name(CompareVerdict v) {
  switch (v) {
    case CompareVerdict::BaWins:
      return "BA-wins";
    case CompareVerdict::MlWins:
      return "ML-wins";
    default:
      return "tie";
  }
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 double alpha) {
  if (a.empty() || b.empty())
    throw ContractViolation("mann_whitney_u: empty sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;

  const RankInfo info = rank_stats(a, b);
  MannWhitneyResult res;
  res.u_a = info.r_a - na * (na + 1.0) / 2.0;
  const double u_b = na * nb - res.u_a;

  if (std::min(a.size(), b.size()) <= 8) {
    res.exact = true;
    // run the permutation distribution over the smaller sample
    const bool small_is_a = a.size() <= b.size();
    const size_t m = small_is_a ? a.size() : b.size();
    long observed = 0;
    if (small_is_a) {
      for (size_t i = 0; i < a.size(); ++i) observed += info.scaled[i];
    } else {
      for (size_t i = a.size(); i < info.scaled.size(); ++i) observed += info.scaled[i];
    }
    const auto [le, ge] = exact_tail_probs(info.scaled, m, observed);
    res.p = std::min(1.0, 2.0 * std::min(le, ge));
  } else {
    const double mean = na * nb / 2.0;
    const double var =
        na * nb / 12.0 * ((n + 1.0) - info.tie_term / (n * (n - 1.0)));
    if (var <= 0.0) {
      res.p = 1.0;
    } else {
      double d = res.u_a - mean;
      // continuity correction toward the mean
      if (d > 0.5)
        d -= 0.5;
      else if (d < -0.5)
        d += 0.5;
      else
        d = 0.0;
      res.p = normal_sf_two_sided(d / std::sqrt(var));
    }
  }

  if (res.p < alpha && res.u_a != u_b)
    res.verdict = res.u_a > u_b ? MwVerdict::AWins : MwVerdict::BWins;
  else
    res.verdict = MwVerdict::Tie;
  return res;
}

double mann_whitney_one_sided_p(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw ContractViolation("mann_whitney_one_sided_p: empty sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  const RankInfo info = rank_stats(a, b);
  const double u_a = info.r_a - na * (na + 1.0) / 2.0;

  if (std::min(a.size(), b.size()) <= 8) {
    const bool small_is_a = a.size() <= b.size();
    const size_t m = small_is_a ? a.size() : b.size();
    long observed = 0;
    if (small_is_a) {
      for (size_t i = 0; i < a.size(); ++i) observed += info.scaled[i];
    } else {
      for (size_t i = a.size(); i < info.scaled.size(); ++i) observed += info.scaled[i];
    }
    const auto [le, ge] = exact_tail_probs(info.scaled, m, observed);
    return small_is_a ? ge : le;  // a large <=> small-sample sum large (or b's sum small)
  }
  const double mean = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - info.tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;
  double d = u_a - mean;
  if (d > 0.5)
    d -= 0.5;
  else if (d < -0.5)
    d += 0.5;
  else
    d = 0.0;
  return 0.5 * std::erfc(d / std::sqrt(var) / std::sqrt(2.0));
}

PairedRankResult wilcoxon_signed_rank(std::span<const double> a,
                                      std::span<const double> b, double alpha) {
  if (a.size() != b.size())
    throw ContractViolation("wilcoxon_signed_rank: samples must be paired");
  if (a.empty()) throw ContractViolation("wilcoxon_signed_rank: empty sample");

  std::vector<double> diffs;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) diffs.push_back(a[i] - b[i]);
  PairedRankResult res;
  const size_t n = diffs.size();
  if (n == 0) return res;  // all pairs tied

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t x, size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });
  std::vector<double> rank(n);
  double tie_term = 0.0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
    const double mid = static_cast<double>(i + j) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  double w_plus = 0.0, total = 0.0;
  for (size_t k = 0; k < n; ++k) {
    total += rank[k];
    if (diffs[k] > 0.0) w_plus += rank[k];
  }
  res.w_plus = w_plus;
  const double w_minus = total - w_plus;

  if (n <= 12) {
    // exact: enumerate all sign assignments of the observed |d| ranks
    res.exact = true;
    long le = 0, ge = 0;
    const long count = 1L << n;
    for (long mask = 0; mask < count; ++mask) {
      double w = 0.0;
      for (size_t k = 0; k < n; ++k)
        if (mask & (1L << k)) w += rank[k];
      if (w <= w_plus + 1e-12) ++le;
      if (w >= w_plus - 1e-12) ++ge;
    }
    res.p = std::min(1.0, 2.0 * std::min(static_cast<double>(le) / count,
                                         static_cast<double>(ge) / count));
  } else {
    const double mean = static_cast<double>(n) * (n + 1) / 4.0;
    const double var =
        static_cast<double>(n) * (n + 1) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) {
      res.p = 1.0;
    } else {
      double d = w_plus - mean;
      if (d > 0.5)
        d -= 0.5;
      else if (d < -0.5)
        d += 0.5;
      else
        d = 0.0;
      res.p = normal_sf_two_sided(d / std::sqrt(var));
    }
  }

  if (res.p < alpha && w_plus != w_minus)
    res.verdict = w_plus > w_minus ? MwVerdict::AWins : MwVerdict::BWins;
  return res;
}

std::string StructureSpec::describe() const {
  switch (kind) {
    case Kind::Fixed:
      return "fixed";
    case Kind::File:
      return "file:" + path;
    case Kind::NaiveBayes:
      return "naive-bayes";
    case Kind::WrapperFw:
      return "fw-wrapper";
    case Kind::WrapperBw:
      return "bw-wrapper";
    case Kind::WrapperWc:
      return "wc-wrapper";
    case Kind::KBox:
      return "kbox:" + std::to_string(k);
    case Kind::KBand:
      return "kband:" + std::to_string(k);
  }
  return "?";
}

const LearnerSummary& ExperimentReport::summary(Learner l) const {
  for (const auto& s : summaries)
    if (s.learner == l) return s;
  throw ContractViolation("ExperimentReport: no summary for learner");
}

std::vector<double> ExperimentReport::metric_values(Learner l, const std::string& metric,
                                                    bool paired_only) const {
  // rows are stored fold-major with at most one record per (learner, rep, fold)
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.learner != l || !r.defined) continue;
    if (paired_only) {
      bool partner_defined = false;
      for (const auto& o : rows)
        if (o.learner != l && o.repetition == r.repetition && o.fold == r.fold)
          partner_defined = o.defined;
      if (!partner_defined) continue;
    }
    out.push_back(metric == "accuracy" ? r.accuracy : r.cll);
  }
  return out;
}

namespace {

struct LearnerAccumulator {
  std::vector<double> accuracy;
  std::vector<double> cll;
  long total_instances = 0;
  double total_cll = 0.0;
  int undefined = 0;
};

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

CgnStructure fixed_structure_for(const StructureSpec& spec, const Dataset& data) {
  const auto attrs = data.continuous_vars();
  switch (spec.kind) {
    case StructureSpec::Kind::Fixed:
      if (!spec.fixed) throw ContractViolation("StructureSpec: fixed structure missing");
      return *spec.fixed;
    case StructureSpec::Kind::File:
      return load_structure(spec.path);
    case StructureSpec::Kind::NaiveBayes: {
      JanPartition p;
      p.class_index = data.class_index();
      for (int a : attrs) p.groups.push_back({a});
      return jan_to_structure(p);
    }
    case StructureSpec::Kind::KBox:
      return jan_to_structure(kbox_partition(attrs, data.class_index(), spec.k));
    case StructureSpec::Kind::KBand:
      return kband_structure_over(attrs, data.class_index(), spec.k);
    default:
      throw ContractViolation("StructureSpec: not a fixed structure kind");
  }
}

bool is_wrapper(const StructureSpec& spec) {
  return spec.kind == StructureSpec::Kind::WrapperFw ||
         spec.kind == StructureSpec::Kind::WrapperBw ||
         spec.kind == StructureSpec::Kind::WrapperWc;
}

CandidateGenerator wrapper_generator(const StructureSpec& spec) {
  switch (spec.kind) {
    case StructureSpec::Kind::WrapperFw:
      return CandidateGenerator::Forward;
    case StructureSpec::Kind::WrapperBw:
      return CandidateGenerator::Backward;
    default:
      return CandidateGenerator::Condensed;
  }
}

int feasible_wrapper_folds(const Dataset& data, int requested) {
  return std::max(2, std::min(requested, data.n_rows()));
}

}  // namespace

ExperimentReport run_experiment_on(const ExperimentConfig& cfg, const Dataset& data) {
  if (cfg.repetitions < 1) throw ContractViolation("run_experiment: repetitions must be >= 1");
  if (cfg.folds < 2) throw ContractViolation("run_experiment: folds must be >= 2");
  if (!(cfg.train_fraction > 0.0) || cfg.train_fraction > 1.0)
    throw ContractViolation("run_experiment: train_fraction must be in (0, 1]");
  if (!cfg.learn_ml && !cfg.learn_ba)
    throw ContractViolation("run_experiment: no learners configured");

  const bool wrapper = is_wrapper(cfg.structure);
  CgnStructure fixed;
  if (!wrapper) fixed = fixed_structure_for(cfg.structure, data);

  ExperimentReport report;
  report.structure_description = cfg.structure.describe();
  report.repetitions = cfg.repetitions;
  report.folds = cfg.folds;
  report.train_fraction = cfg.train_fraction;
  report.seed = cfg.seed;
  report.alpha = cfg.alpha;

  LearnerAccumulator acc_ml, acc_ba;
  const SplitRng root(cfg.seed);

  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    SplitRng rep_rng = root.split(static_cast<std::uint64_t>(rep));
    const auto splits = stratified_kfold(data, cfg.folds, rep_rng.split(0).next_u64());

    for (int f = 0; f < cfg.folds; ++f) {
      Dataset train = subset(data, splits[f].train);
      if (cfg.train_fraction < 1.0)
        train = subsample(train, cfg.train_fraction,
                          rep_rng.split(1).split(static_cast<std::uint64_t>(f)).next_u64());
      const Dataset test = subset(data, splits[f].test);

      bool fold_usable = true;
      CgnStructure structure = fixed;
      if (wrapper) {
        const int wf = feasible_wrapper_folds(train, cfg.wrapper_folds);
        try {
          auto [partition, trace] = wrapper_search(
              train, wrapper_generator(cfg.structure), wf,
              rep_rng.split(2).split(static_cast<std::uint64_t>(f)).next_u64());
          structure = jan_to_structure(partition);
        } catch (const SearchError&) {
          fold_usable = false;  // no structure; both learners undefined here
        }
      }

      if (cfg.audit_hook) {
        FoldAudit audit;
        audit.repetition = rep;
        audit.fold = f;
        audit.train_origins = train.origins();
        audit.test_origins = test.origins();
        audit.wrapper_used = wrapper;
        if (wrapper) audit.wrapper_origins = train.origins();
        cfg.audit_hook(audit);
      }

      std::vector<int> truth;
      truth.reserve(static_cast<size_t>(test.n_rows()));
      for (int r = 0; r < test.n_rows(); ++r)
        truth.push_back(test.dvalue(r, data.class_index()));

      if (cfg.learn_ml) {
        FoldRecord rec{Learner::ML, rep, f, test.n_rows(), false, 0.0, 0.0};
        if (fold_usable && is_acceptable(structure, train).acceptable) {
          const CgnModel model = fit_ml(structure, train);
          std::vector<ClassPosterior> posts;
          posts.reserve(truth.size());
          for (int r = 0; r < test.n_rows(); ++r)
            posts.push_back(class_posterior_ml(model, data.class_index(), test.row(r)));
          const EvalMetrics m = evaluate(posts, truth);
          rec.defined = true;
          rec.accuracy = m.accuracy;
          rec.cll = m.cll;
        }
        if (rec.defined) {
          acc_ml.accuracy.push_back(rec.accuracy);
          acc_ml.cll.push_back(rec.cll);
          acc_ml.total_instances += rec.n_test;
          acc_ml.total_cll += rec.cll;
        } else {
          ++acc_ml.undefined;
        }
        report.rows.push_back(rec);
      }

      if (cfg.learn_ba) {
        FoldRecord rec{Learner::BA, rep, f, test.n_rows(), false, 0.0, 0.0};
        if (fold_usable) {
          const DhdnigParams prior = init_prior(structure, train, cfg.prior);
          const DhdnigParams post = posterior(prior, train);
          std::vector<ClassPosterior> posts;
          posts.reserve(truth.size());
          for (int r = 0; r < test.n_rows(); ++r)
            posts.push_back(class_posterior_ba(post, data.class_index(), test.row(r)));
          const EvalMetrics m = evaluate(posts, truth);
          rec.defined = true;
          rec.accuracy = m.accuracy;
          rec.cll = m.cll;
        }
        if (rec.defined) {
          acc_ba.accuracy.push_back(rec.accuracy);
          acc_ba.cll.push_back(rec.cll);
          acc_ba.total_instances += rec.n_test;
          acc_ba.total_cll += rec.cll;
        } else {
          ++acc_ba.undefined;
        }
        report.rows.push_back(rec);
      }
    }
  }

  bool any_defined = false;
  auto summarize = [&](Learner l, const LearnerAccumulator& a) {
    LearnerSummary s;
    s.learner = l;
    s.defined_folds = static_cast<int>(a.accuracy.size());
    s.undefined_folds = a.undefined;
    s.mean_accuracy = mean_of(a.accuracy);
    s.sd_accuracy = sd_of(a.accuracy);
    s.mean_cll = mean_of(a.cll);
    s.sd_cll = sd_of(a.cll);
    s.cll_per_instance =
        a.total_instances > 0 ? a.total_cll / static_cast<double>(a.total_instances) : 0.0;
    if (s.defined_folds > 0) any_defined = true;
    report.summaries.push_back(s);
  };
  if (cfg.learn_ml) summarize(Learner::ML, acc_ml);
  if (cfg.learn_ba) summarize(Learner::BA, acc_ba);
  if (!any_defined)
    throw ExperimentError("run_experiment: every learner was undefined on every fold");

  if (cfg.learn_ml && cfg.learn_ba) {
    for (const std::string metric : {"accuracy", "cll"}) {
      const auto ba = report.metric_values(Learner::BA, metric, true);
      const auto ml = report.metric_values(Learner::ML, metric, true);
      ComparisonSummary cs;
      cs.metric = metric;
      cs.paired_folds = static_cast<int>(ba.size());
      cs.excluded_folds = cfg.repetitions * cfg.folds - cs.paired_folds;
      if (!ba.empty() && !ml.empty()) {
        // the verdict honors the fold pairing; the unpaired U is informational
        const auto paired = wilcoxon_signed_rank(ba, ml, cfg.alpha);
        cs.w_plus = paired.w_plus;
        cs.p = paired.p;
        cs.verdict = paired.verdict == MwVerdict::AWins   ? CompareVerdict::BaWins
                     : paired.verdict == MwVerdict::BWins ? CompareVerdict::MlWins
                                                          : CompareVerdict::Tie;
        const auto unpaired = mann_whitney_u(ba, ml, cfg.alpha);
        cs.u_ba = unpaired.u_a;
        cs.p_unpaired = unpaired.p;
      }
      report.tests.push_back(std::move(cs));
    }
  }

  if (!cfg.output_path.empty()) emit_report(report, cfg.output_path);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.data_path.empty())
    throw ContractViolation("run_experiment: no dataset path configured");
  const Dataset data = load_csv(cfg.data_path, cfg.schema, cfg.class_index);
  return run_experiment_on(cfg, data);
}

Dataset generate_spectra(const SyntheticSpectraSpec& spec) {
  if (spec.n_vars < 1 || spec.n_per_class < 1 || spec.n_classes < 2)
    throw ContractViolation("generate_spectra: sizes must be positive (>= 2 classes)");
  if (spec.band_width < 1 || spec.band_width > spec.n_vars)
    throw ContractViolation("generate_spectra: band_width must be in [1, n_vars]");

  const int p = spec.n_vars;
  // banded unit-diagonal Cholesky factor with flat in-band loadings, so every
  // lag inside the band carries real signal
  Matrix l = Matrix::Identity(p, p);
  for (int j = 0; j < p; ++j)
    for (int lag = 1; lag < spec.band_width && lag <= j; ++lag)
      l(j, j - lag) = 0.8;

  std::vector<VariableMeta> meta;
  for (int v = 0; v < p; ++v) {
    char name[16];
    std::snprintf(name, sizeof name, "v%03d", v);
    meta.push_back({name, VarKind::Continuous, 0, v, {}});
  }
  VariableMeta cls{"class", VarKind::Discrete, spec.n_classes, p, {}};
  for (int c = 0; c < spec.n_classes; ++c) cls.labels.push_back("c" + std::to_string(c));
  meta.push_back(cls);

  Dataset data(std::move(meta), p);
  const SplitRng root(spec.seed);
  Observation obs;
  obs.disc.assign(static_cast<size_t>(p) + 1, -1);
  obs.cont.assign(static_cast<size_t>(p) + 1, 0.0);
  Vector g(p);
  for (int c = 0; c < spec.n_classes; ++c) {
    SplitRng class_rng = root.split(static_cast<std::uint64_t>(c));
    const double shift = spec.separation * static_cast<double>(c);
    for (int i = 0; i < spec.n_per_class; ++i) {
      SplitRng row_rng = class_rng.split(static_cast<std::uint64_t>(i));
      for (int v = 0; v < p; ++v) g[v] = row_rng.next_gaussian();
      const Vector y = l * g;
      for (int v = 0; v < p; ++v) obs.cont[static_cast<size_t>(v)] = y[v] + shift;
      obs.disc[static_cast<size_t>(p)] = c;
      data.append_row(obs);
    }
  }
  return data;
}

SweepReport k_sweep(const SyntheticSpectraSpec& spec, StructureFamily family,
                    const std::vector<int>& k_values, const ExperimentConfig& cfg) {
  const Dataset data = generate_spectra(spec);
  SweepReport sweep;
  sweep.spec = spec;
  for (int k : k_values) {
    if (k < 1 || k > spec.n_vars)
      throw ContractViolation("k_sweep: k must be in [1, n_vars]");
    ExperimentConfig run_cfg = cfg;
    run_cfg.output_path.clear();
    run_cfg.structure.kind = family == StructureFamily::KBox ? StructureSpec::Kind::KBox
                                                             : StructureSpec::Kind::KBand;
    run_cfg.structure.k = k;

    SweepEntry entry;
    entry.family = family;
    entry.k = k;
    entry.n_params = count_parameters(fixed_structure_for(run_cfg.structure, data), data);
    entry.report = run_experiment_on(run_cfg, data);
    sweep.entries.push_back(std::move(entry));
  }
  if (!cfg.output_path.empty()) emit_sweep(sweep, cfg.output_path);
  return sweep;
}

void emit_report(const ExperimentReport& r, const std::string& path_prefix) {
  const std::string csv_path = path_prefix + ".csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError(csv_path + ": cannot open for writing");
  csv << "learner,repetition,fold,n_test,defined,accuracy,cll\n";
  for (const auto& row : r.rows) {
    csv << learner_name(row.learner) << "," << row.repetition << "," << row.fold << ","
        << row.n_test << "," << (row.defined ? 1 : 0) << ",";
    if (row.defined)
      csv << fmt(row.accuracy) << "," << fmt(row.cll);
    else
      csv << ",";
    csv << "\n";
  }
  if (!csv) throw IoError(csv_path + ": write failed");
  csv.close();

  const std::string txt_path = path_prefix + ".txt";
  std::ofstream txt(txt_path, std::ios::binary);
  if (!txt) throw IoError(txt_path + ": cannot open for writing");
  txt << "structure: " << r.structure_description << "\n"
      << "repetitions: " << r.repetitions << "  folds: " << r.folds
      << "  train_fraction: " << fmt(r.train_fraction) << "  seed: " << r.seed << "\n";
  for (const auto& s : r.summaries) {
    txt << learner_name(s.learner) << ": defined_folds=" << s.defined_folds
        << " undefined_folds=" << s.undefined_folds << " mean_accuracy=" << fmt(s.mean_accuracy)
        << " sd_accuracy=" << fmt(s.sd_accuracy) << " mean_cll=" << fmt(s.mean_cll)
        << " sd_cll=" << fmt(s.sd_cll)
        << " cll_per_instance(derived)=" << fmt(s.cll_per_instance) << "\n";
  }
  for (const auto& t : r.tests) {
    txt << "paired-rank[" << t.metric << "]: W+=" << fmt(t.w_plus) << " p=" << fmt(t.p)
        << " verdict=" << verdict_name(t.verdict) << " paired_folds=" << t.paired_folds
        << " excluded_folds=" << t.excluded_folds << " (two-sided, alpha=" << fmt(r.alpha)
        << "; unpaired Mann-Whitney for reference: U_BA=" << fmt(t.u_ba)
        << " p=" << fmt(t.p_unpaired) << ")\n";
  }
  if (!txt) throw IoError(txt_path + ": write failed");
}

std::vector<FoldRecord> parse_report_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": cannot open");
  std::string line;
  if (!std::getline(f, line)) throw ParseError(path + ": empty report");
  std::vector<FoldRecord> rows;
  int line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string learner, rep, fold, n_test, defined, accuracy, cll;
    std::getline(ss, learner, ',');
    std::getline(ss, rep, ',');
    std::getline(ss, fold, ',');
    std::getline(ss, n_test, ',');
    std::getline(ss, defined, ',');
    std::getline(ss, accuracy, ',');
    std::getline(ss, cll, ',');
    FoldRecord r;
    try {
      r.learner = learner == "ML" ? Learner::ML : Learner::BA;
      r.repetition = std::stoi(rep);
      r.fold = std::stoi(fold);
      r.n_test = std::stoi(n_test);
      r.defined = std::stoi(defined) != 0;
      if (r.defined) {
        r.accuracy = std::stod(accuracy);
        r.cll = std::stod(cll);
      }
    } catch (const std::exception&) {
      throw ParseError(path + ": line " + std::to_string(line_no) + ": malformed record");
    }
    rows.push_back(r);
  }
  return rows;
}

void emit_sweep(const SweepReport& r, const std::string& path_prefix) {
  const std::string csv_path = path_prefix + ".csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError(csv_path + ": cannot open for writing");
  csv << "family,k,n_params,learner,defined_folds,undefined_folds,"
         "mean_accuracy,sd_accuracy,mean_cll,sd_cll,cll_per_instance\n";
  for (const auto& e : r.entries) {
    for (const auto& s : e.report.summaries) {
      csv << (e.family == StructureFamily::KBox ? "kbox" : "kband") << "," << e.k << ","
          << e.n_params << "," << learner_name(s.learner) << "," << s.defined_folds << ","
          << s.undefined_folds << "," << fmt(s.mean_accuracy) << "," << fmt(s.sd_accuracy)
          << "," << fmt(s.mean_cll) << "," << fmt(s.sd_cll) << ","
          << fmt(s.cll_per_instance) << "\n";
    }
  }
  if (!csv) throw IoError(csv_path + ": write failed");
  csv.close();

  const std::string txt_path = path_prefix + ".txt";
  std::ofstream txt(txt_path, std::ios::binary);
  if (!txt) throw IoError(txt_path + ": cannot open for writing");
  txt << "synthetic spectra: n_vars=" << r.spec.n_vars << " n_per_class=" << r.spec.n_per_class
      << " n_classes=" << r.spec.n_classes << " band_width=" << r.spec.band_width
      << " separation=" << fmt(r.spec.separation) << " seed=" << r.spec.seed << "\n";
  for (const auto& e : r.entries) {
    txt << (e.family == StructureFamily::KBox ? "kbox" : "kband") << " k=" << e.k
        << " params=" << e.n_params << ":";
    for (const auto& s : e.report.summaries) {
      txt << "  " << learner_name(s.learner) << " acc=" << fmt(s.mean_accuracy)
          << " cll=" << fmt(s.mean_cll) << " defined=" << s.defined_folds << "/"
          << s.defined_folds + s.undefined_folds;
    }
    txt << "\n";
  }
  if (!txt) throw IoError(txt_path + ": write failed");
}

}  // namespace cgn
