#ifndef CGN_EXPERIMENT_HPP
#define CGN_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cgn/bayes.hpp"
#include "cgn/dataset.hpp"
#include "cgn/search.hpp"
#include "cgn/structure.hpp"

namespace cgn {

class ExperimentError : public Error {
 public:
  explicit ExperimentError(const std::string& msg) : Error(msg) {}
};

enum class Learner { ML, BA };
const char* learner_name(Learner l);

enum class MwVerdict { AWins, BWins, Tie };

struct MannWhitneyResult {
  double u_a = 0.0;   // U statistic of the first sample
  double p = 1.0;     // two-sided
  MwVerdict verdict = MwVerdict::Tie;
  bool exact = false;
};

// Two-sided Mann-Whitney U with midranks. Exact permutation distribution
// when min(n_a, n_b) <= 8, normal approximation with tie correction above.
// The winner is the significant sample with the greater rank sum.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 double alpha);

// One-sided variant: p-value of H1 "a tends to be greater than b".
double mann_whitney_one_sided_p(std::span<const double> a, std::span<const double> b);

// Paired rank test over the per-index differences a[i] - b[i] (Wilcoxon
// signed rank): exact sign enumeration for up to 12 nonzero differences,
// normal approximation with tie correction above. This is the form of the
// ranked comparison that honors the pairing of the fold scores.
struct PairedRankResult {
  double w_plus = 0.0;  // rank sum of positive differences
  double p = 1.0;       // two-sided
  MwVerdict verdict = MwVerdict::Tie;
  bool exact = false;
};
PairedRankResult wilcoxon_signed_rank(std::span<const double> a,
                                      std::span<const double> b, double alpha);

struct StructureSpec {
  enum class Kind { Fixed, File, NaiveBayes, WrapperFw, WrapperBw, WrapperWc, KBox, KBand };
  Kind kind = Kind::NaiveBayes;
  int k = 1;                        // KBox / KBand
  std::string path;                 // File
  std::optional<CgnStructure> fixed;  // Fixed

  std::string describe() const;
};

// Instrumentation record handed to ExperimentConfig::audit_hook once per
// (repetition, fold): provenance ids of every row each stage saw.
struct FoldAudit {
  int repetition = 0;
  int fold = 0;
  std::vector<std::int64_t> train_origins;
  std::vector<std::int64_t> test_origins;
  bool wrapper_used = false;
  std::vector<std::int64_t> wrapper_origins;
};

struct ExperimentConfig {
  std::string data_path;
  std::vector<VariableMeta> schema;
  int class_index = -1;

  StructureSpec structure;
  int repetitions = 10;
  int folds = 10;
  double train_fraction = 1.0;
  bool learn_ml = true;
  bool learn_ba = true;
  PriorConfig prior;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  int wrapper_folds = 10;
  std::string output_path;  // prefix for emitted files; empty = do not emit

  std::function<void(const FoldAudit&)> audit_hook;  // tests only
};

struct FoldRecord {
  Learner learner = Learner::ML;
  int repetition = 0;
  int fold = 0;
  int n_test = 0;
  bool defined = false;
  double accuracy = 0.0;
  double cll = 0.0;
};

struct LearnerSummary {
  Learner learner = Learner::ML;
  int defined_folds = 0;
  int undefined_folds = 0;
  double mean_accuracy = 0.0;
  double sd_accuracy = 0.0;
  double mean_cll = 0.0;
  double sd_cll = 0.0;
  double cll_per_instance = 0.0;  // derived: total cll / total test rows
};

enum class CompareVerdict { BaWins, MlWins, Tie };
const char* verdict_name(CompareVerdict v);

// BA-vs-ML comparison of one metric over the folds where both learners are
// defined. The verdict comes from the paired rank test over the per-fold
// (BA - ML) differences; the unpaired joint-rank U statistic is reported
// alongside for reference.
struct ComparisonSummary {
  std::string metric;  // "accuracy" | "cll"
  double w_plus = 0.0;
  double p = 1.0;
  CompareVerdict verdict = CompareVerdict::Tie;
  double u_ba = 0.0;        // unpaired Mann-Whitney U of the BA sample
  double p_unpaired = 1.0;  // its two-sided p
  int paired_folds = 0;
  int excluded_folds = 0;
};

struct ExperimentReport {
  std::vector<FoldRecord> rows;
  std::vector<LearnerSummary> summaries;
  std::vector<ComparisonSummary> tests;
  // config echo for the summary emission
  std::string structure_description;
  int repetitions = 0;
  int folds = 0;
  double train_fraction = 1.0;
  std::uint64_t seed = 0;
  double alpha = 0.05;

  const LearnerSummary& summary(Learner l) const;
  std::vector<double> metric_values(Learner l, const std::string& metric,
                                    bool paired_only) const;
};

// The full protocol: repeated stratified CV with optional training-set
// subsampling, per-fold structure selection when a wrapper is configured,
// both learners fit on identical splits, Mann-Whitney comparison at the end.
ExperimentReport run_experiment(const ExperimentConfig& cfg);
ExperimentReport run_experiment_on(const ExperimentConfig& cfg, const Dataset& data);

struct SyntheticSpectraSpec {
  int n_vars = 10;
  int n_per_class = 50;
  int n_classes = 2;
  int band_width = 1;         // true covariance band: variable j depends on
                              // the band_width-1 before it
  double separation = 1.0;    // per-coordinate mean shift between classes
  std::uint64_t seed = 0;
};

// Class-shifted Gaussian rows with banded covariance; class is the last,
// discrete column.
Dataset generate_spectra(const SyntheticSpectraSpec& spec);

enum class StructureFamily { KBox, KBand };

struct SweepEntry {
  StructureFamily family = StructureFamily::KBox;
  int k = 1;
  long n_params = 0;
  ExperimentReport report;
};

struct SweepReport {
  SyntheticSpectraSpec spec;
  std::vector<SweepEntry> entries;
};

// Per k: build the family structure, run the experiment protocol on the
// generated dataset, collect scores against the model's parameter count.
SweepReport k_sweep(const SyntheticSpectraSpec& spec, StructureFamily family,
                    const std::vector<int>& k_values, const ExperimentConfig& cfg);

// Tabular results (one row per learner/rep/fold) plus a text summary at
// <prefix>.csv / <prefix>.txt.
void emit_report(const ExperimentReport& r, const std::string& path_prefix);
std::vector<FoldRecord> parse_report_csv(const std::string& path);

// One row per (family, k, learner) plus a text summary.
void emit_sweep(const SweepReport& r, const std::string& path_prefix);

}  // namespace cgn

#endif  // CGN_EXPERIMENT_HPP
