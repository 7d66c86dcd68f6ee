// Command-line harness: run experiments, sweep k-structures, generate
// synthetic spectra and validate structures against datasets.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cgn/classifier.hpp"
#include "cgn/errors.hpp"
#include "cgn/experiment.hpp"
#include "cgn/model.hpp"

namespace {

struct SchemaOptions {
  std::string data_path;
  std::string class_column;
  std::vector<std::string> discrete_columns;
  std::vector<std::string> label_specs;  // "column=label1,label2,..."
};

void add_schema_options(CLI::App* cmd, SchemaOptions& opt) {
  cmd->add_option("--data", opt.data_path, "dataset CSV path")->required();
  cmd->add_option("--class-column", opt.class_column, "name of the class column")->required();
  cmd->add_option("--discrete", opt.discrete_columns,
                  "names of discrete attribute columns (class is always discrete)")
      ->delimiter(',');
  cmd->add_option("--labels", opt.label_specs,
                  "explicit category labels, e.g. --labels species=setosa,versicolor");
}

// Build the schema from the CSV header: the class column and any listed
// discrete columns are discrete, everything else continuous.
std::pair<std::vector<cgn::VariableMeta>, int> schema_from_header(const SchemaOptions& opt) {
  std::ifstream f(opt.data_path, std::ios::binary);
  if (!f) throw cgn::ParseError(opt.data_path + ": cannot open file");
  std::string header;
  if (!std::getline(f, header)) throw cgn::ParseError(opt.data_path + ": empty file");
  if (!header.empty() && header.back() == '\r') header.pop_back();

  std::map<std::string, std::vector<std::string>> labels;
  for (const auto& spec : opt.label_specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw cgn::ContractViolation("--labels expects column=a,b,c, got \"" + spec + "\"");
    std::vector<std::string> ls;
    std::stringstream ss(spec.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) ls.push_back(item);
    labels[spec.substr(0, eq)] = ls;
  }

  std::vector<cgn::VariableMeta> schema;
  int class_index = -1;
  std::stringstream ss(header);
  std::string name;
  while (std::getline(ss, name, ',')) {
    cgn::VariableMeta meta;
    meta.name = name;
    meta.index = static_cast<int>(schema.size());
    const bool discrete = name == opt.class_column ||
                          std::find(opt.discrete_columns.begin(), opt.discrete_columns.end(),
                                    name) != opt.discrete_columns.end();
    meta.kind = discrete ? cgn::VarKind::Discrete : cgn::VarKind::Continuous;
    if (auto it = labels.find(name); it != labels.end()) meta.labels = it->second;
    if (name == opt.class_column) class_index = meta.index;
    schema.push_back(std::move(meta));
  }
  if (class_index < 0)
    throw cgn::ContractViolation("class column \"" + opt.class_column + "\" not in header");
  return {schema, class_index};
}

cgn::StructureSpec parse_structure_spec(const std::string& text) {
  cgn::StructureSpec spec;
  if (text == "nb") {
    spec.kind = cgn::StructureSpec::Kind::NaiveBayes;
  } else if (text == "fw") {
    spec.kind = cgn::StructureSpec::Kind::WrapperFw;
  } else if (text == "bw") {
    spec.kind = cgn::StructureSpec::Kind::WrapperBw;
  } else if (text == "wc") {
    spec.kind = cgn::StructureSpec::Kind::WrapperWc;
  } else if (text.rfind("kbox:", 0) == 0) {
    spec.kind = cgn::StructureSpec::Kind::KBox;
    spec.k = std::stoi(text.substr(5));
  } else if (text.rfind("kband:", 0) == 0) {
    spec.kind = cgn::StructureSpec::Kind::KBand;
    spec.k = std::stoi(text.substr(6));
  } else if (text.rfind("file:", 0) == 0) {
    spec.kind = cgn::StructureSpec::Kind::File;
    spec.path = text.substr(5);
  } else {
    throw cgn::ContractViolation(
        "unknown structure \"" + text +
        "\" (expected nb, fw, bw, wc, kbox:K, kband:K or file:PATH)");
  }
  return spec;
}

// Expand `--config FILE` into the argument list: each `key = value` line of
// the file becomes `--key value` right after the subcommand, skipping keys
// the command line already carries (flags override file values).
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);

  std::string config_path;
  for (size_t i = 0; i < args.size();) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
    } else {
      ++i;
    }
  }
  if (config_path.empty()) return args;

  std::set<std::string> cli_keys;
  for (const auto& a : args) {
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    cli_keys.insert(a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2));
  }

  std::ifstream f(config_path);
  if (!f) throw cgn::ParseError(config_path + ": cannot open configuration file");
  std::vector<std::string> expansion;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw cgn::ParseError(config_path + ": line " + std::to_string(line_no) +
                            ": expected `key = value`");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (key.empty())
      throw cgn::ParseError(config_path + ": line " + std::to_string(line_no) + ": empty key");
    if (cli_keys.count(key)) continue;
    expansion.push_back("--" + key);
    if (!value.empty()) expansion.push_back(value);
  }

  // file options land right after the subcommand token
  auto insert_at = args.begin();
  while (insert_at != args.end() && insert_at->rfind("-", 0) == 0) ++insert_at;
  if (insert_at != args.end()) ++insert_at;
  args.insert(insert_at, expansion.begin(), expansion.end());
  return args;
}

void apply_learners(const std::vector<std::string>& learners, cgn::ExperimentConfig& cfg) {
  if (learners.empty()) return;
  cfg.learn_ml = cfg.learn_ba = false;
  for (const auto& l : learners) {
    if (l == "ML")
      cfg.learn_ml = true;
    else if (l == "BA")
      cfg.learn_ba = true;
    else
      throw cgn::ContractViolation("unknown learner \"" + l + "\" (expected ML or BA)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional Gaussian network classifiers: maximum-likelihood and "
               "Bayesian-averaged learners, structure search, evaluation harness"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "repeated cross-validated experiment");
  run->footer("Options may also come from --config FILE (line-oriented `key = value`,\n"
              "keys match the long option names; command-line flags override the file).");
  SchemaOptions run_schema;
  add_schema_options(run, run_schema);
  std::string structure_text = "nb";
  std::vector<std::string> learners;
  cgn::ExperimentConfig cfg;
  run->add_option("--structure", structure_text,
                  "nb | fw | bw | wc | kbox:K | kband:K | file:PATH");
  run->add_option("--repetitions", cfg.repetitions, "CV repetitions");
  run->add_option("--folds", cfg.folds, "CV folds");
  run->add_option("--train-fraction", cfg.train_fraction,
                  "stratified fraction of each training split to keep");
  run->add_option("--learners", learners, "subset of ML,BA")->delimiter(',');
  run->add_option("--dirichlet-pseudocount", cfg.prior.dirichlet_pseudocount,
                  "Dirichlet prior pseudo-count");
  run->add_option("--rho-base", cfg.prior.rho_base, "NIG prior shape base");
  run->add_option("--seed", cfg.seed, "master seed");
  run->add_option("--alpha", cfg.alpha, "significance level of the comparison test");
  run->add_option("--wrapper-folds", cfg.wrapper_folds, "internal CV folds of the wrapper");
  run->add_option("--output", cfg.output_path, "output path prefix (.csv/.txt)")
      ->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "k-sweep over kbox/kband structures on "
                                            "synthetic spectra");
  sweep->footer("Accepts --config FILE like `run`.");
  std::string family_text = "kband";
  std::vector<int> k_values;
  cgn::SyntheticSpectraSpec spectra;
  cgn::ExperimentConfig sweep_cfg;
  sweep_cfg.repetitions = 5;
  std::vector<std::string> sweep_learners;
  sweep->add_option("--family", family_text, "kbox | kband");
  sweep->add_option("--k-values", k_values, "k values to sweep")->required()->delimiter(',');
  sweep->add_option("--n-vars", spectra.n_vars, "number of continuous variables");
  sweep->add_option("--n-per-class", spectra.n_per_class, "rows per class");
  sweep->add_option("--n-classes", spectra.n_classes, "number of classes");
  sweep->add_option("--band-width", spectra.band_width, "true covariance band width");
  sweep->add_option("--separation", spectra.separation, "class mean separation");
  sweep->add_option("--gen-seed", spectra.seed, "generator seed");
  sweep->add_option("--repetitions", sweep_cfg.repetitions, "CV repetitions");
  sweep->add_option("--folds", sweep_cfg.folds, "CV folds");
  sweep->add_option("--train-fraction", sweep_cfg.train_fraction, "training fraction");
  sweep->add_option("--learners", sweep_learners, "subset of ML,BA")->delimiter(',');
  sweep->add_option("--seed", sweep_cfg.seed, "experiment seed");
  sweep->add_option("--output", sweep_cfg.output_path, "output path prefix")->required();

  // gen-spectra
  auto* gen = app.add_subcommand("gen-spectra", "write a synthetic spectra dataset as CSV");
  cgn::SyntheticSpectraSpec gen_spec;
  std::string gen_out;
  gen->add_option("--n-vars", gen_spec.n_vars, "number of continuous variables");
  gen->add_option("--n-per-class", gen_spec.n_per_class, "rows per class");
  gen->add_option("--n-classes", gen_spec.n_classes, "number of classes");
  gen->add_option("--band-width", gen_spec.band_width, "true covariance band width");
  gen->add_option("--separation", gen_spec.separation, "class mean separation");
  gen->add_option("--seed", gen_spec.seed, "generator seed");
  gen->add_option("--output", gen_out, "CSV output path")->required();

  // validate
  auto* validate = app.add_subcommand("validate",
                                      "check a structure file against a dataset");
  SchemaOptions val_schema;
  add_schema_options(validate, val_schema);
  std::string structure_path;
  validate->add_option("--structure-file", structure_path, "structure text file")->required();

  try {
    auto args = expand_config_args(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*run) {
      auto [schema, class_index] = schema_from_header(run_schema);
      cfg.data_path = run_schema.data_path;
      cfg.schema = std::move(schema);
      cfg.class_index = class_index;
      cfg.structure = parse_structure_spec(structure_text);
      apply_learners(learners, cfg);
      const auto report = cgn::run_experiment(cfg);
      for (const auto& s : report.summaries)
        std::cout << cgn::learner_name(s.learner) << ": mean_accuracy=" << s.mean_accuracy
                  << " mean_cll=" << s.mean_cll << " defined_folds=" << s.defined_folds
                  << "\n";
      for (const auto& t : report.tests)
        std::cout << "paired-rank[" << t.metric << "]: p=" << t.p
                  << " verdict=" << cgn::verdict_name(t.verdict) << "\n";
      std::cout << "wrote " << cfg.output_path << ".csv and " << cfg.output_path << ".txt\n";
    } else if (*sweep) {
      cgn::StructureFamily family;
      if (family_text == "kbox")
        family = cgn::StructureFamily::KBox;
      else if (family_text == "kband")
        family = cgn::StructureFamily::KBand;
      else
        throw cgn::ContractViolation("unknown family \"" + family_text + "\"");
      apply_learners(sweep_learners, sweep_cfg);
      const auto report = cgn::k_sweep(spectra, family, k_values, sweep_cfg);
      for (const auto& e : report.entries) {
        std::cout << family_text << " k=" << e.k << " params=" << e.n_params << ":";
        for (const auto& s : e.report.summaries)
          std::cout << "  " << cgn::learner_name(s.learner) << " acc=" << s.mean_accuracy
                    << " cll=" << s.mean_cll;
        std::cout << "\n";
      }
      std::cout << "wrote " << sweep_cfg.output_path << ".csv and "
                << sweep_cfg.output_path << ".txt\n";
    } else if (*gen) {
      const auto data = cgn::generate_spectra(gen_spec);
      cgn::write_csv(data, gen_out);
      std::cout << "wrote " << gen_out << " (" << data.n_rows() << " rows, "
                << data.n_vars() - 1 << " variables + class)\n";
    } else if (*validate) {
      auto [schema, class_index] = schema_from_header(val_schema);
      const auto data = cgn::load_csv(val_schema.data_path, schema, class_index);
      const auto structure = cgn::load_structure(structure_path);
      const auto violations = cgn::validate_structure(structure);
      if (!violations.empty()) {
        std::cout << "structure: invalid\n";
        for (const auto& v : violations) std::cout << "  " << v.message << "\n";
        return 1;
      }
      std::cout << "structure: valid (" << structure.nodes().size() << " nodes, "
                << cgn::count_parameters(structure, data) << " parameters)\n";
      const auto report = cgn::is_acceptable(structure, data);
      std::cout << "acceptability: " << report.describe() << "\n";
      if (!report.acceptable) return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
