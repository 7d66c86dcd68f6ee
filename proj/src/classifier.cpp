#include "cgn/classifier.hpp"

#include <cmath>

#include "cgn/errors.hpp"
#include "cgn/logsumexp.hpp"

namespace cgn {

ClassPosterior normalize_log_scores(const std::vector<double>& log_scores) {
  if (log_scores.empty())
    throw ContractViolation("normalize_log_scores: no scores");
  const double lse = log_sum_exp(log_scores);
  ClassPosterior out;
  out.log_probs.reserve(log_scores.size());
  out.probs.reserve(log_scores.size());
  for (double s : log_scores) {
    const double lp = s - lse;
    out.log_probs.push_back(lp);
    out.probs.push_back(std::exp(lp));
  }
  return out;
}

ClassPosterior class_posterior_ml(const CgnModel& m, int class_var,
                                  const Observation& evidence) {
  const auto& cpt = m.cpt(class_var);
  const int card = cpt.rows.empty() ? 0 : cpt.rows.front().size();
  Observation x = evidence;
  std::vector<double> scores(card);
  for (int c = 0; c < card; ++c) {
    x.disc[class_var] = c;
    scores[c] = joint_logdensity(m, x);
  }
  return normalize_log_scores(scores);
}

ClassPosterior class_posterior_ba(const DhdnigParams& psi, int class_var,
                                  const Observation& evidence) {
  const int card = psi.dirichlet(class_var).default_psi.size();
  Observation x = evidence;
  std::vector<double> scores(card);
  for (int c = 0; c < card; ++c) {
    x.disc[class_var] = c;
    scores[c] = predictive_logdensity(psi, x);
  }
  return normalize_log_scores(scores);
}

int predict(const ClassPosterior& p) {
  if (p.probs.empty()) throw ContractViolation("predict: empty posterior");
  int best = 0;
  for (int c = 1; c < p.size(); ++c)
    if (p.log_probs[c] > p.log_probs[best]) best = c;
  return best;
}

EvalMetrics evaluate(const std::vector<ClassPosterior>& posteriors,
                     const std::vector<int>& truth) {
  if (posteriors.size() != truth.size())
    throw ContractViolation("evaluate: posterior/truth length mismatch");
  if (posteriors.empty()) throw ContractViolation("evaluate: empty batch");
  EvalMetrics m;
  m.n = static_cast<int>(posteriors.size());
  int correct = 0;
  for (size_t i = 0; i < posteriors.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= posteriors[i].size())
      throw ContractViolation("evaluate: truth label out of range");
    if (predict(posteriors[i]) == truth[i]) ++correct;
    m.cll += posteriors[i].log_probs[truth[i]];
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(m.n);
  return m;
}

}  // namespace cgn
