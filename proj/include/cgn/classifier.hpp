#ifndef CGN_CLASSIFIER_HPP
#define CGN_CLASSIFIER_HPP

#include <vector>

#include "cgn/bayes.hpp"
#include "cgn/model.hpp"

namespace cgn {

// Normalized class distribution, kept in both spaces. probs sums to 1 within
// 1e-12 and equals exp(log_probs) entrywise.
struct ClassPosterior {
  std::vector<double> probs;
  std::vector<double> log_probs;

  int size() const { return static_cast<int>(probs.size()); }
};

struct EvalMetrics {
  double accuracy = 0.0;
  double cll = 0.0;  // sum of log p(true class), over n instances
  int n = 0;
};

// Normalize unnormalized log class scores through log-sum-exp.
ClassPosterior normalize_log_scores(const std::vector<double>& log_scores);

// p(class | evidence) under the point-estimate model: one joint log-density
// per candidate value of the class variable, normalized. The evidence must
// assign every other variable of the model.
ClassPosterior class_posterior_ml(const CgnModel& m, int class_var,
                                  const Observation& evidence);

// Same under the Bayesian-averaged predictive of the hyperparameter set.
ClassPosterior class_posterior_ba(const DhdnigParams& psi, int class_var,
                                  const Observation& evidence);

// Argmax label; ties go to the lowest class index.
int predict(const ClassPosterior& p);

// Accuracy and conditional log-likelihood over a batch.
EvalMetrics evaluate(const std::vector<ClassPosterior>& posteriors,
                     const std::vector<int>& truth);

}  // namespace cgn

#endif  // CGN_CLASSIFIER_HPP
