#include "cgn/model.hpp"

#include <cmath>
#include <random>

#include "cgn/errors.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cgn;
using testutil::cvar;
using testutil::dvar;

namespace {

CgnStructure naive_bayes3() {
  return CgnStructure({{0, VarKind::Discrete, {}},
                       {1, VarKind::Continuous, {0}},
                       {2, VarKind::Continuous, {0}},
                       {3, VarKind::Continuous, {0}}});
}

Dataset class_plus_one(const std::vector<int>& classes, const std::vector<double>& ys,
                       int card = 2) {
  Dataset data({dvar("c", card, 0), cvar("y", 1)}, 0);
  Observation obs;
  obs.disc = {0, -1};
  obs.cont = {0.0, 0.0};
  for (size_t i = 0; i < classes.size(); ++i) {
    obs.disc[0] = classes[i];
    obs.cont[1] = ys[i];
    data.append_row(obs);
  }
  return data;
}

}  // namespace

TEST_CASE("validate_structure accepts naive Bayes and flags the two rules") {
  CHECK(validate_structure(naive_bayes3()).empty());

  const CgnStructure bad_edge({{0, VarKind::Discrete, {1}}, {1, VarKind::Continuous, {}}});
  const auto v1 = validate_structure(bad_edge);
  REQUIRE(v1.size() == 1);
  CHECK(v1[0].kind == ViolationKind::ContinuousParentOfDiscrete);
  CHECK(v1[0].message.find('0') != std::string::npos);
  CHECK(v1[0].message.find('1') != std::string::npos);

  const CgnStructure cycle({{0, VarKind::Continuous, {1}}, {1, VarKind::Continuous, {0}}});
  const auto v2 = validate_structure(cycle);
  REQUIRE(v2.size() == 1);
  CHECK(v2[0].kind == ViolationKind::Cycle);

  const CgnStructure missing({{0, VarKind::Continuous, {7}}});
  CHECK(validate_structure(missing).size() == 1);
}

TEST_CASE("structure serialization round-trips exactly") {
  const CgnStructure s({{4, VarKind::Discrete, {}},
                        {0, VarKind::Continuous, {4}},
                        {1, VarKind::Continuous, {0, 4}},
                        {2, VarKind::Continuous, {0, 1, 4}}});
  const std::string text = serialize_structure(s);
  const CgnStructure back = parse_structure(text);
  CHECK(serialize_structure(back) == text);
  CHECK(back.nodes().size() == 4);
  CHECK(back.node(1).parents == std::vector<int>{0, 4});
  CHECK(back.continuous_parents(2) == std::vector<int>{0, 1});
  CHECK(back.discrete_parents(2) == std::vector<int>{4});
}

TEST_CASE("is_acceptable on the three spec cases") {
  // class-only structure, both labels present
  const CgnStructure class_only({{0, VarKind::Discrete, {}}});
  const Dataset ok = class_plus_one({0, 1, 0}, {1.0, 2.0, 3.0});
  CHECK(is_acceptable(class_only, ok).acceptable);

  // a label missing entirely -> empty-cell on the class node
  const Dataset missing = class_plus_one({0, 0, 0}, {1.0, 2.0, 3.0});
  const auto r1 = is_acceptable(class_only, missing);
  CHECK_FALSE(r1.acceptable);
  REQUIRE(r1.violations.size() == 1);
  CHECK(r1.violations[0].var == 0);
  CHECK(r1.violations[0].reason == ViolationReason::EmptyCell);

  // continuous node constant inside one class cell -> 1x1 ssd of exactly 0
  const CgnStructure nb({{0, VarKind::Discrete, {}}, {1, VarKind::Continuous, {0}}});
  const Dataset constant = class_plus_one({0, 0, 1, 1}, {5.0, 5.0, 1.0, 2.0});
  const auto r2 = is_acceptable(nb, constant);
  CHECK_FALSE(r2.acceptable);
  REQUIRE(r2.violations.size() == 1);
  CHECK(r2.violations[0].var == 1);
  CHECK(r2.violations[0].reason == ViolationReason::SingularSsd);
}

TEST_CASE("fit_ml discrete ratios and no-parent regression") {
  std::vector<int> classes;
  std::vector<double> ys;
  for (int i = 0; i < 100; ++i) {
    classes.push_back(i < 30 ? 0 : 1);
    ys.push_back(0.1 * i);
  }
  const CgnStructure class_only({{0, VarKind::Discrete, {}}});
  const auto m = fit_ml(class_only, class_plus_one(classes, ys));
  CHECK(m.cpt(0).rows[0].theta[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(m.cpt(0).rows[0].theta[1] == doctest::Approx(0.7).epsilon(1e-15));

  const CgnStructure single({{1, VarKind::Continuous, {}}});
  const auto g = fit_ml(single, class_plus_one({0, 1, 0}, {1.0, 2.0, 3.0}));
  CHECK(g.cpd(1).cells[0].beta[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(g.cpd(1).cells[0].sigma2 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("fit_ml regression matches an independent least-squares oracle") {
  Dataset data({dvar("c", 2, 0), cvar("x", 1), cvar("y", 2)}, 0);
  const double xs[] = {0.0, 1.0, 2.0, 3.0};
  const double ys[] = {0.0, 1.0, 2.0, 3.5};
  Observation obs;
  obs.disc = {0, -1, -1};
  obs.cont = {0.0, 0.0, 0.0};
  for (int i = 0; i < 4; ++i) {
    obs.disc[0] = i % 2;  // class not part of the structure
    obs.cont[1] = xs[i];
    obs.cont[2] = ys[i];
    data.append_row(obs);
  }
  const CgnStructure s({{1, VarKind::Continuous, {}}, {2, VarKind::Continuous, {1}}});
  const auto m = fit_ml(s, data);
  const auto& reg = m.cpd(2).cells[0];

  // normal equations solved directly from the raw points
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = 4;
  for (int i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ssr = 0;
  for (int i = 0; i < n; ++i) {
    const double e = ys[i] - intercept - slope * xs[i];
    ssr += e * e;
  }
  CHECK(reg.beta[0] == doctest::Approx(intercept).epsilon(1e-9));
  CHECK(reg.beta[1] == doctest::Approx(slope).epsilon(1e-9));
  CHECK(reg.sigma2 == doctest::Approx(ssr / n).epsilon(1e-9));
}

TEST_CASE("fit_ml rejects non-acceptable samples with the report attached") {
  const CgnStructure class_only({{0, VarKind::Discrete, {}}});
  const Dataset missing = class_plus_one({0, 0}, {1.0, 2.0});
  try {
    fit_ml(class_only, missing);
    FAIL("expected NotAcceptableError");
  } catch (const NotAcceptableError& e) {
    CHECK_FALSE(e.report.acceptable);
    CHECK(e.report.violations.size() == 1);
  }
}

TEST_CASE("joint_logdensity worked values and factorization oracle") {
  const CgnStructure class_only({{0, VarKind::Discrete, {}}});
  std::vector<int> classes(10, 1);
  std::fill_n(classes.begin(), 3, 0);
  std::vector<double> ys(10, 0.0);
  for (size_t i = 0; i < ys.size(); ++i) ys[i] = static_cast<double>(i);
  const auto m = fit_ml(class_only, class_plus_one(classes, ys));
  Observation x;
  x.disc = {0, -1};
  x.cont = {0.0, 0.0};
  CHECK(joint_logdensity(m, x) == doctest::Approx(std::log(0.3)).epsilon(1e-12));
  x.disc[0] = 5;
  CHECK_THROWS_AS(joint_logdensity(m, x), ContractViolation);

  // single continuous standard normal at 0
  CgnModel single;
  single.structure = CgnStructure({{1, VarKind::Continuous, {}}});
  ContinuousCpd cpd;
  cpd.var = 1;
  cpd.pd_cells = CellIndexer({}, std::vector<int>{});
  cpd.cells.push_back(GaussLinRegParams((Vector(1) << 0.0).finished(), 1.0));
  single.continuous.push_back(cpd);
  Observation y0;
  y0.disc = {-1, -1};
  y0.cont = {0.0, 0.0};
  CHECK(joint_logdensity(single, y0) == doctest::Approx(-0.9189385332046727).epsilon(1e-12));
}

TEST_CASE("joint_logdensity equals the per-node term sum on a fitted model") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Dataset data({dvar("c", 2, 0), cvar("x", 1), cvar("y", 2)}, 0);
  Observation obs;
  obs.disc = {0, -1, -1};
  obs.cont = {0.0, 0.0, 0.0};
  for (int i = 0; i < 40; ++i) {
    obs.disc[0] = i % 2;
    obs.cont[1] = gauss(rng);
    obs.cont[2] = 0.5 * obs.cont[1] + gauss(rng);
    data.append_row(obs);
  }
  const CgnStructure s({{0, VarKind::Discrete, {}},
                        {1, VarKind::Continuous, {0}},
                        {2, VarKind::Continuous, {0, 1}}});
  const auto m = fit_ml(s, data);

  for (int r = 0; r < data.n_rows(); ++r) {
    const Observation x = data.row(r);
    const int c = x.disc[0];
    double manual = std::log(m.cpt(0).rows[0].theta[c]);
    const auto& r1 = m.cpd(1).cells[c];
    manual += log_gaussian(x.cont[1], r1.beta[0], r1.sigma2);
    const auto& r2 = m.cpd(2).cells[c];
    manual += log_gaussian(x.cont[2], r2.beta[0] + r2.beta[1] * x.cont[1], r2.sigma2);
    CHECK(joint_logdensity(m, x) == doctest::Approx(manual).epsilon(1e-12));
  }
}

TEST_CASE("ML is a local optimum of the training log-likelihood") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Dataset data({dvar("c", 2, 0), cvar("x", 1), cvar("y", 2)}, 0);
  Observation obs;
  obs.disc = {0, -1, -1};
  obs.cont = {0.0, 0.0, 0.0};
  for (int i = 0; i < 30; ++i) {
    obs.disc[0] = i % 2;
    obs.cont[1] = gauss(rng) + obs.disc[0];
    obs.cont[2] = 0.3 * obs.cont[1] + gauss(rng);
    data.append_row(obs);
  }
  const CgnStructure s({{0, VarKind::Discrete, {}},
                        {1, VarKind::Continuous, {0}},
                        {2, VarKind::Continuous, {0, 1}}});
  const auto fitted = fit_ml(s, data);
  const double base = total_loglik(fitted, data);

  for (int dir = 0; dir < 20; ++dir) {
    // one multinomial row, tangent direction
    {
      CgnModel m = fitted;
      Vector d(2);
      d << gauss(rng), gauss(rng);
      d.array() -= d.mean();
      if (d.norm() > 0) {
        d *= 1e-3 / d.norm();
        Vector theta = m.discrete[0].rows[0].theta + d;
        if ((theta.array() > 0).all()) {
          m.discrete[0].rows[0] = MultinomialParams(theta);
          CHECK(total_loglik(m, data) - base <= 1e-9);
        }
      }
    }
    // one regression block
    {
      CgnModel m = fitted;
      auto& cell = m.continuous[1].cells[dir % 2];
      Vector d(3);
      d << gauss(rng), gauss(rng), gauss(rng);
      d *= 1e-3 / d.norm();
      Vector beta = cell.beta;
      beta[0] += d[0];
      beta[1] += d[1];
      const double sigma2 = cell.sigma2 + d[2];
      if (sigma2 > 0) {
        cell = GaussLinRegParams(beta, sigma2);
        CHECK(total_loglik(m, data) - base <= 1e-9);
      }
    }
  }
}

TEST_CASE("count_parameters tallies cells and regressors") {
  const Dataset data = class_plus_one({0, 1}, {1.0, 2.0});
  // class (card 2): 1 parameter; y | class: 2 cells x (0 pc + 2) = 4
  const CgnStructure nb({{0, VarKind::Discrete, {}}, {1, VarKind::Continuous, {0}}});
  CHECK(count_parameters(nb, data) == 5);
}
