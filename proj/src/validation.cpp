#include "narx/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace narx::validation {
namespace {

/// Biased cross-covariance (1/N) * sum_k x'(k - tau) y'(k) of pre-centred
/// series, defined for negative tau by shrinking the summation window.
[[nodiscard]] double cross_cov(std::span<const double> x,
                               std::span<const double> y, int tau) {
  const auto n = static_cast<long>(y.size());
  double acc = 0.0;
  for (long k = std::max(0L, static_cast<long>(tau));
       k < std::min(n, n + static_cast<long>(tau)); ++k) {
    acc += x[static_cast<std::size_t>(k - tau)] * y[static_cast<std::size_t>(k)];
  }
  return acc / static_cast<double>(n);
}

[[nodiscard]] std::vector<double> centred(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k] - mean;
  return out;
}

[[nodiscard]] ValidityTest make_test(const std::string& name,
                                     std::span<const double> x,
                                     std::span<const double> y, int lag_lo,
                                     int lag_hi, double normaliser, double band,
                                     int skip_lag = std::numeric_limits<int>::min()) {
  ValidityTest test;
  test.name = name;
  test.pass = true;
  for (int tau = lag_lo; tau <= lag_hi; ++tau) {
    test.lags.push_back(tau);
    const double value = cross_cov(x, y, tau) / normaliser;
    test.values.push_back(value);
    if (tau != skip_lag && std::abs(value) > band) test.pass = false;
  }
  return test;
}

/// p-values for every coefficient of one least-squares fit.
[[nodiscard]] std::vector<double> coefficient_p_values(const LsDetail& fit) {
  const auto xi = static_cast<std::size_t>(fit.theta.size());
  if (fit.rows <= xi) {
    throw std::runtime_error(
        "prune_spurious: no residual degrees of freedom for the refit");
  }
  const double dof = static_cast<double>(fit.rows - xi);
  const double s2 = fit.rss / dof;

  std::vector<double> p(xi);
  const boost::math::students_t_distribution<double> dist(dof);
  for (std::size_t i = 0; i < xi; ++i) {
    const double var = s2 * std::max(fit.cov_unscaled(static_cast<Eigen::Index>(i),
                                                      static_cast<Eigen::Index>(i)),
                                     0.0);
    const double se = std::sqrt(var);
    const double theta = fit.theta(static_cast<Eigen::Index>(i));
    if (se == 0.0) {
      p[i] = theta == 0.0 ? 1.0 : 0.0;
      continue;
    }
    const double t = std::abs(theta / se);
    p[i] = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
  }
  return p;
}

}  // namespace

std::string outcome_name(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::exact_fitting: return "ExactFitting";
    case OutcomeKind::over_fitting: return "OverFitting";
    case OutcomeKind::under_fitting1: return "UnderFitting1";
    case OutcomeKind::under_fitting2: return "UnderFitting2";
  }
  throw std::logic_error("outcome_name: unknown kind");
}

SearchOutcome classify_outcome(const StructureMask& found,
                               const StructureMask& truth) {
  if (found.size() != truth.size()) {
    throw std::invalid_argument("classify_outcome: mask size mismatch");
  }
  SearchOutcome outcome;
  for (std::size_t m = 0; m < found.size(); ++m) {
    if (found[m] && !truth[m]) outcome.spurious.push_back(m);
    if (!found[m] && truth[m]) outcome.missing.push_back(m);
  }
  if (outcome.missing.empty()) {
    outcome.kind = outcome.spurious.empty() ? OutcomeKind::exact_fitting
                                            : OutcomeKind::over_fitting;
  } else {
    outcome.kind = outcome.spurious.empty() ? OutcomeKind::under_fitting1
                                            : OutcomeKind::under_fitting2;
  }
  return outcome;
}

std::vector<double> selection_frequency(std::span<const StructureMask> masks) {
  if (masks.empty()) {
    throw std::invalid_argument("selection_frequency: no masks given");
  }
  const std::size_t nt = masks.front().size();
  std::vector<double> nu(nt, 0.0);
  for (const StructureMask& mask : masks) {
    if (mask.size() != nt) {
      throw std::invalid_argument("selection_frequency: mask size mismatch");
    }
    for (std::size_t m = 0; m < nt; ++m) nu[m] += mask[m];
  }
  for (double& v : nu) v /= static_cast<double>(masks.size());
  return nu;
}

IdentifiedModel prune_spurious(const IdentifiedModel& model, const Dataset& data,
                               double alpha_level) {
  if (!(alpha_level > 0.0) || alpha_level >= 1.0) {
    throw std::invalid_argument("prune_spurious: alpha_level must lie in (0, 1)");
  }
  const RegressorData reg = build_regressors(model.model_set, data);

  StructureMask mask = model.mask;
  std::vector<int> indices;
  for (std::size_t m = 0; m < mask.size(); ++m) {
    if (mask[m]) indices.push_back(static_cast<int>(m));
  }
  if (indices.empty()) {
    throw std::invalid_argument("prune_spurious: model selects no terms");
  }

  std::vector<double> coefficients;
  while (true) {
    Eigen::MatrixXd x_sub(reg.x.rows(), static_cast<Eigen::Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) {
      x_sub.col(static_cast<Eigen::Index>(j)) = reg.x.col(indices[j]);
    }
    const auto fit = ls_solve_detail(x_sub, reg.y);
    if (!fit) {
      throw std::runtime_error("prune_spurious: refit is rank deficient");
    }
    coefficients.assign(fit->theta.data(),
                        fit->theta.data() + fit->theta.size());
    if (indices.size() == 1) break;  // never prune the final term

    const std::vector<double> p = coefficient_p_values(*fit);
    std::size_t worst = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
      if (p[i] > p[worst]) worst = i;
    }
    if (!(p[worst] > alpha_level)) break;  // every survivor is significant

    mask[static_cast<std::size_t>(indices[worst])] = 0;
    indices.erase(indices.begin() + static_cast<std::ptrdiff_t>(worst));
  }

  IdentifiedModel pruned;
  pruned.model_set = model.model_set;
  pruned.mask = std::move(mask);
  pruned.coefficients = std::move(coefficients);
  const EvalEngine engine(pruned.model_set, data);
  const FitDetail detail = engine.fit_detail(pruned.mask);
  pruned.j = detail.j;
  pruned.nmse = detail.nmse;
  return pruned;
}

CorrelationTests correlation_tests(std::span<const double> residuals,
                                   std::span<const double> u,
                                   std::span<const double> yhat, int max_lag) {
  const std::size_t n = residuals.size();
  if (u.size() != n || yhat.size() != n) {
    throw std::invalid_argument("correlation_tests: series length mismatch");
  }
  if (max_lag < 1 || n <= static_cast<std::size_t>(2 * max_lag)) {
    throw std::invalid_argument(
        "correlation_tests: need more samples than twice max_lag");
  }

  const std::vector<double> e = centred(residuals);
  const std::vector<double> uc = centred(u);

  std::vector<double> eu(n);  // residual-input product process
  for (std::size_t k = 0; k < n; ++k) eu[k] = residuals[k] * u[k];
  const std::vector<double> euc = centred(eu);

  std::vector<double> u2(n);
  for (std::size_t k = 0; k < n; ++k) u2[k] = u[k] * u[k];
  const std::vector<double> u2c = centred(u2);

  std::vector<double> e2(n);
  for (std::size_t k = 0; k < n; ++k) e2[k] = residuals[k] * residuals[k];
  const std::vector<double> e2c = centred(e2);

  const double cee = cross_cov(e, e, 0);
  const double cuu = cross_cov(uc, uc, 0);
  const double ceueu = cross_cov(euc, euc, 0);
  const double cu2u2 = cross_cov(u2c, u2c, 0);
  const double ce2e2 = cross_cov(e2c, e2c, 0);
  if (!(cee > 0.0) || !(cuu > 0.0) || !(ceueu > 0.0) || !(cu2u2 > 0.0) ||
      !(ce2e2 > 0.0)) {
    throw std::invalid_argument(
        "correlation_tests: constant series make the tests degenerate");
  }

  CorrelationTests out;
  out.band = 1.96 / std::sqrt(static_cast<double>(n));
  out.tests.push_back(make_test("phi_ee", e, e, 0, max_lag, cee, out.band,
                                /*skip_lag=*/0));
  out.tests.push_back(make_test("phi_ue", uc, e, -max_lag, max_lag,
                                std::sqrt(cuu * cee), out.band));
  out.tests.push_back(make_test("phi_e_eu", euc, e, 0, max_lag,
                                std::sqrt(cee * ceueu), out.band));
  out.tests.push_back(make_test("phi_u2e", u2c, e, -max_lag, max_lag,
                                std::sqrt(cu2u2 * cee), out.band));
  out.tests.push_back(make_test("phi_u2e2", u2c, e2c, -max_lag, max_lag,
                                std::sqrt(cu2u2 * ce2e2), out.band));
  out.all_pass = std::all_of(out.tests.begin(), out.tests.end(),
                             [](const ValidityTest& t) { return t.pass; });
  return out;
}

AggregateResult aggregate_outcomes(const std::vector<RunReport>& reports,
                                   const StructureMask& truth,
                                   const ModelSet& model_set, const Dataset& data,
                                   double alpha_level) {
  if (reports.empty()) {
    throw std::invalid_argument("aggregate_outcomes: no reports given");
  }
  AggregateResult result;
  for (const RunReport& report : reports) {
    IdentifiedModel model;
    model.model_set = model_set;
    model.mask = report.best_mask;
    model.coefficients = report.coefficients;
    model.j = report.j;
    model.nmse = report.nmse;

    const IdentifiedModel pruned = prune_spurious(model, data, alpha_level);
    const SearchOutcome outcome = classify_outcome(pruned.mask, truth);
    switch (outcome.kind) {
      case OutcomeKind::exact_fitting: ++result.tally.exact; break;
      case OutcomeKind::over_fitting: ++result.tally.over; break;
      case OutcomeKind::under_fitting1: ++result.tally.under1; break;
      case OutcomeKind::under_fitting2: ++result.tally.under2; break;
    }
    result.per_run.push_back(outcome.kind);
    result.pruned_masks.push_back(pruned.mask);
  }
  return result;
}

}  // namespace narx::validation
