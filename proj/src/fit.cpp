#include "narx/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace narx {
namespace {

/// Shared free-run recursion: fills z[k] for k in [start, start + steps)
/// from already-present history in z and the absolute input series u.
/// Returns false when |z[k]| exceeds `bound` (z is truncated there).
bool run_recursion(const ModelSet& model_set, std::span<const int> selected,
                   std::span<const double> theta, std::span<const double> u,
                   std::vector<double>& z, std::size_t start, std::size_t steps,
                   double bound) {
  for (std::size_t k = start; k < start + steps; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < selected.size(); ++j) {
      const TermSpec& term =
          model_set.terms[static_cast<std::size_t>(selected[j])];
      double value = theta[j];
      for (int lag : term.y_lags) value *= z[k - static_cast<std::size_t>(lag)];
      for (int lag : term.u_lags) value *= u[k - static_cast<std::size_t>(lag)];
      acc += value;
    }
    if (!(std::abs(acc) <= bound)) return false;  // also catches NaN
    z.push_back(acc);
  }
  return true;
}

[[nodiscard]] std::vector<int> selected_indices(const StructureMask& mask) {
  std::vector<int> indices;
  indices.reserve(cardinality(mask));
  for (std::size_t m = 0; m < mask.size(); ++m) {
    if (mask[m]) indices.push_back(static_cast<int>(m));
  }
  return indices;
}

}  // namespace

RegressorData build_regressors(const ModelSet& model_set, const Dataset& data) {
  const auto max_lag =
      static_cast<std::size_t>(std::max(model_set.n_u, model_set.n_y));
  if (data.n_est <= max_lag) {
    throw std::invalid_argument(
        "build_regressors: n_est must exceed max(n_u, n_y)");
  }
  const std::size_t rows = data.n_est - max_lag;
  const std::size_t nt = model_set.size();

  RegressorData reg;
  reg.first_row = max_lag;
  reg.x.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(nt));
  reg.y.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t m = 0; m < nt; ++m) {
    for (std::size_t r = 0; r < rows; ++r) {
      reg.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)) =
          evaluate_term(model_set.terms[m], data.u, data.y, max_lag + r);
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    reg.y(static_cast<Eigen::Index>(r)) = data.y[max_lag + r];
  }
  return reg;
}

std::optional<Eigen::VectorXd> ls_solve(const Eigen::MatrixXd& x,
                                        const Eigen::VectorXd& y) {
  if (x.cols() == 0 || x.rows() < x.cols()) return std::nullopt;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < x.cols()) return std::nullopt;
  return qr.solve(y);
}

std::optional<LsDetail> ls_solve_detail(const Eigen::MatrixXd& x,
                                        const Eigen::VectorXd& y) {
  if (x.cols() == 0 || x.rows() < x.cols()) return std::nullopt;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < x.cols()) return std::nullopt;

  LsDetail out;
  out.theta = qr.solve(y);
  out.rss = (y - x * out.theta).squaredNorm();
  out.rows = static_cast<std::size_t>(x.rows());

  // X P = Q R  =>  (X^T X)^{-1} = P R^{-1} R^{-T} P^T
  const auto n = x.cols();
  Eigen::MatrixXd r_inv = qr.matrixR()
                              .topLeftCorner(n, n)
                              .template triangularView<Eigen::Upper>()
                              .solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd cov = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  out.cov_unscaled = perm * cov * perm.transpose();
  return out;
}

std::optional<std::vector<double>> estimate_parameters(
    const ModelSet& model_set, const StructureMask& mask, const Dataset& data) {
  if (mask.size() != model_set.size()) {
    throw std::invalid_argument(
        "estimate_parameters: mask length does not match model set");
  }
  const std::vector<int> indices = selected_indices(mask);
  if (indices.empty()) return std::nullopt;

  const RegressorData reg = build_regressors(model_set, data);
  Eigen::MatrixXd x_sub(reg.x.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    x_sub.col(static_cast<Eigen::Index>(j)) = reg.x.col(indices[j]);
  }
  const auto theta = ls_solve(x_sub, reg.y);
  if (!theta) return std::nullopt;
  return std::vector<double>(theta->data(), theta->data() + theta->size());
}

FreeRun simulate_model(const IdentifiedModel& model, std::span<const double> u,
                       std::span<const double> y_init, std::size_t steps,
                       double divergence_bound) {
  const std::vector<int> indices = selected_indices(model.mask);
  if (model.coefficients.size() != indices.size()) {
    throw std::invalid_argument(
        "simulate_model: coefficient count does not match selected terms");
  }
  std::size_t max_lag = 0;
  for (int m : indices) {
    const TermSpec& term = model.model_set.terms[static_cast<std::size_t>(m)];
    for (int lag : term.y_lags) max_lag = std::max<std::size_t>(max_lag, lag);
    for (int lag : term.u_lags) max_lag = std::max<std::size_t>(max_lag, lag);
  }
  if (y_init.size() < max_lag) {
    throw std::invalid_argument(
        "simulate_model: y_init shorter than the largest model lag");
  }
  if (steps > 0 && u.size() + 1 < y_init.size() + steps) {
    throw std::invalid_argument("simulate_model: u too short for the horizon");
  }

  FreeRun out;
  out.yhat.assign(y_init.begin(), y_init.end());
  out.yhat.reserve(y_init.size() + steps);
  out.diverged = !run_recursion(model.model_set, indices, model.coefficients,
                                u, out.yhat, y_init.size(), steps,
                                divergence_bound);
  return out;
}

double compute_nmse(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) {
    throw std::invalid_argument("compute_nmse: length mismatch");
  }
  if (y.size() < 2) {
    throw std::invalid_argument("compute_nmse: need at least two samples");
  }
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());

  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    num += (y[k] - yhat[k]) * (y[k] - yhat[k]);
    den += (y[k] - mean) * (y[k] - mean);
  }
  if (den == 0.0) {
    throw std::invalid_argument("compute_nmse: y is constant");
  }
  return num / den;
}

double bic_value(double mse, std::size_t xi, std::size_t n_val) {
  if (n_val == 0) throw std::invalid_argument("bic_value: n_val must be > 0");
  if (!(mse > 0.0)) throw std::invalid_argument("bic_value: mse must be > 0");
  const auto nv = static_cast<double>(n_val);
  return nv * std::log(mse) + std::log(nv) * static_cast<double>(xi);
}

EvalEngine::EvalEngine(ModelSet model_set, Dataset data)
    : model_set_(std::move(model_set)),
      data_(std::move(data)),
      reg_(build_regressors(model_set_, data_)),
      bound_(0.0) {
  if (data_.n_val() == 0) {
    throw std::invalid_argument("EvalEngine: dataset has no validation span");
  }
  double max_abs_y = 0.0;
  for (double v : data_.y) max_abs_y = std::max(max_abs_y, std::abs(v));
  bound_ = 1e6 * (1.0 + max_abs_y);
}

double EvalEngine::evaluate(const StructureMask& mask) const {
  eval_count_.fetch_add(1, std::memory_order_relaxed);
  FitDetail detail = fit_detail(mask);
  return detail.j;
}

std::vector<double> EvalEngine::evaluate_batch(
    std::span<const StructureMask> masks, bool parallel) const {
  std::vector<double> out(masks.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(masks.size()); ++i) {
      out[static_cast<std::size_t>(i)] =
          evaluate(masks[static_cast<std::size_t>(i)]);
    }
  } else {
    for (std::size_t i = 0; i < masks.size(); ++i) out[i] = evaluate(masks[i]);
  }
  return out;
}

FitDetail EvalEngine::fit_detail(const StructureMask& mask) const {
  if (mask.size() != model_set_.size()) {
    throw std::invalid_argument(
        "EvalEngine: mask length does not match model set");
  }
  FitDetail detail;
  const std::vector<int> indices = selected_indices(mask);
  if (indices.empty()) return detail;  // empty structure: sentinel J

  Eigen::MatrixXd x_sub(reg_.x.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    x_sub.col(static_cast<Eigen::Index>(j)) = reg_.x.col(indices[j]);
  }
  const auto theta = ls_solve(x_sub, reg_.y);
  if (!theta) {
    detail.singular = true;
    return detail;
  }
  detail.theta = *theta;

  // Free run across the validation span, seeded with measured estimation data.
  std::vector<double> z(data_.y.begin(),
                        data_.y.begin() + static_cast<std::ptrdiff_t>(data_.n_est));
  z.reserve(data_.size());
  const std::span<const double> theta_span(detail.theta.data(),
                                           static_cast<std::size_t>(detail.theta.size()));
  const bool ok = run_recursion(model_set_, indices, theta_span, data_.u, z,
                                data_.n_est, data_.n_val(), bound_);
  if (!ok) {
    detail.diverged = true;
    return detail;
  }

  double sq_err = 0.0;
  for (std::size_t k = data_.n_est; k < data_.size(); ++k) {
    sq_err += (data_.y[k] - z[k]) * (data_.y[k] - z[k]);
  }
  detail.mse = std::max(sq_err / static_cast<double>(data_.n_val()), kMseFloor);
  detail.j = bic_value(detail.mse, indices.size(), data_.n_val());
  detail.yhat_val.assign(z.begin() + static_cast<std::ptrdiff_t>(data_.n_est),
                         z.end());

  // NMSE is reporting-only; a constant validation segment leaves it NaN
  // instead of failing the evaluation.
  double mean = 0.0;
  for (std::size_t k = data_.n_est; k < data_.size(); ++k) mean += data_.y[k];
  mean /= static_cast<double>(data_.n_val());
  double den = 0.0;
  for (std::size_t k = data_.n_est; k < data_.size(); ++k) {
    den += (data_.y[k] - mean) * (data_.y[k] - mean);
  }
  if (den > 0.0) detail.nmse = sq_err / den;
  return detail;
}

}  // namespace narx
