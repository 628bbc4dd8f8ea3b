#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "narx/dataset.hpp"
#include "narx/term.hpp"

namespace narx {

/// Fitness assigned to structures that cannot be scored: empty selections,
/// rank-deficient regressions and diverging free runs.  Largest finite double
/// so every scorable structure wins a minimisation.
inline constexpr double kWorstJ = std::numeric_limits<double>::max();

/// Floor applied to the validation mean-squared error before taking its log,
/// so that near-perfect fits cannot produce -inf criteria.
inline constexpr double kMseFloor = 1e-300;

/// A structure together with its fitted coefficients and scores.
struct IdentifiedModel {
  ModelSet model_set;
  StructureMask mask;
  std::vector<double> coefficients;  ///< one per selected term, mask order
  double j = kWorstJ;                ///< information criterion (validation)
  double nmse = std::numeric_limits<double>::quiet_NaN();
};

/// Free-run simulation output.
struct FreeRun {
  std::vector<double> yhat;  ///< seed values followed by simulated samples
  bool diverged = false;     ///< true when |yhat| exceeded the bound (output
                             ///< is truncated at the offending sample)
};

/// Regression data shared by the least-squares and forward-regression paths:
/// one-step-ahead regressors built from measured samples, with the first
/// max(n_u, n_y) rows of the estimation segment discarded.
struct RegressorData {
  Eigen::MatrixXd x;      ///< rows x N_t, column m = term m
  Eigen::VectorXd y;      ///< estimation targets aligned with x
  std::size_t first_row;  ///< dataset index of row 0
};

[[nodiscard]] RegressorData build_regressors(const ModelSet& model_set,
                                             const Dataset& data);

/// Ordinary least squares via column-pivoted QR.  Returns nothing when the
/// selected columns are rank deficient.
[[nodiscard]] std::optional<Eigen::VectorXd> ls_solve(const Eigen::MatrixXd& x,
                                                      const Eigen::VectorXd& y);

/// ls_solve plus the pieces needed for coefficient inference.
struct LsDetail {
  Eigen::VectorXd theta;
  double rss = 0.0;               ///< residual sum of squares
  Eigen::MatrixXd cov_unscaled;   ///< (X^T X)^{-1}
  std::size_t rows = 0;
};
[[nodiscard]] std::optional<LsDetail> ls_solve_detail(const Eigen::MatrixXd& x,
                                                      const Eigen::VectorXd& y);

/// Fits the selected terms to the estimation segment.  Returns nothing when
/// the regression is rank deficient or the mask is empty.
[[nodiscard]] std::optional<std::vector<double>> estimate_parameters(
    const ModelSet& model_set, const StructureMask& mask, const Dataset& data);

/// Simulates the model ahead in time using its own outputs (model-predicted
/// output).  yhat[j] shares the clock of u[j]; the first y_init.size()
/// entries of yhat are the seed.  Preconditions: y_init covers every output
/// and input lag the model references, and u.size() >= y_init.size() + steps - 1.
/// Simulation stops early (diverged = true) when |yhat| > divergence_bound.
[[nodiscard]] FreeRun simulate_model(
    const IdentifiedModel& model, std::span<const double> u,
    std::span<const double> y_init, std::size_t steps,
    double divergence_bound = std::numeric_limits<double>::infinity());

/// Normalised mean-squared error sum((y-yhat)^2) / sum((y-mean(y))^2).
/// Throws std::invalid_argument for length mismatch, fewer than two samples
/// or constant y.
[[nodiscard]] double compute_nmse(std::span<const double> y,
                                  std::span<const double> yhat);

/// Information criterion J = n_val * ln(mse) + ln(n_val) * xi.
/// Throws std::invalid_argument when mse <= 0 or n_val == 0.
[[nodiscard]] double bic_value(double mse, std::size_t xi, std::size_t n_val);

/// Everything evaluate() knows about one candidate structure.
struct FitDetail {
  bool singular = false;
  bool diverged = false;
  Eigen::VectorXd theta;
  std::vector<double> yhat_val;  ///< free-run output over the validation span
  double mse = std::numeric_limits<double>::quiet_NaN();
  double nmse = std::numeric_limits<double>::quiet_NaN();
  double j = kWorstJ;
};

/// Scores candidate structures against one dataset: least-squares fit on the
/// estimation segment, free-run simulation over the validation segment, and
/// the criterion J on the free-run error.  Construction precomputes the full
/// regressor matrix once; evaluations are independent and thread-safe, which
/// is what the OpenMP batch path exploits.  Batch results are identical in
/// serial and parallel mode.
class EvalEngine {
 public:
  EvalEngine(ModelSet model_set, Dataset data);

  /// J for one structure (sentinel rules above); counts one evaluation.
  [[nodiscard]] double evaluate(const StructureMask& mask) const;

  /// J for many structures; `parallel` selects the OpenMP path.
  [[nodiscard]] std::vector<double> evaluate_batch(
      std::span<const StructureMask> masks, bool parallel = true) const;

  /// Full fit record for reporting; does not count as an evaluation.
  [[nodiscard]] FitDetail fit_detail(const StructureMask& mask) const;

  /// Number of evaluate() calls so far (exact, including sentinel exits).
  [[nodiscard]] unsigned long long eval_count() const noexcept {
    return eval_count_.load(std::memory_order_relaxed);
  }

  [[nodiscard]] const ModelSet& model_set() const noexcept { return model_set_; }
  [[nodiscard]] const Dataset& data() const noexcept { return data_; }
  [[nodiscard]] double divergence_bound() const noexcept { return bound_; }

 private:
  ModelSet model_set_;
  Dataset data_;
  RegressorData reg_;
  double bound_;
  mutable std::atomic<unsigned long long> eval_count_{0};
};

}  // namespace narx
