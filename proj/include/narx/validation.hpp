#pragma once

#include <span>
#include <string>
#include <vector>

#include "narx/dataset.hpp"
#include "narx/fit.hpp"
#include "narx/report.hpp"
#include "narx/term.hpp"

namespace narx::validation {

/// Qualitative comparison of a found structure against the known truth.
enum class OutcomeKind {
  exact_fitting,   ///< found == truth
  over_fitting,    ///< all true terms plus spurious ones
  under_fitting1,  ///< true terms missing, nothing spurious
  under_fitting2,  ///< true terms missing and spurious ones present
};

[[nodiscard]] std::string outcome_name(OutcomeKind kind);

struct SearchOutcome {
  OutcomeKind kind = OutcomeKind::exact_fitting;
  std::vector<std::size_t> spurious;  ///< term indices in found but not truth
  std::vector<std::size_t> missing;   ///< term indices in truth but not found
};

/// Exactly one OutcomeKind applies to any (found, truth) pair.
[[nodiscard]] SearchOutcome classify_outcome(const StructureMask& found,
                                             const StructureMask& truth);

/// Per-term selection frequency over repeated runs: nu_m = (# masks with
/// term m) / R.  Requires at least one mask; all masks equally long.
[[nodiscard]] std::vector<double> selection_frequency(
    std::span<const StructureMask> masks);

/// Backward elimination of insignificant coefficients: refits on the
/// estimation segment, removes the largest p-value above alpha_level one
/// term at a time, and stops when all survivors are significant.  Never
/// removes the final term.  The returned model carries refit coefficients
/// and recomputed criterion/NMSE.
[[nodiscard]] IdentifiedModel prune_spurious(const IdentifiedModel& model,
                                             const Dataset& data,
                                             double alpha_level);

/// One residual-based validity test: normalised correlation values per lag
/// plus a strict all-inside-the-band verdict (nonzero lags only for the
/// residual autocorrelation).
struct ValidityTest {
  std::string name;
  std::vector<int> lags;
  std::vector<double> values;
  bool pass = false;
};

struct CorrelationTests {
  double band = 0.0;  ///< 95% confidence half-width 1.96/sqrt(N)
  std::vector<ValidityTest> tests;
  bool all_pass = false;
};

/// The five residual correlation tests: Phi_ee, Phi_ue, Phi_e(eu),
/// Phi_u2'e and Phi_u2'e2, with biased sample correlations normalised by
/// their lag-0 values.  `yhat` participates only in shape validation.
/// Throws std::invalid_argument for degenerate (constant) series.
[[nodiscard]] CorrelationTests correlation_tests(std::span<const double> residuals,
                                                 std::span<const double> u,
                                                 std::span<const double> yhat,
                                                 int max_lag = 20);

struct OutcomeTally {
  int exact = 0;
  int over = 0;
  int under1 = 0;
  int under2 = 0;
  [[nodiscard]] int total() const noexcept { return exact + over + under1 + under2; }
};

struct AggregateResult {
  OutcomeTally tally;
  std::vector<OutcomeKind> per_run;
  std::vector<StructureMask> pruned_masks;
};

/// Prunes every run's best model, then classifies it against the truth.
[[nodiscard]] AggregateResult aggregate_outcomes(
    const std::vector<RunReport>& reports, const StructureMask& truth,
    const ModelSet& model_set, const Dataset& data, double alpha_level);

}  // namespace narx::validation
