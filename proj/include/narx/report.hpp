#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "narx/term.hpp"

namespace narx {

/// One point of a search convergence trace: the best criterion value and the
/// cardinality of the best structure after each evaluation sweep.
struct TracePoint {
  int iter = 0;
  double j = 0.0;
  int xi = 0;
};

/// Result of one search run, independent of the algorithm that produced it.
struct RunReport {
  std::uint64_t seed = 0;
  nlohmann::json config;  ///< algorithm name and parameters used for the run
  StructureMask best_mask;
  std::vector<double> coefficients;  ///< refit coefficients of best_mask
  double j = 0.0;                    ///< criterion of the best structure
  double nmse = 0.0;                 ///< free-run validation NMSE of the best
  std::vector<TracePoint> trace;
  unsigned long long fes_used = 0;   ///< exact fitness-evaluation count
  /// Forward-regression only: (term index, ERR, cumulative ERR) per step.
  std::vector<std::array<double, 3>> err_sequence;
};

/// JSON encodings used by files and tests.  Terms serialise as
/// {"y":[lags],"u":[lags]}, masks as 0/1 arrays.
[[nodiscard]] nlohmann::json term_to_json(const TermSpec& term);
[[nodiscard]] TermSpec term_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json mask_to_json(const StructureMask& mask);
[[nodiscard]] StructureMask mask_from_json(const nlohmann::json& j);

/// Full report serialisation; `model_set` supplies the readable term strings.
[[nodiscard]] nlohmann::json report_to_json(const RunReport& report,
                                            const ModelSet& model_set);
[[nodiscard]] RunReport report_from_json(const nlohmann::json& j);

void save_report(const RunReport& report, const ModelSet& model_set,
                 const std::string& path);
[[nodiscard]] RunReport load_report(const std::string& path);

}  // namespace narx
