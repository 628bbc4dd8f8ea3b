#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace narx {

/// An input/output record with an estimation/validation split point.
/// Samples [0, n_est) are used for parameter estimation, [n_est, size) for
/// model-predicted-output validation.
struct Dataset {
  std::vector<double> u;
  std::vector<double> y;
  std::size_t n_est = 0;

  [[nodiscard]] std::size_t size() const noexcept { return y.size(); }
  [[nodiscard]] std::size_t n_val() const noexcept { return y.size() - n_est; }
};

/// Bundles u and y with a split point after validating lengths and bounds.
/// Requires equal-length series and 0 < n_est < size.
[[nodiscard]] Dataset split_dataset(std::vector<double> u, std::vector<double> y,
                                    std::size_t n_est);

/// Writes "k,u,y" CSV with one row per sample (k counts from 0).
void save_csv(const Dataset& data, const std::string& path);

/// Reads a CSV produced by save_csv (header required).  The split point is
/// not part of the CSV; pass the intended n_est.
[[nodiscard]] Dataset load_csv(const std::string& path, std::size_t n_est);

}  // namespace narx
