#include "narx/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace narx {

Dataset split_dataset(std::vector<double> u, std::vector<double> y,
                      std::size_t n_est) {
  if (u.size() != y.size()) {
    throw std::invalid_argument("split_dataset: u and y lengths differ");
  }
  if (n_est == 0 || n_est >= y.size()) {
    throw std::invalid_argument(
        "split_dataset: n_est must satisfy 0 < n_est < number of samples");
  }
  return Dataset{std::move(u), std::move(y), n_est};
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path);
  out << "k,u,y\n";
  char row[96];
  for (std::size_t k = 0; k < data.size(); ++k) {
    std::snprintf(row, sizeof row, "%zu,%.17g,%.17g\n", k, data.u[k], data.y[k]);
    out << row;
  }
  if (!out) throw std::runtime_error("save_csv: write failed for " + path);
}

Dataset load_csv(const std::string& path, std::size_t n_est) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line) || line.rfind("k,u,y", 0) != 0) {
    throw std::runtime_error("load_csv: missing 'k,u,y' header in " + path);
  }
  std::vector<double> u, y;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string k_str, u_str, y_str;
    if (!std::getline(fields, k_str, ',') || !std::getline(fields, u_str, ',') ||
        !std::getline(fields, y_str)) {
      throw std::runtime_error("load_csv: malformed row '" + line + "'");
    }
    u.push_back(std::stod(u_str));
    y.push_back(std::stod(y_str));
  }
  return split_dataset(std::move(u), std::move(y), n_est);
}

}  // namespace narx
