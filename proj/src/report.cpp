#include "narx/report.hpp"

#include <fstream>
#include <stdexcept>

namespace narx {

nlohmann::json term_to_json(const TermSpec& term) {
  return nlohmann::json{{"y", term.y_lags}, {"u", term.u_lags}};
}

TermSpec term_from_json(const nlohmann::json& j) {
  TermSpec term;
  term.y_lags = j.at("y").get<std::vector<int>>();
  term.u_lags = j.at("u").get<std::vector<int>>();
  return term;
}

nlohmann::json mask_to_json(const StructureMask& mask) {
  nlohmann::json bits = nlohmann::json::array();
  for (auto b : mask) bits.push_back(static_cast<int>(b));
  return bits;
}

StructureMask mask_from_json(const nlohmann::json& j) {
  StructureMask mask;
  mask.reserve(j.size());
  for (const auto& bit : j) {
    const int v = bit.get<int>();
    if (v != 0 && v != 1) {
      throw std::invalid_argument("mask_from_json: bits must be 0 or 1");
    }
    mask.push_back(static_cast<std::uint8_t>(v));
  }
  return mask;
}

nlohmann::json report_to_json(const RunReport& report, const ModelSet& model_set) {
  nlohmann::json best_terms = nlohmann::json::array();
  for (std::size_t m = 0; m < report.best_mask.size(); ++m) {
    if (report.best_mask[m]) {
      best_terms.push_back(term_to_string(model_set.terms[m]));
    }
  }
  nlohmann::json trace = nlohmann::json::array();
  for (const TracePoint& p : report.trace) {
    trace.push_back({{"iter", p.iter}, {"J", p.j}, {"xi", p.xi}});
  }
  nlohmann::json out{{"seed", report.seed},
                     {"config", report.config},
                     {"best_mask", mask_to_json(report.best_mask)},
                     {"best_terms", best_terms},
                     {"coefficients", report.coefficients},
                     {"J", report.j},
                     {"nmse", report.nmse},
                     {"trace", trace},
                     {"fes_used", report.fes_used}};
  if (!report.err_sequence.empty()) {
    nlohmann::json err = nlohmann::json::array();
    for (const auto& row : report.err_sequence) {
      err.push_back({{"term", static_cast<long long>(row[0])},
                     {"err", row[1]},
                     {"cumulative", row[2]}});
    }
    out["err_sequence"] = err;
  }
  return out;
}

RunReport report_from_json(const nlohmann::json& j) {
  RunReport report;
  report.seed = j.at("seed").get<std::uint64_t>();
  report.config = j.at("config");
  report.best_mask = mask_from_json(j.at("best_mask"));
  report.coefficients = j.at("coefficients").get<std::vector<double>>();
  report.j = j.at("J").get<double>();
  report.nmse = j.at("nmse").get<double>();
  for (const auto& p : j.at("trace")) {
    report.trace.push_back({p.at("iter").get<int>(), p.at("J").get<double>(),
                            p.at("xi").get<int>()});
  }
  report.fes_used = j.at("fes_used").get<unsigned long long>();
  if (j.contains("err_sequence")) {
    for (const auto& row : j.at("err_sequence")) {
      report.err_sequence.push_back({row.at("term").get<double>(),
                                     row.at("err").get<double>(),
                                     row.at("cumulative").get<double>()});
    }
  }
  return report;
}

void save_report(const RunReport& report, const ModelSet& model_set,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_report: cannot open " + path);
  out << report_to_json(report, model_set).dump(2) << '\n';
  if (!out) throw std::runtime_error("save_report: write failed for " + path);
}

RunReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_report: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return report_from_json(j);
}

}  // namespace narx
