#include "narx/systems.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace narx::systems {
namespace {

[[nodiscard]] std::vector<double> draw(const SignalSpec& spec, std::size_t n,
                                       Rng& rng) {
  if (spec.kind == SignalSpec::Kind::uniform) {
    return white_uniform(n, spec.a, spec.b, rng);
  }
  return white_gaussian(n, spec.a, spec.b, rng);
}

/// Value of a term under zero initial conditions: out-of-range lags read 0.
[[nodiscard]] double term_value_zero_ic(const TermSpec& term,
                                        const std::vector<double>& u,
                                        const std::vector<double>& y,
                                        std::size_t k) {
  double value = 1.0;
  for (int lag : term.y_lags) {
    const auto l = static_cast<std::size_t>(lag);
    if (k < l) return 0.0;
    value *= y[k - l];
  }
  for (int lag : term.u_lags) {
    const auto l = static_cast<std::size_t>(lag);
    if (k < l) return 0.0;
    value *= u[k - l];
  }
  return value;
}

[[nodiscard]] TermSpec term(std::vector<int> y_lags, std::vector<int> u_lags) {
  return TermSpec{std::move(y_lags), std::move(u_lags)};
}

// The quoted noise figures for these benchmarks are standard deviations
// (sigma); wgn() takes a variance, hence the squares.  Read as variances
// instead, the noise is 20-250x stronger: S6 escapes through its cubic on
// twice as many seeds, and the small coefficients (-0.05 y(k-2)^2,
// -0.0339 u(k-3)^3) drown below the noise floor, making the true structures
// unrecoverable on most realisations; sigma^2 keeps every structure
// identifiable, as these benchmarks are meant to be.
[[nodiscard]] std::map<std::string, SystemSpec> make_presets() {
  std::map<std::string, SystemSpec> presets;
  presets["S1"] = {
      "S1",
      {term({1}, {}), term({}, {1}), term({1}, {1}), term({}, {1, 1})},
      {0.5, 0.3, 0.3, 0.5},
      SignalSpec::wun(0.0, 1.0),
      SignalSpec::wgn(0.0, 0.002 * 0.002)};
  presets["S2"] = {
      "S2",
      {term({}, {}), term({1}, {}), term({}, {2}), term({}, {1, 1}),
       term({2, 2}, {})},
      {0.5, 0.5, 0.8, 1.0, -0.05},
      SignalSpec::wun(0.0, 1.0),
      SignalSpec::wgn(0.0, 0.05 * 0.05)};
  presets["S3"] = {
      "S3",
      {term({1}, {}), term({}, {1}), term({}, {1, 1}), term({}, {1, 1, 1})},
      {0.8, 0.4, 0.4, 0.4},
      SignalSpec::wgn(0.0, 1.0),
      SignalSpec::wgn(0.0, 0.33 * 0.33)};
  presets["S4"] = {
      "S4",
      {term({1}, {}), term({}, {1}), term({2, 2}, {}), term({2}, {1, 1}),
       term({}, {3, 3, 3})},
      {0.1586, 0.6777, 0.3037, -0.2566, -0.0339},
      SignalSpec::wun(0.0, 1.0),
      SignalSpec::wgn(0.0, 0.002 * 0.002)};
  presets["S5"] = {
      "S5",
      {term({1}, {1}), term({2}, {}), term({}, {2, 2}), term({2}, {2, 2})},
      {0.7, -0.5, 0.6, -0.7},
      SignalSpec::wun(-1.0, 1.0),
      SignalSpec::wgn(0.0, 0.004 * 0.004)};
  presets["S6"] = {
      "S6",
      {term({1, 1, 1}, {}), term({1}, {1}), term({}, {2, 2}),
       term({2}, {2, 2}), term({2}, {})},
      {0.2, 0.7, 0.6, -0.7, -0.5},
      SignalSpec::wun(-1.0, 1.0),
      SignalSpec::wgn(0.0, 0.004 * 0.004)};
  return presets;
}

enum class Oscillator { duffing, vanderpol };

[[nodiscard]] Dataset simulate_oscillator(Oscillator which, std::size_t n,
                                          std::uint64_t seed,
                                          std::size_t n_est,
                                          const OscillatorConfig& config) {
  if (config.sample_rate <= 0.0 || config.substeps < 1) {
    throw std::invalid_argument("simulate_oscillator: bad sampling setup");
  }
  Rng rng(seed);
  const std::vector<double> u =
      white_gaussian(n, 0.0, config.amplitude * config.amplitude, rng);

  const double wn = config.omega_n;
  const double two_zeta_wn = 2.0 * config.zeta * wn;
  auto accel = [&](double y, double v, double input) {
    if (which == Oscillator::duffing) {
      return input - two_zeta_wn * v - wn * wn * y -
             wn * wn * config.epsilon * y * y * y;
    }
    return input - two_zeta_wn * (1.0 - y * y) * v - wn * wn * y;
  };

  const double h = 1.0 / (config.sample_rate * config.substeps);
  std::vector<double> y_samples(n);
  double y = 0.0;
  double v = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    y_samples[k] = y;
    const double input = u[k];  // held for the whole sampling interval
    for (int s = 0; s < config.substeps; ++s) {
      const double k1y = v;
      const double k1v = accel(y, v, input);
      const double k2y = v + 0.5 * h * k1v;
      const double k2v = accel(y + 0.5 * h * k1y, v + 0.5 * h * k1v, input);
      const double k3y = v + 0.5 * h * k2v;
      const double k3v = accel(y + 0.5 * h * k2y, v + 0.5 * h * k2v, input);
      const double k4y = v + h * k3v;
      const double k4v = accel(y + h * k3y, v + h * k3v, input);
      y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    if (!std::isfinite(y) || !std::isfinite(v)) {
      throw std::runtime_error("simulate_oscillator: state diverged");
    }
  }
  return split_dataset(std::move(u), std::move(y_samples), n_est);
}

}  // namespace

std::vector<double> white_uniform(std::size_t n, double lo, double hi,
                                  Rng& rng) {
  if (lo >= hi) throw std::invalid_argument("white_uniform: lo must be < hi");
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

std::vector<double> white_gaussian(std::size_t n, double mean, double variance,
                                   Rng& rng) {
  if (variance < 0.0) {
    throw std::invalid_argument("white_gaussian: variance must be >= 0");
  }
  std::vector<double> out(n, mean);
  if (variance > 0.0) {
    std::normal_distribution<double> dist(mean, std::sqrt(variance));
    for (double& v : out) v = dist(rng);
  }
  return out;
}

const SystemSpec& benchmark_system(const std::string& id) {
  static const std::map<std::string, SystemSpec> presets = make_presets();
  const auto it = presets.find(id);
  if (it == presets.end()) {
    throw std::invalid_argument("benchmark_system: unknown system '" + id + "'");
  }
  return it->second;
}

std::vector<std::string> benchmark_ids() {
  return {"S1", "S2", "S3", "S4", "S5", "S6"};
}

Dataset simulate_system(const SystemSpec& spec, std::size_t n,
                        std::uint64_t seed, std::size_t n_est) {
  if (spec.true_terms.size() != spec.coefficients.size()) {
    throw std::invalid_argument(
        "simulate_system: term/coefficient count mismatch");
  }
  Rng rng(seed);
  std::vector<double> u = draw(spec.input, n, rng);
  const std::vector<double> e = draw(spec.noise, n, rng);

  std::vector<double> y(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = e[k];
    for (std::size_t i = 0; i < spec.true_terms.size(); ++i) {
      acc += spec.coefficients[i] *
             term_value_zero_ic(spec.true_terms[i], u, y, k);
    }
    if (!(std::abs(acc) < 1e12)) {
      throw std::runtime_error("simulate_system: recursion diverged (system '" +
                               spec.id + "')");
    }
    y[k] = acc;
  }
  return split_dataset(std::move(u), std::move(y), n_est);
}

Dataset simulate_s7(std::size_t n, std::uint64_t seed, std::size_t n_est,
                    double noise_variance) {
  Rng rng(seed);
  const std::vector<double> v = white_gaussian(n, 0.0, 1.0, rng);
  const std::vector<double> e = white_gaussian(n, 0.0, noise_variance, rng);

  std::vector<double> u(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double u1 = k >= 1 ? u[k - 1] : 0.0;
    const double u2 = k >= 2 ? u[k - 2] : 0.0;
    u[k] = 1.6 * u1 - 0.64 * u2 + 0.3 * v[k];
  }
  std::vector<double> y(n, 0.0);
  double eta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double u1 = k >= 1 ? u[k - 1] : 0.0;
    const double u2 = k >= 2 ? u[k - 2] : 0.0;
    const double w = u1 + 0.5 * u2 + 0.25 * u1 * u2 - 0.3 * u1 * u1 * u1;
    eta = 0.8 * eta + e[k];
    y[k] = w + eta;
  }
  return split_dataset(std::move(u), std::move(y), n_est);
}

const std::vector<TermSpec>& s7_true_terms() {
  static const std::vector<TermSpec> terms = {
      term({}, {1}), term({}, {2}), term({}, {1, 2}), term({}, {1, 1, 1})};
  return terms;
}

const std::vector<double>& s7_true_coefficients() {
  static const std::vector<double> coefficients = {1.0, 0.5, 0.25, -0.3};
  return coefficients;
}

Dataset simulate_duffing(std::size_t n, std::uint64_t seed, std::size_t n_est,
                         const OscillatorConfig& config) {
  return simulate_oscillator(Oscillator::duffing, n, seed, n_est, config);
}

Dataset simulate_vanderpol(std::size_t n, std::uint64_t seed, std::size_t n_est,
                           const OscillatorConfig& config) {
  return simulate_oscillator(Oscillator::vanderpol, n, seed, n_est, config);
}

}  // namespace narx::systems
