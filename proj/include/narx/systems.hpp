#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "narx/dataset.hpp"
#include "narx/rng.hpp"
#include "narx/term.hpp"

namespace narx::systems {

/// A white source: uniform on [a, b], or Gaussian with mean a and VARIANCE b.
struct SignalSpec {
  enum class Kind { uniform, gaussian };
  Kind kind = Kind::gaussian;
  double a = 0.0;
  double b = 0.0;

  [[nodiscard]] static SignalSpec wun(double lo, double hi) {
    return {Kind::uniform, lo, hi};
  }
  [[nodiscard]] static SignalSpec wgn(double mean, double variance) {
    return {Kind::gaussian, mean, variance};
  }
};

/// A simulated polynomial difference-equation benchmark:
///   y(k) = sum_i coefficients[i] * true_terms[i](k) + e(k)
/// driven by white input u and white equation noise e, zero initial
/// conditions everywhere.
struct SystemSpec {
  std::string id;
  std::vector<TermSpec> true_terms;
  std::vector<double> coefficients;
  SignalSpec input;
  SignalSpec noise;
};

[[nodiscard]] std::vector<double> white_uniform(std::size_t n, double lo,
                                                double hi, Rng& rng);
/// Second parameter is the variance (variance 0 yields a constant sequence).
[[nodiscard]] std::vector<double> white_gaussian(std::size_t n, double mean,
                                                 double variance, Rng& rng);

/// Preset benchmark systems "S1".."S6" (term lists ordered as published).
[[nodiscard]] const SystemSpec& benchmark_system(const std::string& id);
[[nodiscard]] std::vector<std::string> benchmark_ids();

/// Simulates `spec` for n samples with zero initial conditions.  The input
/// series is drawn first, then the noise series, so u and e are independent
/// streams of one seeded generator.  Throws std::runtime_error when the
/// recursion leaves [-1e12, 1e12] (unstable system definition).
[[nodiscard]] Dataset simulate_system(const SystemSpec& spec, std::size_t n,
                                      std::uint64_t seed, std::size_t n_est);

/// Polynomial input-only system with low-pass excitation and AR(1)-coloured
/// additive noise:
///   u(k) = 1.6 u(k-1) - 0.64 u(k-2) + 0.3 v(k),  v ~ WGN(0, 1)
///   w(k) = u(k-1) + 0.5 u(k-2) + 0.25 u(k-1)u(k-2) - 0.3 u(k-1)^3
///   y(k) = w(k) + eta(k),  eta(k) = 0.8 eta(k-1) + e(k),  e ~ WGN(0, noise_variance)
/// The default variance is the quoted sigma = 0.02 squared, matching the
/// S1..S6 noise convention.
[[nodiscard]] Dataset simulate_s7(std::size_t n, std::uint64_t seed,
                                  std::size_t n_est,
                                  double noise_variance = 0.02 * 0.02);
/// The four structural terms of the S7 deterministic part, with coefficients.
[[nodiscard]] const std::vector<TermSpec>& s7_true_terms();
[[nodiscard]] const std::vector<double>& s7_true_coefficients();

/// Second-order oscillators sampled under zero-order-held Gaussian
/// excitation, integrated with fixed-step RK4 (`substeps` steps per sample).
struct OscillatorConfig {
  double omega_n = 45.0 * 3.14159265358979323846;  ///< rad/s
  double zeta = 0.01;
  double epsilon = 3.0;        ///< cubic stiffness (Duffing only)
  double sample_rate = 500.0;  ///< Hz
  int substeps = 10;
  double amplitude = 1.0;      ///< std dev of the held excitation
};

/// y'' + 2*zeta*wn*y' + wn^2*y + wn^2*eps*y^3 = u
[[nodiscard]] Dataset simulate_duffing(std::size_t n, std::uint64_t seed,
                                       std::size_t n_est,
                                       const OscillatorConfig& config = {});
/// y'' + 2*zeta*wn*(1 - y^2)*y' + wn^2*y = u
[[nodiscard]] Dataset simulate_vanderpol(std::size_t n, std::uint64_t seed,
                                         std::size_t n_est,
                                         const OscillatorConfig& config = {});

}  // namespace narx::systems
