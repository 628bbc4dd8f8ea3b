#pragma once

#include <cstdint>

#include "narx/fit.hpp"
#include "narx/report.hpp"

namespace narx::baselines {

/// Generational genetic algorithm over structure masks: tournament-of-two
/// selection, uniform crossover, independent per-bit mutation, elitism of one.
struct GaConfig {
  int population = 30;
  double p_crossover = 0.8;  ///< probability a parent pair recombines
  double p_mutation = 0.1;   ///< per-bit flip probability
  unsigned long long max_fes = 6000;
  bool parallel = true;
};

/// Binary PSO with a sigmoid transfer: real velocities per bit, clamped to
/// [v_min, v_max]; each bit resamples from sigmoid(velocity) every sweep.
struct BpsoConfig {
  int swarm_size = 30;
  double omega = 1.0;
  double c1 = 2.0;
  double c2 = 2.0;
  double v_min = -6.0;
  double v_max = 6.0;
  unsigned long long max_fes = 6000;
  bool parallel = true;
};

/// Orthogonal forward regression driven by the error-reduction ratio (ERR),
/// normalised by the raw estimation-output energy.  Selection stops when the
/// unexplained fraction drops below `sigma`, after `max_terms` picks, or when
/// no numerically viable candidate remains.
struct OfrConfig {
  double sigma = 0.01;  ///< unexplained-energy stopping threshold
  int max_terms = 60;
  bool parallel = true;
};

[[nodiscard]] RunReport run_ga(const EvalEngine& engine, const GaConfig& config,
                               std::uint64_t seed);

[[nodiscard]] RunReport run_bpso(const EvalEngine& engine,
                                 const BpsoConfig& config, std::uint64_t seed);

/// Deterministic (no seed); the report's err_sequence records one
/// (term index, ERR, cumulative ERR) row per selection step.
[[nodiscard]] RunReport run_ofr_err(const ModelSet& model_set,
                                    const Dataset& data,
                                    const OfrConfig& config);

}  // namespace narx::baselines
