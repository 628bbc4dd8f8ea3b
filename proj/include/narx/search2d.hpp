#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

#include "narx/fit.hpp"
#include "narx/report.hpp"
#include "narx/rng.hpp"
#include "narx/term.hpp"

namespace narx::search {

/// Particle velocity: real-valued selection likelihoods over two rows.
/// Row one scores candidate cardinalities (entry m backs cardinality m+1),
/// row two scores individual terms.
struct VelocityState {
  Eigen::ArrayXd cardinality;
  Eigen::ArrayXd term;
};

/// Binary (0/1-valued) learning exemplar matching the velocity layout.
struct LearningSet {
  Eigen::ArrayXd cardinality;
  Eigen::ArrayXd term;
};

struct SwarmConfig {
  int swarm_size = 30;
  double unification_factor = 0.4;  ///< balance of global vs neighborhood pull
  int refresh_gap = 20;             ///< stagnant iterations before re-init
  unsigned long long max_fes = 6000;
  int neighborhood_radius = 1;      ///< ring topology half-width
  bool parallel = true;             ///< OpenMP fitness evaluation
};

/// Learning set for exemplar `alpha` observed from position `beta`:
/// cardinality row is one-hot at card(alpha) (an empty exemplar maps to
/// cardinality one), term row keeps the exemplar bits the position lacks
/// (alpha AND NOT beta).
[[nodiscard]] LearningSet extract_learning_set(const StructureMask& alpha,
                                               const StructureMask& beta);

/// Self-learning set for a position: one-hot at the position's own
/// cardinality, term row equal to the position bits.
[[nodiscard]] LearningSet extract_self_learning_set(const StructureMask& beta);

/// Fitness-feedback weight: (max(J) - j_now) / (max(J) - min(J)) when the
/// particle improved (j_now < j_prev), zero otherwise or when the swarm
/// fitness spread is degenerate.
[[nodiscard]] double compute_delta(double j_now, double j_prev,
                                   std::span<const double> swarm_fitness);

/// In-place velocity update.  Each exemplar contribution is weighted by a
/// fresh elementwise-uniform [0, 2] matrix: pbest by r1, gbest by u_f * r2,
/// nbest by (1 - u_f) * r3, and the self set by the scalar delta.  Entries
/// only ever grow between refresh events.
void update_velocity(VelocityState& velocity, const LearningSet& pbest,
                     const LearningSet& gbest, const LearningSet& nbest,
                     const LearningSet& self, double unification_factor,
                     double delta, Rng& rng);

/// Roulette draw over the cardinality likelihoods: with cumulative masses
/// p_m, returns the cardinality k whose bin contains r * p_total.
/// Precondition: at least one positive likelihood, r in [0, 1].
[[nodiscard]] std::size_t sample_cardinality(const Eigen::ArrayXd& likelihood,
                                             double r);

/// Mask selecting the xi highest term likelihoods (ties resolved toward the
/// lower term index).
[[nodiscard]] StructureMask select_terms(const Eigen::ArrayXd& likelihood,
                                         std::size_t xi);

/// Full position update: roulette cardinality draw, then top-xi term pick.
[[nodiscard]] StructureMask update_position(const VelocityState& velocity,
                                            Rng& rng);

/// Runs the two-dimensional swarm search against an evaluation engine.
/// Velocities start uniform [0, 1], positions as fair coin flips; personal,
/// global and ring-neighborhood bests update synchronously once per sweep,
/// and a particle whose personal best stalls for refresh_gap sweeps has its
/// velocity re-drawn.  Deterministic for a given seed and config.
[[nodiscard]] RunReport run_search(const EvalEngine& engine,
                                   const SwarmConfig& config,
                                   std::uint64_t seed);

}  // namespace narx::search
