#include "narx/search2d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace narx::search {
namespace {

void fill_uniform(Eigen::ArrayXd& a, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = dist(rng);
}

void refresh_velocity(VelocityState& velocity, Rng& rng) {
  fill_uniform(velocity.cardinality, rng, 0.0, 1.0);
  fill_uniform(velocity.term, rng, 0.0, 1.0);
}

[[nodiscard]] StructureMask random_position(std::size_t nt, Rng& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  StructureMask mask(nt, 0);
  for (auto& bit : mask) bit = dist(rng) < 0.5 ? 1 : 0;
  return mask;
}

[[nodiscard]] int mask_cardinality(const StructureMask& mask) {
  return static_cast<int>(cardinality(mask));
}

}  // namespace

LearningSet extract_learning_set(const StructureMask& alpha,
                                 const StructureMask& beta) {
  if (alpha.size() != beta.size()) {
    throw std::invalid_argument("extract_learning_set: size mismatch");
  }
  const auto nt = static_cast<Eigen::Index>(alpha.size());
  LearningSet set{Eigen::ArrayXd::Zero(nt), Eigen::ArrayXd::Zero(nt)};

  const std::size_t xi = cardinality(alpha);
  set.cardinality[xi == 0 ? 0 : static_cast<Eigen::Index>(xi) - 1] = 1.0;
  for (Eigen::Index m = 0; m < nt; ++m) {
    if (alpha[static_cast<std::size_t>(m)] && !beta[static_cast<std::size_t>(m)]) {
      set.term[m] = 1.0;
    }
  }
  return set;
}

LearningSet extract_self_learning_set(const StructureMask& beta) {
  const auto nt = static_cast<Eigen::Index>(beta.size());
  LearningSet set{Eigen::ArrayXd::Zero(nt), Eigen::ArrayXd::Zero(nt)};

  const std::size_t xi = cardinality(beta);
  set.cardinality[xi == 0 ? 0 : static_cast<Eigen::Index>(xi) - 1] = 1.0;
  for (Eigen::Index m = 0; m < nt; ++m) {
    set.term[m] = beta[static_cast<std::size_t>(m)] ? 1.0 : 0.0;
  }
  return set;
}

double compute_delta(double j_now, double j_prev,
                     std::span<const double> swarm_fitness) {
  if (swarm_fitness.empty() || !(j_now < j_prev)) return 0.0;
  const auto [lo, hi] =
      std::minmax_element(swarm_fitness.begin(), swarm_fitness.end());
  const double range = *hi - *lo;
  if (!(range > 0.0) || !std::isfinite(range)) return 0.0;
  return (*hi - j_now) / range;
}

void update_velocity(VelocityState& velocity, const LearningSet& pbest,
                     const LearningSet& gbest, const LearningSet& nbest,
                     const LearningSet& self, double unification_factor,
                     double delta, Rng& rng) {
  const Eigen::Index nt = velocity.cardinality.size();
  Eigen::ArrayXd r(nt);
  auto accumulate = [&](Eigen::ArrayXd& row, const Eigen::ArrayXd& p,
                        const Eigen::ArrayXd& g, const Eigen::ArrayXd& n,
                        const Eigen::ArrayXd& s) {
    // Weight matrices are always drawn in full so the RNG stream does not
    // depend on which learning-set bits happen to be set.
    fill_uniform(r, rng, 0.0, 2.0);
    row += r * p;
    fill_uniform(r, rng, 0.0, 2.0);
    row += unification_factor * r * g;
    fill_uniform(r, rng, 0.0, 2.0);
    row += (1.0 - unification_factor) * r * n;
    row += delta * s;
  };
  accumulate(velocity.cardinality, pbest.cardinality, gbest.cardinality,
             nbest.cardinality, self.cardinality);
  accumulate(velocity.term, pbest.term, gbest.term, nbest.term, self.term);
}

std::size_t sample_cardinality(const Eigen::ArrayXd& likelihood, double r) {
  const double total = likelihood.sum();
  if (!(total > 0.0)) {
    throw std::invalid_argument(
        "sample_cardinality: likelihoods must have positive sum");
  }
  const double target = r * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (Eigen::Index m = 0; m < likelihood.size(); ++m) {
    if (likelihood[m] > 0.0) last_positive = static_cast<std::size_t>(m) + 1;
    cumulative += likelihood[m];
    if (cumulative > target) return static_cast<std::size_t>(m) + 1;
  }
  return last_positive;  // r at (or rounding past) the top of the last bin
}

StructureMask select_terms(const Eigen::ArrayXd& likelihood, std::size_t xi) {
  const auto nt = static_cast<std::size_t>(likelihood.size());
  if (xi < 1 || xi > nt) {
    throw std::invalid_argument("select_terms: xi out of range");
  }
  std::vector<int> order(nt);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return likelihood[a] > likelihood[b];
  });
  StructureMask mask(nt, 0);
  for (std::size_t rank = 0; rank < xi; ++rank) {
    mask[static_cast<std::size_t>(order[rank])] = 1;
  }
  return mask;
}

StructureMask update_position(const VelocityState& velocity, Rng& rng) {
  const double r = uniform(rng, 0.0, 1.0);
  const std::size_t xi = sample_cardinality(velocity.cardinality, r);
  return select_terms(velocity.term, xi);
}

RunReport run_search(const EvalEngine& engine, const SwarmConfig& config,
                     std::uint64_t seed) {
  const auto ps = static_cast<std::size_t>(config.swarm_size);
  if (config.swarm_size < 2) {
    throw std::invalid_argument("run_search: swarm_size must be >= 2");
  }
  if (config.unification_factor < 0.0 || config.unification_factor > 1.0) {
    throw std::invalid_argument(
        "run_search: unification_factor must lie in [0, 1]");
  }
  if (config.refresh_gap < 1) {
    throw std::invalid_argument("run_search: refresh_gap must be >= 1");
  }
  if (config.max_fes < ps) {
    throw std::invalid_argument("run_search: max_fes below one sweep");
  }
  const std::size_t nt = engine.model_set().size();
  Rng rng(seed);

  std::vector<StructureMask> positions(ps);
  std::vector<VelocityState> velocities(ps);
  for (std::size_t i = 0; i < ps; ++i) {
    positions[i] = random_position(nt, rng);
    velocities[i] = {Eigen::ArrayXd(static_cast<Eigen::Index>(nt)),
                     Eigen::ArrayXd(static_cast<Eigen::Index>(nt))};
    refresh_velocity(velocities[i], rng);
  }

  std::vector<double> j_cur = engine.evaluate_batch(positions, config.parallel);
  unsigned long long fes = ps;

  std::vector<StructureMask> pbest = positions;
  std::vector<double> pbest_val = j_cur;
  std::vector<int> stall_count(ps, 0);
  std::vector<double> j_prev;

  auto global_best = [&]() -> std::size_t {
    std::size_t best = 0;
    for (std::size_t i = 1; i < ps; ++i) {
      if (pbest_val[i] < pbest_val[best]) best = i;
    }
    return best;
  };
  auto ring_best = [&](std::size_t i) -> std::size_t {
    std::size_t best = i;
    const auto n = static_cast<long>(ps);
    for (int off = -config.neighborhood_radius;
         off <= config.neighborhood_radius; ++off) {
      const long wrapped = ((static_cast<long>(i) + off) % n + n) % n;
      const auto j = static_cast<std::size_t>(wrapped);
      if (pbest_val[j] < pbest_val[best] ||
          (pbest_val[j] == pbest_val[best] && j < best)) {
        best = j;
      }
    }
    return best;
  };

  std::size_t g = global_best();
  RunReport report;
  report.trace.push_back({0, pbest_val[g], mask_cardinality(pbest[g])});

  int iter = 1;
  while (fes + ps <= config.max_fes) {
    for (std::size_t i = 0; i < ps; ++i) {
      if (stall_count[i] >= config.refresh_gap) {
        refresh_velocity(velocities[i], rng);
        stall_count[i] = 0;
      }
      const LearningSet lp = extract_learning_set(pbest[i], positions[i]);
      const LearningSet lg = extract_learning_set(pbest[g], positions[i]);
      const LearningSet ln =
          extract_learning_set(pbest[ring_best(i)], positions[i]);
      const LearningSet ls = extract_self_learning_set(positions[i]);
      const double delta =
          j_prev.empty() ? 0.0 : compute_delta(j_cur[i], j_prev[i], j_cur);
      update_velocity(velocities[i], lp, lg, ln, ls,
                      config.unification_factor, delta, rng);
      positions[i] = update_position(velocities[i], rng);
    }

    j_prev = j_cur;
    j_cur = engine.evaluate_batch(positions, config.parallel);
    fes += ps;

    for (std::size_t i = 0; i < ps; ++i) {
      if (j_cur[i] < pbest_val[i]) {
        pbest_val[i] = j_cur[i];
        pbest[i] = positions[i];
      } else {
        ++stall_count[i];
      }
    }
    g = global_best();
    report.trace.push_back({iter, pbest_val[g], mask_cardinality(pbest[g])});
    ++iter;
  }

  report.seed = seed;
  report.config = {{"algorithm", "2d-upso"},
                   {"swarm_size", config.swarm_size},
                   {"unification_factor", config.unification_factor},
                   {"refresh_gap", config.refresh_gap},
                   {"max_fes", config.max_fes},
                   {"neighborhood_radius", config.neighborhood_radius}};
  report.best_mask = pbest[g];
  report.j = pbest_val[g];
  report.fes_used = fes;

  const FitDetail detail = engine.fit_detail(pbest[g]);
  report.coefficients.assign(detail.theta.data(),
                             detail.theta.data() + detail.theta.size());
  report.nmse = detail.nmse;
  return report;
}

}  // namespace narx::search
