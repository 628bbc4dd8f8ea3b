#include "narx/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "narx/rng.hpp"

namespace narx::baselines {
namespace {

/// Orthogonalised candidates whose remaining energy falls below this
/// fraction of their original energy are numerically spanned by the
/// selection and are skipped.
constexpr double kDeadFraction = 1e-20;

[[nodiscard]] StructureMask random_mask(std::size_t nt, Rng& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  StructureMask mask(nt, 0);
  for (auto& bit : mask) bit = dist(rng) < 0.5 ? 1 : 0;
  return mask;
}

[[nodiscard]] std::size_t argmin(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

void finalize_report(RunReport& report, const EvalEngine& engine) {
  const FitDetail detail = engine.fit_detail(report.best_mask);
  report.coefficients.assign(detail.theta.data(),
                             detail.theta.data() + detail.theta.size());
  report.nmse = detail.nmse;
}

}  // namespace

RunReport run_ga(const EvalEngine& engine, const GaConfig& config,
                 std::uint64_t seed) {
  const auto pop_size = static_cast<std::size_t>(config.population);
  if (config.population < 2) {
    throw std::invalid_argument("run_ga: population must be >= 2");
  }
  if (config.max_fes < pop_size) {
    throw std::invalid_argument("run_ga: max_fes below one generation");
  }
  const std::size_t nt = engine.model_set().size();
  Rng rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, pop_size - 1);

  std::vector<StructureMask> pop(pop_size);
  for (auto& mask : pop) mask = random_mask(nt, rng);
  std::vector<double> fitness = engine.evaluate_batch(pop, config.parallel);
  unsigned long long fes = pop_size;

  std::size_t e = argmin(fitness);
  StructureMask elite = pop[e];
  double elite_j = fitness[e];

  RunReport report;
  report.trace.push_back({0, elite_j, static_cast<int>(cardinality(elite))});

  auto tournament = [&]() -> std::size_t {
    const std::size_t a = pick(rng);
    const std::size_t b = pick(rng);
    return fitness[a] <= fitness[b] ? a : b;
  };

  int iter = 1;
  while (fes + pop_size <= config.max_fes) {
    std::vector<StructureMask> children;
    children.reserve(pop_size);
    while (children.size() < pop_size) {
      StructureMask c1 = pop[tournament()];
      StructureMask c2 = pop[tournament()];
      if (coin(rng) < config.p_crossover) {
        for (std::size_t b = 0; b < nt; ++b) {
          if (coin(rng) < 0.5) std::swap(c1[b], c2[b]);
        }
      }
      for (auto& bit : c1) {
        if (coin(rng) < config.p_mutation) bit ^= 1;
      }
      for (auto& bit : c2) {
        if (coin(rng) < config.p_mutation) bit ^= 1;
      }
      children.push_back(std::move(c1));
      if (children.size() < pop_size) children.push_back(std::move(c2));
    }

    std::vector<double> child_fitness =
        engine.evaluate_batch(children, config.parallel);
    fes += pop_size;

    // Elitism of one: the previous best replaces the worst child, keeping its
    // cached fitness.
    std::size_t worst = 0;
    for (std::size_t i = 1; i < pop_size; ++i) {
      if (child_fitness[i] > child_fitness[worst]) worst = i;
    }
    children[worst] = elite;
    child_fitness[worst] = elite_j;

    pop = std::move(children);
    fitness = std::move(child_fitness);
    e = argmin(fitness);
    if (fitness[e] < elite_j) {
      elite = pop[e];
      elite_j = fitness[e];
    }
    report.trace.push_back({iter, elite_j, static_cast<int>(cardinality(elite))});
    ++iter;
  }

  report.seed = seed;
  report.config = {{"algorithm", "ga"},
                   {"population", config.population},
                   {"p_crossover", config.p_crossover},
                   {"p_mutation", config.p_mutation},
                   {"max_fes", config.max_fes}};
  report.best_mask = elite;
  report.j = elite_j;
  report.fes_used = fes;
  finalize_report(report, engine);
  return report;
}

RunReport run_bpso(const EvalEngine& engine, const BpsoConfig& config,
                   std::uint64_t seed) {
  const auto ps = static_cast<std::size_t>(config.swarm_size);
  if (config.swarm_size < 2) {
    throw std::invalid_argument("run_bpso: swarm_size must be >= 2");
  }
  if (config.v_min >= config.v_max) {
    throw std::invalid_argument("run_bpso: v_min must be below v_max");
  }
  if (config.max_fes < ps) {
    throw std::invalid_argument("run_bpso: max_fes below one sweep");
  }
  const std::size_t nt = engine.model_set().size();
  Rng rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> v_init(config.v_min, config.v_max);

  std::vector<StructureMask> x(ps);
  std::vector<std::vector<double>> v(ps, std::vector<double>(nt));
  for (std::size_t i = 0; i < ps; ++i) {
    x[i] = random_mask(nt, rng);
    for (auto& vb : v[i]) vb = v_init(rng);
  }
  std::vector<double> fitness = engine.evaluate_batch(x, config.parallel);
  unsigned long long fes = ps;

  std::vector<StructureMask> pbest = x;
  std::vector<double> pbest_val = fitness;
  std::size_t g = argmin(pbest_val);

  RunReport report;
  report.trace.push_back(
      {0, pbest_val[g], static_cast<int>(cardinality(pbest[g]))});

  int iter = 1;
  while (fes + ps <= config.max_fes) {
    for (std::size_t i = 0; i < ps; ++i) {
      for (std::size_t b = 0; b < nt; ++b) {
        const double r1 = coin(rng);
        const double r2 = coin(rng);
        double vb = config.omega * v[i][b] +
                    config.c1 * r1 * (pbest[i][b] - x[i][b]) +
                    config.c2 * r2 * (pbest[g][b] - x[i][b]);
        vb = std::clamp(vb, config.v_min, config.v_max);
        v[i][b] = vb;
        const double sigmoid = 1.0 / (1.0 + std::exp(-vb));
        x[i][b] = coin(rng) < sigmoid ? 1 : 0;
      }
    }
    fitness = engine.evaluate_batch(x, config.parallel);
    fes += ps;
    for (std::size_t i = 0; i < ps; ++i) {
      if (fitness[i] < pbest_val[i]) {
        pbest_val[i] = fitness[i];
        pbest[i] = x[i];
      }
    }
    g = argmin(pbest_val);
    report.trace.push_back(
        {iter, pbest_val[g], static_cast<int>(cardinality(pbest[g]))});
    ++iter;
  }

  report.seed = seed;
  report.config = {{"algorithm", "bpso"},
                   {"swarm_size", config.swarm_size},
                   {"omega", config.omega},
                   {"c1", config.c1},
                   {"c2", config.c2},
                   {"v_min", config.v_min},
                   {"v_max", config.v_max},
                   {"max_fes", config.max_fes}};
  report.best_mask = pbest[g];
  report.j = pbest_val[g];
  report.fes_used = fes;
  finalize_report(report, engine);
  return report;
}

RunReport run_ofr_err(const ModelSet& model_set, const Dataset& data,
                      const OfrConfig& config) {
  if (!(config.sigma > 0.0) || config.sigma >= 1.0) {
    throw std::invalid_argument("run_ofr_err: sigma must lie in (0, 1)");
  }
  if (config.max_terms < 1) {
    throw std::invalid_argument("run_ofr_err: max_terms must be >= 1");
  }
  RegressorData reg = build_regressors(model_set, data);
  const auto nt = static_cast<std::size_t>(reg.x.cols());
  const double sum_y2 = reg.y.squaredNorm();
  if (!(sum_y2 > 0.0)) {
    throw std::invalid_argument("run_ofr_err: estimation output has no energy");
  }

  Eigen::MatrixXd w = reg.x;  // residualised in place as terms are picked
  std::vector<double> energy0(nt);
  for (std::size_t m = 0; m < nt; ++m) energy0[m] = w.col(m).squaredNorm();

  std::vector<char> used(nt, 0);   // selected or numerically dead
  std::vector<double> err(nt);
  RunReport report;
  std::vector<int> selected;
  double cumulative = 0.0;

  while (static_cast<int>(selected.size()) < config.max_terms &&
         1.0 - cumulative >= config.sigma) {
    const auto count = static_cast<std::int64_t>(nt);
#pragma omp parallel for schedule(static) if (config.parallel)
    for (std::int64_t m = 0; m < count; ++m) {
      const auto mm = static_cast<std::size_t>(m);
      if (used[mm]) {
        err[mm] = -1.0;
        continue;
      }
      const double wtw = w.col(m).squaredNorm();
      if (!(wtw > kDeadFraction * energy0[mm])) {
        err[mm] = -1.0;
        continue;
      }
      const double wty = w.col(m).dot(reg.y);
      err[mm] = wty * wty / (wtw * sum_y2);
    }

    std::size_t best = nt;
    for (std::size_t m = 0; m < nt; ++m) {
      if (err[m] >= 0.0 && (best == nt || err[m] > err[best])) best = m;
    }
    if (best == nt) break;  // no viable candidate left

    used[best] = 1;
    selected.push_back(static_cast<int>(best));
    cumulative += err[best];
    report.err_sequence.push_back(
        {static_cast<double>(best), err[best], cumulative});

    const Eigen::VectorXd w_best = w.col(static_cast<Eigen::Index>(best));
    const double w_best_energy = w_best.squaredNorm();
#pragma omp parallel for schedule(static) if (config.parallel)
    for (std::int64_t m = 0; m < count; ++m) {
      const auto mm = static_cast<std::size_t>(m);
      if (used[mm]) continue;
      const double projection = w.col(m).dot(w_best) / w_best_energy;
      w.col(m) -= projection * w_best;
    }
  }

  StructureMask mask(nt, 0);
  for (int m : selected) mask[static_cast<std::size_t>(m)] = 1;

  report.seed = 0;
  report.config = {{"algorithm", "ofr-err"},
                   {"sigma", config.sigma},
                   {"max_terms", config.max_terms}};
  report.best_mask = mask;
  report.fes_used = 0;

  const EvalEngine engine(model_set, data);
  const FitDetail detail = engine.fit_detail(mask);
  report.coefficients.assign(detail.theta.data(),
                             detail.theta.data() + detail.theta.size());
  report.j = detail.j;
  report.nmse = detail.nmse;
  report.trace.push_back({0, report.j, static_cast<int>(selected.size())});
  return report;
}

}  // namespace narx::baselines
