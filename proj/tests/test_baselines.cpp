#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <narx/baselines.hpp>
#include <narx/dataset.hpp>
#include <narx/fit.hpp>
#include <narx/report.hpp>
#include <narx/rng.hpp>
#include <narx/systems.hpp>
#include <narx/term.hpp>

using narx::Dataset;
using narx::EvalEngine;
using narx::ModelSet;
using narx::RunReport;
using narx::StructureMask;
using narx::baselines::BpsoConfig;
using narx::baselines::GaConfig;
using narx::baselines::OfrConfig;

namespace {

// Same three-term toy as the swarm tests: y(k) = 0.5 y(k-1) + 0.3 u(k-1)
// with mild noise over the dictionary [1, y(k-1), u(k-1)].
Dataset toy_data() {
  narx::systems::SystemSpec spec;
  spec.id = "toy";
  spec.true_terms = {narx::TermSpec{{1}, {}}, narx::TermSpec{{}, {1}}};
  spec.coefficients = {0.5, 0.3};
  spec.input = narx::systems::SignalSpec::wun(-1.0, 1.0);
  spec.noise = narx::systems::SignalSpec::wgn(0.0, 1e-4);
  return narx::systems::simulate_system(spec, 200, 8, 140);
}

struct MirrorRun {
  StructureMask best_mask;
  double j = 0.0;
  unsigned long long fes_used = 0;
  std::vector<narx::TracePoint> trace;
};

// Independent replay of the generational GA, consuming randomness in the
// same order the library commits to: initial masks bit by bit, two
// tournament picks per parent, one gate coin per pair, one swap coin per
// bit when the gate opens, then mutation coins for both children -- the
// spare child included when an odd population leaves no room for it.  Any
// reordering of draws would silently change every seeded run, so this
// mirror locks the replay contract rather than just the final answer.
MirrorRun reference_ga(const EvalEngine& engine, std::size_t ps,
                       double p_crossover, double p_mutation,
                       unsigned long long max_fes, std::uint64_t seed) {
  const std::size_t nt = engine.model_set().size();
  narx::Rng rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, ps - 1);

  std::vector<StructureMask> pop(ps, StructureMask(nt, 0));
  for (auto& mask : pop) {
    for (auto& bit : mask) bit = coin(rng) < 0.5 ? 1 : 0;
  }
  std::vector<double> fitness(ps);
  for (std::size_t i = 0; i < ps; ++i) fitness[i] = engine.evaluate(pop[i]);
  unsigned long long fes = ps;

  const auto argmin = [](const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] < v[best]) best = i;
    }
    return best;
  };

  std::size_t e = argmin(fitness);
  StructureMask elite = pop[e];
  double elite_j = fitness[e];

  MirrorRun out;
  out.trace.push_back({0, elite_j, static_cast<int>(narx::cardinality(elite))});

  int iter = 1;
  while (fes + ps <= max_fes) {
    const auto tournament = [&]() {
      const std::size_t a = pick(rng);
      const std::size_t b = pick(rng);
      return fitness[a] <= fitness[b] ? a : b;
    };
    std::vector<StructureMask> kids;
    kids.reserve(ps);
    while (kids.size() < ps) {
      StructureMask c1 = pop[tournament()];
      StructureMask c2 = pop[tournament()];
      if (coin(rng) < p_crossover) {
        for (std::size_t b = 0; b < nt; ++b) {
          if (coin(rng) < 0.5) std::swap(c1[b], c2[b]);
        }
      }
      for (auto& bit : c1) {
        if (coin(rng) < p_mutation) bit ^= 1;
      }
      for (auto& bit : c2) {
        if (coin(rng) < p_mutation) bit ^= 1;
      }
      kids.push_back(std::move(c1));
      if (kids.size() < ps) kids.push_back(std::move(c2));
    }
    std::vector<double> kid_fitness(ps);
    for (std::size_t i = 0; i < ps; ++i) kid_fitness[i] = engine.evaluate(kids[i]);
    fes += ps;

    std::size_t worst = 0;
    for (std::size_t i = 1; i < ps; ++i) {
      if (kid_fitness[i] > kid_fitness[worst]) worst = i;
    }
    kids[worst] = elite;
    kid_fitness[worst] = elite_j;

    pop = std::move(kids);
    fitness = std::move(kid_fitness);
    e = argmin(fitness);
    if (fitness[e] < elite_j) {
      elite = pop[e];
      elite_j = fitness[e];
    }
    out.trace.push_back(
        {iter, elite_j, static_cast<int>(narx::cardinality(elite))});
    ++iter;
  }

  out.best_mask = elite;
  out.j = elite_j;
  out.fes_used = fes;
  return out;
}

// Mirror of the binary PSO draw order: per particle the initial mask bits
// then the initial velocities, and per bit of every sweep r1, r2, and the
// resample coin.  Also counts how often the velocity clamp engages so the
// fixture provably exercises that path.
MirrorRun reference_bpso(const EvalEngine& engine, std::size_t ps,
                         const BpsoConfig& cfg, std::uint64_t seed,
                         int* clamp_events) {
  const std::size_t nt = engine.model_set().size();
  narx::Rng rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> v_init(cfg.v_min, cfg.v_max);

  std::vector<StructureMask> x(ps, StructureMask(nt, 0));
  std::vector<std::vector<double>> v(ps, std::vector<double>(nt));
  for (std::size_t i = 0; i < ps; ++i) {
    for (auto& bit : x[i]) bit = coin(rng) < 0.5 ? 1 : 0;
    for (auto& vb : v[i]) vb = v_init(rng);
  }
  std::vector<double> fitness(ps);
  for (std::size_t i = 0; i < ps; ++i) fitness[i] = engine.evaluate(x[i]);
  unsigned long long fes = ps;

  const auto argmin = [](const std::vector<double>& vals) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < vals.size(); ++i) {
      if (vals[i] < vals[best]) best = i;
    }
    return best;
  };

  std::vector<StructureMask> pbest = x;
  std::vector<double> pbest_val = fitness;
  std::size_t g = argmin(pbest_val);

  MirrorRun out;
  out.trace.push_back(
      {0, pbest_val[g], static_cast<int>(narx::cardinality(pbest[g]))});

  int iter = 1;
  while (fes + ps <= cfg.max_fes) {
    for (std::size_t i = 0; i < ps; ++i) {
      for (std::size_t b = 0; b < nt; ++b) {
        const double r1 = coin(rng);
        const double r2 = coin(rng);
        double vb = cfg.omega * v[i][b] +
                    cfg.c1 * r1 * (pbest[i][b] - x[i][b]) +
                    cfg.c2 * r2 * (pbest[g][b] - x[i][b]);
        if (clamp_events != nullptr && (vb < cfg.v_min || vb > cfg.v_max)) {
          ++*clamp_events;
        }
        vb = std::clamp(vb, cfg.v_min, cfg.v_max);
        v[i][b] = vb;
        const double sigmoid = 1.0 / (1.0 + std::exp(-vb));
        x[i][b] = coin(rng) < sigmoid ? 1 : 0;
      }
    }
    for (std::size_t i = 0; i < ps; ++i) fitness[i] = engine.evaluate(x[i]);
    fes += ps;
    for (std::size_t i = 0; i < ps; ++i) {
      if (fitness[i] < pbest_val[i]) {
        pbest_val[i] = fitness[i];
        pbest[i] = x[i];
      }
    }
    g = argmin(pbest_val);
    out.trace.push_back(
        {iter, pbest_val[g], static_cast<int>(narx::cardinality(pbest[g]))});
    ++iter;
  }

  out.best_mask = pbest[g];
  out.j = pbest_val[g];
  out.fes_used = fes;
  return out;
}

void check_matches_mirror(const RunReport& report, const MirrorRun& mirror) {
  CHECK(report.best_mask == mirror.best_mask);
  CHECK(report.j == mirror.j);
  CHECK(report.fes_used == mirror.fes_used);
  REQUIRE(report.trace.size() == mirror.trace.size());
  for (std::size_t i = 0; i < mirror.trace.size(); ++i) {
    CHECK(report.trace[i].iter == mirror.trace[i].iter);
    CHECK(report.trace[i].j == mirror.trace[i].j);
    CHECK(report.trace[i].xi == mirror.trace[i].xi);
  }
}

// From-scratch orthogonal forward regression: every round rebuilds each
// candidate's residual from the original column by projecting against the
// selected basis, instead of residualising in place.  Same mathematics
// through a different arithmetic path, so agreement is a real check.
std::vector<std::array<double, 3>> reference_ofr(const Eigen::MatrixXd& x,
                                                 const Eigen::VectorXd& y,
                                                 double sigma, int max_terms) {
  const Eigen::Index nt = x.cols();
  const double sum_y2 = y.squaredNorm();
  std::vector<char> used(static_cast<std::size_t>(nt), 0);
  std::vector<Eigen::VectorXd> basis;
  std::vector<std::array<double, 3>> rows;
  double cumulative = 0.0;

  while (static_cast<int>(rows.size()) < max_terms &&
         1.0 - cumulative >= sigma) {
    Eigen::Index best = -1;
    double best_err = -1.0;
    Eigen::VectorXd best_w;
    for (Eigen::Index m = 0; m < nt; ++m) {
      if (used[static_cast<std::size_t>(m)]) continue;
      Eigen::VectorXd w = x.col(m);
      for (const Eigen::VectorXd& b : basis) {
        w -= (w.dot(b) / b.squaredNorm()) * b;
      }
      if (!(w.squaredNorm() > 1e-20 * x.col(m).squaredNorm())) continue;
      const double wty = w.dot(y);
      const double err = wty * wty / (w.squaredNorm() * sum_y2);
      if (err > best_err) {
        best_err = err;
        best = m;
        best_w = w;
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = 1;
    cumulative += best_err;
    rows.push_back({static_cast<double>(best), best_err, cumulative});
    basis.push_back(best_w);
  }
  return rows;
}

}  // namespace

TEST_CASE("GA and BPSO solve the three-term toy exactly for every seed") {
  const Dataset data = toy_data();
  const EvalEngine engine(narx::generate_model_set(1, 1, 1), data);

  StructureMask best_mask;
  double best_j = narx::kWorstJ;
  for (unsigned bits = 1; bits < 8; ++bits) {
    const StructureMask mask = {static_cast<std::uint8_t>(bits & 1u),
                                static_cast<std::uint8_t>((bits >> 1) & 1u),
                                static_cast<std::uint8_t>((bits >> 2) & 1u)};
    const double j = engine.evaluate(mask);
    if (j < best_j) {
      best_j = j;
      best_mask = mask;
    }
  }
  REQUIRE(best_mask == StructureMask{0, 1, 1});

  GaConfig ga;
  ga.population = 6;
  ga.max_fes = 120;
  BpsoConfig bpso;
  bpso.swarm_size = 6;
  bpso.max_fes = 120;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CAPTURE(seed);
    const RunReport rg = narx::baselines::run_ga(engine, ga, seed);
    CHECK(rg.best_mask == best_mask);
    CHECK(rg.j == best_j);
    const RunReport rb = narx::baselines::run_bpso(engine, bpso, seed);
    CHECK(rb.best_mask == best_mask);
    CHECK(rb.j == best_j);
  }
}

TEST_CASE("run_ga replays its seeded draw order bit for bit") {
  const Dataset data = toy_data();
  const EvalEngine engine(narx::generate_model_set(1, 1, 1), data);

  GaConfig cfg;
  cfg.population = 5;  // odd: the discarded spare child still consumes draws
  cfg.max_fes = 40;

  const RunReport a = narx::baselines::run_ga(engine, cfg, 3);
  check_matches_mirror(
      a, reference_ga(engine, 5, cfg.p_crossover, cfg.p_mutation, 40, 3));
  CHECK(a.fes_used == 40);  // init plus seven generations of five

  cfg.parallel = false;  // scoring mode must not touch the stream
  const RunReport b = narx::baselines::run_ga(engine, cfg, 11);
  check_matches_mirror(
      b, reference_ga(engine, 5, cfg.p_crossover, cfg.p_mutation, 40, 11));
}

TEST_CASE("run_bpso replays its seeded draw order bit for bit") {
  const Dataset data = toy_data();
  const EvalEngine engine(narx::generate_model_set(1, 1, 1), data);

  BpsoConfig cfg;
  cfg.swarm_size = 5;
  cfg.max_fes = 40;

  int clamps = 0;
  const RunReport a = narx::baselines::run_bpso(engine, cfg, 3);
  check_matches_mirror(a, reference_bpso(engine, 5, cfg, 3, &clamps));

  cfg.parallel = false;  // scoring mode must not touch the stream
  const RunReport b = narx::baselines::run_bpso(engine, cfg, 11);
  check_matches_mirror(b, reference_bpso(engine, 5, cfg, 11, &clamps));

  // With omega = 1 and c1 = c2 = 2 the velocities saturate, so across the
  // two seeds the fixtures genuinely exercise the clamp.
  CHECK(clamps > 0);
}

TEST_CASE("run_ga budget accounting, trace shape, and determinism") {
  const auto& spec = narx::systems::benchmark_system("S1");
  const Dataset data = narx::systems::simulate_system(spec, 300, 2, 200);
  const EvalEngine engine(narx::generate_model_set(1, 1, 2), data);

  GaConfig cfg;
  cfg.population = 10;
  cfg.max_fes = 95;  // init + 8 full generations fit, a ninth does not
  const unsigned long long before = engine.eval_count();
  const RunReport report = narx::baselines::run_ga(engine, cfg, 7);
  CHECK(report.fes_used == 90);
  CHECK(engine.eval_count() - before == 90);
  REQUIRE(report.trace.size() == 9);
  CHECK(report.trace.front().iter == 0);
  CHECK(report.trace.back().iter == 8);
  for (std::size_t i = 1; i < report.trace.size(); ++i) {
    CHECK(report.trace[i].j <= report.trace[i - 1].j);  // elitism of one
  }
  CHECK(report.trace.back().j == report.j);
  CHECK(static_cast<std::size_t>(report.trace.back().xi) ==
        narx::cardinality(report.best_mask));
  CHECK(report.seed == 7);
  CHECK(report.coefficients.size() == narx::cardinality(report.best_mask));
  CHECK(report.j == engine.fit_detail(report.best_mask).j);
  CHECK(report.config.at("algorithm").get<std::string>() == "ga");
  CHECK(report.config.at("population").get<int>() == 10);
  CHECK(report.config.at("max_fes").get<unsigned long long>() == 95);

  // A budget of exactly one population is spent on initialisation alone.
  GaConfig tiny = cfg;
  tiny.max_fes = 10;
  const RunReport init_only = narx::baselines::run_ga(engine, tiny, 7);
  CHECK(init_only.fes_used == 10);
  CHECK(init_only.trace.size() == 1);

  const RunReport again = narx::baselines::run_ga(engine, cfg, 7);
  CHECK(again.best_mask == report.best_mask);
  CHECK(again.j == report.j);
  CHECK(again.coefficients == report.coefficients);
  const RunReport other = narx::baselines::run_ga(engine, cfg, 8);
  CHECK((other.best_mask != report.best_mask || other.j != report.j ||
         other.trace[0].j != report.trace[0].j));
}

TEST_CASE("run_bpso budget accounting, trace shape, and determinism") {
  const auto& spec = narx::systems::benchmark_system("S1");
  const Dataset data = narx::systems::simulate_system(spec, 300, 2, 200);
  const EvalEngine engine(narx::generate_model_set(1, 1, 2), data);

  BpsoConfig cfg;
  cfg.swarm_size = 10;
  cfg.max_fes = 95;
  const unsigned long long before = engine.eval_count();
  const RunReport report = narx::baselines::run_bpso(engine, cfg, 7);
  CHECK(report.fes_used == 90);
  CHECK(engine.eval_count() - before == 90);
  REQUIRE(report.trace.size() == 9);
  CHECK(report.trace.front().iter == 0);
  CHECK(report.trace.back().iter == 8);
  for (std::size_t i = 1; i < report.trace.size(); ++i) {
    CHECK(report.trace[i].j <= report.trace[i - 1].j);  // global pbest curve
  }
  CHECK(report.trace.back().j == report.j);
  CHECK(static_cast<std::size_t>(report.trace.back().xi) ==
        narx::cardinality(report.best_mask));
  CHECK(report.seed == 7);
  CHECK(report.coefficients.size() == narx::cardinality(report.best_mask));
  CHECK(report.j == engine.fit_detail(report.best_mask).j);
  CHECK(report.config.at("algorithm").get<std::string>() == "bpso");
  CHECK(report.config.at("v_min").get<double>() == -6.0);
  CHECK(report.config.at("v_max").get<double>() == 6.0);

  BpsoConfig tiny = cfg;
  tiny.max_fes = 10;
  const RunReport init_only = narx::baselines::run_bpso(engine, tiny, 7);
  CHECK(init_only.fes_used == 10);
  CHECK(init_only.trace.size() == 1);

  const RunReport again = narx::baselines::run_bpso(engine, cfg, 7);
  CHECK(again.best_mask == report.best_mask);
  CHECK(again.j == report.j);
  const RunReport other = narx::baselines::run_bpso(engine, cfg, 8);
  CHECK((other.best_mask != report.best_mask || other.j != report.j ||
         other.trace[0].j != report.trace[0].j));
}

TEST_CASE("baseline searches reject invalid configurations") {
  const Dataset data = toy_data();
  const EvalEngine engine(narx::generate_model_set(1, 1, 1), data);
  const ModelSet ms = narx::generate_model_set(1, 1, 1);

  GaConfig ga;
  ga.population = 1;
  CHECK_THROWS_AS((void)narx::baselines::run_ga(engine, ga, 1),
                  std::invalid_argument);
  ga = {};
  ga.population = 10;
  ga.max_fes = 9;
  CHECK_THROWS_AS((void)narx::baselines::run_ga(engine, ga, 1),
                  std::invalid_argument);

  BpsoConfig bpso;
  bpso.swarm_size = 1;
  CHECK_THROWS_AS((void)narx::baselines::run_bpso(engine, bpso, 1),
                  std::invalid_argument);
  bpso = {};
  bpso.v_min = 0.0;
  bpso.v_max = 0.0;
  CHECK_THROWS_AS((void)narx::baselines::run_bpso(engine, bpso, 1),
                  std::invalid_argument);
  bpso = {};
  bpso.v_min = 1.0;
  bpso.v_max = -1.0;
  CHECK_THROWS_AS((void)narx::baselines::run_bpso(engine, bpso, 1),
                  std::invalid_argument);
  bpso = {};
  bpso.swarm_size = 10;
  bpso.max_fes = 9;
  CHECK_THROWS_AS((void)narx::baselines::run_bpso(engine, bpso, 1),
                  std::invalid_argument);

  OfrConfig ofr;
  ofr.sigma = 0.0;
  CHECK_THROWS_AS((void)narx::baselines::run_ofr_err(ms, data, ofr),
                  std::invalid_argument);
  ofr = {};
  ofr.sigma = 1.0;
  CHECK_THROWS_AS((void)narx::baselines::run_ofr_err(ms, data, ofr),
                  std::invalid_argument);
  ofr = {};
  ofr.sigma = -0.5;
  CHECK_THROWS_AS((void)narx::baselines::run_ofr_err(ms, data, ofr),
                  std::invalid_argument);
  ofr = {};
  ofr.max_terms = 0;
  CHECK_THROWS_AS((void)narx::baselines::run_ofr_err(ms, data, ofr),
                  std::invalid_argument);

  // An all-zero estimation output has no energy to normalise by.
  Dataset flat;
  flat.u.resize(50);
  flat.y.assign(50, 0.0);
  flat.n_est = 40;
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (auto& uk : flat.u) uk = unif(gen);
  CHECK_THROWS_AS((void)narx::baselines::run_ofr_err(ms, flat, OfrConfig{}),
                  std::invalid_argument);
}

TEST_CASE("OFR resolves an exactly alternating system in closed form") {
  // u alternates +1/-1 and y(k) = u(k-1) = -u(k): over the dictionary
  // [1, y(k-1), y(k-2), u(k-1), u(k-2)] every lagged column is exactly
  // +/- the target, so all four candidates tie at ERR = 1 in exact integer
  // arithmetic and the scan must keep the lowest index, y(k-1).
  const std::size_t n = 60;
  Dataset data;
  data.u.resize(n);
  data.y.resize(n);
  data.n_est = 50;
  for (std::size_t k = 0; k < n; ++k) {
    data.u[k] = (k % 2 == 0) ? 1.0 : -1.0;
    data.y[k] = -data.u[k];
  }
  const ModelSet ms = narx::generate_model_set(2, 2, 1);

  const RunReport report = narx::baselines::run_ofr_err(ms, data, OfrConfig{});
  REQUIRE(report.err_sequence.size() == 1);
  CHECK(report.err_sequence[0][0] == 1.0);  // term index y(k-1)
  CHECK(report.err_sequence[0][1] == 1.0);  // ERR is an exact integer ratio
  CHECK(report.err_sequence[0][2] == 1.0);
  CHECK(report.best_mask == StructureMask{0, 1, 0, 0, 0});
  REQUIRE(report.coefficients.size() == 1);
  CHECK(report.coefficients[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(report.nmse < 1e-18);
  CHECK(report.j < -500.0);

  REQUIRE(report.trace.size() == 1);
  CHECK(report.trace[0].iter == 0);
  CHECK(report.trace[0].j == report.j);
  CHECK(report.trace[0].xi == 1);
  CHECK(report.fes_used == 0);
  CHECK(report.seed == 0);
  CHECK(report.config.at("algorithm").get<std::string>() == "ofr-err");
}

TEST_CASE("OFR skips spanned candidates and stops when none remain viable") {
  // y(k) = u(k-1) + noise with a period-two input, over a hand-built
  // dictionary [1, u(k-1), u(k-2)].  The two input columns are exact
  // negatives, so once u(k-1) is taken, u(k-2) is numerically dead and must
  // never be selected; after the constant mops up its crumb of energy the
  // scan finds nothing viable and stops short of both sigma and max_terms.
  const std::size_t n = 60;
  Dataset data;
  data.u.resize(n);
  data.y.resize(n);
  data.n_est = 50;
  std::mt19937_64 gen(99);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (std::size_t k = 0; k < n; ++k) {
    data.u[k] = (k % 2 == 0) ? 1.0 : -1.0;
    data.y[k] = -data.u[k] + noise(gen);
  }
  ModelSet ms;
  ms.n_u = 2;
  ms.n_y = 1;
  ms.n_l = 1;
  ms.terms = {narx::TermSpec{{}, {}}, narx::TermSpec{{}, {1}},
              narx::TermSpec{{}, {2}}};

  OfrConfig cfg;
  cfg.sigma = 1e-12;
  cfg.max_terms = 10;
  const RunReport report = narx::baselines::run_ofr_err(ms, data, cfg);

  REQUIRE(report.err_sequence.size() == 2);
  CHECK(report.err_sequence[0][0] == 1.0);  // u(k-1): ties on the exact
  CHECK(report.err_sequence[0][1] > 0.99);  // negative resolve to the left
  CHECK(report.err_sequence[1][0] == 0.0);  // then the constant
  CHECK(report.best_mask == StructureMask{1, 1, 0});
  CHECK(report.err_sequence[1][2] < 1.0 - cfg.sigma);  // stopped by viability
  REQUIRE(report.coefficients.size() == 2);
  CHECK(std::abs(report.coefficients[0]) < 0.01);
  CHECK(report.coefficients[1] == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("OFR orders correlated terms by ERR and refits in the raw basis") {
  // y(k) = 2 u(k-1) + 3 u(k-2) with an AR(1) input (rho = 0.6).  In closed
  // form ERR picks u(k-2) first (0.873) and u(k-1) second (0.127), while the
  // lagged output scores only 0.624.  The reported coefficients must come
  // from a least-squares refit of the selected terms in the original basis:
  // the greedy orthogonal-stage weight on u(k-2) would be 4.2, not 3.
  const std::size_t n = 400;
  Dataset data;
  data.u.resize(n);
  data.y.assign(n, 0.0);
  data.n_est = 300;
  std::mt19937_64 gen(42);
  std::normal_distribution<double> white(0.0, 1.0);
  data.u[0] = white(gen);
  for (std::size_t k = 1; k < n; ++k) data.u[k] = 0.6 * data.u[k - 1] + white(gen);
  for (std::size_t k = 2; k < n; ++k) {
    data.y[k] = 2.0 * data.u[k - 1] + 3.0 * data.u[k - 2];
  }
  const ModelSet ms = narx::generate_model_set(2, 1, 1);  // [1, y1, u1, u2]
  const auto u1 = static_cast<double>(narx::find_term(ms, narx::TermSpec{{}, {1}}));
  const auto u2 = static_cast<double>(narx::find_term(ms, narx::TermSpec{{}, {2}}));

  const RunReport report = narx::baselines::run_ofr_err(ms, data, OfrConfig{});
  REQUIRE(report.err_sequence.size() == 2);
  CHECK(report.err_sequence[0][0] == u2);
  CHECK(report.err_sequence[0][1] == doctest::Approx(0.873).epsilon(0.15));
  CHECK(report.err_sequence[1][0] == u1);
  CHECK(report.err_sequence[1][1] == doctest::Approx(0.127).epsilon(0.30));
  CHECK(report.err_sequence[1][2] > 1.0 - 1e-9);
  CHECK(report.err_sequence[1][2] < 1.0 + 1e-9);

  CHECK(narx::cardinality(report.best_mask) == 2);
  REQUIRE(report.coefficients.size() == 2);  // mask order: u1 before u2
  CHECK(report.coefficients[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(report.coefficients[1] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(report.nmse < 1e-18);
}

TEST_CASE("OFR agrees with a from-scratch Gram-Schmidt reference") {
  const auto& spec = narx::systems::benchmark_system("S1");
  const Dataset data = narx::systems::simulate_system(spec, 1000, 11, 700);
  const ModelSet ms = narx::generate_model_set(2, 2, 2);

  OfrConfig cfg;
  cfg.sigma = 1e-3;
  cfg.max_terms = 4;  // hits the max_terms stop with distinct ERR gaps
  const RunReport report = narx::baselines::run_ofr_err(ms, data, cfg);

  const narx::RegressorData reg = narx::build_regressors(ms, data);
  const auto expected = reference_ofr(reg.x, reg.y, cfg.sigma, cfg.max_terms);

  REQUIRE(report.err_sequence.size() == expected.size());
  REQUIRE(report.err_sequence.size() == 4);
  std::set<double> seen;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CAPTURE(i);
    CHECK(report.err_sequence[i][0] == expected[i][0]);
    CHECK(report.err_sequence[i][1] ==
          doctest::Approx(expected[i][1]).epsilon(1e-8));
    CHECK(report.err_sequence[i][2] ==
          doctest::Approx(expected[i][2]).epsilon(1e-8));
    CHECK(report.err_sequence[i][1] > 0.0);
    CHECK(report.err_sequence[i][1] <= 1.0 + 1e-12);
    if (i > 0) {
      CHECK(report.err_sequence[i][2] >= report.err_sequence[i - 1][2]);
    }
    seen.insert(report.err_sequence[i][0]);
    CHECK(report.best_mask[static_cast<std::size_t>(
              report.err_sequence[i][0])] == 1);
  }
  CHECK(seen.size() == 4);  // no term selected twice
  CHECK(narx::cardinality(report.best_mask) == 4);
  CHECK(report.err_sequence.back()[2] <= 1.0 + 1e-9);

  // Deterministic: a second run reproduces every row bit for bit.
  const RunReport again = narx::baselines::run_ofr_err(ms, data, cfg);
  CHECK(again.best_mask == report.best_mask);
  CHECK(again.err_sequence == report.err_sequence);
  CHECK(again.j == report.j);

  // The serial scoring path produces the same selection.
  OfrConfig serial = cfg;
  serial.parallel = false;
  const RunReport ser = narx::baselines::run_ofr_err(ms, data, serial);
  CHECK(ser.best_mask == report.best_mask);
  CHECK(ser.err_sequence == report.err_sequence);
}
