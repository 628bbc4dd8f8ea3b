// bench_eval — times batch structure evaluation with the OpenMP path against
// the serial reference and checks that both produce identical criteria.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <narx/fit.hpp>
#include <narx/rng.hpp>
#include <narx/systems.hpp>
#include <narx/term.hpp>

namespace {

double time_batch(const narx::EvalEngine& engine,
                  const std::vector<narx::StructureMask>& masks, bool parallel,
                  int reps, std::vector<double>& out) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    out = engine.evaluate_batch(masks, parallel);
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs OpenMP batch-evaluation benchmark"};
  std::string system = "S1";
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  int batch = 256;
  int reps = 3;
  int n_u = 4, n_y = 4, n_l = 3;
  app.add_option("--system", system, "Benchmark system (S1..S6)");
  app.add_option("--n", n, "Dataset length");
  app.add_option("--seed", seed, "Dataset and mask seed");
  app.add_option("--batch", batch, "Masks per batch")->check(CLI::PositiveNumber);
  app.add_option("--reps", reps, "Repetitions (best time kept)")
      ->check(CLI::PositiveNumber);
  app.add_option("--nu", n_u, "Input lag count");
  app.add_option("--ny", n_y, "Output lag count");
  app.add_option("--nl", n_l, "Polynomial degree");
  CLI11_PARSE(app, argc, argv);

  try {
    const narx::ModelSet model_set = narx::generate_model_set(n_u, n_y, n_l);
    const narx::Dataset data = narx::systems::simulate_system(
        narx::systems::benchmark_system(system), n, seed, n * 7 / 10);
    const narx::EvalEngine engine(model_set, data);

    // Random masks with cardinalities spread over a realistic search range.
    narx::Rng rng(narx::run_seed(seed, 1));
    std::uniform_int_distribution<std::size_t> pick(0, model_set.size() - 1);
    std::uniform_int_distribution<std::size_t> card(1, 12);
    std::vector<narx::StructureMask> masks;
    masks.reserve(static_cast<std::size_t>(batch));
    for (int b = 0; b < batch; ++b) {
      narx::StructureMask mask(model_set.size(), 0);
      const std::size_t xi = card(rng);
      for (std::size_t t = 0; t < xi; ++t) mask[pick(rng)] = 1;
      masks.push_back(std::move(mask));
    }

    std::vector<double> serial, parallel;
    const double t_serial = time_batch(engine, masks, false, reps, serial);
    const double t_parallel = time_batch(engine, masks, true, reps, parallel);

    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < serial.size(); ++i) {
      if (serial[i] != parallel[i]) ++mismatches;
    }

    std::printf("system %s, N_t=%zu, %d masks, best of %d\n", system.c_str(),
                model_set.size(), batch, reps);
    std::printf("serial   %.3f ms  (%.1f us/mask)\n", 1e3 * t_serial,
                1e6 * t_serial / batch);
    std::printf("parallel %.3f ms  (%.1f us/mask)\n", 1e3 * t_parallel,
                1e6 * t_parallel / batch);
    std::printf("speedup  %.2fx\n", t_serial / t_parallel);
    std::printf("results  %s\n",
                mismatches == 0 ? "bit-identical" : "MISMATCH");
    return mismatches == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bench_eval: %s\n", e.what());
    return 1;
  }
}
