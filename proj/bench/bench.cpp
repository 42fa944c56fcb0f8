// Serial vs OpenMP timings for the parallel kernels. Each kernel runs both
// ways on the same inputs and the results are compared before timing is
// reported, so a speedup never hides a divergence.
//
//   bench [--repeat N]

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "randword/ergodic.hpp"
#include "randword/furstenberg.hpp"
#include "randword/spectrum.hpp"
#include "randword/transfer.hpp"
#include "randword/word_model.hpp"

using namespace randword;

namespace {

double seconds(const std::function<void()>& f, int repeat) {
  double best = 1e300;
  for (int r = 0; r < repeat; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

template <class Run>
void row(const char* name, int repeat, Run&& run) {
  decltype(run(Execution::Serial)) serial, parallel;
  const double ts = seconds([&] { serial = run(Execution::Serial); }, repeat);
  const double tp = seconds([&] { parallel = run(Execution::Parallel); }, repeat);
  std::printf("%-16s %10.4f %10.4f %8.2fx  %s\n", name, ts, tp, ts / tp, serial == parallel ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel kernel timings"};
  int repeat = 3;
  app.add_option("--repeat", repeat, "best of N runs")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-16s %10s %10s %9s\n", "kernel", "serial s", "parallel s", "speedup");

  const auto model = dimer(1.5);
  std::vector<double> energies;
  for (int i = 0; i < 64; ++i) energies.push_back(-3.5 + 7.0 * i / 63.0);
  row("gamma_sweep", repeat, [&](Execution exec) {
    std::vector<double> out;
    for (const auto& e : gamma_sweep(model, energies, 50000, 1, exec)) out.push_back(e.value);
    return out;
  });

  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(-4.0 + 0.02 * i);
  row("ids", repeat, [&](Execution exec) { return ids(model, 1000, 16, grid, 2, exec).mean; });

  row("exceptional_set", repeat, [&](Execution exec) {
    ExceptionalOptions opt;
    opt.exec = exec;
    opt.roots.exec = exec;
    return exceptional_set(dimer(0.5), Word{0.5, 0.5}, Word{-0.5, -0.5}, opt).energies();
  });

  const auto coprime = WordModel::atomic({{Word{1.0}, 0.5}, {Word{-1.0, -1.0}, 0.5}});
  Cylinder a;
  a.allowed[0] = {Word{1.0}};
  row("mixing", repeat, [&](Execution exec) {
    std::vector<std::size_t> hits;
    for (const auto& r : mixing_experiment(coprime, a, a, 0, 60, 100000, 3, exec).rows) hits.push_back(r.hits);
    return hits;
  });
  return 0;
}
