// Insertion cost of the cycle guard on random DAG arc streams.
// Prints nodes, arcs, seconds, search work and work per arc as TSV.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <random>
#include <vector>

#include "sdp/cycle_guard.hpp"

int main(int argc, char** argv) {
  const double ratio = argc > 1 ? std::atof(argv[1]) : 1.5;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 7;
  std::mt19937_64 rng(seed);
  std::printf("nodes\tarcs\tseconds\twork\twork_per_arc\n");
  for (int n = 250; n <= 16000; n *= 2) {
    // Hidden rank makes the stream acyclic; arrival order is random.
    std::vector<int> rank(static_cast<std::size_t>(n));
    std::iota(rank.begin(), rank.end(), 0);
    std::shuffle(rank.begin(), rank.end(), rng);
    const auto m = static_cast<std::size_t>(ratio * n);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<std::pair<int, int>> arcs;
    while (arcs.size() < m) {
      int a = pick(rng), b = pick(rng);
      if (a == b) continue;
      if (rank[static_cast<std::size_t>(a)] > rank[static_cast<std::size_t>(b)]) std::swap(a, b);
      arcs.emplace_back(a, b);
    }
    sdp::CycleGuard guard(static_cast<std::size_t>(n));
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& [a, b] : arcs) {
      if (!guard.would_create_cycle(a, b)) guard.insert_arc(a, b);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d\t%zu\t%.6f\t%llu\t%.2f\n", n, m, secs, static_cast<unsigned long long>(guard.work()),
                static_cast<double>(guard.work()) / static_cast<double>(std::max<std::size_t>(1, m)));
  }
}
