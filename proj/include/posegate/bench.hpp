#pragma once

#include <cstddef>
#include <cstdint>

#include "posegate/eval.hpp"

namespace posegate {

struct BenchConfig {
  std::size_t db_size = 1220;
  std::size_t n_descriptors = 500;
  std::size_t dim = 128;
  std::size_t repetitions = 200;
  std::uint64_t seed = 1;
  double d_th = 1.5;
  bool parallel_match = true;
};

// Wall times in microseconds.
struct BenchReport {
  BenchConfig config;
  LatencyPercentiles retrieve;
  LatencyPercentiles match;
  LatencyPercentiles combined;  // retrieve followed by match, per repetition
};

// Random database over a 100 x 40 x 10 m site and random real descriptors;
// every query is placed within d_th of some entry so the orientation pass
// always runs.
BenchReport RunBench(const BenchConfig& cfg);

}  // namespace posegate
