#pragma once

#include <cstdint>
#include <random>

namespace pdattack {

/// Standard normal stream over mt19937_64 with a fixed Box–Muller transform,
/// so a seed reproduces the same draws on every standard library.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next();

 private:
  double uniform();

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pdattack
