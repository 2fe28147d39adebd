#pragma once

// Reproducible Gaussian streams.
//
// A stream is identified by (master seed, stream index). Its engine is a
// std::mt19937_64 initialised through std::seed_seq with the four 32-bit
// halves of the pair, so every path owns an independent stream regardless of
// how many paths run concurrently. Normal variates use the Box-Muller
// transform, consuming two 53-bit uniforms per pair and returning the cosine
// branch first.

#include <cstdint>
#include <optional>
#include <random>
#include <span>

namespace ouirr {

struct StreamId {
  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;
  friend bool operator==(const StreamId&, const StreamId&) = default;
};

class GaussianStream {
 public:
  GaussianStream(std::uint64_t master_seed, std::uint64_t index);
  explicit GaussianStream(StreamId id) : GaussianStream(id.master_seed, id.index) {}

  StreamId id() const { return id_; }

  /// Uniform on (0, 1].
  double uniform();
  double normal();
  void fill_normal(std::span<double> out);
  std::uint64_t next_u64() { return engine_(); }

 private:
  StreamId id_;
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace ouirr
