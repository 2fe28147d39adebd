#include "ou_irrev/rng.hpp"

#include <cmath>
#include <numbers>

namespace ouirr {

namespace {

std::mt19937_64 make_engine(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

GaussianStream::GaussianStream(std::uint64_t master_seed, std::uint64_t index)
    : id_{master_seed, index}, engine_(make_engine(master_seed, index)) {}

double GaussianStream::uniform() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double GaussianStream::normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = uniform();
  const double u2 = uniform() - 0x1.0p-53;  // [0, 1)
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

void GaussianStream::fill_normal(std::span<double> out) {
  for (double& z : out) z = normal();
}

}  // namespace ouirr
