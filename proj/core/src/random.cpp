#include "chargegrid/random.hpp"

namespace chargegrid {

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

SubstreamRng::SubstreamRng(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t stream) {
  std::uint64_t mix = master_seed;
  std::uint64_t a = splitmix64(mix);
  mix = a ^ (stream * 0xd1342543de82ef95ULL);
  std::uint64_t b = splitmix64(mix);
  std::uint64_t state = b ^ (trial * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
  for (auto& w : s_) w = splitmix64(state);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t SubstreamRng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double SubstreamRng::uniform_open0() {
  return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

bool SubstreamRng::bernoulli(double p) {
  // Always consumes one draw so streams stay aligned across p.
  return uniform_open0() <= p;
}

}  // namespace chargegrid
