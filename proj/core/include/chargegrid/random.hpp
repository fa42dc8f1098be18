#pragma once

#include <cstdint>

namespace chargegrid {

// splitmix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** seeded from (master seed, stream tag, trial index). Two generators built from
// the same triple produce the same sequence no matter which thread builds them.
class SubstreamRng {
 public:
  SubstreamRng(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t stream = 0);

  std::uint64_t next();
  // Uniform on (0, 1]; never returns 0 so -log(u) is finite.
  double uniform_open0();
  bool bernoulli(double p);

 private:
  std::uint64_t s_[4];
};

}  // namespace chargegrid
