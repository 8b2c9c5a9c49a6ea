#ifndef PPD_RNG_HPP
#define PPD_RNG_HPP

#include <cstdint>
#include <random>

namespace ppd {

// SplitMix64 finalizer. Used to derive independent stream seeds and as the
// counter-based generator behind pseudo-random prior draws.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

// Maps 64 random bits to the open interval (0, 1).
constexpr double bits_to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse of the standard normal CDF.
double normal_quantile(double u);

// Seeded generator with platform-independent derived distributions. The
// std:: distributions are implementation-defined, so they are avoided here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on (0, 1).
  double uniform() { return bits_to_open_unit(engine_()); }

  // Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);

  double normal() { return normal_quantile(uniform()); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ppd

#endif  // PPD_RNG_HPP
