#include "ppd/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include "ppd/error.hpp"

namespace ppd {

double normal_quantile(double u) {
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, u);
}

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw Error(ErrorKind::kInvalidInput, "empty integer range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = (~std::uint64_t{0} / span) * span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<int>(x % span);
}

}  // namespace ppd
