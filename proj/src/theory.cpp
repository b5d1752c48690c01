#include <cmath>
#include <limits>
#include <numbers>

#include "chaosdesign/errors.hpp"
#include "chaosdesign/protocol.hpp"

namespace chaosdesign {

double factorial(int k) {
  if (k < 0) throw UsageError("factorial: negative argument");
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double f_2sp(int k) {
  if (k < 2) throw UsageError("f_2sp: defined for k >= 2");
  if (k == 2) return 6.0;
  const double kf = factorial(k);
  return std::numbers::e * kf * kf;
}

TheoryPrediction predict_frame_potential(int k, double p0) {
  if (k < 1) throw UsageError("predict_frame_potential: k must be >= 1");
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw UsageError("predict_frame_potential: p0 outside [0, 1]");
  TheoryPrediction out;
  out.k = k;
  out.p0 = p0;
  if (k == 1) {
    // Uniform Pauli twirls are exact 1-designs at any T.
    out.f_2sp = std::numeric_limits<double>::quiet_NaN();
    out.predicted = 1.0;
    return out;
  }
  out.f_2sp = f_2sp(k);
  out.approximate = k >= 3;
  out.predicted = p0 * out.f_2sp + (1.0 - p0) * factorial(k);
  return out;
}

double normalized_deviation(int k, double frame_potential) {
  const double kf = factorial(k);
  return std::abs(frame_potential - kf) / kf;
}

std::optional<std::uint64_t> critical_system_size(int k, double eta, PauliEnsembleKind kind) {
  if (k < 2) throw UsageError("critical_system_size: k must be >= 2");
  if (!(eta > 0.0 && eta <= 1.0)) throw UsageError("critical_system_size: eta outside (0, 1]");
  const double threshold = eta * factorial(k) / f_2sp(k);
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 62;

  // p0(N) is non-increasing in N, so start from the closed-form estimate and
  // correct for rounding in both directions.
  double guess = 1.0;
  switch (kind) {
    case PauliEnsembleKind::IdentityOnly:
      if (1.0 <= threshold) return 1;
      return std::nullopt;
    case PauliEnsembleKind::UniformFull:
      guess = std::ceil(-std::log(threshold) / std::log(4.0));
      break;
    case PauliEnsembleKind::UniformIZ:
      guess = std::ceil(-std::log2(threshold));
      break;
    case PauliEnsembleKind::PrefixZ:
      guess = std::ceil(1.0 / threshold - 1.0);
      break;
  }
  if (!(guess < static_cast<double>(kLimit))) return std::nullopt;
  auto p0 = [kind](std::uint64_t n) {
    switch (kind) {
      case PauliEnsembleKind::UniformFull: return std::ldexp(1.0, -2 * static_cast<int>(std::min<std::uint64_t>(n, 4096)));
      case PauliEnsembleKind::UniformIZ: return std::ldexp(1.0, -static_cast<int>(std::min<std::uint64_t>(n, 4096)));
      case PauliEnsembleKind::PrefixZ: return 1.0 / (static_cast<double>(n) + 1.0);
      case PauliEnsembleKind::IdentityOnly: break;
    }
    return 1.0;
  };
  std::uint64_t n = guess < 1.0 ? 1 : static_cast<std::uint64_t>(guess);
  while (p0(n) > threshold) ++n;
  while (n > 1 && p0(n - 1) <= threshold) --n;
  return n;
}

}  // namespace chaosdesign
