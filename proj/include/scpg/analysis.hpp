#pragma once

// Signal measurement helpers shared by tests, the acceptance suite and the
// backend comparison: zero-crossing frequency estimation, quadrature phase
// and amplitude extraction, angle unwrapping.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace scpg::analysis {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

inline double rms(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : std::sqrt(s / static_cast<double>(x.size()));
}

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

// Unwraps a sampled angle series in place (removes 2*pi jumps).
inline std::vector<double> unwrap(std::span<const double> wrapped) {
  std::vector<double> out(wrapped.begin(), wrapped.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double d = wrap_angle(out[i] - out[i - 1]);
    out[i] = out[i - 1] + d;
  }
  return out;
}

// Angular frequency from mean-crossing times (upward crossings, linearly
// interpolated). Returns 0 if fewer than two crossings are found.
inline double angular_frequency(std::span<const double> x, double dt) {
  const double m = mean(x);
  double first = -1.0, last = -1.0;
  std::size_t count = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i - 1] < m && x[i] >= m) {
      const double frac = (m - x[i - 1]) / (x[i] - x[i - 1]);
      const double t = (static_cast<double>(i - 1) + frac) * dt;
      if (first < 0.0) {
        first = t;
      } else {
        last = t;
        ++count;
      }
    }
  }
  if (count == 0 || last <= first) return 0.0;
  return 2.0 * kPi * static_cast<double>(count) / (last - first);
}

struct Quadrature {
  double amplitude = 0.0;
  double phase = 0.0;  // phase of cos(omega t + phase) at the window start
};

// Projects a window onto cos/sin at a known angular frequency. Robust to
// wide-band noise: the estimate integrates over the whole window.
inline Quadrature quadrature(std::span<const double> x, double dt, double omega) {
  if (x.size() < 2 || omega <= 0.0) return {};
  const double m = mean(x);
  double c = 0.0, s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) * dt;
    c += (x[i] - m) * std::cos(omega * t);
    s += (x[i] - m) * std::sin(omega * t);
  }
  const double n = static_cast<double>(x.size());
  c *= 2.0 / n;
  s *= 2.0 / n;
  return {std::hypot(c, s), std::atan2(-s, c)};
}

inline double amplitude_at(std::span<const double> x, double dt, double omega) {
  return quadrature(x, dt, omega).amplitude;
}

// Phase difference a - b of two equally sampled signals at a common
// frequency, wrapped to (-pi, pi].
inline double phase_difference(std::span<const double> a,
                               std::span<const double> b, double dt,
                               double omega) {
  return wrap_angle(quadrature(a, dt, omega).phase -
                    quadrature(b, dt, omega).phase);
}

inline double half_peak_to_peak(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double lo = x[0], hi = x[0];
  for (double v : x) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return 0.5 * (hi - lo);
}

// Extracts the [t0, t1) window of a dt-sampled series as a span.
inline std::span<const double> window(const std::vector<double>& x, double dt,
                                      double t0, double t1) {
  const auto i0 = static_cast<std::size_t>(std::max(0.0, t0 / dt));
  auto i1 = static_cast<std::size_t>(t1 / dt);
  if (i1 > x.size()) i1 = x.size();
  if (i0 >= i1) throw std::out_of_range("empty analysis window");
  return std::span<const double>(x).subspan(i0, i1 - i0);
}

}  // namespace scpg::analysis
