#include "sectorcorr/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace sectorcorr {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t splitmix64_scramble(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_key(std::uint64_t parent, std::uint64_t part) {
  // hash_combine-style fold of the part into the parent key, then a full
  // avalanche pass so sibling keys are statistically unrelated.
  const std::uint64_t h =
      parent ^ (part + kGolden + (parent << 6) + (parent >> 2));
  return splitmix64_scramble(h + kGolden);
}

inline std::uint64_t rotl(std::uint64_t v, int s) {
  return (v << s) | (v >> (64 - s));
}

// Stirling-series correction fc(k) = ln k! - ln(Stirling approx at k), as
// tabulated by Hormann for BTRD; exact values for k < 10, three-term series
// in 1/(k+1) beyond.
double stirling_correction(std::int64_t k) {
  static const double table[10] = {
      0.08106146679532726,  0.04134069595540929,  0.02767792568499834,
      0.02079067210376509,  0.01664469118982119,  0.01387612882307075,
      0.01189670994589177,  0.01041126526197209,  0.009255462182712733,
      0.008330563433362871};
  if (k < 10) return table[k];
  const double ikp1 = 1.0 / static_cast<double>(k + 1);
  const double ikp1_sq = ikp1 * ikp1;
  return (1.0 / 12 - (1.0 / 360 - (1.0 / 1260) * ikp1_sq) * ikp1_sq) * ikp1;
}

// Sequential search by inversion, for n*p small: walks the pmf from 0
// subtracting successive probabilities from a single uniform.
std::int64_t binomial_inversion(std::int64_t n, double p, RngStream& rng) {
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = static_cast<double>(n + 1) * s;
  const double r0 = std::pow(q, static_cast<double>(n));
  for (;;) {
    double u = rng.next_uniform();
    double r = r0;
    std::int64_t x = 0;
    bool ok = true;
    while (u > r) {
      u -= r;
      ++x;
      if (x > n) {  // float leakage past the support; redraw
        ok = false;
        break;
      }
      r *= a / static_cast<double>(x) - s;
    }
    if (ok) return x;
  }
}

// BTRD (Hormann 1993): transformed rejection with a squeeze and a
// Stirling-corrected exact test, for n*p large. Requires p <= 0.5.
std::int64_t binomial_btrd(std::int64_t n, double p, RngStream& rng) {
  const double q = 1.0 - p;
  const double npq = static_cast<double>(n) * p * q;
  const double sqrt_npq = std::sqrt(npq);
  const std::int64_t m =
      static_cast<std::int64_t>(std::floor(static_cast<double>(n + 1) * p));
  const double r = p / q;
  const double nr = static_cast<double>(n + 1) * r;
  const double b = 1.15 + 2.53 * sqrt_npq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = static_cast<double>(n) * p + 0.5;
  const double alpha = (2.83 + 5.1 / b) * sqrt_npq;
  const double v_r = 0.92 - 4.2 / b;
  const double u_rv_r = 0.86 * v_r;

  for (;;) {
    double u;
    double v = rng.next_uniform();
    if (v <= u_rv_r) {
      u = v / v_r - 0.43;
      return static_cast<std::int64_t>(
          std::floor(u * (2.0 * a / (0.5 - std::fabs(u)) + b) + c));
    }
    if (v >= v_r) {
      u = rng.next_uniform() - 0.5;
    } else {
      u = v / v_r - 0.93;
      u = (u < 0.0 ? -0.5 : 0.5) - u;
      v = rng.next_uniform() * v_r;
    }
    const double us = 0.5 - std::fabs(u);
    const std::int64_t k =
        static_cast<std::int64_t>(std::floor(u * (2.0 * a / us + b) + c));
    if (k < 0 || k > n) continue;
    v = v * alpha / (a / (us * us) + b);
    const std::int64_t km = std::llabs(k - m);
    if (km <= 15) {
      // Evaluate f(k)/f(m) by the pmf recursion and accept iff v <= f.
      double f = 1.0;
      if (m < k) {
        for (std::int64_t i = m + 1; i <= k; ++i) {
          f *= nr / static_cast<double>(i) - r;
        }
      } else if (m > k) {
        for (std::int64_t i = k + 1; i <= m; ++i) {
          v *= nr / static_cast<double>(i) - r;
        }
      }
      if (v <= f) return k;
    } else {
      v = std::log(v);
      const double km_d = static_cast<double>(km);
      const double rho =
          (km_d / npq) * (((km_d / 3.0 + 0.625) * km_d + 1.0 / 6) / npq + 0.5);
      const double t = -km_d * km_d / (2.0 * npq);
      if (v < t - rho) return k;
      if (v <= t + rho) {
        const std::int64_t nm = n - m + 1;
        const double h = (static_cast<double>(m) + 0.5) *
                             std::log(static_cast<double>(m + 1) /
                                      (r * static_cast<double>(nm))) +
                         stirling_correction(m) + stirling_correction(n - m);
        const std::int64_t nk = n - k + 1;
        const double bound =
            h +
            static_cast<double>(n + 1) *
                std::log(static_cast<double>(nm) / static_cast<double>(nk)) +
            (static_cast<double>(k) + 0.5) *
                std::log(static_cast<double>(nk) * r /
                         static_cast<double>(k + 1)) -
            stirling_correction(k) - stirling_correction(n - k);
        if (v <= bound) return k;
      }
    }
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t key) : key_(key) {
  std::uint64_t s = key;
  for (auto& word : state_) {
    s += kGolden;
    word = splitmix64_scramble(s);
  }
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
    state_[0] = kGolden;
  }
}

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(derive_key(key_, index));
}

std::uint64_t RngStream::next_u64() {
  auto& s = state_;
  const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
  const std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double RngStream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double v1, v2, s;
  do {
    v1 = 2.0 * next_uniform() - 1.0;
    v2 = 2.0 * next_uniform() - 1.0;
    s = v1 * v1 + v2 * v2;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v2 * f;
  has_spare_normal_ = true;
  return v1 * f;
}

std::int64_t RngStream::next_binomial(std::int64_t n, double p) {
  if (n < 0 || std::isnan(p) || p < 0.0 || p > 1.0) {
    throw std::domain_error("next_binomial: need n >= 0 and p in [0,1]");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const bool flip = p > 0.5;
  const double ps = flip ? 1.0 - p : p;
  std::int64_t k;
  if (static_cast<double>(n + 1) * ps < 11.0) {
    k = binomial_inversion(n, ps, *this);
  } else {
    k = binomial_btrd(n, ps, *this);
  }
  return flip ? n - k : k;
}

}  // namespace sectorcorr
