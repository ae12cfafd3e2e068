#include "sectorcorr/bvn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sectorcorr/normal.hpp"

namespace sectorcorr {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Gauss-Legendre half-tables (weights, negative abscissas) for 6-, 12- and
// 20-point rules; the +/- loop below supplies the mirrored points.
constexpr double kW1[3] = {0.1713244923791705, 0.3607615730481384,
                           0.4679139345726904};
constexpr double kX1[3] = {-0.9324695142031522, -0.6612093864662647,
                           -0.2386191860831970};
constexpr double kW2[6] = {0.04717533638651177, 0.1069393259953183,
                           0.1600783285433464,  0.2031674267230659,
                           0.2334925365383547,  0.2491470458134029};
constexpr double kX2[6] = {-0.9815606342467191, -0.9041172563704750,
                           -0.7699026741943050, -0.5873179542866171,
                           -0.3678314989981802, -0.1252334085114692};
constexpr double kW3[10] = {0.01761400713915212, 0.04060142980038694,
                            0.06267204833410906, 0.08327674157670475,
                            0.1019301198172404,  0.1181945319615184,
                            0.1316886384491766,  0.1420961093183820,
                            0.1491729864726037,  0.1527533871307258};
constexpr double kX3[10] = {-0.9931285991850949, -0.9639719272779138,
                            -0.9122344282513259, -0.8391169718222188,
                            -0.7463319064601508, -0.6360536807265150,
                            -0.5108670019508271, -0.3737060887154195,
                            -0.2277858511416451, -0.07652652113349734};

// Genz (2004) BVND: P(X > dh, Y > dk) for standard bivariate normal with
// correlation r. Gauss-Legendre quadrature on the arcsine-transformed
// correlation integral for |r| < 0.925, Drezner-Wesolowsky-style tail
// transformation above.
double genz_bvnd(double dh, double dk, double r) {
  const double* w;
  const double* x;
  int lg;
  const double ar = std::fabs(r);
  if (ar < 0.3) {
    w = kW1;
    x = kX1;
    lg = 3;
  } else if (ar < 0.75) {
    w = kW2;
    x = kX2;
    lg = 6;
  } else {
    w = kW3;
    x = kX3;
    lg = 10;
  }

  double h = dh;
  double k = dk;
  double hk = h * k;
  double bvn = 0.0;

  if (ar < 0.925) {
    if (ar > 0.0) {
      const double hs = (h * h + k * k) / 2.0;
      const double asr = std::asin(r);
      for (int i = 0; i < lg; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          const double sn = std::sin(asr * (is * x[i] + 1.0) / 2.0);
          bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
      }
      bvn = bvn * asr / (2.0 * kTwoPi);
    }
    bvn += std_normal_cdf(-h) * std_normal_cdf(-k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (ar < 1.0) {
      const double as = (1.0 - r) * (1.0 + r);
      double a = std::sqrt(as);
      const double bs = (h - k) * (h - k);
      const double c = (4.0 - hk) / 8.0;
      const double d = (12.0 - hk) / 16.0;
      double asr = -(bs / as + hk) / 2.0;
      if (asr > -100.0) {
        bvn = a * std::exp(asr) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 +
               c * d * as * as / 5.0);
      }
      if (-hk < 100.0) {
        const double b = std::sqrt(bs);
        bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) *
               std_normal_cdf(-b / a) * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
      }
      a /= 2.0;
      for (int i = 0; i < lg; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          const double xs_root = a * (is * x[i] + 1.0);
          const double xs = xs_root * xs_root;
          const double rs = std::sqrt(1.0 - xs);
          asr = -(bs / xs + hk) / 2.0;
          if (asr > -100.0) {
            bvn += a * w[i] * std::exp(asr) *
                   (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                    (1.0 + c * xs * (1.0 + d * xs)));
          }
        }
      }
      bvn = -bvn / kTwoPi;
    }
    if (r > 0.0) {
      bvn += std_normal_cdf(-std::max(h, k));
    } else {
      bvn = -bvn;
      if (k > h) {
        bvn += std_normal_cdf(k) - std_normal_cdf(h);
      }
    }
  }
  return bvn;
}

}  // namespace

double bvn_cdf(double h, double k, double r) {
  if (std::isnan(h) || std::isnan(k) || std::isnan(r) || std::fabs(r) > 1.0) {
    throw std::domain_error("bvn_cdf: need finite-or-infinite h,k and |r| <= 1");
  }
  const double inf = std::numeric_limits<double>::infinity();
  if (h == -inf || k == -inf) return 0.0;
  if (h == inf && k == inf) return 1.0;
  if (h == inf) return std_normal_cdf(k);
  if (k == inf) return std_normal_cdf(h);

  if (r == 0.0) return std_normal_cdf(h) * std_normal_cdf(k);
  if (r == 1.0) return std_normal_cdf(std::min(h, k));
  if (r == -1.0) {
    return std::max(0.0, std_normal_cdf(h) + std_normal_cdf(k) - 1.0);
  }
  const double v = genz_bvnd(-h, -k, r);
  return std::min(1.0, std::max(0.0, v));
}

double solve_bvn_correlation(double a, double b, double target) {
  if (!std::isfinite(a) || !std::isfinite(b) || std::isnan(target)) {
    throw std::domain_error("solve_bvn_correlation: a, b must be finite");
  }
  const double pa = std_normal_cdf(a);
  const double pb = std_normal_cdf(b);
  const double lo = std::max(0.0, pa + pb - 1.0);
  const double hi = std::min(pa, pb);
  constexpr double kBoundTol = 1e-13;
  if (target <= lo) {
    if (target < lo - kBoundTol) {
      throw std::domain_error(
          "solve_bvn_correlation: target below the lower Frechet bound");
    }
    return -1.0;
  }
  if (target >= hi) {
    if (target > hi + kBoundTol) {
      throw std::domain_error(
          "solve_bvn_correlation: target above the upper Frechet bound");
    }
    return 1.0;
  }

  // Brent's method on [-1,1]. The function is nondecreasing in r with
  // f(-1) = lo - target < 0 and f(1) = hi - target > 0. Iterating down to
  // bracket width ~1e-13 keeps the recovered r accurate wherever the CDF has
  // usable r-sensitivity; the residual then sits far below 1e-11.
  const auto f = [&](double r) { return bvn_cdf(a, b, r) - target; };
  constexpr double kXTol = 1e-13;
  constexpr int kMaxIter = 200;

  double xa = -1.0, xb = 1.0;
  double fa = lo - target, fb = hi - target;
  double xc = xa, fc = fa;
  double d = xb - xa, e = d;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    if (std::fabs(fc) < std::fabs(fb)) {
      xa = xb;
      xb = xc;
      xc = xa;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() *
                            std::fabs(xb) +
                        kXTol / 2.0;
    const double xm = (xc - xb) / 2.0;
    if (std::fabs(xm) <= tol1 || fb == 0.0) return xb;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (xa == xc) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double rr = fb / fc;
        p = s * (2.0 * xm * qq * (qq - rr) - (xb - xa) * (rr - 1.0));
        q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q),
                             std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    xa = xb;
    fa = fb;
    if (std::fabs(d) > tol1) {
      xb += d;
    } else {
      xb += xm > 0.0 ? tol1 : -tol1;
    }
    fb = f(xb);
    if ((fb > 0.0) == (fc > 0.0)) {
      xc = xa;
      fc = fa;
      e = xb - xa;
      d = e;
    }
  }
  return xb;
}

}  // namespace sectorcorr
