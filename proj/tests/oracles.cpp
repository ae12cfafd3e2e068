#include "oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a,
                     double fa, double b, double fb, double m, double fm,
                     double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, lm, flm);
  const double right = simpson(f, m, fm, b, fb, rm, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779399461;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Exact binomial coefficient for the small integer arguments used here
// (results stay far below 2^53).
double choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double result = 1.0;
  for (std::int64_t i = 1; i <= k; ++i) {
    result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return result;
}

// Beta(d+1, n-d+1) CDF via the binomial tail identity:
// I_t(d+1, n-d+1) = sum_{j=d+1}^{n+1} C(n+1, j) t^j (1-t)^(n+1-j).
double beta_cdf(double t, std::int64_t d, std::int64_t n) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double sum = 0.0;
  for (std::int64_t j = d + 1; j <= n + 1; ++j) {
    sum += choose(n + 1, j) * std::pow(t, static_cast<double>(j)) *
           std::pow(1.0 - t, static_cast<double>(n + 1 - j));
  }
  return sum;
}

double beta_pdf(double t, std::int64_t d, std::int64_t n) {
  // density of Beta(d+1, n-d+1); 1/B(d+1, n-d+1) = (n+1) * C(n, d)
  const double norm = static_cast<double>(n + 1) * choose(n, d);
  return norm * std::pow(t, static_cast<double>(d)) *
         std::pow(1.0 - t, static_cast<double>(n - d));
}

int sign_of(double diff) { return (diff > 0.0) - (diff < 0.0); }

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = simpson(f, a, fa, b, fb, m, fm);
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

double bvn_cdf(double h, double k, double r) {
  if (std::fabs(r) >= 1.0) {
    throw std::invalid_argument("oracle::bvn_cdf: |r| must be < 1");
  }
  const double lower = -8.5;  // Phi(-8.5) < 1e-17, below every tolerance here
  if (h <= lower) return 0.0;
  const double denom = std::sqrt(1.0 - r * r);
  auto f = [k, r, denom](double x) {
    return normal_pdf(x) * normal_cdf((k - r * x) / denom);
  };
  return integrate(f, lower, h, 1e-14);
}

double bayes_sign_prob(std::int64_t d1, std::int64_t n1, std::int64_t d2,
                       std::int64_t n2) {
  if (d1 < 0 || n1 < d1 || d2 < 0 || n2 < d2) {
    throw std::invalid_argument("oracle::bayes_sign_prob: invalid counts");
  }
  // P(X2 <= X1) = integral over t of f_{X1}(t) * F_{X2}(t)
  auto f = [d1, n1, d2, n2](double t) {
    return beta_pdf(t, d1, n1) * beta_cdf(t, d2, n2);
  };
  return integrate(f, 0.0, 1.0, 1e-13);
}

std::optional<double> kendall_tau_b_brute(std::span<const double> x,
                                          std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) return std::nullopt;
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t ties_x = 0;
  std::int64_t ties_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int sx = sign_of(x[j] - x[i]);
      const int sy = sign_of(y[j] - y[i]);
      if (sx == 0) ++ties_x;
      if (sy == 0) ++ties_y;
      if (sx * sy > 0) ++concordant;
      if (sx * sy < 0) ++discordant;
    }
  }
  const std::int64_t total = static_cast<std::int64_t>(n) *
                             static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t den_x = total - ties_x;
  const std::int64_t den_y = total - ties_y;
  if (den_x == 0 || den_y == 0) return std::nullopt;
  return static_cast<double>(concordant - discordant) /
         std::sqrt(static_cast<double>(den_x) * static_cast<double>(den_y));
}

namespace {

std::vector<double> sign_sums(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> u(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double sum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (s != t) sum += sign_of(x[t] - x[s]);
    }
    u[t] = sum;
  }
  return u;
}

}  // namespace

std::optional<double> spearman_sign_sum(std::span<const double> x,
                                        std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const std::vector<double> u = sign_sums(x);
  const std::vector<double> v = sign_sums(y);
  return pearson_brute(u, v);
}

std::optional<double> spearman_rank_pearson(std::span<const double> x,
                                            std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double offset = 0.5 * static_cast<double>(x.size() + 1);
  std::vector<double> rx = sign_sums(x);
  std::vector<double> ry = sign_sums(y);
  for (double& r : rx) r = offset + 0.5 * r;
  for (double& r : ry) r = offset + 0.5 * r;
  return pearson_brute(rx, ry);
}

std::optional<double> pearson_brute(std::span<const double> x,
                                    std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) return std::nullopt;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
