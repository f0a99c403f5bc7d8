#include "coast/stats.hpp"

#include "coast/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coast::stats {
namespace {

// modified Lentz continued fraction for the incomplete beta
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double sample_sd(const std::vector<double>& d, double mean) {
  double acc = 0.0;
  for (double v : d) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(d.size() - 1));
}

bool constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

// correlation -> two-sided p through t = r sqrt((n-2)/(1-r^2))
double corr_p_value(double r, std::int64_t n) {
  const double denom = 1.0 - r * r;
  if (denom <= 0.0) return 0.0;
  const double t = r * std::sqrt(static_cast<double>(n - 2) / denom);
  return student_t_two_sided(t, static_cast<double>(n - 2));
}

double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                    b * std::log1p(-x);
  const double front = std::exp(ln);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double dof) {
  if (!std::isfinite(t)) return 0.0;
  return incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

TestResult paired_t(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), errc::dim_mismatch, "paired samples differ in length");
  require(x.size() >= 2, errc::too_few_samples, "paired_t needs n >= 2");
  std::vector<double> d(x.size());
  for (size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / d.size();
  const double sd = sample_sd(d, mean);
  require(sd > 0.0, errc::zero_variance, "paired differences are constant");
  const double n = static_cast<double>(d.size());
  TestResult r;
  r.kind = test_kind::paired_t;
  r.n1 = static_cast<std::int64_t>(d.size());
  r.statistic = mean / (sd / std::sqrt(n));
  r.p_value = student_t_two_sided(r.statistic, n - 1.0);
  return r;
}

TestResult two_prop_z(std::int64_t s1, std::int64_t n1, std::int64_t s2, std::int64_t n2) {
  require(n1 >= 1 && n2 >= 1, errc::too_few_samples, "group sizes must be >= 1");
  require(s1 >= 0 && s1 <= n1 && s2 >= 0 && s2 <= n2, errc::dim_mismatch,
          "success counts out of range");
  const double pooled = static_cast<double>(s1 + s2) / static_cast<double>(n1 + n2);
  require(pooled > 0.0 && pooled < 1.0, errc::degenerate_pool,
          "pooled proportion is degenerate");
  const double p1 = static_cast<double>(s1) / n1, p2 = static_cast<double>(s2) / n2;
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
  TestResult r;
  r.kind = test_kind::two_prop_z;
  r.n1 = n1;
  r.n2 = n2;
  r.statistic = (p2 - p1) / se;
  r.p_value = 2.0 * normal_cdf(-std::abs(r.statistic));
  return r;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  const size_t n = v.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double rank = (static_cast<double>(i + j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

TestResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), errc::dim_mismatch, "sequences differ in length");
  require(x.size() >= 3, errc::too_few_samples, "spearman needs n >= 3");
  require(!constant(x) && !constant(y), errc::constant_sequence,
          "correlation of a constant sequence");
  TestResult r;
  r.kind = test_kind::spearman;
  r.n1 = static_cast<std::int64_t>(x.size());
  r.statistic = pearson_r(average_ranks(x), average_ranks(y));
  r.p_value = corr_p_value(r.statistic, r.n1);
  return r;
}

TestResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), errc::dim_mismatch, "sequences differ in length");
  require(x.size() >= 3, errc::too_few_samples, "pearson needs n >= 3");
  require(!constant(x) && !constant(y), errc::constant_sequence,
          "correlation of a constant sequence");
  TestResult r;
  r.kind = test_kind::pearson;
  r.n1 = static_cast<std::int64_t>(x.size());
  r.statistic = pearson_r(x, y);
  r.p_value = corr_p_value(r.statistic, r.n1);
  return r;
}

}  // namespace coast::stats
