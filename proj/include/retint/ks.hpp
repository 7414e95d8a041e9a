#ifndef RETINT_KS_HPP
#define RETINT_KS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "retint/error.hpp"

namespace retint {

/// Two-sample Kolmogorov-Smirnov distance sup_x |F_a(x) - F_b(x)| of two
/// ascending samples. Tied values are stepped over together.
template <typename T>
double ks_two_sample_sorted(std::span<const T> a, std::span<const T> b) {
  if (a.empty() || b.empty())
    throw ParameterError("KS distance needs two non-empty samples");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const T x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] == x)
      ++ia;
    while (ib < b.size() && b[ib] == x)
      ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na -
                             static_cast<double>(ib) / nb));
  }
  return d;
}

template <typename T>
double ks_two_sample(std::span<const T> a, std::span<const T> b) {
  std::vector<T> sa(a.begin(), a.end());
  std::vector<T> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return ks_two_sample_sorted<T>(sa, sb);
}

inline double ks_two_sample(const std::vector<double> &a,
                            const std::vector<double> &b) {
  return ks_two_sample<double>(std::span<const double>(a),
                               std::span<const double>(b));
}

/// One-sample distance against a continuous CDF. Both sides of every jump
/// of the empirical CDF are compared, so a point mass at x0 against F
/// gives max(F(x0), 1 - F(x0)).
template <typename Cdf>
double ks_one_sample_sorted(std::span<const double> x, Cdf &&cdf) {
  if (x.empty())
    throw ParameterError("KS distance needs a non-empty sample");
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < x.size()) {
    const double v = x[i];
    const double below = static_cast<double>(i) / n;
    while (i < x.size() && x[i] == v)
      ++i;
    const double at = static_cast<double>(i) / n;
    const double f = cdf(v);
    d = std::max({d, at - f, f - below});
  }
  return d;
}

template <typename Cdf>
double ks_one_sample(std::span<const double> x, Cdf &&cdf) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return ks_one_sample_sorted(std::span<const double>(s), std::forward<Cdf>(cdf));
}

/// Distance between the empirical law of positive integers and a discrete
/// law given by its CDF on integers; the supremum is attained on integers.
template <typename Cdf>
double ks_discrete(std::span<const std::int64_t> values, Cdf &&cdf) {
  if (values.empty())
    throw ParameterError("KS distance needs a non-empty sample");
  std::vector<std::int64_t> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  std::size_t i = 0;
  for (std::int64_t k = std::min<std::int64_t>(s.front(), 1) - 1; k <= s.back(); ++k) {
    while (i < s.size() && s[i] <= k)
      ++i;
    d = std::max(d, std::abs(static_cast<double>(i) / n - cdf(k)));
  }
  return d;
}

/// Kolmogorov limiting survival Q(lambda) = 2 sum (-1)^(j-1) exp(-2 j^2 lambda^2).
inline double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0)
    return 1.0;
  if (lambda < 0.2)
    return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16)
      break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Asymptotic p-value of a two-sample distance, with the small-sample
/// correction of Stephens.
inline double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m) {
  const double ne = static_cast<double>(n) * static_cast<double>(m) /
                    static_cast<double>(n + m);
  const double root = std::sqrt(ne);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

/// Critical distance of the asymptotic two-sample test at level alpha.
inline double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterError("KS level must lie in (0, 1)");
  if (n == 0 || m == 0)
    throw ParameterError("KS critical value needs non-empty samples");
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

/// One-sample critical distance at level alpha.
inline double ks_critical_value(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterError("KS level must lie in (0, 1)");
  if (n == 0)
    throw ParameterError("KS critical value needs a non-empty sample");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

} // namespace retint

#endif // RETINT_KS_HPP
