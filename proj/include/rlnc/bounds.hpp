#pragma once

#include "rlnc/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace rlnc::bounds {

namespace detail {

inline void check_probability(double p, const char* name)
{
  if (!(p >= 0.0 && p <= 1.0))
    throw invalid_parameter(std::string{name} + " must be in [0, 1]");
}

inline double log_binomial(std::size_t n, std::size_t k)
{
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0)
       - std::lgamma(static_cast<double>(n - k) + 1.0);
}

inline double log_sum_exp(const std::vector<double>& terms)
{
  const double peak = terms.empty() ? -std::numeric_limits<double>::infinity()
                                    : *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(peak))
    return peak;
  double acc = 0.0;
  for (double t : terms)
    acc += std::exp(t - peak);
  return peak + std::log(acc);
}

struct union_sum
{
  double log_value = 0.0; ///< log of the sum, -inf when it is zero
  bool negative_base = false;
};

/// log of (1/(q-1)) * sum_{i=1..k} C(k,i) (q-1)^i B_i^exponent with
/// B_i = d2 + (1-d2) [1/q + (1-1/q) t^i],  t = 1 - nonzero/(1-1/q).
///
/// `nonzero` is the probability that a received coefficient is nonzero.
/// When t < 0 the odd powers are negative; B_i itself stays >= 0 up to
/// rounding, and its magnitude is used.
inline union_sum log_failure_sum(std::size_t k, double q, double nonzero, double d2, double exponent)
{
  const double inv_q = 1.0 / q;
  const double t = 1.0 - nonzero / (1.0 - inv_q);
  const double log_qm1 = std::log(q - 1.0);

  std::vector<double> terms;
  terms.reserve(k);
  for (std::size_t i = 1; i <= k; ++i)
  {
    const double base = std::abs(d2 + (1.0 - d2) * (inv_q + (1.0 - inv_q) * std::pow(t, static_cast<double>(i))));
    const double log_base = base > 0.0 ? std::log(base) : -std::numeric_limits<double>::infinity();
    terms.push_back(log_binomial(k, i) + static_cast<double>(i) * log_qm1 + exponent * log_base);
  }
  return {log_sum_exp(terms) - log_qm1, t < 0.0};
}

} // namespace detail

/// Probability that a coefficient seen at the destination is zero, given the
/// last hop delivered: [(1-d0) d1]^N + d0^N.
inline double psi(double delta0, double delta1, std::size_t N)
{
  detail::check_probability(delta0, "delta0");
  detail::check_probability(delta1, "delta1");
  if (N < 1)
    throw invalid_parameter("N must be >= 1");
  const auto n = static_cast<double>(N);
  return std::pow((1.0 - delta0) * delta1, n) + std::pow(delta0, n);
}

/// (P{c = 0}, P{c = theta}) for each nonzero theta.
inline std::pair<double, double> coeff_probs(double psi_value, std::uint64_t q)
{
  detail::check_probability(psi_value, "psi");
  if (q < 2)
    throw invalid_parameter("q must be >= 2");
  return {psi_value, (1.0 - psi_value) / static_cast<double>(q - 1)};
}

struct params
{
  std::size_t n = 3;
  std::size_t m = 3;
  std::size_t N = 3;
  std::size_t M = 2;
  std::uint64_t q = 256;
  double delta0 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;

  void validate(bool need_m = true) const
  {
    if (n < 1)
      throw invalid_parameter("n must be >= 1");
    if (need_m && m < n)
      throw invalid_parameter("m must be >= n");
    if (N < 1 || M < 1)
      throw invalid_parameter("N and M must be >= 1");
    if (q < 2)
      throw invalid_parameter("q must be >= 2");
    detail::check_probability(delta0, "delta0");
    detail::check_probability(delta1, "delta1");
    detail::check_probability(delta2, "delta2");
  }

  /// Packets reaching the destination per generation in the bound: M*m/N, as a real.
  double exponent() const { return static_cast<double>(M) * static_cast<double>(m) / static_cast<double>(N); }
};

struct failure_bound
{
  double raw = 0.0;     ///< union bound value, may exceed 1
  double clamped = 0.0; ///< raw clamped to [0, 1]
  double log_raw = 0.0;
  bool negative_base = false; ///< psi < 1/q: inner base is negative
};

/// Union bound on Pr{rank < n} for source coding, with an explicit exponent.
inline failure_bound pfail_with_exponent(const params& p, double exponent)
{
  p.validate();
  const double zero = psi(p.delta0, p.delta1, p.N);
  const auto s = detail::log_failure_sum(p.n, static_cast<double>(p.q), 1.0 - zero, p.delta2, exponent);
  failure_bound out;
  out.log_raw = s.log_value;
  out.raw = std::exp(s.log_value);
  out.clamped = std::clamp(out.raw, 0.0, 1.0);
  out.negative_base = s.negative_base;
  return out;
}

inline failure_bound pfail_bound(const params& p)
{
  return pfail_with_exponent(p, p.exponent());
}

/// Clamped upper bound on the source-coding decode failure probability.
inline double pfail_upper(const params& p)
{
  return pfail_bound(p).clamped;
}

/// Lower bound on decode probability when the source sends N plain fragments
/// and only the second-hop relays code. m is not used.
inline double pdecode_inter_lower(const params& p)
{
  p.validate(false);
  const auto s = detail::log_failure_sum(p.N, static_cast<double>(p.q), 1.0 - p.delta1, p.delta2,
                                         static_cast<double>(p.M));
  const double fail = std::exp(s.log_value);
  const double lead = std::pow(1.0 - p.delta0, static_cast<double>(p.N));
  return std::clamp(lead * (1.0 - fail), 0.0, 1.0);
}

struct result
{
  double psi = 0.0;
  double p_fail_raw = 0.0;
  double p_fail_upper = 0.0;
  double p_decode_lower = 0.0;
  double p_decode_inter_lower = 0.0;
  bool negative_base = false;
};

inline result evaluate(const params& p)
{
  const auto fb = pfail_bound(p);
  result r;
  r.psi = psi(p.delta0, p.delta1, p.N);
  r.p_fail_raw = fb.raw;
  r.p_fail_upper = fb.clamped;
  r.p_decode_lower = 1.0 - fb.clamped;
  r.p_decode_inter_lower = pdecode_inter_lower(p);
  r.negative_base = fb.negative_base;
  return r;
}

struct surface_grid
{
  std::size_t n = 3;
  std::size_t N = 3;
  std::uint64_t q = 256;
  double delta1 = 0.01;
  double delta2 = 0.01;
  std::vector<std::size_t> M_values{2, 4};
  std::vector<std::size_t> m_values{3, 4, 5, 6, 7, 8};
  std::vector<double> delta0_values;
};

struct surface_row
{
  params point;
  result value;
};

/// One row per (M, m, delta0), in that nesting order.
inline std::vector<surface_row> sweep_surface(const surface_grid& g)
{
  std::vector<surface_row> rows;
  rows.reserve(g.M_values.size() * g.m_values.size() * g.delta0_values.size());
  for (auto M : g.M_values)
    for (auto m : g.m_values)
      for (double d0 : g.delta0_values)
      {
        params p{g.n, m, g.N, M, g.q, d0, g.delta1, g.delta2};
        rows.push_back({p, evaluate(p)});
      }
  return rows;
}

} // namespace rlnc::bounds
