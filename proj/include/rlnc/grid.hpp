#pragma once

// Parsing of sweep flags: comma lists whose items are single values or
// `start:stop[:step]` ranges (inclusive of stop). Pairs such as (n, m) are
// written `n:m` and separated by commas.

#include "rlnc/error.hpp"

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rlnc::grid {

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true)
  {
    const auto at = s.find(sep, start);
    out.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos)
      break;
    start = at + 1;
  }
  return out;
}

inline double to_double(std::string_view s)
{
  // std::from_chars for double needs a newer libstdc++ than we can assume.
  const std::string copy{s};
  std::size_t used = 0;
  double v = 0.0;
  try
  {
    v = std::stod(copy, &used);
  }
  catch (const std::exception&)
  {
    used = 0;
  }
  if (copy.empty() || used != copy.size() || !std::isfinite(v))
    throw invalid_parameter("not a number: '" + copy + "'");
  return v;
}

inline std::size_t to_size(std::string_view s)
{
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw invalid_parameter("not a non-negative integer: '" + std::string{s} + "'");
  return v;
}

} // namespace detail

/// "0.1,0.3" or "0:0.9:0.05" or a mix. Range values are start + k*step,
/// rounded to 12 decimals so that 0.05-steps print cleanly.
inline std::vector<double> parse_reals(std::string_view text)
{
  std::vector<double> out;
  if (text.empty())
    throw invalid_parameter("empty value list");
  for (auto item : detail::split(text, ','))
  {
    const auto parts = detail::split(item, ':');
    if (parts.size() == 1)
    {
      out.push_back(detail::to_double(parts[0]));
      continue;
    }
    if (parts.size() > 3)
      throw invalid_parameter("range must be start:stop[:step], got '" + std::string{item} + "'");
    const double start = detail::to_double(parts[0]);
    const double stop = detail::to_double(parts[1]);
    const double step = parts.size() == 3 ? detail::to_double(parts[2]) : 1.0;
    if (!(step > 0.0) || stop < start)
      throw invalid_parameter("empty or malformed range '" + std::string{item} + "'");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k)
      out.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
  }
  return out;
}

/// "2,4" or "3:8" or "2:16:2".
inline std::vector<std::size_t> parse_sizes(std::string_view text)
{
  std::vector<std::size_t> out;
  if (text.empty())
    throw invalid_parameter("empty value list");
  for (auto item : detail::split(text, ','))
  {
    const auto parts = detail::split(item, ':');
    if (parts.size() == 1)
    {
      out.push_back(detail::to_size(parts[0]));
      continue;
    }
    if (parts.size() > 3)
      throw invalid_parameter("range must be start:stop[:step], got '" + std::string{item} + "'");
    const auto start = detail::to_size(parts[0]);
    const auto stop = detail::to_size(parts[1]);
    const auto step = parts.size() == 3 ? detail::to_size(parts[2]) : std::size_t{1};
    if (step == 0 || stop < start)
      throw invalid_parameter("empty or malformed range '" + std::string{item} + "'");
    for (auto v = start; v <= stop; v += step)
      out.push_back(v);
  }
  return out;
}

/// "1:2,9:10,11:12" -> {(1,2), (9,10), (11,12)}.
inline std::vector<std::pair<std::size_t, std::size_t>> parse_pairs(std::string_view text)
{
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (text.empty())
    throw invalid_parameter("empty pair list");
  for (auto item : detail::split(text, ','))
  {
    const auto parts = detail::split(item, ':');
    if (parts.size() != 2)
      throw invalid_parameter("pair must be a:b, got '" + std::string{item} + "'");
    out.emplace_back(detail::to_size(parts[0]), detail::to_size(parts[1]));
  }
  return out;
}

inline std::vector<std::string> parse_words(std::string_view text)
{
  std::vector<std::string> out;
  for (auto item : detail::split(text, ','))
  {
    if (item.empty())
      throw invalid_parameter("empty item in list '" + std::string{text} + "'");
    out.emplace_back(item);
  }
  return out;
}

} // namespace rlnc::grid
