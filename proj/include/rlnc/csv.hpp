#pragma once

#include "rlnc/bounds.hpp"
#include "rlnc/crosscheck.hpp"
#include "rlnc/simnet.hpp"

#include <cstdio>
#include <span>
#include <string>

namespace rlnc::csv {

inline std::string num(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string num(std::uint64_t v) { return std::to_string(v); }

inline constexpr const char* sweep_header =
  "strategy,n,m,q,N,M,delta0,delta1,delta2,replications,mean_pdr,stderr_pdr";

inline std::string to_csv(std::span<const sweep_row> rows)
{
  std::string out = std::string{sweep_header} + "\n";
  for (const auto& r : rows)
  {
    out += r.strategy + "," + num(std::uint64_t{r.n}) + "," + num(std::uint64_t{r.m}) + "," + num(std::uint64_t{r.q})
         + "," + num(std::uint64_t{r.N}) + "," + num(std::uint64_t{r.M}) + "," + num(r.delta0) + "," + num(r.delta1)
         + "," + num(r.delta2) + "," + num(std::uint64_t{r.replications}) + "," + num(r.mean_pdr) + ","
         + num(r.stderr_pdr) + "\n";
  }
  return out;
}

// negative_base marks points where psi < 1/q (see bounds::failure_bound).
inline constexpr const char* surface_header = "M,m,n,N,q,delta0,delta1,delta2,psi,p_fail_raw,p_fail_clamped,"
                                              "p_decode_lower,p_decode_inter_lower,negative_base";

inline std::string to_csv(std::span<const bounds::surface_row> rows)
{
  std::string out = std::string{surface_header} + "\n";
  for (const auto& [p, v] : rows)
  {
    out += num(std::uint64_t{p.M}) + "," + num(std::uint64_t{p.m}) + "," + num(std::uint64_t{p.n}) + ","
         + num(std::uint64_t{p.N}) + "," + num(p.q) + "," + num(p.delta0) + "," + num(p.delta1) + "," + num(p.delta2)
         + "," + num(v.psi) + "," + num(v.p_fail_raw) + "," + num(v.p_fail_upper) + "," + num(v.p_decode_lower) + ","
         + num(v.p_decode_inter_lower) + "," + (v.negative_base ? "1" : "0") + "\n";
  }
  return out;
}

inline constexpr const char* crosscheck_header =
  "M,m,n,N,q,delta0,delta1,delta2,samples,empirical_success,stderr,p_decode_lower,margin,pass";

inline std::string to_csv(std::span<const crosscheck_row> rows)
{
  std::string out = std::string{crosscheck_header} + "\n";
  for (const auto& r : rows)
  {
    const auto& p = r.point;
    out += num(std::uint64_t{p.M}) + "," + num(std::uint64_t{p.m}) + "," + num(std::uint64_t{p.n}) + ","
         + num(std::uint64_t{p.N}) + "," + num(p.q) + "," + num(p.delta0) + "," + num(p.delta1) + "," + num(p.delta2)
         + "," + num(std::uint64_t{r.generations}) + "," + num(r.empirical) + "," + num(r.stderr_empirical) + ","
         + num(r.bound) + "," + num(r.margin) + "," + (r.pass ? "pass" : "fail") + "\n";
  }
  return out;
}

} // namespace rlnc::csv
