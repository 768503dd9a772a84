#pragma once

#include "rlnc/channel.hpp"
#include "rlnc/codec.hpp"
#include "rlnc/error.hpp"
#include "rlnc/gf.hpp"
#include "rlnc/random.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace rlnc {

/// Source S, N first-hop relays r_i, M second-hop relays R_j, and sinks.
///
/// Tier 0 links are S->r_i, tier 1 are r_i->R_j, tier 2 are R_j->sink.
/// Empty connectivity matrices mean complete bipartite wiring.
struct topology
{
  std::size_t n_first_hop = 3;
  std::size_t n_second_hop = 3;
  std::size_t n_sinks = 2;
  std::array<link_spec, 3> tiers{};
  std::vector<std::vector<bool>> first_to_second; ///< [N][M]
  std::vector<std::vector<bool>> second_to_sink;  ///< [M][sinks]

  bool feeds(std::size_t i, std::size_t j) const { return first_to_second.empty() || first_to_second[i][j]; }
  bool reaches(std::size_t j, std::size_t s) const { return second_to_sink.empty() || second_to_sink[j][s]; }

  void set_erasure(double delta)
  {
    for (auto& t : tiers)
      t.rate = delta;
  }

  void validate() const
  {
    if (n_first_hop < 1 || n_second_hop < 1 || n_sinks < 1)
      throw configuration_error("topology needs N >= 1, M >= 1 and at least one sink");
    if (!first_to_second.empty())
    {
      if (first_to_second.size() != n_first_hop)
        throw configuration_error("first_to_second must have N rows");
      for (const auto& row : first_to_second)
        if (row.size() != n_second_hop)
          throw configuration_error("first_to_second rows must have M entries");
    }
    if (!second_to_sink.empty())
    {
      if (second_to_sink.size() != n_second_hop)
        throw configuration_error("second_to_sink must have M rows");
      for (const auto& row : second_to_sink)
        if (row.size() != n_sinks)
          throw configuration_error("second_to_sink rows must have one entry per sink");
    }
    for (const auto& t : tiers)
    {
      try
      {
        (void)t.model();
      }
      catch (const invalid_parameter& e)
      {
        throw configuration_error(std::string{"bad link parameters: "} + e.what());
      }
    }
  }
};

enum class relay_strategy
{
  forward_only,
  recode
};

struct sim_config
{
  coding_params coding;
  topology topo;
  relay_strategy strategy = relay_strategy::recode;
  std::size_t total_packets = 2000; ///< coded packets emitted by the source over the whole run
  std::uint64_t seed = 1;
};

struct sim_result
{
  std::vector<double> pdr_per_sink;
  double mean_pdr = 0.0;
  std::size_t generations = 0;
  std::array<std::uint64_t, 3> packets_sent{};
  std::array<std::uint64_t, 3> packets_delivered{};
  std::uint64_t decode_failures = 0; ///< (generation, sink) pairs left undecoded

  friend bool operator==(const sim_result&, const sim_result&) = default;
};

namespace detail {

enum class source_mode
{
  coded,
  raw
};

inline sim_result run_network(const sim_config& cfg, source_mode mode)
{
  const auto& topo = cfg.topo;
  topo.validate();
  try
  {
    cfg.coding.validate();
  }
  catch (const invalid_parameter& e)
  {
    throw configuration_error(e.what());
  }

  const coding_params& cp = cfg.coding;
  const field& gf = *cp.gf;
  const std::size_t per_gen = mode == source_mode::coded ? cp.m : cp.n;
  if (cfg.total_packets < per_gen)
    throw configuration_error("total_packets must cover at least one generation");
  const std::size_t gens = cfg.total_packets / per_gen;
  const relay_strategy strategy = mode == source_mode::raw ? relay_strategy::forward_only : cfg.strategy;

  const std::size_t N = topo.n_first_hop;
  const std::size_t M = topo.n_second_hop;
  const std::size_t S = topo.n_sinks;

  std::vector<erasure_channel> tier0;
  std::vector<erasure_channel> tier1; // [i * M + j]
  std::vector<erasure_channel> tier2; // [j * S + s]
  for (std::size_t i = 0; i < N; ++i)
    tier0.emplace_back(topo.tiers[0].model(), derive_seed(cfg.seed, {0, i}));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < M; ++j)
      tier1.emplace_back(topo.tiers[1].model(), derive_seed(cfg.seed, {1, i, j}));
  for (std::size_t j = 0; j < M; ++j)
    for (std::size_t s = 0; s < S; ++s)
      tier2.emplace_back(topo.tiers[2].model(), derive_seed(cfg.seed, {2, j, s}));

  rng_t source_rng{derive_seed(cfg.seed, {3})};
  rng_t data_rng{derive_seed(cfg.seed, {5})};
  std::vector<rng_t> relay_rng;
  for (std::size_t j = 0; j < M; ++j)
    relay_rng.emplace_back(derive_seed(cfg.seed, {4, j}));

  sim_result result;
  result.generations = gens;
  std::vector<std::uint64_t> delivered(S, 0);

  auto send = [&](erasure_channel& link, int tier) {
    ++result.packets_sent[static_cast<std::size_t>(tier)];
    const bool ok = link.transmit();
    if (ok)
      ++result.packets_delivered[static_cast<std::size_t>(tier)];
    return ok;
  };

  std::vector<std::vector<coded_packet>> at_first(N);
  std::vector<std::vector<coded_packet>> at_second(M);

  for (std::size_t g = 0; g < gens; ++g)
  {
    generation gen;
    gen.gen_id = static_cast<std::uint32_t>(g);
    gen.fragments.assign(cp.n, bytes(cp.fragment_size));
    for (auto& frag : gen.fragments)
      for (auto& b : frag)
        b = static_cast<std::uint8_t>(data_rng() >> 56);

    std::vector<coded_packet> emitted;
    if (mode == source_mode::coded)
      emitted = encode_source(gen, cp, source_rng);
    else
      for (std::size_t k = 0; k < cp.n; ++k)
      {
        std::vector<symbol> unit(cp.n, 0);
        unit[k] = 1;
        emitted.push_back(combine(gen, unit, gf));
      }

    // Round 1: round-robin over the first-hop links.
    for (auto& v : at_first)
      v.clear();
    for (std::size_t k = 0; k < emitted.size(); ++k)
      if (send(tier0[k % N], 0))
        at_first[k % N].push_back(emitted[k]);

    // Round 2: first-hop relays store and forward to every connected R_j.
    for (auto& v : at_second)
      v.clear();
    for (std::size_t i = 0; i < N; ++i)
      for (const auto& pkt : at_first[i])
        for (std::size_t j = 0; j < M; ++j)
          if (topo.feeds(i, j) && send(tier1[i * M + j], 1))
            at_second[j].push_back(pkt);

    // Round 3: second-hop relays forward or recode.
    std::vector<std::vector<coded_packet>> outgoing(M);
    for (std::size_t j = 0; j < M; ++j)
    {
      if (at_second[j].empty())
        continue;
      if (strategy == relay_strategy::forward_only)
      {
        outgoing[j] = at_second[j];
        continue;
      }
      decoder buffer{gen.gen_id, cp};
      std::vector<coded_packet> innovative;
      for (const auto& pkt : at_second[j])
        if (buffer.add(pkt))
          innovative.push_back(pkt);
      outgoing[j] = recode(std::span<const coded_packet>{innovative}, innovative.size(), gf, relay_rng[j]);
    }

    // Round 4: second-hop relays to sinks.
    for (std::size_t s = 0; s < S; ++s)
    {
      decoder sink{gen.gen_id, cp};
      for (std::size_t j = 0; j < M; ++j)
        if (topo.reaches(j, s))
          for (const auto& pkt : outgoing[j])
            if (send(tier2[j * S + s], 2))
              sink.add(pkt);
      if (sink.complete())
      {
        if (sink.solve() != gen.fragments)
          throw std::logic_error("decoded generation differs from the source fragments");
        ++delivered[s];
      }
      else
      {
        ++result.decode_failures;
      }
    }
  }

  result.pdr_per_sink.resize(S);
  for (std::size_t s = 0; s < S; ++s)
    result.pdr_per_sink[s] = static_cast<double>(delivered[s]) / static_cast<double>(gens);
  result.mean_pdr = std::accumulate(result.pdr_per_sink.begin(), result.pdr_per_sink.end(), 0.0)
                  / static_cast<double>(S);
  return result;
}

} // namespace detail

/// Network-coded run: the source sends m coded packets per generation.
inline sim_result run_simulation(const sim_config& cfg)
{
  return detail::run_network(cfg, detail::source_mode::coded);
}

/// Plain fragmentation: n raw fragments per generation, store-and-forward
/// relays, delivered only if every fragment arrives. cfg.strategy and
/// cfg.coding.m are ignored.
inline sim_result run_fragmentation_baseline(const sim_config& cfg)
{
  return detail::run_network(cfg, detail::source_mode::raw);
}

/// Transmission scheme of a sweep row.
enum class scheme
{
  fragmentation, ///< "frag"
  nc_recode,     ///< "nc"
  nc_forward     ///< "nc-forward"
};

inline std::string to_string(scheme s)
{
  switch (s)
  {
  case scheme::fragmentation:
    return "frag";
  case scheme::nc_recode:
    return "nc";
  case scheme::nc_forward:
    return "nc-forward";
  }
  return "?";
}

inline scheme parse_scheme(const std::string& s)
{
  if (s == "frag")
    return scheme::fragmentation;
  if (s == "nc")
    return scheme::nc_recode;
  if (s == "nc-forward")
    return scheme::nc_forward;
  throw invalid_parameter("unknown strategy '" + s + "' (expected frag, nc or nc-forward)");
}

inline sim_result run_scheme(sim_config cfg, scheme s)
{
  switch (s)
  {
  case scheme::fragmentation:
    return run_fragmentation_baseline(cfg);
  case scheme::nc_recode:
    cfg.strategy = relay_strategy::recode;
    return run_simulation(cfg);
  case scheme::nc_forward:
    cfg.strategy = relay_strategy::forward_only;
    return run_simulation(cfg);
  }
  throw std::logic_error("unhandled scheme");
}

struct sweep_grid
{
  std::vector<scheme> strategies{scheme::nc_recode};
  std::vector<std::pair<std::size_t, std::size_t>> nm{{9, 10}};
  std::vector<std::uint32_t> field_sizes{256};
  std::vector<double> erasures{0.0}; ///< applied to every tier
  std::size_t replications = 1;
  sim_config base;
  unsigned threads = 0; ///< 0 = hardware concurrency
};

struct sweep_row
{
  std::string strategy;
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint32_t q = 0;
  std::size_t N = 0;
  std::size_t M = 0;
  double delta0 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  std::size_t replications = 0;
  double mean_pdr = 0.0;
  double stderr_pdr = 0.0;
};

/// Every grid point, in grid order (strategy, (n,m), q, erasure), with mean
/// and standard error over replications. Replication r of every point uses
/// the same derived seed, so points are compared under common random numbers.
inline std::vector<sweep_row> sweep(const sweep_grid& grid)
{
  if (grid.replications < 1)
    throw invalid_parameter("replications must be >= 1");

  struct point
  {
    scheme strategy;
    std::size_t n, m;
    std::uint32_t q;
    double erasure;
  };
  std::vector<point> points;
  for (auto s : grid.strategies)
    for (auto [n, m] : grid.nm)
      for (auto q : grid.field_sizes)
        for (double e : grid.erasures)
          points.push_back({s, n, m, q, e});

  auto make_config = [&](const point& p, std::size_t rep) {
    sim_config cfg = grid.base;
    cfg.coding.n = p.n;
    cfg.coding.m = p.m;
    cfg.coding.gf = shared_field(bits_for_size(p.q));
    cfg.topo.set_erasure(p.erasure);
    cfg.seed = derive_seed(grid.base.seed, {rep});
    return cfg;
  };
  // Surface configuration errors before spawning workers.
  for (const auto& p : points)
  {
    const auto cfg = make_config(p, 0);
    cfg.topo.validate();
    cfg.coding.validate();
  }

  const std::size_t jobs = points.size() * grid.replications;
  std::vector<double> pdr(jobs, 0.0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (std::size_t k = next++; k < jobs && !failed; k = next++)
    {
      try
      {
        const auto& p = points[k / grid.replications];
        pdr[k] = run_scheme(make_config(p, k % grid.replications), p.strategy).mean_pdr;
      }
      catch (...)
      {
        if (!failed.exchange(true))
          failure = std::current_exception();
      }
    }
  };

  unsigned threads = grid.threads ? grid.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  if (threads <= 1)
    worker();
  else
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back(worker);
  }
  if (failure)
    std::rethrow_exception(failure);

  std::vector<sweep_row> rows;
  rows.reserve(points.size());
  const auto reps = static_cast<double>(grid.replications);
  for (std::size_t i = 0; i < points.size(); ++i)
  {
    const auto& p = points[i];
    const auto first = pdr.begin() + static_cast<std::ptrdiff_t>(i * grid.replications);
    const auto last = first + static_cast<std::ptrdiff_t>(grid.replications);
    const double mean = std::accumulate(first, last, 0.0) / reps;
    double var = 0.0;
    for (auto it = first; it != last; ++it)
      var += (*it - mean) * (*it - mean);
    const double se = grid.replications > 1 ? std::sqrt(var / (reps - 1.0) / reps) : 0.0;

    rows.push_back({to_string(p.strategy), p.n, p.m, p.q, grid.base.topo.n_first_hop, grid.base.topo.n_second_hop,
                    p.erasure, p.erasure, p.erasure, grid.replications, mean, se});
  }
  return rows;
}

struct relay_candidate
{
  std::uint32_t id = 0;
  double signal = 0.0; ///< higher is better
};

/// The M candidates with the strongest signal, strongest first; ties go to
/// the lower identifier.
inline std::vector<std::uint32_t> geo_select_relays(std::vector<relay_candidate> candidates, std::size_t M)
{
  if (M > candidates.size())
    throw invalid_parameter("cannot select " + std::to_string(M) + " relays from " + std::to_string(candidates.size())
                            + " candidates");
  std::stable_sort(candidates.begin(), candidates.end(), [](const relay_candidate& a, const relay_candidate& b) {
    if (a.signal != b.signal)
      return a.signal > b.signal;
    return a.id < b.id;
  });
  std::vector<std::uint32_t> out;
  out.reserve(M);
  for (std::size_t k = 0; k < M; ++k)
    out.push_back(candidates[k].id);
  return out;
}

} // namespace rlnc
