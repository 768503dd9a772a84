#pragma once

#include "rlnc/bounds.hpp"
#include "rlnc/gf.hpp"
#include "rlnc/random.hpp"
#include "rlnc/simnet.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace rlnc {

/// Compare the analytical decode lower bound with Monte Carlo runs of the
/// recoding relay network.
struct crosscheck_options
{
  std::size_t replications = 30;
  std::size_t generations_per_replication = 200;
  std::size_t sinks = 1;
  std::size_t fragment_size = 2;
  double sigmas = 3.0;
  std::uint64_t seed = 1;
  std::function<double(const bounds::params&)> lower_bound = [](const bounds::params& p) {
    return bounds::evaluate(p).p_decode_lower;
  };
};

struct crosscheck_row
{
  bounds::params point;
  std::size_t generations = 0; ///< (generation, sink) samples
  double empirical = 0.0;
  double stderr_empirical = 0.0;
  double bound = 0.0;
  double margin = 0.0; ///< empirical - bound
  bool pass = false;
};

inline crosscheck_row crosscheck_point(const bounds::params& p, const crosscheck_options& opt)
{
  p.validate();
  if (opt.replications < 1 || opt.generations_per_replication < 1 || opt.sinks < 1)
    throw invalid_parameter("crosscheck needs at least one replication, generation and sink");

  sim_config cfg;
  cfg.coding.n = p.n;
  cfg.coding.m = p.m;
  cfg.coding.gf = shared_field(bits_for_size(p.q));
  cfg.coding.fragment_size = opt.fragment_size;
  cfg.topo.n_first_hop = p.N;
  cfg.topo.n_second_hop = p.M;
  cfg.topo.n_sinks = opt.sinks;
  cfg.topo.tiers[0].rate = p.delta0;
  cfg.topo.tiers[1].rate = p.delta1;
  cfg.topo.tiers[2].rate = p.delta2;
  cfg.strategy = relay_strategy::recode;
  cfg.total_packets = opt.generations_per_replication * p.m;

  double decoded = 0.0;
  std::size_t samples = 0;
  for (std::size_t r = 0; r < opt.replications; ++r)
  {
    cfg.seed = derive_seed(opt.seed, {r});
    const auto res = run_simulation(cfg);
    const auto count = res.generations * opt.sinks;
    decoded += static_cast<double>(count - res.decode_failures);
    samples += count;
  }

  crosscheck_row row;
  row.point = p;
  row.generations = samples;
  row.empirical = decoded / static_cast<double>(samples);
  row.stderr_empirical = std::sqrt(row.empirical * (1.0 - row.empirical) / static_cast<double>(samples));
  row.bound = opt.lower_bound(p);
  row.margin = row.empirical - row.bound;
  row.pass = row.empirical >= row.bound - opt.sigmas * row.stderr_empirical;
  return row;
}

struct crosscheck_grid
{
  std::vector<std::size_t> n_values{3};
  std::vector<std::size_t> N_values{3};
  std::vector<std::size_t> M_values{2, 4};
  std::vector<std::size_t> m_values{3, 4, 5};
  std::vector<double> delta0_values{0.1, 0.3, 0.5};
  std::vector<double> delta1_values{0.01};
  std::vector<double> delta2_values{0.01};
  std::uint64_t q = 256;
};

inline std::vector<crosscheck_row> crosscheck(const crosscheck_grid& g, const crosscheck_options& opt)
{
  std::vector<crosscheck_row> rows;
  for (auto n : g.n_values)
    for (auto N : g.N_values)
      for (auto M : g.M_values)
        for (auto m : g.m_values)
        {
          if (m < n)
            continue;
          for (double d0 : g.delta0_values)
            for (double d1 : g.delta1_values)
              for (double d2 : g.delta2_values)
                rows.push_back(crosscheck_point({n, m, N, M, g.q, d0, d1, d2}, opt));
        }
  return rows;
}

} // namespace rlnc
