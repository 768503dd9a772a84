// rlnc command-line driver: bound surfaces, network simulation sweeps, file
// encode/decode and the bound-vs-simulation cross-check.
//
// Exit codes: 0 success, 1 usage error, 2 runtime or data error,
// 3 cross-check failure.

#include "rlnc/bounds.hpp"
#include "rlnc/codec.hpp"
#include "rlnc/crosscheck.hpp"
#include "rlnc/csv.hpp"
#include "rlnc/grid.hpp"
#include "rlnc/simnet.hpp"
#include "rlnc/wire.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum exit_code : int
{
  ok = 0,
  usage = 1,
  runtime = 2,
  crosscheck_failed = 3
};

struct usage_error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& text)
{
  if (path.empty() || path == "-")
  {
    std::cout << text;
    return;
  }
  std::ofstream out{path, std::ios::binary};
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out)
    throw std::runtime_error("failed writing " + path);
}

rlnc::bytes read_file(const std::string& path)
{
  std::ifstream in{path, std::ios::binary};
  if (!in)
    throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>{in}, std::istreambuf_iterator<char>{}};
}

void write_file(const std::string& path, const rlnc::bytes& data)
{
  std::ofstream out{path, std::ios::binary};
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out)
    throw std::runtime_error("failed writing " + path);
}

/// Expand `--config FILE` into flags. Lines are `key = value`; `#` starts a
/// comment. Keys already given on the command line are skipped, so flags win.
std::vector<std::string> expand_config(std::vector<std::string> args)
{
  std::vector<std::string> out;
  std::string config_path;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i)
  {
    if (args[i] == "--config" && i + 1 < args.size())
    {
      config_path = args[++i];
      continue;
    }
    if (args[i].rfind("--config=", 0) == 0)
    {
      config_path = args[i].substr(9);
      continue;
    }
    if (args[i].rfind("--", 0) == 0)
      given.insert(args[i].substr(2, args[i].find('=') == std::string::npos ? std::string::npos : args[i].find('=') - 2));
    out.push_back(args[i]);
  }
  if (config_path.empty())
    return out;

  std::ifstream in{config_path};
  if (!in)
    throw usage_error("cannot read config file " + config_path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw usage_error(config_path + ":" + std::to_string(lineno) + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (given.count(key))
      continue;
    out.push_back("--" + key);
    out.push_back(value);
  }
  return out;
}

template <class F>
auto as_usage(F&& f) -> decltype(f())
{
  try
  {
    return f();
  }
  catch (const rlnc::invalid_parameter& e)
  {
    throw usage_error(e.what());
  }
}

// ---------------------------------------------------------------- bounds

struct bounds_flags
{
  std::size_t n = 3;
  std::size_t N = 3;
  std::uint64_t q = 256;
  double delta1 = 0.01;
  double delta2 = 0.01;
  std::string M = "2,4";
  std::string m = "3:8";
  std::string delta0 = "0:0.9:0.05";
  std::string output = "-";
};

int cmd_bounds(const bounds_flags& f)
{
  rlnc::bounds::surface_grid g;
  as_usage([&] {
    g.n = f.n;
    g.N = f.N;
    g.q = f.q;
    g.delta1 = f.delta1;
    g.delta2 = f.delta2;
    g.M_values = rlnc::grid::parse_sizes(f.M);
    g.m_values = rlnc::grid::parse_sizes(f.m);
    g.delta0_values = rlnc::grid::parse_reals(f.delta0);
    for (auto m : g.m_values)
      if (m < g.n)
        throw rlnc::invalid_parameter("m=" + std::to_string(m) + " is below n=" + std::to_string(g.n));
    for (auto M : g.M_values)
      for (double d0 : g.delta0_values)
        rlnc::bounds::params{g.n, g.m_values.front(), g.N, M, g.q, d0, g.delta1, g.delta2}.validate();
    return 0;
  });
  const auto rows = rlnc::bounds::sweep_surface(g);
  write_output(f.output, rlnc::csv::to_csv(rows));
  return ok;
}

// ---------------------------------------------------------------- sim

struct sim_flags
{
  std::string strategies = "nc";
  std::string nm = "9:10";
  std::string q = "256";
  std::string erasure = "0.05:0.4:0.05";
  std::size_t packets = 2000;
  std::size_t sinks = 2;
  std::size_t N = 3;
  std::size_t M = 3;
  std::size_t fragment_size = 8;
  std::size_t reps = 30;
  std::uint64_t seed = 1;
  std::string channel = "bernoulli";
  double burst = 5.0;
  unsigned threads = 0;
  std::string output = "-";
};

int cmd_sim(const sim_flags& f)
{
  rlnc::sweep_grid g;
  as_usage([&] {
    g.strategies.clear();
    for (const auto& s : rlnc::grid::parse_words(f.strategies))
      g.strategies.push_back(rlnc::parse_scheme(s));
    g.nm = rlnc::grid::parse_pairs(f.nm);
    for (auto [n, m] : g.nm)
      if (n < 1 || m < n)
        throw rlnc::invalid_parameter("invalid (n,m) = (" + std::to_string(n) + "," + std::to_string(m)
                                      + "): need m >= n >= 1");
    g.field_sizes.clear();
    for (auto q : rlnc::grid::parse_sizes(f.q))
    {
      (void)rlnc::bits_for_size(q);
      g.field_sizes.push_back(static_cast<std::uint32_t>(q));
    }
    g.erasures = rlnc::grid::parse_reals(f.erasure);
    if (f.reps < 1)
      throw rlnc::invalid_parameter("--reps must be >= 1");
    if (f.channel != "bernoulli" && f.channel != "ge")
      throw rlnc::invalid_parameter("--channel must be bernoulli or ge");

    g.replications = f.reps;
    g.threads = f.threads;
    g.base.seed = f.seed;
    g.base.total_packets = f.packets;
    g.base.coding.fragment_size = f.fragment_size;
    g.base.topo.n_first_hop = f.N;
    g.base.topo.n_second_hop = f.M;
    g.base.topo.n_sinks = f.sinks;
    for (auto& t : g.base.topo.tiers)
    {
      t.type = f.channel == "ge" ? rlnc::link_spec::kind::gilbert_elliot : rlnc::link_spec::kind::bernoulli;
      t.burst_length = f.burst;
    }
    return 0;
  });
  std::vector<rlnc::sweep_row> rows;
  try
  {
    rows = rlnc::sweep(g);
  }
  catch (const rlnc::configuration_error& e)
  {
    throw usage_error(e.what());
  }
  write_output(f.output, rlnc::csv::to_csv(rows));
  return ok;
}

// ---------------------------------------------------------------- codec

struct encode_flags
{
  std::string input;
  std::string output;
  std::size_t n = 9;
  std::size_t m = 10;
  unsigned f = 8;
  std::size_t fragment_size = 1024;
  std::uint64_t seed = 1;
};

int cmd_encode(const encode_flags& fl)
{
  rlnc::coding_params p;
  as_usage([&] {
    if (fl.f < 1 || fl.f > rlnc::max_field_bits)
      throw rlnc::invalid_parameter("--f must be in [1, 16]");
    if (fl.n > 0xffff || fl.m > 0xffff)
      throw rlnc::invalid_parameter("--n and --m must fit in 16 bits");
    p.n = fl.n;
    p.m = fl.m;
    p.fragment_size = fl.fragment_size;
    p.gf = rlnc::shared_field(fl.f);
    p.validate();
    return 0;
  });

  const auto data = read_file(fl.input);
  if (data.empty())
    throw std::runtime_error("input file " + fl.input + " is empty");
  const auto seg = rlnc::segment(data, p);
  if (seg.generations.size() > 0x10000)
    throw std::runtime_error("file needs " + std::to_string(seg.generations.size())
                             + " generations; the wire format holds at most 65536");

  rlnc::wire::packet_file file;
  file.f = fl.f;
  file.n = p.n;
  file.m = p.m;
  file.fragment_size = p.fragment_size;
  file.original_length = seg.original_length;
  file.generation_count = static_cast<std::uint32_t>(seg.generations.size());
  rlnc::rng_t rng{rlnc::derive_seed(fl.seed, {})};
  for (const auto& gen : seg.generations)
  {
    auto coded = rlnc::encode_source(gen, p, rng);
    file.packets.insert(file.packets.end(), coded.begin(), coded.end());
  }
  write_file(fl.output, rlnc::wire::write_packet_file(file));
  std::cerr << "encoded " << seg.original_length << " bytes into " << file.generation_count << " generations, "
            << file.packets.size() << " packets\n";
  return ok;
}

struct decode_flags
{
  std::string input;
  std::string output;
};

int cmd_decode(const decode_flags& fl)
{
  const auto raw = read_file(fl.input);
  const auto file = rlnc::wire::read_packet_file(raw);
  const auto gf = rlnc::shared_field(file.f);

  std::vector<rlnc::decoder> decoders;
  decoders.reserve(file.generation_count);
  for (std::uint32_t g = 0; g < file.generation_count; ++g)
    decoders.emplace_back(g, file.n, file.fragment_size, gf);
  for (const auto& pkt : file.packets)
    decoders[pkt.gen_id].add(pkt);

  std::map<std::uint32_t, std::vector<rlnc::bytes>> solved;
  bool complete = true;
  for (const auto& d : decoders)
  {
    if (d.complete())
      solved.emplace(d.gen_id(), d.solve());
    else
    {
      complete = false;
      std::cerr << "generation " << d.gen_id() << ": rank " << d.rank() << " of " << d.size() << "\n";
    }
  }
  if (!complete)
  {
    std::cerr << "not decodable\n";
    return runtime;
  }
  write_file(fl.output, rlnc::reassemble(solved, file.original_length, file.n, file.fragment_size));
  return ok;
}

// ---------------------------------------------------------------- crosscheck

struct crosscheck_flags
{
  std::string n = "3";
  std::string N = "3";
  std::string M = "2,4";
  std::string m = "3:5";
  std::string delta0 = "0.1,0.3,0.5";
  std::string delta1 = "0.01";
  std::string delta2 = "0.01";
  std::uint64_t q = 256;
  std::size_t reps = 30;
  std::size_t gens = 200;
  std::size_t sinks = 1;
  double sigmas = 3.0;
  double exponent_scale = 1.0;
  std::uint64_t seed = 1;
  std::string output = "-";
};

int cmd_crosscheck(const crosscheck_flags& f)
{
  rlnc::crosscheck_grid g;
  rlnc::crosscheck_options opt;
  as_usage([&] {
    g.n_values = rlnc::grid::parse_sizes(f.n);
    g.N_values = rlnc::grid::parse_sizes(f.N);
    g.M_values = rlnc::grid::parse_sizes(f.M);
    g.m_values = rlnc::grid::parse_sizes(f.m);
    g.delta0_values = rlnc::grid::parse_reals(f.delta0);
    g.delta1_values = rlnc::grid::parse_reals(f.delta1);
    g.delta2_values = rlnc::grid::parse_reals(f.delta2);
    g.q = f.q;
    (void)rlnc::bits_for_size(f.q);
    if (f.reps < 1 || f.gens < 1 || f.sinks < 1)
      throw rlnc::invalid_parameter("--reps, --gens and --sinks must be >= 1");
    if (!(f.exponent_scale > 0.0))
      throw rlnc::invalid_parameter("--exponent-scale must be positive");
    return 0;
  });
  opt.replications = f.reps;
  opt.generations_per_replication = f.gens;
  opt.sinks = f.sinks;
  opt.sigmas = f.sigmas;
  opt.seed = f.seed;
  if (f.exponent_scale != 1.0)
  {
    const double scale = f.exponent_scale;
    opt.lower_bound = [scale](const rlnc::bounds::params& p) {
      return 1.0 - rlnc::bounds::pfail_with_exponent(p, p.exponent() * scale).clamped;
    };
  }

  std::vector<rlnc::crosscheck_row> rows;
  try
  {
    rows = rlnc::crosscheck(g, opt);
  }
  catch (const rlnc::invalid_parameter& e)
  {
    throw usage_error(e.what());
  }
  write_output(f.output, rlnc::csv::to_csv(rows));

  std::size_t failed = 0;
  for (const auto& r : rows)
    failed += r.pass ? 0 : 1;
  std::cerr << "crosscheck: " << rows.size() - failed << "/" << rows.size() << " points pass\n";
  return failed == 0 ? ok : crosscheck_failed;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Random linear network coding toolkit: bounds, relay network simulation, file codec", "rlnc"};
  app.require_subcommand(1);
  app.footer("Lists take comma-separated items; numeric items may be ranges start:stop[:step] (stop inclusive).\n"
             "--config FILE reads key=value lines mirroring the long flags; command-line flags win.\n"
             "Exit codes: 0 ok, 1 usage error, 2 runtime/data error, 3 crosscheck failure.");

  bounds_flags bf;
  auto* bounds = app.add_subcommand("bounds", "Decode-probability bound surface as CSV");
  bounds->add_option("--n", bf.n, "Fragments per generation")->capture_default_str();
  bounds->add_option("--N", bf.N, "First-hop relays")->capture_default_str();
  bounds->add_option("--q", bf.q, "Field size")->capture_default_str();
  bounds->add_option("--delta1", bf.delta1, "Erasure rate r_i -> R_j")->capture_default_str();
  bounds->add_option("--delta2", bf.delta2, "Erasure rate R_j -> sink")->capture_default_str();
  bounds->add_option("--M", bf.M, "Second-hop relay counts (list)")->capture_default_str();
  bounds->add_option("--m", bf.m, "Coded packets per generation (list)")->capture_default_str();
  bounds->add_option("--delta0", bf.delta0, "Erasure rate S -> r_i (list)")->capture_default_str();
  bounds->add_option("-o,--output", bf.output, "Output CSV, - for stdout")->capture_default_str();

  sim_flags sf;
  auto* sim = app.add_subcommand("sim", "Monte Carlo delivery-ratio sweep as CSV");
  sim->add_option("--strategies", sf.strategies, "frag, nc, nc-forward (list)")->capture_default_str();
  sim->add_option("--nm", sf.nm, "(n,m) pairs n:m (list)")->capture_default_str();
  sim->add_option("--q", sf.q, "Field sizes (list)")->capture_default_str();
  sim->add_option("--erasure", sf.erasure, "Per-link erasure rate, all tiers (list)")->capture_default_str();
  sim->add_option("--packets", sf.packets, "Source packets per run")->capture_default_str();
  sim->add_option("--sinks", sf.sinks, "Sinks")->capture_default_str();
  sim->add_option("--N", sf.N, "First-hop relays")->capture_default_str();
  sim->add_option("--M", sf.M, "Second-hop relays")->capture_default_str();
  sim->add_option("--fragment-size", sf.fragment_size, "Fragment bytes")->capture_default_str();
  sim->add_option("--reps", sf.reps, "Replications per grid point")->capture_default_str();
  sim->add_option("--seed", sf.seed, "Base seed")->capture_default_str();
  sim->add_option("--channel", sf.channel, "bernoulli or ge (Gilbert-Elliot)")->capture_default_str();
  sim->add_option("--burst", sf.burst, "Mean bad-state length for ge")->capture_default_str();
  sim->add_option("--threads", sf.threads, "Worker threads, 0 = all cores")->capture_default_str();
  sim->add_option("-o,--output", sf.output, "Output CSV, - for stdout")->capture_default_str();

  encode_flags ef;
  auto* enc = app.add_subcommand("codec-encode", "Encode a file into coded packets");
  enc->add_option("-i,--input", ef.input, "Input file")->required();
  enc->add_option("-o,--output", ef.output, "Packet file")->required();
  enc->add_option("--n", ef.n, "Fragments per generation")->capture_default_str();
  enc->add_option("--m", ef.m, "Coded packets per generation")->capture_default_str();
  enc->add_option("--f", ef.f, "Field width, q = 2^f")->capture_default_str();
  enc->add_option("--fragment-size", ef.fragment_size, "Fragment bytes")->capture_default_str();
  enc->add_option("--seed", ef.seed, "Coefficient seed")->capture_default_str();

  decode_flags df;
  auto* dec = app.add_subcommand("codec-decode", "Decode a packet file");
  dec->add_option("-i,--input", df.input, "Packet file")->required();
  dec->add_option("-o,--output", df.output, "Recovered file")->required();

  crosscheck_flags cf;
  auto* cc = app.add_subcommand("crosscheck", "Check simulated decode success against the lower bound");
  cc->add_option("--n", cf.n, "n values (list)")->capture_default_str();
  cc->add_option("--N", cf.N, "N values (list)")->capture_default_str();
  cc->add_option("--M", cf.M, "M values (list)")->capture_default_str();
  cc->add_option("--m", cf.m, "m values (list)")->capture_default_str();
  cc->add_option("--delta0", cf.delta0, "delta0 values (list)")->capture_default_str();
  cc->add_option("--delta1", cf.delta1, "delta1 values (list)")->capture_default_str();
  cc->add_option("--delta2", cf.delta2, "delta2 values (list)")->capture_default_str();
  cc->add_option("--q", cf.q, "Field size")->capture_default_str();
  cc->add_option("--reps", cf.reps, "Replications per point")->capture_default_str();
  cc->add_option("--gens", cf.gens, "Generations per replication")->capture_default_str();
  cc->add_option("--sinks", cf.sinks, "Sinks")->capture_default_str();
  cc->add_option("--sigmas", cf.sigmas, "Tolerance in standard errors")->capture_default_str();
  cc->add_option("--exponent-scale", cf.exponent_scale, "Diagnostic: scale the bound's exponent")
    ->capture_default_str();
  cc->add_option("--seed", cf.seed, "Base seed")->capture_default_str();
  cc->add_option("-o,--output", cf.output, "Output CSV, - for stdout")->capture_default_str();

  try
  {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  }
  catch (const CLI::ParseError& e)
  {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }
  catch (const usage_error& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  }

  try
  {
    if (*bounds)
      return cmd_bounds(bf);
    if (*sim)
      return cmd_sim(sf);
    if (*enc)
      return cmd_encode(ef);
    if (*dec)
      return cmd_decode(df);
    if (*cc)
      return cmd_crosscheck(cf);
  }
  catch (const usage_error& e)
  {
    std::cerr << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return usage;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return runtime;
  }
  return usage;
}
