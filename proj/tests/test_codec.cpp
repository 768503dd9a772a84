#include "oracles.hpp"
#include "rlnc/codec.hpp"
#include "rlnc/random.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace {

rlnc::coding_params params(std::size_t n, std::size_t m, std::size_t fragment_size, unsigned f)
{
  rlnc::coding_params p;
  p.n = n;
  p.m = m;
  p.fragment_size = fragment_size;
  p.gf = rlnc::shared_field(f);
  return p;
}

rlnc::bytes random_bytes(std::size_t len, rlnc::rng_t& rng)
{
  rlnc::bytes out(len);
  for (auto& b : out)
    b = static_cast<std::uint8_t>(rng() >> 56);
  return out;
}

rlnc::generation random_generation(const rlnc::coding_params& p, rlnc::rng_t& rng, std::uint32_t id = 0)
{
  rlnc::generation g;
  g.gen_id = id;
  for (std::size_t i = 0; i < p.n; ++i)
    g.fragments.push_back(random_bytes(p.fragment_size, rng));
  return g;
}

std::size_t oracle_rank(const std::vector<rlnc::coded_packet>& pkts, const rlnc::field& gf)
{
  std::vector<std::vector<std::uint32_t>> rows;
  for (const auto& p : pkts)
    rows.emplace_back(p.coeffs.begin(), p.coeffs.end());
  return oracle::gf_rank(rows, gf.bits(), gf.polynomial());
}

} // namespace

TEST(Segment, ExactFit)
{
  const rlnc::bytes data{1, 2, 3, 4};
  const auto seg = rlnc::segment(data, params(2, 2, 2, 8));
  ASSERT_EQ(seg.generations.size(), 1u);
  EXPECT_EQ(seg.generations[0].fragments, (std::vector<rlnc::bytes>{{1, 2}, {3, 4}}));
  EXPECT_EQ(seg.original_length, 4u);
}

TEST(Segment, TailIsZeroPadded)
{
  const rlnc::bytes data{1, 2, 3, 4, 5};
  const auto seg = rlnc::segment(data, params(2, 2, 2, 8));
  ASSERT_EQ(seg.generations.size(), 2u);
  EXPECT_EQ(seg.generations[1].gen_id, 1u);
  EXPECT_EQ(seg.generations[1].fragments, (std::vector<rlnc::bytes>{{5, 0}, {0, 0}}));
  std::size_t padding = 0;
  for (const auto& frag : seg.generations[1].fragments)
    padding += static_cast<std::size_t>(std::count(frag.begin(), frag.end(), 0));
  EXPECT_EQ(padding, 3u);
}

TEST(Segment, SingleByteIntoLargeFragment)
{
  const rlnc::bytes data{42};
  const auto seg = rlnc::segment(data, params(1, 1, 1024, 8));
  ASSERT_EQ(seg.generations.size(), 1u);
  ASSERT_EQ(seg.generations[0].fragments.size(), 1u);
  EXPECT_EQ(seg.generations[0].fragments[0][0], 42);
  EXPECT_EQ(seg.generations[0].fragments[0].size(), 1024u);
}

TEST(Segment, EmptyInputRejected)
{
  EXPECT_THROW(rlnc::segment(rlnc::bytes{}, params(2, 2, 2, 8)), rlnc::invalid_input);
}

TEST(Params, Validation)
{
  EXPECT_THROW(params(3, 2, 4, 8).validate(), rlnc::invalid_parameter);
  EXPECT_THROW(params(0, 2, 4, 8).validate(), rlnc::invalid_parameter);
  EXPECT_THROW(params(2, 2, 0, 8).validate(), rlnc::invalid_parameter);
  EXPECT_THROW(params(2, 2, 3, 16).validate(), rlnc::invalid_parameter);
  EXPECT_NO_THROW(params(2, 2, 3, 3).validate());
}

TEST(Encode, ScalarGeneration)
{
  const auto p = params(1, 1, 8, 8);
  rlnc::rng_t rng{1};
  const auto gen = random_generation(p, rng);
  const auto pkts = rlnc::encode_source(gen, p, rng);
  ASSERT_EQ(pkts.size(), 1u);
  const auto c = pkts[0].coeffs[0];
  ASSERT_NE(c, 0);
  for (std::size_t k = 0; k < 8; ++k)
    EXPECT_EQ(pkts[0].payload[k], p.gf->mul(c, gen.fragments[0][k]));

  const std::vector<rlnc::symbol> one{1};
  EXPECT_EQ(rlnc::combine(gen, one, *p.gf).payload, gen.fragments[0]);
}

TEST(Encode, BinaryXorRelay)
{
  // Three-node exchange: two plain packets, the relay's combination is a XOR b.
  const auto p = params(2, 3, 4, 1);
  rlnc::generation gen{0, {{0x12, 0x34, 0x56, 0x78}, {0xff, 0x00, 0xa5, 0x5a}}};
  const std::vector<std::vector<rlnc::symbol>> rows{{1, 0}, {0, 1}, {1, 1}};
  std::vector<rlnc::coded_packet> pkts;
  for (const auto& r : rows)
    pkts.push_back(rlnc::combine(gen, r, *p.gf));
  for (std::size_t k = 0; k < 4; ++k)
    EXPECT_EQ(pkts[2].payload[k], gen.fragments[0][k] ^ gen.fragments[1][k]);

  // A holds a; from a XOR b it recovers b.
  rlnc::decoder d{0, p};
  EXPECT_TRUE(d.add(pkts[0]));
  EXPECT_TRUE(d.add(pkts[2]));
  EXPECT_EQ(d.solve(), gen.fragments);

  // Random GF(2) source coding: every (1,1) packet carries the XOR.
  rlnc::rng_t rng{9};
  for (int k = 0; k < 20; ++k)
    for (const auto& pkt : rlnc::encode_source(gen, p, rng))
    {
      if (pkt.coeffs == std::vector<rlnc::symbol>{1, 1})
      {
        EXPECT_EQ(pkt.payload, pkts[2].payload);
      }
    }
}

TEST(Encode, AnyIndependentSubsetDecodes)
{
  const auto p = params(3, 5, 32, 8);
  rlnc::rng_t rng{2024};
  for (int trial = 0; trial < 20; ++trial)
  {
    const auto gen = random_generation(p, rng);
    const auto pkts = rlnc::encode_source(gen, p, rng);
    for (std::size_t a = 0; a < 5; ++a)
      for (std::size_t b = a + 1; b < 5; ++b)
        for (std::size_t c = b + 1; c < 5; ++c)
        {
          const std::vector<rlnc::coded_packet> subset{pkts[a], pkts[b], pkts[c]};
          rlnc::decoder d{0, p};
          for (const auto& pkt : subset)
            d.add(pkt);
          ASSERT_EQ(d.rank(), oracle_rank(subset, *p.gf));
          if (d.complete())
          {
            EXPECT_EQ(d.solve(), gen.fragments);
          }
        }
  }
}

TEST(Encode, RejectsMismatchedGeneration)
{
  const auto p = params(3, 4, 4, 8);
  rlnc::rng_t rng{1};
  auto gen = random_generation(p, rng);
  gen.fragments.pop_back();
  EXPECT_THROW(rlnc::encode_source(gen, p, rng), rlnc::invalid_input);
}

TEST(Recode, ScalarCase)
{
  const auto p = params(4, 4, 16, 8);
  rlnc::rng_t rng{3};
  const auto gen = random_generation(p, rng);
  const auto in = rlnc::encode_source(gen, p, rng);
  const std::vector<rlnc::coded_packet> one{in[0]};
  const auto out = rlnc::recode(std::span{one}, 1, *p.gf, rng);
  ASSERT_EQ(out.size(), 1u);
  const auto alpha = p.gf->div(out[0].coeffs[0], in[0].coeffs[0]);
  ASSERT_NE(alpha, 0);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_EQ(out[0].coeffs[i], p.gf->mul(alpha, in[0].coeffs[i]));
  for (std::size_t k = 0; k < 16; ++k)
    EXPECT_EQ(out[0].payload[k], p.gf->mul(alpha, in[0].payload[k]));
}

TEST(Recode, TwoIndependentInputsKeepRankTwo)
{
  const auto p = params(4, 4, 4, 8);
  rlnc::rng_t rng{4};
  constexpr int trials = 4000;
  int full = 0;
  int usable = 0;
  for (int t = 0; t < trials; ++t)
  {
    const auto gen = random_generation(p, rng);
    auto in = rlnc::encode_source(gen, p, rng);
    in.resize(2);
    if (oracle_rank(in, *p.gf) != 2)
      continue;
    ++usable;
    const auto out = rlnc::recode(std::span{in}, 2, *p.gf, rng);
    full += oracle_rank(out, *p.gf) == 2 ? 1 : 0;
  }
  const double bound = 1.0 - 2.0 / 256.0;
  const double sigma = std::sqrt(bound * (1 - bound) / usable);
  EXPECT_GE(static_cast<double>(full) / usable, bound - 3 * sigma);
}

TEST(Recode, OutputsStayInInputRowSpace)
{
  const auto p = params(5, 5, 8, 4);
  rlnc::rng_t rng{5};
  const auto gen = random_generation(p, rng);
  auto in = rlnc::encode_source(gen, p, rng);
  in.resize(3);
  rlnc::decoder d{0, p};
  for (const auto& pkt : in)
    d.add(pkt);
  const auto held = d.rank();
  for (const auto& pkt : rlnc::recode(std::span{in}, 10, *p.gf, rng))
    EXPECT_FALSE(d.add(pkt));
  EXPECT_EQ(d.rank(), held);
}

TEST(Recode, RejectsBadInput)
{
  const auto p = params(2, 2, 4, 8);
  rlnc::rng_t rng{6};
  EXPECT_THROW(rlnc::recode(std::span<const rlnc::coded_packet>{}, 1, *p.gf, rng), rlnc::invalid_input);
  auto a = rlnc::encode_source(random_generation(p, rng, 0), p, rng);
  a.push_back(rlnc::encode_source(random_generation(p, rng, 1), p, rng)[0]);
  EXPECT_THROW(rlnc::recode(std::span{a}, 1, *p.gf, rng), rlnc::invalid_input);
}

TEST(Decoder, DuplicateAndZeroRowsAreNotInnovative)
{
  const auto p = params(3, 3, 4, 8);
  rlnc::rng_t rng{7};
  const auto gen = random_generation(p, rng);
  const auto pkts = rlnc::encode_source(gen, p, rng);
  rlnc::decoder d{0, p};
  EXPECT_TRUE(d.add(pkts[0]));
  EXPECT_FALSE(d.add(pkts[0]));
  EXPECT_EQ(d.rank(), 1u);

  rlnc::coded_packet zero{0, {0, 0, 0}, rlnc::bytes(4, 0)};
  EXPECT_FALSE(d.add(zero));
  EXPECT_EQ(d.rank(), 1u);
}

TEST(Decoder, IndependentRowsEachRaiseRank)
{
  const auto p = params(6, 6, 8, 8);
  rlnc::rng_t rng{8};
  const auto gen = random_generation(p, rng);
  rlnc::decoder d{0, p};
  // Lower-triangular rows with nonzero diagonal are independent by construction.
  for (std::size_t i = 0; i < 6; ++i)
  {
    std::vector<rlnc::symbol> row(6, 0);
    for (std::size_t k = 0; k <= i; ++k)
      row[k] = rlnc::random_nonzero(*p.gf, rng);
    EXPECT_TRUE(d.add(rlnc::combine(gen, row, *p.gf)));
    EXPECT_EQ(d.rank(), i + 1);
  }
  EXPECT_EQ(d.solve(), gen.fragments);
}

TEST(Decoder, KeepsReducedEchelonForm)
{
  const auto p = params(5, 8, 4, 4);
  rlnc::rng_t rng{9};
  const auto gen = random_generation(p, rng);
  rlnc::decoder d{0, p};
  std::vector<rlnc::coded_packet> seen;
  for (const auto& pkt : rlnc::encode_source(gen, p, rng))
  {
    const auto before = d.rank();
    const bool innovative = d.add(pkt);
    seen.push_back(pkt);
    EXPECT_GE(d.rank(), before);
    EXPECT_EQ(innovative, d.rank() > before);
    EXPECT_EQ(d.rank(), std::min<std::size_t>(5, oracle_rank(seen, *p.gf)));

    const auto rows = d.coefficient_rows();
    std::size_t last_pivot = 0;
    for (std::size_t r = 0; r < rows.size(); ++r)
    {
      const auto pivot = static_cast<std::size_t>(
        std::find_if(rows[r].begin(), rows[r].end(), [](auto s) { return s != 0; }) - rows[r].begin());
      ASSERT_LT(pivot, 5u);
      EXPECT_EQ(rows[r][pivot], 1);
      if (r > 0)
      {
        EXPECT_GT(pivot, last_pivot);
      }
      last_pivot = pivot;
      for (std::size_t o = 0; o < rows.size(); ++o)
      {
        if (o != r)
        {
          EXPECT_EQ(rows[o][pivot], 0);
        }
      }
    }
  }
}

TEST(Decoder, RejectsForeignPackets)
{
  const auto p = params(2, 2, 4, 8);
  rlnc::decoder d{3, p};
  EXPECT_THROW(d.add(rlnc::coded_packet{4, {1, 0}, rlnc::bytes(4)}), rlnc::invalid_input);
  EXPECT_THROW(d.add(rlnc::coded_packet{3, {1, 0, 0}, rlnc::bytes(4)}), rlnc::invalid_input);
  EXPECT_THROW(d.add(rlnc::coded_packet{3, {1, 0}, rlnc::bytes(5)}), rlnc::invalid_input);
}

TEST(Solve, IdentityCoefficients)
{
  const auto p = params(3, 3, 4, 8);
  rlnc::rng_t rng{10};
  const auto gen = random_generation(p, rng);
  rlnc::decoder d{0, p};
  for (std::size_t i = 0; i < 3; ++i)
  {
    std::vector<rlnc::symbol> unit(3, 0);
    unit[i] = 1;
    const auto pkt = rlnc::combine(gen, unit, *p.gf);
    EXPECT_EQ(pkt.payload, gen.fragments[i]);
    d.add(pkt);
  }
  EXPECT_EQ(d.solve(), gen.fragments);
}

TEST(Solve, RoundTripAcrossFieldWidths)
{
  rlnc::rng_t rng{11};
  for (unsigned f : {1u, 3u, 4u, 8u, 16u})
  {
    const auto p = params(4, 4, f == 3 ? 6 : 16, f);
    for (int trial = 0; trial < 10; ++trial)
    {
      const auto gen = random_generation(p, rng);
      auto pkts = rlnc::encode_source(gen, p, rng);
      while (oracle_rank(pkts, *p.gf) < 4)
        pkts = rlnc::encode_source(gen, p, rng);
      rlnc::decoder d{0, p};
      for (const auto& pkt : pkts)
        EXPECT_TRUE(d.add(pkt));
      EXPECT_EQ(d.solve(), gen.fragments) << "f=" << f;
    }
  }
}

TEST(Solve, RankDeficientReportsRank)
{
  const auto p = params(4, 4, 8, 8);
  rlnc::rng_t rng{12};
  const auto gen = random_generation(p, rng);
  const auto pkts = rlnc::encode_source(gen, p, rng);
  rlnc::decoder d{0, p};
  for (std::size_t k = 0; k < 3; ++k)
    d.add(pkts[k]);
  ASSERT_EQ(d.rank(), 3u);
  try
  {
    (void)d.solve();
    FAIL() << "expected not_decodable";
  }
  catch (const rlnc::not_decodable& e)
  {
    EXPECT_EQ(e.rank(), 3u);
    EXPECT_EQ(e.needed(), 4u);
  }
}

TEST(Reassemble, MebibyteRoundTrip)
{
  const auto p = params(11, 12, 1024, 8);
  rlnc::rng_t rng{13};
  const auto data = random_bytes(1 << 20, rng);
  const auto seg = rlnc::segment(data, p);
  std::map<std::uint32_t, std::vector<rlnc::bytes>> decoded;
  for (const auto& gen : seg.generations)
  {
    rlnc::decoder d{gen.gen_id, p};
    for (const auto& pkt : rlnc::encode_source(gen, p, rng))
      d.add(pkt);
    ASSERT_TRUE(d.complete());
    decoded.emplace(gen.gen_id, d.solve());
  }
  EXPECT_EQ(rlnc::reassemble(decoded, seg.original_length, p.n, p.fragment_size), data);
}

TEST(Reassemble, SingleGenerationIsConcatenation)
{
  std::map<std::uint32_t, std::vector<rlnc::bytes>> decoded{{0, {{1, 2}, {3, 4}}}};
  EXPECT_EQ(rlnc::reassemble(decoded, 4, 2, 2), (rlnc::bytes{1, 2, 3, 4}));
}

TEST(Reassemble, MissingGenerationIsIncomplete)
{
  std::map<std::uint32_t, std::vector<rlnc::bytes>> decoded{{0, {{1, 2}, {3, 4}}}};
  EXPECT_THROW(rlnc::reassemble(decoded, 5, 2, 2), rlnc::incomplete_file);
}

TEST(RoundTrip, RandomParametersProperty)
{
  rlnc::rng_t rng{14};
  for (int trial = 0; trial < 60; ++trial)
  {
    const unsigned widths[] = {1, 2, 4, 5, 8, 16};
    const unsigned f = widths[rng() % 6];
    const std::size_t n = 1 + rng() % 8;
    const std::size_t m = n + rng() % 3;
    std::size_t fs = 1 + rng() % 40;
    while (!rlnc::shared_field(f)->fits_region(fs))
      ++fs;
    const auto p = params(n, m, fs, f);
    const auto data = random_bytes(1 + rng() % 500, rng);
    const auto seg = rlnc::segment(data, p);

    std::map<std::uint32_t, std::vector<rlnc::bytes>> decoded;
    bool all = true;
    for (const auto& gen : seg.generations)
    {
      auto pkts = rlnc::encode_source(gen, p, rng);
      // drop one packet when there is redundancy
      if (m > n)
        pkts.erase(pkts.begin() + static_cast<std::ptrdiff_t>(rng() % pkts.size()));
      rlnc::decoder d{gen.gen_id, p};
      for (const auto& pkt : pkts)
        d.add(pkt);
      ASSERT_EQ(d.rank(), std::min(n, oracle_rank(pkts, *p.gf)));
      if (d.complete())
        decoded.emplace(gen.gen_id, d.solve());
      else
      {
        all = false;
        EXPECT_THROW((void)d.solve(), rlnc::not_decodable);
      }
    }
    if (all)
      EXPECT_EQ(rlnc::reassemble(decoded, seg.original_length, n, fs), data);
    else
      EXPECT_THROW(rlnc::reassemble(decoded, seg.original_length, n, fs), rlnc::incomplete_file);
  }
}
