#include "rlnc/codec.hpp"
#include "rlnc/random.hpp"
#include "rlnc/wire.hpp"

#include <gtest/gtest.h>

TEST(Wire, PacketLayoutIsBitExact)
{
  // gen 0x0102, n = 3, f = 4, coeffs a,b,c -> 0xab 0xc0, payload de ad
  const rlnc::coded_packet pkt{0x0102, {0xa, 0xb, 0xc}, {0xde, 0xad}};
  const auto raw = rlnc::wire::serialize_packet(pkt, 4);
  EXPECT_EQ(raw, (rlnc::bytes{0x01, 0x02, 0x00, 0x03, 0x04, 0xab, 0xc0, 0xde, 0xad}));

  const auto back = rlnc::wire::parse_packet(raw, 2);
  EXPECT_EQ(back.packet, pkt);
  EXPECT_EQ(back.f, 4u);
  EXPECT_EQ(back.consumed, raw.size());
}

TEST(Wire, OddWidthCoefficientsPackAcrossBytes)
{
  // three 3-bit symbols 101 011 111 -> 1010 1111 1000 0000
  const rlnc::coded_packet pkt{7, {5, 3, 7}, {0x11}};
  const auto raw = rlnc::wire::serialize_packet(pkt, 3);
  EXPECT_EQ(raw, (rlnc::bytes{0x00, 0x07, 0x00, 0x03, 0x03, 0xaf, 0x80, 0x11}));
  EXPECT_EQ(rlnc::wire::parse_packet(raw, 1).packet, pkt);
}

TEST(Wire, SixteenBitCoefficients)
{
  const rlnc::coded_packet pkt{1, {0xbeef, 0x0102}, {9, 8}};
  const auto raw = rlnc::wire::serialize_packet(pkt, 16);
  EXPECT_EQ(raw, (rlnc::bytes{0x00, 0x01, 0x00, 0x02, 0x10, 0xbe, 0xef, 0x01, 0x02, 9, 8}));
}

TEST(Wire, RoundTripProperty)
{
  rlnc::rng_t rng{77};
  for (int k = 0; k < 500; ++k)
  {
    const auto f = static_cast<unsigned>(1 + rng() % 16);
    const std::size_t n = 1 + rng() % 20;
    rlnc::coded_packet pkt;
    pkt.gen_id = static_cast<std::uint32_t>(rng() & 0xffff);
    for (std::size_t i = 0; i < n; ++i)
      pkt.coeffs.push_back(static_cast<rlnc::symbol>(rng() & ((1u << f) - 1)));
    pkt.payload.resize(rng() % 33);
    for (auto& b : pkt.payload)
      b = static_cast<std::uint8_t>(rng());
    const auto raw = rlnc::wire::serialize_packet(pkt, f);
    ASSERT_EQ(raw.size(), rlnc::wire::packet_size(n, f, pkt.payload.size()));
    EXPECT_EQ(rlnc::wire::parse_packet(raw, pkt.payload.size()).packet, pkt);
  }
}

TEST(Wire, SerializeRejectsUnrepresentableValues)
{
  EXPECT_THROW(rlnc::wire::serialize_packet({0x10000, {1}, {}}, 8), rlnc::invalid_input);
  EXPECT_THROW(rlnc::wire::serialize_packet({0, {16}, {}}, 4), rlnc::invalid_input);
}

TEST(Wire, ParseErrorsNameOffsets)
{
  const rlnc::bytes short_header{0, 1, 0};
  try
  {
    rlnc::wire::parse_packet(short_header, 4, 100);
    FAIL();
  }
  catch (const rlnc::parse_error& e)
  {
    EXPECT_EQ(e.offset(), 103u);
  }

  const rlnc::bytes bad_f{0, 1, 0, 1, 17, 0, 0};
  try
  {
    rlnc::wire::parse_packet(bad_f, 1, 10);
    FAIL();
  }
  catch (const rlnc::parse_error& e)
  {
    EXPECT_EQ(e.offset(), 14u);
    EXPECT_NE(std::string{e.what()}.find("offset 14"), std::string::npos);
  }

  const rlnc::bytes zero_n{0, 1, 0, 0, 8};
  EXPECT_THROW(rlnc::wire::parse_packet(zero_n, 1), rlnc::parse_error);
}

namespace {

rlnc::wire::packet_file small_file()
{
  rlnc::coding_params p;
  p.n = 2;
  p.m = 3;
  p.fragment_size = 4;
  p.gf = rlnc::shared_field(8);
  const rlnc::bytes data{1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto seg = rlnc::segment(data, p);
  rlnc::rng_t rng{1};
  rlnc::wire::packet_file file;
  file.f = 8;
  file.n = 2;
  file.m = 3;
  file.fragment_size = 4;
  file.original_length = data.size();
  file.generation_count = static_cast<std::uint32_t>(seg.generations.size());
  for (const auto& g : seg.generations)
    for (auto& pkt : rlnc::encode_source(g, p, rng))
      file.packets.push_back(pkt);
  return file;
}

} // namespace

TEST(PacketFile, RoundTrip)
{
  const auto file = small_file();
  const auto raw = rlnc::wire::write_packet_file(file);
  EXPECT_EQ(raw.size(), rlnc::wire::file_header_size + 6 * rlnc::wire::packet_size(2, 8, 4));
  const auto back = rlnc::wire::read_packet_file(raw);
  EXPECT_EQ(back.packets, file.packets);
  EXPECT_EQ(back.original_length, 9u);
  EXPECT_EQ(back.generation_count, 2u);
}

TEST(PacketFile, CorruptHeaderReportsOffset)
{
  auto raw = rlnc::wire::write_packet_file(small_file());
  auto bad_magic = raw;
  bad_magic[1] = 'X';
  try
  {
    rlnc::wire::read_packet_file(bad_magic);
    FAIL();
  }
  catch (const rlnc::parse_error& e)
  {
    EXPECT_EQ(e.offset(), 1u);
  }

  // Second packet claims a different field width.
  auto bad_packet = raw;
  const auto second = rlnc::wire::file_header_size + rlnc::wire::packet_size(2, 8, 4);
  bad_packet[second + 4] = 4;
  try
  {
    rlnc::wire::read_packet_file(bad_packet);
    FAIL();
  }
  catch (const rlnc::parse_error& e)
  {
    EXPECT_EQ(e.offset(), second + 4);
  }

  auto truncated = raw;
  truncated.pop_back();
  EXPECT_THROW(rlnc::wire::read_packet_file(truncated), rlnc::parse_error);
}
