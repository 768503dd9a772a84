#pragma once

// Byte layouts.
//
// Coded packet (all integers big-endian):
//   gen_id  u16
//   n       u16
//   f       u8
//   coeffs  n symbols of f bits, packed MSB first, zero padded to a byte
//   payload fragment_size bytes
//
// Packet file, as written by `rlnc codec-encode`:
//   magic "RLNC", version u8 (=1), f u8, n u16, m u16, fragment_size u32,
//   original_length u64, generation_count u32, packet_count u32,
//   then packet_count coded packets back to back.

#include "rlnc/codec.hpp"
#include "rlnc/error.hpp"
#include "rlnc/gf.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rlnc::wire {

inline constexpr std::array<std::uint8_t, 4> file_magic = {'R', 'L', 'N', 'C'};
inline constexpr std::uint8_t file_version = 1;
inline constexpr std::size_t packet_header_size = 5;
inline constexpr std::size_t file_header_size = 30;

inline std::size_t coeff_bytes(std::size_t n, unsigned f) { return (n * f + 7) / 8; }

inline std::size_t packet_size(std::size_t n, unsigned f, std::size_t fragment_size)
{
  return packet_header_size + coeff_bytes(n, f) + fragment_size;
}

namespace detail {

inline void put_be(bytes& out, std::uint64_t v, unsigned width)
{
  for (unsigned i = width; i-- > 0;)
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_be(std::span<const std::uint8_t> in, std::size_t at, unsigned width)
{
  std::uint64_t v = 0;
  for (unsigned i = 0; i < width; ++i)
    v = (v << 8) | in[at + i];
  return v;
}

} // namespace detail

inline void append_packet(bytes& out, const coded_packet& pkt, unsigned f)
{
  if (f < 1 || f > max_field_bits)
    throw invalid_parameter("field width must be in [1, 16]");
  if (pkt.gen_id > 0xffff)
    throw invalid_input("gen_id " + std::to_string(pkt.gen_id) + " does not fit in 16 bits");
  if (pkt.coeffs.empty() || pkt.coeffs.size() > 0xffff)
    throw invalid_input("coefficient count must be in [1, 65535]");

  detail::put_be(out, pkt.gen_id, 2);
  detail::put_be(out, pkt.coeffs.size(), 2);
  out.push_back(static_cast<std::uint8_t>(f));

  const std::size_t start = out.size();
  out.resize(start + coeff_bytes(pkt.coeffs.size(), f), 0);
  std::size_t bit = start * 8;
  for (const symbol c : pkt.coeffs)
  {
    if (c >> f)
      throw invalid_input("coefficient " + std::to_string(c) + " exceeds " + std::to_string(f) + " bits");
    for (unsigned j = f; j-- > 0; ++bit)
      if ((c >> j) & 1u)
        out[bit >> 3] |= static_cast<std::uint8_t>(1u << (7 - (bit & 7)));
  }
  out.insert(out.end(), pkt.payload.begin(), pkt.payload.end());
}

inline bytes serialize_packet(const coded_packet& pkt, unsigned f)
{
  bytes out;
  out.reserve(packet_size(pkt.coeffs.size(), f, pkt.payload.size()));
  append_packet(out, pkt, f);
  return out;
}

struct parsed_packet
{
  coded_packet packet;
  unsigned f = 0;
  std::size_t consumed = 0;
};

/// Parse one packet from the front of `in`. `base_offset` is added to the
/// offsets reported in parse errors.
inline parsed_packet parse_packet(std::span<const std::uint8_t> in, std::size_t fragment_size,
                                  std::size_t base_offset = 0)
{
  if (in.size() < packet_header_size)
    throw parse_error("truncated packet header", base_offset + in.size());

  parsed_packet out;
  out.packet.gen_id = static_cast<std::uint32_t>(detail::get_be(in, 0, 2));
  const auto n = static_cast<std::size_t>(detail::get_be(in, 2, 2));
  out.f = in[4];
  if (n == 0)
    throw parse_error("coefficient count is zero", base_offset + 2);
  if (out.f < 1 || out.f > max_field_bits)
    throw parse_error("field width " + std::to_string(out.f) + " out of range", base_offset + 4);

  const std::size_t total = packet_size(n, out.f, fragment_size);
  if (in.size() < total)
    throw parse_error("truncated packet body", base_offset + in.size());

  out.packet.coeffs.resize(n);
  std::size_t bit = packet_header_size * 8;
  for (auto& c : out.packet.coeffs)
  {
    std::uint32_t v = 0;
    for (unsigned j = 0; j < out.f; ++j, ++bit)
      v = (v << 1) | ((in[bit >> 3] >> (7 - (bit & 7))) & 1u);
    c = static_cast<symbol>(v);
  }
  const std::size_t payload_at = packet_header_size + coeff_bytes(n, out.f);
  out.packet.payload.assign(in.begin() + static_cast<std::ptrdiff_t>(payload_at),
                            in.begin() + static_cast<std::ptrdiff_t>(total));
  out.consumed = total;
  return out;
}

struct packet_file
{
  unsigned f = 8;
  std::size_t n = 1;
  std::size_t m = 1;
  std::size_t fragment_size = 1;
  std::uint64_t original_length = 0;
  std::uint32_t generation_count = 0;
  std::vector<coded_packet> packets;
};

inline bytes write_packet_file(const packet_file& file)
{
  bytes out(file_magic.begin(), file_magic.end());
  out.push_back(file_version);
  out.push_back(static_cast<std::uint8_t>(file.f));
  detail::put_be(out, file.n, 2);
  detail::put_be(out, file.m, 2);
  detail::put_be(out, file.fragment_size, 4);
  detail::put_be(out, file.original_length, 8);
  detail::put_be(out, file.generation_count, 4);
  detail::put_be(out, file.packets.size(), 4);
  for (const auto& p : file.packets)
  {
    if (p.coeffs.size() != file.n || p.payload.size() != file.fragment_size)
      throw invalid_input("packet shape does not match the file header");
    append_packet(out, p, file.f);
  }
  return out;
}

inline packet_file read_packet_file(std::span<const std::uint8_t> in)
{
  using detail::get_be;
  if (in.size() < file_header_size)
    throw parse_error("truncated file header", in.size());
  for (std::size_t i = 0; i < file_magic.size(); ++i)
    if (in[i] != file_magic[i])
      throw parse_error("bad magic", i);
  if (in[4] != file_version)
    throw parse_error("unsupported version " + std::to_string(in[4]), 4);

  packet_file file;
  file.f = in[5];
  file.n = get_be(in, 6, 2);
  file.m = get_be(in, 8, 2);
  file.fragment_size = get_be(in, 10, 4);
  file.original_length = get_be(in, 14, 8);
  file.generation_count = static_cast<std::uint32_t>(get_be(in, 22, 4));
  const auto count = static_cast<std::size_t>(get_be(in, 26, 4));

  if (file.f < 1 || file.f > max_field_bits)
    throw parse_error("field width " + std::to_string(file.f) + " out of range", 5);
  if (file.n == 0)
    throw parse_error("n is zero", 6);
  if (file.m < file.n)
    throw parse_error("m is smaller than n", 8);
  if (file.fragment_size == 0 || (file.fragment_size * 8) % file.f != 0)
    throw parse_error("fragment_size is not a whole number of symbols", 10);
  if (file.original_length == 0
      || generation_count(file.original_length, file.n, file.fragment_size) != file.generation_count)
    throw parse_error("generation count does not match original length", 22);

  const std::size_t each = packet_size(file.n, file.f, file.fragment_size);
  if (in.size() - file_header_size != count * each)
    throw parse_error("packet area holds " + std::to_string(in.size() - file_header_size) + " bytes, expected "
                        + std::to_string(count * each),
                      file_header_size);

  file.packets.reserve(count);
  std::size_t at = file_header_size;
  for (std::size_t k = 0; k < count; ++k)
  {
    auto parsed = parse_packet(in.subspan(at), file.fragment_size, at);
    if (parsed.f != file.f)
      throw parse_error("packet field width differs from file header", at + 4);
    if (parsed.packet.coeffs.size() != file.n)
      throw parse_error("packet coefficient count differs from file header", at + 2);
    if (parsed.packet.gen_id >= file.generation_count)
      throw parse_error("gen_id " + std::to_string(parsed.packet.gen_id) + " out of range", at);
    file.packets.push_back(std::move(parsed.packet));
    at += parsed.consumed;
  }
  return file;
}

} // namespace rlnc::wire
