#pragma once

#include "rlnc/error.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace rlnc {

/// A GF(2^f) element. Field context is always passed explicitly.
using symbol = std::uint16_t;

inline constexpr unsigned max_field_bits = 16;

/// Reduction polynomials (x^f term included), one fixed primitive polynomial per width.
/// These are part of the wire contract: coded data is only portable between
/// builds that agree on them.
inline constexpr std::array<std::uint32_t, max_field_bits + 1> primitive_polynomials = {
  0x0,     // unused
  0x3,     // x + 1
  0x7,     // x^2 + x + 1
  0xB,     // x^3 + x + 1
  0x13,    // x^4 + x + 1
  0x25,    // x^5 + x^2 + 1
  0x43,    // x^6 + x + 1
  0x89,    // x^7 + x^3 + 1
  0x11D,   // x^8 + x^4 + x^3 + x^2 + 1
  0x211,   // x^9 + x^4 + 1
  0x409,   // x^10 + x^3 + 1
  0x805,   // x^11 + x^2 + 1
  0x1053,  // x^12 + x^6 + x^4 + x + 1
  0x201B,  // x^13 + x^4 + x^3 + x + 1
  0x4443,  // x^14 + x^10 + x^6 + x + 1
  0x8003,  // x^15 + x + 1
  0x1100B, // x^16 + x^12 + x^3 + x + 1
};

/// Arithmetic context for GF(2^f), 1 <= f <= 16.
///
/// Multiplication goes through exp/log tables built at construction. For
/// widths dividing 8 an additional per-coefficient byte table is kept so that
/// payload regions (bytes holding 8/f packed symbols) can be processed one
/// byte at a time. Immutable once built; share freely between threads.
class field
{
public:
  explicit field(unsigned bits)
    : bits_{bits}
  {
    if (bits < 1 || bits > max_field_bits)
      throw invalid_parameter("field width must be in [1, 16], got " + std::to_string(bits));

    q_ = std::uint32_t{1} << bits;
    poly_ = primitive_polynomials[bits];
    const std::uint32_t order = q_ - 1;

    exp_.assign(2 * static_cast<std::size_t>(order), 0);
    log_.assign(q_, 0);

    std::uint32_t x = 1;
    for (std::uint32_t i = 0; i < order; ++i)
    {
      if (i > 0 && x == 1)
        throw std::logic_error("reduction polynomial is not primitive for f=" + std::to_string(bits));
      exp_[i] = static_cast<symbol>(x);
      log_[x] = static_cast<symbol>(i);
      x <<= 1;
      if (x & q_)
        x ^= poly_;
    }
    if (x != 1)
      throw std::logic_error("reduction polynomial is not primitive for f=" + std::to_string(bits));
    for (std::uint32_t i = order; i < 2 * order; ++i)
      exp_[i] = exp_[i - order];

    if (8 % bits == 0)
      build_byte_tables();
  }

  unsigned bits() const noexcept { return bits_; }
  std::uint32_t size() const noexcept { return q_; }
  std::uint32_t polynomial() const noexcept { return poly_; }

  bool contains(std::uint32_t a) const noexcept { return a < q_; }

  static symbol add(symbol a, symbol b) noexcept { return static_cast<symbol>(a ^ b); }
  static symbol sub(symbol a, symbol b) noexcept { return static_cast<symbol>(a ^ b); }

  symbol mul(symbol a, symbol b) const noexcept
  {
    if (a == 0 || b == 0)
      return 0;
    return exp_[static_cast<std::size_t>(log_[a]) + log_[b]];
  }

  symbol inv(symbol a) const
  {
    if (a == 0)
      throw arithmetic_error("inverse of zero");
    return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
  }

  symbol div(symbol a, symbol b) const
  {
    if (b == 0)
      throw arithmetic_error("division by zero");
    if (a == 0)
      return 0;
    return exp_[static_cast<std::size_t>(log_[a]) + (q_ - 1) - log_[b]];
  }

  /// Generator power and discrete log, exposed for table checks.
  symbol exp(std::uint32_t i) const noexcept { return exp_[i % (q_ - 1)]; }
  std::uint32_t log(symbol a) const
  {
    if (a == 0)
      throw arithmetic_error("log of zero");
    return log_[a];
  }

  /// True when a byte region of this length holds a whole number of symbols.
  bool fits_region(std::size_t bytes) const noexcept { return (bytes * 8) % bits_ == 0; }

  std::size_t symbols_in(std::size_t bytes) const noexcept { return bytes * 8 / bits_; }

  /// dst += c * src, symbol-wise over a packed region.
  void mul_add(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src, symbol c) const
  {
    check_region(dst.size(), src.size());
    if (c == 0)
      return;
    if (c == 1)
    {
      for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] ^= src[i];
      return;
    }
    if (!byte_mul_.empty())
    {
      const std::uint8_t* row = &byte_mul_[static_cast<std::size_t>(c) << 8];
      for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] ^= row[src[i]];
    }
    else if (bits_ == 16)
    {
      for (std::size_t i = 0; i + 1 < dst.size(); i += 2)
      {
        const auto s = static_cast<symbol>((src[i] << 8) | src[i + 1]);
        const symbol p = mul(s, c);
        dst[i] ^= static_cast<std::uint8_t>(p >> 8);
        dst[i + 1] ^= static_cast<std::uint8_t>(p & 0xff);
      }
    }
    else
    {
      const std::size_t count = symbols_in(src.size());
      for (std::size_t k = 0; k < count; ++k)
      {
        const symbol p = mul(read_symbol(src, k), c);
        write_symbol(dst, k, static_cast<symbol>(read_symbol(dst, k) ^ p));
      }
    }
  }

  /// region *= c
  void scale(std::span<std::uint8_t> region, symbol c) const
  {
    check_region(region.size(), region.size());
    if (c == 1)
      return;
    if (!byte_mul_.empty())
    {
      const std::uint8_t* row = &byte_mul_[static_cast<std::size_t>(c) << 8];
      for (auto& b : region)
        b = row[b];
    }
    else
    {
      const std::size_t count = symbols_in(region.size());
      for (std::size_t k = 0; k < count; ++k)
        write_symbol(region, k, mul(read_symbol(region, k), c));
    }
  }

  /// Symbol k of an MSB-first packed region.
  symbol read_symbol(std::span<const std::uint8_t> region, std::size_t k) const noexcept
  {
    std::uint32_t v = 0;
    std::size_t bit = k * bits_;
    for (unsigned j = 0; j < bits_; ++j, ++bit)
      v = (v << 1) | ((region[bit >> 3] >> (7 - (bit & 7))) & 1u);
    return static_cast<symbol>(v);
  }

  void write_symbol(std::span<std::uint8_t> region, std::size_t k, symbol v) const noexcept
  {
    std::size_t bit = k * bits_;
    for (unsigned j = 0; j < bits_; ++j, ++bit)
    {
      const auto mask = static_cast<std::uint8_t>(1u << (7 - (bit & 7)));
      if ((v >> (bits_ - 1 - j)) & 1u)
        region[bit >> 3] |= mask;
      else
        region[bit >> 3] &= static_cast<std::uint8_t>(~mask);
    }
  }

private:
  void check_region(std::size_t dst, std::size_t src) const
  {
    if (dst != src)
      throw invalid_input("region length mismatch");
    if (!fits_region(dst))
      throw invalid_parameter("region of " + std::to_string(dst) + " bytes is not a whole number of "
                              + std::to_string(bits_) + "-bit symbols");
  }

  void build_byte_tables()
  {
    const unsigned per_byte = 8 / bits_;
    const unsigned mask = (1u << bits_) - 1;
    byte_mul_.assign(static_cast<std::size_t>(q_) << 8, 0);
    for (std::uint32_t c = 0; c < q_; ++c)
      for (unsigned b = 0; b < 256; ++b)
      {
        unsigned out = 0;
        for (unsigned j = 0; j < per_byte; ++j)
        {
          const unsigned shift = j * bits_;
          const auto s = static_cast<symbol>((b >> shift) & mask);
          out |= static_cast<unsigned>(mul(s, static_cast<symbol>(c))) << shift;
        }
        byte_mul_[(static_cast<std::size_t>(c) << 8) | b] = static_cast<std::uint8_t>(out);
      }
  }

  unsigned bits_;
  std::uint32_t q_ = 0;
  std::uint32_t poly_ = 0;
  std::vector<symbol> exp_;
  std::vector<symbol> log_;
  std::vector<std::uint8_t> byte_mul_;
};

inline field make_field(unsigned bits)
{
  return field{bits};
}

/// Process-wide cache of field contexts, one per width.
inline std::shared_ptr<const field> shared_field(unsigned bits)
{
  if (bits < 1 || bits > max_field_bits)
    throw invalid_parameter("field width must be in [1, 16], got " + std::to_string(bits));
  static std::mutex guard;
  static std::array<std::shared_ptr<const field>, max_field_bits + 1> cache;
  std::lock_guard lock{guard};
  if (!cache[bits])
    cache[bits] = std::make_shared<const field>(bits);
  return cache[bits];
}

/// Bit width for a field size q = 2^f; throws if q is not such a power.
inline unsigned bits_for_size(std::uint64_t q)
{
  for (unsigned f = 1; f <= max_field_bits; ++f)
    if ((std::uint64_t{1} << f) == q)
      return f;
  throw invalid_parameter("field size must be 2^f with 1 <= f <= 16, got " + std::to_string(q));
}

/// Uniform draw from the nonzero elements.
template <class URBG>
symbol random_nonzero(const field& gf, URBG& rng)
{
  std::uniform_int_distribution<std::uint32_t> dist{1, gf.size() - 1};
  return static_cast<symbol>(dist(rng));
}

/// A random nonzero coefficient vector.
///
/// For q > 2 every entry is drawn iid from the nonzero elements. In GF(2) that
/// rule would make every vector all-ones, so there the vector as a whole is
/// drawn uniformly from the nonzero vectors instead.
template <class URBG>
std::vector<symbol> random_coefficients(const field& gf, std::size_t count, URBG& rng)
{
  std::vector<symbol> out(count);
  if (gf.size() > 2)
  {
    for (auto& c : out)
      c = random_nonzero(gf, rng);
    return out;
  }
  bool any = false;
  while (!any && count > 0)
  {
    for (auto& c : out)
    {
      c = static_cast<symbol>(rng() >> 63);
      any = any || c != 0;
    }
  }
  return out;
}

} // namespace rlnc
