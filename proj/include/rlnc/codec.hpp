#pragma once

#include "rlnc/error.hpp"
#include "rlnc/gf.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rlnc {

using bytes = std::vector<std::uint8_t>;

struct coding_params
{
  std::size_t n = 1;             ///< fragments per generation
  std::size_t m = 1;             ///< coded packets per generation
  std::size_t fragment_size = 1; ///< bytes per fragment
  std::shared_ptr<const field> gf = shared_field(8);

  void validate() const
  {
    if (!gf)
      throw invalid_parameter("coding params without a field");
    if (n < 1)
      throw invalid_parameter("n must be >= 1");
    if (m < n)
      throw invalid_parameter("m must be >= n (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")");
    if (fragment_size < 1)
      throw invalid_parameter("fragment_size must be >= 1");
    if (!gf->fits_region(fragment_size))
      throw invalid_parameter("fragment_size " + std::to_string(fragment_size) + " is not a whole number of "
                              + std::to_string(gf->bits()) + "-bit symbols");
  }
};

struct generation
{
  std::uint32_t gen_id = 0;
  std::vector<bytes> fragments;
};

struct coded_packet
{
  std::uint32_t gen_id = 0;
  std::vector<symbol> coeffs;
  bytes payload;

  friend bool operator==(const coded_packet&, const coded_packet&) = default;
};

/// A file cut into generations; original_length undoes the zero padding.
struct segmented_file
{
  std::size_t original_length = 0;
  std::size_t n = 0;
  std::size_t fragment_size = 0;
  std::vector<generation> generations;
};

inline std::size_t generation_count(std::size_t length, std::size_t n, std::size_t fragment_size)
{
  const std::size_t fragments = (length + fragment_size - 1) / fragment_size;
  return (fragments + n - 1) / n;
}

/// Cut data into generations of n fragments, zero padding the tail.
inline segmented_file segment(std::span<const std::uint8_t> data, const coding_params& params)
{
  params.validate();
  if (data.empty())
    throw invalid_input("cannot segment empty input");

  segmented_file out;
  out.original_length = data.size();
  out.n = params.n;
  out.fragment_size = params.fragment_size;

  const std::size_t gens = generation_count(data.size(), params.n, params.fragment_size);
  out.generations.reserve(gens);
  std::size_t pos = 0;
  for (std::size_t g = 0; g < gens; ++g)
  {
    generation gen;
    gen.gen_id = static_cast<std::uint32_t>(g);
    gen.fragments.assign(params.n, bytes(params.fragment_size, 0));
    for (auto& frag : gen.fragments)
    {
      if (pos < data.size())
      {
        const std::size_t take = std::min(params.fragment_size, data.size() - pos);
        std::copy_n(data.subspan(pos).begin(), take, frag.begin());
      }
      pos += params.fragment_size;
    }
    out.generations.push_back(std::move(gen));
  }
  return out;
}

/// y = sum_i coeffs[i] * x_i over the generation's fragments.
inline coded_packet combine(const generation& gen, std::span<const symbol> coeffs, const field& gf)
{
  if (gen.fragments.empty())
    throw invalid_input("generation has no fragments");
  if (coeffs.size() != gen.fragments.size())
    throw invalid_input("coefficient count does not match generation size");

  coded_packet pkt;
  pkt.gen_id = gen.gen_id;
  pkt.coeffs.assign(coeffs.begin(), coeffs.end());
  pkt.payload.assign(gen.fragments.front().size(), 0);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
  {
    if (!gf.contains(coeffs[i]))
      throw invalid_input("coefficient outside the field");
    gf.mul_add(pkt.payload, gen.fragments[i], coeffs[i]);
  }
  return pkt;
}

/// Source encoding: m random combinations of the generation's n fragments.
template <class URBG>
std::vector<coded_packet> encode_source(const generation& gen, const coding_params& params, URBG& rng)
{
  params.validate();
  if (gen.fragments.size() != params.n)
    throw invalid_input("generation holds " + std::to_string(gen.fragments.size()) + " fragments, expected "
                        + std::to_string(params.n));
  for (const auto& frag : gen.fragments)
    if (frag.size() != params.fragment_size)
      throw invalid_input("fragment length differs from fragment_size");

  std::vector<coded_packet> out;
  out.reserve(params.m);
  for (std::size_t j = 0; j < params.m; ++j)
  {
    const auto c = random_coefficients(*params.gf, params.n, rng);
    out.push_back(combine(gen, c, *params.gf));
  }
  return out;
}

/// Random recombinations of packets already coded within one generation.
template <class URBG>
std::vector<coded_packet> recode(std::span<const coded_packet> packets, std::size_t count, const field& gf, URBG& rng)
{
  if (packets.empty())
    throw invalid_input("recode needs at least one input packet");
  const auto& first = packets.front();
  for (const auto& p : packets)
  {
    if (p.gen_id != first.gen_id)
      throw invalid_input("recode inputs span several generations");
    if (p.coeffs.size() != first.coeffs.size() || p.payload.size() != first.payload.size())
      throw invalid_input("recode inputs have inconsistent shapes");
  }

  std::vector<coded_packet> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k)
  {
    const auto mix = random_coefficients(gf, packets.size(), rng);
    coded_packet r;
    r.gen_id = first.gen_id;
    r.coeffs.assign(first.coeffs.size(), 0);
    r.payload.assign(first.payload.size(), 0);
    for (std::size_t s = 0; s < packets.size(); ++s)
    {
      for (std::size_t i = 0; i < r.coeffs.size(); ++i)
        r.coeffs[i] ^= gf.mul(mix[s], packets[s].coeffs[i]);
      gf.mul_add(r.payload, packets[s].payload, mix[s]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Incremental Gaussian elimination for one generation.
///
/// Rows are kept in reduced row-echelon form: each row's leading (pivot)
/// coefficient is 1 and no other row has a nonzero entry in that column.
/// Rows are ordered by pivot column.
class decoder
{
public:
  decoder(std::uint32_t gen_id, std::size_t n, std::size_t fragment_size, std::shared_ptr<const field> gf)
    : gen_id_{gen_id}
    , n_{n}
    , fragment_size_{fragment_size}
    , gf_{std::move(gf)}
  {
    if (!gf_)
      throw invalid_parameter("decoder without a field");
    if (n_ < 1)
      throw invalid_parameter("n must be >= 1");
    rows_.reserve(n_);
  }

  decoder(std::uint32_t gen_id, const coding_params& params)
    : decoder(gen_id, params.n, params.fragment_size, params.gf)
  {}

  std::uint32_t gen_id() const noexcept { return gen_id_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t rank() const noexcept { return rows_.size(); }
  bool complete() const noexcept { return rows_.size() == n_; }

  /// Add a packet; returns true iff it raised the rank.
  bool add(const coded_packet& pkt)
  {
    if (pkt.gen_id != gen_id_)
      throw invalid_input("packet for generation " + std::to_string(pkt.gen_id) + " given to decoder of generation "
                          + std::to_string(gen_id_));
    if (pkt.coeffs.size() != n_)
      throw invalid_input("packet has " + std::to_string(pkt.coeffs.size()) + " coefficients, expected "
                          + std::to_string(n_));
    if (pkt.payload.size() != fragment_size_)
      throw invalid_input("payload length does not match fragment_size");
    if (complete())
      return false;

    const field& gf = *gf_;
    row fresh{pkt.coeffs, pkt.payload, 0};
    for (const auto& r : rows_)
    {
      const symbol c = fresh.coeffs[r.pivot];
      if (c != 0)
        eliminate(fresh, r, c);
    }

    const auto lead = std::find_if(fresh.coeffs.begin(), fresh.coeffs.end(), [](symbol s) { return s != 0; });
    if (lead == fresh.coeffs.end())
      return false;
    fresh.pivot = static_cast<std::size_t>(lead - fresh.coeffs.begin());

    const symbol scale = gf.inv(fresh.coeffs[fresh.pivot]);
    if (scale != 1)
    {
      for (auto& s : fresh.coeffs)
        s = gf.mul(s, scale);
      gf.scale(fresh.payload, scale);
    }

    for (auto& r : rows_)
    {
      const symbol c = r.coeffs[fresh.pivot];
      if (c != 0)
        eliminate(r, fresh, c);
    }

    const auto at = std::lower_bound(rows_.begin(), rows_.end(), fresh.pivot,
                                     [](const row& r, std::size_t p) { return r.pivot < p; });
    rows_.insert(at, std::move(fresh));
    return true;
  }

  /// Recovered fragments in source order; throws not_decodable below full rank.
  std::vector<bytes> solve() const
  {
    if (!complete())
      throw not_decodable(rank(), n_);
    // Full rank in reduced echelon form is the identity, so the payloads are X.
    std::vector<bytes> out;
    out.reserve(n_);
    for (const auto& r : rows_)
      out.push_back(r.payload);
    return out;
  }

  /// Coefficient rows of the echelon form, ordered by pivot.
  std::vector<std::vector<symbol>> coefficient_rows() const
  {
    std::vector<std::vector<symbol>> out;
    for (const auto& r : rows_)
      out.push_back(r.coeffs);
    return out;
  }

private:
  struct row
  {
    std::vector<symbol> coeffs;
    bytes payload;
    std::size_t pivot;
  };

  // target -= c * source
  void eliminate(row& target, const row& source, symbol c) const
  {
    const field& gf = *gf_;
    for (std::size_t i = source.pivot; i < n_; ++i)
      if (source.coeffs[i] != 0)
        target.coeffs[i] ^= gf.mul(c, source.coeffs[i]);
    gf.mul_add(target.payload, source.payload, c);
  }

  std::uint32_t gen_id_;
  std::size_t n_;
  std::size_t fragment_size_;
  std::shared_ptr<const field> gf_;
  std::vector<row> rows_;
};

/// Inverse of segment(): concatenate decoded generations and strip padding.
inline bytes reassemble(const std::map<std::uint32_t, std::vector<bytes>>& decoded, std::size_t original_length,
                        std::size_t n, std::size_t fragment_size)
{
  if (n < 1 || fragment_size < 1)
    throw invalid_parameter("n and fragment_size must be >= 1");
  const std::size_t gens = generation_count(original_length, n, fragment_size);
  bytes out;
  out.reserve(gens * n * fragment_size);
  for (std::size_t g = 0; g < gens; ++g)
  {
    const auto it = decoded.find(static_cast<std::uint32_t>(g));
    if (it == decoded.end())
      throw incomplete_file("generation " + std::to_string(g) + " of " + std::to_string(gens) + " is missing");
    if (it->second.size() != n)
      throw incomplete_file("generation " + std::to_string(g) + " holds " + std::to_string(it->second.size())
                            + " fragments, expected " + std::to_string(n));
    for (const auto& frag : it->second)
    {
      if (frag.size() != fragment_size)
        throw invalid_input("fragment length differs from fragment_size");
      out.insert(out.end(), frag.begin(), frag.end());
    }
  }
  out.resize(original_length);
  return out;
}

} // namespace rlnc
