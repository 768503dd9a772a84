#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rlnc {

/// Out-of-range construction or call parameter.
class invalid_parameter : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed data handed to an operation (mixed generations, empty input, ...).
class invalid_input : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Field arithmetic error, e.g. division by zero.
class arithmetic_error : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

class configuration_error : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A generation could not be solved because its decoder is rank deficient.
class not_decodable : public std::runtime_error
{
public:
  not_decodable(std::size_t rank, std::size_t n)
    : std::runtime_error("not decodable: rank " + std::to_string(rank) + " of " + std::to_string(n))
    , rank_{rank}
    , n_{n}
  {}

  std::size_t rank() const noexcept { return rank_; }
  std::size_t needed() const noexcept { return n_; }

private:
  std::size_t rank_;
  std::size_t n_;
};

class incomplete_file : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Wire data could not be parsed; offset is the byte position of the fault.
class parse_error : public std::runtime_error
{
public:
  parse_error(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at byte offset " + std::to_string(offset))
    , offset_{offset}
  {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

} // namespace rlnc
