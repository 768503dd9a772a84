#pragma once

#include "rlnc/error.hpp"
#include "rlnc/random.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>

namespace rlnc {

/// Memoryless erasure link.
struct bernoulli_erasure
{
  double delta = 0.0;

  void validate() const
  {
    if (!(delta >= 0.0 && delta <= 1.0))
      throw invalid_parameter("erasure probability must be in [0, 1]");
  }

  double steady_state_rate() const noexcept { return delta; }
};

/// Two-state (good/bad) Markov erasure link.
struct gilbert_elliot
{
  double p_gb = 0.0; ///< good -> bad
  double p_bg = 1.0; ///< bad -> good
  double loss_good = 0.0;
  double loss_bad = 1.0;

  void validate() const
  {
    for (double p : {p_gb, p_bg, loss_good, loss_bad})
      if (!(p >= 0.0 && p <= 1.0))
        throw invalid_parameter("Gilbert-Elliot probabilities must be in [0, 1]");
    if (!(p_gb + p_bg > 0.0))
      throw invalid_parameter("Gilbert-Elliot chain needs p_gb + p_bg > 0");
  }

  double bad_fraction() const noexcept { return p_gb / (p_gb + p_bg); }

  double steady_state_rate() const noexcept
  {
    const double pi_b = bad_fraction();
    return (1.0 - pi_b) * loss_good + pi_b * loss_bad;
  }
};

/// Classic Gilbert parameters (loss_good=0, loss_bad=1) for a target
/// steady-state erasure rate and mean bad-state sojourn of burst_length packets.
inline gilbert_elliot ge_from_target_rate(double delta_target, double burst_length)
{
  if (!(delta_target >= 0.0 && delta_target <= 1.0))
    throw invalid_parameter("target erasure rate must be in [0, 1]");
  if (!(burst_length >= 1.0) || !std::isfinite(burst_length))
    throw invalid_parameter("mean burst length must be finite and >= 1");
  if (delta_target >= 1.0)
    throw invalid_parameter("target rate 1 is reachable only with an infinite burst length");

  gilbert_elliot ge;
  ge.loss_good = 0.0;
  ge.loss_bad = 1.0;
  ge.p_bg = 1.0 / burst_length;
  // pi_b = p_gb / (p_gb + p_bg) = delta
  ge.p_gb = delta_target * ge.p_bg / (1.0 - delta_target);
  if (ge.p_gb > 1.0)
    throw invalid_parameter("target rate " + std::to_string(delta_target) + " is infeasible with mean burst length "
                            + std::to_string(burst_length));
  return ge;
}

using channel_model = std::variant<bernoulli_erasure, gilbert_elliot>;

/// One link. Owns two random streams: loss decisions and (for Gilbert-Elliot)
/// state transitions, so a Bernoulli link and a Gilbert-Elliot link with
/// loss_good == loss_bad erase the same packets under the same seed.
class erasure_channel
{
public:
  erasure_channel(channel_model model, std::uint64_t seed)
    : model_{model}
    , loss_rng_{derive_seed(seed, {0})}
    , state_rng_{derive_seed(seed, {1})}
  {
    std::visit([](const auto& m) { m.validate(); }, model_);
    if (const auto* ge = std::get_if<gilbert_elliot>(&model_))
      bad_ = bernoulli(state_rng_, ge->bad_fraction());
  }

  /// Send one packet; returns true if it was delivered.
  bool transmit()
  {
    if (const auto* ge = std::get_if<gilbert_elliot>(&model_))
    {
      bad_ = bad_ ? !bernoulli(state_rng_, ge->p_bg) : bernoulli(state_rng_, ge->p_gb);
      return !bernoulli(loss_rng_, bad_ ? ge->loss_bad : ge->loss_good);
    }
    return !bernoulli(loss_rng_, std::get<bernoulli_erasure>(model_).delta);
  }

  bool in_bad_state() const noexcept { return bad_; }

  double steady_state_rate() const
  {
    return std::visit([](const auto& m) { return m.steady_state_rate(); }, model_);
  }

  const channel_model& model() const noexcept { return model_; }

private:
  channel_model model_;
  rng_t loss_rng_;
  rng_t state_rng_;
  bool bad_ = false;
};

/// Link configuration as it appears in simulator configs: a target erasure
/// rate and, for bursty links, the mean bad-state sojourn length.
struct link_spec
{
  enum class kind
  {
    bernoulli,
    gilbert_elliot
  };

  kind type = kind::bernoulli;
  double rate = 0.0;
  double burst_length = 5.0;

  channel_model model() const
  {
    if (type == kind::bernoulli || rate <= 0.0 || rate >= 1.0)
    {
      // GE degenerates to a constant channel at the endpoints.
      bernoulli_erasure b{rate};
      b.validate();
      return b;
    }
    return ge_from_target_rate(rate, burst_length);
  }
};

} // namespace rlnc
