#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "hqc/register.hpp"

namespace hqc {

// Decides every measurement outcome of a protocol run. Engines are written
// once against this interface; sampling and exhaustive branch enumeration
// differ only in the source they are handed.
class OutcomeSource {
 public:
  virtual ~OutcomeSource() = default;
  virtual Bit bit(Register& reg, QubitId target) = 0;
  virtual BellOutcome bell(Register& reg, QubitId first, QubitId second) = 0;
  // Joint probability of the outcomes handed out so far.
  virtual double probability() const = 0;
};

// Born-rule sampling.
class SampledOutcomes final : public OutcomeSource {
 public:
  explicit SampledOutcomes(RandomSource& rng) : rng_(rng) {}

  Bit bit(Register& reg, QubitId target) override { return reg.measure(target, rng_); }
  BellOutcome bell(Register& reg, QubitId first, QubitId second) override {
    return reg.measure_bell(first, second, rng_);
  }
  double probability() const override { return 1.0; }

 private:
  RandomSource& rng_;
};

using ScriptedOutcome = std::variant<Bit, BellOutcome>;

// Replays a fixed outcome script by projection, accumulating the branch
// probability. Throws ZeroProbabilityBranch on an impossible outcome and
// SizeMismatch when the script runs short or has the wrong outcome type.
class ForcedOutcomes final : public OutcomeSource {
 public:
  explicit ForcedOutcomes(std::vector<ScriptedOutcome> script) : script_(std::move(script)) {}

  Bit bit(Register& reg, QubitId target) override {
    const Bit b = next<Bit>();
    probability_ *= reg.project(target, b);
    return b;
  }
  BellOutcome bell(Register& reg, QubitId first, QubitId second) override {
    const BellOutcome o = next<BellOutcome>();
    probability_ *= reg.project_bell(first, second, o);
    return o;
  }
  double probability() const override { return probability_; }

 private:
  template <typename T>
  T next() {
    if (cursor_ >= script_.size() || !std::holds_alternative<T>(script_[cursor_])) {
      throw Error(ErrorCode::SizeMismatch, "outcome script does not match the protocol");
    }
    return std::get<T>(script_[cursor_++]);
  }

  std::vector<ScriptedOutcome> script_;
  std::size_t cursor_ = 0;
  double probability_ = 1.0;
};

}  // namespace hqc
