#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hqc/qcore.hpp"

namespace hqc {

using QubitId = std::uint32_t;

// A multi-party quantum record addressed by qubit id rather than position.
//
// The state is held as a product of independent clusters, each a dense Ket.
// Clusters merge when a two-qubit operation spans them and are factored again
// after every measurement, so unentangled qubits (decoys, collapsed qubits)
// never inflate the dense vectors. Measured qubits stay in the record.
class Register {
 public:
  // Adds `state` over fresh ids; ids[k] names qubit k of `state`.
  void add(const Ket& state, std::vector<QubitId> ids);

  bool contains(QubitId id) const;
  std::vector<QubitId> qubits() const;
  std::size_t cluster_count() const { return clusters_.size(); }
  std::size_t cluster_size(QubitId id) const;

  void apply(const Unitary2& gate, QubitId target);
  void apply(const Unitary4& gate, QubitId first, QubitId second);

  Bit measure(QubitId target, RandomSource& rng);
  BellOutcome measure_bell(QubitId first, QubitId second, RandomSource& rng);

  // Deterministic branches: collapse onto the given outcome and return its
  // conditional probability. A zero-probability branch throws
  // ZeroProbabilityBranch and leaves the record untouched.
  double project(QubitId target, Bit value);
  double project_bell(QubitId first, QubitId second, BellOutcome outcome);

  DensityMatrix2 reduced(QubitId id) const;

  // State of `id` when it is unentangled with everything else, with the
  // largest amplitude made real and positive.
  std::optional<Ket> pure_state(QubitId id) const;

  // Joint state of `ids` in that order; they must not be entangled with any
  // qubit outside the set.
  Ket gather(std::span<const QubitId> ids) const;

  // Removes qubits that together form a closed (unentangled) set.
  void discard(std::span<const QubitId> ids);

  friend bool operator==(const Register&, const Register&) = default;

 private:
  struct Cluster {
    std::vector<QubitId> ids;
    Ket state;
    friend bool operator==(const Cluster&, const Cluster&) = default;
  };

  std::size_t locate(QubitId id) const;
  int position(std::size_t cluster, QubitId id) const;
  std::size_t merge(std::size_t a, std::size_t b);
  std::size_t join(QubitId first, QubitId second);
  void replace(std::size_t cluster, Ket state);
  void factor(std::size_t cluster, std::span<const QubitId> group);

  std::vector<Cluster> clusters_;
};

}  // namespace hqc
