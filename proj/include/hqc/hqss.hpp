#pragma once

// Hierarchical secret sharing: n omega copies, decoy qubits, one shared
// permutation of the agent sequences, a decoy check, then the splitting
// protocol once per copy.
//
// Qubit ids: signal p_s is s-1 (0..4n-1), decoy d_i is 4n+i-1, and the
// secret for copy k is 7n+k.

#include <optional>
#include <variant>
#include <vector>

#include "hqc/hqis.hpp"

namespace hqc {

enum class Sequence { A, B, C, D };
enum class DecoyState { Z0, Z1, Xplus, Xminus };
enum class Basis { Z, X };

std::string_view to_string(Sequence s);
std::string_view to_string(DecoyState d);
std::string_view to_string(Basis b);

Basis basis_of(DecoyState d);
// Outcome an honest measurement in the preparation basis returns.
Bit value_of(DecoyState d);
Ket decoy_ket(DecoyState d);

struct DecoyRecord {
  Sequence sequence;
  std::size_t slot;  // position in the extended sequence, before permutation
  QubitId id;
  DecoyState state;
};

struct SequencePlan {
  int n = 0;
  std::vector<QubitId> p_a;
  // Extended agent sequences: n signal qubits followed by n decoys.
  std::vector<QubitId> p_b, p_c, p_d;
  std::vector<DecoyRecord> decoys;
  // Transmitted slot j carries extended slot permutation[j], for B, C and D.
  std::vector<std::size_t> permutation;

  const std::vector<QubitId>& extended(Sequence s) const;
  std::vector<QubitId> rearranged(Sequence s) const;
  // Transmitted slots holding decoys, ascending.
  std::vector<std::size_t> decoy_coordinates() const;
  // Transmitted slot of signal qubit k, for k = 0..n-1.
  std::vector<std::size_t> signal_coordinates() const;
  // Undoes the permutation using the disclosed coordinates.
  std::vector<QubitId> restore_signals(Sequence s, const std::vector<QubitId>& transmitted) const;
  QubitId secret_id(int copy) const { return static_cast<QubitId>(7 * n + copy); }
};

struct Distribution {
  SequencePlan plan;
  Register reg;
};

Distribution prepare_distribution(int n, RandomSource& rng,
                                  const ChannelSpec& channel = ChannelSpec::omega());

struct NoAdversary {};

struct InterceptResend {
  std::vector<Sequence> targets{Sequence::B, Sequence::C, Sequence::D};
  double probability = 1.0;
};

enum class BlindPairing {
  Random,   // C'' slot i with D'' slot sigma(i), sigma uniform
  Aligned,  // C'' slot i with D'' slot i
};

// Bob captures C'' and D'' in transit and Bell-measures slot pairs before
// forwarding them.
struct DishonestBobCapture {
  BlindPairing pairing = BlindPairing::Random;
};

using AdversaryModel = std::variant<NoAdversary, InterceptResend, DishonestBobCapture>;

struct InterceptEvent {
  Sequence sequence;
  std::size_t slot;  // transmitted position
  QubitId id;
  Basis basis;
  Bit outcome;
};

struct CapturedPair {
  std::size_t c_slot, d_slot;
  QubitId c, d;
  BellOutcome outcome;
};

struct AdversaryLog {
  std::vector<InterceptEvent> intercepts;
  std::vector<QubitId> captured;
  std::vector<CapturedPair> pairs;
};

AdversaryLog transmit_with_adversary(const SequencePlan& plan, Register& reg,
                                     const AdversaryModel& adversary, RandomSource& rng);

// Bell-measures captured slot pairs and appends them to `log`.
void dishonest_bob_blind_measure(const SequencePlan& plan, Register& reg, BlindPairing pairing,
                                 AdversaryLog& log, RandomSource& rng);

struct DecoyCheck {
  Sequence sequence;
  std::size_t coordinate;
  QubitId id;
  DecoyState prepared;
  Basis basis;
  Bit outcome;
  bool matched;
  bool error;
};

struct CheckReport {
  std::size_t decoys_checked = 0;
  std::size_t bases_matched = 0;
  std::size_t errors = 0;
  double error_rate = 0.0;
  bool aborted = false;
  double threshold = 0.0;
  std::vector<DecoyCheck> rounds;
};

// Every decoy is measured by its holder in a uniformly random basis; only
// matched-basis rounds are scored.
CheckReport run_check(const SequencePlan& plan, Register& reg, double threshold, RandomSource& rng);

struct HqssOptions {
  ChannelSpec channel = ChannelSpec::omega();
  std::optional<Party> helper;
};

struct HqssTranscript {
  SequencePlan plan;
  AdversaryLog log;
  CheckReport check;
  bool aborted = false;
  // Honest secret phase, one per copy; empty on abort or when the agents'
  // qubits were captured.
  std::vector<ProtocolTranscript> copies;
  // Dishonest Bob's recovery per copy, computed as if Alice had gone ahead.
  std::vector<ProtocolTranscript> attacker_copies;
};

HqssTranscript run_hqss(int n, const SecretParam& lambda, Party receiver,
                        const AdversaryModel& adversary, double threshold, RandomSource& rng,
                        const HqssOptions& options = {});

struct AttackSummary {
  std::size_t trials = 0;
  std::vector<double> fidelities;  // one per copy per trial
  double mean_fidelity = 0.0;
  double recovered_fraction = 0.0;  // fidelity 1 within 1e-9
  double detection_rate = 0.0;
  double mean_decoy_errors = 0.0;
  double mean_fidelity_undetected = 0.0;
  std::size_t undetected = 0;
};

struct AttackStudy {
  int n = 1;
  AttackSummary bare;     // against the splitting protocol alone
  AttackSummary blind;    // against full sharing, random pairing
  AttackSummary aligned;  // against full sharing, slot-aligned pairing
};

AttackStudy attack_effectiveness_study(int n, const SecretParam& lambda, std::size_t trials,
                                       RandomSource& rng);

}  // namespace hqc
