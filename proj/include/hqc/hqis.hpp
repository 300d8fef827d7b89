#pragma once

// Perfect hierarchical information splitting over the omega and cluster
// channels. Register layout for standalone runs: qubit 0 is the secret,
// 1 is Alice's channel qubit, 2..4 belong to Bob, Charlie and Diana.

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hqc/branching.hpp"
#include "hqc/channels.hpp"

namespace hqc {

enum class Party { Alice, Bob, Charlie, Diana };

std::string_view to_string(Party p);
std::optional<Party> parse_party(std::string_view name);

enum class PauliCorrection { I, X, Z, XZ, iY };

std::string_view to_string(PauliCorrection c);
Unitary2 correction_matrix(PauliCorrection c);

// Table-entry notation for single-qubit states c0|0> + c1|1>, up to norm.
enum class Coeff { PlusOne, MinusOne, PlusLambda, MinusLambda };

struct StatePattern {
  Coeff zero;
  Coeff one;
  Ket evaluate(const SecretParam& p) const;
};

// Low-cost recovery: Alice's Bell outcome and one helper's computational bit.
struct DianaTableRow {
  BellOutcome alice;
  Bit helper;
  PauliCorrection correction;
  StatePattern state;  // receiver state before the correction
};

// High-cost recovery: Alice's Bell outcome and the joint Bell outcome of the
// two other agents.
struct BobTableRow {
  BellOutcome alice;
  BellOutcome joint;
  PauliCorrection correction;
  StatePattern state;
};

std::span<const DianaTableRow> diana_table();
std::span<const BobTableRow> bob_table();

PauliCorrection correction_for_diana(BellOutcome alice, Bit bc);
PauliCorrection correction_for_bob(BellOutcome alice, BellOutcome cd);

// The agent who recovers with a single helper bit (Diana on omega, Bob on
// the cluster state), and the one who needs a joint measurement and is
// the natural dishonest insider (Bob on omega, Diana on the cluster state).
Party powerful_agent(ChannelKind kind);
Party weak_agent(ChannelKind kind);

bool is_low_cost(ChannelKind kind, Party receiver);

// Agents whose outcomes the receiver needs: the single helper on the
// low-cost path, the joint-measurement pair otherwise.
std::vector<Party> helper_parties(ChannelKind kind, Party receiver,
                                  std::optional<Party> helper = std::nullopt);

struct HelperOutcome {
  std::vector<Party> parties;
  ScriptedOutcome outcome;
};

struct ProtocolTranscript {
  ChannelSpec channel;
  SecretParam lambda;
  Party receiver = Party::Diana;
  BellOutcome alice_outcome = BellOutcome::PsiPlus;
  std::vector<HelperOutcome> helper_outcomes;
  PauliCorrection correction = PauliCorrection::I;
  std::optional<Ket> pre_correction_state;
  std::optional<Ket> final_state;
  double fidelity = 0.0;
  int classical_bits_consumed_by_receiver = 0;
  double branch_probability = 1.0;
  // Who physically holds the B, C and D qubits.
  std::array<Party, 3> holders{Party::Bob, Party::Charlie, Party::Diana};
};

struct HqisOptions {
  // Helper on the low-cost path; defaults to Bob on omega (Diana on the
  // cluster state).
  std::optional<Party> helper;
};

// Qubit ids of one protocol instance inside a Register.
struct Layout {
  QubitId secret = 0;
  QubitId alice = 1;
  QubitId b = 2;
  QubitId c = 3;
  QubitId d = 4;

  QubitId of(Party p) const;
};

ProtocolTranscript run_hqis(const ChannelSpec& channel, Party receiver, const SecretParam& lambda,
                            RandomSource& rng, const HqisOptions& options = {});

// One deterministic branch; `script` lists Alice's outcome followed by the
// helper outcome. nullopt when the branch has probability zero.
std::optional<ProtocolTranscript> hqis_branch(const ChannelSpec& channel, Party receiver,
                                              const SecretParam& lambda,
                                              std::vector<ScriptedOutcome> script,
                                              const HqisOptions& options = {});

// Every nonzero-probability branch.
std::vector<ProtocolTranscript> enumerate_hqis(const ChannelSpec& channel, Party receiver,
                                               const SecretParam& lambda,
                                               const HqisOptions& options = {});

// Runs the protocol on qubits already living in `reg`. `channel` selects the
// role frame; its amplitudes are whatever `reg` holds.
ProtocolTranscript execute_hqis(Register& reg, const Layout& layout, const ChannelSpec& channel,
                                Party receiver, const SecretParam& lambda, OutcomeSource& outcomes,
                                const HqisOptions& options = {});

struct EncryptionReport {
  struct Branch {
    BellOutcome alice;
    double probability;
    DensityMatrix2 rho;  // weak agent's qubit before any classical message
    double deviation;    // max |rho - I/2|
  };
  struct Conditional {
    BellOutcome alice;
    BellOutcome joint;
    PauliCorrection encoding;  // conditional state is encoding * |secret>
    double probability;        // conditional on Alice's outcome
    double fidelity;
  };
  Party receiver = Party::Bob;
  std::vector<Branch> branches;
  std::vector<Conditional> conditionals;
  bool ok = false;
};

EncryptionReport verify_encryption(const ChannelSpec& channel, const SecretParam& lambda);

// Largest amplitude difference between the omega agent state in (B,C,D)
// order and the cluster agent state in (D,C,B) order, over Alice's outcomes.
double role_swap_deviation(const SecretParam& lambda);
bool role_swap_check(const SecretParam& lambda);

// The weak agent holds all three agent qubits, Bell-measures the two that
// are not his and corrects his own: full recovery without cooperation.
ProtocolTranscript dishonest_receiver_attack(const ChannelSpec& channel, const SecretParam& lambda,
                                             RandomSource& rng);

}  // namespace hqc
