#pragma once

// Probabilistic information splitting over the non-maximal omega-prime
// channel. The receiver attaches an ancilla |0>, applies U or U1 to
// (own qubit, ancilla), and succeeds when the ancilla reads 0.

#include <optional>
#include <span>

#include "hqc/hqis.hpp"

namespace hqc {

enum class TwoQubitOp { U, U1 };

std::string_view to_string(TwoQubitOp op);

// Rows (b/a, s, 0, 0), (0, 0, 0, -1), (0, 0, 1, 0), (s, -b/a, 0, 0) with
// s = sqrt(1 - b^2/a^2), on |receiver, ancilla>.
Unitary4 u_matrix(double a, double b);
// U (X (x) I).
Unitary4 u1_matrix(double a, double b);
Unitary4 two_qubit_matrix(TwoQubitOp op, double a, double b);

struct ProbTableRow {
  BellOutcome alice;
  ScriptedOutcome helper;                // Bit on the low-cost path, BellOutcome otherwise
  std::optional<TwoQubitOp> printed_op;  // as printed; the low-cost table prints none
  StatePattern state;                    // receiver state once the ancilla reads 0
  PauliCorrection correction;
};

// Low-cost path (8 rows) and high-cost path (16 rows), ancilla outcome 0.
std::span<const ProbTableRow> diana_prob_table();
std::span<const ProbTableRow> bob_prob_table();

// Operator the engine applies. The low-cost receiver always uses U: the
// |0> amplitude of her qubit always carries a. The high-cost receiver uses
// U when the joint outcome is psi+- and U1 otherwise.
TwoQubitOp operator_rule(bool low_cost, ScriptedOutcome helper);

PauliCorrection prob_correction(bool low_cost, BellOutcome alice, ScriptedOutcome helper);

struct ProbTranscript {
  ProtocolTranscript base;  // correction is I and unused on failure
  Bit ancilla_outcome = Bit::Zero;
  TwoQubitOp two_qubit_op = TwoQubitOp::U;
  bool succeeded = false;
};

struct PhqisOptions {
  std::optional<Party> helper;
  // Replaces the rule-selected two-qubit operator (table cross-checks).
  std::optional<TwoQubitOp> force_op;
};

struct ProbLayout {
  Layout base;
  QubitId ancilla = 5;
};

ProbTranscript execute_phqis(Register& reg, const ProbLayout& layout, double a, double b,
                             Party receiver, const SecretParam& lambda, OutcomeSource& outcomes,
                             const PhqisOptions& options = {});

ProbTranscript run_phqis(Party receiver, double a, double b, const SecretParam& lambda,
                         RandomSource& rng, const PhqisOptions& options = {});

// `script`: Alice's outcome, helper outcome, ancilla bit.
std::optional<ProbTranscript> phqis_branch(Party receiver, double a, double b,
                                           const SecretParam& lambda,
                                           std::vector<ScriptedOutcome> script,
                                           const PhqisOptions& options = {});

std::vector<ProbTranscript> enumerate_phqis(Party receiver, double a, double b,
                                            const SecretParam& lambda,
                                            const PhqisOptions& options = {});

// Sum of all ancilla-0 branch probabilities.
double success_probability_exact(Party receiver, double a, double b, const SecretParam& lambda);

}  // namespace hqc
