#include "hqc/phqis.hpp"

#include <cmath>

namespace hqc {

namespace {

using enum BellOutcome;
using C = Coeff;
using P = PauliCorrection;
using Op = TwoQubitOp;

const ProbTableRow kDianaProbTable[] = {
    {PsiPlus, Bit::Zero, std::nullopt, {C::PlusOne, C::PlusLambda}, P::I},
    {PsiMinus, Bit::Zero, std::nullopt, {C::PlusOne, C::MinusLambda}, P::Z},
    {PhiPlus, Bit::Zero, std::nullopt, {C::PlusLambda, C::PlusOne}, P::X},
    {PhiMinus, Bit::Zero, std::nullopt, {C::MinusLambda, C::PlusOne}, P::iY},
    {PsiPlus, Bit::One, std::nullopt, {C::PlusOne, C::MinusLambda}, P::Z},
    {PsiMinus, Bit::One, std::nullopt, {C::PlusOne, C::PlusLambda}, P::I},
    {PhiPlus, Bit::One, std::nullopt, {C::PlusLambda, C::MinusOne}, P::iY},
    {PhiMinus, Bit::One, std::nullopt, {C::MinusLambda, C::MinusOne}, P::X},
};

const ProbTableRow kBobProbTable[] = {
    {PsiPlus, PsiPlus, Op::U, {C::PlusOne, C::MinusLambda}, P::Z},
    {PsiPlus, PsiMinus, Op::U, {C::PlusOne, C::PlusLambda}, P::I},
    {PsiMinus, PsiPlus, Op::U, {C::PlusOne, C::PlusLambda}, P::I},
    {PsiMinus, PsiMinus, Op::U, {C::PlusOne, C::MinusLambda}, P::Z},
    {PhiPlus, PsiPlus, Op::U, {C::PlusLambda, C::MinusOne}, P::XZ},
    {PhiPlus, PsiMinus, Op::U, {C::PlusLambda, C::PlusOne}, P::X},
    {PhiMinus, PsiPlus, Op::U, {C::MinusLambda, C::MinusOne}, P::X},
    {PhiMinus, PsiMinus, Op::U1, {C::MinusLambda, C::PlusOne}, P::XZ},
    {PsiPlus, PhiPlus, Op::U1, {C::PlusOne, C::PlusLambda}, P::I},
    {PsiPlus, PhiMinus, Op::U1, {C::MinusOne, C::PlusLambda}, P::Z},
    {PsiMinus, PhiPlus, Op::U1, {C::PlusOne, C::MinusLambda}, P::Z},
    {PsiMinus, PhiMinus, Op::U1, {C::MinusOne, C::MinusLambda}, P::I},
    {PhiPlus, PhiPlus, Op::U1, {C::PlusLambda, C::PlusOne}, P::X},
    {PhiPlus, PhiMinus, Op::U1, {C::MinusLambda, C::PlusOne}, P::XZ},
    {PhiMinus, PhiPlus, Op::U1, {C::MinusLambda, C::PlusOne}, P::XZ},
    {PhiMinus, PhiMinus, Op::U1, {C::PlusLambda, C::PlusOne}, P::X},
};

const ProbTableRow& find_row(std::span<const ProbTableRow> table, BellOutcome alice,
                             const ScriptedOutcome& helper) {
  for (const auto& row : table) {
    if (row.alice == alice && row.helper == helper) return row;
  }
  throw Error(ErrorCode::SizeMismatch, "helper outcome of the wrong kind");
}

ChannelSpec prob_channel(double a, double b) {
  // Both tables also cover a == b, where the channel is the maximal one.
  validate_omega_prime(a, b);
  ChannelSpec spec;
  spec.kind = ChannelKind::OmegaPrime;
  spec.a = a;
  spec.b = b;
  return spec;
}

}  // namespace

std::string_view to_string(TwoQubitOp op) { return op == Op::U ? "U" : "U1"; }

Unitary4 u_matrix(double a, double b) {
  validate_omega_prime(a, b);
  const double r = b / a;
  const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
  Unitary4::Matrix m;
  m << r, s, 0, 0,
       0, 0, 0, -1,
       0, 0, 1, 0,
       s, -r, 0, 0;
  return Unitary4::from_matrix(m);
}

Unitary4 u1_matrix(double a, double b) {
  Unitary4::Matrix x_i = Unitary4::Matrix::Zero();
  x_i(0, 2) = x_i(1, 3) = x_i(2, 0) = x_i(3, 1) = 1;
  return Unitary4::from_matrix(u_matrix(a, b).matrix() * x_i);
}

Unitary4 two_qubit_matrix(TwoQubitOp op, double a, double b) {
  return op == Op::U ? u_matrix(a, b) : u1_matrix(a, b);
}

std::span<const ProbTableRow> diana_prob_table() { return kDianaProbTable; }
std::span<const ProbTableRow> bob_prob_table() { return kBobProbTable; }

TwoQubitOp operator_rule(bool low_cost, ScriptedOutcome helper) {
  if (low_cost) return Op::U;
  return is_psi(std::get<BellOutcome>(helper)) ? Op::U : Op::U1;
}

PauliCorrection prob_correction(bool low_cost, BellOutcome alice, ScriptedOutcome helper) {
  return find_row(low_cost ? diana_prob_table() : bob_prob_table(), alice, helper).correction;
}

ProbTranscript execute_phqis(Register& reg, const ProbLayout& layout, double a, double b,
                             Party receiver, const SecretParam& lambda, OutcomeSource& outcomes,
                             const PhqisOptions& options) {
  const Ket secret = secret_state(lambda);
  const ChannelSpec channel = prob_channel(a, b);
  const Layout& L = layout.base;

  ProbTranscript out;
  ProtocolTranscript& t = out.base;
  t.channel = channel;
  t.lambda = lambda;
  t.receiver = receiver;
  t.alice_outcome = outcomes.bell(reg, L.secret, L.alice);

  const bool low_cost = is_low_cost(channel.kind, receiver);
  const std::vector<Party> helpers = helper_parties(channel.kind, receiver, options.helper);
  ScriptedOutcome helper;
  if (low_cost) {
    helper = outcomes.bit(reg, L.of(helpers[0]));
    t.classical_bits_consumed_by_receiver = 3;
  } else {
    helper = outcomes.bell(reg, L.of(helpers[0]), L.of(helpers[1]));
    t.classical_bits_consumed_by_receiver = 4;
  }
  t.helper_outcomes.push_back({helpers, helper});

  const QubitId target = L.of(receiver);
  out.two_qubit_op = options.force_op.value_or(operator_rule(low_cost, helper));
  reg.add(Ket::basis(1, 0), {layout.ancilla});
  reg.apply(two_qubit_matrix(out.two_qubit_op, a, b), target, layout.ancilla);
  out.ancilla_outcome = outcomes.bit(reg, layout.ancilla);
  out.succeeded = out.ancilla_outcome == Bit::Zero;

  t.pre_correction_state = reg.pure_state(target);
  if (out.succeeded) {
    t.correction = prob_correction(low_cost, t.alice_outcome, helper);
    reg.apply(correction_matrix(t.correction), target);
  }
  t.final_state = reg.pure_state(target);
  t.fidelity = fidelity(reg.reduced(target), secret);
  t.branch_probability = outcomes.probability();
  return out;
}

namespace {

Register prob_register(double a, double b, const SecretParam& lambda) {
  Register reg;
  reg.add(secret_state(lambda), {0});
  reg.add(omega_prime(a, b), {1, 2, 3, 4});
  return reg;
}

}  // namespace

ProbTranscript run_phqis(Party receiver, double a, double b, const SecretParam& lambda,
                         RandomSource& rng, const PhqisOptions& options) {
  Register reg = prob_register(a, b, lambda);
  SampledOutcomes outcomes(rng);
  return execute_phqis(reg, ProbLayout{}, a, b, receiver, lambda, outcomes, options);
}

std::optional<ProbTranscript> phqis_branch(Party receiver, double a, double b,
                                           const SecretParam& lambda,
                                           std::vector<ScriptedOutcome> script,
                                           const PhqisOptions& options) {
  Register reg = prob_register(a, b, lambda);
  ForcedOutcomes outcomes(std::move(script));
  try {
    return execute_phqis(reg, ProbLayout{}, a, b, receiver, lambda, outcomes, options);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroProbabilityBranch) return std::nullopt;
    throw;
  }
}

std::vector<ProbTranscript> enumerate_phqis(Party receiver, double a, double b,
                                            const SecretParam& lambda,
                                            const PhqisOptions& options) {
  const bool low_cost = is_low_cost(ChannelKind::OmegaPrime, receiver);
  std::vector<ProbTranscript> out;
  for (BellOutcome alice : kBellOutcomes) {
    std::vector<ScriptedOutcome> helpers;
    if (low_cost) {
      helpers.assign(kBits.begin(), kBits.end());
    } else {
      helpers.assign(kBellOutcomes.begin(), kBellOutcomes.end());
    }
    for (const auto& h : helpers) {
      for (Bit anc : kBits) {
        if (auto t = phqis_branch(receiver, a, b, lambda, {alice, h, anc}, options)) {
          out.push_back(std::move(*t));
        }
      }
    }
  }
  return out;
}

double success_probability_exact(Party receiver, double a, double b, const SecretParam& lambda) {
  double total = 0;
  for (const ProbTranscript& t : enumerate_phqis(receiver, a, b, lambda)) {
    if (t.succeeded) total += t.base.branch_probability;
  }
  return total;
}

}  // namespace hqc
