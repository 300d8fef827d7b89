#include "hqc/hqis.hpp"

#include <algorithm>
#include <string>

namespace hqc {

namespace {

using enum BellOutcome;
using C = Coeff;
using P = PauliCorrection;

constexpr DianaTableRow kDianaTable[] = {
    {PsiPlus, Bit::Zero, P::I, {C::PlusOne, C::PlusLambda}},
    {PsiPlus, Bit::One, P::Z, {C::PlusOne, C::MinusLambda}},
    {PsiMinus, Bit::Zero, P::Z, {C::PlusOne, C::MinusLambda}},
    {PsiMinus, Bit::One, P::I, {C::PlusOne, C::PlusLambda}},
    {PhiPlus, Bit::Zero, P::X, {C::PlusLambda, C::PlusOne}},
    {PhiPlus, Bit::One, P::XZ, {C::PlusLambda, C::MinusOne}},
    {PhiMinus, Bit::Zero, P::XZ, {C::MinusLambda, C::PlusOne}},
    {PhiMinus, Bit::One, P::X, {C::MinusLambda, C::MinusOne}},
};

constexpr BobTableRow kBobTable[] = {
    {PsiPlus, PsiPlus, P::Z, {C::PlusOne, C::MinusLambda}},
    {PsiPlus, PsiMinus, P::I, {C::PlusOne, C::PlusLambda}},
    {PsiPlus, PhiPlus, P::X, {C::PlusLambda, C::PlusOne}},
    {PsiPlus, PhiMinus, P::XZ, {C::PlusLambda, C::MinusOne}},
    {PsiMinus, PsiPlus, P::I, {C::PlusOne, C::PlusLambda}},
    {PsiMinus, PsiMinus, P::Z, {C::PlusOne, C::MinusLambda}},
    {PsiMinus, PhiPlus, P::XZ, {C::MinusLambda, C::PlusOne}},
    {PsiMinus, PhiMinus, P::X, {C::MinusLambda, C::MinusOne}},
    {PhiPlus, PhiPlus, P::I, {C::PlusOne, C::PlusLambda}},
    {PhiPlus, PhiMinus, P::Z, {C::PlusOne, C::MinusLambda}},
    {PhiPlus, PsiPlus, P::XZ, {C::PlusLambda, C::MinusOne}},
    {PhiPlus, PsiMinus, P::X, {C::PlusLambda, C::PlusOne}},
    {PhiMinus, PhiPlus, P::Z, {C::PlusOne, C::MinusLambda}},
    {PhiMinus, PhiMinus, P::I, {C::PlusOne, C::PlusLambda}},
    {PhiMinus, PsiPlus, P::X, {C::MinusLambda, C::MinusOne}},
    {PhiMinus, PsiMinus, P::XZ, {C::MinusLambda, C::PlusOne}},
};

// Position of an agent within the omega decomposition. The cluster state is
// the omega state with the B and D labels exchanged.
enum class Role { B, C, D };

Role role_of(ChannelKind kind, Party p) {
  const bool swapped = kind == ChannelKind::Cluster4;
  switch (p) {
    case Party::Bob: return swapped ? Role::D : Role::B;
    case Party::Charlie: return Role::C;
    case Party::Diana: return swapped ? Role::B : Role::D;
    case Party::Alice: break;
  }
  throw Error(ErrorCode::InvalidConfig, "Alice is not an agent");
}

Party party_with(ChannelKind kind, Role r) {
  for (Party p : {Party::Bob, Party::Charlie, Party::Diana}) {
    if (role_of(kind, p) == r) return p;
  }
  return Party::Charlie;
}

// Position of an agent's qubit inside the three-qubit agent state.
int agent_position(Party p) { return static_cast<int>(p) - 1; }

std::complex<double> coeff_value(Coeff c, std::complex<double> lambda) {
  switch (c) {
    case Coeff::PlusOne: return 1.0;
    case Coeff::MinusOne: return -1.0;
    case Coeff::PlusLambda: return lambda;
    case Coeff::MinusLambda: return -lambda;
  }
  return 0.0;
}

}  // namespace

std::string_view to_string(Party p) {
  switch (p) {
    case Party::Alice: return "alice";
    case Party::Bob: return "bob";
    case Party::Charlie: return "charlie";
    case Party::Diana: return "diana";
  }
  return "?";
}

std::optional<Party> parse_party(std::string_view name) {
  for (Party p : {Party::Alice, Party::Bob, Party::Charlie, Party::Diana}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::string_view to_string(PauliCorrection c) {
  switch (c) {
    case P::I: return "I";
    case P::X: return "X";
    case P::Z: return "Z";
    case P::XZ: return "XZ";
    case P::iY: return "iY";
  }
  return "?";
}

Unitary2 correction_matrix(PauliCorrection c) {
  switch (c) {
    case P::I: return gates::identity();
    case P::X: return gates::pauli_x();
    case P::Z: return gates::pauli_z();
    case P::XZ: return gates::xz();
    case P::iY: return gates::iy();
  }
  return gates::identity();
}

Ket StatePattern::evaluate(const SecretParam& p) const {
  Ket::Vector v(2);
  v << coeff_value(zero, p.lambda), coeff_value(one, p.lambda);
  return Ket::from_amplitudes(std::move(v));
}

std::span<const DianaTableRow> diana_table() { return kDianaTable; }
std::span<const BobTableRow> bob_table() { return kBobTable; }

PauliCorrection correction_for_diana(BellOutcome alice, Bit bc) {
  for (const auto& row : kDianaTable) {
    if (row.alice == alice && row.helper == bc) return row.correction;
  }
  return P::I;
}

PauliCorrection correction_for_bob(BellOutcome alice, BellOutcome cd) {
  for (const auto& row : kBobTable) {
    if (row.alice == alice && row.joint == cd) return row.correction;
  }
  return P::I;
}

Party powerful_agent(ChannelKind kind) { return party_with(kind, Role::D); }
Party weak_agent(ChannelKind kind) { return party_with(kind, Role::B); }

bool is_low_cost(ChannelKind kind, Party receiver) { return role_of(kind, receiver) == Role::D; }

std::vector<Party> helper_parties(ChannelKind kind, Party receiver, std::optional<Party> helper) {
  const Role role = role_of(kind, receiver);
  if (role == Role::D) {
    const Party h = helper.value_or(party_with(kind, Role::B));
    if (h == Party::Alice || h == receiver) {
      throw Error(ErrorCode::InvalidConfig, "helper must be another agent");
    }
    return {h};
  }
  const Role first = role == Role::B ? Role::C : Role::B;
  return {party_with(kind, first), party_with(kind, Role::D)};
}

QubitId Layout::of(Party p) const {
  switch (p) {
    case Party::Alice: return alice;
    case Party::Bob: return b;
    case Party::Charlie: return c;
    case Party::Diana: return d;
  }
  return alice;
}

ProtocolTranscript execute_hqis(Register& reg, const Layout& layout, const ChannelSpec& channel,
                                Party receiver, const SecretParam& lambda, OutcomeSource& outcomes,
                                const HqisOptions& options) {
  if (!channel.is_maximal()) {
    throw Error(ErrorCode::UnsupportedChannelForPerfectPath,
                std::string(to_string(channel.kind)) + " is not maximally entangled");
  }
  const Ket secret = secret_state(lambda);

  ProtocolTranscript t;
  t.channel = channel;
  t.lambda = lambda;
  t.receiver = receiver;
  t.alice_outcome = outcomes.bell(reg, layout.secret, layout.alice);

  const std::vector<Party> helpers = helper_parties(channel.kind, receiver, options.helper);
  if (helpers.size() == 1) {
    const Bit bit = outcomes.bit(reg, layout.of(helpers[0]));
    t.helper_outcomes.push_back({helpers, bit});
    t.correction = correction_for_diana(t.alice_outcome, bit);
    t.classical_bits_consumed_by_receiver = 3;
  } else {
    const BellOutcome joint = outcomes.bell(reg, layout.of(helpers[0]), layout.of(helpers[1]));
    t.helper_outcomes.push_back({helpers, joint});
    t.correction = correction_for_bob(t.alice_outcome, joint);
    t.classical_bits_consumed_by_receiver = 4;
  }

  const QubitId target = layout.of(receiver);
  t.pre_correction_state = reg.pure_state(target);
  reg.apply(correction_matrix(t.correction), target);
  t.final_state = reg.pure_state(target);
  t.fidelity = fidelity(reg.reduced(target), secret);
  t.branch_probability = outcomes.probability();
  return t;
}

namespace {

Register standalone_register(const ChannelSpec& channel, const SecretParam& lambda) {
  Register reg;
  reg.add(secret_state(lambda), {0});
  reg.add(channel.state(), {1, 2, 3, 4});
  return reg;
}

}  // namespace

ProtocolTranscript run_hqis(const ChannelSpec& channel, Party receiver, const SecretParam& lambda,
                            RandomSource& rng, const HqisOptions& options) {
  if (!channel.is_maximal()) {
    throw Error(ErrorCode::UnsupportedChannelForPerfectPath,
                std::string(to_string(channel.kind)) + " is not maximally entangled");
  }
  Register reg = standalone_register(channel, lambda);
  SampledOutcomes outcomes(rng);
  return execute_hqis(reg, Layout{}, channel, receiver, lambda, outcomes, options);
}

std::optional<ProtocolTranscript> hqis_branch(const ChannelSpec& channel, Party receiver,
                                              const SecretParam& lambda,
                                              std::vector<ScriptedOutcome> script,
                                              const HqisOptions& options) {
  if (!channel.is_maximal()) {
    throw Error(ErrorCode::UnsupportedChannelForPerfectPath,
                std::string(to_string(channel.kind)) + " is not maximally entangled");
  }
  Register reg = standalone_register(channel, lambda);
  ForcedOutcomes outcomes(std::move(script));
  try {
    return execute_hqis(reg, Layout{}, channel, receiver, lambda, outcomes, options);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroProbabilityBranch) return std::nullopt;
    throw;
  }
}

std::vector<ProtocolTranscript> enumerate_hqis(const ChannelSpec& channel, Party receiver,
                                               const SecretParam& lambda,
                                               const HqisOptions& options) {
  const bool low_cost = is_low_cost(channel.kind, receiver);
  std::vector<ProtocolTranscript> out;
  for (BellOutcome alice : kBellOutcomes) {
    std::vector<ScriptedOutcome> helpers;
    if (low_cost) {
      helpers.assign(kBits.begin(), kBits.end());
    } else {
      helpers.assign(kBellOutcomes.begin(), kBellOutcomes.end());
    }
    for (const auto& h : helpers) {
      if (auto t = hqis_branch(channel, receiver, lambda, {alice, h}, options)) {
        out.push_back(std::move(*t));
      }
    }
  }
  return out;
}

EncryptionReport verify_encryption(const ChannelSpec& channel, const SecretParam& lambda) {
  if (!channel.is_maximal()) {
    throw Error(ErrorCode::UnsupportedChannelForPerfectPath,
                std::string(to_string(channel.kind)) + " is not maximally entangled");
  }
  // Literal encodings of the weak agent's conditional states for Alice's
  // psi+ outcome, indexed by the joint outcome.
  constexpr PauliCorrection kPsiPlusEncoding[] = {P::Z, P::I, P::X, P::iY};

  const Ket secret = secret_state(lambda);
  const Ket full = tensor(secret, channel.state());
  EncryptionReport report;
  report.receiver = weak_agent(channel.kind);
  const int weak = agent_position(report.receiver);
  const int first = agent_position(party_with(channel.kind, Role::C));
  const int second = agent_position(party_with(channel.kind, Role::D));
  const DensityMatrix2 half = DensityMatrix2::Identity() / 2.0;

  bool ok = true;
  for (BellOutcome alice : kBellOutcomes) {
    const Projection branch = contract_bell(full, {0, 1}, alice);
    const Ket& agents = branch.value();
    const DensityMatrix2 rho = reduced_density_1q(agents, weak);
    const double deviation = (rho - half).cwiseAbs().maxCoeff();
    ok = ok && deviation <= kExactTol;
    report.branches.push_back({alice, branch.probability, rho, deviation});

    for (std::size_t j = 0; j < kBellOutcomes.size(); ++j) {
      const BellOutcome joint = kBellOutcomes[j];
      const Projection cond = contract_bell(agents, {first, second}, joint);
      const PauliCorrection enc =
          alice == PsiPlus ? kPsiPlusEncoding[j] : correction_for_bob(alice, joint);
      const Ket expected = apply_unitary(secret, correction_matrix(enc), {0});
      const double f = fidelity_up_to_phase(cond.value(), expected);
      ok = ok && std::abs(f - 1.0) <= kExactTol && std::abs(cond.probability - 0.25) <= kExactTol;
      report.conditionals.push_back({alice, joint, enc, cond.probability, f});
    }
  }
  report.ok = ok;
  return report;
}

double role_swap_deviation(const SecretParam& lambda) {
  const Ket secret = secret_state(lambda);
  const Ket with_omega = tensor(secret, omega());
  const Ket with_cluster = tensor(secret, cluster4());
  double worst = 0.0;
  for (BellOutcome alice : kBellOutcomes) {
    const Ket omega_agents = contract_bell(with_omega, {0, 1}, alice).value();
    const Ket cluster_agents = contract_bell(with_cluster, {0, 1}, alice).value();
    const Ket reordered = permute_qubits(cluster_agents, {2, 1, 0});
    worst = std::max(worst, (omega_agents.amplitudes() - reordered.amplitudes()).cwiseAbs().maxCoeff());
  }
  return worst;
}

bool role_swap_check(const SecretParam& lambda) { return role_swap_deviation(lambda) <= kExactTol; }

ProtocolTranscript dishonest_receiver_attack(const ChannelSpec& channel, const SecretParam& lambda,
                                             RandomSource& rng) {
  const Party holder = weak_agent(channel.kind);
  ProtocolTranscript t = run_hqis(channel, holder, lambda, rng);
  t.holders = {holder, holder, holder};
  return t;
}

}  // namespace hqc
