#include "hqc/hqss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hqc {

std::string_view to_string(Sequence s) {
  switch (s) {
    case Sequence::A: return "A";
    case Sequence::B: return "B";
    case Sequence::C: return "C";
    case Sequence::D: return "D";
  }
  return "?";
}

std::string_view to_string(DecoyState d) {
  switch (d) {
    case DecoyState::Z0: return "0";
    case DecoyState::Z1: return "1";
    case DecoyState::Xplus: return "+";
    case DecoyState::Xminus: return "-";
  }
  return "?";
}

std::string_view to_string(Basis b) { return b == Basis::Z ? "Z" : "X"; }

Basis basis_of(DecoyState d) {
  return d == DecoyState::Z0 || d == DecoyState::Z1 ? Basis::Z : Basis::X;
}

Bit value_of(DecoyState d) {
  return d == DecoyState::Z0 || d == DecoyState::Xplus ? Bit::Zero : Bit::One;
}

Ket decoy_ket(DecoyState d) {
  const Ket k = Ket::basis(1, to_int(value_of(d)));
  return basis_of(d) == Basis::Z ? k : apply_unitary(k, gates::hadamard(), {0});
}

const std::vector<QubitId>& SequencePlan::extended(Sequence s) const {
  switch (s) {
    case Sequence::A: return p_a;
    case Sequence::B: return p_b;
    case Sequence::C: return p_c;
    case Sequence::D: break;
  }
  return p_d;
}

std::vector<QubitId> SequencePlan::rearranged(Sequence s) const {
  if (s == Sequence::A) return p_a;
  const auto& ext = extended(s);
  std::vector<QubitId> out(ext.size());
  for (std::size_t j = 0; j < permutation.size(); ++j) out[j] = ext[permutation[j]];
  return out;
}

std::vector<std::size_t> SequencePlan::decoy_coordinates() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < permutation.size(); ++j) {
    if (permutation[j] >= static_cast<std::size_t>(n)) out.push_back(j);
  }
  return out;
}

std::vector<std::size_t> SequencePlan::signal_coordinates() const {
  std::vector<std::size_t> out(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < permutation.size(); ++j) {
    if (permutation[j] < static_cast<std::size_t>(n)) out[permutation[j]] = j;
  }
  return out;
}

std::vector<QubitId> SequencePlan::restore_signals(Sequence s,
                                                   const std::vector<QubitId>& transmitted) const {
  if (s == Sequence::A) return p_a;
  std::vector<QubitId> out;
  for (std::size_t j : signal_coordinates()) out.push_back(transmitted.at(j));
  return out;
}

Distribution prepare_distribution(int n, RandomSource& rng, const ChannelSpec& channel) {
  if (n < 1 || n > 3) {
    throw Error(ErrorCode::CopyCountOutOfRange, "n = " + std::to_string(n) + ", need 1..3");
  }
  Distribution dist;
  SequencePlan& plan = dist.plan;
  plan.n = n;
  const Ket copy = channel.state();
  const auto un = static_cast<QubitId>(n);
  for (QubitId k = 0; k < un; ++k) {
    const QubitId base = 4 * k;
    dist.reg.add(copy, {base, base + 1, base + 2, base + 3});
    plan.p_a.push_back(base);
    plan.p_b.push_back(base + 1);
    plan.p_c.push_back(base + 2);
    plan.p_d.push_back(base + 3);
  }
  const Sequence agents[] = {Sequence::B, Sequence::C, Sequence::D};
  std::vector<QubitId>* seqs[] = {&plan.p_b, &plan.p_c, &plan.p_d};
  QubitId next = 4 * un;
  for (int s = 0; s < 3; ++s) {
    for (QubitId i = 0; i < un; ++i) {
      const auto state = static_cast<DecoyState>(rng.below(4));
      dist.reg.add(decoy_ket(state), {next});
      plan.decoys.push_back({agents[s], seqs[s]->size(), next, state});
      seqs[s]->push_back(next);
      ++next;
    }
  }
  plan.permutation = random_permutation(2 * static_cast<std::size_t>(n), rng);
  return dist;
}

namespace {

Bit measure_in(Register& reg, QubitId id, Basis basis, RandomSource& rng) {
  if (basis == Basis::Z) return reg.measure(id, rng);
  reg.apply(gates::hadamard(), id);
  const Bit b = reg.measure(id, rng);
  reg.apply(gates::hadamard(), id);
  return b;
}

Basis random_basis(RandomSource& rng) { return rng.bit() ? Basis::X : Basis::Z; }

}  // namespace

void dishonest_bob_blind_measure(const SequencePlan& plan, Register& reg, BlindPairing pairing,
                                 AdversaryLog& log, RandomSource& rng) {
  const auto c = plan.rearranged(Sequence::C);
  const auto d = plan.rearranged(Sequence::D);
  std::vector<std::size_t> sigma(c.size());
  if (pairing == BlindPairing::Random) {
    sigma = random_permutation(c.size(), rng);
  } else {
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    const BellOutcome o = reg.measure_bell(c[i], d[sigma[i]], rng);
    log.pairs.push_back({i, sigma[i], c[i], d[sigma[i]], o});
  }
}

AdversaryLog transmit_with_adversary(const SequencePlan& plan, Register& reg,
                                     const AdversaryModel& adversary, RandomSource& rng) {
  AdversaryLog log;
  if (const auto* ir = std::get_if<InterceptResend>(&adversary)) {
    for (Sequence s : {Sequence::B, Sequence::C, Sequence::D}) {
      if (std::find(ir->targets.begin(), ir->targets.end(), s) == ir->targets.end()) continue;
      const auto seq = plan.rearranged(s);
      for (std::size_t j = 0; j < seq.size(); ++j) {
        if (!rng.bernoulli(ir->probability)) continue;
        const Basis basis = random_basis(rng);
        // Measuring leaves the qubit in the eigenstate that is forwarded.
        const Bit outcome = measure_in(reg, seq[j], basis, rng);
        log.intercepts.push_back({s, j, seq[j], basis, outcome});
      }
    }
  } else if (const auto* bob = std::get_if<DishonestBobCapture>(&adversary)) {
    for (Sequence s : {Sequence::C, Sequence::D}) {
      for (QubitId id : plan.rearranged(s)) log.captured.push_back(id);
    }
    dishonest_bob_blind_measure(plan, reg, bob->pairing, log, rng);
  }
  return log;
}

CheckReport run_check(const SequencePlan& plan, Register& reg, double threshold, RandomSource& rng) {
  CheckReport report;
  report.threshold = threshold;
  const auto coords = plan.decoy_coordinates();
  for (Sequence s : {Sequence::B, Sequence::C, Sequence::D}) {
    const auto seq = plan.rearranged(s);
    for (std::size_t j : coords) {
      const QubitId id = seq[j];
      const auto rec = std::find_if(plan.decoys.begin(), plan.decoys.end(),
                                    [id](const DecoyRecord& r) { return r.id == id; });
      const Basis basis = random_basis(rng);
      const Bit outcome = measure_in(reg, id, basis, rng);
      const bool matched = basis == basis_of(rec->state);
      const bool error = matched && outcome != value_of(rec->state);
      report.rounds.push_back({s, j, id, rec->state, basis, outcome, matched, error});
      ++report.decoys_checked;
      report.bases_matched += matched;
      report.errors += error;
    }
  }
  report.error_rate =
      static_cast<double>(report.errors) / static_cast<double>(std::max<std::size_t>(report.bases_matched, 1));
  report.aborted = report.error_rate > threshold;
  return report;
}

namespace {

// Bob applies the high-cost correction using the outcome of whichever
// captured pair contained C_k, whether or not it also contained D_k.
ProtocolTranscript blind_recovery(Register& reg, const Layout& layout, const AdversaryLog& log,
                                  const SecretParam& lambda, RandomSource& rng) {
  ProtocolTranscript t;
  t.channel = ChannelSpec::omega();
  t.lambda = lambda;
  t.receiver = Party::Bob;
  t.holders = {Party::Bob, Party::Bob, Party::Bob};
  t.alice_outcome = reg.measure_bell(layout.secret, layout.alice, rng);
  const auto pair = std::find_if(log.pairs.begin(), log.pairs.end(),
                                 [&](const CapturedPair& p) { return p.c == layout.c; });
  const BellOutcome joint = pair->outcome;
  t.helper_outcomes.push_back({{Party::Bob}, joint});
  t.correction = correction_for_bob(t.alice_outcome, joint);
  t.classical_bits_consumed_by_receiver = 2;
  t.pre_correction_state = reg.pure_state(layout.b);
  reg.apply(correction_matrix(t.correction), layout.b);
  t.final_state = reg.pure_state(layout.b);
  t.fidelity = fidelity(reg.reduced(layout.b), secret_state(lambda));
  return t;
}

}  // namespace

HqssTranscript run_hqss(int n, const SecretParam& lambda, Party receiver,
                        const AdversaryModel& adversary, double threshold, RandomSource& rng,
                        const HqssOptions& options) {
  if (!options.channel.is_maximal()) {
    throw Error(ErrorCode::UnsupportedChannelForPerfectPath,
                std::string(to_string(options.channel.kind)) + " is not maximally entangled");
  }
  (void)secret_state(lambda);
  Distribution dist = prepare_distribution(n, rng, options.channel);
  HqssTranscript out;
  out.plan = std::move(dist.plan);
  Register& reg = dist.reg;
  const SequencePlan& plan = out.plan;

  out.log = transmit_with_adversary(plan, reg, adversary, rng);
  out.check = run_check(plan, reg, threshold, rng);
  out.aborted = out.check.aborted;

  // Signal coordinates are disclosed and every agent restores the order.
  const auto b = plan.restore_signals(Sequence::B, plan.rearranged(Sequence::B));
  const auto c = plan.restore_signals(Sequence::C, plan.rearranged(Sequence::C));
  const auto d = plan.restore_signals(Sequence::D, plan.rearranged(Sequence::D));

  const bool captured = std::holds_alternative<DishonestBobCapture>(adversary);
  if (captured && options.channel.kind == ChannelKind::Omega) {
    for (int k = 0; k < n; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      const Layout layout{plan.secret_id(k), plan.p_a[uk], b[uk], c[uk], d[uk]};
      reg.add(secret_state(lambda), {layout.secret});
      out.attacker_copies.push_back(blind_recovery(reg, layout, out.log, lambda, rng));
    }
    return out;
  }
  if (out.aborted || captured) return out;

  SampledOutcomes outcomes(rng);
  HqisOptions hopts;
  hopts.helper = options.helper;
  for (int k = 0; k < n; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const Layout layout{plan.secret_id(k), plan.p_a[uk], b[uk], c[uk], d[uk]};
    reg.add(secret_state(lambda), {layout.secret});
    out.copies.push_back(execute_hqis(reg, layout, options.channel, receiver, lambda, outcomes, hopts));
  }
  return out;
}

namespace {

void finish(AttackSummary& s, std::size_t detected, std::size_t decoy_errors,
            double undetected_fidelity_sum, std::size_t undetected_copies) {
  if (s.fidelities.empty()) return;
  const double count = static_cast<double>(s.fidelities.size());
  s.mean_fidelity = std::accumulate(s.fidelities.begin(), s.fidelities.end(), 0.0) / count;
  s.recovered_fraction =
      static_cast<double>(std::count_if(s.fidelities.begin(), s.fidelities.end(),
                                        [](double f) { return f > 1 - 1e-9; })) /
      count;
  const double trials = static_cast<double>(s.trials);
  s.detection_rate = static_cast<double>(detected) / trials;
  s.mean_decoy_errors = static_cast<double>(decoy_errors) / trials;
  s.mean_fidelity_undetected =
      undetected_copies ? undetected_fidelity_sum / static_cast<double>(undetected_copies) : 0.0;
}

AttackSummary sharing_attack(int n, const SecretParam& lambda, std::size_t trials,
                             BlindPairing pairing, RandomSource& rng) {
  AttackSummary s;
  s.trials = trials;
  std::size_t detected = 0, errors = 0, undetected_copies = 0;
  double undetected_sum = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const HqssTranscript t =
        run_hqss(n, lambda, Party::Bob, DishonestBobCapture{pairing}, 0.0, rng);
    detected += t.aborted;
    errors += t.check.errors;
    if (!t.aborted) ++s.undetected;
    for (const auto& c : t.attacker_copies) {
      s.fidelities.push_back(c.fidelity);
      if (!t.aborted) {
        undetected_sum += c.fidelity;
        ++undetected_copies;
      }
    }
  }
  finish(s, detected, errors, undetected_sum, undetected_copies);
  return s;
}

}  // namespace

AttackStudy attack_effectiveness_study(int n, const SecretParam& lambda, std::size_t trials,
                                       RandomSource& rng) {
  if (n < 1 || n > 3) {
    throw Error(ErrorCode::CopyCountOutOfRange, "n = " + std::to_string(n) + ", need 1..3");
  }
  AttackStudy study;
  study.n = n;
  study.bare.trials = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    study.bare.fidelities.push_back(
        dishonest_receiver_attack(ChannelSpec::omega(), lambda, rng).fidelity);
  }
  study.bare.undetected = trials;
  finish(study.bare, 0, 0, std::accumulate(study.bare.fidelities.begin(), study.bare.fidelities.end(), 0.0),
         study.bare.fidelities.size());
  study.blind = sharing_attack(n, lambda, trials, BlindPairing::Random, rng);
  study.aligned = sharing_attack(n, lambda, trials, BlindPairing::Aligned, rng);
  return study;
}

}  // namespace hqc
