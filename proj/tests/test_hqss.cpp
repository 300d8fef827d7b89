#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "doctest.h"
#include "hqc/hqss.hpp"
#include "oracle.hpp"

using namespace hqc;
using oracle::cd;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidConfig;
}

}  // namespace

TEST_CASE("decoy states") {
  const double s = 1 / std::sqrt(2.0);
  CHECK(decoy_ket(DecoyState::Z0) == Ket::basis(1, 0));
  CHECK(decoy_ket(DecoyState::Z1) == Ket::basis(1, 1));
  CHECK((decoy_ket(DecoyState::Xplus).amplitudes() - oracle::ket({s, s})).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((decoy_ket(DecoyState::Xminus).amplitudes() - oracle::ket({s, -s})).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(basis_of(DecoyState::Xminus) == Basis::X);
  CHECK(value_of(DecoyState::Xminus) == Bit::One);
}

TEST_CASE("sequence construction") {
  RandomSource rng(1);
  const Distribution one = prepare_distribution(1, rng);
  CHECK(one.plan.p_a == std::vector<QubitId>{0});
  CHECK(one.plan.p_b == std::vector<QubitId>{1, 4});  // [p2, d1]
  const auto b2 = one.plan.rearranged(Sequence::B);
  CHECK(std::is_permutation(b2.begin(), b2.end(), one.plan.p_b.begin()));

  const Distribution two = prepare_distribution(2, rng);
  // P_D' = [p4, p8, d5, d6]
  CHECK(two.plan.p_d == std::vector<QubitId>{3, 7, 12, 13});
  CHECK(two.plan.p_b == std::vector<QubitId>{1, 5, 8, 9});
  CHECK(two.plan.p_c == std::vector<QubitId>{2, 6, 10, 11});
  CHECK(two.plan.p_a == std::vector<QubitId>{0, 4});
  CHECK(two.plan.decoys.size() == 6);
  CHECK(two.reg.qubits().size() == 14);

  CHECK(code_of([&] { prepare_distribution(0, rng); }) == ErrorCode::CopyCountOutOfRange);
  CHECK(code_of([&] { prepare_distribution(4, rng); }) == ErrorCode::CopyCountOutOfRange);
}

TEST_CASE("permutation soundness") {
  RandomSource rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    const SequencePlan plan = prepare_distribution(n, rng).plan;
    std::vector<std::size_t> sorted = plan.permutation;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
    for (Sequence s : {Sequence::B, Sequence::C, Sequence::D}) {
      const auto sent = plan.rearranged(s);
      const auto back = plan.restore_signals(s, sent);
      const auto& ext = plan.extended(s);
      CHECK(back == std::vector<QubitId>(ext.begin(), ext.begin() + n));
      for (std::size_t j : plan.decoy_coordinates()) {
        CHECK(std::any_of(plan.decoys.begin(), plan.decoys.end(),
                          [&](const DecoyRecord& r) { return r.id == sent[j]; }));
      }
    }
    CHECK(plan.decoy_coordinates().size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("permutations are uniform") {
  RandomSource rng(3);
  std::map<std::vector<std::size_t>, int> counts;
  const int trials = 24000;
  for (int i = 0; i < trials; ++i) ++counts[prepare_distribution(2, rng).plan.permutation];
  CHECK(counts.size() == 24);
  for (const auto& [perm, c] : counts) {
    CHECK(std::abs(c / double(trials) - 1 / 24.0) < oracle::five_sigma(1 / 24.0, trials));
  }
}

TEST_CASE("decoy preparation is uniform") {
  RandomSource rng(4);
  std::array<int, 4> counts{};
  const int preps = 10000;
  for (int i = 0; i < preps; ++i) {
    for (const auto& d : prepare_distribution(1, rng).plan.decoys) ++counts[static_cast<std::size_t>(d.state)];
  }
  const double total = 3.0 * preps, expect = total / 4;
  double chi2 = 0;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  // three degrees of freedom: mean 3, sd sqrt(6)
  CHECK(chi2 < 3 + 3 * std::sqrt(6.0));
}

TEST_CASE("no adversary leaves the record untouched") {
  RandomSource rng(5);
  Distribution dist = prepare_distribution(2, rng);
  const Register before = dist.reg;
  const AdversaryLog log = transmit_with_adversary(dist.plan, dist.reg, NoAdversary{}, rng);
  CHECK(dist.reg == before);
  CHECK(log.intercepts.empty());
  CHECK(log.pairs.empty());
}

TEST_CASE("intercepting a |+> decoy in Z forwards |0> or |1> evenly") {
  RandomSource rng(6);
  int zeros = 0, total = 0;
  for (int i = 0; i < 20000; ++i) {
    Register reg;
    reg.add(decoy_ket(DecoyState::Xplus), {0});
    const Bit b = reg.measure(0, rng);
    CHECK(*reg.pure_state(0) == Ket::basis(1, static_cast<std::size_t>(to_int(b))));
    zeros += b == Bit::Zero;
    ++total;
  }
  CHECK(std::abs(zeros / double(total) - 0.5) < oracle::five_sigma(0.5, total));
}

TEST_CASE("honest check is transparent") {
  RandomSource rng(7);
  std::size_t matched = 0, checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const int n = 1 + i % 3;
    Distribution dist = prepare_distribution(n, rng);
    (void)transmit_with_adversary(dist.plan, dist.reg, NoAdversary{}, rng);
    const CheckReport rep = run_check(dist.plan, dist.reg, 0.0, rng);
    CHECK(rep.errors == 0);
    CHECK_FALSE(rep.aborted);
    CHECK(rep.decoys_checked == static_cast<std::size_t>(3 * n));
    matched += rep.bases_matched;
    checked += rep.decoys_checked;
  }
  CHECK(std::abs(matched / double(checked) - 0.5) < oracle::five_sigma(0.5, double(checked)));
}

TEST_CASE("honest sharing reaches every copy") {
  RandomSource rng(8);
  for (int n : {1, 2, 3}) {
    for (Party r : {Party::Diana, Party::Bob, Party::Charlie}) {
      for (int i = 0; i < 20; ++i) {
        const cd lambda(rng.uniform(-2, 2), rng.uniform(-2, 2));
        const HqssTranscript t = run_hqss(n, {lambda}, r, NoAdversary{}, 0.0, rng);
        CHECK_FALSE(t.aborted);
        CHECK(t.check.errors == 0);
        REQUIRE(t.copies.size() == static_cast<std::size_t>(n));
        for (const auto& c : t.copies) {
          CHECK(std::abs(c.fidelity - 1) < 1e-12);
          CHECK(c.receiver == r);
        }
      }
    }
  }
  HqssOptions cluster;
  cluster.channel = ChannelSpec::cluster4();
  const HqssTranscript t = run_hqss(2, {cd(1, 1)}, Party::Diana, NoAdversary{}, 0.0, rng, cluster);
  for (const auto& c : t.copies) CHECK(std::abs(c.fidelity - 1) < 1e-12);
  CHECK(t.copies.at(0).classical_bits_consumed_by_receiver == 4);
}

TEST_CASE("intercept-resend signature") {
  RandomSource rng(9);
  std::size_t matched = 0, errors = 0;
  double aborts = 0, expected = 0, variance = 0;
  const int runs = 4000;
  for (int i = 0; i < runs; ++i) {
    const HqssTranscript t = run_hqss(2, {1.0}, Party::Diana, InterceptResend{}, 0.0, rng);
    matched += t.check.bases_matched;
    errors += t.check.errors;
    CHECK(t.log.intercepts.size() == 12);
    const double p = 1 - std::pow(0.75, double(t.check.bases_matched));
    expected += p;
    variance += p * (1 - p);
    aborts += t.aborted;
    CHECK(t.aborted == (t.check.errors > 0));
    if (t.aborted) CHECK(t.copies.empty());
  }
  REQUIRE(matched >= 10000);
  CHECK(std::abs(errors / double(matched) - 0.25) < oracle::five_sigma(0.25, double(matched)));
  CHECK(std::abs(aborts - expected) < 5 * std::sqrt(variance));
  // marginal over k: 1 - (7/8)^6
  CHECK(std::abs(aborts / runs - (1 - std::pow(7.0 / 8, 6))) < oracle::five_sigma(0.5512, runs));
}

TEST_CASE("partial interception and threshold") {
  RandomSource rng(10);
  InterceptResend partial;
  partial.targets = {Sequence::C};
  partial.probability = 0.5;
  std::size_t matched_c = 0, errors_c = 0;
  for (int i = 0; i < 3000; ++i) {
    const HqssTranscript t = run_hqss(1, {1.0}, Party::Bob, partial, 1.0, rng);
    CHECK_FALSE(t.aborted);  // error rate never exceeds 1
    for (const auto& e : t.log.intercepts) CHECK(e.sequence == Sequence::C);
    for (const auto& r : t.check.rounds) {
      if (r.sequence != Sequence::C) {
        CHECK_FALSE(r.error);
      } else if (r.matched) {
        ++matched_c;
        errors_c += r.error;
      }
    }
  }
  CHECK(std::abs(errors_c / double(matched_c) - 0.125) < oracle::five_sigma(0.125, double(matched_c)));
}

TEST_CASE("check bookkeeping") {
  RandomSource rng(11);
  const HqssTranscript t = run_hqss(3, {0.5}, Party::Diana, InterceptResend{}, 0.2, rng);
  const CheckReport& c = t.check;
  CHECK(c.rounds.size() == 9);
  std::size_t m = 0, e = 0;
  for (const auto& r : c.rounds) {
    m += r.matched;
    e += r.error;
    CHECK((r.matched || !r.error));
  }
  CHECK(m == c.bases_matched);
  CHECK(e == c.errors);
  CHECK(c.error_rate == double(e) / double(std::max<std::size_t>(m, 1)));
  CHECK(c.aborted == (c.error_rate > 0.2));
}

TEST_CASE("dishonest Bob's blind attack on the full protocol") {
  RandomSource rng(12);
  const int runs = 3000;
  for (int n : {1, 2}) {
    int recovered = 0, detected = 0, with_errors = 0;
    for (int i = 0; i < runs; ++i) {
      const HqssTranscript t = run_hqss(n, {cd(0.6, 0.8)}, Party::Bob, DishonestBobCapture{}, 0.0, rng);
      REQUIRE(t.attacker_copies.size() == static_cast<std::size_t>(n));
      CHECK(t.copies.empty());
      CHECK(t.log.pairs.size() == static_cast<std::size_t>(2 * n));
      CHECK(t.log.captured.size() == static_cast<std::size_t>(4 * n));
      const auto& a = t.attacker_copies[0];
      // pair containing C of copy 0 also held D of copy 0?
      const auto& p = *std::find_if(t.log.pairs.begin(), t.log.pairs.end(),
                                    [&](const CapturedPair& x) { return x.c == t.plan.p_c[0]; });
      if (p.d == t.plan.p_d[0]) CHECK(std::abs(a.fidelity - 1) < 1e-12);
      recovered += std::abs(a.fidelity - 1) < 1e-9;
      detected += t.aborted;
      with_errors += t.check.errors > 0;
    }
    CHECK(detected == with_errors);
    CHECK(detected > 0);
    // aligned with probability 1/(2n); a misaligned pair can still land on fidelity 1 by chance
    CHECK(recovered / double(runs) >= 1.0 / (2 * n) - oracle::five_sigma(1.0 / (2 * n), runs));
    CHECK(recovered < runs);
  }
}

TEST_CASE("attack study") {
  RandomSource rng(13);
  const AttackStudy s = attack_effectiveness_study(1, {cd(1, 0)}, 2000, rng);
  CHECK(s.bare.mean_fidelity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.bare.recovered_fraction == 1.0);
  CHECK(s.bare.detection_rate == 0.0);
  CHECK(s.blind.mean_fidelity < 1.0);
  CHECK(s.blind.detection_rate > 0.0);
  CHECK(s.blind.fidelities.size() == 2000);
  // slot-aligned pairing always recovers the signal but still disturbs decoys
  CHECK(s.aligned.recovered_fraction == 1.0);
  CHECK(s.aligned.detection_rate > 0.0);
}

TEST_CASE("sharing runs are reproducible") {
  auto run = [](std::uint64_t seed) {
    RandomSource rng(seed);
    return run_hqss(2, {cd(0.3, 0.4)}, Party::Bob, InterceptResend{}, 0.0, rng);
  };
  const HqssTranscript a = run(5), b = run(5);
  CHECK(a.plan.permutation == b.plan.permutation);
  CHECK(a.check.errors == b.check.errors);
  CHECK(a.log.intercepts.size() == b.log.intercepts.size());
  for (std::size_t i = 0; i < a.check.rounds.size(); ++i) {
    CHECK(a.check.rounds[i].outcome == b.check.rounds[i].outcome);
  }
}
