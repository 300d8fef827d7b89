#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "hqc/harness.hpp"
#include "oracle.hpp"

using namespace hqc;
using oracle::cd;

namespace {

std::string invalid_message(const ScenarioConfig& c) {
  try {
    (void)validate(c);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
    return e.what();
  }
  FAIL("config was accepted");
  return {};
}

bool mentions(const std::string& msg, const std::string& field) {
  return msg.find("InvalidConfig: " + field + ":") != std::string::npos;
}

ScenarioConfig probabilistic(double a, double b) {
  ScenarioConfig c;
  c.protocol = Protocol::HqisProbabilistic;
  c.a = a;
  c.b = b;
  return c;
}

ScenarioConfig sharing(int n) {
  ScenarioConfig c;
  c.protocol = Protocol::Hqss;
  c.n = n;
  return c;
}

}  // namespace

TEST_CASE("names round-trip") {
  for (Protocol p : {Protocol::HqisPerfect, Protocol::HqisProbabilistic, Protocol::Hqss, Protocol::AttackStudy,
                     Protocol::VerifyTables, Protocol::VerifyEncryption}) {
    CHECK(parse_protocol(to_string(p)) == p);
  }
  for (AdversaryKind a : {AdversaryKind::None, AdversaryKind::InterceptResend, AdversaryKind::DishonestBob}) {
    CHECK(parse_adversary(to_string(a)) == a);
  }
  CHECK(parse_format("csv") == ReportFormat::Csv);
  CHECK_FALSE(parse_protocol("bb84"));
}

TEST_CASE("validation fills defaults") {
  const ScenarioConfig p = validate({});
  CHECK(p.channel == ChannelKind::Omega);
  CHECK_FALSE(p.n);
  CHECK_FALSE(p.threshold);

  const ScenarioConfig s = validate(sharing(2));
  CHECK(s.threshold == 0.0);
  CHECK(s.channel == ChannelKind::Omega);

  ScenarioConfig ir = sharing(1);
  ir.adversary = AdversaryKind::InterceptResend;
  CHECK(validate(ir).intercept_prob == 1.0);

  CHECK(validate(probabilistic(0.8, 0.6)).channel == ChannelKind::OmegaPrime);
}

TEST_CASE("coefficients are checked to 1e-9 and renormalized") {
  const ScenarioConfig near = validate(probabilistic(0.8 + 3e-10, 0.6));
  CHECK(std::abs(*near.a * *near.a + *near.b * *near.b - 1) < 1e-15);
  CHECK(mentions(invalid_message(probabilistic(0.8 + 1e-6, 0.6)), "a"));
  CHECK(mentions(invalid_message(probabilistic(0.6, 0.8)), "b"));
  CHECK(mentions(invalid_message(probabilistic(1.0, 0.0)), "b"));
  ScenarioConfig missing;
  missing.protocol = Protocol::HqisProbabilistic;
  missing.a = 0.8;
  CHECK(mentions(invalid_message(missing), "b"));
  const double s = 1 / std::sqrt(2.0);
  CHECK_NOTHROW(validate(probabilistic(s, s)));
}

TEST_CASE("inconsistent configs are rejected by field") {
  ScenarioConfig c = sharing(1);
  c.a = 0.8;
  CHECK(mentions(invalid_message(c), "a"));

  CHECK(mentions(invalid_message(sharing(4)), "n"));
  CHECK(mentions(invalid_message(sharing(0)), "n"));

  c = {};
  c.n = 1;
  CHECK(mentions(invalid_message(c), "n"));

  c = {};
  c.threshold = 0.1;
  CHECK(mentions(invalid_message(c), "threshold"));

  c = {};
  c.adversary = AdversaryKind::InterceptResend;
  CHECK(mentions(invalid_message(c), "adversary"));

  c = sharing(1);
  c.intercept_prob = 0.5;
  CHECK(mentions(invalid_message(c), "intercept_prob"));

  c = sharing(1);
  c.adversary = AdversaryKind::InterceptResend;
  c.intercept_prob = 1.5;
  CHECK(mentions(invalid_message(c), "intercept_prob"));

  c = sharing(1);
  c.threshold = -0.1;
  CHECK(mentions(invalid_message(c), "threshold"));

  c = sharing(1);
  c.channel = ChannelKind::Cluster4;
  c.adversary = AdversaryKind::DishonestBob;
  CHECK(mentions(invalid_message(c), "adversary"));

  c = {};
  c.channel = ChannelKind::OmegaPrime;
  CHECK(mentions(invalid_message(c), "channel"));

  c = probabilistic(0.8, 0.6);
  c.channel = ChannelKind::Omega;
  CHECK(mentions(invalid_message(c), "channel"));

  c = {};
  c.receiver = Party::Alice;
  CHECK(mentions(invalid_message(c), "receiver"));

  c = {};
  c.trials = 0;
  CHECK(mentions(invalid_message(c), "trials"));

  c = {};
  c.lambda = cd(NAN, 0);
  CHECK(mentions(invalid_message(c), "lambda"));

  c = {};
  c.receiver = Party::Bob;
  c.helper = Party::Charlie;
  CHECK(mentions(invalid_message(c), "helper"));

  c = {};
  c.helper = Party::Diana;
  CHECK(mentions(invalid_message(c), "helper"));

  c = {};
  c.protocol = Protocol::VerifyTables;
  c.channel = ChannelKind::Omega;
  CHECK(mentions(invalid_message(c), "channel"));

  c = {};
  c.helper = Party::Charlie;
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("config JSON") {
  ScenarioConfig c = sharing(2);
  c.adversary = AdversaryKind::InterceptResend;
  c.intercept_prob = 0.5;
  c.lambda.reset();
  c.seed = 0xFFFFFFFFFFFFFFFFULL;
  c.trials = 123;
  c.receiver = Party::Bob;
  CHECK(config_from_json(config_to_json(c)) == c);

  const ScenarioConfig p = config_from_json(R"({"protocol": "hqis-probabilistic", "a": 0.8, "b": 0.6,
      "lambda": {"re": 0.5, "im": -1}, "receiver": "charlie"})");
  CHECK(p.protocol == Protocol::HqisProbabilistic);
  CHECK(p.lambda == cd(0.5, -1));
  CHECK(p.receiver == Party::Charlie);

  auto code = [](const std::string& text) {
    try {
      (void)config_from_json(text);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(mentions(code(R"({"colour": 1})"), "colour"));
  CHECK(mentions(code(R"({"protocol": "bb84"})"), "protocol"));
  CHECK(mentions(code(R"({"trials": -3})"), "trials"));
  CHECK(mentions(code(R"({"lambda": "sometimes"})"), "lambda"));
  CHECK(mentions(code("{"), "config"));
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("config hash") {
  ScenarioConfig c = validate({});
  const std::string h = config_hash(c);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  ScenarioConfig seeded = c;
  seeded.seed = 99;
  CHECK(config_hash(seeded) == h);
  ScenarioConfig more = c;
  more.trials = 2;
  CHECK(config_hash(more) != h);

  // FNV-1a 64 reference values
  auto fnv = [](std::string_view s) {
    std::uint64_t x = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) x = (x ^ ch) * 0x100000001b3ULL;
    return x;
  };
  CHECK(fnv("") == 0xcbf29ce484222325ULL);
  CHECK(fnv("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("canonical rounding keeps 12 significant digits") {
  CHECK(canonical(0.1 + 0.2) == 0.3);
  CHECK(canonical(1.0 / 3) == 0.333333333333);
  CHECK(canonical(-0.0) == 0.0);
  CHECK_FALSE(std::signbit(canonical(-1e-300 * 1e-300)));
  CHECK(canonical(123456789012345.0) == 123456789012000.0);
  CHECK(canonical(canonical(2.0 / 7)) == canonical(2.0 / 7));
}

TEST_CASE("perfect scenario") {
  ScenarioConfig c;
  c.trials = 1000;
  c.seed = 7;
  const Report r = run_scenario(c);
  CHECK(r.trials.size() == 1000);
  CHECK(r.aggregate("mean_fidelity") == 1.0);
  CHECK(r.aggregate("success_rate") == 1.0);
  CHECK(r.aggregate("classical_bits") == 3.0);
  std::map<std::string, int> alice;
  for (const auto& t : r.trials) ++alice[t.label];
  CHECK(alice.size() == 4);
  for (const auto& [label, count] : alice) {
    CHECK(std::abs(count / 1000.0 - 0.25) < oracle::five_sigma(0.25, 1000));
  }

  c.receiver = Party::Bob;
  c.channel = ChannelKind::Cluster4;
  c.lambda.reset();
  const Report b = run_scenario(c);
  CHECK(b.aggregate("mean_fidelity") == 1.0);
  CHECK(b.aggregate("classical_bits") == 3.0);
  for (const auto& t : b.trials) {
    CHECK(std::abs(t.lambda.real()) <= 2);
    CHECK(std::abs(t.lambda.imag()) <= 2);
  }
}

TEST_CASE("probabilistic scenario") {
  ScenarioConfig c = probabilistic(0.8, 0.6);
  c.trials = 100000;
  c.seed = 7;
  const Report r = run_scenario(c);
  CHECK(*r.aggregate("expected_success_rate") == doctest::Approx(0.72).epsilon(1e-12));
  CHECK(std::abs(*r.aggregate("success_rate") - 0.72) < oracle::five_sigma(0.72, 100000));
  CHECK(r.aggregate("mean_fidelity_given_success") == 1.0);
  CHECK(r.aggregate("failures_left_in_one") == 1.0);
}

TEST_CASE("sharing scenario under intercept-resend") {
  ScenarioConfig c = sharing(1);
  c.adversary = AdversaryKind::InterceptResend;
  c.trials = 10000;
  const Report r = run_scenario(c);
  // Each of the 3 decoys is matched with probability 1/2 and then wrong with
  // probability 1/4, so the run survives with probability (7/8)^3.
  const double marginal = 1 - std::pow(7.0 / 8, 3);
  const double abort_rate = *r.aggregate("abort_rate");
  CHECK(std::abs(abort_rate - marginal) < oracle::five_sigma(marginal, 10000));
  CHECK(std::abs(abort_rate - *r.aggregate("expected_abort_rate")) < 5 * *r.aggregate("abort_rate_sigma"));
  const double matched = *r.aggregate("decoys_matched");
  CHECK(matched >= 10000);
  CHECK(std::abs(*r.aggregate("decoy_error_rate") - 0.25) < oracle::five_sigma(0.25, matched));
  for (const auto& t : r.trials) CHECK(t.aborted == (t.decoy_errors > 0));
}

TEST_CASE("honest sharing scenario") {
  for (Party receiver : {Party::Diana, Party::Bob}) {
    ScenarioConfig c = sharing(2);
    c.receiver = receiver;
    c.lambda.reset();
    c.trials = 200;
    const Report r = run_scenario(c);
    CHECK(r.aggregate("abort_rate") == 0.0);
    CHECK(r.aggregate("decoy_errors") == 0.0);
    CHECK(r.aggregate("mean_fidelity_completed") == 1.0);
    for (const auto& t : r.trials) CHECK(t.success);
  }
}

TEST_CASE("dishonest Bob scenario and attack study") {
  ScenarioConfig c = sharing(1);
  c.adversary = AdversaryKind::DishonestBob;
  c.receiver = Party::Bob;
  c.trials = 500;
  const Report r = run_scenario(c);
  CHECK(*r.aggregate("attacker_mean_fidelity") < 1);
  CHECK(*r.aggregate("abort_rate") > 0);

  ScenarioConfig a;
  a.protocol = Protocol::AttackStudy;
  a.trials = 500;
  a.lambda = cd(0.3, 1.1);
  const Report s = run_scenario(a);
  CHECK(s.trials.size() == 1500);
  CHECK(s.aggregate("bare_mean_fidelity") == 1.0);
  CHECK(s.aggregate("bare_recovered_fraction") == 1.0);
  CHECK(*s.aggregate("blind_mean_fidelity") < 1);
  CHECK(*s.aggregate("blind_detection_rate") > 0);
  CHECK(s.aggregate("aligned_recovered_fraction") == 1.0);
}

TEST_CASE("table verification") {
  const std::vector<TableRowResult> rows = verify_tables();
  std::map<std::string, int> per_table;
  int printed = 0;
  for (const auto& row : rows) {
    ++per_table[row.table];
    if (row.note == "printed") {
      ++printed;
      CHECK_FALSE(row.pass);
      CHECK(row.table == "omega-prime/bob");
      CHECK(row.row == "phi-/psi-");
      CHECK(row.op == "U1;XZ");
    } else {
      CHECK(row.pass);
      CHECK(row.min_fidelity == 1.0);
    }
  }
  CHECK(printed == 1);
  CHECK(per_table["omega/diana"] == 8);
  CHECK(per_table["omega/bob"] == 16);
  CHECK(per_table["cluster4/bob"] == 8);
  CHECK(per_table["cluster4/diana"] == 16);
  CHECK(per_table["omega-prime/diana"] == 8);
  CHECK(per_table["omega-prime/bob"] == 17);

  ScenarioConfig c;
  c.protocol = Protocol::VerifyTables;
  const Report r = run_scenario(c);
  CHECK(r.ok);
  CHECK(r.aggregate("rows_passed") == 72.0);
}

TEST_CASE("encryption scenario") {
  ScenarioConfig c;
  c.protocol = Protocol::VerifyEncryption;
  c.lambda.reset();
  c.trials = 100;
  const Report r = run_scenario(c);
  CHECK(r.ok);
  CHECK(*r.aggregate("max_deviation_from_half_identity") < 1e-12);
  CHECK(*r.aggregate("max_role_swap_deviation") < 1e-12);
  for (const auto& t : r.trials) CHECK(t.label == "bob");
  c.channel = ChannelKind::Cluster4;
  const Report d = run_scenario(c);
  CHECK(d.ok);
  for (const auto& t : d.trials) CHECK(t.label == "diana");
}

TEST_CASE("reports are reproducible and trials replay in isolation") {
  ScenarioConfig c = sharing(2);
  c.adversary = AdversaryKind::InterceptResend;
  c.intercept_prob = 0.7;
  c.lambda.reset();
  c.trials = 50;
  c.seed = 1234;
  for (ReportFormat f : {ReportFormat::Json, ReportFormat::Csv, ReportFormat::Human}) {
    CHECK(emit_report(run_scenario(c), f) == emit_report(run_scenario(c), f));
  }
  ScenarioConfig shorter = c;
  shorter.trials = 10;
  const Report full = run_scenario(c), part = run_scenario(shorter);
  for (std::size_t k = 0; k < part.trials.size(); ++k) CHECK(part.trials[k] == full.trials[k]);
  ScenarioConfig other = c;
  other.seed = 1235;
  CHECK(emit_report(run_scenario(other), ReportFormat::Json) != emit_report(full, ReportFormat::Json));
}

TEST_CASE("report emission") {
  ScenarioConfig c = probabilistic(0.8, 0.6);
  c.trials = 20;
  c.seed = 42;
  c.lambda.reset();
  const Report r = run_scenario(c);

  SUBCASE("json round-trips") {
    const std::string text = emit_report(r, ReportFormat::Json);
    const Report back = parse_report_json(text);
    CHECK(back == r);
    CHECK(emit_report(back, ReportFormat::Json) == text);
    ScenarioConfig t;
    t.protocol = Protocol::VerifyTables;
    const Report tables = run_scenario(t);
    CHECK(parse_report_json(emit_report(tables, ReportFormat::Json)) == tables);
    CHECK_THROWS_AS(parse_report_json("{}"), Error);
    CHECK_THROWS_AS(parse_report_json("not json"), Error);
  }
  SUBCASE("csv has the fixed header") {
    const std::string text = emit_report(r, ReportFormat::Csv);
    CHECK(text.substr(0, text.find('\n')) == kCsvHeader);
    CHECK(std::string(kCsvHeader) ==
          "record,index,label,detail,value,success,fidelity,lambda_re,lambda_im,aborted,decoys_matched,decoy_errors");
    std::istringstream lines(text);
    std::string line;
    int trials = 0;
    while (std::getline(lines, line)) {
      if (line.rfind("trial,", 0) == 0) ++trials;
    }
    CHECK(trials == 20);
  }
  SUBCASE("human output names seed and hash") {
    const std::string text = emit_report(r, ReportFormat::Human);
    CHECK(text.find("seed         42") != std::string::npos);
    CHECK(text.find(r.provenance.config_hash) != std::string::npos);
  }
  SUBCASE("write failures surface as IoFailure") {
    std::ostringstream bad;
    bad.setstate(std::ios::badbit);
    try {
      emit_report(r, ReportFormat::Json, bad);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IoFailure);
    }
  }
  CHECK(r.provenance.seed == 42);
  CHECK(r.provenance.schema == kReportSchema);
  CHECK(r.provenance.config_hash == config_hash(r.config));
}
