#include "hqc/harness.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <type_traits>

#include "json.hpp"

namespace hqc {

using json = nlohmann::ordered_json;
using cd = std::complex<double>;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, field + ": " + what);
}

template <typename E>
struct Names {
  E value;
  std::string_view name;
};

constexpr Names<Protocol> kProtocols[] = {
    {Protocol::HqisPerfect, "hqis-perfect"},
    {Protocol::HqisProbabilistic, "hqis-probabilistic"},
    {Protocol::Hqss, "hqss"},
    {Protocol::AttackStudy, "attack-study"},
    {Protocol::VerifyTables, "verify-tables"},
    {Protocol::VerifyEncryption, "verify-encryption"},
};

constexpr Names<AdversaryKind> kAdversaries[] = {
    {AdversaryKind::None, "none"},
    {AdversaryKind::InterceptResend, "intercept-resend"},
    {AdversaryKind::DishonestBob, "dishonest-bob"},
};

constexpr Names<ReportFormat> kFormats[] = {
    {ReportFormat::Json, "json"},
    {ReportFormat::Csv, "csv"},
    {ReportFormat::Human, "human"},
};

template <typename E, std::size_t N>
std::string_view name_of(const Names<E> (&table)[N], E v) {
  for (const auto& e : table) {
    if (e.value == v) return e.name;
  }
  return "unknown";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const Names<E> (&table)[N], std::string_view s) {
  for (const auto& e : table) {
    if (e.name == s) return e.value;
  }
  return std::nullopt;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(Protocol p) { return name_of(kProtocols, p); }
std::string_view to_string(AdversaryKind a) { return name_of(kAdversaries, a); }
std::string_view to_string(ReportFormat f) { return name_of(kFormats, f); }
std::optional<Protocol> parse_protocol(std::string_view s) { return value_of(kProtocols, s); }
std::optional<AdversaryKind> parse_adversary(std::string_view s) { return value_of(kAdversaries, s); }
std::optional<ReportFormat> parse_format(std::string_view s) { return value_of(kFormats, s); }

double canonical(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double y = std::strtod(buf, nullptr);
  return y == 0.0 ? 0.0 : y;  // no negative zero
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool uses_channel(Protocol p) { return p != Protocol::VerifyTables && p != Protocol::AttackStudy; }

void require_unset(bool set, const char* field, Protocol p) {
  if (set) invalid(field, "not used by protocol " + std::string(to_string(p)));
}

void check_unit_interval(const std::optional<double>& v, const char* field) {
  if (v && !(std::isfinite(*v) && *v >= 0.0 && *v <= 1.0)) invalid(field, "must lie in [0, 1]");
}

}  // namespace

ScenarioConfig validate(ScenarioConfig c) {
  const Protocol p = c.protocol;
  if (c.trials < 1) invalid("trials", "must be positive");
  if (c.lambda && !(std::isfinite(c.lambda->real()) && std::isfinite(c.lambda->imag()))) {
    invalid("lambda", "must be finite");
  }
  if (c.receiver == Party::Alice) invalid("receiver", "must be bob, charlie or diana");

  // channel
  if (!uses_channel(p)) {
    require_unset(c.channel.has_value(), "channel", p);
  } else if (p == Protocol::HqisProbabilistic) {
    if (!c.channel) c.channel = ChannelKind::OmegaPrime;
    if (*c.channel != ChannelKind::OmegaPrime) invalid("channel", "hqis-probabilistic needs omega-prime");
  } else {
    if (!c.channel) c.channel = ChannelKind::Omega;
    if (*c.channel != ChannelKind::Omega && *c.channel != ChannelKind::Cluster4) {
      invalid("channel", std::string(to_string(p)) + " needs omega or cluster4");
    }
  }

  // a, b
  if (p == Protocol::HqisProbabilistic) {
    if (!c.a || !c.b) invalid(c.a ? "b" : "a", "required by hqis-probabilistic");
    const double a = *c.a, b = *c.b;
    if (!std::isfinite(a) || !std::isfinite(b)) invalid("a", "a and b must be finite");
    if (std::abs(a * a + b * b - 1.0) > 1e-9) invalid("a", "a^2 + b^2 must equal 1 within 1e-9");
    if (!(b > 0.0)) invalid("b", "must be positive");
    if (b > a) invalid("b", "must not exceed a");
    const double norm = std::hypot(a, b);
    c.a = a / norm;
    c.b = b / norm;
    validate_omega_prime(*c.a, *c.b);
  } else {
    require_unset(c.a.has_value(), "a", p);
    require_unset(c.b.has_value(), "b", p);
  }

  // n
  if (p == Protocol::Hqss || p == Protocol::AttackStudy) {
    if (!c.n) c.n = 1;
    if (*c.n < 1 || *c.n > 3) invalid("n", "must be 1, 2 or 3");
  } else {
    require_unset(c.n.has_value(), "n", p);
  }

  // adversary, intercept probability, threshold
  if (p != Protocol::Hqss) {
    if (c.adversary != AdversaryKind::None) invalid("adversary", "only hqss takes an adversary");
    require_unset(c.threshold.has_value(), "threshold", p);
  } else {
    if (!c.threshold) c.threshold = 0.0;
    check_unit_interval(c.threshold, "threshold");
    if (c.adversary == AdversaryKind::DishonestBob && *c.channel != ChannelKind::Omega) {
      invalid("adversary", "dishonest-bob is modelled on the omega channel");
    }
  }
  if (c.adversary == AdversaryKind::InterceptResend) {
    if (!c.intercept_prob) c.intercept_prob = 1.0;
    check_unit_interval(c.intercept_prob, "intercept_prob");
  } else if (c.intercept_prob) {
    invalid("intercept_prob", "only used with adversary intercept-resend");
  }

  // helper
  if (c.helper) {
    if (p != Protocol::HqisPerfect && p != Protocol::HqisProbabilistic && p != Protocol::Hqss) {
      invalid("helper", "not used by protocol " + std::string(to_string(p)));
    }
    try {
      (void)helper_parties(*c.channel, c.receiver, c.helper);
    } catch (const Error& e) {
      invalid("helper", e.what());
    }
    if (!is_low_cost(*c.channel, c.receiver)) {
      invalid("helper", "only the low-cost receiver picks a helper");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Config I/O

namespace {

json config_json(const ScenarioConfig& c) {
  json j;
  j["protocol"] = to_string(c.protocol);
  if (c.channel) j["channel"] = to_string(*c.channel);
  j["receiver"] = lower(to_string(c.receiver));
  if (c.lambda) {
    j["lambda"] = {{"re", c.lambda->real()}, {"im", c.lambda->imag()}};
  } else {
    j["lambda"] = "random";
  }
  if (c.a) j["a"] = *c.a;
  if (c.b) j["b"] = *c.b;
  if (c.n) j["n"] = *c.n;
  j["adversary"] = to_string(c.adversary);
  if (c.intercept_prob) j["intercept_prob"] = *c.intercept_prob;
  if (c.threshold) j["threshold"] = *c.threshold;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  if (c.helper) j["helper"] = lower(to_string(*c.helper));
  return j;
}

double number(const json& v, const char* field) {
  if (!v.is_number()) invalid(field, "expected a number");
  return v.get<double>();
}

std::uint64_t unsigned_number(const json& v, const char* field) {
  if (!v.is_number_unsigned()) invalid(field, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string text(const json& v, const char* field) {
  if (!v.is_string()) invalid(field, "expected a string");
  return v.get<std::string>();
}

Party party(const json& v, const char* field) {
  auto p = parse_party(text(v, field));
  if (!p) invalid(field, "unknown party '" + v.get<std::string>() + "'");
  return *p;
}

ScenarioConfig config_from_object(const json& j) {
  if (!j.is_object()) invalid("config", "expected a JSON object");
  ScenarioConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "protocol") {
      auto p = parse_protocol(text(v, "protocol"));
      if (!p) invalid("protocol", "unknown protocol '" + v.get<std::string>() + "'");
      c.protocol = *p;
    } else if (key == "channel") {
      auto k = parse_channel_kind(text(v, "channel"));
      if (!k) invalid("channel", "unknown channel '" + v.get<std::string>() + "'");
      c.channel = *k;
    } else if (key == "receiver") {
      c.receiver = party(v, "receiver");
    } else if (key == "lambda") {
      if (v.is_string()) {
        if (v.get<std::string>() != "random") invalid("lambda", "expected \"random\" or {re, im}");
        c.lambda.reset();
      } else if (v.is_number()) {
        c.lambda = cd(v.get<double>(), 0.0);
      } else if (v.is_object()) {
        c.lambda = cd(v.contains("re") ? number(v["re"], "lambda.re") : 0.0,
                      v.contains("im") ? number(v["im"], "lambda.im") : 0.0);
      } else {
        invalid("lambda", "expected \"random\", a number or {re, im}");
      }
    } else if (key == "a") {
      c.a = number(v, "a");
    } else if (key == "b") {
      c.b = number(v, "b");
    } else if (key == "n") {
      if (!v.is_number_integer()) invalid("n", "expected an integer");
      c.n = v.get<int>();
    } else if (key == "adversary") {
      auto a = parse_adversary(text(v, "adversary"));
      if (!a) invalid("adversary", "unknown adversary '" + v.get<std::string>() + "'");
      c.adversary = *a;
    } else if (key == "intercept_prob") {
      c.intercept_prob = number(v, "intercept_prob");
    } else if (key == "threshold") {
      c.threshold = number(v, "threshold");
    } else if (key == "trials") {
      c.trials = unsigned_number(v, "trials");
    } else if (key == "seed") {
      c.seed = unsigned_number(v, "seed");
    } else if (key == "helper") {
      c.helper = party(v, "helper");
    } else {
      invalid(key, "unknown field");
    }
  }
  return c;
}

}  // namespace

std::string config_to_json(const ScenarioConfig& config) { return config_json(config).dump(2); }

ScenarioConfig config_from_json(const std::string& source) {
  json j;
  try {
    j = json::parse(source);
  } catch (const json::parse_error& e) {
    invalid("config", e.what());
  }
  return config_from_object(j);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_hash(const ScenarioConfig& config) {
  ScenarioConfig c = config;
  c.seed = 0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<double> Report::aggregate(std::string_view name) const {
  for (const auto& a : aggregates) {
    if (a.name == name) return a.value;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Table verification

namespace {

constexpr double kTol = 1e-12;

std::string outcome_name(const ScriptedOutcome& o) {
  if (const Bit* b = std::get_if<Bit>(&o)) return std::to_string(to_int(*b));
  return std::string(to_string(std::get<BellOutcome>(o)));
}

struct RowCheck {
  double min_fidelity = 1.0;
  double max_deviation = 0.0;
  bool failure_is_one = true;

  void add(double fid, const Ket& pre, const Ket& expected) {
    min_fidelity = std::min(min_fidelity, fid);
    max_deviation = std::max(max_deviation, 1.0 - fidelity_up_to_phase(pre, expected));
  }
  bool pass() const { return min_fidelity >= 1 - kTol && max_deviation <= kTol && failure_is_one; }
};

TableRowResult row_result(std::string table, std::string row, std::string op, std::string note,
                          const RowCheck& c) {
  return {std::move(table), std::move(row), std::move(op), std::move(note), c.pass(),
          canonical(c.min_fidelity), canonical(std::max(0.0, c.max_deviation))};
}

std::vector<SecretParam> table_lambdas(std::uint64_t seed) {
  RandomSource rng = RandomSource::stream(seed, 0x7AB1E);
  std::vector<SecretParam> out;
  for (int i = 0; i < 25; ++i) {
    const double re = rng.uniform(-2, 2), im = rng.uniform(-2, 2);
    out.push_back({cd(re, im)});
  }
  return out;
}

template <typename Row>
void perfect_table(std::vector<TableRowResult>& out, const std::string& name, const ChannelSpec& channel,
                   Party receiver, std::span<const Row> table, const std::vector<SecretParam>& lambdas) {
  for (const Row& row : table) {
    ScriptedOutcome helper;
    if constexpr (std::is_same_v<Row, DianaTableRow>) {
      helper = row.helper;
    } else {
      helper = row.joint;
    }
    RowCheck check;
    for (const SecretParam& l : lambdas) {
      auto t = hqis_branch(channel, receiver, l, {row.alice, helper});
      if (!t || t->correction != row.correction) {
        check.min_fidelity = 0;
        continue;
      }
      check.add(t->fidelity, *t->pre_correction_state, row.state.evaluate(l));
    }
    out.push_back(row_result(name, std::string(to_string(row.alice)) + "/" + outcome_name(helper),
                             std::string(to_string(row.correction)), "", check));
  }
}

void prob_table(std::vector<TableRowResult>& out, const std::string& name, Party receiver, bool low_cost,
                std::span<const ProbTableRow> table, const std::vector<SecretParam>& lambdas) {
  constexpr double a = 0.8, b = 0.6;
  for (const ProbTableRow& row : table) {
    const TwoQubitOp rule = operator_rule(low_cost, row.helper);
    std::vector<TwoQubitOp> ops{rule};
    if (row.printed_op && *row.printed_op != rule) ops.push_back(*row.printed_op);
    for (TwoQubitOp op : ops) {
      PhqisOptions options;
      options.force_op = op;
      RowCheck check;
      for (const SecretParam& l : lambdas) {
        auto ok = phqis_branch(receiver, a, b, l, {row.alice, row.helper, Bit::Zero}, options);
        if (!ok) {
          check.min_fidelity = 0;
          continue;
        }
        // The table correction is applied whatever operator produced the state.
        Ket fixed = apply_unitary(*ok->base.pre_correction_state, correction_matrix(row.correction), {0});
        check.add(fidelity_up_to_phase(fixed, secret_state(l)), *ok->base.pre_correction_state, row.state.evaluate(l));
        if (auto fail = phqis_branch(receiver, a, b, l, {row.alice, row.helper, Bit::One}, options)) {
          const Ket& f = *fail->base.final_state;
          if (std::abs(std::abs(f.amplitudes()(1)) - 1.0) > kTol || std::abs(f.amplitudes()(0)) > kTol) {
            check.failure_is_one = false;
          }
        }
      }
      std::string note;
      if (ops.size() > 1) note = op == rule ? "rule" : "printed";
      out.push_back(row_result(name, std::string(to_string(row.alice)) + "/" + outcome_name(row.helper),
                               std::string(to_string(op)) + ";" + std::string(to_string(row.correction)),
                               note, check));
    }
  }
}

}  // namespace

std::vector<TableRowResult> verify_tables(std::uint64_t seed) {
  const std::vector<SecretParam> lambdas = table_lambdas(seed);
  std::vector<TableRowResult> out;
  perfect_table(out, "omega/diana", ChannelSpec::omega(), Party::Diana, diana_table(), lambdas);
  perfect_table(out, "omega/bob", ChannelSpec::omega(), Party::Bob, bob_table(), lambdas);
  perfect_table(out, "cluster4/bob", ChannelSpec::cluster4(), Party::Bob, diana_table(), lambdas);
  perfect_table(out, "cluster4/diana", ChannelSpec::cluster4(), Party::Diana, bob_table(), lambdas);
  prob_table(out, "omega-prime/diana", Party::Diana, true, diana_prob_table(), lambdas);
  prob_table(out, "omega-prime/bob", Party::Bob, false, bob_prob_table(), lambdas);
  return out;
}

// ---------------------------------------------------------------------------
// Scenarios

namespace {

struct Acc {
  double sum = 0, min = 1;
  std::size_t count = 0;
  void add(double x) {
    sum += x;
    min = std::min(min, x);
    ++count;
  }
  double mean() const { return count ? sum / double(count) : 0.0; }
};

SecretParam draw_lambda(const ScenarioConfig& c, RandomSource& rng) {
  if (c.lambda) return {*c.lambda};
  const double re = rng.uniform(-2, 2);
  const double im = rng.uniform(-2, 2);
  return {cd(re, im)};
}

ChannelSpec channel_of(const ScenarioConfig& c) {
  return *c.channel == ChannelKind::Cluster4 ? ChannelSpec::cluster4() : ChannelSpec::omega();
}

std::string helper_detail(const ProtocolTranscript& t) {
  std::string s;
  for (const auto& h : t.helper_outcomes) {
    if (!s.empty()) s += ";";
    s += outcome_name(h.outcome);
  }
  return s;
}

void add(Report& r, std::string name, double value) { r.aggregates.push_back({std::move(name), value}); }

void run_perfect(const ScenarioConfig& c, Report& r) {
  const ChannelSpec channel = channel_of(c);
  HqisOptions options;
  options.helper = c.helper;
  Acc fid;
  std::size_t ok = 0;
  int bits = 0;
  for (std::uint64_t k = 0; k < c.trials; ++k) {
    RandomSource rng = RandomSource::stream(c.seed, k);
    const SecretParam l = draw_lambda(c, rng);
    const ProtocolTranscript t = run_hqis(channel, c.receiver, l, rng, options);
    const bool success = t.fidelity >= 1 - 1e-9;
    fid.add(t.fidelity);
    ok += success;
    bits = t.classical_bits_consumed_by_receiver;
    TrialSummary s;
    s.index = k;
    s.label = to_string(t.alice_outcome);
    s.detail = helper_detail(t) + "->" + std::string(to_string(t.correction));
    s.value = t.classical_bits_consumed_by_receiver;
    s.success = success;
    s.fidelity = t.fidelity;
    s.lambda = l.lambda;
    r.trials.push_back(s);
  }
  add(r, "mean_fidelity", fid.mean());
  add(r, "min_fidelity", fid.min);
  add(r, "success_rate", double(ok) / double(c.trials));
  add(r, "classical_bits", bits);
}

void run_probabilistic(const ScenarioConfig& c, Report& r) {
  PhqisOptions options;
  options.helper = c.helper;
  Acc fid;
  std::size_t ok = 0, failures = 0, failures_one = 0;
  for (std::uint64_t k = 0; k < c.trials; ++k) {
    RandomSource rng = RandomSource::stream(c.seed, k);
    const SecretParam l = draw_lambda(c, rng);
    const ProbTranscript t = run_phqis(c.receiver, *c.a, *c.b, l, rng, options);
    if (t.succeeded) {
      ++ok;
      fid.add(t.base.fidelity);
    } else {
      ++failures;
      const auto& amp = t.base.final_state->amplitudes();
      failures_one += std::abs(amp(0)) <= kTol && std::abs(std::abs(amp(1)) - 1) <= kTol;
    }
    TrialSummary s;
    s.index = k;
    s.label = to_string(t.base.alice_outcome);
    s.detail = helper_detail(t.base) + "->" + std::string(to_string(t.two_qubit_op)) + ";" +
               std::string(to_string(t.base.correction));
    s.value = to_int(t.ancilla_outcome);
    s.success = t.succeeded;
    s.fidelity = t.base.fidelity;
    s.lambda = l.lambda;
    r.trials.push_back(s);
  }
  const double p = success_probability_exact(c.receiver, *c.a, *c.b, {cd(1, 0)});
  const double n = double(c.trials);
  add(r, "success_rate", double(ok) / n);
  add(r, "expected_success_rate", p);
  add(r, "success_rate_sigma", std::sqrt(p * (1 - p) / n));
  add(r, "mean_fidelity_given_success", fid.mean());
  add(r, "min_fidelity_given_success", fid.count ? fid.min : 0.0);
  add(r, "failures_left_in_one", failures ? double(failures_one) / double(failures) : 1.0);
}

AdversaryModel adversary_of(const ScenarioConfig& c) {
  switch (c.adversary) {
    case AdversaryKind::None: return NoAdversary{};
    case AdversaryKind::InterceptResend: {
      InterceptResend ir;
      ir.probability = *c.intercept_prob;
      return ir;
    }
    case AdversaryKind::DishonestBob: return DishonestBobCapture{};
  }
  return NoAdversary{};
}

void run_sharing(const ScenarioConfig& c, Report& r) {
  HqssOptions options;
  options.channel = channel_of(c);
  options.helper = c.helper;
  const AdversaryModel adversary = adversary_of(c);
  // Error probability of one matched-basis decoy under the configured attack.
  const double q = c.adversary == AdversaryKind::InterceptResend ? *c.intercept_prob / 4 : 0.0;
  std::size_t aborts = 0, matched = 0, errors = 0;
  double expected = 0, variance = 0;
  Acc fid, attacker;
  std::size_t recovered = 0;
  for (std::uint64_t k = 0; k < c.trials; ++k) {
    RandomSource rng = RandomSource::stream(c.seed, k);
    const SecretParam l = draw_lambda(c, rng);
    const HqssTranscript t = run_hqss(*c.n, l, c.receiver, adversary, *c.threshold, rng, options);
    aborts += t.aborted;
    matched += t.check.bases_matched;
    errors += t.check.errors;
    const double pk = 1 - std::pow(1 - q, double(t.check.bases_matched));
    expected += pk;
    variance += pk * (1 - pk);
    double worst = t.aborted ? 0.0 : 1.0;
    for (const auto& copy : t.copies) {
      worst = std::min(worst, copy.fidelity);
      fid.add(copy.fidelity);
    }
    TrialSummary s;
    s.index = k;
    s.label = t.aborted ? "aborted" : "completed";
    s.detail = to_string(c.adversary);
    s.value = t.check.error_rate;
    s.success = !t.aborted && worst >= 1 - 1e-9;
    s.fidelity = worst;
    if (!t.attacker_copies.empty()) {
      double a = 1.0;
      for (const auto& copy : t.attacker_copies) {
        attacker.add(copy.fidelity);
        a = std::min(a, copy.fidelity);
      }
      recovered += a >= 1 - 1e-9;
      s.detail += ";attacker=" + fmt(canonical(a));
    }
    s.lambda = l.lambda;
    s.aborted = t.aborted;
    s.decoys_matched = t.check.bases_matched;
    s.decoy_errors = t.check.errors;
    r.trials.push_back(s);
  }
  const double n = double(c.trials);
  add(r, "abort_rate", double(aborts) / n);
  if (c.adversary != AdversaryKind::DishonestBob && *c.threshold == 0.0) {
    add(r, "expected_abort_rate", expected / n);
    add(r, "abort_rate_sigma", std::sqrt(variance) / n);
  }
  add(r, "decoys_matched", double(matched));
  add(r, "decoy_errors", double(errors));
  add(r, "decoy_error_rate", matched ? double(errors) / double(matched) : 0.0);
  if (c.adversary == AdversaryKind::InterceptResend) add(r, "expected_decoy_error_rate", q);
  add(r, "mean_fidelity_completed", fid.mean());
  if (c.adversary == AdversaryKind::DishonestBob) {
    add(r, "attacker_mean_fidelity", attacker.mean());
    add(r, "attacker_recovered_fraction", double(recovered) / n);
  }
}

void run_attack(const ScenarioConfig& c, Report& r) {
  struct Side {
    const char* name;
    Acc fid, undetected;
    std::size_t detected = 0, recovered = 0;
  };
  Side sides[3] = {{"bare", {}, {}}, {"blind", {}, {}}, {"aligned", {}, {}}};
  for (std::uint64_t k = 0; k < c.trials; ++k) {
    RandomSource rng = RandomSource::stream(c.seed, k);
    const SecretParam l = draw_lambda(c, rng);
    const AttackStudy study = attack_effectiveness_study(*c.n, l, 1, rng);
    const AttackSummary* parts[3] = {&study.bare, &study.blind, &study.aligned};
    for (int i = 0; i < 3; ++i) {
      const AttackSummary& a = *parts[i];
      Side& side = sides[i];
      const bool detected = a.detection_rate > 0;
      for (double f : a.fidelities) {
        side.fid.add(f);
        if (!detected) side.undetected.add(f);
      }
      side.detected += detected;
      side.recovered += a.recovered_fraction >= 1.0;
      TrialSummary s;
      s.index = k;
      s.label = side.name;
      s.detail = "n=" + std::to_string(*c.n);
      s.value = a.mean_decoy_errors;
      s.success = a.recovered_fraction >= 1.0;
      s.fidelity = a.mean_fidelity;
      s.lambda = l.lambda;
      s.aborted = detected;
      s.decoy_errors = static_cast<std::uint64_t>(std::llround(a.mean_decoy_errors));
      r.trials.push_back(s);
    }
  }
  const double n = double(c.trials);
  for (const Side& side : sides) {
    const std::string p = side.name;
    add(r, p + "_mean_fidelity", side.fid.mean());
    add(r, p + "_min_fidelity", side.fid.count ? side.fid.min : 0.0);
    add(r, p + "_recovered_fraction", double(side.recovered) / n);
    add(r, p + "_detection_rate", double(side.detected) / n);
    add(r, p + "_mean_fidelity_undetected", side.undetected.mean());
  }
}

void run_tables(const ScenarioConfig& c, Report& r) {
  r.rows = verify_tables(c.seed);
  std::size_t passed = 0, required = 0;
  for (const auto& row : r.rows) {
    if (row.note == "printed") continue;  // a candidate, not a requirement
    ++required;
    passed += row.pass;
  }
  add(r, "rows_required", double(required));
  add(r, "rows_passed", double(passed));
  r.ok = passed == required;
}

void run_encryption(const ScenarioConfig& c, Report& r) {
  const ChannelSpec channel = channel_of(c);
  double worst_dev = 0, worst_swap = 0, worst_fid = 1;
  for (std::uint64_t k = 0; k < c.trials; ++k) {
    RandomSource rng = RandomSource::stream(c.seed, k);
    const SecretParam l = draw_lambda(c, rng);
    const EncryptionReport e = verify_encryption(channel, l);
    const double swap = role_swap_deviation(l);
    double dev = 0, fid = 1;
    for (const auto& b : e.branches) dev = std::max(dev, b.deviation);
    for (const auto& cond : e.conditionals) fid = std::min(fid, cond.fidelity);
    worst_dev = std::max(worst_dev, dev);
    worst_swap = std::max(worst_swap, swap);
    worst_fid = std::min(worst_fid, fid);
    TrialSummary s;
    s.index = k;
    s.label = lower(to_string(e.receiver));
    s.detail = "role_swap=" + fmt(canonical(swap));
    s.value = dev;
    s.success = e.ok && swap <= kTol;
    s.fidelity = fid;
    s.lambda = l.lambda;
    r.ok = r.ok && s.success;
    r.trials.push_back(s);
  }
  add(r, "max_deviation_from_half_identity", worst_dev);
  add(r, "max_role_swap_deviation", worst_swap);
  add(r, "min_conditional_fidelity", worst_fid);
}

void canonicalize(Report& r) {
  for (auto& t : r.trials) {
    t.value = canonical(t.value);
    t.fidelity = canonical(t.fidelity);
    t.lambda = cd(canonical(t.lambda.real()), canonical(t.lambda.imag()));
  }
  for (auto& a : r.aggregates) a.value = canonical(a.value);
}

}  // namespace

Report run_scenario(const ScenarioConfig& config) {
  Report r;
  r.config = validate(config);
  r.provenance.seed = r.config.seed;
  r.provenance.config_hash = config_hash(r.config);
  switch (r.config.protocol) {
    case Protocol::HqisPerfect: run_perfect(r.config, r); break;
    case Protocol::HqisProbabilistic: run_probabilistic(r.config, r); break;
    case Protocol::Hqss: run_sharing(r.config, r); break;
    case Protocol::AttackStudy: run_attack(r.config, r); break;
    case Protocol::VerifyTables: run_tables(r.config, r); break;
    case Protocol::VerifyEncryption: run_encryption(r.config, r); break;
  }
  canonicalize(r);
  return r;
}

// ---------------------------------------------------------------------------
// Emission

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json report_json(const Report& r) {
  json j;
  j["schema"] = r.provenance.schema;
  j["provenance"] = {{"version", r.provenance.version},
                     {"seed", r.provenance.seed},
                     {"config_hash", r.provenance.config_hash}};
  j["config"] = config_json(r.config);
  j["ok"] = r.ok;
  json agg = json::object();
  for (const auto& a : r.aggregates) agg[a.name] = a.value;
  j["aggregates"] = agg;
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"table", row.table},
                    {"row", row.row},
                    {"op", row.op},
                    {"note", row.note},
                    {"pass", row.pass},
                    {"min_fidelity", row.min_fidelity},
                    {"max_state_deviation", row.max_state_deviation}});
  }
  j["rows"] = rows;
  json trials = json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"index", t.index},
                      {"label", t.label},
                      {"detail", t.detail},
                      {"value", t.value},
                      {"success", t.success},
                      {"fidelity", t.fidelity},
                      {"lambda_re", t.lambda.real()},
                      {"lambda_im", t.lambda.imag()},
                      {"aborted", t.aborted},
                      {"decoys_matched", t.decoys_matched},
                      {"decoy_errors", t.decoy_errors}});
  }
  j["trials"] = trials;
  return j;
}

std::string csv(const Report& r) {
  std::string out = std::string(kCsvHeader) + "\n";
  auto line = [&](const std::string& record, std::uint64_t index, const std::string& label,
                  const std::string& detail, double value, bool success, double fid, cd lambda,
                  bool aborted, std::uint64_t matched, std::uint64_t errors) {
    out += record + "," + std::to_string(index) + "," + csv_field(label) + "," + csv_field(detail) +
           "," + fmt(value) + "," + (success ? "1" : "0") + "," + fmt(fid) + "," + fmt(lambda.real()) +
           "," + fmt(lambda.imag()) + "," + (aborted ? "1" : "0") + "," + std::to_string(matched) +
           "," + std::to_string(errors) + "\n";
  };
  std::uint64_t i = 0;
  for (const auto& a : r.aggregates) line("aggregate", i++, a.name, "", a.value, r.ok, 0, {}, false, 0, 0);
  i = 0;
  for (const auto& row : r.rows) {
    line("row", i++, row.table + ":" + row.row, row.op + (row.note.empty() ? "" : " " + row.note),
         row.max_state_deviation, row.pass, row.min_fidelity, {}, false, 0, 0);
  }
  for (const auto& t : r.trials) {
    line("trial", t.index, t.label, t.detail, t.value, t.success, t.fidelity, t.lambda, t.aborted,
         t.decoys_matched, t.decoy_errors);
  }
  return out;
}

std::string human(const Report& r) {
  std::string out;
  out += "protocol     " + std::string(to_string(r.config.protocol)) + "\n";
  out += "seed         " + std::to_string(r.provenance.seed) + "\n";
  out += "config hash  " + r.provenance.config_hash + "\n";
  out += "version      " + r.provenance.version + " (schema " + std::to_string(r.provenance.schema) + ")\n";
  out += "trials       " + std::to_string(r.config.trials) + "\n";
  out += "status       " + std::string(r.ok ? "ok" : "FAILED") + "\n";
  if (!r.aggregates.empty()) out += "\n";
  for (const auto& a : r.aggregates) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "  %-34s %s\n", a.name.c_str(), fmt(a.value).c_str());
    out += buf;
  }
  if (!r.rows.empty()) out += "\n";
  for (const auto& row : r.rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "  %-4s %-18s %-12s %-8s %-8s min fidelity %s\n", row.pass ? "pass" : "FAIL",
                  row.table.c_str(), row.row.c_str(), row.op.c_str(), row.note.c_str(),
                  fmt(row.min_fidelity).c_str());
    out += buf;
  }
  return out;
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::IoFailure, std::string("report is missing ") + key);
  return j.at(key).get<T>();
}

}  // namespace

std::string emit_report(const Report& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return report_json(report).dump(2) + "\n";
    case ReportFormat::Csv: return csv(report);
    case ReportFormat::Human: return human(report);
  }
  return {};
}

void emit_report(const Report& report, ReportFormat format, std::ostream& out) {
  out << emit_report(report, format);
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "could not write report");
}

Report parse_report_json(const std::string& source) {
  json j;
  try {
    j = json::parse(source);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::IoFailure, e.what());
  }
  try {
    Report r;
    r.provenance.schema = field<int>(j, "schema");
    const json& p = j.at("provenance");
    r.provenance.version = field<std::string>(p, "version");
    r.provenance.seed = field<std::uint64_t>(p, "seed");
    r.provenance.config_hash = field<std::string>(p, "config_hash");
    r.config = config_from_object(j.at("config"));
    r.ok = field<bool>(j, "ok");
    for (const auto& [name, v] : j.at("aggregates").items()) r.aggregates.push_back({name, v.get<double>()});
    for (const auto& row : j.at("rows")) {
      r.rows.push_back({field<std::string>(row, "table"), field<std::string>(row, "row"),
                        field<std::string>(row, "op"), field<std::string>(row, "note"),
                        field<bool>(row, "pass"), field<double>(row, "min_fidelity"),
                        field<double>(row, "max_state_deviation")});
    }
    for (const auto& t : j.at("trials")) {
      TrialSummary s;
      s.index = field<std::uint64_t>(t, "index");
      s.label = field<std::string>(t, "label");
      s.detail = field<std::string>(t, "detail");
      s.value = field<double>(t, "value");
      s.success = field<bool>(t, "success");
      s.fidelity = field<double>(t, "fidelity");
      s.lambda = cd(field<double>(t, "lambda_re"), field<double>(t, "lambda_im"));
      s.aborted = field<bool>(t, "aborted");
      s.decoys_matched = field<std::uint64_t>(t, "decoys_matched");
      s.decoy_errors = field<std::uint64_t>(t, "decoy_errors");
      r.trials.push_back(std::move(s));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("malformed report: ") + e.what());
  }
}

}  // namespace hqc
