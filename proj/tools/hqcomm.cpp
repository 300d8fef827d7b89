// hqcomm: command-line front end to the scenario harness.
//
//   hqcomm simulate --protocol hqss --n 2 --adversary intercept-resend --trials 10000
//   hqcomm verify-tables
//   hqcomm verify-encryption --trials 100 --random-lambda
//   hqcomm attack-study --n 1 --trials 1000 --format csv --out attack.csv
//
// Exit status: 0 on success, 1 when a verification fails, 2 on an invalid
// configuration.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hqc/harness.hpp"

namespace {

using namespace hqc;

struct Flags {
  std::string config_path;
  std::string protocol, channel, receiver, adversary, helper;
  double lambda_re = 0, lambda_im = 0, a = 0, b = 0, intercept_prob = 0, threshold = 0;
  int n = 0;
  std::uint64_t trials = 0, seed = 0;
  bool random_lambda = false;
  std::string format = "human";
  std::string out;

  CLI::Option *o_protocol = nullptr, *o_channel = nullptr, *o_receiver = nullptr,
              *o_adversary = nullptr, *o_helper = nullptr, *o_re = nullptr, *o_im = nullptr,
              *o_a = nullptr, *o_b = nullptr, *o_ip = nullptr, *o_threshold = nullptr,
              *o_n = nullptr, *o_trials = nullptr, *o_seed = nullptr;
};

void add_flags(CLI::App* app, Flags& f, bool with_protocol) {
  app->add_option("--config", f.config_path, "JSON scenario file; flags override it");
  if (with_protocol) {
    f.o_protocol = app->add_option("--protocol", f.protocol,
                                   "hqis-perfect, hqis-probabilistic, hqss, attack-study, "
                                   "verify-tables or verify-encryption");
  }
  f.o_channel = app->add_option("--channel", f.channel, "omega, cluster4 or omega-prime");
  f.o_receiver = app->add_option("--receiver", f.receiver, "bob, charlie or diana");
  f.o_helper = app->add_option("--helper", f.helper, "helper on the low-cost path");
  f.o_re = app->add_option("--lambda-re", f.lambda_re, "real part of the secret parameter");
  f.o_im = app->add_option("--lambda-im", f.lambda_im, "imaginary part of the secret parameter");
  app->add_flag("--random-lambda", f.random_lambda, "draw Re and Im uniformly from [-2, 2] per trial");
  f.o_a = app->add_option("--a", f.a, "omega-prime coefficient a");
  f.o_b = app->add_option("--b", f.b, "omega-prime coefficient b");
  f.o_n = app->add_option("--n", f.n, "channel copies for secret sharing (1..3)");
  f.o_adversary = app->add_option("--adversary", f.adversary, "none, intercept-resend or dishonest-bob");
  f.o_ip = app->add_option("--intercept-prob", f.intercept_prob, "per-qubit interception probability");
  f.o_threshold = app->add_option("--threshold", f.threshold, "abort when the decoy error rate exceeds this");
  f.o_trials = app->add_option("--trials", f.trials, "number of trials");
  f.o_seed = app->add_option("--seed", f.seed, "root seed");
  app->add_option("--format", f.format, "json, csv or human");
  app->add_option("--out", f.out, "write the report here instead of stdout");
}

template <typename T, typename Parse>
T parsed(const std::string& s, const char* field, Parse parse) {
  auto v = parse(s);
  if (!v) throw Error(ErrorCode::InvalidConfig, std::string(field) + ": unknown value '" + s + "'");
  return *v;
}

ScenarioConfig build_config(const Flags& f, std::optional<Protocol> fixed) {
  ScenarioConfig c;
  if (!f.config_path.empty()) c = load_config(f.config_path);
  if (fixed) c.protocol = *fixed;
  if (f.o_protocol && f.o_protocol->count()) c.protocol = parsed<Protocol>(f.protocol, "protocol", parse_protocol);
  if (f.o_channel->count()) c.channel = parsed<ChannelKind>(f.channel, "channel", parse_channel_kind);
  if (f.o_receiver->count()) c.receiver = parsed<Party>(f.receiver, "receiver", parse_party);
  if (f.o_helper->count()) c.helper = parsed<Party>(f.helper, "helper", parse_party);
  if (f.o_adversary->count()) c.adversary = parsed<AdversaryKind>(f.adversary, "adversary", parse_adversary);
  if (f.random_lambda) {
    if (f.o_re->count() || f.o_im->count()) {
      throw Error(ErrorCode::InvalidConfig, "lambda: --random-lambda excludes --lambda-re/--lambda-im");
    }
    c.lambda.reset();
  } else if (f.o_re->count() || f.o_im->count()) {
    const std::complex<double> base = c.lambda.value_or(std::complex<double>(0, 0));
    c.lambda = std::complex<double>(f.o_re->count() ? f.lambda_re : base.real(),
                                    f.o_im->count() ? f.lambda_im : base.imag());
  }
  if (f.o_a->count()) c.a = f.a;
  if (f.o_b->count()) c.b = f.b;
  if (f.o_n->count()) c.n = f.n;
  if (f.o_ip->count()) c.intercept_prob = f.intercept_prob;
  if (f.o_threshold->count()) c.threshold = f.threshold;
  if (f.o_trials->count()) c.trials = f.trials;
  if (f.o_seed->count()) c.seed = f.seed;
  return c;
}

int run(const Flags& f, std::optional<Protocol> fixed) {
  try {
    const ReportFormat format = parsed<ReportFormat>(f.format, "format", parse_format);
    const Report report = run_scenario(build_config(f, fixed));
    if (f.out.empty()) {
      emit_report(report, format, std::cout);
    } else {
      std::ofstream file(f.out, std::ios::binary);
      if (!file) throw Error(ErrorCode::IoFailure, "cannot open " + f.out);
      emit_report(report, format, file);
    }
    return report.ok ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "hqcomm: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidConfig ? 2 : 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical quantum information splitting and secret sharing simulator"};
  app.require_subcommand(1);

  Flags sim, tables, enc, attack;
  auto* s = app.add_subcommand("simulate", "run a Monte Carlo scenario");
  add_flags(s, sim, true);
  auto* t = app.add_subcommand("verify-tables", "check every recovery table row by forced branches");
  add_flags(t, tables, false);
  auto* e = app.add_subcommand("verify-encryption", "check the weak agent's qubit is I/2 before any message");
  add_flags(e, enc, false);
  auto* a = app.add_subcommand("attack-study", "dishonest receiver against bare splitting and full sharing");
  add_flags(a, attack, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  if (s->parsed()) return run(sim, std::nullopt);
  if (t->parsed()) return run(tables, Protocol::VerifyTables);
  if (e->parsed()) return run(enc, Protocol::VerifyEncryption);
  return run(attack, Protocol::AttackStudy);
}
