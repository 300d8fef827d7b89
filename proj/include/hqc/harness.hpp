#pragma once

// Scenario configuration, seeded batches, table verification and report
// emission.
//
// Reports are deterministic: every trial k draws from its own stream
// RandomSource::stream(seed, k), and every float stored in a report is
// rounded to 12 significant digits when the report is built, so emitted
// text does not depend on how a formatter prints the last bits.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hqc/hqss.hpp"
#include "hqc/phqis.hpp"

namespace hqc {

inline constexpr int kReportSchema = 1;
inline constexpr const char* kArtifactVersion = "hqcomm 1.0.0";

enum class Protocol { HqisPerfect, HqisProbabilistic, Hqss, AttackStudy, VerifyTables, VerifyEncryption };
enum class AdversaryKind { None, InterceptResend, DishonestBob };
enum class ReportFormat { Json, Csv, Human };

std::string_view to_string(Protocol p);
std::string_view to_string(AdversaryKind a);
std::string_view to_string(ReportFormat f);
std::optional<Protocol> parse_protocol(std::string_view s);
std::optional<AdversaryKind> parse_adversary(std::string_view s);
std::optional<ReportFormat> parse_format(std::string_view s);

// Unset optionals take protocol-dependent defaults in validate(); setting a
// field the protocol does not use is an error.
struct ScenarioConfig {
  Protocol protocol = Protocol::HqisPerfect;
  std::optional<ChannelKind> channel;
  Party receiver = Party::Diana;
  std::optional<std::complex<double>> lambda = std::complex<double>(1.0, 0.0);  // nullopt: random
  std::optional<double> a, b;
  std::optional<int> n;
  AdversaryKind adversary = AdversaryKind::None;
  std::optional<double> intercept_prob;
  std::optional<double> threshold;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::optional<Party> helper;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Checks consistency, fills defaults and renormalizes (a, b). Throws
// InvalidConfig naming the offending field.
ScenarioConfig validate(ScenarioConfig config);

std::string config_to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// FNV-1a 64 over the canonical JSON of the config with the seed zeroed,
// as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

struct TrialSummary {
  std::uint64_t index = 0;
  std::string label;
  std::string detail;
  double value = 0.0;
  bool success = false;
  double fidelity = 0.0;
  std::complex<double> lambda;
  bool aborted = false;
  std::uint64_t decoys_matched = 0;
  std::uint64_t decoy_errors = 0;

  friend bool operator==(const TrialSummary&, const TrialSummary&) = default;
};

struct Aggregate {
  std::string name;
  double value = 0.0;

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct TableRowResult {
  std::string table;
  std::string row;
  std::string op;     // correction, or two-qubit operator and correction
  std::string note;   // "rule", "printed" for the discrepancy row
  bool pass = false;
  double min_fidelity = 0.0;
  double max_state_deviation = 0.0;  // 1 - |<table state|engine state>|^2

  friend bool operator==(const TableRowResult&, const TableRowResult&) = default;
};

struct Provenance {
  int schema = kReportSchema;
  std::string version = kArtifactVersion;
  std::uint64_t seed = 0;
  std::string config_hash;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Report {
  ScenarioConfig config;
  Provenance provenance;
  std::vector<TrialSummary> trials;
  std::vector<Aggregate> aggregates;
  std::vector<TableRowResult> rows;
  bool ok = true;

  std::optional<double> aggregate(std::string_view name) const;

  friend bool operator==(const Report&, const Report&) = default;
};

// Rounds to 12 significant digits.
double canonical(double x);

Report run_scenario(const ScenarioConfig& config);

// Every row of the four recovery tables, by forced branches, for 25 λ drawn
// from `seed`. The joint probabilistic row (phi-, psi-) is reported once for
// each candidate operator.
std::vector<TableRowResult> verify_tables(std::uint64_t seed = 0);

inline constexpr const char* kCsvHeader =
    "record,index,label,detail,value,success,fidelity,lambda_re,lambda_im,aborted,decoys_matched,"
    "decoy_errors";

std::string emit_report(const Report& report, ReportFormat format);
void emit_report(const Report& report, ReportFormat format, std::ostream& out);
Report parse_report_json(const std::string& text);

}  // namespace hqc
