#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hqc/qcore.hpp"

namespace hqc {

/// Secret qubit parameter: the shared state is (|0> + lambda|1>)/sqrt(1+|lambda|^2).
struct SecretParam {
  std::complex<double> lambda{1.0, 0.0};

  friend bool operator==(const SecretParam&, const SecretParam&) = default;
};

enum class ChannelKind { Omega, Cluster4, OmegaPrime, Generic };

std::string_view to_string(ChannelKind kind);

/// Parses the canonical names `omega`, `cluster4`, `omega-prime`, `generic`.
std::optional<ChannelKind> parse_channel_kind(std::string_view name);

// Channel description. Agents hold qubits 1..n in the order B, C, D; qubit 0
// belongs to the sender.
struct ChannelSpec {
  ChannelKind kind = ChannelKind::Omega;
  double a = 0.0;  // omega-prime only
  double b = 0.0;
  std::optional<Ket> psi0;  // generic only
  std::optional<Ket> psi1;

  static ChannelSpec omega() { return {}; }
  static ChannelSpec cluster4() {
    ChannelSpec s;
    s.kind = ChannelKind::Cluster4;
    return s;
  }
  static ChannelSpec omega_prime(double a, double b);
  static ChannelSpec generic(const Ket& psi0, const Ket& psi1);

  // Maximally entangled kinds support the perfect protocols.
  bool is_maximal() const { return kind == ChannelKind::Omega || kind == ChannelKind::Cluster4; }

  Ket state() const;

  // Non-fatal observations, e.g. an omega-prime channel with a == b.
  std::vector<std::string> warnings() const;

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

Ket secret_state(const SecretParam& p);

// 1/2 (|0000> + |0110> + |1001> - |1111>), qubits A,B,C,D.
Ket omega();

// 1/2 (|0000> + |0011> + |1100> - |1111>), qubits A,B,C,D.
Ket cluster4();

// a|0>|psi0> + b|1>|psi1> with the omega decomposition states. Requires
// a^2 + b^2 = 1 and a >= b > 0.
Ket omega_prime(double a, double b);

// (|0>|psi0> + |1>|psi1>)/sqrt2 for orthonormal psi0, psi1.
Ket generic_channel(const Ket& psi0, const Ket& psi1);

/// Agent-side decomposition states of the omega channel (B,C,D order).
Ket omega_psi0();
Ket omega_psi1();

/// Agent-side decomposition states of the cluster channel (B,C,D order).
Ket cluster4_psi0();
Ket cluster4_psi1();

void validate_omega_prime(double a, double b);

// True when an omega-prime channel degenerates to the maximal one.
inline bool is_maximal_pair(double a, double b) { return std::abs(a - b) < 1e-9; }

}  // namespace hqc
