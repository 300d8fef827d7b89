#include "hqc/channels.hpp"

#include <cmath>

namespace hqc {

namespace {

Ket sparse_ket(int num_qubits, std::initializer_list<std::pair<std::size_t, std::complex<double>>> terms) {
  Ket::Vector v = Ket::Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << num_qubits));
  for (const auto& [index, amp] : terms) v(static_cast<Eigen::Index>(index)) = amp;
  return Ket::from_amplitudes(std::move(v));
}

}  // namespace

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Omega: return "omega";
    case ChannelKind::Cluster4: return "cluster4";
    case ChannelKind::OmegaPrime: return "omega-prime";
    case ChannelKind::Generic: return "generic";
  }
  return "?";
}

std::optional<ChannelKind> parse_channel_kind(std::string_view name) {
  for (ChannelKind k : {ChannelKind::Omega, ChannelKind::Cluster4, ChannelKind::OmegaPrime,
                        ChannelKind::Generic}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

ChannelSpec ChannelSpec::omega_prime(double a, double b) {
  validate_omega_prime(a, b);
  ChannelSpec spec;
  spec.kind = ChannelKind::OmegaPrime;
  spec.a = a;
  spec.b = b;
  return spec;
}

ChannelSpec ChannelSpec::generic(const Ket& psi0, const Ket& psi1) {
  (void)generic_channel(psi0, psi1);  // validates
  ChannelSpec spec;
  spec.kind = ChannelKind::Generic;
  spec.psi0 = psi0;
  spec.psi1 = psi1;
  return spec;
}

Ket ChannelSpec::state() const {
  switch (kind) {
    case ChannelKind::Omega: return hqc::omega();
    case ChannelKind::Cluster4: return hqc::cluster4();
    case ChannelKind::OmegaPrime: return hqc::omega_prime(a, b);
    case ChannelKind::Generic:
      if (!psi0 || !psi1) throw Error(ErrorCode::SizeMismatch, "generic channel without states");
      return generic_channel(*psi0, *psi1);
  }
  return hqc::omega();
}

std::vector<std::string> ChannelSpec::warnings() const {
  std::vector<std::string> out;
  if (kind == ChannelKind::OmegaPrime && is_maximal_pair(a, b)) {
    out.emplace_back("MaximalChannel: a == b, the probabilistic scheme reduces to the perfect one");
  }
  return out;
}

Ket secret_state(const SecretParam& p) {
  if (!std::isfinite(p.lambda.real()) || !std::isfinite(p.lambda.imag())) {
    throw Error(ErrorCode::NonFiniteLambda, "lambda must be finite");
  }
  Ket::Vector v(2);
  v << 1.0, p.lambda;
  return Ket::from_amplitudes(std::move(v));
}

Ket omega() { return sparse_ket(4, {{0b0000, 0.5}, {0b0110, 0.5}, {0b1001, 0.5}, {0b1111, -0.5}}); }

Ket cluster4() { return sparse_ket(4, {{0b0000, 0.5}, {0b0011, 0.5}, {0b1100, 0.5}, {0b1111, -0.5}}); }

Ket omega_psi0() { return sparse_ket(3, {{0b000, 1.0}, {0b110, 1.0}}); }
Ket omega_psi1() { return sparse_ket(3, {{0b001, 1.0}, {0b111, -1.0}}); }
Ket cluster4_psi0() { return sparse_ket(3, {{0b000, 1.0}, {0b011, 1.0}}); }
Ket cluster4_psi1() { return sparse_ket(3, {{0b100, 1.0}, {0b111, -1.0}}); }

void validate_omega_prime(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || std::abs(a * a + b * b - 1.0) > kExactTol) {
    throw Error(ErrorCode::NotNormalized, "a^2 + b^2 must equal 1");
  }
  if (!(b > 0.0) || b > a) {
    throw Error(ErrorCode::DegenerateOrdering, "require a >= b > 0");
  }
}

Ket omega_prime(double a, double b) {
  validate_omega_prime(a, b);
  const double s = 1.0 / std::sqrt(2.0);
  return sparse_ket(4, {{0b0000, a * s}, {0b0110, a * s}, {0b1001, b * s}, {0b1111, -b * s}});
}

Ket generic_channel(const Ket& psi0, const Ket& psi1) {
  if (psi0.num_qubits() != psi1.num_qubits()) {
    throw Error(ErrorCode::SizeMismatch, "psi0 and psi1 differ in size");
  }
  if (std::abs(psi0.amplitudes().dot(psi1.amplitudes())) > kExactTol) {
    throw Error(ErrorCode::NotOrthogonal, "<psi0|psi1> must vanish");
  }
  Ket::Vector v(static_cast<Eigen::Index>(2 * psi0.dim()));
  v << psi0.amplitudes(), psi1.amplitudes();
  return Ket::from_amplitudes(std::move(v));
}

}  // namespace hqc
