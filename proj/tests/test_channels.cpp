#include <cmath>

#include "doctest.h"
#include "hqc/channels.hpp"
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

double max_diff(const Ket& a, const oracle::Vec& b) { return (a.amplitudes() - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("secret_state") {
  CHECK(secret_state({0.0}) == Ket::basis(1, 0));
  const Ket one = secret_state({1.0});
  CHECK(std::abs(one[0] - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(one[1] - 1 / std::sqrt(2.0)) < 1e-15);
  const Ket imag = secret_state({cd(0, 1)});
  CHECK(std::abs(imag[0] - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(imag[1] - cd(0, 1 / std::sqrt(2.0))) < 1e-15);
  CHECK(code_of([] { secret_state({cd(NAN, 0)}); }) == ErrorCode::NonFiniteLambda);
  CHECK(code_of([] { secret_state({cd(0, INFINITY)}); }) == ErrorCode::NonFiniteLambda);
}

TEST_CASE("omega amplitudes") {
  const Ket w = omega();
  CHECK(w[0b0000] == cd(0.5));
  CHECK(w[0b1111] == cd(-0.5));
  CHECK(max_diff(w, oracle::omega()) == 0.0);
  const DensityMatrix2 ra = reduced_density_1q(w, 0);
  CHECK((ra - oracle::reduce(oracle::omega(), 4, 0)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((ra - DensityMatrix2::Identity() / 2.0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("cluster amplitudes") {
  const Ket c = cluster4();
  CHECK(c[0b0011] == cd(0.5));
  CHECK(max_diff(c, oracle::cluster()) == 0.0);
  CHECK(std::abs(c.amplitudes().norm() - 1) < 1e-15);
  CHECK(std::abs(omega().amplitudes().dot(c.amplitudes()) - 0.5) < 1e-15);
  CHECK(std::abs(oracle::omega().dot(oracle::cluster()) - 0.5) < 1e-15);
}

TEST_CASE("omega and cluster differ by the B<->D relabeling") {
  // new order A, D, C, B
  CHECK(permute_qubits(omega(), {0, 3, 2, 1}) == cluster4());
  CHECK(permute_qubits(cluster4(), {0, 3, 2, 1}) == omega());
}

TEST_CASE("omega_prime") {
  const double s = 1 / std::sqrt(2.0);
  CHECK(max_diff(omega_prime(s, s), oracle::omega()) < 1e-12);

  const Ket w = omega_prime(0.8, 0.6);
  CHECK(std::abs(w.amplitudes().norm() - 1) < 1e-15);
  CHECK(std::abs(w[0] - 0.8 * s) < 1e-15);
  const oracle::Vec ref = 0.8 * s * (oracle::basis("0000") + oracle::basis("0110")) +
                          0.6 * s * (oracle::basis("1001") - oracle::basis("1111"));
  CHECK(max_diff(w, ref) < 1e-15);
  const oracle::Mat ra = oracle::reduce(ref, 4, 0);
  CHECK(std::abs(ra(0, 0) - 0.64) < 1e-15);
  CHECK(std::abs(ra(1, 1) - 0.36) < 1e-15);
  CHECK(std::abs(ra(0, 1)) < 1e-15);
  CHECK((reduced_density_1q(w, 0) - ra).cwiseAbs().maxCoeff() < 1e-15);

  CHECK(code_of([] { omega_prime(0.8, 0.5); }) == ErrorCode::NotNormalized);
  CHECK(code_of([] { omega_prime(0.6, 0.8); }) == ErrorCode::DegenerateOrdering);
  CHECK(code_of([] { omega_prime(1.0, 0.0); }) == ErrorCode::DegenerateOrdering);
  CHECK(code_of([] { omega_prime(NAN, 0.5); }) == ErrorCode::NotNormalized);
}

TEST_CASE("omega_prime is continuous towards the maximal channel") {
  double prev = 1.0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    const double a = std::sqrt(0.5 + eps), b = std::sqrt(0.5 - eps);
    const double d = (omega_prime(a, b).amplitudes() - oracle::omega()).cwiseAbs().maxCoeff();
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("maximal omega_prime raises a warning, not an error") {
  const double s = 1 / std::sqrt(2.0);
  const ChannelSpec spec = ChannelSpec::omega_prime(s, s);
  REQUIRE(spec.warnings().size() == 1);
  CHECK(spec.warnings()[0].rfind("MaximalChannel", 0) == 0);
  CHECK(ChannelSpec::omega_prime(0.8, 0.6).warnings().empty());
  CHECK_FALSE(spec.is_maximal());
}

TEST_CASE("generic_channel") {
  const Ket bell = generic_channel(Ket::basis(1, 0), Ket::basis(1, 1));
  CHECK(max_diff(bell, oracle::bell(0)) < 1e-15);

  CHECK(generic_channel(omega_psi0(), omega_psi1()) == omega());
  CHECK(generic_channel(cluster4_psi0(), cluster4_psi1()) == cluster4());

  CHECK(code_of([] { generic_channel(Ket::basis(1, 0), Ket::basis(2, 0)); }) ==
        ErrorCode::SizeMismatch);
  CHECK(code_of([] { generic_channel(Ket::basis(1, 0), secret_state({1.0})); }) ==
        ErrorCode::NotOrthogonal);
}

TEST_CASE("channel specs build the right states") {
  CHECK(ChannelSpec::omega().state() == omega());
  CHECK(ChannelSpec::cluster4().state() == cluster4());
  CHECK(ChannelSpec::omega_prime(0.8, 0.6).state() == omega_prime(0.8, 0.6));
  CHECK(ChannelSpec::generic(omega_psi0(), omega_psi1()).state() == omega());
  CHECK(ChannelSpec::omega().is_maximal());
  CHECK(ChannelSpec::cluster4().is_maximal());
}

TEST_CASE("channel kind names") {
  for (ChannelKind k : {ChannelKind::Omega, ChannelKind::Cluster4, ChannelKind::OmegaPrime,
                        ChannelKind::Generic}) {
    CHECK(parse_channel_kind(to_string(k)) == k);
  }
  CHECK(to_string(ChannelKind::OmegaPrime) == "omega-prime");
  CHECK_FALSE(parse_channel_kind("ghz").has_value());
}
