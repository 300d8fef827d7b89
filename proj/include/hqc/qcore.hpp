#pragma once

// Dense statevector core. Every type is templated on the real scalar; the
// protocol layers use the double aliases at the bottom of the file.
//
// Basis-index convention: qubit 0 is the leftmost ket label, so
// |b0 b1 ... b(n-1)> lives at index sum_k b_k * 2^(n-1-k).
//
// Bell-basis naming follows the decomposition used throughout the protocol
// tables, which is the reverse of the usual textbook labels:
//   psi+- = (|00> +- |11>)/sqrt2,   phi+- = (|01> +- |10>)/sqrt2.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hqc/error.hpp"
#include "hqc/random.hpp"

namespace hqc {

inline constexpr int kMaxQubits = 14;

// Tolerance for exact algebraic identities.
inline constexpr double kExactTol = 1e-12;

// Projection weights at or below this are treated as impossible branches.
inline constexpr double kZeroProbability = 1e-24;

enum class Bit : std::uint8_t { Zero = 0, One = 1 };

constexpr int to_int(Bit b) { return static_cast<int>(b); }
constexpr Bit to_bit(int v) { return v == 0 ? Bit::Zero : Bit::One; }

enum class BellOutcome : std::uint8_t { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

inline constexpr std::array<BellOutcome, 4> kBellOutcomes = {
    BellOutcome::PsiPlus, BellOutcome::PsiMinus, BellOutcome::PhiPlus, BellOutcome::PhiMinus};

inline constexpr std::array<Bit, 2> kBits = {Bit::Zero, Bit::One};

constexpr std::string_view to_string(BellOutcome o) {
  switch (o) {
    case BellOutcome::PsiPlus: return "psi+";
    case BellOutcome::PsiMinus: return "psi-";
    case BellOutcome::PhiPlus: return "phi+";
    case BellOutcome::PhiMinus: return "phi-";
  }
  return "?";
}

constexpr bool is_psi(BellOutcome o) {
  return o == BellOutcome::PsiPlus || o == BellOutcome::PsiMinus;
}

namespace detail {

constexpr std::size_t mask_of(int num_qubits, int qubit) {
  return std::size_t{1} << (num_qubits - 1 - qubit);
}

inline void check_targets(int num_qubits, std::span<const int> targets) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= num_qubits) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "qubit " + std::to_string(targets[i]) + " not in register of " +
                      std::to_string(num_qubits));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) {
        throw Error(ErrorCode::DuplicateTarget, "qubit " + std::to_string(targets[i]));
      }
    }
  }
}

// Full-register offset of each local index over `targets` (targets[0] is the
// most significant local bit).
inline std::vector<std::size_t> local_offsets(int num_qubits, std::span<const int> targets) {
  const std::size_t k = targets.size();
  std::vector<std::size_t> offsets(std::size_t{1} << k, 0);
  for (std::size_t l = 0; l < offsets.size(); ++l) {
    for (std::size_t j = 0; j < k; ++j) {
      if ((l >> (k - 1 - j)) & 1U) offsets[l] |= mask_of(num_qubits, targets[j]);
    }
  }
  return offsets;
}

// Register indices whose target bits are all zero, in increasing order.
inline std::vector<std::size_t> base_indices(int num_qubits, std::span<const int> targets) {
  std::size_t tmask = 0;
  for (int t : targets) tmask |= mask_of(num_qubits, t);
  std::vector<std::size_t> bases;
  bases.reserve((std::size_t{1} << num_qubits) >> targets.size());
  for (std::size_t i = 0; i < (std::size_t{1} << num_qubits); ++i) {
    if ((i & tmask) == 0) bases.push_back(i);
  }
  return bases;
}

inline std::vector<int> complement(int num_qubits, std::span<const int> keep) {
  std::vector<int> rest;
  for (int q = 0; q < num_qubits; ++q) {
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) rest.push_back(q);
  }
  return rest;
}

}  // namespace detail

/// Normalized dense amplitude vector over 1..kMaxQubits qubits.
template <typename Real>
class BasicKet {
 public:
  using Scalar = std::complex<Real>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// Normalizes `amps`; the length must be a power of two >= 2.
  static BasicKet from_amplitudes(Vector amps) {
    const auto len = static_cast<std::size_t>(amps.size());
    if (len < 2 || (len & (len - 1)) != 0) {
      throw Error(ErrorCode::NonPowerOfTwoLength, "length " + std::to_string(len));
    }
    int n = 0;
    while ((std::size_t{1} << n) < len) ++n;
    if (n > kMaxQubits) {
      throw Error(ErrorCode::RegisterTooLarge, std::to_string(n) + " qubits");
    }
    const Real norm = amps.norm();
    if (!(norm > Real(0)) || !std::isfinite(static_cast<double>(norm))) {
      throw Error(ErrorCode::ZeroNorm, "cannot normalize");
    }
    amps /= norm;
    return BasicKet(n, std::move(amps));
  }

  static BasicKet basis(int num_qubits, std::size_t index) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
      throw Error(ErrorCode::RegisterTooLarge, std::to_string(num_qubits) + " qubits");
    }
    Vector v = Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << num_qubits));
    if (index >= static_cast<std::size_t>(v.size())) {
      throw Error(ErrorCode::IndexOutOfRange, "basis index " + std::to_string(index));
    }
    v(static_cast<Eigen::Index>(index)) = Scalar(1);
    return BasicKet(num_qubits, std::move(v));
  }

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }
  Scalar operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

  friend bool operator==(const BasicKet& a, const BasicKet& b) {
    return a.num_qubits_ == b.num_qubits_ && a.amps_ == b.amps_;
  }

 private:
  BasicKet(int n, Vector amps) : num_qubits_(n), amps_(std::move(amps)) {}

  int num_qubits_;
  Vector amps_;
};

template <typename Real>
BasicKet<Real> ket_from_amplitudes(typename BasicKet<Real>::Vector amps) {
  return BasicKet<Real>::from_amplitudes(std::move(amps));
}

/// 2^k x 2^k matrix checked for unitarity on construction.
template <typename Real, int Dim>
class BasicUnitary {
 public:
  using Scalar = std::complex<Real>;
  using Matrix = Eigen::Matrix<Scalar, Dim, Dim>;

  static BasicUnitary from_matrix(const Matrix& m) {
    const Real dev = (m * m.adjoint() - Matrix::Identity()).cwiseAbs().maxCoeff();
    if (!(dev <= Real(1e-10))) {
      throw Error(ErrorCode::NotUnitary, "||UU^+ - I||_max = " + std::to_string(double(dev)));
    }
    return BasicUnitary(m);
  }

  static constexpr int num_targets() { return Dim == 2 ? 1 : (Dim == 4 ? 2 : 3); }

  const Matrix& matrix() const { return m_; }
  BasicUnitary adjoint() const { return BasicUnitary(m_.adjoint()); }

  friend BasicUnitary operator*(const BasicUnitary& a, const BasicUnitary& b) {
    return BasicUnitary(a.m_ * b.m_);
  }

 private:
  explicit BasicUnitary(const Matrix& m) : m_(m) {}
  Matrix m_;
};

template <typename Real>
using BasicUnitary2 = BasicUnitary<Real, 2>;
template <typename Real>
using BasicUnitary4 = BasicUnitary<Real, 4>;

template <typename Real>
using BasicDensity2 = Eigen::Matrix<std::complex<Real>, 2, 2>;

namespace gates {

template <typename Real = double>
BasicUnitary2<Real> make2(std::complex<Real> a, std::complex<Real> b, std::complex<Real> c,
                          std::complex<Real> d) {
  typename BasicUnitary2<Real>::Matrix m;
  m << a, b, c, d;
  return BasicUnitary2<Real>::from_matrix(m);
}

template <typename Real = double>
BasicUnitary2<Real> identity() { return make2<Real>(1, 0, 0, 1); }

template <typename Real = double>
BasicUnitary2<Real> pauli_x() { return make2<Real>(0, 1, 1, 0); }

template <typename Real = double>
BasicUnitary2<Real> pauli_z() { return make2<Real>(1, 0, 0, -1); }

template <typename Real = double>
BasicUnitary2<Real> pauli_y() {
  using C = std::complex<Real>;
  return make2<Real>(0, C(0, -1), C(0, 1), 0);
}

template <typename Real = double>
BasicUnitary2<Real> hadamard() {
  const Real h = Real(1) / std::sqrt(Real(2));
  return make2<Real>(h, h, h, -h);
}

// X*Z: Z acts first.
template <typename Real = double>
BasicUnitary2<Real> xz() { return pauli_x<Real>() * pauli_z<Real>(); }

// i*Y; equals -X*Z.
template <typename Real = double>
BasicUnitary2<Real> iy() { return make2<Real>(0, 1, -1, 0); }

}  // namespace gates

/// Bell state over two qubits in the |00>,|01>,|10>,|11> basis.
template <typename Real = double>
Eigen::Matrix<std::complex<Real>, 4, 1> bell_vector(BellOutcome o) {
  const Real h = Real(1) / std::sqrt(Real(2));
  Eigen::Matrix<std::complex<Real>, 4, 1> v = Eigen::Matrix<std::complex<Real>, 4, 1>::Zero();
  switch (o) {
    case BellOutcome::PsiPlus: v << h, 0, 0, h; break;
    case BellOutcome::PsiMinus: v << h, 0, 0, -h; break;
    case BellOutcome::PhiPlus: v << 0, h, h, 0; break;
    case BellOutcome::PhiMinus: v << 0, h, -h, 0; break;
  }
  return v;
}

template <typename Real>
BasicKet<Real> bell_ket(BellOutcome o) {
  return BasicKet<Real>::from_amplitudes(bell_vector<Real>(o));
}

/// Kronecker product with a's qubits first.
template <typename Real>
BasicKet<Real> tensor(const BasicKet<Real>& a, const BasicKet<Real>& b) {
  if (a.num_qubits() + b.num_qubits() > kMaxQubits) {
    throw Error(ErrorCode::RegisterTooLarge,
                std::to_string(a.num_qubits() + b.num_qubits()) + " qubits");
  }
  typename BasicKet<Real>::Vector out(static_cast<Eigen::Index>(a.dim() * b.dim()));
  for (std::size_t i = 0; i < a.dim(); ++i) {
    out.segment(static_cast<Eigen::Index>(i * b.dim()), static_cast<Eigen::Index>(b.dim())) =
        a[i] * b.amplitudes();
  }
  return BasicKet<Real>::from_amplitudes(std::move(out));
}

template <typename Real, int Dim>
BasicKet<Real> apply_unitary(const BasicKet<Real>& state, const BasicUnitary<Real, Dim>& gate,
                             std::span<const int> targets) {
  const int k = BasicUnitary<Real, Dim>::num_targets();
  if (static_cast<int>(targets.size()) != k) {
    throw Error(ErrorCode::SizeMismatch, "gate acts on " + std::to_string(k) + " qubits, got " +
                                             std::to_string(targets.size()) + " targets");
  }
  detail::check_targets(state.num_qubits(), targets);
  const auto offsets = detail::local_offsets(state.num_qubits(), targets);
  typename BasicKet<Real>::Vector out = state.amplitudes();
  Eigen::Matrix<std::complex<Real>, Dim, 1> local;
  for (std::size_t base : detail::base_indices(state.num_qubits(), targets)) {
    for (int l = 0; l < Dim; ++l) local(l) = state[base + offsets[l]];
    const Eigen::Matrix<std::complex<Real>, Dim, 1> mixed = gate.matrix() * local;
    for (int l = 0; l < Dim; ++l) out(static_cast<Eigen::Index>(base + offsets[l])) = mixed(l);
  }
  return BasicKet<Real>::from_amplitudes(std::move(out));
}

template <typename Real, int Dim>
BasicKet<Real> apply_unitary(const BasicKet<Real>& state, const BasicUnitary<Real, Dim>& gate,
                             std::initializer_list<int> targets) {
  return apply_unitary(state, gate, std::span<const int>(targets.begin(), targets.size()));
}

/// Exact Born weight of a branch and, when nonzero, its normalized post-state.
template <typename Real>
struct BasicProjection {
  Real probability{0};
  std::optional<BasicKet<Real>> state;

  explicit operator bool() const { return state.has_value(); }

  const BasicKet<Real>& value() const {
    if (!state) throw Error(ErrorCode::ZeroProbabilityBranch, "probability 0");
    return *state;
  }
};

namespace detail {

template <typename Real>
BasicProjection<Real> finish_projection(typename BasicKet<Real>::Vector out) {
  const Real p = out.squaredNorm();
  if (!(p > Real(kZeroProbability))) return {Real(0), std::nullopt};
  return {p, BasicKet<Real>::from_amplitudes(std::move(out))};
}

}  // namespace detail

template <typename Real>
BasicProjection<Real> project_computational(const BasicKet<Real>& state, int target, Bit value) {
  const int t[] = {target};
  detail::check_targets(state.num_qubits(), t);
  const std::size_t mask = detail::mask_of(state.num_qubits(), target);
  typename BasicKet<Real>::Vector out = state.amplitudes();
  for (std::size_t i = 0; i < state.dim(); ++i) {
    const bool one = (i & mask) != 0;
    if (one != (value == Bit::One)) out(static_cast<Eigen::Index>(i)) = 0;
  }
  return detail::finish_projection<Real>(std::move(out));
}

/// Born-rule measurement in the computational basis; the measured qubit stays
/// in the register, collapsed to |bit>.
template <typename Real>
std::pair<Bit, BasicKet<Real>> measure_computational(const BasicKet<Real>& state, int target,
                                                     RandomSource& rng) {
  auto zero = project_computational(state, target, Bit::Zero);
  if (zero && rng.uniform() < static_cast<double>(zero.probability)) {
    return {Bit::Zero, std::move(*zero.state)};
  }
  auto one = project_computational(state, target, Bit::One);
  if (!one) return {Bit::Zero, std::move(*zero.state)};
  return {Bit::One, std::move(*one.state)};
}

/// Projects qubits (t0, t1) onto a Bell state; the pair is left in that state.
template <typename Real>
BasicProjection<Real> project_bell(const BasicKet<Real>& state, std::array<int, 2> targets,
                                   BellOutcome outcome) {
  detail::check_targets(state.num_qubits(), targets);
  const auto offsets = detail::local_offsets(state.num_qubits(), targets);
  const auto bell = bell_vector<Real>(outcome);
  typename BasicKet<Real>::Vector out =
      BasicKet<Real>::Vector::Zero(static_cast<Eigen::Index>(state.dim()));
  for (std::size_t base : detail::base_indices(state.num_qubits(), targets)) {
    std::complex<Real> overlap = 0;
    for (int l = 0; l < 4; ++l) overlap += std::conj(bell(l)) * state[base + offsets[l]];
    for (int l = 0; l < 4; ++l) out(static_cast<Eigen::Index>(base + offsets[l])) = bell(l) * overlap;
  }
  return detail::finish_projection<Real>(std::move(out));
}

template <typename Real>
std::pair<BellOutcome, BasicKet<Real>> measure_bell(const BasicKet<Real>& state,
                                                    std::array<int, 2> targets,
                                                    RandomSource& rng) {
  const double u = rng.uniform();
  double cumulative = 0;
  std::optional<std::pair<BellOutcome, BasicKet<Real>>> last;
  for (BellOutcome o : kBellOutcomes) {
    auto branch = project_bell(state, targets, o);
    if (!branch) continue;
    cumulative += static_cast<double>(branch.probability);
    last.emplace(o, std::move(*branch.state));
    if (u < cumulative) return std::move(*last);
  }
  // Rounding left u above the cumulative sum: fall back to the last live branch.
  return std::move(*last);
}

/// <bell|_(t0,t1) applied to the state; the result lives on the remaining
/// qubits in their original order.
template <typename Real>
BasicProjection<Real> contract_bell(const BasicKet<Real>& state, std::array<int, 2> targets,
                                    BellOutcome outcome) {
  detail::check_targets(state.num_qubits(), targets);
  if (state.num_qubits() < 3) {
    throw Error(ErrorCode::SizeMismatch, "contraction would leave no qubits");
  }
  const auto offsets = detail::local_offsets(state.num_qubits(), targets);
  const auto bell = bell_vector<Real>(outcome);
  const auto bases = detail::base_indices(state.num_qubits(), targets);
  typename BasicKet<Real>::Vector out(static_cast<Eigen::Index>(bases.size()));
  for (std::size_t r = 0; r < bases.size(); ++r) {
    std::complex<Real> overlap = 0;
    for (int l = 0; l < 4; ++l) overlap += std::conj(bell(l)) * state[bases[r] + offsets[l]];
    out(static_cast<Eigen::Index>(r)) = overlap;
  }
  return detail::finish_projection<Real>(std::move(out));
}

/// |<a|b>|^2.
template <typename Real>
Real fidelity_up_to_phase(const BasicKet<Real>& a, const BasicKet<Real>& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw Error(ErrorCode::SizeMismatch, std::to_string(a.num_qubits()) + " vs " +
                                             std::to_string(b.num_qubits()) + " qubits");
  }
  return std::clamp(std::norm(a.amplitudes().dot(b.amplitudes())), Real(0), Real(1));
}

/// <psi| rho |psi> for a single-qubit density matrix.
template <typename Real>
Real fidelity(const BasicDensity2<Real>& rho, const BasicKet<Real>& psi) {
  if (psi.num_qubits() != 1) throw Error(ErrorCode::SizeMismatch, "expected one qubit");
  const std::complex<Real> v = psi.amplitudes().dot(rho * psi.amplitudes());
  return std::clamp(v.real(), Real(0), Real(1));
}

template <typename Real>
BasicDensity2<Real> reduced_density_1q(const BasicKet<Real>& state, int keep) {
  const int t[] = {keep};
  detail::check_targets(state.num_qubits(), t);
  const std::size_t mask = detail::mask_of(state.num_qubits(), keep);
  BasicDensity2<Real> rho = BasicDensity2<Real>::Zero();
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (i & mask) continue;
    const std::complex<Real> a0 = state[i];
    const std::complex<Real> a1 = state[i | mask];
    rho(0, 0) += std::norm(a0);
    rho(0, 1) += a0 * std::conj(a1);
    rho(1, 0) += a1 * std::conj(a0);
    rho(1, 1) += std::norm(a1);
  }
  return rho;
}

/// New qubit k is old qubit order[k].
template <typename Real>
BasicKet<Real> permute_qubits(const BasicKet<Real>& state, std::span<const int> order) {
  const int n = state.num_qubits();
  if (static_cast<int>(order.size()) != n) {
    throw Error(ErrorCode::SizeMismatch, "permutation of wrong length");
  }
  detail::check_targets(n, order);
  typename BasicKet<Real>::Vector out(static_cast<Eigen::Index>(state.dim()));
  for (std::size_t j = 0; j < state.dim(); ++j) {
    std::size_t old = 0;
    for (int k = 0; k < n; ++k) {
      if (j & detail::mask_of(n, k)) old |= detail::mask_of(n, order[k]);
    }
    out(static_cast<Eigen::Index>(j)) = state[old];
  }
  return BasicKet<Real>::from_amplitudes(std::move(out));
}

template <typename Real>
BasicKet<Real> permute_qubits(const BasicKet<Real>& state, std::initializer_list<int> order) {
  return permute_qubits(state, std::span<const int>(order.begin(), order.size()));
}

namespace detail {

// Rotates the global phase so the largest amplitude is real and positive.
template <typename Vector>
void fix_phase(Vector& v) {
  Eigen::Index peak = 0;
  v.cwiseAbs2().maxCoeff(&peak);
  const auto mag = std::abs(v(peak));
  if (!(mag > 0)) return;
  v *= std::conj(v(peak)) / mag;
  v(peak) = mag;
}

}  // namespace detail

/// The same ray with its largest amplitude real and positive.
template <typename Real>
BasicKet<Real> canonical_phase(const BasicKet<Real>& state) {
  typename BasicKet<Real>::Vector v = state.amplitudes();
  detail::fix_phase(v);
  return BasicKet<Real>::from_amplitudes(std::move(v));
}

/// Factors a product state |keep> (x) |rest>, or nullopt when the state is
/// entangled across the cut. `keep` fixes the qubit order of the first
/// factor; the rest keep their original order. The first factor's global
/// phase makes its largest amplitude real and positive.
template <typename Real>
std::optional<std::pair<BasicKet<Real>, BasicKet<Real>>> try_split_product(
    const BasicKet<Real>& state, std::span<const int> keep, double tol = 1e-9) {
  const int n = state.num_qubits();
  detail::check_targets(n, keep);
  if (keep.empty() || static_cast<int>(keep.size()) >= n) {
    throw Error(ErrorCode::SizeMismatch, "both factors must be non-empty");
  }
  const auto rest = detail::complement(n, keep);
  const auto keep_off = detail::local_offsets(n, keep);
  const auto rest_off = detail::local_offsets(n, rest);
  using Mat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
  Mat m(static_cast<Eigen::Index>(keep_off.size()), static_cast<Eigen::Index>(rest_off.size()));
  for (std::size_t i = 0; i < keep_off.size(); ++i) {
    for (std::size_t j = 0; j < rest_off.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = state[keep_off[i] + rest_off[j]];
    }
  }
  Eigen::Index best = 0;
  m.colwise().squaredNorm().maxCoeff(&best);
  typename BasicKet<Real>::Vector first = m.col(best) / m.col(best).norm();
  detail::fix_phase(first);
  typename BasicKet<Real>::Vector second = (first.adjoint() * m).transpose();
  const Real residual = (m - first * second.transpose()).cwiseAbs().maxCoeff();
  if (!(residual <= Real(tol))) return std::nullopt;
  return std::pair{BasicKet<Real>::from_amplitudes(std::move(first)),
                   BasicKet<Real>::from_amplitudes(std::move(second))};
}

template <typename Real>
std::pair<BasicKet<Real>, BasicKet<Real>> split_product(const BasicKet<Real>& state,
                                                        std::span<const int> keep,
                                                        double tol = 1e-9) {
  auto parts = try_split_product(state, keep, tol);
  if (!parts) throw Error(ErrorCode::NotProductState, "state is entangled across the cut");
  return std::move(*parts);
}

using Ket = BasicKet<double>;
using Unitary2 = BasicUnitary2<double>;
using Unitary4 = BasicUnitary4<double>;
using DensityMatrix2 = BasicDensity2<double>;
using Projection = BasicProjection<double>;

}  // namespace hqc
