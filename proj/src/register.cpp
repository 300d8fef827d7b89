#include "hqc/register.hpp"

#include <algorithm>
#include <string>

namespace hqc {

namespace {

std::string id_text(QubitId id) { return "qubit id " + std::to_string(id); }

}  // namespace

void Register::add(const Ket& state, std::vector<QubitId> ids) {
  if (static_cast<int>(ids.size()) != state.num_qubits()) {
    throw Error(ErrorCode::SizeMismatch, "ids do not match state size");
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (contains(ids[i]) || std::count(ids.begin(), ids.end(), ids[i]) > 1) {
      throw Error(ErrorCode::DuplicateTarget, id_text(ids[i]));
    }
  }
  clusters_.push_back({std::move(ids), state});
  factor(clusters_.size() - 1, {});
}

bool Register::contains(QubitId id) const {
  return std::any_of(clusters_.begin(), clusters_.end(), [id](const Cluster& c) {
    return std::find(c.ids.begin(), c.ids.end(), id) != c.ids.end();
  });
}

std::vector<QubitId> Register::qubits() const {
  std::vector<QubitId> all;
  for (const auto& c : clusters_) all.insert(all.end(), c.ids.begin(), c.ids.end());
  std::sort(all.begin(), all.end());
  return all;
}

std::size_t Register::cluster_size(QubitId id) const { return clusters_[locate(id)].ids.size(); }

std::size_t Register::locate(QubitId id) const {
  for (std::size_t c = 0; c < clusters_.size(); ++c) {
    if (std::find(clusters_[c].ids.begin(), clusters_[c].ids.end(), id) != clusters_[c].ids.end()) {
      return c;
    }
  }
  throw Error(ErrorCode::IndexOutOfRange, id_text(id) + " not in register");
}

int Register::position(std::size_t cluster, QubitId id) const {
  const auto& ids = clusters_[cluster].ids;
  return static_cast<int>(std::find(ids.begin(), ids.end(), id) - ids.begin());
}

std::size_t Register::merge(std::size_t a, std::size_t b) {
  if (a == b) return a;
  if (a > b) std::swap(a, b);
  Cluster& first = clusters_[a];
  Cluster& second = clusters_[b];
  first.state = tensor(first.state, second.state);
  first.ids.insert(first.ids.end(), second.ids.begin(), second.ids.end());
  clusters_.erase(clusters_.begin() + static_cast<std::ptrdiff_t>(b));
  return a;
}

std::size_t Register::join(QubitId first, QubitId second) {
  if (first == second) throw Error(ErrorCode::DuplicateTarget, id_text(first));
  return merge(locate(first), locate(second));
}

void Register::replace(std::size_t cluster, Ket state) { clusters_[cluster].state = std::move(state); }

// Splits `group` (if given) and then every single qubit off the cluster
// wherever the state factorizes.
void Register::factor(std::size_t cluster, std::span<const QubitId> group) {
  std::vector<std::size_t> pending{cluster};
  if (!group.empty() && clusters_[cluster].ids.size() > group.size()) {
    std::vector<int> keep;
    for (QubitId id : group) keep.push_back(position(cluster, id));
    if (auto parts = try_split_product(clusters_[cluster].state, keep)) {
      std::vector<QubitId> rest_ids;
      for (std::size_t k = 0; k < clusters_[cluster].ids.size(); ++k) {
        if (std::find(keep.begin(), keep.end(), static_cast<int>(k)) == keep.end()) {
          rest_ids.push_back(clusters_[cluster].ids[k]);
        }
      }
      clusters_[cluster] = {std::vector<QubitId>(group.begin(), group.end()), std::move(parts->first)};
      clusters_.push_back({std::move(rest_ids), std::move(parts->second)});
      pending = {cluster, clusters_.size() - 1};
    }
  }
  for (std::size_t c : pending) {
    bool split = true;
    while (split && clusters_[c].ids.size() > 1) {
      split = false;
      for (int k = 0; k < static_cast<int>(clusters_[c].ids.size()); ++k) {
        const int keep[] = {k};
        auto parts = try_split_product(clusters_[c].state, keep);
        if (!parts) continue;
        const QubitId id = clusters_[c].ids[static_cast<std::size_t>(k)];
        clusters_[c].ids.erase(clusters_[c].ids.begin() + k);
        clusters_[c].state = std::move(parts->second);
        clusters_.push_back({{id}, std::move(parts->first)});
        split = true;
        break;
      }
    }
  }
}

void Register::apply(const Unitary2& gate, QubitId target) {
  const std::size_t c = locate(target);
  const int t[] = {position(c, target)};
  replace(c, apply_unitary(clusters_[c].state, gate, t));
}

void Register::apply(const Unitary4& gate, QubitId first, QubitId second) {
  const std::size_t c = join(first, second);
  const int t[] = {position(c, first), position(c, second)};
  replace(c, apply_unitary(clusters_[c].state, gate, t));
  factor(c, {});
}

Bit Register::measure(QubitId target, RandomSource& rng) {
  const std::size_t c = locate(target);
  if (clusters_[c].ids.size() == 1) {
    // Single-qubit clusters skip the factoring pass.
    auto [bit, post] = measure_computational(clusters_[c].state, 0, rng);
    replace(c, std::move(post));
    return bit;
  }
  auto [bit, post] = measure_computational(clusters_[c].state, position(c, target), rng);
  replace(c, std::move(post));
  const QubitId g[] = {target};
  factor(c, g);
  return bit;
}

double Register::project(QubitId target, Bit value) {
  const std::size_t c = locate(target);
  auto branch = project_computational(clusters_[c].state, position(c, target), value);
  if (!branch) throw Error(ErrorCode::ZeroProbabilityBranch, id_text(target));
  replace(c, std::move(*branch.state));
  const QubitId g[] = {target};
  factor(c, g);
  return branch.probability;
}

BellOutcome Register::measure_bell(QubitId first, QubitId second, RandomSource& rng) {
  const std::size_t c = join(first, second);
  auto [outcome, post] =
      hqc::measure_bell(clusters_[c].state, {position(c, first), position(c, second)}, rng);
  replace(c, std::move(post));
  const QubitId g[] = {first, second};
  factor(c, g);
  return outcome;
}

double Register::project_bell(QubitId first, QubitId second, BellOutcome outcome) {
  const Register saved = *this;
  const std::size_t c = join(first, second);
  auto branch =
      hqc::project_bell(clusters_[c].state, {position(c, first), position(c, second)}, outcome);
  if (!branch) {
    *this = saved;
    throw Error(ErrorCode::ZeroProbabilityBranch, std::string(to_string(outcome)));
  }
  replace(c, std::move(*branch.state));
  const QubitId g[] = {first, second};
  factor(c, g);
  return branch.probability;
}

DensityMatrix2 Register::reduced(QubitId id) const {
  const std::size_t c = locate(id);
  return reduced_density_1q(clusters_[c].state, position(c, id));
}

std::optional<Ket> Register::pure_state(QubitId id) const {
  const std::size_t c = locate(id);
  if (clusters_[c].ids.size() == 1) return canonical_phase(clusters_[c].state);
  const int keep[] = {position(c, id)};
  if (auto parts = try_split_product(clusters_[c].state, keep)) return std::move(parts->first);
  return std::nullopt;
}

Ket Register::gather(std::span<const QubitId> ids) const {
  std::vector<std::size_t> touched;
  for (QubitId id : ids) {
    const std::size_t c = locate(id);
    if (std::find(touched.begin(), touched.end(), c) == touched.end()) touched.push_back(c);
  }
  std::size_t covered = 0;
  for (std::size_t c : touched) covered += clusters_[c].ids.size();
  if (covered != ids.size()) {
    throw Error(ErrorCode::NotProductState, "requested qubits are entangled with others");
  }
  std::vector<QubitId> order = clusters_[touched.front()].ids;
  Ket joint = clusters_[touched.front()].state;
  for (std::size_t i = 1; i < touched.size(); ++i) {
    joint = tensor(joint, clusters_[touched[i]].state);
    order.insert(order.end(), clusters_[touched[i]].ids.begin(), clusters_[touched[i]].ids.end());
  }
  std::vector<int> perm;
  for (QubitId id : ids) {
    perm.push_back(static_cast<int>(std::find(order.begin(), order.end(), id) - order.begin()));
  }
  return permute_qubits(joint, std::span<const int>(perm));
}

void Register::discard(std::span<const QubitId> ids) {
  (void)gather(ids);  // validates closure
  std::vector<std::size_t> touched;
  for (QubitId id : ids) touched.push_back(locate(id));
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (auto it = touched.rbegin(); it != touched.rend(); ++it) {
    clusters_.erase(clusters_.begin() + static_cast<std::ptrdiff_t>(*it));
  }
}

}  // namespace hqc
