#pragma once

// Amplitude loading: mass function -> unit-norm amplitudes -> RY rotation
// tree -> gate sequence over X/RY/CNOT.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "belieffuse/evidence.hpp"
#include "belieffuse/qsim.hpp"

namespace belieffuse {

inline constexpr double kNormTolerance = 1e-9;

// Non-negative real amplitudes over N qubits with unit 2-norm.
class AmplitudeVector {
public:
  AmplitudeVector() = default;

  explicit AmplitudeVector(std::vector<double> amps) : amps_(std::move(amps)) {
    while ((std::size_t{1} << n_qubits_) < amps_.size()) ++n_qubits_;
    if (amps_.size() < 2 || (std::size_t{1} << n_qubits_) != amps_.size()) {
      throw std::invalid_argument("amplitude vector length must be a power of two >= 2, got " +
                                  std::to_string(amps_.size()));
    }
    double norm2 = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (!(amps_[i] >= 0.0)) {
        throw std::invalid_argument("amplitude " + std::to_string(i) + " is negative or NaN");
      }
      norm2 += amps_[i] * amps_[i];
    }
    if (std::abs(norm2 - 1.0) > kNormTolerance) {
      throw std::invalid_argument("amplitude vector is not unit norm (sum of squares " +
                                  std::to_string(norm2) + ")");
    }
  }

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t size() const noexcept { return amps_.size(); }
  const std::vector<double>& amps() const noexcept { return amps_; }
  double operator[](std::size_t i) const { return amps_.at(i); }

  friend bool operator==(const AmplitudeVector&, const AmplitudeVector&) = default;

private:
  std::size_t n_qubits_ = 0;
  std::vector<double> amps_;
};

// amps[i] = sqrt(|M(A_i)| / sum_j |M(A_j)|). Phases are discarded.
inline AmplitudeVector p_transform(const Cbba& m) {
  const auto moduli = modulus_mass(m);
  double total = 0.0;
  for (const auto& [code, v] : moduli) total += v;
  if (!(total > 0.0)) {
    throw std::invalid_argument("p_transform: all masses are zero");
  }
  std::vector<double> amps(m.frame().power_set_size(), 0.0);
  for (const auto& [code, v] : moduli) {
    if (code.bits >= amps.size()) throw FrameMismatchError("p_transform: key outside the frame");
    amps[code.bits] = std::sqrt(v / total);
  }
  return AmplitudeVector(std::move(amps));
}

inline AmplitudeVector p_transform(const Bba& m) { return p_transform(to_complex(m)); }

// Binary tree of RY angles. Level k holds 2^k angles; node j at level k
// covers basis indices [j * 2^(N-k), (j+1) * 2^(N-k)) and splits them on
// qubit N-1-k.
struct AngleTree {
  std::size_t n_qubits = 0;
  std::vector<std::vector<double>> levels;

  std::size_t angle_count() const {
    std::size_t n = 0;
    for (const auto& level : levels) n += level.size();
    return n;
  }
};

// Node angle = 2 atan2(|right subtree|, |left subtree|); zero-norm nodes get 0.
inline AngleTree build_angle_tree(const AmplitudeVector& amps) {
  const std::size_t n = amps.n_qubits();
  // norms2[k][j]: squared norm of node j at depth k; depth n is the leaves.
  std::vector<std::vector<double>> norms2(n + 1);
  norms2[n].resize(amps.size());
  for (std::size_t i = 0; i < amps.size(); ++i) norms2[n][i] = amps[i] * amps[i];
  for (std::size_t k = n; k-- > 0;) {
    norms2[k].resize(std::size_t{1} << k);
    for (std::size_t j = 0; j < norms2[k].size(); ++j) {
      norms2[k][j] = norms2[k + 1][2 * j] + norms2[k + 1][2 * j + 1];
    }
  }
  AngleTree tree;
  tree.n_qubits = n;
  tree.levels.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    tree.levels[k].resize(std::size_t{1} << k);
    for (std::size_t j = 0; j < tree.levels[k].size(); ++j) {
      const double left = std::sqrt(norms2[k + 1][2 * j]);
      const double right = std::sqrt(norms2[k + 1][2 * j + 1]);
      tree.levels[k][j] = (left == 0.0 && right == 0.0) ? 0.0 : 2.0 * std::atan2(right, left);
    }
  }
  return tree;
}

struct QubitRange {
  Qubit first = 0;
  std::size_t count = 0;
};

namespace detail {

// Angles phi with theta_j = sum_i (-1)^popcount(j & gray(i)) phi_i.
inline std::vector<double> multiplexor_angles(const std::vector<double>& theta) {
  const std::size_t size = theta.size();
  std::vector<double> phi(size, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t gray = i ^ (i >> 1);
    double s = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
      s += (std::popcount(j & gray) % 2 == 0) ? theta[j] : -theta[j];
    }
    phi[i] = s / static_cast<double>(size);
  }
  return phi;
}

}  // namespace detail

// Lowers the tree onto qubits [first, first + N). Level k becomes a
// uniformly controlled RY on qubit first+N-1-k, controlled by the k qubits
// above it, written as alternating RY and CNOT in Gray-code order. Levels
// whose angles are all zero emit nothing, as do zero RY rotations.
inline std::vector<Gate> lower_to_gates(const AngleTree& tree, QubitRange range) {
  if (range.count != tree.n_qubits || tree.levels.size() != tree.n_qubits) {
    throw std::invalid_argument("lower_to_gates: qubit range of length " +
                                std::to_string(range.count) + " does not match a " +
                                std::to_string(tree.n_qubits) + "-qubit angle tree");
  }
  const std::size_t n = tree.n_qubits;
  std::vector<Gate> gates;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& theta = tree.levels[k];
    if (theta.size() != (std::size_t{1} << k)) {
      throw std::invalid_argument("lower_to_gates: malformed tree level " + std::to_string(k));
    }
    const bool all_zero = std::all_of(theta.begin(), theta.end(), [](double t) { return t == 0.0; });
    if (all_zero) continue;
    const Qubit target = range.first + n - 1 - k;
    if (k == 0) {
      gates.push_back(Gate::ry(target, theta[0]));
      continue;
    }
    // Bit b of the pattern index is qubit first + n - k + b.
    const auto phi = detail::multiplexor_angles(theta);
    const std::size_t size = phi.size();
    for (std::size_t i = 0; i < size; ++i) {
      if (phi[i] != 0.0) gates.push_back(Gate::ry(target, phi[i]));
      const std::size_t flip = (i + 1 == size) ? k - 1 : static_cast<std::size_t>(std::countr_zero(i + 1));
      gates.push_back(Gate::cnot(range.first + n - k + flip, target));
    }
  }
  return gates;
}

inline std::vector<Gate> prepare_amplitudes(const AmplitudeVector& amps, Qubit first) {
  return lower_to_gates(build_angle_tree(amps), {first, amps.n_qubits()});
}

}  // namespace belieffuse
