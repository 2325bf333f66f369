#pragma once

// The two quantum fusion pipelines.
//
// QADRC loads both sources into 2N qubits, measures everything and
// intersects the measured subset pairs classically. QDRC adds an N-qubit
// output register and writes the intersection with one Toffoli per frame
// element, so only the output register is measured. In both, the empty-set
// outcome is the conflict estimate and the rest is renormalized.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "belieffuse/circuit.hpp"
#include "belieffuse/evidence.hpp"
#include "belieffuse/qsim.hpp"
#include "belieffuse/stateprep.hpp"

namespace belieffuse {

// reg1 = [0, N), reg2 = [N, 2N), out = [2N, 3N).
struct QdrcLayout {
  std::size_t n = 0;

  std::size_t total_qubits() const noexcept { return 3 * n; }
  Qubit reg1(std::size_t k) const noexcept { return k; }
  Qubit reg2(std::size_t k) const noexcept { return n + k; }
  Qubit out(std::size_t k) const noexcept { return 2 * n + k; }

  std::vector<Qubit> out_register() const {
    std::vector<Qubit> qs(n);
    for (std::size_t k = 0; k < n; ++k) qs[k] = out(k);
    return qs;
  }
};

// reg1 = [0, N), reg2 = [N, 2N).
struct QadrcLayout {
  std::size_t n = 0;

  std::size_t total_qubits() const noexcept { return 2 * n; }
  Qubit reg1(std::size_t k) const noexcept { return k; }
  Qubit reg2(std::size_t k) const noexcept { return n + k; }

  std::vector<Qubit> all() const {
    std::vector<Qubit> qs(2 * n);
    for (std::size_t k = 0; k < 2 * n; ++k) qs[k] = k;
    return qs;
  }
};

namespace detail {

inline std::size_t require_same_size(const AmplitudeVector& p1, const AmplitudeVector& p2) {
  if (p1.n_qubits() != p2.n_qubits()) {
    throw std::invalid_argument("amplitude vectors have different sizes (" +
                                std::to_string(p1.n_qubits()) + " vs " +
                                std::to_string(p2.n_qubits()) + " qubits)");
  }
  return p1.n_qubits();
}

}  // namespace detail

// Loads P1 into reg1 and P2 into reg2, then Toffoli(reg1[k], reg2[k], out[k])
// for every k. The output register ends up holding reg1 AND reg2.
inline Circuit build_qdrc_circuit(const AmplitudeVector& p1, const AmplitudeVector& p2) {
  const QdrcLayout layout{detail::require_same_size(p1, p2)};
  Circuit circuit(layout.total_qubits());
  circuit.load(layout.reg1(0), p1);
  circuit.load(layout.reg2(0), p2);
  for (std::size_t k = 0; k < layout.n; ++k) {
    circuit.add(Gate::toffoli(layout.reg1(k), layout.reg2(k), layout.out(k)));
  }
  circuit.measure(layout.out_register());
  return circuit;
}

// Loads only; every qubit is measured.
inline Circuit build_qadrc_circuit(const AmplitudeVector& p1, const AmplitudeVector& p2) {
  const QadrcLayout layout{detail::require_same_size(p1, p2)};
  Circuit circuit(layout.total_qubits());
  circuit.load(layout.reg1(0), p1);
  circuit.load(layout.reg2(0), p2);
  circuit.measure(layout.all());
  return circuit;
}

// Turns a distribution over intersection codes (index 0 = empty set) into a
// FusionResult: K = weight at 0, the rest renormalized. Zero-weight codes
// are left out of the combined map.
inline FusionResult fuse_outcomes(const Frame& frame, const std::vector<double>& weights,
                                  Backend backend, Mode mode) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double conflict = weights.at(0) / total;
  if (conflict >= 1.0 - kMassTolerance) {
    throw TotalConflictError("total conflict: the empty-set outcome carries probability " +
                                 detail::format_number(conflict),
                             Complex{conflict, 0.0});
  }
  const double kept = total - weights[0];
  Bba combined(frame);
  for (std::size_t code = 1; code < weights.size(); ++code) {
    if (weights[code] > 0.0) combined.set(SubsetCode{static_cast<std::uint32_t>(code)}, weights[code] / kept);
  }
  return {std::move(combined), conflict, backend, mode};
}

namespace detail {

inline constexpr double kDegenerateTolerance = 1e-12;

// Folds the 2N-qubit joint distribution onto B AND C. Outcomes where either
// register reads the empty set cannot be produced by a valid load.
inline std::vector<double> intersect_joint(const std::vector<double>& joint, std::size_t n) {
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> out(size, 0.0);
  double degenerate = 0.0;
  for (std::size_t c = 0; c < size; ++c) {
    for (std::size_t b = 0; b < size; ++b) {
      const double p = joint[b | (c << n)];
      if (b == 0 || c == 0) {
        degenerate += p;
        continue;
      }
      out[b & c] += p;
    }
  }
  const double total = std::accumulate(joint.begin(), joint.end(), 0.0);
  if (degenerate > kDegenerateTolerance * total) {
    throw std::logic_error("a register measured the empty set with weight " +
                           format_number(degenerate / total));
  }
  return out;
}

template <typename Counts>
std::vector<double> to_weights(const Counts& counts) {
  return std::vector<double>(counts.begin(), counts.end());
}

}  // namespace detail

// Runs one of the quantum pipelines on two (C)BBAs. Complex masses enter
// through their moduli only, so the result equals combine_drc on the
// modulus-normalized inputs.
inline FusionResult run_fusion(const Cbba& m1, const Cbba& m2, Backend backend, Mode mode,
                               unsigned threads = default_thread_count()) {
  detail::require_same_frame(m1.frame(), m2.frame());
  if (backend != Backend::qadrc && backend != Backend::qdrc) {
    throw std::invalid_argument(std::string("run_fusion: ") + to_string(backend) +
                                " is not a quantum backend");
  }
  if (!mode.is_exact() && mode.shots == 0) {
    throw std::invalid_argument("run_fusion: shots must be at least 1");
  }
  const Frame& frame = m1.frame();
  const std::size_t n = frame.size();
  const auto p1 = p_transform(m1);
  const auto p2 = p_transform(m2);

  if (backend == Backend::qdrc) {
    const Circuit circuit = build_qdrc_circuit(p1, p2);
    const StateVector state = simulate(circuit, threads);
    const auto weights = mode.is_exact()
                             ? state.marginal_probabilities(circuit.measured())
                             : detail::to_weights(sample(state, circuit.measured(), mode.shots, mode.seed));
    return fuse_outcomes(frame, weights, backend, mode);
  }

  const Circuit circuit = build_qadrc_circuit(p1, p2);
  const StateVector state = simulate(circuit, threads);
  const auto joint = mode.is_exact()
                         ? state.marginal_probabilities(circuit.measured())
                         : detail::to_weights(sample(state, circuit.measured(), mode.shots, mode.seed));
  return fuse_outcomes(frame, detail::intersect_joint(joint, n), backend, mode);
}

inline FusionResult run_fusion(const Bba& m1, const Bba& m2, Backend backend, Mode mode,
                               unsigned threads = default_thread_count()) {
  return run_fusion(to_complex(m1), to_complex(m2), backend, mode, threads);
}

}  // namespace belieffuse
