#pragma once

// Gate-list circuits with an amplitude-load pseudo-operation, lowering, and
// simulation.

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "belieffuse/qsim.hpp"
#include "belieffuse/stateprep.hpp"

namespace belieffuse {

// Loads `amps` into qubits [first, first + amps.n_qubits()), which must
// still be in |0...0>. Expanded into gates by lower().
struct LoadAmplitudes {
  Qubit first = 0;
  AmplitudeVector amps;

  QubitRange range() const { return {first, amps.n_qubits()}; }
};

using Operation = std::variant<Gate, LoadAmplitudes>;

class Circuit {
public:
  explicit Circuit(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits == 0) throw std::invalid_argument("circuit needs at least one qubit");
  }

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  const std::vector<Operation>& operations() const noexcept { return ops_; }
  const std::vector<Qubit>& measured() const noexcept { return measured_; }

  Circuit& add(const Gate& g) {
    check_gate(g, n_qubits_);
    ops_.emplace_back(g);
    return *this;
  }

  Circuit& add(const std::vector<Gate>& gates) {
    for (const auto& g : gates) add(g);
    return *this;
  }

  Circuit& load(Qubit first, AmplitudeVector amps) {
    if (first + amps.n_qubits() > n_qubits_) {
      throw std::out_of_range("load: qubit range [" + std::to_string(first) + ", " +
                              std::to_string(first + amps.n_qubits()) + ") exceeds " +
                              std::to_string(n_qubits_) + " qubits");
    }
    ops_.emplace_back(LoadAmplitudes{first, std::move(amps)});
    return *this;
  }

  // Terminal measurement; classical bit k receives qubits[k].
  Circuit& measure(std::vector<Qubit> qubits) {
    std::uint64_t seen = 0;
    for (Qubit q : qubits) {
      if (q >= n_qubits_) throw std::out_of_range("measure: qubit " + std::to_string(q) + " out of range");
      if (seen & (std::uint64_t{1} << q)) throw std::invalid_argument("measure: duplicate qubit");
      seen |= std::uint64_t{1} << q;
    }
    measured_ = std::move(qubits);
    return *this;
  }

  bool is_lowered() const {
    for (const auto& op : ops_) {
      if (std::holds_alternative<LoadAmplitudes>(op)) return false;
    }
    return true;
  }

  // Gates present now; pseudo-operations are not counted.
  std::size_t gate_count() const {
    std::size_t n = 0;
    for (const auto& op : ops_) n += std::holds_alternative<Gate>(op) ? 1 : 0;
    return n;
  }

  std::size_t count(GateKind kind) const {
    std::size_t n = 0;
    for (const auto& op : ops_) {
      if (const auto* g = std::get_if<Gate>(&op); g && g->kind == kind) ++n;
    }
    return n;
  }

private:
  std::size_t n_qubits_;
  std::vector<Operation> ops_;
  std::vector<Qubit> measured_;
};

// Replaces every load with its X/RY/CNOT preparation sequence.
inline Circuit lower(const Circuit& circuit) {
  Circuit out(circuit.n_qubits());
  for (const auto& op : circuit.operations()) {
    if (const auto* g = std::get_if<Gate>(&op)) {
      out.add(*g);
    } else {
      const auto& ld = std::get<LoadAmplitudes>(op);
      out.add(prepare_amplitudes(ld.amps, ld.first));
    }
  }
  out.measure(circuit.measured());
  return out;
}

// Runs the circuit from |0...0>. Loads are lowered on the fly after checking
// that their qubits are untouched.
inline StateVector simulate(const Circuit& circuit, unsigned threads = default_thread_count()) {
  StateVector state(circuit.n_qubits(), threads);
  for (const auto& op : circuit.operations()) {
    if (const auto* g = std::get_if<Gate>(&op)) {
      state.apply(*g);
      continue;
    }
    const auto& ld = std::get<LoadAmplitudes>(op);
    const std::uint64_t range_mask = ((std::uint64_t{1} << ld.amps.n_qubits()) - 1) << ld.first;
    if (state.active_mask() & range_mask) {
      std::vector<Qubit> qs;
      for (std::size_t k = 0; k < ld.amps.n_qubits(); ++k) qs.push_back(ld.first + k);
      if (std::abs(state.marginal_probabilities(qs)[0] - 1.0) > kNormTolerance) {
        throw std::logic_error("load: target qubits are not in |0...0>");
      }
    }
    for (const auto& gate : prepare_amplitudes(ld.amps, ld.first)) state.apply(gate);
  }
  return state;
}

}  // namespace belieffuse
