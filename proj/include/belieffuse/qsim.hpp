#pragma once

// Dense state-vector simulator for the gate set X, RY, CNOT, CRY, Toffoli.
//
// Qubit k is bit k of the basis index (little-endian), the same convention as
// SubsetCode. The state tracks which qubits may have left |0>; kernels only
// sweep the subspace spanned by those qubits, and controlled gates whose
// control has never been touched are skipped. Both are exact shortcuts.

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace belieffuse {

using Qubit = std::size_t;
using Amplitude = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 24;

// ---------------------------------------------------------------------------
// Threading
// ---------------------------------------------------------------------------

// Worker count from BELIEFFUSE_THREADS (0 or unset = hardware concurrency).
inline unsigned default_thread_count() {
  unsigned requested = 0;
  if (const char* env = std::getenv("BELIEFFUSE_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env) requested = static_cast<unsigned>(std::min<unsigned long>(v, 1024));
  }
  if (requested == 0) requested = std::max(1U, std::thread::hardware_concurrency());
  return requested;
}

namespace detail {

// Runs body(chunk) for chunk in [0, chunks). Chunks are independent, so the
// outcome never depends on the worker count.
template <typename Body>
void parallel_chunks(std::size_t chunks, unsigned threads, Body&& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) body(c);
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
}

// Chunk size for parallel sweeps. Fixed so that reductions combine partial
// results in the same order for any thread count.
inline constexpr std::size_t kChunk = std::size_t{1} << 14;

// Deposits the bits of `compact` into the positions set in `mask` (pdep).
inline std::uint64_t deposit_bits(std::uint64_t compact, std::uint64_t mask) {
  std::uint64_t out = 0;
  for (std::uint64_t bit = 1; mask != 0; bit <<= 1) {
    const std::uint64_t lowest = mask & (~mask + 1);
    if (compact & bit) out |= lowest;
    mask &= mask - 1;
  }
  return out;
}

// Next larger integer whose set bits lie within `mask`.
inline std::uint64_t next_in_mask(std::uint64_t current, std::uint64_t mask) {
  return ((current | ~mask) + 1) & mask;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gates
// ---------------------------------------------------------------------------

enum class GateKind { x, ry, cnot, cry, toffoli };

inline const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::x: return "x";
    case GateKind::ry: return "ry";
    case GateKind::cnot: return "cnot";
    case GateKind::cry: return "cry";
    case GateKind::toffoli: return "toffoli";
  }
  return "?";
}

// A gate from the supported set. `qubits` lists controls first, target last.
struct Gate {
  GateKind kind = GateKind::x;
  std::array<Qubit, 3> qubits{};
  double angle = 0.0;

  static Gate x(Qubit target) { return {GateKind::x, {target, 0, 0}, 0.0}; }
  static Gate ry(Qubit target, double theta) { return {GateKind::ry, {target, 0, 0}, theta}; }
  static Gate cnot(Qubit control, Qubit target) {
    return {GateKind::cnot, {control, target, 0}, 0.0};
  }
  static Gate cry(Qubit control, Qubit target, double theta) {
    return {GateKind::cry, {control, target, 0}, theta};
  }
  static Gate toffoli(Qubit control1, Qubit control2, Qubit target) {
    return {GateKind::toffoli, {control1, control2, target}, 0.0};
  }

  std::size_t arity() const noexcept {
    switch (kind) {
      case GateKind::x:
      case GateKind::ry: return 1;
      case GateKind::cnot:
      case GateKind::cry: return 2;
      case GateKind::toffoli: return 3;
    }
    return 0;
  }

  Qubit target() const noexcept { return qubits[arity() - 1]; }

  std::vector<Qubit> controls() const {
    return {qubits.begin(), qubits.begin() + static_cast<std::ptrdiff_t>(arity() - 1)};
  }

  friend bool operator==(const Gate& a, const Gate& b) {
    if (a.kind != b.kind || a.angle != b.angle) return false;
    return std::equal(a.qubits.begin(), a.qubits.begin() + a.arity(), b.qubits.begin());
  }
};

inline void check_gate(const Gate& g, std::size_t n_qubits) {
  const std::size_t n = g.arity();
  for (std::size_t i = 0; i < n; ++i) {
    if (g.qubits[i] >= n_qubits) {
      throw std::out_of_range(std::string(to_string(g.kind)) + ": qubit " +
                              std::to_string(g.qubits[i]) + " out of range for " +
                              std::to_string(n_qubits) + " qubits");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (g.qubits[i] == g.qubits[j]) {
        throw std::invalid_argument(std::string(to_string(g.kind)) + ": duplicate qubit " +
                                    std::to_string(g.qubits[i]));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

class StateVector {
public:
  // |0...0> on n qubits.
  explicit StateVector(std::size_t n_qubits, unsigned threads = default_thread_count())
      : n_qubits_(n_qubits), threads_(std::max(1U, threads)) {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
      throw std::length_error("qubit count " + std::to_string(n_qubits) +
                              " outside the supported range [1, " + std::to_string(kMaxQubits) +
                              "]");
    }
    amps_.assign(std::size_t{1} << n_qubits, Amplitude{});
    amps_[0] = 1.0;
  }

  static StateVector basis(std::size_t n_qubits, std::uint64_t index,
                           unsigned threads = default_thread_count()) {
    StateVector s(n_qubits, threads);
    if (index >= s.amps_.size()) throw std::out_of_range("basis index out of range");
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    s.active_ = index;
    return s;
  }

  static StateVector from_amplitudes(std::vector<Amplitude> amps,
                                     unsigned threads = default_thread_count()) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < amps.size()) ++n;
    if ((std::size_t{1} << n) != amps.size() || n == 0) {
      throw std::invalid_argument("amplitude count must be a power of two >= 2");
    }
    StateVector s(n, threads);
    s.amps_ = std::move(amps);
    s.active_ = (std::uint64_t{1} << n) - 1;
    return s;
  }

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  const std::vector<Amplitude>& amplitudes() const noexcept { return amps_; }
  Amplitude operator[](std::size_t i) const { return amps_.at(i); }
  unsigned threads() const noexcept { return threads_; }
  void set_threads(unsigned t) noexcept { threads_ = std::max(1U, t); }

  // Qubits that may be in a state other than |0>.
  std::uint64_t active_mask() const noexcept { return active_; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  void apply(const Gate& g) {
    check_gate(g, n_qubits_);
    std::uint64_t control_mask = 0;
    for (std::size_t i = 0; i + 1 < g.arity(); ++i) control_mask |= std::uint64_t{1} << g.qubits[i];
    // A control that never left |0> makes the gate the identity.
    if ((control_mask & active_) != control_mask) return;

    const std::uint64_t target_bit = std::uint64_t{1} << g.target();
    switch (g.kind) {
      case GateKind::x:
      case GateKind::cnot:
      case GateKind::toffoli:
        sweep_pairs(control_mask, target_bit, [](Amplitude& a0, Amplitude& a1) { std::swap(a0, a1); });
        break;
      case GateKind::ry:
      case GateKind::cry: {
        const double c = std::cos(g.angle / 2.0);
        const double s = std::sin(g.angle / 2.0);
        sweep_pairs(control_mask, target_bit, [c, s](Amplitude& a0, Amplitude& a1) {
          const Amplitude lo = a0;
          const Amplitude hi = a1;
          a0 = c * lo - s * hi;
          a1 = s * lo + c * hi;
        });
        break;
      }
    }
    active_ |= target_bit;
  }

  // Probability of each assignment of `qubits`; entry j has bit i equal to
  // the value of qubits[i]. Qubits not listed are summed out.
  std::vector<double> marginal_probabilities(const std::vector<Qubit>& qubits) const {
    std::uint64_t listed = 0;
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      if (qubits[i] >= n_qubits_) {
        throw std::out_of_range("marginal: qubit " + std::to_string(qubits[i]) + " out of range");
      }
      const std::uint64_t bit = std::uint64_t{1} << qubits[i];
      if (listed & bit) {
        throw std::invalid_argument("marginal: duplicate qubit " + std::to_string(qubits[i]));
      }
      listed |= bit;
    }
    if (qubits.size() > kMaxQubits) throw std::length_error("marginal: too many qubits");

    const std::size_t outcomes = std::size_t{1} << qubits.size();
    const std::uint64_t space = active_;
    const std::size_t subspace = std::size_t{1} << std::popcount(space);
    const std::size_t chunks = (subspace + detail::kChunk - 1) / detail::kChunk;

    auto outcome_of = [&](std::uint64_t index) {
      std::size_t j = 0;
      for (std::size_t i = 0; i < qubits.size(); ++i) {
        j |= ((index >> qubits[i]) & 1U) << i;
      }
      return j;
    };

    std::vector<std::vector<double>> partial(chunks);
    detail::parallel_chunks(chunks, threads_, [&](std::size_t c) {
      std::vector<double> acc(outcomes, 0.0);
      const std::size_t begin = c * detail::kChunk;
      const std::size_t end = std::min(subspace, begin + detail::kChunk);
      std::uint64_t index = detail::deposit_bits(begin, space);
      for (std::size_t k = begin; k < end; ++k) {
        acc[outcome_of(index)] += std::norm(amps_[index]);
        index = detail::next_in_mask(index, space);
      }
      partial[c] = std::move(acc);
    });

    std::vector<double> probs(outcomes, 0.0);
    for (const auto& acc : partial) {
      for (std::size_t j = 0; j < outcomes; ++j) probs[j] += acc[j];
    }
    return probs;
  }

private:
  // Visits every amplitude pair (index with target 0, index with target 1)
  // whose control bits are all set, restricted to the active subspace.
  template <typename Kernel>
  void sweep_pairs(std::uint64_t control_mask, std::uint64_t target_bit, Kernel kernel) {
    const std::uint64_t free = (active_ | target_bit) & ~target_bit & ~control_mask;
    const std::size_t pairs = std::size_t{1} << std::popcount(free);
    const std::size_t chunks = (pairs + detail::kChunk - 1) / detail::kChunk;
    detail::parallel_chunks(chunks, threads_, [&](std::size_t c) {
      const std::size_t begin = c * detail::kChunk;
      const std::size_t end = std::min(pairs, begin + detail::kChunk);
      std::uint64_t sub = detail::deposit_bits(begin, free);
      for (std::size_t k = begin; k < end; ++k) {
        const std::uint64_t i0 = sub | control_mask;
        kernel(amps_[i0], amps_[i0 | target_bit]);
        sub = detail::next_in_mask(sub, free);
      }
    });
  }

  std::size_t n_qubits_;
  unsigned threads_;
  std::vector<Amplitude> amps_;
  std::uint64_t active_ = 0;
};

inline StateVector init_state(std::size_t n_qubits, unsigned threads = default_thread_count()) {
  return StateVector(n_qubits, threads);
}

inline StateVector apply_gate(StateVector state, const Gate& gate) {
  state.apply(gate);
  return state;
}

inline std::vector<double> marginal_probabilities(const StateVector& state,
                                                  const std::vector<Qubit>& qubits) {
  return state.marginal_probabilities(qubits);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

// Multinomial draw of `shots` outcomes from `probs`, by sequential binomial
// splitting. Deterministic for a given (probs, shots, seed).
inline std::vector<std::uint64_t> sample_distribution(const std::vector<double>& probs,
                                                      std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("sample: shots must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> counts(probs.size(), 0);
  double remaining_mass = 0.0;
  for (double p : probs) remaining_mass += std::max(0.0, p);
  std::uint64_t remaining = shots;
  for (std::size_t j = 0; j < probs.size() && remaining > 0; ++j) {
    const double p = std::max(0.0, probs[j]);
    if (p <= 0.0) continue;
    const double q = remaining_mass > 0.0 ? std::min(1.0, p / remaining_mass) : 1.0;
    std::uint64_t draw = remaining;
    if (q < 1.0) {
      std::binomial_distribution<std::uint64_t> binom(remaining, q);
      draw = binom(rng);
    }
    counts[j] = draw;
    remaining -= draw;
    remaining_mass -= p;
  }
  // Rounding can leave a few shots unassigned; they go to the last supported outcome.
  if (remaining > 0) {
    for (std::size_t j = probs.size(); j-- > 0;) {
      if (probs[j] > 0.0) {
        counts[j] += remaining;
        break;
      }
    }
  }
  return counts;
}

inline std::vector<std::uint64_t> sample(const StateVector& state, const std::vector<Qubit>& qubits,
                                         std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("sample: shots must be at least 1");
  return sample_distribution(state.marginal_probabilities(qubits), shots, seed);
}

}  // namespace belieffuse
