#pragma once

// Frames of discernment, subset codes, (complex) mass functions and the
// classical conjunctive combination rules used as oracles for the quantum
// pipelines.

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

namespace belieffuse {

using Complex = std::complex<double>;

inline constexpr double kMassTolerance = 1e-9;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class FrameMismatchError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Raised when the conflict coefficient makes the 1/(1-K) normalization
// undefined.
class TotalConflictError : public std::domain_error {
public:
  explicit TotalConflictError(const std::string& what, Complex conflict = {1.0, 0.0})
      : std::domain_error(what), conflict_(conflict) {}

  Complex conflict() const noexcept { return conflict_; }

private:
  Complex conflict_;
};

// ---------------------------------------------------------------------------
// SubsetCode
// ---------------------------------------------------------------------------

// Bit k is set iff the k-th frame element belongs to the subset. Zero is the
// empty set. Union and intersection are bitwise OR and AND.
struct SubsetCode {
  std::uint32_t bits = 0;

  constexpr SubsetCode() = default;
  constexpr explicit SubsetCode(std::uint32_t b) : bits(b) {}

  constexpr bool empty() const noexcept { return bits == 0; }
  constexpr int cardinality() const noexcept { return std::popcount(bits); }
  constexpr bool contains(std::size_t element) const noexcept {
    return ((bits >> element) & 1U) != 0;
  }

  friend constexpr SubsetCode operator&(SubsetCode a, SubsetCode b) noexcept {
    return SubsetCode{a.bits & b.bits};
  }
  friend constexpr SubsetCode operator|(SubsetCode a, SubsetCode b) noexcept {
    return SubsetCode{a.bits | b.bits};
  }
  friend constexpr auto operator<=>(SubsetCode, SubsetCode) = default;
};

// ---------------------------------------------------------------------------
// Frame
// ---------------------------------------------------------------------------

class Frame {
public:
  static constexpr std::size_t kMaxElements = 20;

  Frame() = default;

  explicit Frame(std::vector<std::string> elements) : elements_(std::move(elements)) {
    if (elements_.empty()) {
      throw std::invalid_argument("frame must contain at least one element");
    }
    if (elements_.size() > kMaxElements) {
      throw std::length_error("frame has " + std::to_string(elements_.size()) +
                              " elements; at most " + std::to_string(kMaxElements) +
                              " are supported");
    }
    for (std::size_t k = 0; k < elements_.size(); ++k) {
      const auto& name = elements_[k];
      if (name.empty()) {
        throw std::invalid_argument("frame element " + std::to_string(k) + " has an empty name");
      }
      if (!index_.emplace(name, k).second) {
        throw std::invalid_argument("duplicate frame element '" + name + "'");
      }
    }
  }

  Frame(std::initializer_list<std::string> elements)
      : Frame(std::vector<std::string>(elements)) {}

  std::size_t size() const noexcept { return elements_.size(); }
  const std::vector<std::string>& elements() const noexcept { return elements_; }
  const std::string& element(std::size_t k) const { return elements_.at(k); }

  // Number of subsets, 2^N.
  std::uint32_t power_set_size() const noexcept { return std::uint32_t{1} << size(); }
  SubsetCode full() const noexcept { return SubsetCode{power_set_size() - 1}; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  template <typename Range>
  SubsetCode encode(const Range& members) const {
    SubsetCode code;
    for (const auto& m : members) {
      auto k = index_of(m);
      if (!k) {
        throw FrameMismatchError("element '" + std::string(m) + "' is not in the frame");
      }
      code.bits |= std::uint32_t{1} << *k;
    }
    return code;
  }

  SubsetCode encode(std::initializer_list<std::string_view> members) const {
    return encode<std::initializer_list<std::string_view>>(members);
  }

  std::vector<std::string> decode(SubsetCode code) const {
    if (code.bits >= power_set_size()) {
      throw FrameMismatchError("subset code " + std::to_string(code.bits) +
                               " exceeds the frame's power set");
    }
    std::vector<std::string> out;
    for (std::size_t k = 0; k < size(); ++k) {
      if (code.contains(k)) out.push_back(elements_[k]);
    }
    return out;
  }

  // Comma-joined member names in frame order; the empty set prints as "{}".
  std::string label(SubsetCode code) const {
    auto names = decode(code);
    if (names.empty()) return "{}";
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) out += ',';
      out += names[i];
    }
    return out;
  }

  friend bool operator==(const Frame& a, const Frame& b) { return a.elements_ == b.elements_; }

private:
  std::vector<std::string> elements_;
  std::unordered_map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Mass functions
// ---------------------------------------------------------------------------

// A mass assignment over subsets of a frame. With T = double this is a BBA,
// with T = Complex a CBBA. Construction does not validate; see validate().
template <typename T>
class MassFunction {
public:
  using value_type = T;
  using map_type = std::map<SubsetCode, T>;

  MassFunction() = default;
  explicit MassFunction(Frame frame) : frame_(std::move(frame)) {}
  MassFunction(Frame frame, map_type masses)
      : frame_(std::move(frame)), masses_(std::move(masses)) {}

  // Convenience for literals: {{{"a"}, 0.6}, {{"a","b"}, 0.4}}.
  MassFunction(Frame frame,
               std::initializer_list<std::pair<std::vector<std::string>, T>> entries)
      : frame_(std::move(frame)) {
    for (const auto& [members, mass] : entries) {
      masses_[frame_.encode(members)] += mass;
    }
  }

  const Frame& frame() const noexcept { return frame_; }
  const map_type& masses() const noexcept { return masses_; }
  map_type& masses() noexcept { return masses_; }

  T operator[](SubsetCode code) const {
    auto it = masses_.find(code);
    return it == masses_.end() ? T{} : it->second;
  }

  void set(SubsetCode code, T mass) { masses_[code] = mass; }

  T total() const {
    T s{};
    for (const auto& [code, m] : masses_) s += m;
    return s;
  }

  // Dense view indexed by SubsetCode, length 2^N.
  std::vector<T> dense() const {
    std::vector<T> out(frame_.power_set_size(), T{});
    for (const auto& [code, m] : masses_) {
      if (code.bits < out.size()) out[code.bits] = m;
    }
    return out;
  }

  bool empty() const noexcept { return masses_.empty(); }

  friend bool operator==(const MassFunction& a, const MassFunction& b) {
    return a.frame_ == b.frame_ && a.masses_ == b.masses_;
  }

private:
  Frame frame_;
  map_type masses_;
};

using Bba = MassFunction<double>;
using Cbba = MassFunction<Complex>;

inline Cbba to_complex(const Bba& m) {
  Cbba out(m.frame());
  for (const auto& [code, v] : m.masses()) out.set(code, Complex{v, 0.0});
  return out;
}

inline bool is_real(const Cbba& m) {
  return std::all_of(m.masses().begin(), m.masses().end(),
                     [](const auto& kv) { return kv.second.imag() == 0.0; });
}

// Real parts of a CBBA whose imaginary parts are all zero.
inline Bba real_part(const Cbba& m) {
  Bba out(m.frame());
  for (const auto& [code, v] : m.masses()) out.set(code, v.real());
  return out;
}

inline Bba vacuous(const Frame& frame) {
  Bba out(frame);
  out.set(frame.full(), 1.0);
  return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  enum class Kind { sum_not_one, modulus_above_one, empty_set_key, key_out_of_range, negative_mass };

  Kind kind;
  SubsetCode code;  // offending key; zero for sum violations
  std::string message;
};

inline const char* to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::sum_not_one: return "sum-not-one";
    case Violation::Kind::modulus_above_one: return "modulus-above-one";
    case Violation::Kind::empty_set_key: return "empty-set-key";
    case Violation::Kind::key_out_of_range: return "key-out-of-range";
    case Violation::Kind::negative_mass: return "negative-mass";
  }
  return "unknown";
}

namespace detail {

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_complex(Complex v) {
  if (v.imag() == 0.0) return format_number(v.real());
  std::string out = format_number(v.real());
  out += v.imag() < 0 ? "-" : "+";
  out += format_number(std::abs(v.imag()));
  out += "i";
  return out;
}

}  // namespace detail

// Reports every violated CBBA axiom. An empty list means the input is valid.
inline std::vector<Violation> validate(const Cbba& m) {
  std::vector<Violation> out;
  const Frame& frame = m.frame();
  for (const auto& [code, v] : m.masses()) {
    if (code.bits >= frame.power_set_size()) {
      out.push_back({Violation::Kind::key_out_of_range, code,
                     "key " + std::to_string(code.bits) + " is outside the power set of a " +
                         std::to_string(frame.size()) + "-element frame"});
      continue;
    }
    if (code.empty()) {
      out.push_back({Violation::Kind::empty_set_key, code, "the empty set must carry no mass"});
    }
    const double modulus = std::abs(v);
    if (modulus > 1.0 + kMassTolerance) {
      out.push_back({Violation::Kind::modulus_above_one, code,
                     "|" + detail::format_complex(v) + "| = " + detail::format_number(modulus) +
                         " > 1 at " + frame.label(code)});
    }
  }
  const Complex sum = m.total();
  if (std::abs(sum.real() - 1.0) > kMassTolerance || std::abs(sum.imag()) > kMassTolerance) {
    out.push_back({Violation::Kind::sum_not_one, SubsetCode{},
                   "masses sum to " + detail::format_complex(sum) + ", expected 1"});
  }
  return out;
}

// BBA validation adds the non-negativity requirement.
inline std::vector<Violation> validate(const Bba& m) {
  auto out = validate(to_complex(m));
  for (const auto& [code, v] : m.masses()) {
    if (v < 0.0) {
      out.push_back({Violation::Kind::negative_mass, code,
                     "negative mass " + detail::format_number(v) + " at " +
                         (code.bits < m.frame().power_set_size() ? m.frame().label(code)
                                                                 : std::to_string(code.bits))});
    }
  }
  return out;
}

// Complex modulus of every mass.
inline std::map<SubsetCode, double> modulus_mass(const Cbba& m) {
  std::map<SubsetCode, double> out;
  for (const auto& [code, v] : m.masses()) out.emplace(code, std::abs(v));
  return out;
}

// The BBA m^(A) = |M(A)| / sum |M|. This is what the quantum pipelines fuse.
inline Bba modulus_normalized(const Cbba& m) {
  const auto moduli = modulus_mass(m);
  double total = 0.0;
  for (const auto& [code, v] : moduli) total += v;
  if (!(total > 0.0)) {
    throw std::invalid_argument("all masses are zero; modulus normalization undefined");
  }
  Bba out(m.frame());
  for (const auto& [code, v] : moduli) out.set(code, v / total);
  return out;
}

// ---------------------------------------------------------------------------
// Fusion results
// ---------------------------------------------------------------------------

enum class Backend { classical_drc, classical_cdrc, qadrc, qdrc };

inline const char* to_string(Backend b) {
  switch (b) {
    case Backend::classical_drc: return "classical-drc";
    case Backend::classical_cdrc: return "classical-cdrc";
    case Backend::qadrc: return "qadrc";
    case Backend::qdrc: return "qdrc";
  }
  return "unknown";
}

struct Mode {
  enum class Kind { exact, shots };

  Kind kind = Kind::exact;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;

  static Mode exact() { return {}; }
  static Mode sampled(std::uint64_t shots, std::uint64_t seed) {
    return {Kind::shots, shots, seed};
  }

  bool is_exact() const noexcept { return kind == Kind::exact; }
  friend bool operator==(const Mode&, const Mode&) = default;
};

template <typename T>
struct BasicFusionResult {
  MassFunction<T> combined;
  T conflict{};
  Backend backend = Backend::classical_drc;
  Mode mode;
};

using FusionResult = BasicFusionResult<double>;
using ComplexFusionResult = BasicFusionResult<Complex>;

// ---------------------------------------------------------------------------
// Classical combination
// ---------------------------------------------------------------------------

namespace detail {

inline bool value_less(double a, double b) { return a < b; }
inline bool value_less(Complex a, Complex b) {
  return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

// Sums terms in value order. The result depends only on the multiset of
// terms, so swapping the operands of a combination gives identical bits.
template <typename T>
T canonical_sum(std::vector<T>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const T& a, const T& b) { return value_less(a, b); });
  T s{};
  for (const auto& t : terms) s += t;
  return s;
}

inline void require_same_frame(const Frame& a, const Frame& b) {
  if (!(a == b)) throw FrameMismatchError("operands are defined over different frames");
}

// Conjunctive combination with Dempster normalization. The unnormalized
// masses of every non-empty intersection are kept even if tiny.
template <typename T>
BasicFusionResult<T> conjunctive_combine(const MassFunction<T>& m1, const MassFunction<T>& m2,
                                         Backend backend) {
  require_same_frame(m1.frame(), m2.frame());
  std::map<SubsetCode, std::vector<T>> terms;
  std::vector<T> conflict_terms;
  for (const auto& [b, mb] : m1.masses()) {
    for (const auto& [c, mc] : m2.masses()) {
      const SubsetCode a = b & c;
      const T product = mb * mc;
      if (a.empty()) {
        conflict_terms.push_back(product);
      } else {
        terms[a].push_back(product);
      }
    }
  }
  const T conflict = canonical_sum(conflict_terms);
  const T normalizer = T{1} - conflict;
  if constexpr (std::is_same_v<T, double>) {
    if (conflict >= 1.0 - kMassTolerance) {
      throw TotalConflictError("total conflict: K = " + format_number(conflict) +
                                   ", combination undefined",
                               Complex{conflict, 0.0});
    }
  } else {
    if (std::abs(normalizer) <= kMassTolerance) {
      throw TotalConflictError("total conflict: singular normalization, |1 - K| = " +
                                   format_number(std::abs(normalizer)) + " with K = " +
                                   format_complex(conflict),
                               conflict);
    }
  }
  MassFunction<T> combined(m1.frame());
  for (auto& [a, ts] : terms) combined.set(a, canonical_sum(ts) / normalizer);
  return {std::move(combined), conflict, backend, Mode::exact()};
}

}  // namespace detail

// Dempster's rule: m(A) = sum_{B&C=A} m1(B) m2(C) / (1 - K) for A != {}.
inline FusionResult combine_drc(const Bba& m1, const Bba& m2) {
  return detail::conjunctive_combine(m1, m2, Backend::classical_drc);
}

// Same rule with complex products and a complex conflict coefficient.
inline ComplexFusionResult combine_cdrc(const Cbba& m1, const Cbba& m2) {
  return detail::conjunctive_combine(m1, m2, Backend::classical_cdrc);
}

// Subset with the largest combined mass; ties go to the lowest code.
inline SubsetCode decide(const FusionResult& result) {
  const auto& masses = result.combined.masses();
  if (masses.empty()) throw std::invalid_argument("cannot decide on an empty result");
  auto best = masses.begin();
  for (auto it = masses.begin(); it != masses.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

}  // namespace belieffuse
