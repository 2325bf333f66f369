#pragma once

// OpenQASM 2.0 export of lowered circuits, and a parser for the same subset
// (x, ry, cx, ccx, measure) used to check exported files.

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "belieffuse/circuit.hpp"

namespace belieffuse {

class QasmError : public std::runtime_error {
public:
  QasmError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

namespace detail {

inline std::string format_angle(double theta) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", theta);
  return buf;
}

inline std::string qref(Qubit q) { return "q[" + std::to_string(q) + "]"; }

}  // namespace detail

// Serializes a lowered circuit. CRY, which has no qelib1 counterpart, is
// written as ry(t/2); cx; ry(-t/2); cx.
inline std::string export_qasm(const Circuit& circuit) {
  if (!circuit.is_lowered()) {
    throw std::invalid_argument("export_qasm: circuit still contains amplitude-load operations; lower it first");
  }
  std::ostringstream out;
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  out << "qreg q[" << circuit.n_qubits() << "];\n";
  out << "creg c[" << circuit.measured().size() << "];\n";
  using detail::qref;
  for (const auto& op : circuit.operations()) {
    const Gate& g = std::get<Gate>(op);
    switch (g.kind) {
      case GateKind::x:
        out << "x " << qref(g.qubits[0]) << ";\n";
        break;
      case GateKind::ry:
        out << "ry(" << detail::format_angle(g.angle) << ") " << qref(g.qubits[0]) << ";\n";
        break;
      case GateKind::cnot:
        out << "cx " << qref(g.qubits[0]) << "," << qref(g.qubits[1]) << ";\n";
        break;
      case GateKind::cry: {
        const Qubit c = g.qubits[0];
        const Qubit t = g.qubits[1];
        out << "ry(" << detail::format_angle(g.angle / 2.0) << ") " << qref(t) << ";\n";
        out << "cx " << qref(c) << "," << qref(t) << ";\n";
        out << "ry(" << detail::format_angle(-g.angle / 2.0) << ") " << qref(t) << ";\n";
        out << "cx " << qref(c) << "," << qref(t) << ";\n";
        break;
      }
      case GateKind::toffoli:
        out << "ccx " << qref(g.qubits[0]) << "," << qref(g.qubits[1]) << "," << qref(g.qubits[2])
            << ";\n";
        break;
    }
  }
  for (std::size_t k = 0; k < circuit.measured().size(); ++k) {
    out << "measure " << qref(circuit.measured()[k]) << " -> c[" << k << "];\n";
  }
  return out.str();
}

namespace detail {

class QasmLineParser {
public:
  QasmLineParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }

  std::string_view word() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected identifier");
    return s_.substr(start, pos_ - start);
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void expect(std::string_view token) {
    skip_ws();
    if (s_.substr(pos_, token.size()) != token) fail("expected '" + std::string(token) + "'");
    pos_ += token.size();
  }

  std::size_t integer() {
    skip_ws();
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc{}) fail("expected integer");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  double real() {
    skip_ws();
    const std::string rest(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("expected angle");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return v;
  }

  // name[index]
  std::size_t indexed(std::string_view name) {
    if (word() != name) fail("expected register '" + std::string(name) + "'");
    expect('[');
    const std::size_t i = integer();
    expect(']');
    return i;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw QasmError(line_, what + " at column " + std::to_string(pos_ + 1));
  }

private:
  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses the exporter's dialect back into a Circuit. Statements must be one
// per line; "//" comments and blank lines are ignored.
inline Circuit parse_qasm(std::string_view text) {
  std::optional<Circuit> circuit;
  std::optional<std::size_t> cbits;
  std::vector<std::optional<Qubit>> measured;
  bool header = false;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto c = line.find("//"); c != std::string_view::npos) line = line.substr(0, c);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    detail::QasmLineParser p(line, line_no);
    if (p.at_end()) continue;
    const std::string_view kw = p.word();

    if (!header) {
      if (kw != "OPENQASM") p.fail("expected 'OPENQASM 2.0;' header");
      p.expect("2.0");
      p.expect(';');
      header = true;
    } else if (kw == "include") {
      p.expect("\"qelib1.inc\"");
      p.expect(';');
    } else if (kw == "qreg") {
      if (circuit) p.fail("duplicate qreg");
      const std::size_t n = p.indexed("q");
      p.expect(';');
      circuit.emplace(n);
    } else if (kw == "creg") {
      if (cbits) p.fail("duplicate creg");
      cbits = p.indexed("c");
      p.expect(';');
      measured.assign(*cbits, std::nullopt);
    } else {
      if (!circuit) p.fail("gate before qreg declaration");
      try {
        if (kw == "x") {
          const Qubit t = p.indexed("q");
          p.expect(';');
          circuit->add(Gate::x(t));
        } else if (kw == "ry") {
          p.expect('(');
          const double theta = p.real();
          p.expect(')');
          const Qubit t = p.indexed("q");
          p.expect(';');
          circuit->add(Gate::ry(t, theta));
        } else if (kw == "cx") {
          const Qubit c = p.indexed("q");
          p.expect(',');
          const Qubit t = p.indexed("q");
          p.expect(';');
          circuit->add(Gate::cnot(c, t));
        } else if (kw == "ccx") {
          const Qubit c1 = p.indexed("q");
          p.expect(',');
          const Qubit c2 = p.indexed("q");
          p.expect(',');
          const Qubit t = p.indexed("q");
          p.expect(';');
          circuit->add(Gate::toffoli(c1, c2, t));
        } else if (kw == "measure") {
          const Qubit q = p.indexed("q");
          p.expect("->");
          const std::size_t c = p.indexed("c");
          p.expect(';');
          if (!cbits || c >= *cbits) p.fail("classical bit out of range");
          if (q >= circuit->n_qubits()) p.fail("qubit out of range");
          measured[c] = q;
        } else {
          p.fail("unsupported statement '" + std::string(kw) + "'");
        }
      } catch (const QasmError&) {
        throw;
      } catch (const std::exception& e) {
        throw QasmError(line_no, e.what());
      }
      if (!p.at_end()) p.fail("trailing characters");
      continue;
    }
    if (!p.at_end()) p.fail("trailing characters");
  }

  if (!header) throw QasmError(line_no, "missing OPENQASM header");
  if (!circuit) throw QasmError(line_no, "missing qreg declaration");
  std::vector<Qubit> order;
  for (std::size_t k = 0; k < measured.size(); ++k) {
    if (!measured[k]) throw QasmError(line_no, "classical bit c[" + std::to_string(k) + "] is never measured");
    order.push_back(*measured[k]);
  }
  circuit->measure(std::move(order));
  return std::move(*circuit);
}

}  // namespace belieffuse
