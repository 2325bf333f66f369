#pragma once

// Implementation of the belieffuse subcommands. Each command writes its
// report to `out`, diagnostics to `err`, and returns the process exit code.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "belieffuse/circuit.hpp"
#include "belieffuse/evidence.hpp"
#include "belieffuse/evidence_file.hpp"
#include "belieffuse/qasm.hpp"
#include "belieffuse/qdrc.hpp"
#include "belieffuse/random.hpp"

namespace belieffuse::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,          // usage, I/O, or a failed cross-check
  kParseError = 2,       // unreadable evidence file
  kValidationError = 3,  // evidence violates the mass-function axioms
  kTotalConflict = 4,    // K = 1, combination undefined
};

enum class BackendChoice { classical, cdrc, qadrc, qdrc };

inline std::optional<BackendChoice> parse_backend(const std::string& s) {
  if (s == "classical") return BackendChoice::classical;
  if (s == "cdrc") return BackendChoice::cdrc;
  if (s == "qadrc") return BackendChoice::qadrc;
  if (s == "qdrc") return BackendChoice::qdrc;
  return std::nullopt;
}

inline Backend to_backend(BackendChoice c) {
  switch (c) {
    case BackendChoice::classical: return Backend::classical_drc;
    case BackendChoice::cdrc: return Backend::classical_cdrc;
    case BackendChoice::qadrc: return Backend::qadrc;
    case BackendChoice::qdrc: return Backend::qdrc;
  }
  return Backend::qdrc;
}

// Real sources pass through; complex ones become |M(A)| / sum |M|, which is
// what the quantum pipelines fuse.
inline Bba as_bba(const Cbba& m) { return is_real(m) ? real_part(m) : modulus_normalized(m); }

// ---------------------------------------------------------------------------
// Left folds
// ---------------------------------------------------------------------------

struct Fold {
  FusionResult result;
  std::vector<double> step_conflicts;
  std::int64_t elapsed_ns = 0;
};

struct ComplexFold {
  ComplexFusionResult result;
  std::vector<Complex> step_conflicts;
  std::int64_t elapsed_ns = 0;
};

namespace detail {

inline std::int64_t since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count();
}

// Per-step sampling seeds; step 0 uses the master seed itself.
inline std::uint64_t step_seed(std::uint64_t seed, std::size_t step) {
  return seed + 0x9E3779B97F4A7C15ULL * step;
}

}  // namespace detail

// Pairwise left fold of the sources, in order, through one real-valued backend.
inline Fold fold_sources(const std::vector<Cbba>& sources, Backend backend, Mode mode, unsigned threads) {
  if (sources.size() < 2) throw std::invalid_argument("at least two sources are required");
  const auto t0 = std::chrono::steady_clock::now();
  Fold fold;
  if (backend == Backend::classical_drc) {
    Bba acc = as_bba(sources[0]);
    for (std::size_t i = 1; i < sources.size(); ++i) {
      fold.result = combine_drc(acc, as_bba(sources[i]));
      fold.step_conflicts.push_back(fold.result.conflict);
      acc = fold.result.combined;
    }
  } else {
    Cbba acc = sources[0];
    for (std::size_t i = 1; i < sources.size(); ++i) {
      Mode step_mode = mode;
      if (!mode.is_exact()) step_mode.seed = detail::step_seed(mode.seed, i - 1);
      fold.result = run_fusion(acc, sources[i], backend, step_mode, threads);
      fold.step_conflicts.push_back(fold.result.conflict);
      acc = to_complex(fold.result.combined);
    }
    fold.result.mode = mode;
  }
  fold.elapsed_ns = detail::since(t0);
  return fold;
}

inline ComplexFold fold_sources_cdrc(const std::vector<Cbba>& sources) {
  if (sources.size() < 2) throw std::invalid_argument("at least two sources are required");
  const auto t0 = std::chrono::steady_clock::now();
  ComplexFold fold;
  Cbba acc = sources[0];
  for (std::size_t i = 1; i < sources.size(); ++i) {
    fold.result = combine_cdrc(acc, sources[i]);
    fold.step_conflicts.push_back(fold.result.conflict);
    acc = fold.result.combined;
  }
  fold.elapsed_ns = detail::since(t0);
  return fold;
}

// ---------------------------------------------------------------------------
// Report formatting
// ---------------------------------------------------------------------------

inline constexpr double kCrossCheckTolerance = 1e-9;
// Masses at or below this are left out of printed tables.
inline constexpr double kDisplayFloor = 1e-12;

namespace detail {

inline std::string fixed6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v == 0.0 ? 0.0 : v);
  return buf;
}

inline std::string fixed6(Complex v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.6f%+.6fi", v.real() == 0.0 ? 0.0 : v.real(), v.imag() == 0.0 ? 0.0 : v.imag());
  return buf;
}

inline std::string sci(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.1e", v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

template <typename T>
void write_mass_table(std::ostream& os, const MassFunction<T>& m) {
  std::size_t width = 0;
  for (const auto& [code, v] : m.masses()) width = std::max(width, m.frame().label(code).size());
  for (const auto& [code, v] : m.masses()) {
    if (std::abs(v) <= kDisplayFloor) continue;
    os << "  " << pad(m.frame().label(code), width) << "  " << fixed6(v) << "\n";
  }
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline std::string mode_label(const Mode& mode) {
  if (mode.is_exact()) return "exact";
  return "shots (shots=" + std::to_string(mode.shots) + ", seed=" + std::to_string(mode.seed) + ")";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shared input handling
// ---------------------------------------------------------------------------

struct LoadedEvidence {
  std::optional<EvidenceFile> file;
  int exit_code = kOk;
};

// Reads, parses and validates an evidence file, reporting problems to `err`.
inline LoadedEvidence load_and_validate(const std::string& path, std::ostream& err,
                                        std::size_t min_sources = 2) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return {std::nullopt, kFailure};
  }
  EvidenceRead read;
  try {
    read = read_evidence(text);
  } catch (const EvidenceParseError& e) {
    err << "error: " << path << ": " << e.what() << "\n";
    return {std::nullopt, kParseError};
  }
  if (!read.key_findings.empty()) {
    for (const auto& f : read.key_findings) err << "error: " << path << ": " << f.to_string() << "\n";
    return {std::nullopt, kParseError};
  }
  const auto findings = validate_evidence(read.file);
  if (!findings.empty()) {
    for (const auto& f : findings) err << "invalid: " << f.to_string() << "\n";
    return {std::nullopt, kValidationError};
  }
  if (read.file.sources.size() < min_sources) {
    err << "invalid: " << path << " has " << read.file.sources.size() << " source(s); at least "
        << min_sources << " are required\n";
    return {std::nullopt, kValidationError};
  }
  return {std::move(read.file), kOk};
}

inline std::vector<Cbba> masses_of(const EvidenceFile& file) {
  std::vector<Cbba> out;
  for (const auto& s : file.sources) out.push_back(s.masses);
  return out;
}

// Writes to `path`, or to `out` when the path is empty.
inline bool emit(const std::string& text, const std::string& path, std::ostream& out, std::ostream& err) {
  if (path.empty()) {
    out << text;
    return true;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) {
    err << "error: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// combine
// ---------------------------------------------------------------------------

struct CombineOptions {
  std::string input;
  std::string backend = "qdrc";
  std::string mode = "exact";
  std::uint64_t shots = 1024;
  std::uint64_t seed = 0;
  std::string output;
  bool timings = false;
  unsigned threads = default_thread_count();
};

inline int cmd_combine(const CombineOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  const auto choice = parse_backend(opt.backend);
  if (!choice) {
    err << "error: unknown backend '" << opt.backend << "' (expected classical, cdrc, qadrc or qdrc)\n";
    return kFailure;
  }
  if (opt.mode != "exact" && opt.mode != "shots") {
    err << "error: unknown mode '" << opt.mode << "' (expected exact or shots)\n";
    return kFailure;
  }
  const bool quantum = *choice == BackendChoice::qadrc || *choice == BackendChoice::qdrc;
  if (opt.mode == "shots" && !quantum) {
    err << "error: shots mode applies only to the qadrc and qdrc backends\n";
    return kFailure;
  }
  if (opt.mode == "shots" && opt.shots == 0) {
    err << "error: --shots must be at least 1\n";
    return kFailure;
  }
  const Mode mode = opt.mode == "exact" ? Mode::exact() : Mode::sampled(opt.shots, opt.seed);

  auto loaded = load_and_validate(opt.input, err);
  if (!loaded.file) return loaded.exit_code;
  const EvidenceFile& file = *loaded.file;
  const auto sources = masses_of(file);
  const bool complex_input = std::any_of(sources.begin(), sources.end(), [](const Cbba& m) { return !is_real(m); });
  const Backend backend = to_backend(*choice);

  std::ostringstream report;
  report << "belieffuse combine report\n";
  report << "frame: ";
  for (std::size_t k = 0; k < file.frame.size(); ++k) report << (k ? ", " : "") << file.frame.element(k);
  report << "\nsources:";
  for (const auto& s : file.sources) report << " " << s.name;
  report << "\nbackend: " << to_string(backend) << "\n";
  report << "mode: " << detail::mode_label(mode) << "\n";
  report << "input: " << (complex_input ? "complex (quantum and classical-drc paths fuse modulus-normalized masses)" : "real")
         << "\n\n";

  std::vector<std::pair<std::string, std::int64_t>> timings;
  std::optional<Fold> primary;
  std::optional<ComplexFold> primary_complex;
  try {
    if (backend == Backend::classical_cdrc) {
      primary_complex = fold_sources_cdrc(sources);
      timings.emplace_back(to_string(backend), primary_complex->elapsed_ns);
    } else {
      primary = fold_sources(sources, backend, mode, opt.threads);
      timings.emplace_back(to_string(backend), primary->elapsed_ns);
    }
  } catch (const TotalConflictError& e) {
    err << "error: " << e.what() << "\n";
    return kTotalConflict;
  }

  report << "steps:\n";
  for (std::size_t i = 1; i < sources.size(); ++i) {
    const std::string lhs = i == 1 ? file.sources[0].name : "(" + std::to_string(i - 1) + ")";
    report << "  (" << i << ") " << lhs << " + " << file.sources[i].name << "  K = "
           << (primary ? detail::fixed6(primary->step_conflicts[i - 1])
                       : detail::fixed6(primary_complex->step_conflicts[i - 1]))
           << "\n";
  }
  report << "\ncombined masses:\n";
  SubsetCode decision;
  if (primary) {
    detail::write_mass_table(report, primary->result.combined);
    decision = decide(primary->result);
  } else {
    detail::write_mass_table(report, primary_complex->result.combined);
    decision = decide(FusionResult{modulus_normalized(primary_complex->result.combined), 0.0,
                                   Backend::classical_cdrc, Mode::exact()});
  }
  report << "decision: " << file.frame.label(decision)
         << (primary_complex ? " (largest modulus)" : "") << "\n";

  // Every exact real-valued path must agree with the classical rule.
  bool cross_check_ok = true;
  report << "\ncross-check (exact, tolerance " << detail::sci(kCrossCheckTolerance) << "):\n";
  std::optional<Fold> reference;
  try {
    reference = fold_sources(sources, Backend::classical_drc, Mode::exact(), opt.threads);
  } catch (const TotalConflictError&) {
    report << "  classical-drc  total conflict\n";
    cross_check_ok = false;
  }
  if (reference) {
    const auto ref_dense = reference->result.combined.dense();
    report << "  " << detail::pad("classical-drc", 14) << "  K = " << detail::fixed6(reference->result.conflict)
           << "  reference\n";
    timings.emplace_back("classical-drc (exact)", reference->elapsed_ns);
    for (Backend b : {Backend::qadrc, Backend::qdrc}) {
      std::string status;
      try {
        const Fold f = fold_sources(sources, b, Mode::exact(), opt.threads);
        double worst = detail::max_abs_diff(f.result.combined.dense(), ref_dense);
        for (std::size_t i = 0; i < f.step_conflicts.size(); ++i) {
          worst = std::max(worst, std::abs(f.step_conflicts[i] - reference->step_conflicts[i]));
        }
        const bool ok = worst <= kCrossCheckTolerance;
        cross_check_ok = cross_check_ok && ok;
        report << "  " << detail::pad(to_string(b), 14) << "  K = " << detail::fixed6(f.result.conflict)
               << "  max|delta| = " << detail::sci(worst) << "  " << (ok ? "PASS" : "FAIL") << "\n";
        timings.emplace_back(std::string(to_string(b)) + " (exact)", f.elapsed_ns);
      } catch (const std::exception& e) {
        cross_check_ok = false;
        report << "  " << detail::pad(to_string(b), 14) << "  error: " << e.what() << "  FAIL\n";
      }
    }
    if (primary && !mode.is_exact()) {
      report << "  sampled " << to_string(backend) << " vs reference: max|delta| = "
             << detail::sci(detail::max_abs_diff(primary->result.combined.dense(), ref_dense))
             << " (sampling error, not checked)\n";
    }
    report << "cross-check: " << (cross_check_ok ? "PASS" : "FAIL") << "\n";

    if (complex_input) {
      report << "\nclassical CDRC on the complex masses:\n";
      try {
        const ComplexFold cf = primary_complex ? *primary_complex : fold_sources_cdrc(sources);
        report << "  K = " << detail::fixed6(cf.result.conflict) << "\n";
        detail::write_mass_table(report, cf.result.combined);
        const auto c_dense = cf.result.combined.dense();
        double gap = 0.0;
        for (std::size_t i = 0; i < c_dense.size(); ++i) gap = std::max(gap, std::abs(c_dense[i] - ref_dense[i]));
        report << "  discrepancy max|CDRC - modulus fusion| = " << detail::fixed6(gap) << " (unbounded)\n";
      } catch (const TotalConflictError& e) {
        report << "  undefined: " << e.what() << "\n";
      }
    }
  }

  if (opt.timings) {
    report << "\ntimings (wall clock):\n";
    for (const auto& [name, ns] : timings) report << "  " << detail::pad(name, 22) << "  " << ns << " ns\n";
  }

  if (!emit(report.str(), opt.output, out, err)) return kFailure;
  return cross_check_ok ? kOk : kFailure;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

inline int cmd_validate(const std::string& input, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::string text;
  try {
    text = read_text_file(input);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  EvidenceRead read;
  try {
    read = read_evidence(text);
  } catch (const EvidenceParseError& e) {
    out << "error: " << e.what() << "\n";
    return kParseError;
  }
  std::vector<Finding> findings = read.key_findings;
  for (auto& f : validate_evidence(read.file)) findings.push_back(std::move(f));
  if (read.file.sources.size() < 2) {
    findings.push_back({"*", "", "only " + std::to_string(read.file.sources.size()) +
                                     " source(s); combining needs at least 2"});
  }
  if (findings.empty()) {
    out << "OK\n";
    return kOk;
  }
  for (const auto& f : findings) out << f.to_string() << "\n";
  return kValidationError;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchOptions {
  std::size_t n_min = 1;
  std::size_t n_max = 4;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  std::string output;
  unsigned threads = default_thread_count();
};

struct BenchRow {
  std::size_t n = 0;
  Backend backend = Backend::classical_drc;
  double mean_ns = 0.0;
  double gate_count = 0.0;
  std::size_t qubit_count = 0;
};

inline constexpr std::size_t kMaxBenchFrame = 8;

// Times the classical rule and both quantum pipelines (exact mode, circuit
// construction and simulation included) on random dense BBA pairs.
inline std::vector<BenchRow> run_bench(const BenchOptions& opt) {
  if (opt.n_min < 1 || opt.n_min > opt.n_max || opt.n_max > kMaxBenchFrame) {
    throw std::invalid_argument("bench requires 1 <= n-min <= n-max <= " + std::to_string(kMaxBenchFrame));
  }
  if (opt.trials == 0) throw std::invalid_argument("bench requires at least one trial");
  std::vector<BenchRow> rows;
  for (std::size_t n = opt.n_min; n <= opt.n_max; ++n) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < n; ++k) names.push_back("h" + std::to_string(k));
    const Frame frame(names);
    std::vector<std::pair<Bba, Bba>> pairs;
    for (std::size_t t = 0; t < opt.trials; ++t) {
      std::seed_seq seq{opt.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)};
      std::mt19937_64 rng(seq);
      Bba a = random_bba(frame, rng);
      Bba b = random_bba(frame, rng);
      pairs.emplace_back(std::move(a), std::move(b));
    }
    for (Backend backend : {Backend::classical_drc, Backend::qadrc, Backend::qdrc}) {
      BenchRow row{n, backend, 0.0, 0.0, 0};
      double total_ns = 0.0;
      for (const auto& [a, b] : pairs) {
        const auto t0 = std::chrono::steady_clock::now();
        if (backend == Backend::classical_drc) {
          (void)combine_drc(a, b);
        } else {
          (void)run_fusion(a, b, backend, Mode::exact(), opt.threads);
        }
        total_ns += static_cast<double>(detail::since(t0));
        if (backend != Backend::classical_drc) {
          const auto p1 = p_transform(a);
          const auto p2 = p_transform(b);
          const Circuit c = lower(backend == Backend::qdrc ? build_qdrc_circuit(p1, p2) : build_qadrc_circuit(p1, p2));
          row.gate_count += static_cast<double>(c.gate_count());
          row.qubit_count = c.n_qubits();
        }
      }
      row.mean_ns = total_ns / static_cast<double>(pairs.size());
      row.gate_count /= static_cast<double>(pairs.size());
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "N,backend,mean_ns,gate_count,qubit_count\n";
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu,%s,%.0f,%g,%zu\n", r.n, to_string(r.backend), r.mean_ns, r.gate_count,
                  r.qubit_count);
    os << buf;
  }
  return os.str();
}

inline int cmd_bench(const BenchOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<BenchRow> rows;
  try {
    rows = run_bench(opt);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return emit(bench_csv(rows), opt.output, out, err) ? kOk : kFailure;
}

// ---------------------------------------------------------------------------
// export-qasm
// ---------------------------------------------------------------------------

struct ExportOptions {
  std::string input;
  std::string backend = "qdrc";
  std::string output;
  unsigned threads = default_thread_count();
};

inline int cmd_export_qasm(const ExportOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  const auto choice = parse_backend(opt.backend);
  if (!choice || (*choice != BackendChoice::qadrc && *choice != BackendChoice::qdrc)) {
    err << "error: export-qasm supports the qadrc and qdrc backends, not '" << opt.backend << "'\n";
    return kFailure;
  }
  auto loaded = load_and_validate(opt.input, err);
  if (!loaded.file) return loaded.exit_code;
  const EvidenceFile& file = *loaded.file;
  if (file.sources.size() != 2) {
    err << "invalid: QASM export is pairwise; " << opt.input << " has " << file.sources.size() << " sources\n";
    return kValidationError;
  }
  const auto p1 = p_transform(file.sources[0].masses);
  const auto p2 = p_transform(file.sources[1].masses);
  const Circuit circuit = lower(*choice == BackendChoice::qdrc ? build_qdrc_circuit(p1, p2) : build_qadrc_circuit(p1, p2));
  const std::string text = export_qasm(circuit);

  // The written text must reproduce the in-memory distribution.
  double worst = 0.0;
  try {
    const Circuit reparsed = parse_qasm(text);
    const auto expected = simulate(circuit, opt.threads).marginal_probabilities(circuit.measured());
    const auto actual = simulate(reparsed, opt.threads).marginal_probabilities(reparsed.measured());
    worst = actual.size() == expected.size() ? detail::max_abs_diff(actual, expected) : INFINITY;
  } catch (const std::exception& e) {
    err << "error: exported QASM does not re-parse: " << e.what() << "\n";
    return kFailure;
  }
  if (!(worst <= kCrossCheckTolerance)) {
    err << "error: exported QASM round trip deviates by " << detail::sci(worst) << "\n";
    return kFailure;
  }
  if (!emit(text, opt.output, out, err)) return kFailure;
  if (!opt.output.empty()) {
    out << "wrote " << opt.output << ": " << circuit.n_qubits() << " qubits, " << circuit.gate_count() << " gates ("
        << circuit.count(GateKind::toffoli) << " ccx), round trip max|dp| = " << detail::sci(worst) << "\n";
  }
  return kOk;
}

}  // namespace belieffuse::cli
