#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "belieffuse/cli.hpp"
#include "test_support.hpp"

using namespace belieffuse;
using namespace belieffuse::cli;

namespace {

const std::string kCorpus = BELIEFFUSE_CORPUS_DIR;

std::string corpus(const std::string& name) { return kCorpus + "/" + name; }

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run combine(CombineOptions opt) {
  std::ostringstream out, err;
  opt.threads = 1;
  const int code = cmd_combine(opt, out, err);
  return {code, out.str(), err.str()};
}

Run combine(const std::string& file, const std::string& backend = "qdrc") {
  CombineOptions opt;
  opt.input = corpus(file);
  opt.backend = backend;
  return combine(opt);
}

Run validate_file(const std::string& file) {
  std::ostringstream out, err;
  const int code = cmd_validate(corpus(file), out, err);
  return {code, out.str(), err.str()};
}

Run export_file(const std::string& file, const std::string& backend, const std::string& output) {
  std::ostringstream out, err;
  ExportOptions opt{corpus(file), backend, output, 1};
  const int code = cmd_export_qasm(opt, out, err);
  return {code, out.str(), err.str()};
}

std::string section(const std::string& report, const std::string& from, const std::string& to) {
  const auto a = report.find(from);
  const auto b = report.find(to, a);
  return a == std::string::npos ? std::string() : report.substr(a, b - a);
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(CliCombine, WorkedPairOnQdrc) {
  const auto r = combine("worked_pair.json");
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("  a    0.756098\n"), std::string::npos);
  EXPECT_NE(r.out.find("  b    0.146341\n"), std::string::npos);
  EXPECT_NE(r.out.find("  a,b  0.097561\n"), std::string::npos);
  EXPECT_NE(r.out.find("decision: a\n"), std::string::npos);
  EXPECT_NE(r.out.find("cross-check: PASS"), std::string::npos);
  EXPECT_EQ(r.out.find("timings"), std::string::npos);
}

TEST(CliCombine, ClassicalAndQuantumMassTablesAreIdentical) {
  for (const char* file : {"worked_pair.json", "three_sources.json", "complex_pair.json"}) {
    const auto classical = combine(file, "classical");
    ASSERT_EQ(classical.code, kOk);
    const std::string table = section(classical.out, "combined masses:", "cross-check");
    EXPECT_FALSE(table.empty());
    for (const char* backend : {"qadrc", "qdrc"}) {
      const auto quantum = combine(file, backend);
      ASSERT_EQ(quantum.code, kOk);
      EXPECT_EQ(section(quantum.out, "combined masses:", "cross-check"), table) << file << " " << backend;
    }
  }
}

TEST(CliCombine, ReportIsDeterministic) {
  CombineOptions opt;
  opt.input = corpus("three_sources.json");
  opt.mode = "shots";
  opt.shots = 2000;
  opt.seed = 17;
  const auto a = combine(opt);
  const auto b = combine(opt);
  ASSERT_EQ(a.code, kOk);
  EXPECT_EQ(a.out, b.out);
  opt.seed = 18;
  EXPECT_NE(combine(opt).out, a.out);
}

TEST(CliCombine, ComplexInputShowsBothResults) {
  const auto r = combine("complex_pair.json");
  ASSERT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("input: complex"), std::string::npos);
  EXPECT_NE(r.out.find("classical CDRC on the complex masses:"), std::string::npos);
  EXPECT_NE(r.out.find("a  0.800000+0.400000i"), std::string::npos);
  EXPECT_NE(r.out.find("(unbounded)"), std::string::npos);

  const auto cdrc = combine("complex_pair.json", "cdrc");
  ASSERT_EQ(cdrc.code, kOk);
  EXPECT_NE(cdrc.out.find("decision: a (largest modulus)"), std::string::npos);
}

TEST(CliCombine, VacuousSourcesInterleavedLeaveResultUnchanged) {
  EvidenceFile plain = parse_evidence(read_text_file(corpus("three_sources.json")));
  EvidenceFile padded = parse_evidence(read_text_file(corpus("three_sources_vacuous.json")));
  for (Backend b : {Backend::classical_drc, Backend::qadrc, Backend::qdrc}) {
    const auto x = fold_sources(masses_of(plain), b, Mode::exact(), 1);
    const auto y = fold_sources(masses_of(padded), b, Mode::exact(), 1);
    EXPECT_LE(belieffuse::testing::max_abs_diff(x.result.combined.dense(), y.result.combined.dense()), 1e-9);
  }
}

TEST(CliCombine, ExitCodesFromCorpus) {
  EXPECT_EQ(combine("worked_pair.json").code, kOk);
  EXPECT_EQ(combine("missing.json").code, kFailure);
  EXPECT_EQ(combine("malformed.json").code, kParseError);
  EXPECT_EQ(combine("unknown_element.json").code, kParseError);
  EXPECT_EQ(combine("sum_over_one.json").code, kValidationError);
  EXPECT_EQ(combine("single_source.json").code, kValidationError);
  for (const char* backend : {"classical", "cdrc", "qadrc", "qdrc"}) {
    const auto r = combine("total_conflict.json", backend);
    EXPECT_EQ(r.code, kTotalConflict) << backend;
    EXPECT_NE(r.err.find("total conflict"), std::string::npos);
  }
}

TEST(CliCombine, WrongKeyOrderReportsPosition) {
  const auto r = combine("wrong_key_order.json");
  EXPECT_EQ(r.code, kParseError);
  EXPECT_NE(r.err.find("key \"b,a\""), std::string::npos);
  EXPECT_NE(r.err.find("character 3"), std::string::npos);
}

TEST(CliCombine, OptionErrors) {
  CombineOptions opt;
  opt.input = corpus("worked_pair.json");
  opt.backend = "fourier";
  EXPECT_EQ(combine(opt).code, kFailure);
  opt.backend = "classical";
  opt.mode = "shots";
  EXPECT_EQ(combine(opt).code, kFailure);
  opt.backend = "qdrc";
  opt.shots = 0;
  EXPECT_EQ(combine(opt).code, kFailure);
  opt.mode = "approximate";
  EXPECT_EQ(combine(opt).code, kFailure);
}

TEST(CliCombine, TimingsOnRequestAndFileOutput) {
  CombineOptions opt;
  opt.input = corpus("worked_pair.json");
  opt.timings = true;
  opt.output = ::testing::TempDir() + "belieffuse_report.txt";
  const auto r = combine(opt);
  ASSERT_EQ(r.code, kOk);
  EXPECT_TRUE(r.out.empty());
  const std::string text = read_text_file(opt.output);
  EXPECT_NE(text.find("timings (wall clock):"), std::string::npos);
  EXPECT_NE(text.find(" ns\n"), std::string::npos);
}

TEST(CliValidate, Findings) {
  const auto ok = validate_file("worked_pair.json");
  EXPECT_EQ(ok.code, kOk);
  EXPECT_EQ(ok.out, "OK\n");

  const auto sum = validate_file("sum_over_one.json");
  EXPECT_EQ(sum.code, kValidationError);
  EXPECT_NE(sum.out.find("source 'overconfident'"), std::string::npos);
  EXPECT_NE(sum.out.find("1.1"), std::string::npos);

  const auto unknown = validate_file("unknown_element.json");
  EXPECT_EQ(unknown.code, kValidationError);
  EXPECT_NE(unknown.out.find("key \"a,z\""), std::string::npos);
  EXPECT_NE(unknown.out.find("unknown element 'z'"), std::string::npos);

  EXPECT_EQ(validate_file("single_source.json").code, kValidationError);
  EXPECT_EQ(validate_file("malformed.json").code, kParseError);
}

TEST(CliBench, RowsAndGateCounts) {
  BenchOptions opt;
  opt.n_min = 1;
  opt.n_max = 3;
  opt.trials = 10;
  opt.seed = 5;
  opt.threads = 1;
  const auto rows = run_bench(opt);
  ASSERT_EQ(rows.size(), 9u);
  for (std::size_t i = 0; i < rows.size(); i += 3) {
    const std::size_t n = rows[i].n;
    EXPECT_EQ(rows[i].backend, Backend::classical_drc);
    EXPECT_EQ(rows[i + 1].backend, Backend::qadrc);
    EXPECT_EQ(rows[i + 2].backend, Backend::qdrc);
    EXPECT_EQ(rows[i + 1].qubit_count, 2 * n);
    EXPECT_EQ(rows[i + 2].qubit_count, 3 * n);
    EXPECT_NEAR(rows[i + 2].gate_count, rows[i + 1].gate_count + static_cast<double>(n), 1e-9);
    EXPECT_LE(rows[i + 1].gate_count, 2.0 * 3.0 * static_cast<double>((1u << n) - 1));
  }

  const std::string csv = bench_csv(rows);
  EXPECT_EQ(count_of(csv, "\n"), 10u);
  EXPECT_EQ(csv.rfind("N,backend,mean_ns,gate_count,qubit_count\n", 0), 0u);

  std::ostringstream out, err;
  opt.n_max = 9;
  EXPECT_EQ(cmd_bench(opt, out, err), kFailure);
  opt.n_min = 0;
  opt.n_max = 2;
  EXPECT_EQ(cmd_bench(opt, out, err), kFailure);
}

TEST(CliExportQasm, Layouts) {
  const std::string dir = ::testing::TempDir();
  const auto q = export_file("worked_pair.json", "qdrc", dir + "pair_qdrc.qasm");
  ASSERT_EQ(q.code, kOk) << q.err;
  const std::string qdrc = read_text_file(dir + "pair_qdrc.qasm");
  EXPECT_NE(qdrc.find("qreg q[6];"), std::string::npos);
  EXPECT_EQ(count_of(qdrc, "\nccx "), 2u);
  EXPECT_NE(q.out.find("round trip"), std::string::npos);

  const std::string one = dir + "one.json";
  {
    std::ofstream f(one);
    f << R"({"frame": ["a"], "sources": [{"name": "s", "masses": {"a": [1, 0]}},)"
      << R"({"name": "t", "masses": {"a": [1, 0]}}]})";
  }
  std::ostringstream out, err;
  ASSERT_EQ(cmd_export_qasm({one, "qadrc", dir + "one.qasm", 1}, out, err), kOk) << err.str();
  const std::string qadrc = read_text_file(dir + "one.qasm");
  EXPECT_NE(qadrc.find("qreg q[2];"), std::string::npos);
  EXPECT_EQ(count_of(qadrc, "ccx"), 0u);
}

TEST(CliExportQasm, ExportedFileReproducesDistribution) {
  const std::string path = ::testing::TempDir() + "complex_qdrc.qasm";
  ASSERT_EQ(export_file("complex_pair.json", "qdrc", path).code, kOk);
  const Circuit parsed = parse_qasm(read_text_file(path));
  const auto file = parse_evidence(read_text_file(corpus("complex_pair.json")));
  const Circuit built = build_qdrc_circuit(p_transform(file.sources[0].masses), p_transform(file.sources[1].masses));
  const auto a = simulate(parsed, 1).marginal_probabilities(parsed.measured());
  const auto b = simulate(built, 1).marginal_probabilities(built.measured());
  EXPECT_LE(belieffuse::testing::max_abs_diff(a, b), 1e-9);
}

TEST(CliExportQasm, Errors) {
  const std::string path = ::testing::TempDir() + "unused.qasm";
  EXPECT_EQ(export_file("three_sources.json", "qdrc", path).code, kValidationError);
  EXPECT_EQ(export_file("worked_pair.json", "classical", path).code, kFailure);
  EXPECT_EQ(export_file("wrong_key_order.json", "qdrc", path).code, kParseError);
}
