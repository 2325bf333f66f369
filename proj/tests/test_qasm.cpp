#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <string>

#include "belieffuse/qasm.hpp"
#include "belieffuse/qdrc.hpp"
#include "belieffuse/random.hpp"
#include "test_support.hpp"

using namespace belieffuse;
using belieffuse::testing::letters;

namespace {

std::size_t count_lines_starting(const std::string& text, const std::string& prefix) {
  std::size_t n = 0, pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (text.compare(pos, prefix.size(), prefix) == 0) ++n;
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return n;
}

}  // namespace

TEST(ExportQasm, SingleRotationLine) {
  Circuit c(1);
  c.add(Gate::ry(0, std::numbers::pi / 3));
  c.measure({0});
  const std::string text = export_qasm(c);
  EXPECT_NE(text.find("ry(1.0471975511965976) q[0];\n"), std::string::npos);
  EXPECT_NE(text.find("measure q[0] -> c[0];\n"), std::string::npos);
}

TEST(ExportQasm, EmptyCircuitIsHeaderOnly) {
  EXPECT_EQ(export_qasm(Circuit(2)),
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[0];\n");
}

TEST(ExportQasm, UnloweredCircuitRejected) {
  Circuit c(1);
  c.load(0, AmplitudeVector({0.6, 0.8}));
  EXPECT_THROW(export_qasm(c), std::invalid_argument);
}

TEST(ExportQasm, SingleElementQdrcHasOneToffoli) {
  const Frame f{"a"};
  const auto p = p_transform(Bba(f, {{{"a"}, 1.0}}));
  const std::string text = export_qasm(lower(build_qdrc_circuit(p, p)));
  EXPECT_NE(text.find("qreg q[3];"), std::string::npos);
  EXPECT_EQ(count_lines_starting(text, "ccx "), 1u);
  EXPECT_EQ(count_lines_starting(text, "ccx q[0],q[1],q[2];"), 1u);
  EXPECT_EQ(count_lines_starting(text, "measure "), 1u);
}

TEST(ExportQasm, CryIsDecomposed) {
  Circuit c(2);
  c.add(Gate::ry(0, 0.7));
  c.add(Gate::cry(0, 1, 1.2));
  c.measure({0, 1});
  const std::string text = export_qasm(c);
  EXPECT_EQ(count_lines_starting(text, "cx q[0],q[1];"), 2u);
  EXPECT_EQ(count_lines_starting(text, "ry(0.59999999999999998) q[1];"), 1u);
  EXPECT_EQ(count_lines_starting(text, "ry(-0.59999999999999998) q[1];"), 1u);

  const auto direct = simulate(c, 1).amplitudes();
  const auto reparsed = simulate(parse_qasm(text), 1).amplitudes();
  EXPECT_LE(belieffuse::testing::max_abs_diff(direct, reparsed), 1e-12);
}

TEST(ParseQasm, RoundTripOfFusionCircuits) {
  std::mt19937_64 rng(51);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (int t = 0; t < 10; ++t) {
      const Frame f = letters(n);
      const auto p1 = p_transform(random_cbba(f, rng, 0.6));
      const auto p2 = p_transform(random_cbba(f, rng, 0.6));
      for (const Circuit& built : {build_qdrc_circuit(p1, p2), build_qadrc_circuit(p1, p2)}) {
        const Circuit lowered = lower(built);
        const Circuit parsed = parse_qasm(export_qasm(lowered));
        EXPECT_EQ(parsed.n_qubits(), lowered.n_qubits());
        EXPECT_EQ(parsed.measured(), lowered.measured());
        EXPECT_EQ(parsed.gate_count(), lowered.gate_count());
        const auto a = simulate(built, 1).marginal_probabilities(built.measured());
        const auto b = simulate(parsed, 1).marginal_probabilities(parsed.measured());
        EXPECT_LE(belieffuse::testing::max_abs_diff(a, b), 1e-12);
        EXPECT_EQ(export_qasm(parsed), export_qasm(lowered));
      }
    }
  }
}

TEST(ParseQasm, ToleratesCommentsAndBlankLines) {
  const Circuit c = parse_qasm(
      "// prepared by hand\nOPENQASM 2.0;\n\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\n"
      "x q[0];  // flip\ncx q[0],q[1];\nmeasure q[1] -> c[0];\nmeasure q[0] -> c[1];\n");
  EXPECT_EQ(c.gate_count(), 2u);
  EXPECT_EQ(c.measured(), (std::vector<Qubit>{1, 0}));
  EXPECT_NEAR(simulate(c, 1).marginal_probabilities(c.measured())[3], 1.0, 1e-15);
}

TEST(ParseQasm, ReportsLineOfError) {
  const auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_qasm(text);
    } catch (const QasmError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("OPENQASM 3.0;\n"), 1u);
  EXPECT_EQ(line_of("OPENQASM 2.0;\nqreg q[2];\nh q[0];\n"), 3u);
  EXPECT_EQ(line_of("OPENQASM 2.0;\nx q[0];\n"), 2u);
  EXPECT_EQ(line_of("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[5];\n"), 3u);
  EXPECT_EQ(line_of("OPENQASM 2.0;\nqreg q[2];\nry(abc) q[0];\n"), 3u);
  EXPECT_EQ(line_of("OPENQASM 2.0;\nqreg q[2];\nx q[0]\n"), 3u);
}
