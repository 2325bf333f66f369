#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "belieffuse/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = belieffuse::cli;

  CLI::App app{"belieffuse: Dempster-Shafer evidence fusion, classical and on a simulated quantum circuit"};
  app.require_subcommand(1);

  cli::CombineOptions combine;
  auto* combine_cmd = app.add_subcommand("combine", "Fuse all sources of an evidence file (pairwise left fold)");
  combine_cmd->add_option("--input", combine.input, "Evidence file (JSON)")->required();
  combine_cmd->add_option("--backend", combine.backend, "classical | cdrc | qadrc | qdrc")
      ->check(CLI::IsMember({"classical", "cdrc", "qadrc", "qdrc"}));
  combine_cmd->add_option("--mode", combine.mode, "exact | shots")->check(CLI::IsMember({"exact", "shots"}));
  combine_cmd->add_option("--shots", combine.shots, "Shots per pairwise fusion in shots mode");
  combine_cmd->add_option("--seed", combine.seed, "Sampling seed");
  combine_cmd->add_option("--output", combine.output, "Report path (default: stdout)");
  combine_cmd->add_flag("--timings", combine.timings, "Append wall-clock timings to the report");

  std::string validate_input;
  auto* validate_cmd = app.add_subcommand("validate", "Check an evidence file and list findings");
  validate_cmd->add_option("--input", validate_input, "Evidence file (JSON)")->required();

  cli::BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time classical and quantum fusion on random BBAs");
  bench_cmd->add_option("--n-min", bench.n_min, "Smallest frame size")->required();
  bench_cmd->add_option("--n-max", bench.n_max, "Largest frame size (<= 8)")->required();
  bench_cmd->add_option("--trials", bench.trials, "Random pairs per frame size")->required();
  bench_cmd->add_option("--seed", bench.seed, "Master seed")->required();
  bench_cmd->add_option("--output", bench.output, "CSV path (default: stdout)");

  cli::ExportOptions exporter;
  auto* export_cmd = app.add_subcommand("export-qasm", "Write the fusion circuit of a two-source file as OpenQASM 2.0");
  export_cmd->add_option("--input", exporter.input, "Evidence file with exactly two sources")->required();
  export_cmd->add_option("--backend", exporter.backend, "qadrc | qdrc")->check(CLI::IsMember({"qadrc", "qdrc"}));
  export_cmd->add_option("--output", exporter.output, "QASM path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  if (*combine_cmd) return cli::cmd_combine(combine);
  if (*validate_cmd) return cli::cmd_validate(validate_input);
  if (*bench_cmd) return cli::cmd_bench(bench);
  if (*export_cmd) return cli::cmd_export_qasm(exporter);
  return cli::kFailure;
}
