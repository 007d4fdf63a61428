#include <CLI11.hpp>

#include <iostream>

#include "polrng/commands.hpp"

using namespace polrng;
using namespace polrng::cli;

int main(int argc, char** argv) {
  CLI::App app{"Polarization QRNG simulation, tomography and randomness certification"};
  app.require_subcommand(1);

  GlobalOptions g;
  std::uint64_t seed = 0;
  std::string convention = "root";
  std::string format = "json";
  std::string out_dir;
  auto* seed_opt = app.add_option("--seed", seed, "Seed for all stochastic steps");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--convention", convention, "Fidelity convention")
      ->check(CLI::IsMember({"root", "squared"}));
  app.add_option("--format", format, "Output file format")->check(CLI::IsMember({"json", "csv"}));
  app.fallthrough();

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "Simulate count records from a run config");
  simulate->add_option("config", config_path, "Run config JSON")->required();

  TomoOptions tomo;
  std::string truth;
  auto* tomo_cmd = app.add_subcommand("tomo", "Reconstruct a state from count records");
  tomo_cmd->add_option("records", tomo.records, "Record directory, JSON or CSV file")->required();
  tomo_cmd->add_option("--dim", tomo.dim, "State dimension (2 or 4)")->check(CLI::IsMember({2, 4}));
  tomo_cmd->add_option("--truth", truth, "True state JSON for a fidelity check");
  tomo_cmd->add_option("--bootstrap", tomo.bootstrap, "Number of bootstrap resamples (0 = off, else >= 100)");

  AuditOptionsCli audit_opts;
  std::string target;
  auto* audit_cmd = app.add_subcommand("audit", "Certify the randomness of a bit-generating measurement");
  audit_cmd->add_option("state", audit_opts.state, "Density matrix JSON")->required();
  audit_cmd->add_option("--scheme", audit_opts.scheme, "single_HV or coincidence_HH_VV");
  audit_cmd->add_option("--target", target, "Target state JSON for fidelity");
  audit_cmd->add_option("--raw-length", audit_opts.raw_length, "Raw bit count for the extractable-bits budget");

  BitsOptions bits;
  std::uint64_t out_len = 0;
  auto* bits_cmd = app.add_subcommand("bits", "Generate and optionally extract random bits");
  bits_cmd->add_option("state", bits.state, "Density matrix JSON")->required();
  bits_cmd->add_option("--scheme", bits.scheme, "single_HV or coincidence_HH_VV");
  bits_cmd->add_option("--n", bits.n, "Number of raw bits")->required();
  bits_cmd->add_option("--extractor", bits.extractor, "none, von_neumann or toeplitz");
  auto* out_len_opt = bits_cmd->add_option("--out-len", out_len, "Toeplitz output length (default: full budget)");

  auto* reproduce = app.add_subcommand("reproduce-paper", "Compare against the published measurements");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidation;
  }

  if (*seed_opt) g.seed = seed;
  g.out = out_dir;
  g.convention = convention == "squared" ? FidelityConvention::Squared : FidelityConvention::Root;
  g.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;

  if (*simulate) return run_guarded([&] { cmd_simulate(config_path, g, std::cout); }, std::cerr);
  if (*tomo_cmd) {
    if (!truth.empty()) tomo.truth = truth;
    return run_guarded([&] { cmd_tomo(tomo, g, std::cout); }, std::cerr);
  }
  if (*audit_cmd) {
    if (!target.empty()) audit_opts.target = target;
    return run_guarded([&] { cmd_audit(audit_opts, g, std::cout); }, std::cerr);
  }
  if (*bits_cmd) {
    if (*out_len_opt) bits.out_len = out_len;
    return run_guarded([&] { cmd_bits(bits, g, std::cout); }, std::cerr);
  }
  if (*reproduce) {
    bool ok = true;
    const int code = run_guarded([&] { ok = cmd_reproduce_paper(g, std::cout); }, std::cerr);
    if (code != kSuccess) return code;
    return ok ? kSuccess : kContract;
  }
  return kUnexpected;
}
