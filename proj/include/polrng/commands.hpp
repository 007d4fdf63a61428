#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "polrng/error.hpp"
#include "polrng/state.hpp"

namespace polrng::cli {

enum class OutputFormat { Json, Csv };

enum ExitCode : int { kSuccess = 0, kUnexpected = 1, kValidation = 2, kContract = 3 };

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
  FidelityConvention convention = FidelityConvention::Root;
  OutputFormat format = OutputFormat::Json;
};

int exit_code_for(ErrorKind kind);

// Each command throws polrng::Error on failure; `run_guarded` turns that
// into a message on `err` and an exit code.
void cmd_simulate(const std::filesystem::path& config_path, const GlobalOptions& g, std::ostream& out);

struct TomoOptions {
  std::filesystem::path records;
  std::size_t dim = 2;
  std::optional<std::filesystem::path> truth;
  std::size_t bootstrap = 0;
};
void cmd_tomo(const TomoOptions& o, const GlobalOptions& g, std::ostream& out);

struct AuditOptionsCli {
  std::filesystem::path state;
  std::string scheme = "single_HV";
  std::optional<std::filesystem::path> target;
  std::uint64_t raw_length = 0;
};
void cmd_audit(const AuditOptionsCli& o, const GlobalOptions& g, std::ostream& out);

struct BitsOptions {
  std::filesystem::path state;
  std::string scheme = "single_HV";
  std::uint64_t n = 0;
  std::string extractor = "none";
  std::optional<std::uint64_t> out_len;
};
void cmd_bits(const BitsOptions& o, const GlobalOptions& g, std::ostream& out);

// Returns true when no row failed.
bool cmd_reproduce_paper(const GlobalOptions& g, std::ostream& out);

template <class F>
int run_guarded(F&& f, std::ostream& err) {
  try {
    f();
    return kSuccess;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << "\n";
    return kUnexpected;
  }
}

}  // namespace polrng::cli
