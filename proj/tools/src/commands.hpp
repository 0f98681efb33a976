#pragma once

#include <filesystem>
#include <string>

#include "config.hpp"

namespace nlslab::cli {

// exit statuses
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // I/O and anything unexpected
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitAssumption = 4;
inline constexpr int kExitUnderflow = 5;
inline constexpr int kExitUnderresolved = 6;

int exit_code_for(Errc e);

struct CommandOutcome {
  int exit_code = kExitOk;
  std::string message;  // one line for the console / sweep index
};

// Runs one of analyze, normalize, ode-sim, pde-sim and writes its files into out.
// Library errors are caught and turned into an error report plus exit status.
CommandOutcome run_single(const std::string& command, const ExperimentConfig& cfg, const std::filesystem::path& out);

// Cartesian sweep; threads <= 0 means use the hardware concurrency.
CommandOutcome run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out, int threads);

// NLSLAB_THREADS, or 0 when unset or unusable
int threads_from_env();

// report builders, exposed for tests
nlohmann::json system_json(const SystemRep& s, const std::string& source);
nlohmann::json analyze_result(const SystemRep& s, const ExperimentConfig& cfg, bool& borderline);
nlohmann::json normalize_result(const SystemRep& s);

}  // namespace nlslab::cli
