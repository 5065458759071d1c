#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fkpp/config.hpp"

namespace fkpp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFailedCheck = 2;

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunResult {
  int status{kExitOk};
  std::vector<OutputFile> files;
  std::string summary;
};

std::span<const std::string_view> subcommands();

/// 17 significant digits, so the text reparses to the same double.
std::string format_number(double v);

/// Runs one subcommand entirely in memory. Throws fkpp::Error on failure.
RunResult execute(std::string_view subcommand, const ExperimentConfig& config);

/// Writes every file to a temporary name in `dir`, then renames them all.
/// On failure the temporaries are removed and no target file is touched.
void commit_files(const std::filesystem::path& dir, const std::vector<OutputFile>& files);

struct RunOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir{"."};
  std::optional<std::int64_t> seed;
  bool quiet{false};
};

/// Reads the config, executes, commits data files plus meta.json and returns
/// the exit status. Errors are reported on `err` and leave no data files.
int run(std::string_view subcommand, const RunOptions& options, std::ostream& out,
        std::ostream& err);

}  // namespace fkpp::cli
