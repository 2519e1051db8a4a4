#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aea/error.hpp"
#include "aea/model.hpp"
#include "aea/strategy.hpp"

namespace aea::cli {

enum class Command { Simulate, Ergodic, Scgf, Gdpf, Utility, Verify, DriftCheck, PaperSuite };

std::optional<Command> parse_command(std::string_view name);
std::string to_string(Command c);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Invalid configuration; the message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Full key tree with every default.  Unknown keys are rejected against it.
nlohmann::json default_config();

/// Overlays `user` onto `base`, checking every key and leaf type.
/// `where` is the JSON pointer of the subtree, used in diagnostics.
void merge_config(nlohmann::json& base, const nlohmann::json& user,
                  const std::string& where = "");

/// Applies one "dotted.key=value" override (value parsed as JSON when possible).
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Range checks on the merged tree; throws ConfigError.
void validate_config(const nlohmann::json& config);

MarketModel build_model(const nlohmann::json& model_block);
Strategy build_strategy(const nlohmann::json& strategy_block);

struct RunOptions {
  Command command = Command::PaperSuite;
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
};

/// Loads defaults <- file <- overrides <- flags.  Throws ConfigError.
nlohmann::json resolve_config(const RunOptions& options);

/// Executes one command.  Returns the exit status (0, 2 or 3).
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

/// Command-line entry point.
int main(int argc, char** argv);

}  // namespace aea::cli
