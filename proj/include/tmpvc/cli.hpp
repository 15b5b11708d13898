#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tmpvc/crossval.hpp"
#include "tmpvc/interpretability.hpp"
#include "tmpvc/pipeline.hpp"

namespace tmpvc::cli {

struct RunConfig {
  int clauses = 5000;  // per class
  int margin = 5000;
  double specificity = 1.5;
  int epochs = 150;
  int states = tm::kDefaultStatesPerAction;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: OpenMP default (all cores)
  bool boost = false;
  double lld_floor = -30.0;
  int folds = 9;

  /// Throws ConfigError.
  void validate() const;
  metrics::TrainConfig train_config(int classes, std::size_t input_width) const;

  /// Applies "key=value" lines (keys are the long flag names without dashes);
  /// '#' starts a comment. Throws ConfigError for unknown keys or bad values.
  void apply(const std::string& key, const std::string& value);
};

/// Reads a key=value config file into (key, value) pairs in file order.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

struct PreprocessArgs {
  std::vector<std::filesystem::path> records;
  std::vector<std::filesystem::path> annotations;  // parallel to records
  std::filesystem::path out;
  std::optional<std::filesystem::path> exclude;  // subject ids to drop, one per line
  bool denoise = true;
};

data::PreprocessStats cmd_preprocess(const PreprocessArgs& args, std::ostream& log);

struct SynthArgs {
  int n_per_class = 100;
  double noise_mv = 0.05;
  int subjects = 3;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> beats_out;
};

void cmd_synth(const SynthArgs& args, std::ostream& log);

void cmd_train(const std::filesystem::path& beats, const RunConfig& config, const std::filesystem::path& model_out,
               std::ostream& out);

metrics::CrossValidationResult cmd_crossval(const std::filesystem::path& beats, const RunConfig& config,
                                            const std::optional<std::filesystem::path>& csv_out,
                                            const std::optional<std::filesystem::path>& plan_out, std::ostream& out);

metrics::ClassReport cmd_evaluate(const std::filesystem::path& model, const std::filesystem::path& beats,
                                  std::ostream& out);

void cmd_explain(const std::filesystem::path& model, const std::optional<std::filesystem::path>& beats,
                 const std::filesystem::path& out_dir, double lld_floor, std::ostream& out,
                 interp::LldNumerator numerator = interp::LldNumerator::kActivePixels);

/// Full command line entry point; returns the process exit code. Errors are
/// written to err as a single "error: ..." line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tmpvc::cli
