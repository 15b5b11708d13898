#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "tmpvc/beat_io.hpp"
#include "tmpvc/cli.hpp"
#include "tmpvc/errors.hpp"
#include "tmpvc/interpretability.hpp"
#include "tmpvc/model_io.hpp"

namespace tmpvc::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

void RunConfig::validate() const {
  if (clauses < 2 || clauses % 2 != 0) throw ConfigError("--clauses must be even and >= 2, got " + std::to_string(clauses));
  if (margin <= 0) throw ConfigError("--T must be positive, got " + std::to_string(margin));
  if (!(specificity > 1.0)) throw ConfigError("--s must be > 1, got " + std::to_string(specificity));
  if (epochs < 1) throw ConfigError("--epochs must be >= 1, got " + std::to_string(epochs));
  if (states < 1 || states > tm::kMaxStatesPerAction) throw ConfigError("--states must lie in [1, 128]");
  if (threads < 0) throw ConfigError("--threads must be >= 0");
  if (!(lld_floor < 0.0)) throw ConfigError("--lld-floor must be negative");
  if (folds < 2) throw ConfigError("--folds must be >= 2");
}

metrics::TrainConfig RunConfig::train_config(int classes, std::size_t input_width) const {
  validate();
  metrics::TrainConfig c;
  c.params.classes = classes;
  c.params.clauses_per_class = clauses;
  c.params.margin = margin;
  c.params.specificity = specificity;
  c.params.states_per_action = states;
  c.params.input_width = input_width;
  c.epochs = epochs;
  c.boost_true_positive = boost;
  c.seed = seed;
  return c;
}

namespace {

template <typename T>
T parse_value(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  if (!(in >> out) || !(in >> std::ws).eof()) throw ConfigError("bad value '" + value + "' for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ConfigError("bad boolean '" + value + "' for " + key);
}

}  // namespace

void RunConfig::apply(const std::string& key, const std::string& value) {
  if (key == "clauses") {
    clauses = parse_value<int>(key, value);
  } else if (key == "T") {
    margin = parse_value<int>(key, value);
  } else if (key == "s") {
    specificity = parse_value<double>(key, value);
  } else if (key == "epochs") {
    epochs = parse_value<int>(key, value);
  } else if (key == "states") {
    states = parse_value<int>(key, value);
  } else if (key == "seed") {
    seed = parse_value<std::uint64_t>(key, value);
  } else if (key == "threads") {
    threads = parse_value<int>(key, value);
  } else if (key == "boost") {
    boost = parse_bool(key, value);
  } else if (key == "lld-floor") {
    lld_floor = parse_value<double>(key, value);
  } else if (key == "folds") {
    folds = parse_value<int>(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path.string(), line_no, "expected key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

std::set<std::string> read_exclusions(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open exclusion list " + path.string());
  std::set<std::string> out;
  for (std::string id; in >> id;) out.insert(id);
  return out;
}

struct Split {
  std::vector<InputVector> inputs;
  std::vector<int> labels;
};

Split split(const std::vector<data::LabeledBeat>& beats) {
  Split s;
  s.inputs.reserve(beats.size());
  for (const auto& b : beats) {
    s.inputs.push_back(b.input);
    s.labels.push_back(static_cast<int>(b.label));
  }
  return s;
}

std::vector<std::string> class_names() {
  std::vector<std::string> names;
  for (int c = 0; c < data::kClassCount; ++c) names.emplace_back(data::label_name(static_cast<data::BeatLabel>(c)));
  return names;
}

}  // namespace

data::PreprocessStats cmd_preprocess(const PreprocessArgs& args, std::ostream& log) {
  if (args.records.size() != args.annotations.size()) {
    throw ConfigError("need one annotation file per record (" + std::to_string(args.records.size()) + " records, " +
                      std::to_string(args.annotations.size()) + " annotation files)");
  }
  const auto excluded = args.exclude ? read_exclusions(*args.exclude) : std::set<std::string>{};
  data::PreprocessOptions options;
  options.denoise = args.denoise;

  std::vector<data::LabeledBeat> beats;
  data::PreprocessStats total;
  std::size_t skipped_records = 0;
  for (std::size_t i = 0; i < args.records.size(); ++i) {
    const auto record = data::load_record(args.records[i]);
    if (excluded.contains(record.subject_id)) {
      ++skipped_records;
      continue;
    }
    const auto annotations = data::load_annotations(args.annotations[i]);
    auto result = data::preprocess_record(record, annotations, options);
    total += result.stats;
    std::move(result.beats.begin(), result.beats.end(), std::back_inserter(beats));
  }
  data::write_beats(beats, args.out);

  std::map<data::BeatLabel, std::size_t> per_class;
  for (const auto& b : beats) ++per_class[b.label];
  log << "records=" << args.records.size() - skipped_records << " excluded_records=" << skipped_records
      << " beats=" << total.beats << " skipped_edges=" << total.skipped_edges
      << " excluded_symbols=" << total.excluded_symbols << " heuristic_labels=" << total.heuristic_labels;
  for (int c = 0; c < data::kClassCount; ++c) {
    log << ' ' << data::label_name(static_cast<data::BeatLabel>(c)) << '=' << per_class[static_cast<data::BeatLabel>(c)];
  }
  log << '\n';
  return total;
}

void cmd_synth(const SynthArgs& args, std::ostream& log) {
  if (args.n_per_class < 1) throw ConfigError("-n must be >= 1");
  if (args.subjects < 1) throw ConfigError("--subjects must be >= 1");
  fs::create_directories(args.out_dir);
  const auto records = data::synth_records(args.n_per_class, args.noise_mv, args.seed, args.subjects);
  std::size_t beats = 0;
  for (const auto& r : records) {
    data::write_record(r.record, args.out_dir / (r.record.subject_id + ".csv"));
    data::write_annotations(r.annotations, args.out_dir / (r.record.subject_id + ".ann.csv"));
    beats += r.annotations.size();
  }
  if (args.beats_out) {
    data::write_beats(data::synth_dataset(args.n_per_class, args.noise_mv, args.seed, args.subjects), *args.beats_out);
  }
  log << "subjects=" << records.size() << " beats=" << beats << '\n';
}

void cmd_train(const fs::path& beats_path, const RunConfig& config, const fs::path& model_out, std::ostream& out) {
  config.validate();
  const auto beats = data::read_beats(beats_path);
  if (beats.empty()) throw ConfigError("no beats in " + beats_path.string());
  set_threads(config.threads);
  const auto data = split(beats);
  const auto tc = config.train_config(data::kClassCount, beats.front().input.size());
  auto start = std::chrono::steady_clock::now();
  const auto model = metrics::train_model(data.inputs, data.labels, tc, [&](int epoch, double acc) {
    const auto now = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(now - start).count();
    start = now;
    char line[96];
    std::snprintf(line, sizeof line, "%d,%.6f,%.3f\n", epoch, acc, seconds);
    out << line << std::flush;
  });
  tm::save_model(model, model_out);
}

metrics::CrossValidationResult cmd_crossval(const fs::path& beats_path, const RunConfig& config,
                                            const std::optional<fs::path>& csv_out,
                                            const std::optional<fs::path>& plan_out, std::ostream& out) {
  config.validate();
  const auto beats = data::read_beats(beats_path);
  if (beats.empty()) throw ConfigError("no beats in " + beats_path.string());
  set_threads(config.threads);

  std::set<std::string> subject_set;
  for (const auto& b : beats) subject_set.insert(b.subject_id);
  const std::vector<std::string> subjects(subject_set.begin(), subject_set.end());
  const auto plan = data::make_folds(subjects, config.folds, config.seed);
  if (plan_out) {
    std::ofstream f(*plan_out);
    if (!f) throw IoError("cannot open " + plan_out->string() + " for writing");
    f << data::fold_plan_to_text(plan);
  }

  const auto tc = config.train_config(data::kClassCount, beats.front().input.size());
  const auto result = metrics::cross_validate(beats, plan, tc);
  const auto names = class_names();
  for (const auto& fr : result.folds) {
    out << "fold " << fr.fold << " (train " << fr.train_size << ", test " << fr.test_size << ")\n";
    if (fr.confusion.total() > 0) out << metrics::format_report(fr.report, names);
    out << '\n';
  }
  out << "pooled\n" << metrics::format_report(result.pooled_report, names) << '\n';
  out << "fold mean\n" << metrics::format_report(result.fold_average, names);
  if (csv_out) {
    std::ofstream f(*csv_out);
    if (!f) throw IoError("cannot open " + csv_out->string() + " for writing");
    f << metrics::cross_validation_csv(result);
  }
  return result;
}

metrics::ClassReport cmd_evaluate(const fs::path& model_path, const fs::path& beats_path, std::ostream& out) {
  const auto model = tm::load_model(model_path);
  const auto beats = data::read_beats(beats_path);
  if (beats.empty()) throw ConfigError("no beats in " + beats_path.string());
  metrics::ConfusionMatrix cm(model.class_count());
  for (const auto& b : beats) cm.add(static_cast<int>(b.label), tm::predict_multiclass(model, b.input));
  const auto r = metrics::report(cm);
  out << metrics::format_report(r, class_names());
  return r;
}

void cmd_explain(const fs::path& model_path, const std::optional<fs::path>& beats_path, const fs::path& out_dir,
                 double lld_floor, std::ostream& out, interp::LldNumerator numerator) {
  if (!(lld_floor < 0.0)) throw ConfigError("--lld-floor must be negative");
  const auto model = tm::load_model(model_path);
  if (model.input_width() != seg::kBeatBits) throw DimensionError("explain needs a model over 100x320 beat rasters");

  std::vector<std::vector<Eigen::VectorXd>> waveforms(static_cast<std::size_t>(model.class_count()));
  if (beats_path) {
    for (const auto& b : data::read_beats(*beats_path)) {
      const auto c = static_cast<std::size_t>(b.label);
      if (c < waveforms.size()) waveforms[c].push_back(seg::raster_waveform(seg::unflatten(b.input)));
    }
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir.string());

  for (int c = 0; c < model.class_count(); ++c) {
    std::optional<interp::Overlay> overlay;
    if (!waveforms[static_cast<std::size_t>(c)].empty()) {
      overlay = interp::Overlay{interp::mean_waveform(waveforms[static_cast<std::size_t>(c)]), {0.0, 1.0}};
    }
    for (auto polarity : {tm::Polarity::kPositive, tm::Polarity::kNegative}) {
      const std::string tag =
          "c" + std::to_string(c) + (polarity == tm::Polarity::kPositive ? "_positive" : "_negative");
      const auto map = interp::aggregate(model.bank(c), polarity);
      interp::export_role_map(map.zero_counts, overlay, out_dir / ("roles_" + tag + ".pgm"));
      const auto lld = interp::lld_heatmap(map.zero_counts, map.clauses, numerator, lld_floor);
      interp::export_heatmap(lld, overlay, out_dir / ("lld_" + tag + ".ppm"), lld_floor);
    }
    const auto name = c < data::kClassCount ? std::string(data::label_name(static_cast<data::BeatLabel>(c)))
                                            : std::to_string(c);
    std::ofstream report(out_dir / ("report_c" + std::to_string(c) + ".txt"));
    if (!report) throw IoError("cannot write report in " + out_dir.string());
    report << interp::class_report(model.bank(c), name);
  }
  out << "wrote " << 4 * model.class_count() << " images and " << model.class_count() << " reports to "
      << out_dir.string() << '\n';
}

// ---------------------------------------------------------------------------
// Command line

namespace {

using OptionMap = std::map<std::string, CLI::Option*>;

OptionMap add_run_options(CLI::App* app, RunConfig& c) {
  OptionMap m;
  m["clauses"] = app->add_option("--clauses", c.clauses, "Clauses per class (even)")->capture_default_str();
  m["T"] = app->add_option("--T", c.margin, "Margin T")->capture_default_str();
  m["s"] = app->add_option("--s", c.specificity, "Specificity s (> 1)")->capture_default_str();
  m["epochs"] = app->add_option("--epochs", c.epochs, "Training epochs")->capture_default_str();
  m["states"] = app->add_option("--states", c.states, "Automaton states per action N (1-128)")->capture_default_str();
  m["seed"] = app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  m["threads"] = app->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
  m["boost"] = app->add_flag("--boost", c.boost, "Boost true positive feedback");
  m["lld-floor"] = app->add_option("--lld-floor", c.lld_floor, "LLD value for empty windows (dB)")->capture_default_str();
  m["folds"] = app->add_option("--folds", c.folds, "Cross-validation folds")->capture_default_str();
  return m;
}

// Config-file values fill in whatever the command line left unset.
void merge_config(const std::optional<fs::path>& path, const OptionMap& options, RunConfig& c) {
  if (!path) return;
  for (const auto& [key, value] : read_config_file(*path)) {
    const auto it = options.find(key);
    if (it == options.end()) throw ConfigError("unknown config key '" + key + "'");
    if (it->second->count() == 0) c.apply(key, value);
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interpretable Tsetlin Machine for PVC beat classification"};
  app.require_subcommand(1);

  RunConfig config;
  std::optional<fs::path> config_file;

  PreprocessArgs pre;
  auto* preprocess = app.add_subcommand("preprocess", "Denoise, segment and rasterize annotated records");
  preprocess->add_option("--records", pre.records, "Record CSV files (index,mv)")->required()->check(CLI::ExistingFile);
  preprocess->add_option("--annotations", pre.annotations, "Annotation CSV files, one per record")->required()->check(CLI::ExistingFile);
  preprocess->add_option("--out", pre.out, "Output beat file")->required();
  preprocess->add_option("--exclude", pre.exclude, "File listing subject ids to drop");
  bool no_denoise = false;
  preprocess->add_flag("--no-denoise", no_denoise, "Skip wavelet denoising");

  SynthArgs syn;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset in the CSV ingestion formats");
  synth->add_option("-n,--n", syn.n_per_class, "Beats per class")->capture_default_str();
  synth->add_option("--noise", syn.noise_mv, "Gaussian noise sigma (mV)")->capture_default_str();
  synth->add_option("--subjects", syn.subjects, "Number of subject records")->capture_default_str();
  synth->add_option("--seed", syn.seed, "Random seed")->capture_default_str();
  synth->add_option("--out", syn.out_dir, "Output directory")->required();
  synth->add_option("--beats-out", syn.beats_out, "Also write the rasterized beats to this beat file");

  fs::path beats_path;
  fs::path model_path;

  auto* train = app.add_subcommand("train", "Train a model and write it to a file");
  train->add_option("--beats", beats_path, "Beat file")->required()->check(CLI::ExistingFile);
  train->add_option("--model", model_path, "Output model file")->required();
  train->add_option("--config", config_file, "key=value config file (flags take precedence)")->check(CLI::ExistingFile);
  const auto train_opts = add_run_options(train, config);

  std::optional<fs::path> csv_out;
  std::optional<fs::path> plan_out;
  auto* crossval = app.add_subcommand("crossval", "Subject-wise k-fold cross-validation");
  crossval->add_option("--beats", beats_path, "Beat file")->required()->check(CLI::ExistingFile);
  crossval->add_option("--csv", csv_out, "Write per-fold metrics CSV here");
  crossval->add_option("--plan-out", plan_out, "Write the fold plan here");
  crossval->add_option("--config", config_file, "key=value config file (flags take precedence)")->check(CLI::ExistingFile);
  const auto cv_opts = add_run_options(crossval, config);

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a trained model on a beat file");
  evaluate->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--beats", beats_path, "Beat file")->required()->check(CLI::ExistingFile);

  std::optional<fs::path> explain_beats;
  fs::path out_dir;
  auto* explain = app.add_subcommand("explain", "Role maps, LLD heatmaps and clause reports");
  explain->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  explain->add_option("--beats", explain_beats, "Beat file for mean-waveform overlays")->check(CLI::ExistingFile);
  explain->add_option("--out", out_dir, "Output directory")->required();
  explain->add_option("--lld-floor", config.lld_floor, "LLD value for empty windows (dB)")->capture_default_str();
  interp::LldNumerator numerator = interp::LldNumerator::kActivePixels;
  const std::map<std::string, interp::LldNumerator> numerators{{"pixels", interp::LldNumerator::kActivePixels},
                                                               {"clauses", interp::LldNumerator::kClauseDensity}};
  explain->add_option("--lld-numerator", numerator, "LLD window numerator: pixels (active pixel count) or clauses")
      ->transform(CLI::CheckedTransformer(numerators, CLI::ignore_case));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (preprocess->parsed()) {
      pre.denoise = !no_denoise;
      cmd_preprocess(pre, out);
    } else if (synth->parsed()) {
      cmd_synth(syn, out);
    } else if (train->parsed()) {
      merge_config(config_file, train_opts, config);
      cmd_train(beats_path, config, model_path, out);
    } else if (crossval->parsed()) {
      merge_config(config_file, cv_opts, config);
      cmd_crossval(beats_path, config, csv_out, plan_out, out);
    } else if (evaluate->parsed()) {
      cmd_evaluate(model_path, beats_path, out);
    } else if (explain->parsed()) {
      cmd_explain(model_path, explain_beats, out_dir, config.lld_floor, out, numerator);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace tmpvc::cli
