// streamad: streaming anomaly detection over timestamp,value CSV streams.
//
// Subcommands:
//   detect  run one model over a stream and write per-record scores
//   multi   run one model per stream and combine them into a system score
//   bench   score detectors against labeled anomaly windows
//   synth   generate the bundled synthetic streams and their labels

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "streamad/bench.hpp"
#include "streamad/config_io.hpp"
#include "streamad/csv.hpp"
#include "streamad/log.hpp"
#include "streamad/pipeline.hpp"
#include "streamad/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;  // I/O and processing failures
constexpr int kExitUsage = 2;    // bad configuration or arguments

struct CommonArgs {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<double> epsilon;
};

streamad::LoadedConfig resolve_config(const CommonArgs& args) {
  streamad::LoadedConfig cfg;
  if (!args.config_path.empty()) {
    cfg = streamad::load_config_file(args.config_path);
  }
  if (args.seed.has_value()) cfg.pipeline.seed = *args.seed;
  if (args.epsilon.has_value()) {
    cfg.pipeline.likelihood.epsilon = *args.epsilon;
    cfg.multi.epsilon = *args.epsilon;
  }
  cfg.pipeline.validate();
  cfg.multi.validate();
  return cfg;
}

int cmd_detect(const std::string& input, const std::string& output,
               const CommonArgs& common) {
  const streamad::LoadedConfig cfg = resolve_config(common);

  std::ifstream file_in;
  std::istream* in = &std::cin;
  std::optional<size_t> known_length;
  if (!input.empty() && input != "-") {
    file_in.open(input);
    if (!file_in) {
      std::cerr << "error: cannot open input " << input << "\n";
      return kExitRuntime;
    }
    // Probation scales with the file length; counting rows first is stream
    // metadata, the records themselves still flow strictly in order.
    size_t rows = 0;
    std::string line;
    while (std::getline(file_in, line)) {
      if (!line.empty() && line != "\r") ++rows;
    }
    if (rows > 0) --rows;  // header
    known_length = rows;
    file_in.clear();
    file_in.seekg(0);
    in = &file_in;
  }

  std::ofstream file_out;
  std::ostream* out = &std::cout;
  if (!output.empty() && output != "-") {
    file_out.open(output);
    if (!file_out) {
      std::cerr << "error: cannot open output " << output << "\n";
      return kExitRuntime;
    }
    out = &file_out;
  }

  streamad::Pipeline pipeline(cfg.pipeline, known_length);
  streamad::RecordCsvReader reader(*in, cfg.pipeline.hard_fail);
  streamad::write_output_header(*out);

  size_t records = 0;
  std::chrono::steady_clock::duration model_time{0};
  while (auto record = reader.next()) {
    const auto t0 = std::chrono::steady_clock::now();
    const streamad::AnomalyOutput row = pipeline.process(*record);
    model_time += std::chrono::steady_clock::now() - t0;
    streamad::write_output_row(*out, row);
    ++records;
  }
  out->flush();

  const double ms_per_record =
      records == 0 ? 0.0
                   : std::chrono::duration<double, std::milli>(model_time)
                             .count() /
                         static_cast<double>(records);
  std::fprintf(stderr,
               "records=%zu flags=%zu skipped=%zu epsilon=%g "
               "ms_per_record=%.4f\n",
               records, pipeline.flag_count(), reader.skipped(),
               cfg.pipeline.likelihood.epsilon, ms_per_record);
  return kExitOk;
}

int cmd_multi(const std::vector<std::string>& inputs, const std::string& output,
              const CommonArgs& common) {
  const streamad::LoadedConfig cfg = resolve_config(common);
  std::vector<std::vector<streamad::Record>> streams;
  streams.reserve(inputs.size());
  for (const auto& path : inputs) {
    streams.push_back(
        streamad::read_records_file(path, cfg.pipeline.hard_fail));
  }

  const auto rows = streamad::run_multi(streams, cfg.pipeline, cfg.multi);

  std::ofstream file_out;
  std::ostream* out = &std::cout;
  if (!output.empty() && output != "-") {
    file_out.open(output);
    if (!file_out) {
      std::cerr << "error: cannot open output " << output << "\n";
      return kExitRuntime;
    }
    out = &file_out;
  }
  streamad::write_multi_header(*out, streams.size());
  size_t flags = 0;
  for (const auto& row : rows) {
    streamad::write_multi_row(*out, row);
    if (row.flag) ++flags;
  }
  out->flush();
  std::fprintf(stderr, "models=%zu steps=%zu flags=%zu\n", streams.size(),
               rows.size(), flags);
  return kExitOk;
}

int cmd_bench(const std::string& corpus_dir, const std::string& labels_path,
              const std::string& profile_name,
              const std::vector<std::string>& detectors,
              const std::string& output, double random_rate,
              const CommonArgs& common) {
  const streamad::LoadedConfig cfg = resolve_config(common);

  std::ifstream labels_in(labels_path);
  if (!labels_in) {
    std::cerr << "error: cannot open labels " << labels_path << "\n";
    return kExitUsage;
  }
  std::string labels_text((std::istreambuf_iterator<char>(labels_in)),
                          std::istreambuf_iterator<char>());
  const auto labels = streamad::parse_labels_json(labels_text);

  std::vector<streamad::CorpusStream> corpus;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir)) {
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    streamad::CorpusStream stream;
    stream.name = path.filename().string();
    stream.records =
        streamad::read_records_file(path.string(), cfg.pipeline.hard_fail);
    if (const auto it = labels.find(stream.name); it != labels.end()) {
      stream.windows = it->second;
    }
    corpus.push_back(std::move(stream));
  }
  if (corpus.empty()) {
    std::cerr << "error: no .csv streams under " << corpus_dir << "\n";
    return kExitUsage;
  }

  std::vector<streamad::ApplicationProfile> profiles;
  if (profile_name == "all") {
    profiles = streamad::default_profiles();
  } else {
    for (const auto& p : streamad::default_profiles()) {
      if (p.name == profile_name) profiles.push_back(p);
    }
    if (profiles.empty()) {
      std::cerr << "error: unknown profile " << profile_name << "\n";
      return kExitUsage;
    }
  }

  const auto report = streamad::run_corpus(
      corpus, profiles, detectors, cfg.pipeline,
      streamad::SlidingThresholdParams{}, random_rate, cfg.pipeline.seed);

  std::cout << streamad::report_to_text(report);
  if (!output.empty()) {
    std::ofstream out(output);
    if (!out) {
      std::cerr << "error: cannot open output " << output << "\n";
      return kExitRuntime;
    }
    out << streamad::report_to_csv(report);
  }
  return kExitOk;
}

int cmd_synth(const std::string& generator, uint64_t seed, size_t records,
              const std::string& output, const std::string& labels_path) {
  const streamad::LabeledStream stream =
      streamad::generate_stream(generator, seed, records);

  std::ofstream out(output);
  if (!out) {
    std::cerr << "error: cannot open output " << output << "\n";
    return kExitRuntime;
  }
  streamad::write_records_csv(out, stream.records);

  if (!labels_path.empty()) {
    std::ofstream labels_out(labels_path);
    if (!labels_out) {
      std::cerr << "error: cannot open labels output " << labels_path << "\n";
      return kExitRuntime;
    }
    const std::string name = std::filesystem::path(output).filename().string();
    labels_out << streamad::labels_to_json({{name, stream.windows}});
  }
  std::fprintf(stderr, "generator=%s records=%zu windows=%zu\n",
               generator.c_str(), stream.records.size(),
               stream.windows.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streamad: streaming anomaly detection"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string input, output;
  std::vector<std::string> inputs;
  std::string corpus_dir, labels_path, profile = "standard";
  std::vector<std::string> detectors = {"htm", "sliding_threshold", "random"};
  std::string generator;
  uint64_t synth_seed = 1;
  size_t synth_records = 0;
  double random_rate = 0.01;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON config file");
    sub->add_option("--seed", common.seed, "model seed override");
    sub->add_option("--epsilon", common.epsilon,
                    "detection threshold override");
  };

  CLI::App* detect = app.add_subcommand("detect", "score one stream");
  detect->add_option("--input", input, "input CSV ('-' for stdin)");
  detect->add_option("--output", output, "output CSV ('-' for stdout)");
  add_common(detect);

  CLI::App* multi = app.add_subcommand("multi", "combine several streams");
  multi->add_option("--input", inputs, "input CSVs, one per model")
      ->required();
  multi->add_option("--output", output, "combined output CSV");
  add_common(multi);

  CLI::App* bench = app.add_subcommand("bench", "score a labeled corpus");
  bench->add_option("--corpus", corpus_dir, "directory of CSV streams")
      ->required();
  bench->add_option("--labels", labels_path, "anomaly windows JSON")
      ->required();
  bench->add_option("--profile", profile,
                    "standard|reward_low_fp|reward_low_fn|all");
  bench->add_option("--detectors", detectors,
                    "subset of: htm sliding_threshold random");
  bench->add_option("--random-rate", random_rate, "random baseline flag rate");
  bench->add_option("--output", output, "also write the report as CSV");
  add_common(bench);

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic stream");
  synth->add_option("--generator", generator, "generator name")->required();
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--records", synth_records, "record count (0 = default)");
  synth->add_option("--output", output, "output CSV")->required();
  synth->add_option("--labels", labels_path, "also write the labels JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (detect->parsed()) return cmd_detect(input, output, common);
    if (multi->parsed()) return cmd_multi(inputs, output, common);
    if (bench->parsed()) {
      return cmd_bench(corpus_dir, labels_path, profile, detectors, output,
                       random_rate, common);
    }
    return cmd_synth(generator, synth_seed, synth_records, output,
                     labels_path);
  } catch (const std::runtime_error& e) {
    // Configuration problems (bad JSON, bad values, missing labels) are
    // usage errors; anything else is a runtime failure.
    const std::string msg = e.what();
    std::cerr << "error: " << msg << "\n";
    return msg.rfind("config:", 0) == 0 || msg.rfind("labels:", 0) == 0
               ? kExitUsage
               : kExitRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
