// streamvr: batch front-end for streaming sentence-level verification and
// refinement. Subcommands: run, simulate, datagen, convert.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "streamvr/corpus.hpp"
#include "streamvr/datagen.hpp"
#include "streamvr/errors.hpp"
#include "streamvr/latency_sim.hpp"
#include "streamvr/metrics.hpp"
#include "streamvr/pipeline.hpp"
#include "streamvr/report_io.hpp"
#include "streamvr/runner.hpp"
#include "streamvr/text.hpp"

namespace {

using namespace streamvr;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitStrict = 3;

std::shared_ptr<Backend> make_backend(const std::string& spec, const std::string& model) {
  if (spec.rfind("script:", 0) == 0) {
    return load_scripted_backend(spec.substr(7));
  }
  if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    HttpBackendConfig config;
    config.base_url = spec;
    config.model = model;
    return std::make_shared<HttpBackend>(config);
  }
  throw ConfigError("backend must be http(s)://... or script:PATH, got: " + spec);
}

struct RunArgs {
  std::string corpus;
  std::vector<std::string> modes{"compare"};
  std::string prompt_mode = "closed";
  std::size_t passages = 5;
  std::size_t shots = 5;
  std::string backend_gen, backend_ver, backend_ref;
  std::string out_dir = "out";
  int jobs = 1;
  long seed = 0;
  bool strict = false;
  std::string model = "default";
  std::string templates_dir;
  bool no_question_in_verifier = false;
  bool reverify = false;
  bool feedback = false;
};

int cmd_run(const RunArgs& args) {
  CorpusLoad load = load_corpus(args.corpus);
  for (const LineIssue& issue : load.issues) {
    std::cerr << "warning: " << args.corpus << ":" << issue.line << ": "
              << issue.message << "\n";
  }
  if (load.records.empty()) {
    std::cerr << "error: no usable records in " << args.corpus << "\n";
    return kExitRuntime;
  }

  RunnerSettings settings;
  settings.prompt_mode = prompt_mode_from_name(args.prompt_mode);
  settings.context_k =
      settings.prompt_mode == PromptMode::FewShot ? args.shots : args.passages;
  settings.jobs = args.jobs;
  settings.modes = RunModes{false, false, false, false};
  for (const std::string& mode : args.modes) {
    if (mode == "none") settings.modes.none = true;
    else if (mode == "full") settings.modes.full = true;
    else if (mode == "streaming") settings.modes.streaming = true;
    else if (mode == "compare") settings.modes.compare = true;
    else throw ConfigError("unknown mode: " + mode);
  }
  if (!settings.modes.any()) throw ConfigError("at least one mode is required");

  PromptLibrary prompts = args.templates_dir.empty()
                              ? PromptLibrary::builtin()
                              : PromptLibrary::load(args.templates_dir);
  settings.pipeline.prompts = &prompts;
  settings.pipeline.include_question_in_verifier_context = !args.no_question_in_verifier;
  settings.pipeline.reverify_refined = args.reverify;
  settings.pipeline.feedback_regeneration = args.feedback;

  Backends backends;
  if (!args.backend_gen.empty()) backends.generator = make_backend(args.backend_gen, args.model);
  if (!args.backend_ver.empty()) backends.verifier = make_backend(args.backend_ver, args.model);
  if (!args.backend_ref.empty()) backends.refiner = make_backend(args.backend_ref, args.model);
  if (!backends.generator) {
    throw ConfigError("run needs --backend-gen (the answers come from it)");
  }
  const bool needs_vr = settings.modes.full || settings.modes.streaming ||
                        settings.modes.compare;
  if (needs_vr && !backends.verifier) {
    throw ConfigError("verification modes need --backend-ver");
  }
  if (needs_vr && !backends.refiner) {
    throw ConfigError("verification modes need --backend-ref");
  }

  std::vector<AnswerRun> runs = run_corpus(load.records, backends, settings);

  std::vector<AnswerObservation> rows;
  rows.reserve(runs.size());
  std::ostringstream answers;
  for (const AnswerRun& run : runs) {
    rows.push_back(observe(run));
    answers << answer_run_to_json(run) << '\n';
  }
  CorpusReport report = aggregate(rows);

  namespace fs = std::filesystem;
  fs::path out_dir(args.out_dir);
  atomic_write(out_dir / "report.json", report_to_json(report));
  atomic_write(out_dir / "report.csv", report_to_csv(report));
  atomic_write(out_dir / "answers.jsonl", answers.str());

  std::cout << "answers: " << report.answers << " (errored " << report.errored << ")\n";
  std::cout << "mean t_gen: " << report.mean_t_gen << "\n";
  if (report.streaming) {
    std::cout << "streaming: mean t_ver " << report.streaming->t_ver
              << ", mean t_ref " << report.streaming->t_ref << "\n";
  }
  if (report.full) {
    std::cout << "full: mean t_ver " << report.full->t_ver << ", mean t_ref "
              << report.full->t_ref << "\n";
  }
  if (report.efficiency) {
    std::cout << "efficiency: " << std::fixed << std::setprecision(1)
              << *report.efficiency * 100.0 << "%\n"
              << std::defaultfloat << std::setprecision(6);
  } else {
    std::cout << "efficiency: n/a (no full-mode refinement)\n";
  }
  if (report.derailed) {
    std::cout << "derailed: " << report.derailed->derailed_answers << "/"
              << report.derailed->false_answers << " = " << report.derailed->rate
              << "\n";
  }
  std::cout << "wrote " << (out_dir / "report.json").string() << ", report.csv, "
            << "answers.jsonl\n";

  if (args.strict && report.errored > 0) return kExitStrict;
  return kExitOk;
}

struct SimulateArgs {
  std::string sweep_config;
  std::string out_csv;
  double t_ver = 0.0, t_ref = 0.0;
  int n = 0;
  double tokens_s = -1.0, tokens_f = -1.0;
  long seed = 42;
  long count = 10000;
  bool event_sim = false;
};

struct SweepRange {
  double lo = 0.0, hi = 0.0;
};

const char* ordering_flag(const LatencyReport& report) {
  if (std::abs(report.t_streaming_serial - report.t_full) < 1e-12) return "boundary";
  if (report.ordering_holds) return "holds";
  return "violated";
}

int cmd_simulate(const SimulateArgs& args) {
  std::vector<LatencyParams> points;
  if (!args.sweep_config.empty() || args.n == 0) {
    std::map<std::string, SweepRange> ranges{
        {"t_ver", {0.001, 0.049}},          {"t_ref", {0.05, 0.4}},
        {"n", {1, 12}},                     {"tokens_ref_streaming", {0.0, 120.0}},
        {"tokens_ref_full", {130.0, 400.0}}};
    long count = args.count;
    long seed = args.seed;
    if (!args.sweep_config.empty()) {
      std::ifstream in(args.sweep_config);
      if (!in.good()) throw ConfigError("cannot open sweep config: " + args.sweep_config);
      nlohmann::json doc = nlohmann::json::parse(in);
      count = doc.value("count", count);
      seed = doc.value("seed", seed);
      if (doc.contains("ranges")) {
        for (const auto& [key, value] : doc.at("ranges").items()) {
          if (!ranges.count(key)) throw ConfigError("unknown sweep parameter: " + key);
          ranges[key] = SweepRange{value.at(0).get<double>(), value.at(1).get<double>()};
        }
      }
    }
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    auto draw = [&](const SweepRange& r) {
      std::uniform_real_distribution<double> dist(r.lo, r.hi);
      return dist(rng);
    };
    points.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
      LatencyParams p;
      p.t_ver = draw(ranges["t_ver"]);
      p.t_ref = draw(ranges["t_ref"]);
      std::uniform_int_distribution<int> nd(static_cast<int>(ranges["n"].lo),
                                            static_cast<int>(ranges["n"].hi));
      p.n = nd(rng);
      p.tokens_ref_streaming = draw(ranges["tokens_ref_streaming"]);
      p.tokens_ref_full = draw(ranges["tokens_ref_full"]);
      points.push_back(p);
    }
  } else {
    if (args.t_ver <= 0 || args.t_ref <= 0 || args.n < 1 || args.tokens_s < 0 ||
        args.tokens_f < 0) {
      throw ConfigError("single-point simulate needs --t-ver --t-ref --n --ts --tf");
    }
    points.push_back(LatencyParams{args.t_ver, args.t_ref, args.n, args.tokens_s,
                                   args.tokens_f});
  }

  std::ostringstream csv;
  csv << "t_ver,t_ref,n,tokens_ref_streaming,tokens_ref_full,t_full,"
         "t_streaming_serial,t_streaming_real,ratio,ordering";
  if (args.event_sim) csv << ",sim_t_full,sim_t_streaming_serial,sim_t_streaming_real";
  csv << "\n";
  long in_region = 0, in_region_holds = 0, boundary = 0;
  for (const LatencyParams& p : points) {
    LatencyReport report = closed_form_report(p);
    const char* flag = ordering_flag(report);
    if (std::string_view(flag) == "boundary") ++boundary;
    const bool in_precondition =
        p.t_ver < p.t_ref && static_cast<double>(p.n) + p.tokens_ref_streaming <
                                 p.tokens_ref_full;
    if (in_precondition) {
      ++in_region;
      if (report.ordering_holds) ++in_region_holds;
    }
    csv << p.t_ver << ',' << p.t_ref << ',' << p.n << ',' << p.tokens_ref_streaming
        << ',' << p.tokens_ref_full << ',' << report.t_full << ','
        << report.t_streaming_serial << ',' << report.t_streaming_real << ','
        << report.t_full / std::max(report.t_streaming_serial, 1e-300) << ','
        << flag;
    if (args.event_sim) {
      LatencyReport sim = simulate_pipeline(p, uniform_trace(p));
      csv << ',' << sim.t_full << ',' << sim.t_streaming_serial << ','
          << sim.t_streaming_real;
    }
    csv << '\n';
  }
  if (args.out_csv.empty()) {
    std::cout << csv.str();
  } else {
    atomic_write(args.out_csv, csv.str());
    std::cout << "wrote " << args.out_csv << " (" << points.size() << " rows)\n";
  }
  if (in_region > 0) {
    std::cout << "inequality chain holds on " << in_region_holds << "/" << in_region
              << " points inside the precondition region ("
              << 100.0 * double(in_region_holds) / double(in_region) << "%)\n";
  } else {
    std::cout << "no sampled points inside the precondition region\n";
  }
  if (boundary > 0) {
    std::cout << boundary << " boundary rows (t_streaming_serial == t_full)\n";
  }
  return kExitOk;
}

struct DatagenArgs {
  std::string source;
  std::string backend;
  std::string out = "verifier_corpus.jsonl";
  std::vector<double> temperatures{0.3, 0.5, 0.7};
  int paraphrases = 1;
  std::string model = "default";
  std::string templates_dir;
};

// Post-write self-check: re-read the corpus and verify the invariants the
// training data promises.
int datagen_self_check(const std::filesystem::path& path) {
  auto examples = read_examples(path);
  std::map<std::pair<std::string, int>, const VerifierExample*> true_by_stage;
  for (const auto& e : examples) {
    if (e.provenance == Provenance::ReferenceTrue) {
      true_by_stage[{e.question, e.stage}] = &e;
    }
  }
  long checked = 0;
  for (const auto& e : examples) {
    auto first = e.formatted_input.find("[SEP]");
    if (first == std::string::npos ||
        e.formatted_input.find("[SEP]", first + 1) != std::string::npos) {
      std::cerr << "self-check failed: not exactly one [SEP] in: "
                << e.formatted_input.substr(0, 60) << "\n";
      return kExitRuntime;
    }
    if (e.label == ExampleLabel::False) {
      auto it = true_by_stage.find({e.question, e.stage});
      if (it == true_by_stage.end()) {
        std::cerr << "self-check failed: False example without True counterpart\n";
        return kExitRuntime;
      }
      auto true_sep = it->second->formatted_input.find("[SEP]");
      if (e.formatted_input.substr(0, first) !=
          it->second->formatted_input.substr(0, true_sep)) {
        std::cerr << "self-check failed: False example changes the prefix\n";
        return kExitRuntime;
      }
      ++checked;
    }
  }
  std::cout << "self-check: ok (" << checked << " False examples suffix-only)\n";
  return kExitOk;
}

int cmd_datagen(const DatagenArgs& args) {
  SourceLoad source = load_source_records(args.source);
  for (const LineIssue& issue : source.issues) {
    std::cerr << "warning: " << args.source << ":" << issue.line << ": "
              << issue.message << "\n";
  }
  if (source.records.empty()) {
    std::cerr << "error: no source records in " << args.source << "\n";
    return kExitRuntime;
  }
  auto backend = make_backend(args.backend, args.model);
  DatagenConfig config;
  config.temperatures = args.temperatures;
  config.paraphrases_per_stage = args.paraphrases;
  PromptLibrary prompts = args.templates_dir.empty()
                              ? PromptLibrary::builtin()
                              : PromptLibrary::load(args.templates_dir);
  config.prompts = &prompts;

  DatagenOutcome outcome = build_corpus(source.records, *backend, config);
  for (const RecordFailure& failure : outcome.failures) {
    std::cerr << "warning: record " << failure.record_index << ": " << failure.message
              << "\n";
  }
  if (outcome.examples.empty()) {
    std::cerr << "error: every record failed\n";
    return kExitRuntime;
  }
  write_examples(args.out, outcome.examples);

  // Summary recounted from the written file, not from memory.
  auto written = read_examples(args.out);
  long true_count = 0, false_count = 0;
  std::map<int, long> per_stage;
  for (const auto& e : written) {
    (e.label == ExampleLabel::True ? true_count : false_count)++;
    per_stage[e.stage]++;
  }
  std::cout << "examples: " << written.size() << " (True " << true_count << ", False "
            << false_count << ")\n";
  std::cout << "stages:";
  for (const auto& [stage, count] : per_stage) {
    std::cout << " " << stage << ":" << count;
  }
  std::cout << "\n";
  std::cout << "records failed: " << outcome.failures.size() << "/"
            << source.records.size() << "\n";
  int check = datagen_self_check(args.out);
  if (check != kExitOk) return check;
  std::cout << "wrote " << args.out << "\n";
  return kExitOk;
}

struct ConvertArgs {
  std::string format;
  std::string in;
  std::string out;
};

int cmd_convert(const ConvertArgs& args) {
  CorpusLoad load = convert_records(args.in, args.format);
  for (const LineIssue& issue : load.issues) {
    std::cerr << "warning: line " << issue.line << ": " << issue.message << "\n";
  }
  if (load.records.empty()) {
    std::cerr << "error: nothing converted from " << args.in << "\n";
    return kExitRuntime;
  }
  write_corpus(args.out, load.records);
  std::cout << "converted " << load.records.size() << " records to " << args.out
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming sentence-level verification and refinement pipelines"};
  app.set_config("--config", "", "Config file (INI/TOML, keys match long flags)");
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run pipelines over a corpus");
  run->add_option("--corpus", run_args.corpus, "Line-delimited JSON corpus")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--mode", run_args.modes,
                  "Any of: none, full, streaming, compare")
      ->delimiter(',');
  run->add_option("--prompt-mode", run_args.prompt_mode, "closed | open | fewshot");
  run->add_option("--passages", run_args.passages, "Passages for open-book prompts");
  run->add_option("--shots", run_args.shots, "Examples for few-shot prompts");
  run->add_option("--backend-gen", run_args.backend_gen, "URL or script:PATH");
  run->add_option("--backend-ver", run_args.backend_ver, "URL or script:PATH");
  run->add_option("--backend-ref", run_args.backend_ref, "URL or script:PATH");
  run->add_option("--out", run_args.out_dir, "Output directory");
  run->add_option("--jobs", run_args.jobs, "Parallel answers")->check(CLI::PositiveNumber);
  run->add_option("--seed", run_args.seed, "Seed (reserved for sampling modes)");
  run->add_flag("--strict", run_args.strict, "Nonzero exit if any answer errored");
  run->add_option("--model", run_args.model, "Model name for HTTP backends");
  run->add_option("--templates", run_args.templates_dir, "Prompt template directory");
  run->add_flag("--no-verifier-question", run_args.no_question_in_verifier,
                "Leave the question out of the verifier preamble");
  run->add_flag("--reverify", run_args.reverify, "Re-verify refined sentences");
  run->add_flag("--feedback", run_args.feedback,
                "Regenerate the continuation after each refinement");

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand("simulate", "Latency model sweeps");
  simulate->add_option("--sweep", sim_args.sweep_config, "Sweep config JSON");
  simulate->add_option("--out", sim_args.out_csv, "CSV output path (default stdout)");
  simulate->add_option("--t-ver", sim_args.t_ver, "Verifier seconds per call");
  simulate->add_option("--t-ref", sim_args.t_ref, "Refiner seconds per token");
  simulate->add_option("--n", sim_args.n, "Sentences per answer");
  simulate->add_option("--ts", sim_args.tokens_s, "Streaming refinement tokens");
  simulate->add_option("--tf", sim_args.tokens_f, "Full refinement tokens");
  simulate->add_option("--seed", sim_args.seed, "Sweep RNG seed");
  simulate->add_option("--count", sim_args.count, "Sweep sample count");
  simulate->add_flag("--event-sim", sim_args.event_sim,
                     "Add event-simulator columns (uniform trace)");

  DatagenArgs gen_args;
  CLI::App* datagen = app.add_subcommand("datagen", "Build the verifier training corpus");
  datagen->add_option("--source", gen_args.source, "{question, answer} JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  datagen->add_option("--backend", gen_args.backend, "URL or script:PATH")->required();
  datagen->add_option("--out", gen_args.out, "Output corpus path");
  datagen->add_option("--temperatures", gen_args.temperatures,
                      "Falsification temperatures")
      ->delimiter(',');
  datagen->add_option("--paraphrases", gen_args.paraphrases, "True paraphrases per stage");
  datagen->add_option("--model", gen_args.model, "Model name for HTTP backends");
  datagen->add_option("--templates", gen_args.templates_dir, "Prompt template directory");

  ConvertArgs convert_args;
  CLI::App* convert = app.add_subcommand("convert", "Convert public dataset layouts");
  convert->add_option("--format", convert_args.format, "asqa | quotesum | native")
      ->required();
  convert->add_option("--in", convert_args.in, "Input file")
      ->required()
      ->check(CLI::ExistingFile);
  convert->add_option("--out", convert_args.out, "Output corpus path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (simulate->parsed()) return cmd_simulate(sim_args);
    if (datagen->parsed()) return cmd_datagen(gen_args);
    if (convert->parsed()) return cmd_convert(convert_args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
