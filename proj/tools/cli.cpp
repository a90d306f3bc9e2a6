// Copyright 2026 The protocil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "protocil/diagnostics.hpp"
#include "protocil/error.hpp"
#include "protocil/featureset.hpp"
#include "protocil/harness.hpp"
#include "protocil/ipc.hpp"
#include "protocil/task_stream.hpp"

namespace protocil::cli {

namespace {

struct GenSynthOptions {
  SynthSpec spec;
  std::string out;
};

struct SplitOptions {
  std::string input;
  std::size_t phases = 5;
  std::string base_fraction = "0.5";
  std::size_t replay = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

// Shared by train, baseline and run.
struct LearnOptions {
  std::string features;
  std::string stream;
  std::optional<std::size_t> replay;
  std::uint64_t seed = 0;
  double eval_fraction = 0.2;
  double gamma = kDefaultGamma;
  double lambda = kDefaultLambda;
  std::string objective = "hybrid";
  std::size_t epochs = 160;
  std::size_t batch = 128;
  double lr = 0.1;
  double momentum = 0.9;
  std::string lr_schedule = "cosine";
  bool l2_normalize = false;
  std::string method;  // run: --method, baseline: --kind
  std::string report_out;
  std::string checkpoint_out;
};

struct DiagnoseOptions {
  std::string features;
  std::string normalize = "on";
  std::size_t max_per_class = 50;
  std::uint64_t seed = 0;
  std::string out_prefix;
};

struct ReportOptions {
  std::vector<std::string> inputs;
  std::string out;
};

struct State {
  std::string log_level = "info";
  std::string config;
  GenSynthOptions gen;
  SplitOptions split;
  LearnOptions train;
  LearnOptions baseline;
  LearnOptions run;
  DiagnoseOptions diagnose;
  ReportOptions report;
};

void add_config_option(CLI::App* sub, State& s) {
  sub->add_option("--config", s.config,
                  "key=value file; keys are this subcommand's long flag names, flags on the "
                  "command line win");
}

void add_learn_options(CLI::App* sub, LearnOptions& o, bool with_prototype_flags) {
  sub->add_option("--features", o.features, "FEATSET or CSV feature file")->required();
  sub->add_option("--stream", o.stream, "task stream JSON written by 'split'")->required();
  sub->add_option("--replay", o.replay,
                  "exemplars kept per old class (R); defaults to the stream's value");
  sub->add_option("--seed", o.seed, "seed for the eval split and training shuffles");
  sub->add_option("--eval-fraction", o.eval_fraction, "per-class held-out fraction");
  if (with_prototype_flags) {
    sub->add_option("--gamma", o.gamma, "distance-softmax temperature, > 0");
    sub->add_option("--lambda", o.lambda, "prototype-loss weight, >= 0");
    sub->add_option("--objective", o.objective, "hybrid | prototype-only")
        ->check(CLI::IsMember({"hybrid", "prototype-only"}));
  }
  sub->add_option("--epochs", o.epochs, "epochs per phase");
  sub->add_option("--batch", o.batch, "minibatch size");
  sub->add_option("--lr", o.lr, "initial learning rate");
  sub->add_option("--momentum", o.momentum, "SGD momentum");
  sub->add_option("--lr-schedule", o.lr_schedule, "cosine | constant")
      ->check(CLI::IsMember({"cosine", "constant"}));
  sub->add_flag("--l2-normalize", o.l2_normalize, "scale every feature vector to unit norm first");
}

std::unique_ptr<CLI::App> build_app(State& s) {
  auto app = std::make_unique<CLI::App>(
      "protocil: incremental prototype classifier and class-incremental benchmark tools",
      "protocil");
  app->option_defaults()->always_capture_default();
  app->require_subcommand(1, 1);
  app->set_version_flag("--version", std::string(version()));
  app->add_option("--log-level", s.log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  auto* gen = app->add_subcommand("gen-synth", "write a seeded Gaussian-cluster feature set");
  gen->add_option("--classes", s.gen.spec.class_count, "number of classes (>= 2)");
  gen->add_option("--dim", s.gen.spec.dim, "embedding dimension");
  gen->add_option("--per-class", s.gen.spec.samples_per_class, "samples per class (>= 2)");
  gen->add_option("--mean-scale", s.gen.spec.mean_scale, "radius of the sphere holding class means");
  gen->add_option("--std", s.gen.spec.within_std, "within-class standard deviation");
  gen->add_option("--seed", s.gen.spec.seed, "generator seed");
  gen->add_option("--out", s.gen.out, "output path (.csv writes CSV, otherwise FEATSET)")->required();
  add_config_option(gen, s);

  auto* split = app->add_subcommand("split", "split a feature set into class-incremental phases");
  split->add_option("--input", s.split.input, "FEATSET or CSV feature file")->required();
  split->add_option("--phases", s.split.phases, "incremental phases T after the base phase");
  split->add_option("--base-fraction", s.split.base_fraction,
                    "fraction of classes in the base phase (decimal or p/q)");
  split->add_option("--replay", s.split.replay, "exemplars per old class recorded in the stream");
  split->add_option("--seed", s.split.seed, "shuffle class order with this seed (default: sorted)");
  split->add_option("--out", s.split.out, "output task stream JSON")->required();
  add_config_option(split, s);

  auto* train = app->add_subcommand("train", "train the prototype classifier across a stream");
  add_learn_options(train, s.train, true);
  train->add_option("--checkpoint-out", s.train.checkpoint_out, "IPC1 checkpoint path")->required();
  train->add_option("--report-out", s.train.report_out, "run report JSON path")->required();
  add_config_option(train, s);

  auto* baseline = app->add_subcommand("baseline", "run a comparison classifier across a stream");
  baseline->add_option("--kind", s.baseline.method, "linear | cosine | nme")
      ->required()
      ->check(CLI::IsMember({"linear", "cosine", "nme"}));
  add_learn_options(baseline, s.baseline, false);
  baseline->add_option("--report-out", s.baseline.report_out, "run report JSON path")->required();
  add_config_option(baseline, s);

  auto* run = app->add_subcommand("run", "replay a stream with any method and write a report");
  run->add_option("--method", s.run.method, "ipc | linear | cosine | nme")
      ->required()
      ->check(CLI::IsMember({"ipc", "linear", "cosine", "nme"}));
  add_learn_options(run, s.run, true);
  run->add_option("--report", s.run.report_out, "run report JSON path")->required();
  add_config_option(run, s);

  auto* diagnose = app->add_subcommand("diagnose", "covariance spectrum, PC-ID and cosine matrix");
  diagnose->add_option("--features", s.diagnose.features, "FEATSET or CSV feature file")->required();
  diagnose->add_option("--normalize", s.diagnose.normalize, "L2-normalize features first: on | off")
      ->check(CLI::IsMember({"on", "off"}));
  diagnose->add_option("--max-per-class", s.diagnose.max_per_class,
                       "samples per class in the cosine matrix");
  diagnose->add_option("--seed", s.diagnose.seed, "subsampling seed for the cosine matrix");
  diagnose->add_option("--out-prefix", s.diagnose.out_prefix,
                       "writes <prefix>.spectrum.csv, <prefix>.pcid.json, <prefix>.cosine.csv")
      ->required();
  add_config_option(diagnose, s);

  auto* report = app->add_subcommand("report", "aggregate run reports into one CSV table");
  report->add_option("--inputs", s.report.inputs, "run report JSON files")->required()->expected(1, -1);
  report->add_option("--out", s.report.out, "output CSV")->required();
  add_config_option(report, s);

  return app;
}

int parse_with(CLI::App& app, const std::vector<std::string>& args) {
  std::vector<const char*> argv{"protocil"};
  for (const auto& a : args) argv.push_back(a.c_str());
  app.parse(static_cast<int>(argv.size()), argv.data());
  return 0;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// The subcommand named in `args` and the value of its --config flag, if any.
std::optional<std::pair<CLI::App*, std::string>> find_config(CLI::App& app,
                                                            const std::vector<std::string>& args) {
  CLI::App* sub = nullptr;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (sub == nullptr) {
      sub = app.get_subcommand_no_throw(args[i]);
      continue;
    }
    if (args[i] == "--config" && i + 1 < args.size()) return std::pair{sub, args[i + 1]};
    if (args[i].starts_with("--config=")) return std::pair{sub, args[i].substr(9)};
  }
  return std::nullopt;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args) {
    if (a == flag || a.starts_with(flag + "=")) return true;
  }
  return false;
}

// key=value lines; '#' starts a comment. Keys must name long flags of `sub`.
std::vector<std::string> config_arguments(const std::string& path, CLI::App& sub,
                                          const std::vector<std::string>& args) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::vector<std::string> extra;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string flag = "--" + key;
    CLI::Option* opt = key == "config" ? nullptr : sub.get_option_no_throw(flag);
    if (opt == nullptr) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + key +
                        "' for subcommand '" + sub.get_name() + "'");
    }
    if (given_on_command_line(args, flag)) continue;
    if (opt->get_expected_max() == 0) {
      if (value == "true" || value == "1" || value == "on") {
        extra.push_back(flag);
      } else if (value != "false" && value != "0" && value != "off") {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": '" + key +
                          "' takes true or false, got '" + value + "'");
      }
      continue;
    }
    std::istringstream values(value);
    extra.push_back(flag);
    for (std::string v; values >> v;) extra.push_back(v);
  }
  return extra;
}

double parse_fraction(const std::string& text) {
  const auto slash = text.find('/');
  auto parse = [&](std::string_view part) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      throw ConfigError("base fraction '" + text + "' is not a number or p/q fraction");
    }
    return v;
  };
  if (slash == std::string::npos) return parse(text);
  const double den = parse(std::string_view(text).substr(slash + 1));
  if (den == 0.0) throw ConfigError("base fraction '" + text + "' divides by zero");
  return parse(std::string_view(text).substr(0, slash)) / den;
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

FeatureSet load_features(const LearnOptions& o) {
  FeatureSet fs = load_featureset(o.features);
  return o.l2_normalize ? fs.l2_normalized() : fs;
}

MethodConfig method_config(const LearnOptions& o) {
  if (!(o.gamma > 0.0)) throw ConfigError("gamma must satisfy gamma > 0, got " + shortest(o.gamma));
  if (!(o.lambda >= 0.0)) {
    throw ConfigError("lambda must satisfy lambda >= 0, got " + shortest(o.lambda));
  }
  MethodConfig mc;
  mc.gamma = o.gamma;
  mc.lambda = o.lambda;
  mc.objective = o.objective == "prototype-only" ? Objective::kPrototypeOnly : Objective::kHybrid;
  mc.train.epochs = o.epochs;
  mc.train.batch_size = o.batch;
  mc.train.learning_rate = o.lr;
  mc.train.momentum = o.momentum;
  mc.train.lr_schedule = parse_lr_schedule(o.lr_schedule);
  mc.train.seed = o.seed;
  mc.train.validate();
  return mc;
}

ConfigEcho input_echo(const std::string& subcommand, const LearnOptions& o) {
  return {{"subcommand", subcommand},
          {"features", o.features},
          {"stream", o.stream},
          {"l2_normalize", o.l2_normalize}};
}

// Validates everything, then loads data, then trains. Returns the learner so
// `train` can checkpoint it.
std::unique_ptr<Learner> replay_stream(const std::string& subcommand, Method method,
                                       const LearnOptions& o, spdlog::logger& log) {
  const MethodConfig mc = method_config(o);
  if (!(o.eval_fraction > 0.0 && o.eval_fraction < 1.0)) {
    throw ConfigError("eval fraction must lie in (0, 1), got " + shortest(o.eval_fraction));
  }
  const FeatureSet fs = load_features(o);
  const TaskStream stream = load_task_stream(o.stream);
  stream.validate(fs);

  RunOptions ro;
  ro.eval_fraction = o.eval_fraction;
  ro.seed = o.seed;
  ro.memory_per_class = o.replay.value_or(stream.memory_per_class);

  auto learner = make_learner(method, fs.dim(), mc);
  log.info("event=start subcommand={} method={} samples={} dim={} classes={} phases={} replay={}",
           subcommand, to_string(method), fs.size(), fs.dim(), fs.class_count(),
           stream.phases.size(), ro.memory_per_class);
  const RunReport report =
      run_cil(fs, stream, *learner, ro, input_echo(subcommand, o), [&](const PhaseSnapshot& snap) {
        log.info("event=phase t={} train_samples={} eval_samples={}", snap.t,
                 snap.train_data->size(), snap.eval_samples->size());
      });
  for (const auto& p : report.phases) {
    log.info("event=accuracy t={} A_t={:.4f} new_acc={:.4f}", p.t, p.accuracy, p.new_accuracy);
  }
  log.info("event=done average_accuracy={:.4f}", report.average_accuracy);
  write_report(report, o.report_out);
  return learner;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path + "'");
}

void run_diagnose(const DiagnoseOptions& o, spdlog::logger& log) {
  if (o.max_per_class == 0) throw ConfigError("max-per-class must be >= 1");
  const FeatureSet fs = load_featureset(o.features);
  const bool normalize = o.normalize == "on";
  const SpectrumReport spectrum = covariance_spectrum(fs, normalize);
  if (spectrum.degenerate) log.warn("event=degenerate reason=zero-covariance pc_id=0");

  std::ostringstream csv;
  csv << "k,eigenvalue,normalized,cumulative\n";
  for (std::size_t k = 0; k < spectrum.eigenvalues.size(); ++k) {
    csv << k + 1 << ',' << shortest(spectrum.eigenvalues[k]) << ','
        << shortest(spectrum.normalized[k]) << ',' << shortest(spectrum.cumulative[k]) << '\n';
  }
  write_text(o.out_prefix + ".spectrum.csv", csv.str());

  // FS features are already validated; zero vectors surface here as a data error.
  const SimilarityReport sim = cosine_matrix(normalize ? fs.l2_normalized() : fs, o.max_per_class, o.seed);

  nlohmann::ordered_json pcid;
  pcid["tool_version"] = std::string(version());
  pcid["features"] = o.features;
  pcid["normalize"] = normalize;
  pcid["samples"] = spectrum.samples;
  pcid["dim"] = spectrum.dim;
  pcid["threshold"] = kPcIdThreshold;
  pcid["pc_id"] = spectrum.pc_id;
  pcid["degenerate"] = spectrum.degenerate;
  pcid["gram_trick"] = spectrum.used_gram;
  pcid["cosine_within_mean"] = sim.within_mean;
  pcid["cosine_between_mean"] = sim.between_mean;
  write_text(o.out_prefix + ".pcid.json", pcid.dump(2) + "\n");

  std::ostringstream cos;
  cos << "class_boundaries";
  for (const auto& b : sim.class_boundaries) {
    cos << ',' << fs.original_ids()[b.label] << ':' << b.begin << ':' << b.end;
  }
  cos << '\n';
  for (std::size_t a = 0; a < sim.matrix.rows(); ++a) {
    for (std::size_t b = 0; b < sim.matrix.cols(); ++b) {
      if (b) cos << ',';
      cos << shortest(sim.matrix(a, b));
    }
    cos << '\n';
  }
  write_text(o.out_prefix + ".cosine.csv", cos.str());
  log.info("event=diagnose pc_id={} dim={} within={:.4f} between={:.4f}", spectrum.pc_id,
           spectrum.dim, sim.within_mean, sim.between_mean);
}

int dispatch(CLI::App& app, State& s, std::ostream& out, spdlog::logger& log) {
  if (app.got_subcommand("gen-synth")) {
    const FeatureSet fs = generate_synthetic(s.gen.spec);
    if (s.gen.out.ends_with(".csv")) {
      save_featureset_csv(fs, s.gen.out);
    } else {
      save_featureset(fs, s.gen.out);
    }
    log.info("event=gen-synth samples={} dim={} classes={} out={}", fs.size(), fs.dim(),
             fs.class_count(), s.gen.out);
  } else if (app.got_subcommand("split")) {
    const double base = parse_fraction(s.split.base_fraction);
    const FeatureSet fs = load_featureset(s.split.input);
    const TaskStream stream = split_tasks(fs, s.split.phases, base, s.split.replay, s.split.seed);
    save_task_stream(stream, s.split.out);
    log.info("event=split phases={} base_classes={} out={}", stream.phases.size(),
             stream.phases.front().classes.size(), s.split.out);
  } else if (app.got_subcommand("train")) {
    auto learner = replay_stream("train", Method::kIpc, s.train, log);
    save_checkpoint(static_cast<const IpcLearner&>(*learner).classifier(), s.train.checkpoint_out);
  } else if (app.got_subcommand("baseline")) {
    replay_stream("baseline", parse_method(s.baseline.method), s.baseline, log);
  } else if (app.got_subcommand("run")) {
    replay_stream("run", parse_method(s.run.method), s.run, log);
  } else if (app.got_subcommand("diagnose")) {
    run_diagnose(s.diagnose, log);
  } else if (app.got_subcommand("report")) {
    std::vector<RunReport> reports;
    for (const auto& path : s.report.inputs) reports.push_back(read_report(path));
    write_text(s.report.out, reports_to_csv(reports));
    out << "wrote " << reports.size() << " rows to " << s.report.out << '\n';
  }
  return kExitOk;
}

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kUsage:
      return kExitUsage;
    case ErrorCategory::kData:
      return kExitData;
    case ErrorCategory::kNumeric:
      return kExitNumeric;
  }
  return kExitData;
}

void report_error(std::ostream& err, std::string_view category, std::string message) {
  for (char& c : message) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  err << "protocil: error[" << category << "]: " << message << '\n';
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  spdlog::logger log("protocil", sink);
  log.set_pattern("protocil: [%l] %v");

  std::vector<std::string> final_args = args;
  State state;
  auto app = build_app(state);
  try {
    // Config values become extra arguments so they go through the same
    // validation as flags; anything given on the command line wins.
    if (const auto config = find_config(*app, args)) {
      const auto extra = config_arguments(config->second, *config->first, args);
      final_args.insert(final_args.end(), extra.begin(), extra.end());
    }
    parse_with(*app, final_args);
    log.set_level(spdlog::level::from_str(state.log_level));
    return dispatch(*app, state, out, log);
  } catch (const CLI::Success& e) {  // --help, --version
    return app->exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return kExitUsage;
  } catch (const LoadError& e) {
    report_error(err, std::string("data/") + std::string(to_string(e.kind())), e.what());
    return kExitData;
  } catch (const Error& e) {
    report_error(err, to_string(e.category()), e.what());
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    report_error(err, "data", e.what());
    return kExitData;
  }
}

int parse_and_dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return parse_and_dispatch(args, std::cout, std::cerr);
}

}  // namespace protocil::cli
