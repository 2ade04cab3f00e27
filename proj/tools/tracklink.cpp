// Command-line front end: track, evaluate, learn-weights, synth, dump-affinity.

#include "tracklink/affinity.hpp"
#include "tracklink/association.hpp"
#include "tracklink/config.hpp"
#include "tracklink/evaluation.hpp"
#include "tracklink/io.hpp"
#include "tracklink/pipeline.hpp"
#include "tracklink/synth.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kMissingFile = 3,
  kBadConfig = 4,
  kBadInput = 5,
};

struct CliError {
  int code;
  std::string message;
};

void require_file(const std::string& path, const char* what) {
  if (!std::filesystem::is_regular_file(path)) throw CliError{kMissingFile, std::string("missing ") + what + " file: " + path};
}

tracklink::RunConfig load_run_config(const std::string& path, std::optional<std::uint64_t> seed, bool no_appearance) {
  tracklink::RunConfig cfg;
  if (!path.empty()) {
    require_file(path, "config");
    try {
      cfg = tracklink::load_config(path);
    } catch (const tracklink::Error& e) {
      throw CliError{kBadConfig, std::string("invalid config: ") + e.what()};
    }
  }
  if (seed) cfg.rng_seed = *seed;
  if (no_appearance) cfg.use_appearance = false;
  try {
    tracklink::validate(cfg);
  } catch (const tracklink::Error& e) {
    throw CliError{kBadConfig, std::string("invalid config: ") + e.what()};
  }
  return cfg;
}

tracklink::FrameDetections load_inputs(const std::string& det, const std::string& features, const tracklink::RunConfig& cfg) {
  require_file(det, "detection");
  std::optional<std::string> sidecar;
  if (!features.empty()) {
    require_file(features, "feature");
    sidecar = features;
  }
  try {
    return tracklink::io::load_detections(det, sidecar, cfg.feature_dim);
  } catch (const tracklink::Error& e) {
    throw CliError{kBadInput, std::string("invalid detections: ") + e.what()};
  }
}

tracklink::TrackSet load_tracks(const std::string& path, const char* what) {
  require_file(path, what);
  try {
    return tracklink::io::load_ground_truth(path);
  } catch (const tracklink::Error& e) {
    throw CliError{kBadInput, std::string("invalid ") + what + " file: " + e.what()};
  }
}

struct InputOptions {
  std::string det;
  std::string features;
  std::string config;
  std::optional<std::uint64_t> seed;
  bool no_appearance = false;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--det", in.det, "Detection CSV (frame,id,x,y,w,h,score)")->required();
  cmd->add_option("--features", in.features, "Feature sidecar CSV (frame,index,v1..vd)");
  cmd->add_option("--config", in.config, "key=value configuration file");
  cmd->add_option("--seed", in.seed, "Overrides rng_seed");
  cmd->add_flag("--no-appearance", in.no_appearance, "Disable appearance affinity and refinement");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tracklink: tracklet association by network flow with learned appearance metrics"};
  app.require_subcommand(1);

  InputOptions track_in;
  std::string track_out;
  std::string track_summary;
  auto* track = app.add_subcommand("track", "Link detections into trajectories");
  add_input_options(track, track_in);
  track->add_option("--out", track_out, "Result CSV")->required();
  track->add_option("--summary", track_summary, "Per-trajectory JSON summary");

  std::string eval_result;
  std::string eval_gt;
  bool eval_json = false;
  auto* evaluate = app.add_subcommand("evaluate", "CLEAR MOT metrics of a result against ground truth");
  evaluate->add_option("--result", eval_result, "Result CSV")->required();
  evaluate->add_option("--gt", eval_gt, "Ground-truth CSV")->required();
  evaluate->add_flag("--json", eval_json, "Print JSON instead of a table");

  InputOptions learn_in;
  std::string learn_gt;
  std::string learn_out;
  auto* learn = app.add_subcommand("learn-weights", "Grid-search the two motion weights against ground truth");
  add_input_options(learn, learn_in);
  learn->add_option("--gt", learn_gt, "Ground-truth CSV")->required();
  learn->add_option("--out-config", learn_out, "Write the config with the learned weights");

  std::string synth_preset;
  std::string synth_spec;
  std::string synth_prefix;
  std::uint64_t synth_seed = 0;
  bool synth_print = false;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario");
  auto* preset_opt = synth->add_option("--preset", synth_preset, "crossing, motion-unreliable or suite-<k>");
  auto* spec_opt = synth->add_option("--spec", synth_spec, "Scenario JSON file");
  preset_opt->excludes(spec_opt);
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--out-prefix", synth_prefix, "Writes <prefix>det.csv, <prefix>features.csv, <prefix>gt.csv");
  synth->add_flag("--print-spec", synth_print, "Print the scenario JSON and exit");

  InputOptions dump_in;
  std::string dump_out;
  auto* dump = app.add_subcommand("dump-affinity", "Write the affinity table as CSV");
  add_input_options(dump, dump_in);
  dump->add_option("--out", dump_out, "Output CSV (standard output when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (track->parsed()) {
      const auto cfg = load_run_config(track_in.config, track_in.seed, track_in.no_appearance);
      const auto dets = load_inputs(track_in.det, track_in.features, cfg);
      const auto trajectories = tracklink::track(dets, cfg);
      tracklink::io::write_trajectories(trajectories, track_out);
      if (!track_summary.empty()) tracklink::io::write_text(track_summary, tracklink::format_summary(trajectories));
      std::cerr << "wrote " << trajectories.size() << " trajectories to " << track_out << "\n";
    } else if (evaluate->parsed()) {
      const auto result = load_tracks(eval_result, "result");
      const auto gt = load_tracks(eval_gt, "ground-truth");
      const auto report = tracklink::evaluate(result, gt);
      std::cout << (eval_json ? tracklink::format_report_json(report) : tracklink::format_report(report));
    } else if (learn->parsed()) {
      auto cfg = load_run_config(learn_in.config, learn_in.seed, learn_in.no_appearance);
      const auto dets = load_inputs(learn_in.det, learn_in.features, cfg);
      const auto gt = load_tracks(learn_gt, "ground-truth");
      const auto prepared = tracklink::prepare(dets, cfg);
      const auto res = tracklink::learn_weights(prepared.reliable, prepared.table, gt, cfg);
      std::cout << "lambda1=" << tracklink::io::format_real(res.lambda1) << "\n"
                << "lambda2=" << tracklink::io::format_real(res.lambda2) << "\n"
                << tracklink::format_report(res.report);
      if (!learn_out.empty()) {
        cfg.lambda1 = res.lambda1;
        cfg.lambda2 = res.lambda2;
        tracklink::io::write_text(learn_out, tracklink::format_config(cfg));
      }
    } else if (synth->parsed()) {
      tracklink::synth::ScenarioSpec spec;
      if (!synth_spec.empty()) {
        require_file(synth_spec, "scenario");
        try {
          spec = tracklink::synth::parse_scenario(tracklink::io::read_text(synth_spec));
        } catch (const tracklink::Error& e) {
          throw CliError{kBadInput, std::string("invalid scenario: ") + e.what()};
        }
      } else {
        const auto p = tracklink::synth::preset(synth_preset.empty() ? "crossing" : synth_preset);
        if (!p) throw CliError{kBadInput, "unknown preset: " + synth_preset};
        spec = *p;
      }
      if (synth_print) {
        std::cout << tracklink::synth::format_scenario(spec);
        return kOk;
      }
      if (synth_prefix.empty()) throw CliError{kBadInput, "synth: --out-prefix is required unless --print-spec is given"};
      tracklink::synth::write_scenario(tracklink::synth::synth_scenario(spec, synth_seed), synth_prefix);
    } else if (dump->parsed()) {
      const auto cfg = load_run_config(dump_in.config, dump_in.seed, dump_in.no_appearance);
      const auto dets = load_inputs(dump_in.det, dump_in.features, cfg);
      const auto text = tracklink::affinity::format_table(tracklink::prepare(dets, cfg).table);
      if (dump_out.empty()) {
        std::cout << text;
      } else {
        tracklink::io::write_text(dump_out, text);
      }
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const tracklink::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
