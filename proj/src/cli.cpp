#include "lamof/cli.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "lamof/apps.hpp"
#include "lamof/clustering.hpp"
#include "lamof/codec.hpp"
#include "lamof/corpus.hpp"
#include "lamof/error.hpp"
#include "lamof/io.hpp"
#include "lamof/kinematics.hpp"
#include "lamof/metrics.hpp"
#include "lamof/stitch.hpp"

namespace lamof::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  const char* env = std::getenv("LAMOF_SEED");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  errno = 0;
  const unsigned long long value = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || env[0] == '-') {
    throw Error(ErrorCode::InvalidArgument, "LAMOF_SEED is not an unsigned integer", env);
  }
  return value;
}

// Expands shell-style patterns in the file-name part; plain paths pass through.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& item : inputs) {
    const fs::path p(item);
    const std::string name = p.filename().string();
    if (name.find_first_of("*?[") == std::string::npos) {
      out.push_back(p);
      continue;
    }
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    std::vector<fs::path> matches;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (entry.is_regular_file() && fnmatch(name.c_str(), entry.path().filename().c_str(), 0) == 0) {
        matches.push_back(entry.path());
      }
    }
    if (matches.empty()) throw Error(ErrorCode::IoError, "pattern matched no files", item);
    std::sort(matches.begin(), matches.end());
    out.insert(out.end(), matches.begin(), matches.end());
  }
  return out;
}

std::optional<Skeleton> maybe_skeleton(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return io::load_skeleton(path);
}

void emit(std::ostream& out, const ordered_json& j) { out << j.dump(2) << "\n"; }

struct FitArgs {
  std::vector<std::string> inputs;
  Index k = kDefaultClusterCount;
  std::optional<std::uint64_t> seed;
  Index batch_size = KMeansConfig{}.batch_size;
  int max_iters = KMeansConfig{}.max_iters;
  std::string out;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  std::vector<VelocityField> fields;
  for (const auto& path : expand_inputs(a.inputs)) {
    fields.push_back(compute_velocity_field(io::load_motion(path)));
  }
  KMeansConfig config;
  config.seed = resolve_seed(a.seed);
  config.batch_size = a.batch_size;
  config.max_iters = a.max_iters;
  const ClusterModel model = fit_clusters(fields, a.k, config);
  io::save_cluster_model(model, a.out);
  emit(out, ordered_json{{"k", model.k()},
                         {"feature_dim", model.feature_dim()},
                         {"seed", model.seed},
                         {"inertia", model.inertia},
                         {"iterations", model.iterations_run}});
  return 0;
}

struct EncodeArgs {
  std::string input, model, out, velocity_mode = "secant", tag;
  int smooth_window = EncodeConfig{}.smooth_window;
  Index min_duration = EncodeConfig{}.min_duration;
};

VelocityMode parse_velocity_mode(const std::string& name) {
  if (name == "secant") return VelocityMode::Secant;
  if (name == "meanfield") return VelocityMode::MeanField;
  throw Error(ErrorCode::InvalidArgument, "unknown velocity mode", name);
}

EncodeConfig encode_config(const EncodeArgs& a) {
  EncodeConfig config;
  config.smooth_window = a.smooth_window;
  config.min_duration = a.min_duration;
  config.velocity_mode = parse_velocity_mode(a.velocity_mode);
  return config;
}

int cmd_encode(const EncodeArgs& a, std::ostream& out) {
  const MotionSequence motion = io::load_motion(a.input);
  const ClusterModel model = io::load_cluster_model(a.model);
  SuperMotionSequence sm = encode(motion, model, encode_config(a));
  if (!a.tag.empty()) {
    sm = SuperMotionSequence(sm.segments(), sm.representation(), sm.joint_count(), sm.fps(),
                             ConditionTag(a.tag.begin(), a.tag.end()));
  }
  io::save_supermotion(sm, a.out);
  const CompressionReport report = compression_report(motion, sm);
  emit(out, ordered_json{{"segments", report.segments}, {"frames", report.frames}, {"ratio", report.ratio}});
  return 0;
}

int cmd_decode(const std::string& input, const std::string& output, bool reorthonormalize) {
  const SuperMotionSequence sm = io::load_supermotion(input);
  io::save_motion(decode(sm, DecodeOptions{reorthonormalize}), output);
  return 0;
}

int cmd_roundtrip(const EncodeArgs& a, const std::string& skeleton_path, std::ostream& out) {
  const MotionSequence motion = io::load_motion(a.input);
  const ClusterModel model = io::load_cluster_model(a.model);
  const auto skeleton = maybe_skeleton(skeleton_path);
  const SuperMotionSequence sm = encode(motion, model, encode_config(a));
  const MotionSequence decoded = decode(sm);
  const CompressionReport report = compression_report(motion, sm);

  ordered_json j;
  j["ratio"] = report.ratio;
  j["segments"] = report.segments;
  j["frames"] = report.frames;
  j["mean_duration"] = report.mean_duration;
  j["mpjpe"] = mpjpe(motion, decoded, skeleton ? &*skeleton : nullptr);
  if (sm.segment_count() > 1) {
    const auto residual = coherence_residual(sm);
    j["coherent"] = coherent_metric(sm);
    j["max_coherence_residual"] = *std::max_element(residual.begin(), residual.end());
  } else {
    j["coherent"] = nullptr;
    j["max_coherence_residual"] = nullptr;
  }
  emit(out, j);
  return 0;
}

struct MetricsArgs {
  std::string a, b, weights, skeleton, format = "json";
  ContactThresholds contact;
};

int cmd_metrics(const MetricsArgs& args, std::ostream& out) {
  const SuperMotionSequence ref = io::load_supermotion(args.a);
  const SuperMotionSequence pred = io::load_supermotion(args.b);
  const MetricWeights weights =
      args.weights.empty() ? MetricWeights{} : io::weights_from_json(io::read_json(args.weights));
  const auto skeleton = maybe_skeleton(args.skeleton);

  MetricComponents c;
  c.recon = recon_metric(ref, pred);
  c.vel = velocity_metric(ref, pred);
  c.coherent = pred.segment_count() > 1 ? coherent_metric(pred) : 0.0;

  std::optional<double> joint, contact;
  if (skeleton && ref.representation() == Representation::Rot6D) {
    joint = joint_metric(ref, pred, *skeleton);
  }
  if (skeleton && !skeleton->foot_joints().empty()) {
    const MotionSequence ref_positions = to_cartesian(decode(ref), &*skeleton);
    contact = contact_metric(pred, *skeleton, detect_contacts(ref_positions, *skeleton, args.contact));
  }
  if (!joint && weights.joint != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "joint weight is nonzero but the joint metric needs a Rot6D skeleton");
  }
  if (!contact && weights.contact != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "contact weight is nonzero but no skeleton with feet was given");
  }
  c.joint = joint.value_or(0.0);
  c.contact = contact.value_or(0.0);
  const double total = total_metric(c, weights);

  ordered_json j;
  j["recon"] = c.recon;
  j["joint"] = joint ? ordered_json(*joint) : ordered_json(nullptr);
  j["vel"] = c.vel;
  j["contact"] = contact ? ordered_json(*contact) : ordered_json(nullptr);
  j["coherent"] = c.coherent;
  j["total"] = total;

  if (args.format == "text") {
    for (const auto& [key, value] : j.items()) {
      out << key << "=" << (value.is_null() ? std::string("none") : value.dump()) << "\n";
    }
  } else if (args.format == "json") {
    emit(out, j);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown format", args.format);
  }
  return 0;
}

int cmd_fsr(const std::string& input, const std::string& skeleton_path, const SkatingThresholds& thresholds,
            std::ostream& out) {
  const Skeleton skeleton = io::load_skeleton(skeleton_path);
  MotionSequence motion = io::load_motion(input);
  if (motion.representation() == Representation::Rot6D) motion = to_cartesian(motion, &skeleton);
  emit(out, ordered_json{{"fsr", foot_skating_ratio(motion, skeleton, thresholds)}});
  return 0;
}

int cmd_stitch(const std::vector<std::string>& inputs, Index transition, const std::string& output) {
  const auto paths = expand_inputs(inputs);
  if (paths.size() < 2) throw Error(ErrorCode::InvalidArgument, "stitch needs at least two clips");
  MotionSequence motion = io::load_motion(paths.front());
  for (std::size_t i = 1; i < paths.size(); ++i) motion = stitch(motion, io::load_motion(paths[i]), transition);
  io::save_motion(motion, output);
  return 0;
}

struct CorpusArgs {
  std::string manifest, out_dir;
  CorpusConfig config;
  std::optional<std::uint64_t> seed;
};

int cmd_corpus(CorpusArgs a, std::ostream& out) {
  a.config.stitch.seed = resolve_seed(a.seed);
  const auto records = load_clip_manifest(a.manifest);
  const auto samples = build_corpus(records, a.config, a.out_dir);
  Index frames = 0;
  for (const auto& s : samples) frames += s.total_frames;
  emit(out, ordered_json{{"samples", samples.size()}, {"total_frames", frames}, {"out_dir", a.out_dir}});
  return 0;
}

int cmd_loop(const std::string& input, const std::string& output, bool report, std::ostream& out) {
  const SuperMotionSequence looped = loop_close(io::load_supermotion(input));
  io::save_supermotion(looped, output);
  if (report) {
    const LoopSeamReport r = loop_seam_report(looped);
    emit(out, ordered_json{{"wrap_step", r.wrap_step},
                           {"max_internal_step", r.max_internal_step},
                           {"seamless", r.seamless}});
  }
  return 0;
}

struct RetimeArgs {
  std::string input, out, mode = "even";
  Index total = 0, d_min = 1;
  std::optional<Index> d_max;
  std::optional<std::uint64_t> seed;
};

int cmd_retime(const RetimeArgs& a, std::ostream& out) {
  const SuperMotionSequence sm = io::load_supermotion(a.input);
  DecomposeMode mode;
  if (a.mode == "even") {
    mode = DecomposeMode::Even;
  } else if (a.mode == "seeded") {
    mode = DecomposeMode::Seeded;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown retime mode", a.mode);
  }
  const DurationPlan plan = decompose_duration(a.total, sm.segment_count(), a.d_min, a.d_max.value_or(a.total),
                                               mode, resolve_seed(a.seed));
  const SuperMotionSequence retimed = retime_supermotions(sm, plan);
  if (!a.out.empty()) io::save_supermotion(retimed, a.out);
  emit(out, ordered_json{{"total", plan.total()}, {"durations", plan.durations}});
  return 0;
}

int cmd_resample(const std::string& input, Index frames, const std::string& output, std::ostream& out) {
  const MotionSequence resampled = match_music_length(io::load_motion(input), frames);
  if (output.empty()) {
    out << io::motion_to_json(resampled).dump() << "\n";
  } else {
    io::save_motion(resampled, output);
  }
  return 0;
}

void report_error(std::ostream& err, std::string_view code, const std::string& message, const std::string& context) {
  err << ordered_json{{"code", code}, {"message", message}, {"context", context}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lagrangian motion field codec and tools", "lamof"};
  app.require_subcommand(1);
  int status = 0;

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit-clusters", "fit a velocity cluster model");
  fit_cmd->add_option("--input", fit.inputs, "motion files or patterns")->required();
  fit_cmd->add_option("--k", fit.k, "cluster count")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "seed (falls back to LAMOF_SEED)");
  fit_cmd->add_option("--batch-size", fit.batch_size)->capture_default_str();
  fit_cmd->add_option("--max-iters", fit.max_iters)->capture_default_str();
  fit_cmd->add_option("--out", fit.out)->required();
  fit_cmd->callback([&] { status = cmd_fit(fit, out); });

  EncodeArgs enc;
  auto* enc_cmd = app.add_subcommand("encode", "encode a motion into supermotions");
  enc_cmd->add_option("--input", enc.input)->required();
  enc_cmd->add_option("--model", enc.model)->required();
  enc_cmd->add_option("--out", enc.out)->required();
  enc_cmd->add_option("--smooth-window", enc.smooth_window)->capture_default_str();
  enc_cmd->add_option("--min-duration", enc.min_duration)->capture_default_str();
  enc_cmd->add_option("--velocity-mode", enc.velocity_mode, "secant or meanfield")->capture_default_str();
  enc_cmd->add_option("--tag", enc.tag, "opaque condition tag stored with the sequence");
  enc_cmd->callback([&] { status = cmd_encode(enc, out); });

  std::string dec_in, dec_out;
  bool reortho = false;
  auto* dec_cmd = app.add_subcommand("decode", "decode supermotions to frames");
  dec_cmd->add_option("--input", dec_in)->required();
  dec_cmd->add_option("--out", dec_out)->required();
  dec_cmd->add_flag("--reorthonormalize", reortho);
  dec_cmd->callback([&] { status = cmd_decode(dec_in, dec_out, reortho); });

  EncodeArgs rt;
  std::string rt_skeleton;
  auto* rt_cmd = app.add_subcommand("roundtrip", "encode, decode and report errors");
  rt_cmd->add_option("--input", rt.input)->required();
  rt_cmd->add_option("--model", rt.model)->required();
  rt_cmd->add_option("--skeleton", rt_skeleton, "needed for Rot6D input");
  rt_cmd->add_option("--smooth-window", rt.smooth_window)->capture_default_str();
  rt_cmd->add_option("--min-duration", rt.min_duration)->capture_default_str();
  rt_cmd->add_option("--velocity-mode", rt.velocity_mode)->capture_default_str();
  rt_cmd->callback([&] { status = cmd_roundtrip(rt, rt_skeleton, out); });

  MetricsArgs met;
  auto* met_cmd = app.add_subcommand("metrics", "compare two supermotion sequences");
  met_cmd->add_option("--a", met.a, "reference")->required();
  met_cmd->add_option("--b", met.b, "prediction")->required();
  met_cmd->add_option("--weights", met.weights, "JSON weights");
  met_cmd->add_option("--skeleton", met.skeleton);
  met_cmd->add_option("--contact-height", met.contact.max_height)->capture_default_str();
  met_cmd->add_option("--contact-speed", met.contact.max_speed)->capture_default_str();
  met_cmd->add_option("--up-axis", met.contact.up_axis)->capture_default_str();
  met_cmd->add_option("--format", met.format, "json or text")->capture_default_str();
  met_cmd->callback([&] { status = cmd_metrics(met, out); });

  std::string fsr_in, fsr_skeleton;
  SkatingThresholds skate;
  auto* fsr_cmd = app.add_subcommand("fsr", "foot skating ratio");
  fsr_cmd->add_option("--input", fsr_in)->required();
  fsr_cmd->add_option("--skeleton", fsr_skeleton)->required();
  fsr_cmd->add_option("--max-height", skate.max_height)->capture_default_str();
  fsr_cmd->add_option("--skate-speed", skate.skate_speed)->capture_default_str();
  fsr_cmd->add_option("--up-axis", skate.up_axis)->capture_default_str();
  fsr_cmd->callback([&] { status = cmd_fsr(fsr_in, fsr_skeleton, skate, out); });

  std::vector<std::string> st_clips;
  Index st_transition = kDefaultTransitionFrames;
  std::string st_out;
  auto* st_cmd = app.add_subcommand("stitch", "crossfade clips into one sequence");
  st_cmd->add_option("--clips", st_clips)->required();
  st_cmd->add_option("--transition", st_transition)->capture_default_str();
  st_cmd->add_option("--out", st_out)->required();
  st_cmd->callback([&] { status = cmd_stitch(st_clips, st_transition, st_out); });

  CorpusArgs corp;
  auto* corp_cmd = app.add_subcommand("build-corpus", "build stitched multi-prompt samples");
  corp_cmd->add_option("--manifest", corp.manifest, "clip manifest (JSON lines)")->required();
  corp_cmd->add_option("--out-dir", corp.out_dir)->required();
  corp_cmd->add_option("--count", corp.config.sample_count)->capture_default_str();
  corp_cmd->add_option("--clips-per-sample", corp.config.stitch.clip_count)->capture_default_str();
  corp_cmd->add_option("--transition", corp.config.stitch.transition_frames)->capture_default_str();
  corp_cmd->add_option("--min-clip-length", corp.config.stitch.min_clip_length)->capture_default_str();
  corp_cmd->add_option("--max-clip-length", corp.config.stitch.max_clip_length)->capture_default_str();
  corp_cmd->add_option("--prompts-per-sample", corp.config.prompts_per_sample)->capture_default_str();
  corp_cmd->add_option("--workers", corp.config.workers)->capture_default_str();
  corp_cmd->add_option("--seed", corp.seed);
  corp_cmd->callback([&] { status = cmd_corpus(corp, out); });

  std::string loop_in, loop_out;
  bool loop_report = false;
  auto* loop_cmd = app.add_subcommand("loop", "make a supermotion sequence loop");
  loop_cmd->add_option("--input", loop_in)->required();
  loop_cmd->add_option("--out", loop_out)->required();
  loop_cmd->add_flag("--report", loop_report, "print the seam report");
  loop_cmd->callback([&] { status = cmd_loop(loop_in, loop_out, loop_report, out); });

  RetimeArgs ret;
  auto* ret_cmd = app.add_subcommand("retime", "redistribute segment durations");
  ret_cmd->add_option("--input", ret.input)->required();
  ret_cmd->add_option("--total", ret.total)->required();
  ret_cmd->add_option("--d-min", ret.d_min)->capture_default_str();
  ret_cmd->add_option("--d-max", ret.d_max, "defaults to --total");
  ret_cmd->add_option("--mode", ret.mode, "even or seeded")->capture_default_str();
  ret_cmd->add_option("--seed", ret.seed);
  ret_cmd->add_option("--out", ret.out);
  ret_cmd->callback([&] { status = cmd_retime(ret, out); });

  std::string rs_in, rs_out;
  Index rs_frames = 0;
  auto* rs_cmd = app.add_subcommand("resample", "clip or interpolate to an exact length");
  rs_cmd->add_option("--input", rs_in)->required();
  rs_cmd->add_option("--frames", rs_frames)->required();
  rs_cmd->add_option("--out", rs_out, "omit to print JSON");
  rs_cmd->callback([&] { status = cmd_resample(rs_in, rs_frames, rs_out, out); });

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("lamof");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    return status;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, error_code_name(ErrorCode::InvalidArgument), e.what(), "");
    return 2;
  } catch (const Error& e) {
    report_error(err, error_code_name(e.code()), e.what(), e.context());
    return e.code() == ErrorCode::Internal ? 1 : 2;
  } catch (const fs::filesystem_error& e) {
    report_error(err, error_code_name(ErrorCode::IoError), e.what(), e.path1().string());
    return 2;
  } catch (const std::exception& e) {
    report_error(err, error_code_name(ErrorCode::Internal), e.what(), "");
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace lamof::cli
