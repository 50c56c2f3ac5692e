#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ipose/ablation.hpp"
#include "ipose/camera.hpp"
#include "ipose/error.hpp"
#include "ipose/integral.hpp"
#include "ipose/io.hpp"
#include "ipose/metrics.hpp"
#include "ipose/patch.hpp"
#include "ipose/trainer.hpp"

namespace fs = std::filesystem;
using namespace ipose;
using io::Json;

namespace {

struct Common {
  std::string skeleton;
  std::string units;
  std::string out;
};

Skeleton load_skeleton(const Common& c) {
  if (c.skeleton.empty()) return Skeleton::h36m17();
  if (!fs::exists(c.skeleton)) throw SkeletonError("skeleton file not found: " + c.skeleton);
  return io::read_skeleton(c.skeleton);
}

io::PoseFile load_poses(const std::string& path, const Common& c, bool primary = true) {
  io::PoseFile f = io::read_pose_file(path);
  if (primary && !c.units.empty() && f.units != parse_units(c.units)) {
    throw UnitError(path + " is tagged '" + std::string(to_string(f.units)) + "', expected '" +
                    c.units + "'");
  }
  return f;
}

void require_file_units(const io::PoseFile& f, Units expected, const std::string& path) {
  if (f.units != expected) {
    throw UnitError(path + " is tagged '" + std::string(to_string(f.units)) + "', expected '" +
                    std::string(to_string(expected)) + "'");
  }
}

void require_joints(const io::PoseFile& f, const Skeleton& s, const std::string& path) {
  if (f.joints != s.joint_names.size()) {
    throw SkeletonError(path + " has " + std::to_string(f.joints) + " joints, skeleton '" +
                        s.name + "' has " + std::to_string(s.joint_names.size()));
  }
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
  } else {
    io::write_atomic(c.out, text);
  }
}

void emit(const Common& c, const Json& doc) { emit(c, doc.dump(1) + "\n"); }

void emit(const Common& c, const io::PoseFile& f) {
  if (c.out.empty()) {
    emit(c, io::to_json(f));
  } else {
    io::write_pose_file(c.out, f);
  }
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<std::size_t> parse_dims(const std::string& text, std::size_t count, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v <= 0) throw std::invalid_argument(part);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw InvalidInput(std::string("bad ") + what + " '" + text + "'");
    }
  }
  if (out.size() != count) throw InvalidInput(std::string("bad ") + what + " '" + text + "'");
  return out;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw InvalidInput(std::string("bad number in ") + what + ": '" + part + "'");
    }
  }
  return out;
}

// --- commands -------------------------------------------------------------

struct FitCameraArgs {
  std::string points3d, points2d;
};

void fit_camera(const Common& c, const FitCameraArgs& a) {
  const io::PoseFile p3 = load_poses(a.points3d, c, false);
  const io::PoseFile p2 = load_poses(a.points2d, c);
  require_file_units(p3, Units::Millimeters, a.points3d);
  require_file_units(p2, Units::ImagePixels, a.points2d);
  if (p3.frames.size() != p2.frames.size()) {
    throw ShapeError("3D and 2D files have different frame counts");
  }
  std::vector<CameraFitInput> inputs;
  for (std::size_t f = 0; f < p3.frames.size(); ++f) {
    std::vector<bool> mask;
    if (!p2.valid.empty()) mask = p2.valid[f];
    inputs.push_back({p3.frames[f], p2.frames[f], std::move(mask)});
  }
  emit(c, io::to_json(fit_per_frame(inputs)));
}

struct ProjectArgs {
  std::string points3d, cameras;
};

void project_cmd(const Common& c, const ProjectArgs& a) {
  const io::PoseFile p3 = load_poses(a.points3d, c);
  require_file_units(p3, Units::Millimeters, a.points3d);
  const Json cams = io::read_json(a.cameras);
  if (!cams.contains("cameras") || !cams["cameras"].is_array()) {
    throw FormatError(a.cameras + " has no 'cameras' list");
  }
  const Json& list = cams["cameras"];
  if (list.size() != 1 && list.size() != p3.frames.size()) {
    throw ShapeError("camera list must hold one camera or one per frame");
  }
  std::vector<Pose> frames;
  for (std::size_t f = 0; f < p3.frames.size(); ++f) {
    const Json& cam = list.size() == 1 ? list[0] : list[f];
    if (cam.is_null()) throw InvalidInput("no camera for frame " + std::to_string(f));
    frames.push_back(project(io::camera_from_json(cam), p3.frames[f]));
  }
  emit(c, io::make_pose_file(std::move(frames), p3.skeleton));
}

struct RescaleArgs {
  std::string in, policy = "dataset", reference;
};

void rescale_bones(const Common& c, const RescaleArgs& a) {
  const Skeleton skel = load_skeleton(c);
  const io::PoseFile pred = load_poses(a.in, c);
  if (!is_pixel(pred.units)) {
    throw UnitError(a.in + " must be in pixels, found '" + std::string(to_string(pred.units)) + "'");
  }
  require_joints(pred, skel, a.in);

  std::vector<double> targets(pred.frames.size());
  if (a.policy == "per-frame") {
    if (a.reference.empty()) throw InvalidInput("per-frame policy needs --reference <mm file>");
    const io::PoseFile ref = load_poses(a.reference, c, false);
    require_file_units(ref, Units::Millimeters, a.reference);
    require_joints(ref, skel, a.reference);
    if (ref.frames.size() != pred.frames.size()) {
      throw ShapeError("reference and prediction have different frame counts");
    }
    for (std::size_t f = 0; f < targets.size(); ++f) {
      targets[f] = mean_bone_length(ref.frames[f], skel).mean;
    }
  } else if (a.policy.rfind("explicit:", 0) == 0) {
    const auto v = parse_list(a.policy.substr(9), "--bone-policy");
    if (v.size() != 1) throw InvalidInput("explicit policy takes one length in mm");
    std::fill(targets.begin(), targets.end(), v[0]);
  } else if (a.policy.rfind("dataset:", 0) == 0) {
    const std::string path = a.policy.substr(8);
    const io::PoseFile ds = load_poses(path, c, false);
    require_file_units(ds, Units::Millimeters, path);
    require_joints(ds, skel, path);
    const double mean =
        dataset_bone_length(ds.frames, skel, BoneLengthSource::AvgTrainVal).mean_bone_length;
    std::fill(targets.begin(), targets.end(), mean);
  } else {
    throw InvalidInput("unknown bone policy '" + a.policy +
                       "' (per-frame, explicit:<mm>, dataset:<file>)");
  }
  std::vector<Pose> out;
  for (std::size_t f = 0; f < targets.size(); ++f) {
    out.push_back(rescale_to_bone_length(pred.frames[f], targets[f], skel));
  }
  emit(c, io::make_pose_file(std::move(out), skel.name));
}

struct EvaluateArgs {
  std::string pred, gt;
};

void evaluate(const Common& c, const EvaluateArgs& a) {
  const Skeleton skel = load_skeleton(c);
  const io::PoseFile pred = load_poses(a.pred, c);
  const io::PoseFile gt = load_poses(a.gt, c, false);
  require_file_units(pred, Units::Millimeters, a.pred);
  require_file_units(gt, Units::Millimeters, a.gt);
  require_joints(pred, skel, a.pred);
  require_joints(gt, skel, a.gt);
  const EvalReport report = mpjpe(pred.frames, gt.frames, skel);
  if (ends_with(c.out, ".csv")) {
    emit(c, io::eval_report_csv(report, skel));
  } else {
    emit(c, io::to_json(report, skel));
  }
}

struct SoftArgmaxArgs {
  std::string grid;
};

void soft_argmax_cmd(const Common& c, const SoftArgmaxArgs& a) {
  const LikelihoodGrid grid = io::grid_from_json(io::read_json(a.grid));
  std::vector<Pose> frames{to_pose(soft_argmax(normalize(grid)))};
  emit(c, io::make_pose_file(std::move(frames)));
}

struct FlipMergeArgs {
  std::string pred, flipped;
  std::size_t width = 0;
};

void flip_merge_cmd(const Common& c, const FlipMergeArgs& a) {
  const Skeleton skel = load_skeleton(c);
  const io::PoseFile pred = load_poses(a.pred, c);
  const io::PoseFile flipped = load_poses(a.flipped, c, false);
  require_file_units(flipped, pred.units, a.flipped);
  require_joints(pred, skel, a.pred);
  require_joints(flipped, skel, a.flipped);
  if (pred.frames.size() != flipped.frames.size()) {
    throw ShapeError("prediction and flipped prediction have different frame counts");
  }
  std::vector<Pose> out;
  for (std::size_t f = 0; f < pred.frames.size(); ++f) {
    const JointEstimate merged = flip_merge(JointEstimate{pred.frames[f].joints},
                                            JointEstimate{flipped.frames[f].joints}, skel, a.width);
    out.push_back(Pose{pred.units, pred.space, merged.joints});
  }
  emit(c, io::make_pose_file(std::move(out), skel.name));
}

struct EnsembleArgs {
  std::vector<std::string> inputs;
  std::string weights;
};

void ensemble(const Common& c, const EnsembleArgs& a) {
  std::vector<io::PoseFile> files;
  for (const auto& path : a.inputs) files.push_back(load_poses(path, c));
  for (std::size_t i = 1; i < files.size(); ++i) {
    require_file_units(files[i], files[0].units, a.inputs[i]);
    if (files[i].frames.size() != files[0].frames.size()) {
      throw ShapeError(a.inputs[i] + " has a different frame count");
    }
  }
  const std::vector<double> weights =
      a.weights.empty() ? std::vector<double>{} : parse_list(a.weights, "--weights");
  std::vector<Pose> out;
  for (std::size_t f = 0; f < files[0].frames.size(); ++f) {
    std::vector<Pose> members;
    for (const auto& file : files) members.push_back(file.frames[f]);
    out.push_back(ensemble_average(members, weights));
  }
  emit(c, io::make_pose_file(std::move(out), files[0].skeleton));
}

struct AugmentArgs {
  std::string box, patch_size = "256x256";
  std::uint64_t seed = 0;
  std::size_t count = 1;
};

void augment_sample(const Common& c, const AugmentArgs& a) {
  const auto b = parse_list(a.box, "--box");
  if (b.size() != 4) throw InvalidInput("--box takes cx,cy,w,h");
  const PersonBox box{b[0], b[1], b[2], b[3]};
  box.validate();
  const auto wh = parse_dims(a.patch_size, 2, "--patch-size");
  const PatchSize patch{wh[0], wh[1]};
  AugmentSampler sampler(a.seed);
  Json samples = Json::array();
  for (std::size_t i = 0; i < a.count; ++i) {
    const AugmentParams p = sampler();
    const PatchTransform t = build_patch_transform(box, p, patch);
    samples.push_back({{"dx", p.dx},
                       {"dy", p.dy},
                       {"scale", p.scale},
                       {"rotation_deg", p.rotation_deg},
                       {"flip", p.flip},
                       {"matrix", t.matrix()}});
  }
  emit(c, Json{{"seed", a.seed},
               {"box", {{"cx", box.cx}, {"cy", box.cy}, {"w", box.w}, {"h", box.h}}},
               {"patch_size", {patch.width, patch.height}},
               {"samples", std::move(samples)}});
}

struct TrainArgs {
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  double lr = 0.0;
  std::string grid_size;
  std::size_t joints = 0, features = 0, samples = 0, batch = 0;
  double planar = -1.0;
  bool mixed = false;
};

void train_toy(const Common& c, const TrainArgs& a) {
  ToyRun run = a.mixed ? reference_mixed_run() : reference_single_run();
  if (a.seed) run.config.seed = a.seed;
  if (a.steps) run.config.max_steps = a.steps;
  if (a.lr > 0.0) run.config.learning_rate = a.lr;
  if (a.batch) run.config.batch_size = a.batch;
  if (!a.grid_size.empty()) {
    const auto d = parse_dims(a.grid_size, 3, "--grid-size");
    run.task.dims = GridDims{d[0], d[1], d[2]};
  }
  if (a.joints) run.task.joints = a.joints;
  if (a.features) run.task.features = a.features;
  if (a.samples) run.task.train_samples = a.samples;
  if (a.planar >= 0.0) run.task.planar_fraction = a.planar;
  const TrainResult r = train(run.config, make_toy_task(run.task));
  emit(c, io::trace_csv(r.trace));
  std::fprintf(stderr, "final_joint_error_cells=%.17g\n", r.final_joint_error);
}

struct AblationArgs {
  std::string mpjpe, labels, in;
};

std::vector<AblationInput> read_ablation_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path);
  std::vector<AblationInput> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": expected description,mpjpe");
    }
    const std::string value = line.substr(comma + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      std::string desc = line.substr(0, comma);
      if (desc.size() >= 2 && desc.front() == '"' && desc.back() == '"') {
        desc = desc.substr(1, desc.size() - 2);
      }
      rows.push_back({desc, v});
    } catch (const std::invalid_argument&) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw FormatError(path + ":" + std::to_string(lineno) + ": bad MPJPE '" + value + "'");
    }
  }
  return rows;
}

void ablation_report_cmd(const Common& c, const AblationArgs& a) {
  std::vector<AblationInput> rows;
  if (!a.in.empty()) {
    rows = read_ablation_csv(a.in);
  } else if (!a.mpjpe.empty()) {
    const auto values = parse_list(a.mpjpe, "--mpjpe");
    std::vector<std::string> labels;
    if (!a.labels.empty()) {
      std::stringstream ss(a.labels);
      std::string part;
      while (std::getline(ss, part, ',')) labels.push_back(part);
      if (labels.size() != values.size()) throw InvalidInput("--labels and --mpjpe differ in length");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      rows.push_back({labels.empty() ? "row " + std::to_string(i) : labels[i], values[i]});
    }
  } else {
    throw InvalidInput("ablation-report needs --mpjpe or --in");
  }
  emit(c, ablation_csv(ablation_report(rows)));
}

struct ValidateArgs {
  std::string in;
};

int validate_cmd(const Common& c, const ValidateArgs& a) {
  const auto diags = io::validate_pose_file(a.in);
  Json list = Json::array();
  for (const auto& d : diags) {
    Json j{{"message", d.message}};
    if (d.frame) j["frame"] = *d.frame;
    if (d.joint) j["joint"] = *d.joint;
    if (d.axis) j["axis"] = std::string(1, "xyz"[*d.axis]);
    list.push_back(std::move(j));
  }
  emit(c, Json{{"file", a.in}, {"valid", diags.empty()}, {"diagnostics", std::move(list)}});
  return diags.empty() ? 0 : 1;
}

void error_record(const std::string& kind, const std::string& message) {
  std::cerr << Json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integral pose regression toolkit"};
  app.require_subcommand(1);
  Common common;
  std::function<int()> action;

  auto add = [&](const std::string& name, const std::string& help, bool skeleton = false) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--out", common.out, "Output path (stdout when omitted)");
    sub->add_option("--units", common.units, "Assert the units tag of the primary input");
    if (skeleton) sub->add_option("--skeleton", common.skeleton, "Skeleton JSON (default h36m17)");
    return sub;
  };

  FitCameraArgs fit;
  auto* s = add("fit-camera", "Fit a weak-perspective camera per frame");
  s->add_option("--points3d", fit.points3d, "3D pose file (mm)")->required();
  s->add_option("--points2d", fit.points2d, "2D keypoint file (px)")->required();
  s->callback([&] { action = [&] { fit_camera(common, fit); return 0; }; });

  ProjectArgs proj;
  s = add("project", "Project mm poses to image pixels");
  s->add_option("--points3d", proj.points3d, "3D pose file (mm)")->required();
  s->add_option("--cameras", proj.cameras, "Camera list from fit-camera")->required();
  s->callback([&] { action = [&] { project_cmd(common, proj); return 0; }; });

  RescaleArgs resc;
  s = add("rescale-bones", "Rescale pixel predictions to mm by bone length", true);
  s->add_option("--in", resc.in, "Pixel pose file")->required();
  s->add_option("--bone-policy", resc.policy, "per-frame | explicit:<mm> | dataset:<file>")
      ->required();
  s->add_option("--reference", resc.reference, "mm pose file for the per-frame policy");
  s->callback([&] { action = [&] { rescale_bones(common, resc); return 0; }; });

  EvaluateArgs ev;
  s = add("evaluate", "Root-aligned MPJPE report (.json or .csv by --out extension)", true);
  s->add_option("--pred", ev.pred, "Predicted poses (mm)")->required();
  s->add_option("--gt", ev.gt, "Ground-truth poses (mm)")->required();
  s->callback([&] { action = [&] { evaluate(common, ev); return 0; }; });

  SoftArgmaxArgs sa;
  s = add("soft-argmax", "Decode a likelihood grid into joint coordinates (cells)");
  s->add_option("--grid", sa.grid, "Grid file")->required();
  s->callback([&] { action = [&] { soft_argmax_cmd(common, sa); return 0; }; });

  FlipMergeArgs fm;
  s = add("flip-merge", "Average a prediction with its mirrored-input prediction", true);
  s->add_option("--pred", fm.pred, "Prediction on the original patch")->required();
  s->add_option("--flipped", fm.flipped, "Prediction on the mirrored patch")->required();
  s->add_option("--width", fm.width, "Patch width the x coordinates refer to")->required();
  s->callback([&] { action = [&] { flip_merge_cmd(common, fm); return 0; }; });

  EnsembleArgs ens;
  s = add("ensemble", "Average predictions from several models");
  s->add_option("--in", ens.inputs, "Pose files (repeatable)")->required();
  s->add_option("--weights", ens.weights, "Comma-separated weights");
  s->callback([&] { action = [&] { ensemble(common, ens); return 0; }; });

  AugmentArgs aug;
  s = add("augment-sample", "Draw seeded augmentation parameters and patch transforms");
  s->add_option("--box", aug.box, "Person box cx,cy,w,h")->required();
  s->add_option("--seed", aug.seed, "RNG seed")->required();
  s->add_option("--count", aug.count, "Number of draws");
  s->add_option("--patch-size", aug.patch_size, "Patch WxH");
  s->callback([&] { action = [&] { augment_sample(common, aug); return 0; }; });

  TrainArgs tr;
  s = add("train-toy", "Train the toy soft-argmax model and write the loss trace CSV");
  s->add_option("--seed", tr.seed, "Initialisation and minibatch seed")->required();
  s->add_option("--steps", tr.steps, "SGD steps");
  s->add_option("--lr", tr.lr, "Learning rate");
  s->add_option("--batch-size", tr.batch, "Minibatch size");
  s->add_option("--grid-size", tr.grid_size, "Grid DxHxW");
  s->add_option("--joints", tr.joints, "Joints");
  s->add_option("--features", tr.features, "Input features");
  s->add_option("--samples", tr.samples, "Training samples");
  s->add_option("--planar-fraction", tr.planar, "Fraction of samples without z supervision");
  s->add_flag("--mixed", tr.mixed, "Start from the mixed 2D/3D reference task");
  s->callback([&] { action = [&] { train_toy(common, tr); return 0; }; });

  AblationArgs ab;
  s = add("ablation-report", "Relative improvement of each row over the previous one");
  s->add_option("--mpjpe", ab.mpjpe, "Comma-separated MPJPE values in mm");
  s->add_option("--labels", ab.labels, "Comma-separated row descriptions");
  s->add_option("--in", ab.in, "CSV of description,mpjpe");
  s->callback([&] { action = [&] { ablation_report_cmd(common, ab); return 0; }; });

  ValidateArgs va;
  s = add("validate", "Check a pose file and list every problem found");
  s->add_option("--in", va.in, "Pose file")->required();
  s->callback([&] { action = [&] { return validate_cmd(common, va); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record("usage", e.what());
    return 2;
  }

  try {
    return action();
  } catch (const Error& e) {
    error_record(e.kind(), e.what());
  } catch (const std::exception& e) {
    error_record("internal", e.what());
  }
  return 1;
}
