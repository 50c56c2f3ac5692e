#include "ipose/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ipose/error.hpp"

namespace ipose::io {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPoseFormat = "ipose-pose";
constexpr const char* kGridFormat = "ipose-grid";
constexpr int kVersion = 1;

Json vec_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

double number_or_nan(const Json& v) {
  return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PoseFile make_pose_file(std::vector<Pose> frames, std::string skeleton) {
  PoseFile f;
  if (!frames.empty()) {
    f.units = frames.front().units;
    f.space = frames.front().space;
    f.joints = frames.front().size();
  }
  f.skeleton = std::move(skeleton);
  f.frames = std::move(frames);
  return f;
}

std::string Diagnostic::describe() const {
  std::string out;
  if (frame) out += "frame " + std::to_string(*frame) + ": ";
  if (joint) out += "joint " + std::to_string(*joint) + ": ";
  if (axis) out += std::string("axis ") + "xyz"[*axis] + ": ";
  return out + message;
}

std::vector<Diagnostic> validate_pose_json(const Json& doc) {
  std::vector<Diagnostic> diags;
  auto report = [&](std::string msg, std::optional<std::size_t> f = {},
                    std::optional<std::size_t> j = {}, std::optional<std::size_t> a = {}) {
    diags.push_back(Diagnostic{f, j, a, std::move(msg)});
  };
  if (!doc.is_object()) {
    report("document is not a JSON object");
    return diags;
  }
  if (doc.contains("format") && doc["format"] != kPoseFormat) {
    report("format tag is not '" + std::string(kPoseFormat) + "'");
  }
  if (!doc.contains("units") || !doc["units"].is_string()) {
    report("missing mandatory 'units' tag");
  } else {
    try {
      parse_units(doc["units"].get<std::string>());
    } catch (const Error& e) {
      report(e.what());
    }
  }
  if (doc.contains("space")) {
    try {
      parse_space(doc["space"].get<std::string>());
    } catch (const std::exception& e) {
      report(std::string("bad 'space' tag: ") + e.what());
    }
  }
  std::optional<std::size_t> joints;
  if (!doc.contains("joints") || !doc["joints"].is_number_unsigned()) {
    report("missing or non-integer 'joints' count");
  } else {
    joints = doc["joints"].get<std::size_t>();
  }
  if (!doc.contains("frames") || !doc["frames"].is_array()) {
    report("missing 'frames' array");
    return diags;
  }
  const Json& frames = doc["frames"];
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const Json& frame = frames[f];
    if (!frame.is_array()) {
      report("frame is not an array", f);
      continue;
    }
    if (joints && frame.size() != *joints) {
      report("has " + std::to_string(frame.size()) + " joints, header says " +
                 std::to_string(*joints),
             f);
    }
    for (std::size_t j = 0; j < frame.size(); ++j) {
      const Json& p = frame[j];
      if (!p.is_array() || p.size() != 3) {
        report("coordinate is not an [x, y, z] triple", f, j);
        continue;
      }
      for (std::size_t a = 0; a < 3; ++a) {
        if (!p[a].is_number() || !std::isfinite(p[a].get<double>())) {
          report("coordinate is NaN or non-finite", f, j, a);
        }
      }
    }
  }
  if (doc.contains("valid")) {
    const Json& valid = doc["valid"];
    if (!valid.is_array() || valid.size() != frames.size()) {
      report("'valid' must hold one mask per frame");
    } else {
      for (std::size_t f = 0; f < valid.size(); ++f) {
        if (!valid[f].is_array() || (joints && valid[f].size() != *joints)) {
          report("validity mask does not match the joint count", f);
          continue;
        }
        for (std::size_t j = 0; j < valid[f].size(); ++j) {
          if (!valid[f][j].is_boolean()) report("validity entry is not a boolean", f, j);
        }
      }
    }
  }
  return diags;
}

std::vector<Diagnostic> validate_pose_file(const fs::path& path) {
  return validate_pose_json(read_json(path));
}

Json to_json(const PoseFile& file) {
  Json frames = Json::array();
  for (const Pose& p : file.frames) {
    if (p.units != file.units || p.space != file.space) {
      throw UnitError("frame tags disagree with the pose file header");
    }
    Json frame = Json::array();
    for (const Vec3& v : p.joints) frame.push_back(vec_json(v));
    frames.push_back(std::move(frame));
  }
  Json doc = {{"format", kPoseFormat},
              {"version", kVersion},
              {"units", std::string(to_string(file.units))},
              {"space", std::string(to_string(file.space))},
              {"skeleton", file.skeleton},
              {"joints", file.joints},
              {"frames", std::move(frames)}};
  if (!file.valid.empty()) doc["valid"] = file.valid;
  return doc;
}

PoseFile pose_file_from_json(const Json& doc) {
  const auto diags = validate_pose_json(doc);
  if (!diags.empty()) {
    std::string msg = "invalid pose file (" + std::to_string(diags.size()) + " problems): ";
    for (std::size_t i = 0; i < diags.size() && i < 5; ++i) {
      if (i) msg += "; ";
      msg += diags[i].describe();
    }
    throw FormatError(msg);
  }
  PoseFile f;
  f.units = parse_units(doc["units"].get<std::string>());
  f.space = doc.contains("space") ? parse_space(doc["space"].get<std::string>()) : Space::Absolute;
  f.skeleton = doc.value("skeleton", std::string{});
  f.joints = doc["joints"].get<std::size_t>();
  for (const Json& frame : doc["frames"]) {
    Pose p{f.units, f.space, {}};
    p.joints.reserve(frame.size());
    for (const Json& v : frame) {
      p.joints.push_back({number_or_nan(v[0]), number_or_nan(v[1]), number_or_nan(v[2])});
    }
    f.frames.push_back(std::move(p));
  }
  if (doc.contains("valid")) f.valid = doc["valid"].get<std::vector<std::vector<bool>>>();
  return f;
}

PoseFile read_pose_file(const fs::path& path) {
  try {
    return pose_file_from_json(read_json(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_pose_file(const fs::path& path, const PoseFile& file) {
  write_json(path, to_json(file));
}

Json to_json(const Skeleton& s) {
  Json pairs = Json::array();
  for (const auto& [l, r] : s.flip_pairs) pairs.push_back({l, r});
  return {{"name", s.name},
          {"joints", s.joint_names},
          {"parents", s.parent},
          {"flip_pairs", pairs},
          {"root", s.root}};
}

Skeleton skeleton_from_json(const Json& doc) {
  Skeleton s;
  try {
    s.name = doc.value("name", std::string{});
    s.joint_names = doc.at("joints").get<std::vector<std::string>>();
    s.parent = doc.at("parents").get<std::vector<int>>();
    for (const Json& p : doc.value("flip_pairs", Json::array())) {
      s.flip_pairs.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
    }
    s.root = doc.at("root").get<std::size_t>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed skeleton: ") + e.what());
  }
  s.validate();
  return s;
}

Skeleton read_skeleton(const fs::path& path) { return skeleton_from_json(read_json(path)); }

Json to_json(const WeakPerspectiveCamera& c) {
  return {{"scale", c.scale}, {"tx", c.tx}, {"ty", c.ty}};
}

WeakPerspectiveCamera camera_from_json(const Json& doc) {
  WeakPerspectiveCamera c;
  try {
    c.scale = doc.at("scale").get<double>();
    c.tx = doc.at("tx").get<double>();
    c.ty = doc.at("ty").get<double>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed camera record: ") + e.what());
  }
  c.validate();
  return c;
}

Json to_json(const PerFrameFitReport& report) {
  Json cams = Json::array();
  for (const auto& fit : report.fits) {
    if (!fit) {
      cams.push_back(nullptr);
      continue;
    }
    Json c = to_json(fit->camera);
    c["rms_residual"] = fit->diagnostics.rms_residual;
    c["inlier_count"] = fit->diagnostics.inlier_count;
    cams.push_back(std::move(c));
  }
  Json failures = Json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"frame", f.frame}, {"kind", f.kind}, {"message", f.message}});
  }
  return {{"cameras", std::move(cams)}, {"failures", std::move(failures)}};
}

Json to_json(const LikelihoodGrid& grid) {
  const auto& d = grid.dims();
  return {{"format", kGridFormat},
          {"version", kVersion},
          {"dims", {d.depth, d.height, d.width}},
          {"joints", grid.joints()},
          {"layout", "joint,z,y,x"},
          {"scores", std::vector<double>(grid.scores().begin(), grid.scores().end())}};
}

LikelihoodGrid grid_from_json(const Json& doc) {
  try {
    if (doc.contains("format") && doc["format"] != kGridFormat) {
      throw FormatError("format tag is not '" + std::string(kGridFormat) + "'");
    }
    const auto dims = doc.at("dims").get<std::vector<std::size_t>>();
    if (dims.size() != 3) throw FormatError("grid 'dims' must be [depth, height, width]");
    std::vector<double> scores;
    scores.reserve(doc.at("scores").size());
    for (const Json& v : doc.at("scores")) scores.push_back(number_or_nan(v));
    return LikelihoodGrid(GridDims{dims[0], dims[1], dims[2]}, doc.at("joints").get<std::size_t>(),
                          std::move(scores));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed grid file: ") + e.what());
  }
}

std::vector<PersonBox> boxes_from_json(const Json& doc) {
  std::vector<PersonBox> out;
  try {
    for (const Json& b : doc.at("boxes")) {
      PersonBox box{b.at("cx").get<double>(), b.at("cy").get<double>(), b.at("w").get<double>(),
                    b.at("h").get<double>()};
      box.validate();
      out.push_back(box);
    }
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed box list: ") + e.what());
  }
  return out;
}

Json to_json(const EvalReport& report, const Skeleton& skeleton) {
  Json per_joint = Json::object();
  for (std::size_t j = 0; j < report.per_joint_error.size(); ++j) {
    const std::string name =
        j < skeleton.joint_names.size() ? skeleton.joint_names[j] : std::to_string(j);
    per_joint[name] = report.per_joint_error[j];
  }
  return {{"mpjpe_mm", report.mpjpe},
          {"frames", report.frames},
          {"per_joint_error_mm", std::move(per_joint)},
          {"per_frame_error_mm", report.per_frame_error}};
}

std::string eval_report_csv(const EvalReport& report, const Skeleton& skeleton) {
  std::string out = "joint,error_mm\n";
  for (std::size_t j = 0; j < report.per_joint_error.size(); ++j) {
    const std::string name =
        j < skeleton.joint_names.size() ? skeleton.joint_names[j] : std::to_string(j);
    out += name + "," + fmt(report.per_joint_error[j]) + "\n";
  }
  out += "mpjpe," + fmt(report.mpjpe) + "\n";
  return out;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "step,train_loss,val_loss,lr\n";
  for (const auto& r : trace) {
    out += std::to_string(r.step) + "," + fmt(r.train_loss) + "," + fmt(r.val_loss) + "," +
           fmt(r.lr) + "\n";
  }
  return out;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw FormatError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw FormatError("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

void write_json(const fs::path& path, const Json& doc) { write_atomic(path, doc.dump(1) + "\n"); }

}  // namespace ipose::io
