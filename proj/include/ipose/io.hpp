#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipose/camera.hpp"
#include "ipose/grid.hpp"
#include "ipose/metrics.hpp"
#include "ipose/patch.hpp"
#include "ipose/pose.hpp"
#include "ipose/skeleton.hpp"
#include "ipose/trainer.hpp"

namespace ipose::io {

using Json = nlohmann::json;

/// A sequence of frames sharing one unit/space header.
struct PoseFile {
  Units units = Units::Millimeters;
  Space space = Space::Absolute;
  std::string skeleton;  // informational name; may be empty
  std::size_t joints = 0;
  std::vector<Pose> frames;
  /// Optional per-frame per-joint validity; empty means every joint is valid.
  std::vector<std::vector<bool>> valid;
};

PoseFile make_pose_file(std::vector<Pose> frames, std::string skeleton = {});

/// One invariant violation, located as precisely as possible.
struct Diagnostic {
  std::optional<std::size_t> frame;
  std::optional<std::size_t> joint;
  std::optional<std::size_t> axis;
  std::string message;

  std::string describe() const;
};

std::vector<Diagnostic> validate_pose_json(const Json& doc);
/// Throws FormatError if the file cannot be read or parsed as JSON.
std::vector<Diagnostic> validate_pose_file(const std::filesystem::path& path);

Json to_json(const PoseFile& file);
/// Throws FormatError listing the diagnostics of an invalid document.
PoseFile pose_file_from_json(const Json& doc);
PoseFile read_pose_file(const std::filesystem::path& path);
void write_pose_file(const std::filesystem::path& path, const PoseFile& file);

Json to_json(const Skeleton& s);
Skeleton skeleton_from_json(const Json& doc);
Skeleton read_skeleton(const std::filesystem::path& path);

Json to_json(const WeakPerspectiveCamera& c);
WeakPerspectiveCamera camera_from_json(const Json& doc);
Json to_json(const PerFrameFitReport& report);

Json to_json(const LikelihoodGrid& grid);
LikelihoodGrid grid_from_json(const Json& doc);

std::vector<PersonBox> boxes_from_json(const Json& doc);

Json to_json(const EvalReport& report, const Skeleton& skeleton);
std::string eval_report_csv(const EvalReport& report, const Skeleton& skeleton);

std::string trace_csv(const std::vector<TraceRow>& trace);

Json read_json(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const Json& doc);

}  // namespace ipose::io
