#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gesture/vec3.hpp"

namespace gesture {

/// The twenty tracked joints, in the order they appear in a skeleton file.
enum class Joint : std::size_t {
  HipCenter,
  Spine,
  ShoulderCenter,
  Head,
  ShoulderLeft,
  ElbowLeft,
  WristLeft,
  HandLeft,
  ShoulderRight,
  ElbowRight,
  WristRight,
  HandRight,
  HipLeft,
  KneeLeft,
  AnkleLeft,
  FootLeft,
  HipRight,
  KneeRight,
  AnkleRight,
  FootRight,
};

inline constexpr std::size_t kJointCount = 20;
inline constexpr std::size_t kAxes = 3;
inline constexpr std::size_t kTokensPerFrame = kJointCount * kAxes;

constexpr std::size_t index_of(Joint j) { return static_cast<std::size_t>(j); }

/// 1-based file position (1..20) of a joint.
constexpr std::size_t file_number(Joint j) { return index_of(j) + 1; }

/// Joint at 1-based file position; throws InvalidArgument outside 1..20.
Joint joint_from_file_number(std::size_t number);

std::string_view joint_name(Joint j);

struct Frame {
  std::array<Vec3, kJointCount> joints{};

  const Vec3& operator[](Joint j) const { return joints[index_of(j)]; }
  Vec3& operator[](Joint j) { return joints[index_of(j)]; }

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline const Vec3& joint_position(const Frame& frame, Joint j) { return frame[j]; }

struct SkeletonSequence {
  std::vector<Frame> frames;
  double frame_rate = 30.0;
  std::optional<std::string> source_label;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
};

/// Reads whitespace-separated floats, 60 per frame, frame-major then
/// joint-major then x, y, z. Rejects non-finite values.
SkeletonSequence parse_skeleton_stream(std::string_view text);
SkeletonSequence parse_skeleton_stream(std::istream& in);
SkeletonSequence read_skeleton_file(const std::string& path);

/// One frame per line, 60 shortest-round-trip decimals. Throws EmptyStream
/// for a sequence with no frames.
std::string serialize_skeleton_stream(const SkeletonSequence& seq);
void write_skeleton_file(const std::string& path, const SkeletonSequence& seq);

/// CSV with header j01_x,j01_y,...,j20_z and one row per frame.
std::string skeleton_to_csv(const SkeletonSequence& seq);

/// Shortest decimal that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace gesture
