#include "gesture/features.hpp"

#include <cmath>
#include <numbers>

#include "gesture/errors.hpp"

namespace gesture {

namespace {

constexpr double kDegreesPerRadian = 180.0 / std::numbers::pi;

template <typename RowFn>
FeatureMatrix featurize(const SkeletonSequence& seq, std::size_t cols, RowFn&& row_fn) {
  if (seq.empty()) throw EmptyStream();
  FeatureMatrix m(seq.size(), cols);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    try {
      auto row = row_fn(seq.frames[t]);
      std::copy(row.begin(), row.end(), m.row(t).begin());
    } catch (const Error& e) {
      throw FrameError(t + 1, e.what());
    }
  }
  return m;
}

// Angle between v and the axis whose component is `along`; `across` is the
// length of the perpendicular part. atan2 stays accurate near 0 and 180 degrees
// where arccos loses half its digits.
double axis_angle(double along, double across) { return std::atan2(across, along) * kDegreesPerRadian; }

}  // namespace

Vec3 triangle_centroid(const Vec3& a, const Vec3& b, const Vec3& c) {
  return Vec3{(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0, (a.z + b.z + c.z) / 3.0};
}

double normalized_distance(const Vec3& c, const Vec3& s) {
  const double depth_sum = c.z + s.z;
  if (!(depth_sum > 0.0)) throw DegenerateDepth(0, depth_sum / 2.0);
  return 2.0 * distance(c, s) / depth_sum;
}

SingleFeatureRow frame_features_single(const Frame& frame) {
  SingleFeatureRow row{};
  const Vec3& spine = frame[Joint::Spine];
  for (std::size_t i = 0; i < kArmTriangles.size(); ++i) {
    const auto& [a, b, c] = kArmTriangles[i];
    const Vec3 centroid = triangle_centroid(frame[a], frame[b], frame[c]);
    if (!(centroid.z + spine.z > 0.0)) throw DegenerateDepth(i + 1, (centroid.z + spine.z) / 2.0);
    row[i] = normalized_distance(centroid, spine);
  }
  return row;
}

FeatureMatrix sequence_features_single(const SkeletonSequence& seq) {
  return featurize(seq, kSingleFeatureCount, frame_features_single);
}

std::vector<std::string> single_feature_header() { return {"d1", "d2", "d3", "d4", "d5", "d6"}; }

Vec3 mean_joint(const std::array<Vec3, 4>& points, const std::array<double, 4>& weights) {
  Vec3 sum;
  for (std::size_t i = 0; i < 4; ++i) sum += weights[i] * points[i];
  return sum / 4.0;
}

Vec3 mean_joint(const Frame& frame, MeanJointId which) {
  const LimbWeights& limb = kMeanJoints[static_cast<std::size_t>(which) - 1];
  return mean_joint({frame[limb.joints[0]], frame[limb.joints[1]], frame[limb.joints[2]], frame[limb.joints[3]]},
                    limb.weights);
}

DirectionCosines direction_cosines(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0)) throw DegenerateDirection(0);
  return {v.x / n, v.y / n, v.z / n};
}

DirectionAngles direction_angles(const Vec3& v) {
  if (!(norm(v) > 0.0)) throw DegenerateDirection(0);
  return {axis_angle(v.x, std::hypot(v.y, v.z)), axis_angle(v.y, std::hypot(v.x, v.z)),
          axis_angle(v.z, std::hypot(v.x, v.y))};
}

TwoPersonFeatureRow frame_features_two_person(const Frame& frame) {
  TwoPersonFeatureRow row{};
  for (std::size_t i = 0; i < kMeanJoints.size(); ++i) {
    const Vec3 j = mean_joint(frame, static_cast<MeanJointId>(i + 1));
    if (!(norm(j) > 0.0)) throw DegenerateDirection(i + 1);
    const DirectionAngles a = direction_angles(j);
    row[3 * i] = a.alpha;
    row[3 * i + 1] = a.beta;
    row[3 * i + 2] = a.gamma;
  }
  return row;
}

FeatureMatrix sequence_features_two_person(const SkeletonSequence& seq) {
  return featurize(seq, kTwoPersonFeatureCount, frame_features_two_person);
}

std::vector<std::string> two_person_feature_header() {
  std::vector<std::string> header;
  for (int j = 1; j <= 4; ++j)
    for (const char* angle : {"a", "b", "g"}) header.push_back(std::string(angle) + "J" + std::to_string(j));
  return header;
}

FeatureKind parse_feature_kind(const std::string& name) {
  if (name == "single") return FeatureKind::single;
  if (name == "two-person" || name == "two_person") return FeatureKind::two_person;
  throw InvalidArgument("unknown feature mode '" + name + "' (expected single or two-person)");
}

std::string to_string(FeatureKind kind) { return kind == FeatureKind::single ? "single" : "two-person"; }

FeatureMatrix sequence_features(const SkeletonSequence& seq, FeatureKind kind) {
  return kind == FeatureKind::single ? sequence_features_single(seq) : sequence_features_two_person(seq);
}

std::vector<std::string> feature_header(FeatureKind kind) {
  return kind == FeatureKind::single ? single_feature_header() : two_person_feature_header();
}

}  // namespace gesture
