#pragma once

#include <array>
#include <string>
#include <vector>

#include "gesture/feature_matrix.hpp"
#include "gesture/skeleton.hpp"

namespace gesture {

// ---------------------------------------------------------------------------
// Single-person hand gestures: six arm triangles, distance from each centroid
// to the spine joint divided by the mean depth of the two points.
// ---------------------------------------------------------------------------

using TriangleSpec = std::array<Joint, 3>;

inline constexpr std::size_t kSingleFeatureCount = 6;

/// Triangles 1..6 in feature-column order.
inline constexpr std::array<TriangleSpec, kSingleFeatureCount> kArmTriangles = {{
    {Joint::ShoulderCenter, Joint::ShoulderLeft, Joint::ElbowLeft},
    {Joint::ShoulderCenter, Joint::ShoulderRight, Joint::ElbowRight},
    {Joint::ShoulderLeft, Joint::ElbowLeft, Joint::WristLeft},
    {Joint::ShoulderRight, Joint::ElbowRight, Joint::WristRight},
    {Joint::ElbowLeft, Joint::WristLeft, Joint::HandLeft},
    {Joint::ElbowRight, Joint::WristRight, Joint::HandRight},
}};

using SingleFeatureRow = std::array<double, kSingleFeatureCount>;

Vec3 triangle_centroid(const Vec3& a, const Vec3& b, const Vec3& c);

/// 2*|c - s| / (c.z + s.z). Throws DegenerateDepth when the mean depth is <= 0.
double normalized_distance(const Vec3& c, const Vec3& s);

SingleFeatureRow frame_features_single(const Frame& frame);

/// T x 6 matrix; frame errors are rethrown as FrameError naming the frame.
FeatureMatrix sequence_features_single(const SkeletonSequence& seq);

std::vector<std::string> single_feature_header();

// ---------------------------------------------------------------------------
// Two-person interactions: per person, four weighted mean joints (two arms,
// two legs) and the angles each makes with the +x, +y, +z axes.
// ---------------------------------------------------------------------------

enum class MeanJointId { LeftArm = 1, RightArm = 2, LeftLeg = 3, RightLeg = 4 };

struct LimbWeights {
  std::array<Joint, 4> joints;
  std::array<double, 4> weights;
};

inline constexpr double kShoulderWeight = 0.271;
inline constexpr double kElbowWeight = 0.449;
inline constexpr double kWristWeight = 0.149;
inline constexpr double kHandWeight = 0.131;
inline constexpr double kHipWeight = 0.348;
inline constexpr double kKneeWeight = 0.437;
inline constexpr double kAnkleWeight = 0.119;
inline constexpr double kFootWeight = 0.096;

inline constexpr std::array<double, 4> kArmWeights = {kShoulderWeight, kElbowWeight, kWristWeight, kHandWeight};
inline constexpr std::array<double, 4> kLegWeights = {kHipWeight, kKneeWeight, kAnkleWeight, kFootWeight};

/// J1..J4 in feature order.
inline constexpr std::array<LimbWeights, 4> kMeanJoints = {{
    {{Joint::ShoulderLeft, Joint::ElbowLeft, Joint::WristLeft, Joint::HandLeft}, kArmWeights},
    {{Joint::ShoulderRight, Joint::ElbowRight, Joint::WristRight, Joint::HandRight}, kArmWeights},
    {{Joint::HipLeft, Joint::KneeLeft, Joint::AnkleLeft, Joint::FootLeft}, kLegWeights},
    {{Joint::HipRight, Joint::KneeRight, Joint::AnkleRight, Joint::FootRight}, kLegWeights},
}};

inline constexpr std::size_t kTwoPersonFeatureCount = 12;

using TwoPersonFeatureRow = std::array<double, kTwoPersonFeatureCount>;

struct DirectionCosines {
  double cos_alpha;
  double cos_beta;
  double cos_gamma;
};

/// Angles with the +x, +y, +z axes, degrees in [0, 180].
struct DirectionAngles {
  double alpha;
  double beta;
  double gamma;
};

/// (w1*p1 + w2*p2 + w3*p3 + w4*p4) / 4.
Vec3 mean_joint(const std::array<Vec3, 4>& points, const std::array<double, 4>& weights);

/// Weighted mean joint `which` of a frame.
Vec3 mean_joint(const Frame& frame, MeanJointId which);

/// Throws DegenerateDirection for the zero vector.
DirectionCosines direction_cosines(const Vec3& v);
DirectionAngles direction_angles(const Vec3& v);

/// (aJ1, bJ1, gJ1, aJ2, ..., gJ4).
TwoPersonFeatureRow frame_features_two_person(const Frame& frame);

FeatureMatrix sequence_features_two_person(const SkeletonSequence& seq);

std::vector<std::string> two_person_feature_header();

enum class FeatureKind { single, two_person };

FeatureKind parse_feature_kind(const std::string& name);
std::string to_string(FeatureKind kind);

FeatureMatrix sequence_features(const SkeletonSequence& seq, FeatureKind kind);
std::vector<std::string> feature_header(FeatureKind kind);

}  // namespace gesture
