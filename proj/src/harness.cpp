#include "gesture/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "gesture/errors.hpp"
#include "gesture/rng.hpp"

namespace gesture {

namespace {

// ---------------------------------------------------------------------------
// Kinematic model used to build the templates. Limb targets are given in a
// per-limb frame: x points away from the body midline, y up, and negative z
// towards the sensor.
// ---------------------------------------------------------------------------

constexpr double kUpperArm = 0.26;
constexpr double kForearm = 0.31;  // elbow to hand tip
constexpr double kWristFraction = 0.74;
constexpr double kThigh = 0.43;
constexpr double kShin = 0.41;
const Vec3 kFootOffset{0.0, -0.05, -0.09};

const Vec3 kArmRest{0.07, -0.55, 0.0};
const Vec3 kLegRest{0.01, -0.82, 0.02};

enum class Side { left, right };

struct Limb {
  Joint root, middle, distal, tip;
};
constexpr Limb kLeftArm{Joint::ShoulderLeft, Joint::ElbowLeft, Joint::WristLeft, Joint::HandLeft};
constexpr Limb kRightArm{Joint::ShoulderRight, Joint::ElbowRight, Joint::WristRight, Joint::HandRight};
constexpr Limb kLeftLeg{Joint::HipLeft, Joint::KneeLeft, Joint::AnkleLeft, Joint::FootLeft};
constexpr Limb kRightLeg{Joint::HipRight, Joint::KneeRight, Joint::AnkleRight, Joint::FootRight};

Vec3 to_world(Vec3 v, Side side) {
  if (side == Side::left) v.x = -v.x;
  return v;
}

Vec3 unit(const Vec3& v) { return v / norm(v); }

// Two-link inverse kinematics: middle joint for an end point `target`
// relative to the root, bent towards `pole`.
Vec3 bend_point(const Vec3& target, double l1, double l2, const Vec3& pole) {
  double d = norm(target);
  const Vec3 dir = unit(target);
  d = std::clamp(d, std::abs(l1 - l2) + 1e-3, l1 + l2 - 1e-3);
  const double along = (l1 * l1 - l2 * l2 + d * d) / (2.0 * d);
  const double across = std::sqrt(std::max(0.0, l1 * l1 - along * along));
  Vec3 perp = pole - dot(pole, dir) * dir;
  if (norm(perp) < 1e-9) perp = Vec3{1.0, 0.0, 0.0} - dir.x * dir;
  return along * dir + across * unit(perp);
}

struct LimbPose {
  Vec3 middle, distal, tip;
};

LimbPose arm_pose(const Vec3& hand) {
  const Vec3 elbow = bend_point(hand, kUpperArm, kForearm, Vec3{0.4, -0.8, 0.45});
  const Vec3 reach = unit(hand - elbow) * kForearm;
  return {elbow, elbow + kWristFraction * reach, elbow + reach};
}

LimbPose leg_pose(const Vec3& ankle) {
  const Vec3 knee = bend_point(ankle, kThigh, kShin, Vec3{0.1, 0.0, -1.0});
  const Vec3 reach = unit(ankle - knee) * kShin;
  return {knee, knee + reach, knee + reach + kFootOffset};
}

void place_limb(Frame& f, const Limb& limb, Side side, const LimbPose& p) {
  const Vec3 root = f[limb.root];
  f[limb.middle] = root + to_world(p.middle, side);
  f[limb.distal] = root + to_world(p.distal, side);
  f[limb.tip] = root + to_world(p.tip, side);
}

// Keyframes for the four limbs plus a whole-body shift. Missing limb targets
// mean the rest position.
struct BodyKey {
  double t;
  std::optional<Vec3> left_hand;
  std::optional<Vec3> right_hand;
  std::optional<Vec3> left_ankle;
  std::optional<Vec3> right_ankle;
  Vec3 shift{};
};

GestureTemplate make_template(std::string name, const Frame& base, const std::vector<BodyKey>& keys) {
  GestureTemplate tmpl;
  tmpl.name = std::move(name);
  tmpl.base_pose = base;
  std::vector<JointTrack> tracks(kJointCount);
  for (std::size_t j = 0; j < kJointCount; ++j) tracks[j].joint = static_cast<Joint>(j);

  for (const BodyKey& key : keys) {
    Frame pose = base;
    place_limb(pose, kLeftArm, Side::left, arm_pose(key.left_hand.value_or(kArmRest)));
    place_limb(pose, kRightArm, Side::right, arm_pose(key.right_hand.value_or(kArmRest)));
    place_limb(pose, kLeftLeg, Side::left, leg_pose(key.left_ankle.value_or(kLegRest)));
    place_limb(pose, kRightLeg, Side::right, leg_pose(key.right_ankle.value_or(kLegRest)));
    for (std::size_t j = 0; j < kJointCount; ++j)
      tracks[j].keys.push_back({key.t, pose.joints[j] + key.shift - base.joints[j]});
  }
  for (auto& track : tracks) {
    const bool moves = std::any_of(track.keys.begin(), track.keys.end(),
                                   [](const Keyframe& k) { return norm(k.offset) > 0.0; });
    if (moves) tmpl.tracks.push_back(std::move(track));
  }
  return tmpl;
}

// Single-person hand gestures: performer centred in front of the sensor.
std::vector<GestureTemplate> make_hand_gestures() {
  const Frame base = standing_pose(0.0, 2.5);
  auto both = [](double t, Vec3 hand) { return BodyKey{t, hand, hand, {}, {}, {}}; };
  auto right = [](double t, Vec3 hand) { return BodyKey{t, {}, hand, {}, {}, {}}; };
  auto left = [](double t, Vec3 hand) { return BodyKey{t, hand, {}, {}, {}, {}}; };
  const Vec3 r = kArmRest;

  const Vec3 wave_out{0.30, 0.28, -0.08}, wave_in{0.10, 0.32, -0.08};
  const Vec3 ear{-0.12, 0.22, -0.04};
  const Vec3 chamber{0.02, -0.15, -0.12}, strike{-0.02, 0.02, -0.55};
  const Vec3 clap_open{0.20, 0.0, -0.35}, clap_shut{-0.16, 0.0, -0.38};

  std::vector<GestureTemplate> out;
  auto add = [&](const char* name, std::vector<BodyKey> keys) { out.push_back(make_template(name, base, keys)); };

  add("waving", {right(0, r), right(0.2, wave_out), right(0.35, wave_in), right(0.5, wave_out), right(0.65, wave_in),
                 right(0.8, wave_out), right(1, r)});
  add("answering-a-call", {right(0, r), right(0.35, ear), right(1, ear)});
  add("stop", {right(0, r), right(0.3, {0.05, 0.05, -0.52}), right(1, {0.05, 0.05, -0.52})});
  add("slide", {right(0, r), right(0.25, {0.25, 0.25, -0.42}), right(0.75, {0.25, -0.30, -0.42}),
                right(1, {0.25, -0.30, -0.42})});
  add("punching", {right(0, r), right(0.15, chamber), right(0.3, strike), right(0.45, chamber), right(0.6, strike),
                   right(0.75, chamber), right(1, r)});
  add("picking-up-an-object", {right(0, r), right(0.4, {0.10, -0.45, -0.30}), right(0.6, {0.10, -0.45, -0.30}),
                               right(1, {0.05, -0.20, -0.20})});
  add("move-up", {right(0, {0.10, -0.30, -0.35}), right(1, {0.10, 0.50, -0.15})});
  add("move-down", {right(0, {0.10, 0.50, -0.15}), right(1, {0.10, -0.30, -0.35})});
  add("move-left", {right(0, {0.40, 0.0, -0.30}), right(1, {-0.30, 0.0, -0.35})});
  add("move-right", {left(0, {0.40, 0.0, -0.30}), left(1, {-0.30, 0.0, -0.35})});
  add("disgust", {both(0, r), both(0.3, {-0.05, 0.22, -0.15}), both(0.7, {0.25, 0.25, -0.38}),
                  both(1, {0.25, 0.25, -0.38})});
  add("clap", {both(0, r), both(0.15, clap_open), both(0.3, clap_shut), both(0.45, clap_open), both(0.6, clap_shut),
               both(0.75, clap_open), both(0.9, clap_shut), both(1, clap_shut)});
  add("greeting", {both(0, r), both(0.4, {-0.16, 0.05, -0.20}), both(1, {-0.16, 0.05, -0.20})});
  add("please", {both(0, r), both(0.4, {0.18, -0.18, -0.40}), both(1, {0.18, -0.18, -0.40})});
  add("push", {both(0, {0.0, 0.02, -0.12}), both(0.25, {0.0, 0.02, -0.12}), both(0.7, {0.0, 0.05, -0.55}),
               both(1, {0.0, 0.05, -0.55})});
  add("grab", {both(0, r), both(0.35, {0.05, -0.05, -0.55}), both(0.6, {0.0, -0.10, -0.50}),
               both(1, {0.02, -0.15, -0.10})});
  add("zoom-in", {both(0, {-0.15, 0.05, -0.35}), both(1, {0.40, 0.08, -0.35})});
  add("zoom-out", {both(0, {0.40, 0.08, -0.35}), both(1, {-0.15, 0.05, -0.35})});
  add("move-front", {both(0, {0.10, 0.30, -0.08}), both(1, {0.10, 0.30, -0.52})});
  add("move-back", {both(0, {0.10, 0.30, -0.52}), both(1, {0.10, 0.30, -0.08})});
  return out;
}

// Interaction actions for the performer on the right (+x) of the scene; the
// partner is towards -x, which is outward for this performer's left limbs.
std::vector<GestureTemplate> make_interaction_actions() {
  const Frame base = standing_pose(0.6, 2.8);
  const Vec3 r = kArmRest;
  const Vec3 step_fwd{0.02, -0.80, -0.18}, step_back{0.02, -0.80, 0.16};
  auto walk = [&](double t, double shift_x, bool phase) {
    return BodyKey{t, {}, {}, phase ? step_fwd : step_back, phase ? step_back : step_fwd, {shift_x, 0.0, 0.0}};
  };
  auto lhand = [](double t, Vec3 hand, Vec3 shift = {}) { return BodyKey{t, hand, {}, {}, {}, shift}; };
  auto hands = [](double t, Vec3 hand, Vec3 shift = {}) { return BodyKey{t, hand, hand, {}, {}, shift}; };
  auto kick = [](double t, Vec3 ankle) { return BodyKey{t, {}, {}, ankle, {}, {}}; };

  const Vec3 shake_a{0.25, -0.20, -0.35}, shake_b{0.25, -0.12, -0.35};
  const Vec3 guard{0.05, 0.10, -0.10}, jab{0.52, 0.15, -0.10};
  const Vec3 knee_up{0.15, -0.45, -0.35}, kick_out{0.55, -0.45, -0.30};

  std::vector<GestureTemplate> out;
  auto add = [&](const char* name, std::vector<BodyKey> keys) { out.push_back(make_template(name, base, keys)); };

  add("approaching", {walk(0, 0.0, true), walk(0.25, -0.09, false), walk(0.5, -0.18, true), walk(0.75, -0.27, false),
                      walk(1, -0.35, true)});
  add("departing", {walk(0, 0.0, true), walk(0.25, 0.09, false), walk(0.5, 0.18, true), walk(0.75, 0.27, false),
                    walk(1, 0.35, true)});
  add("exchanging", {lhand(0, r), lhand(0.4, {0.35, -0.05, -0.25}), lhand(0.6, {0.35, -0.05, -0.25}),
                     lhand(1, {0.07, -0.30, -0.15})});
  add("hugging", {hands(0, r), hands(0.4, {0.35, 0.15, -0.30}, {-0.08, 0, 0}),
                  hands(0.7, {-0.10, 0.15, -0.35}, {-0.15, 0, 0}), hands(1, {-0.10, 0.15, -0.35}, {-0.15, 0, 0})});
  add("shaking-hands", {lhand(0, r), lhand(0.3, shake_a), lhand(0.45, shake_b), lhand(0.6, shake_a),
                        lhand(0.75, shake_b), lhand(1, shake_a)});
  add("punching", {lhand(0, r), lhand(0.2, guard), lhand(0.35, jab), lhand(0.5, guard), lhand(0.65, jab),
                   lhand(1, r)});
  add("pushing", {hands(0, r), hands(0.3, {0.05, 0.10, -0.15}), hands(0.6, {0.45, 0.10, -0.25}, {-0.08, 0, 0}),
                  hands(1, {0.45, 0.10, -0.25}, {-0.08, 0, 0})});
  add("kicking", {kick(0, kLegRest), kick(0.35, knee_up), kick(0.5, kick_out), kick(0.65, knee_up),
                  kick(1, kLegRest)});
  return out;
}

constexpr std::array<std::pair<Joint, Joint>, 8> kMirrorPairs = {{
    {Joint::ShoulderLeft, Joint::ShoulderRight},
    {Joint::ElbowLeft, Joint::ElbowRight},
    {Joint::WristLeft, Joint::WristRight},
    {Joint::HandLeft, Joint::HandRight},
    {Joint::HipLeft, Joint::HipRight},
    {Joint::KneeLeft, Joint::KneeRight},
    {Joint::AnkleLeft, Joint::AnkleRight},
    {Joint::FootLeft, Joint::FootRight},
}};

Joint mirror_joint(Joint j) {
  for (const auto& [l, r] : kMirrorPairs) {
    if (j == l) return r;
    if (j == r) return l;
  }
  return j;
}

Vec3 reflect(Vec3 v) {
  v.x = -v.x;
  return v;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    if (value.empty() || value.front() == '-') throw std::invalid_argument(value);
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw InvalidArgument("config key '" + key + "': expected a non-negative integer, got '" + value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::logic_error&) {
    throw InvalidArgument("config key '" + key + "': expected a number, got '" + value + "'");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

Vec3 JointTrack::offset_at(double t) const {
  if (keys.empty()) return {};
  if (t <= keys.front().t) return keys.front().offset;
  if (t >= keys.back().t) return keys.back().offset;
  auto hi = std::upper_bound(keys.begin(), keys.end(), t, [](double v, const Keyframe& k) { return v < k.t; });
  auto lo = hi - 1;
  const double span = hi->t - lo->t;
  const double w = span > 0.0 ? (t - lo->t) / span : 1.0;
  return lo->offset + w * (hi->offset - lo->offset);
}

Frame GestureTemplate::pose_at(double t) const {
  Frame f = base_pose;
  for (const JointTrack& track : tracks) f[track.joint] += track.offset_at(t);
  return f;
}

Frame standing_pose(double x, double depth) {
  Frame f;
  auto at = [&](Joint j, double px, double py, double pz) { f[j] = Vec3{x + px, py, depth + pz}; };
  at(Joint::HipCenter, 0.0, 0.0, 0.0);
  at(Joint::Spine, 0.0, 0.08, 0.02);
  at(Joint::ShoulderCenter, 0.0, 0.42, 0.02);
  at(Joint::Head, 0.0, 0.62, 0.03);
  at(Joint::ShoulderLeft, -0.17, 0.38, 0.03);
  at(Joint::ShoulderRight, 0.17, 0.38, 0.03);
  at(Joint::HipLeft, -0.09, -0.06, 0.0);
  at(Joint::HipRight, 0.09, -0.06, 0.0);
  place_limb(f, kLeftArm, Side::left, arm_pose(kArmRest));
  place_limb(f, kRightArm, Side::right, arm_pose(kArmRest));
  place_limb(f, kLeftLeg, Side::left, leg_pose(kLegRest));
  place_limb(f, kRightLeg, Side::right, leg_pose(kLegRest));
  return f;
}

GestureTemplate mirrored(const GestureTemplate& tmpl) {
  GestureTemplate out;
  out.name = tmpl.name;
  out.noise_std = tmpl.noise_std;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const auto joint = static_cast<Joint>(j);
    out.base_pose[mirror_joint(joint)] = reflect(tmpl.base_pose[joint]);
  }
  for (const JointTrack& track : tmpl.tracks) {
    JointTrack m{mirror_joint(track.joint), {}};
    for (const Keyframe& k : track.keys) m.keys.push_back({k.t, reflect(k.offset)});
    out.tracks.push_back(std::move(m));
  }
  return out;
}

TemplateSet parse_template_set(const std::string& name) {
  if (name == "hand") return TemplateSet::hand;
  if (name == "interaction") return TemplateSet::interaction;
  throw InvalidArgument("unknown template set '" + name + "' (expected hand or interaction)");
}

std::string to_string(TemplateSet set) { return set == TemplateSet::hand ? "hand" : "interaction"; }

const std::vector<GestureTemplate>& builtin_templates(TemplateSet set) {
  static const std::vector<GestureTemplate> hand = make_hand_gestures();
  static const std::vector<GestureTemplate> interaction = make_interaction_actions();
  return set == TemplateSet::hand ? hand : interaction;
}

const GestureTemplate& find_template(TemplateSet set, const std::string& name) {
  for (const GestureTemplate& t : builtin_templates(set))
    if (t.name == name) return t;
  throw InvalidArgument("no " + to_string(set) + " template named '" + name + "'");
}

std::vector<std::string> benchmark_hand_gestures() {
  return {"waving", "punching", "push", "clap", "zoom-in", "zoom-out", "move-left", "move-right"};
}

const std::vector<InteractionPreset>& interaction_presets() {
  static const std::vector<InteractionPreset> presets = {
      {"approaching", "departing"},   {"exchanging", "shaking-hands"}, {"approaching", "hugging"},
      {"punching", "departing"},      {"shaking-hands", "pushing"},    {"pushing", "kicking"},
      {"approaching", "shaking-hands"}, {"kicking", "departing"},      {"punching", "kicking"},
      {"exchanging", "departing"},
  };
  return presets;
}

SkeletonSequence generate_sequence(const GestureTemplate& tmpl, std::size_t frames, std::uint64_t seed) {
  if (frames == 0) throw InvalidArgument("a sequence needs at least one frame");
  if (!(tmpl.noise_std >= 0.0)) throw InvalidArgument("noise_std must be non-negative");
  Rng rng(seed);
  SkeletonSequence seq;
  seq.source_label = tmpl.name;
  seq.frames.reserve(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const double t = frames > 1 ? static_cast<double>(f) / static_cast<double>(frames - 1) : 0.0;
    Frame frame = tmpl.pose_at(t);
    if (tmpl.noise_std > 0.0) {
      for (Vec3& p : frame.joints) {
        p.x += tmpl.noise_std * rng.normal();
        p.y += tmpl.noise_std * rng.normal();
        p.z += tmpl.noise_std * rng.normal();
      }
    }
    for (std::size_t j = 0; j < kJointCount; ++j) {
      const double z = frame.joints[j].z;
      if (!(z >= kMinSensorDepth && z <= kMaxSensorDepth))
        throw DepthRangeViolation("template '" + tmpl.name + "' frame " + std::to_string(f + 1) + " joint " +
                                  std::string(joint_name(static_cast<Joint>(j))) + " depth " + std::to_string(z) +
                                  " m outside [1.2, 3.5]");
    }
    seq.frames.push_back(frame);
  }
  return seq;
}

std::pair<SkeletonSequence, SkeletonSequence> generate_interaction(const std::string& left_action,
                                                                   const std::string& right_action,
                                                                   std::size_t frames, std::uint64_t seed) {
  const GestureTemplate left = mirrored(find_template(TemplateSet::interaction, left_action));
  const GestureTemplate& right = find_template(TemplateSet::interaction, right_action);
  return {generate_sequence(left, frames, derive_seed(seed, 0)), generate_sequence(right, frames, derive_seed(seed, 1))};
}

// ---------------------------------------------------------------------------

ClassifierKind parse_classifier_kind(const std::string& name) {
  if (name == "svm") return ClassifierKind::svm;
  if (name == "edt") return ClassifierKind::edt;
  if (name == "knn") return ClassifierKind::knn;
  throw InvalidArgument("unknown classifier '" + name + "' (expected svm, edt or knn)");
}

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::edt: return "edt";
    default: return "knn";
  }
}

std::vector<std::string> ExperimentConfig::resolved_classes() const {
  if (!classes.empty()) return classes;
  if (templates == TemplateSet::hand) return benchmark_hand_gestures();
  std::vector<std::string> names;
  for (const auto& t : builtin_templates(templates)) names.push_back(t.name);
  return names;
}

void ExperimentConfig::validate() const {
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) throw InvalidArgument("split_fraction must lie in (0, 1)");
  if (frames < 1) throw InvalidArgument("frames must be at least 1");
  if (samples_per_class < 1) throw InvalidArgument("samples_per_class must be at least 1");
  if (!(noise_std >= 0.0)) throw InvalidArgument("noise_std must be non-negative");
  auto names = resolved_classes();
  for (const auto& name : names) find_template(templates, name);
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end())
    throw InvalidArgument("class list contains duplicates");
}

ExperimentConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  ExperimentConfig c;
  bool edt_seed_set = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "gesture-experiment 1")
        throw InvalidArgument("config line " + std::to_string(line_no) + ": expected header 'gesture-experiment 1'");
      saw_header = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "feature_kind") c.feature_kind = parse_feature_kind(value);
    else if (key == "templates") c.templates = parse_template_set(value);
    else if (key == "classes") c.classes = split_list(value);
    else if (key == "samples_per_class") c.samples_per_class = parse_count(key, value);
    else if (key == "frames") c.frames = parse_count(key, value);
    else if (key == "seed") c.seed = parse_count(key, value);
    else if (key == "noise_std") c.noise_std = parse_real(key, value);
    else if (key == "split_fraction") c.split_fraction = parse_real(key, value);
    else if (key == "side") {
      if (value == "right") c.side = PersonSide::right;
      else if (value == "left") c.side = PersonSide::left;
      else throw InvalidArgument("config key 'side': expected left or right");
    } else if (key == "classifier") c.classifier = parse_classifier_kind(value);
    else if (key == "svm.sigma") c.svm.sigma = parse_real(key, value);
    else if (key == "svm.c") c.svm.c = parse_real(key, value);
    else if (key == "svm.tolerance") c.svm.tolerance = parse_real(key, value);
    else if (key == "edt.trees") c.edt.trees = parse_count(key, value);
    else if (key == "edt.bootstrap_fraction") c.edt.bootstrap_fraction = parse_real(key, value);
    else if (key == "edt.seed") {
      c.edt.seed = parse_count(key, value);
      edt_seed_set = true;
    } else if (key == "knn.k") c.knn_k = parse_count(key, value);
    else throw InvalidArgument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  if (!saw_header) throw InvalidArgument("config is empty");
  if (!edt_seed_set) c.edt.seed = c.seed;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "gesture-experiment 1\n";
  out << "feature_kind = " << to_string(c.feature_kind) << '\n';
  out << "templates = " << to_string(c.templates) << '\n';
  out << "classes = ";
  const auto names = c.resolved_classes();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  out << "samples_per_class = " << c.samples_per_class << '\n';
  out << "frames = " << c.frames << '\n';
  out << "seed = " << c.seed << '\n';
  out << "noise_std = " << format_double(c.noise_std) << '\n';
  out << "split_fraction = " << format_double(c.split_fraction) << '\n';
  out << "side = " << (c.side == PersonSide::right ? "right" : "left") << '\n';
  out << "classifier = " << to_string(c.classifier) << '\n';
  out << "svm.sigma = " << format_double(c.svm.sigma) << '\n';
  out << "svm.c = " << format_double(c.svm.c) << '\n';
  out << "svm.tolerance = " << format_double(c.svm.tolerance) << '\n';
  out << "edt.trees = " << c.edt.trees << '\n';
  out << "edt.bootstrap_fraction = " << format_double(c.edt.bootstrap_fraction) << '\n';
  out << "edt.seed = " << c.edt.seed << '\n';
  out << "knn.k = " << c.knn_k << '\n';
  return out.str();
}

SkeletonSequence generate_sample(const ExperimentConfig& config, const std::string& label, std::size_t index) {
  const auto names = config.resolved_classes();
  const auto pos = std::find(names.begin(), names.end(), label);
  if (pos == names.end()) throw InvalidArgument("label '" + label + "' is not a configured class");
  GestureTemplate tmpl = find_template(config.templates, label);
  if (config.side == PersonSide::left) tmpl = mirrored(tmpl);
  tmpl.noise_std = config.noise_std;
  const auto class_pos = static_cast<std::uint64_t>(pos - names.begin());
  return generate_sequence(tmpl, config.frames, derive_seed(derive_seed(config.seed, class_pos), index));
}

LabeledDataset build_dataset(const ExperimentConfig& config) {
  config.validate();
  LabeledDataset data;
  for (const std::string& label : config.resolved_classes()) {
    for (std::size_t i = 0; i < config.samples_per_class; ++i) {
      const SkeletonSequence seq = generate_sample(config, label, i);
      data.samples.push_back({flatten_sequence(sequence_features(seq, config.feature_kind)), label});
    }
  }
  return data;
}

DataSplit split(const LabeledDataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("split fraction must lie in (0, 1)");
  const auto classes = data.classes();
  std::vector<std::vector<std::size_t>> members(classes.size());
  for (std::size_t i = 0; i < data.size(); ++i) members[class_index(classes, data.samples[i].label)].push_back(i);

  DataSplit out;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    auto& idx = members[c];
    if (idx.size() < 2)
      throw StratifyError("class '" + classes[c] + "' has " + std::to_string(idx.size()) +
                          " sample(s); stratified splitting needs at least 2");
    Rng rng(derive_seed(seed, c));
    for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[static_cast<std::size_t>(rng.below(i + 1))]);
    auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    out.train_indices.insert(out.train_indices.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test_indices.insert(out.test_indices.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(out.train_indices.begin(), out.train_indices.end());
  std::sort(out.test_indices.begin(), out.test_indices.end());
  for (std::size_t i : out.train_indices) out.train.samples.push_back(data.samples[i]);
  for (std::size_t i : out.test_indices) out.test.samples.push_back(data.samples[i]);
  return out;
}

Model train_model(const LabeledDataset& data, const ExperimentConfig& config) {
  switch (config.classifier) {
    case ClassifierKind::svm: return svm_train(data, config.svm);
    case ClassifierKind::edt: return edt_train(data, config.edt);
    default: return knn_train(data, config.knn_k);
  }
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  ExperimentReport report{config, 0, 0, 0, MetricsReport{ConfusionMatrix({}), {}, {}}, {}};

  auto start = std::chrono::steady_clock::now();
  const LabeledDataset data = build_dataset(config);
  const DataSplit parts = split(data, config.split_fraction, config.seed);
  report.timings.generate_ms = elapsed_ms(start);
  report.train_size = parts.train.size();
  report.test_size = parts.test.size();
  report.dimension = data.dimension();

  start = std::chrono::steady_clock::now();
  const Model model = train_model(parts.train, config);
  report.timings.train_ms = elapsed_ms(start);

  start = std::chrono::steady_clock::now();
  std::vector<std::string> truth;
  std::vector<std::string> predicted;
  for (const Sample& s : parts.test.samples) {
    truth.push_back(s.label);
    predicted.push_back(predict(model, s.features).label);
  }
  report.timings.predict_ms = elapsed_ms(start);

  report.metrics = evaluate(confusion(truth, predicted, data.classes()));
  return report;
}

std::string report_text(const ExperimentReport& report, bool include_timings) {
  std::ostringstream out;
  out << "# experiment\n" << to_text(report.config) << '\n';
  out << "train samples: " << report.train_size << '\n';
  out << "test samples: " << report.test_size << '\n';
  out << "feature length: " << report.dimension << "\n\n";
  out << metrics_text(report.metrics);
  if (include_timings) {
    out << "\ntimings (ms): generate " << report.timings.generate_ms << ", train " << report.timings.train_ms
        << ", predict " << report.timings.predict_ms << '\n';
  }
  return out.str();
}

void export_dataset(const ExperimentConfig& config, const std::string& directory, bool features) {
  namespace fs = std::filesystem;
  config.validate();
  fs::create_directories(directory);
  std::ofstream labels(fs::path(directory) / "labels.csv", std::ios::binary);
  std::ofstream feature_manifest;
  if (features) feature_manifest.open(fs::path(directory) / "features.csv", std::ios::binary);
  if (!labels || (features && !feature_manifest)) throw InputError("cannot write manifests in " + directory);

  const auto header = feature_header(config.feature_kind);
  for (const std::string& label : config.resolved_classes()) {
    for (std::size_t i = 0; i < config.samples_per_class; ++i) {
      const SkeletonSequence seq = generate_sample(config, label, i);
      std::ostringstream stem;
      stem << label << '_' << std::setw(3) << std::setfill('0') << i + 1;
      write_skeleton_file((fs::path(directory) / (stem.str() + ".txt")).string(), seq);
      labels << stem.str() << ".txt," << label << '\n';
      if (features) {
        const FeatureMatrix m = sequence_features(seq, config.feature_kind);
        std::ofstream csv(fs::path(directory) / (stem.str() + ".csv"), std::ios::binary);
        csv << feature_matrix_to_csv(m, header, true);
        feature_manifest << stem.str() << ".csv," << label << '\n';
      }
    }
  }
}

std::vector<std::pair<std::string, std::string>> read_manifest(const std::string& path) {
  namespace fs = std::filesystem;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open manifest: " + path);
  const fs::path base = fs::path(path).parent_path();
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == line.size())
      throw InputError("manifest " + path + " line " + std::to_string(line_no) + ": expected 'filename,label'");
    fs::path file = trim(line.substr(0, comma));
    if (file.is_relative()) file = base / file;
    entries.emplace_back(file.string(), trim(line.substr(comma + 1)));
  }
  if (entries.empty()) throw InputError("manifest is empty: " + path);
  return entries;
}

LabeledDataset load_feature_manifest(const std::string& path) {
  LabeledDataset data;
  for (const auto& [file, label] : read_manifest(path))
    data.samples.push_back({flatten_sequence(read_feature_csv(file)), label});
  data.check_consistent();
  return data;
}

}  // namespace gesture
