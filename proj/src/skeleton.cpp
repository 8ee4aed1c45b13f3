#include "gesture/skeleton.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "gesture/errors.hpp"

namespace gesture {

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "HipCenter",  "Spine",      "ShoulderCenter", "Head",       "ShoulderLeft",
    "ElbowLeft",  "WristLeft",  "HandLeft",       "ShoulderRight", "ElbowRight",
    "WristRight", "HandRight",  "HipLeft",        "KneeLeft",   "AnkleLeft",
    "FootLeft",   "HipRight",   "KneeRight",      "AnkleRight", "FootRight",
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

double parse_token(std::string_view token, std::size_t position) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  // from_chars rejects a leading '+', which C scanf-style readers accept.
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value))
    throw BadToken(position, std::string(token));
  return value;
}

}  // namespace

Joint joint_from_file_number(std::size_t number) {
  if (number < 1 || number > kJointCount)
    throw InvalidArgument("joint number out of range 1..20: " + std::to_string(number));
  return static_cast<Joint>(number - 1);
}

std::string_view joint_name(Joint j) { return kJointNames.at(index_of(j)); }

SkeletonSequence parse_skeleton_stream(std::string_view text) {
  std::vector<double> values;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i == text.size()) break;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    values.push_back(parse_token(text.substr(start, i - start), values.size() + 1));
  }

  if (values.size() % kTokensPerFrame != 0) throw MalformedStream(values.size());
  if (values.empty()) throw EmptyStream();

  SkeletonSequence seq;
  seq.frames.resize(values.size() / kTokensPerFrame);
  auto it = values.begin();
  for (Frame& frame : seq.frames) {
    for (Vec3& joint : frame.joints) {
      joint.x = *it++;
      joint.y = *it++;
      joint.z = *it++;
    }
  }
  return seq;
}

SkeletonSequence parse_skeleton_stream(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_skeleton_stream(std::string_view(text));
}

SkeletonSequence read_skeleton_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open skeleton file: " + path);
  return parse_skeleton_stream(in);
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string serialize_skeleton_stream(const SkeletonSequence& seq) {
  if (seq.empty()) throw EmptyStream();
  std::string out;
  out.reserve(seq.size() * kTokensPerFrame * 10);
  for (const Frame& frame : seq.frames) {
    bool first = true;
    for (const Vec3& j : frame.joints) {
      for (double v : {j.x, j.y, j.z}) {
        if (!first) out += ' ';
        out += format_double(v);
        first = false;
      }
    }
    out += '\n';
  }
  return out;
}

void write_skeleton_file(const std::string& path, const SkeletonSequence& seq) {
  std::string text = serialize_skeleton_stream(seq);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write skeleton file: " + path);
  out << text;
}

std::string skeleton_to_csv(const SkeletonSequence& seq) {
  std::ostringstream out;
  for (std::size_t j = 1; j <= kJointCount; ++j) {
    for (char axis : {'x', 'y', 'z'}) {
      if (j != 1 || axis != 'x') out << ',';
      out << 'j' << (j < 10 ? "0" : "") << j << '_' << axis;
    }
  }
  out << '\n';
  for (const Frame& frame : seq.frames) {
    bool first = true;
    for (const Vec3& p : frame.joints) {
      for (double v : {p.x, p.y, p.z}) {
        if (!first) out << ',';
        out << format_double(v);
        first = false;
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gesture
