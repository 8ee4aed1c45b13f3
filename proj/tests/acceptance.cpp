// Acceptance suite: one PASS/FAIL line per criterion. With no arguments every
// criterion runs and the exit code is the number of failures; with a criterion
// number only that one runs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gesture/classifiers.hpp"
#include "gesture/evaluation.hpp"
#include "gesture/features.hpp"
#include "gesture/harness.hpp"
#include "test_support.hpp"

using namespace gesture;
using namespace gesture::testing;

namespace {

// Tolerances and budgets, fixed here.
constexpr double kMeanJointTol = 5e-4;
constexpr double kCosineTol = 1.5e-3;
constexpr double kNormalizedTol = 5e-5;
constexpr double kChiSquared = 8.2;
constexpr double kChiSquaredTol = 1e-3;
constexpr double kCritical = 7.815;
constexpr double kSvmEdtFloor = 0.85;
constexpr double kKnnFloor = 0.80;
constexpr double kUnitNormTol = 1e-9;
constexpr double kScaleAngleTol = 1e-9;
constexpr double kCentroidTol = 1e-9;
constexpr double kInvarianceTol = 1e-12;
constexpr double kWorkedMetricTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back(what);
    }
  }
  void note(const std::string& what) { notes.push_back(what); }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome worked_interaction() {
  Outcome o;
  const Frame f = worked_interaction_frame();
  const char* axis = "xyz";
  for (std::size_t m = 0; m < 4; ++m) {
    const Vec3 j = mean_joint(f, static_cast<MeanJointId>(m + 1));
    const double got[3] = {j.x, j.y, j.z};
    for (std::size_t a = 0; a < 3; ++a) {
      const double diff = std::abs(got[a] - kWorkedMeanJoints[m][a]);
      o.require(diff <= kMeanJointTol, "J" + std::to_string(m + 1) + "." + axis[a] + " = " + fmt("%.7f", got[a]) +
                                           " vs printed " + fmt("%.3f", kWorkedMeanJoints[m][a]) + " (|diff| " +
                                           fmt("%.2e", diff) + ")");
    }
    const auto dc = direction_cosines(j);
    const double cs[3] = {dc.cos_alpha, dc.cos_beta, dc.cos_gamma};
    for (std::size_t a = 0; a < 3; ++a) {
      const double diff = std::abs(cs[a] - kWorkedCosines[m][a]);
      o.require(diff <= kCosineTol, "cos J" + std::to_string(m + 1) + "." + axis[a] + " |diff| " + fmt("%.2e", diff));
    }
  }
  return o;
}

Outcome printed_distances() {
  struct Row {
    int frame, feature;
    double distance, depth, normalized;
  };
  static constexpr Row rows[] = {
      {10, 1, 0.1850, 2.2069, 0.0838}, {10, 2, 0.1574, 2.1936, 0.0718}, {10, 3, 0.2029, 2.1808, 0.0930},
      {10, 4, 0.1931, 2.1606, 0.0894}, {10, 5, 0.2375, 2.1512, 0.1104}, {10, 6, 0.2438, 2.1303, 0.1144},
      {30, 1, 0.2008, 2.1948, 0.0915}, {30, 2, 0.1802, 2.1919, 0.0822}, {30, 3, 0.2689, 2.1080, 0.1276},
      {30, 4, 0.2585, 2.1012, 0.1230}, {30, 5, 0.3525, 2.0374, 0.1730}, {30, 6, 0.3544, 2.0240, 0.1751},
      {60, 1, 0.2462, 2.1906, 0.1124}, {60, 2, 0.2128, 2.2022, 0.0966}, {60, 3, 0.3828, 2.1064, 0.1818},
      {60, 4, 0.3439, 2.1225, 0.1620}, {60, 5, 0.5577, 2.0310, 0.2746}, {60, 6, 0.5100, 2.0491, 0.2489},
      {85, 1, 0.2650, 2.2237, 0.1192}, {85, 2, 0.2497, 2.2166, 0.1126}, {85, 3, 0.4218, 2.1792, 0.1936},
      {85, 4, 0.4205, 2.1704, 0.1937}, {85, 5, 0.5920, 2.1405, 0.2766}, {85, 6, 0.6035, 2.1282, 0.2836},
  };
  Outcome o;
  std::size_t ok = 0;
  for (const Row& r : rows) {
    // Spine and centroid at the printed depth, separated by the printed distance.
    const Vec3 spine{0.0, 0.0, r.depth};
    const Vec3 centroid{r.distance, 0.0, r.depth};
    const double got = normalized_distance(centroid, spine);
    const double diff = std::abs(got - r.normalized);
    if (diff <= kNormalizedTol) ++ok;
    o.require(diff <= kNormalizedTol, "frame " + std::to_string(r.frame) + " feature " + std::to_string(r.feature) +
                                          ": " + fmt("%.7f", got) + " vs printed " + fmt("%.4f", r.normalized) +
                                          " (|diff| " + fmt("%.4e", diff) + ")");
  }
  o.note(std::to_string(ok) + "/24 rows within tolerance");
  return o;
}

Outcome printed_friedman_ranks() {
  Outcome o;
  const RankGrid ranks = {{1, 1, 1}, {4, 4, 4}, {2, 2, 3}, {3, 3, 2}};
  const auto from_scores = rank_algorithms({{0.9, 0.9, 0.9}, {0.5, 0.5, 0.5}, {0.7, 0.7, 0.6}, {0.6, 0.6, 0.7}});
  o.require(from_scores == ranks, "ranking scores did not reproduce the table's ranks");
  const auto r = friedman(ranks);
  o.require(std::abs(r.chi_squared - kChiSquared) <= kChiSquaredTol, "chi^2 = " + fmt("%.6f", r.chi_squared));
  o.require(r.critical_value == kCritical, "critical value " + fmt("%.3f", r.critical_value));
  o.require(r.reject_null, "null hypothesis not rejected");
  o.note("chi^2 = " + fmt("%.4f", r.chi_squared) + " > " + fmt("%.3f", r.critical_value));
  return o;
}

Outcome dimensions() {
  Outcome o;
  Rng rng(1);
  SkeletonSequence seq;
  for (int i = 0; i < 90; ++i) seq.frames.push_back(random_frame(rng));
  const auto single = flatten_sequence(sequence_features_single(seq)).size();
  const auto two = flatten_sequence(sequence_features_two_person(seq)).size();
  o.require(single == 540, "single-person length " + std::to_string(single));
  o.require(two == 1080, "two-person length " + std::to_string(two));

  ExperimentConfig c;
  for (const auto& t : builtin_templates(TemplateSet::hand)) c.classes.push_back(t.name);
  c.samples_per_class = 15;
  const auto total_single = build_dataset(c).scalar_count();
  c.feature_kind = FeatureKind::two_person;
  c.samples_per_class = 30;
  const auto total_two = build_dataset(c).scalar_count();
  o.require(total_single == 162000, "15 x 20 x 90 x 6 gave " + std::to_string(total_single));
  o.require(total_two == 648000, "30 x 20 x 90 x 12 gave " + std::to_string(total_two));
  o.note("540 / 1080 / 162000 / 648000");
  return o;
}

Outcome benchmark() {
  Outcome o;
  struct Pipeline {
    const char* name;
    FeatureKind kind;
    TemplateSet set;
  };
  for (const Pipeline p : {Pipeline{"single", FeatureKind::single, TemplateSet::hand},
                           Pipeline{"two-person", FeatureKind::two_person, TemplateSet::interaction}}) {
    for (ClassifierKind k : {ClassifierKind::svm, ClassifierKind::edt, ClassifierKind::knn}) {
      ExperimentConfig c;
      c.feature_kind = p.kind;
      c.templates = p.set;
      c.samples_per_class = 30;
      c.noise_std = 0.01;
      c.seed = 7;
      c.edt.seed = 7;
      c.split_fraction = 0.8;
      c.classifier = k;
      c.knn_k = 1;
      const auto report = run_experiment(c);
      const auto& cm = report.metrics.confusion;
      std::size_t correct = 0;
      for (std::size_t i = 0; i < cm.size(); ++i) correct += cm.at(i, i);
      const double overall = static_cast<double>(correct) / static_cast<double>(cm.total());
      const double macro = report.metrics.macro.accuracy;
      const double floor = k == ClassifierKind::knn ? kKnnFloor : kSvmEdtFloor;
      const std::string tag = std::string(p.name) + "/" + to_string(k);
      o.require(cm.size() == 8, tag + ": expected 8 classes");
      o.require(macro >= floor, tag + " macro accuracy " + fmt("%.4f", macro));
      o.require(overall >= floor, tag + " overall accuracy " + fmt("%.4f", overall));
      o.note(tag + " macro " + fmt("%.4f", macro) + " overall " + fmt("%.4f", overall));
    }
  }
  return o;
}

Outcome properties() {
  Outcome o;
  Rng rng(20240607);

  double worst_norm = 0, worst_scale = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = random_vec(rng, -3, 3);
    const auto dc = direction_cosines(v);
    worst_norm = std::max(worst_norm, std::abs(dc.cos_alpha * dc.cos_alpha + dc.cos_beta * dc.cos_beta +
                                               dc.cos_gamma * dc.cos_gamma - 1.0));
    const auto a = direction_angles(v), b = direction_angles(std::exp(uniform(rng, -5, 5)) * v);
    worst_scale = std::max({worst_scale, std::abs(a.alpha - b.alpha), std::abs(a.beta - b.beta),
                            std::abs(a.gamma - b.gamma)});
  }
  o.require(worst_norm <= kUnitNormTol, "unit norm off by " + fmt("%.2e", worst_norm));
  o.require(worst_scale <= kScaleAngleTol, "scale changed an angle by " + fmt("%.2e", worst_scale));

  double worst_perm = 0, worst_affine = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = random_vec(rng, -2, 2), q = random_vec(rng, -2, 2), r = random_vec(rng, -2, 2);
    const Vec3 c = triangle_centroid(p, q, r);
    for (const Vec3& d : {triangle_centroid(q, p, r), triangle_centroid(r, q, p), triangle_centroid(q, r, p)})
      worst_perm = std::max(worst_perm, norm(d - c));
    const double k = uniform(rng, 0.1, 10);
    const Vec3 t = random_vec(rng, -5, 5);
    worst_affine = std::max(worst_affine, norm(triangle_centroid(k * p + t, k * q + t, k * r + t) - (k * c + t)));
  }
  o.require(worst_perm <= kCentroidTol, "centroid permutation off by " + fmt("%.2e", worst_perm));
  o.require(worst_affine <= kCentroidTol, "centroid affine off by " + fmt("%.2e", worst_affine));

  double worst_shift = 0, worst_zoom = 0;
  for (int i = 0; i < 1000; ++i) {
    const Frame f = random_frame(rng);
    const auto base = frame_features_single(f);
    Frame shifted = f, zoomed = f;
    const Vec3 d{uniform(rng, -2, 2), uniform(rng, -2, 2), 0.0};
    const double k = uniform(rng, 0.5, 1.5);
    for (Vec3& p : shifted.joints) p += d;
    for (Vec3& p : zoomed.joints) p *= k;
    const auto s = frame_features_single(shifted), z = frame_features_single(zoomed);
    for (std::size_t j = 0; j < base.size(); ++j) {
      worst_shift = std::max(worst_shift, std::abs(s[j] - base[j]));
      worst_zoom = std::max(worst_zoom, std::abs(z[j] - base[j]));
    }
  }
  o.require(worst_shift <= kInvarianceTol, "translation changed a feature by " + fmt("%.2e", worst_shift));
  o.require(worst_zoom <= kInvarianceTol, "scaling changed a feature by " + fmt("%.2e", worst_zoom));

  bool round_trip = true;
  for (int i = 0; i < 50 && round_trip; ++i) {
    SkeletonSequence seq;
    for (std::size_t t = 0, n = 1 + rng.below(40); t < n; ++t) {
      Frame f = random_frame(rng);
      for (Vec3& p : f.joints) p.x = std::ldexp(p.x, static_cast<int>(rng.below(40)) - 20);
      seq.frames.push_back(f);
    }
    const std::string text = serialize_skeleton_stream(seq);
    const auto back = parse_skeleton_stream(text);
    round_trip = back.frames.size() == seq.frames.size() && serialize_skeleton_stream(back) == text;
    for (std::size_t t = 0; round_trip && t < seq.frames.size(); ++t) round_trip = back.frames[t].joints == seq.frames[t].joints;
  }
  o.require(round_trip, "parse/serialize round trip not exact");

  const auto blobs_train = three_blobs(31);
  EdtParams ep;
  ep.seed = 42;
  const auto edt = edt_train(blobs_train, ep);
  bool edt_ok = true;
  for (int q = 0; q < 500; ++q) {
    const std::vector<double> x = {uniform(rng, -3, 13), uniform(rng, -3, 13)};
    std::vector<std::size_t> tally(edt.classes.size(), 0);
    for (const auto& tree : edt.trees) ++tally[tree.predict(x)];
    std::size_t best = 0;
    for (std::size_t c = 1; c < tally.size(); ++c)
      if (tally[c] > tally[best]) best = c;
    const auto p = edt_predict(edt, x);
    edt_ok = edt_ok && p.votes == tally && p.label == edt.classes[best];
  }
  o.require(edt_ok, "ensemble vote differs from per-tree tally");

  LabeledDataset pts;
  for (int i = 0; i < 200; ++i) pts.samples.push_back({{uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1)},
                                                       "L" + std::to_string(rng.below(3))});
  const auto knn = knn_train(pts, 1);
  std::size_t knn_agree = 0;
  for (int q = 0; q < 500; ++q) {
    const std::vector<double> x = {uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1)};
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double d = 0;
      for (std::size_t j = 0; j < 3; ++j) d += (x[j] - pts.samples[i].features[j]) * (x[j] - pts.samples[i].features[j]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    knn_agree += knn_predict(knn, x) == pts.samples[best].label;
  }
  o.require(knn_agree == 500, "kNN agreed with the full scan on " + std::to_string(knn_agree) + "/500");

  ExperimentConfig c;
  c.classes = {"waving", "clap", "zoom-in"};
  c.samples_per_class = 5;
  c.frames = 30;
  const auto& tmpl = find_template(TemplateSet::hand, "push");
  bool det = serialize_skeleton_stream(generate_sequence(tmpl, 90, 3)) ==
             serialize_skeleton_stream(generate_sequence(tmpl, 90, 3));
  const auto i1 = generate_interaction("hugging", "hugging", 30, 2), i2 = generate_interaction("hugging", "hugging", 30, 2);
  det = det && serialize_skeleton_stream(i1.first) == serialize_skeleton_stream(i2.first) &&
        serialize_skeleton_stream(i1.second) == serialize_skeleton_stream(i2.second);
  const auto d1 = build_dataset(c), d2 = build_dataset(c);
  for (std::size_t i = 0; i < d1.size(); ++i) det = det && d1.samples[i].features == d2.samples[i].features;
  det = det && split(d1, 0.8, 9).train_indices == split(d2, 0.8, 9).train_indices;
  for (ClassifierKind k : {ClassifierKind::svm, ClassifierKind::edt, ClassifierKind::knn}) {
    c.classifier = k;
    det = det && report_text(run_experiment(c), false) == report_text(run_experiment(c), false);
    det = det && serialize_model(train_model(d1, c)) == serialize_model(train_model(d2, c));
  }
  namespace fs = std::filesystem;
  const fs::path da = fs::temp_directory_path() / "gesture_acceptance_a", db = fs::temp_directory_path() / "gesture_acceptance_b";
  fs::remove_all(da);
  fs::remove_all(db);
  export_dataset(c, da.string(), true);
  export_dataset(c, db.string(), true);
  for (const auto& e : fs::directory_iterator(da)) {
    std::ifstream fa(e.path(), std::ios::binary), fb(db / e.path().filename(), std::ios::binary);
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    det = det && sa.str() == sb.str();
  }
  fs::remove_all(da);
  fs::remove_all(db);
  o.require(det, "a harness artifact differed between identical runs");
  return o;
}

Outcome metric_algebra() {
  Outcome o;
  Rng rng(77);
  bool exact = true;
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = 2 + rng.below(8);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < k; ++i) labels.push_back("k" + std::to_string(i));
    ConfusionMatrix cm(labels);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) cm.at(i, j) = rng.below(40);
    cm.at(0, 0) += 1;
    for (const MetricSet& m : evaluate(cm).per_class)
      exact = exact && m.accuracy + m.error_rate == 1.0 && m.ppv() == m.precision && m.sensitivity() == m.recall;
  }
  o.require(exact, "metric identities broke on a random matrix");

  const auto m = metrics({5, 1, 2, 4});
  const std::pair<double, double> worked[] = {{m.precision, 5.0 / 7.0}, {m.recall, 5.0 / 6.0}, {m.accuracy, 0.75},
                                              {m.error_rate, 0.25},     {m.f1, 10.0 / 13.0},   {m.specificity, 2.0 / 3.0},
                                              {m.npv, 0.8}};
  for (const auto& [got, want] : worked)
    o.require(std::abs(got - want) <= kWorkedMetricTol, "worked metric " + fmt("%.12f", got) + " vs " + fmt("%.12f", want));
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "worked two-person frame: mean joints and direction cosines", 1.0, worked_interaction},
      {2, "normalised distances of the 24 printed feature rows", 1.0, printed_distances},
      {3, "Friedman statistic of the algorithm comparison", 1.0, printed_friedman_ranks},
      {4, "feature lengths and dataset scalar totals", 5.0, dimensions},
      {5, "synthetic benchmark accuracy (8 classes, 30/class, noise 0.01, seed 7, 80/20)", 60.0, benchmark},
      {6, "property suites", 30.0, properties},
      {7, "metric algebra", 1.0, metric_algebra},
  };
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < c.budget_s, "runtime " + fmt("%.2f", secs) + " s over the " + fmt("%.0f", c.budget_s) + " s budget");
    std::printf("AC%d %s  %s  (%.3f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title, secs);
    for (const auto& n : o.notes) std::printf("      %s\n", n.c_str());
    failures += o.pass ? 0 : 1;
  }
  return failures;
}
