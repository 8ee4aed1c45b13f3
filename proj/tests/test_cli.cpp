#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "gesture/evaluation.hpp"
#include "gesture/feature_matrix.hpp"
#include "gesture/features.hpp"
#include "gesture/harness.hpp"
#include "test_support.hpp"

using namespace gesture;
using namespace gesture::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  const fs::path err_file = fs::temp_directory_path() / ("gesture_cli_err_" + std::to_string(counter++));
  const std::string cmd = env + " '" + std::string(GESTURE_CLI_PATH) + "' " + args + " 2>'" + err_file.string() + "'";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), pipe)) > 0;) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream e(err_file);
  r.err.assign(std::istreambuf_iterator<char>(e), {});
  fs::remove(err_file);
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

// Blob dataset written as one single-row feature CSV per sample plus a manifest.
void write_blob_manifest(const TempDir& dir, const LabeledDataset& data, const std::string& name) {
  std::ofstream manifest(dir / name);
  for (std::size_t i = 0; i < data.size(); ++i) {
    FeatureMatrix m(1, data.dimension());
    for (std::size_t j = 0; j < data.dimension(); ++j) m(0, j) = data.samples[i].features[j];
    const std::string file = name + "_" + std::to_string(i) + ".csv";
    std::ofstream(dir / file) << feature_matrix_to_csv(m, std::vector<std::string>{"x", "y"}, false);
    manifest << file << ',' << data.samples[i].label << '\n';
  }
}

}  // namespace

TEST_CASE("cli usage errors") {
  CHECK(cli("").code == 1);
  CHECK(cli("no-such-command").code == 1);
  CHECK(cli("train --features x").code == 1);
  CHECK(cli("extract-features --input x --unknown-flag").code == 1);
  CHECK(cli("extract-features --input x --mode both").code == 1);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("cli extract-features") {
  TempDir dir("gesture_cli_extract");
  SUBCASE("90-frame single-person file") {
    const auto seq = generate_sequence(find_template(TemplateSet::hand, "clap"), 90, 1);
    write_skeleton_file(dir / "clap.txt", seq);
    const Run r = cli("extract-features --input '" + (dir / "clap.txt") + "' --mode single --out '" + (dir / "f.csv") + "'");
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    const auto m = read_feature_csv(dir / "f.csv");
    CHECK(m.rows() == 90);
    CHECK(m.cols() == 6);
    CHECK(cli("extract-features --input '" + (dir / "clap.txt") + "'").out == slurp(dir / "f.csv"));
  }
  SUBCASE("worked two-person frame") {
    const Run r = cli("extract-features --input '" + std::string(GESTURE_TEST_DATA_DIR) +
                      "/interaction_frame48.txt' --mode two-person");
    REQUIRE(r.code == 0);
    const auto m = parse_feature_csv(r.out);
    REQUIRE(m.rows() == 48);
    constexpr double deg = 3.14159265358979323846 / 180.0;
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t a = 0; a < 3; ++a) CHECK(std::abs(std::cos(m(47, 3 * k + a) * deg) - kWorkedCosines[k][a]) <= 1.5e-3);
  }
  SUBCASE("malformed input") {
    std::ofstream(dir / "bad.txt") << std::string(59 * 2, ' ') << "1 2 3\n";
    std::string tokens;
    for (int i = 0; i < 60; ++i) tokens += i == 41 ? "abc " : "1.5 ";
    std::ofstream(dir / "bad2.txt") << tokens;
    const Run r = cli("extract-features --input '" + (dir / "bad2.txt") + "'");
    CHECK(r.code == 2);
    CHECK(r.err.find("42") != std::string::npos);
    CHECK(r.out.empty());
    CHECK(cli("extract-features --input '" + (dir / "missing.txt") + "'").code == 2);
  }
  SUBCASE("degenerate depth is a computation error naming the frame") {
    SkeletonSequence seq;
    seq.frames.resize(3);
    for (auto& f : seq.frames)
      for (Vec3& p : f.joints) p = {0, 0, 2};
    for (Vec3& p : seq.frames[2].joints) p = {0, 0, -2};
    write_skeleton_file(dir / "deep.txt", seq);
    const Run r = cli("extract-features --input '" + (dir / "deep.txt") + "'");
    CHECK(r.code == 3);
    CHECK(r.err.find("frame 3") != std::string::npos);
  }
}

TEST_CASE("cli train, predict, evaluate") {
  TempDir dir("gesture_cli_train");
  write_blob_manifest(dir, three_blobs(51), "train");
  write_blob_manifest(dir, three_blobs(52, 10), "test");

  SUBCASE("svm reports its training accuracy") {
    const Run r = cli("train --features '" + (dir / "train") + "' --model svm --out '" + (dir / "m.svm") + "'");
    REQUIRE(r.code == 0);
    const auto at = r.out.find("training accuracy: ");
    REQUIRE(at != std::string::npos);
    CHECK(std::stod(r.out.substr(at + 19)) >= 0.99);
    CHECK(fs::exists(dir / "m.svm"));

    const Run p = cli("predict --model '" + (dir / "m.svm") + "' --input '" + (dir / "test_12.csv") + "'");
    CHECK(p.code == 0);
    CHECK(p.out.rfind("predicted,c1\n", 0) == 0);

    const Run e = cli("evaluate --model '" + (dir / "m.svm") + "' --features '" + (dir / "test") + "' --report '" +
                      (dir / "r.csv") + "' --confusion '" + (dir / "cm.csv") + "'");
    CHECK(e.code == 0);
    const std::string report = slurp(dir / "r.csv");
    CHECK(report.rfind("class,precision,recall,specificity,npv,accuracy,error_rate,f1\n", 0) == 0);

    // Recompute the macro row from the printed confusion matrix.
    std::istringstream cm_in(slurp(dir / "cm.csv"));
    std::string line;
    std::getline(cm_in, line);
    ConfusionMatrix cm({"c0", "c1", "c2"});
    for (std::size_t i = 0; std::getline(cm_in, line); ++i) {
      std::stringstream ls(line);
      std::string cell;
      std::getline(ls, cell, ',');
      for (std::size_t j = 0; std::getline(ls, cell, ','); ++j) cm.at(i, j) = std::stoul(cell);
    }
    CHECK(cm.total() == 30);
    double precision = 0.0, recall = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double tp = static_cast<double>(cm.at(k, k));
      precision += cm.column_sum(k) ? tp / static_cast<double>(cm.column_sum(k)) : 0.0;
      recall += tp / static_cast<double>(cm.row_sum(k));
    }
    const auto macro_at = report.find("\nmacro,");
    REQUIRE(macro_at != std::string::npos);
    std::stringstream ms(report.substr(macro_at + 7));
    std::string p_cell, r_cell;
    std::getline(ms, p_cell, ',');
    std::getline(ms, r_cell, ',');
    CHECK(std::abs(std::stod(p_cell) - precision / 3.0) <= 5e-7);
    CHECK(std::abs(std::stod(r_cell) - recall / 3.0) <= 5e-7);
  }
  SUBCASE("knn is perfect on its own training set") {
    REQUIRE(cli("train --features '" + (dir / "train") + "' --model knn --out '" + (dir / "m.knn") + "'").code == 0);
    const Run e = cli("evaluate --model '" + (dir / "m.knn") + "' --features '" + (dir / "train") + "'");
    CHECK(e.code == 0);
    CHECK(e.out.find("\nmacro,1.000000,1.000000,1.000000,1.000000,1.000000,0.000000,1.000000") != std::string::npos);
  }
  SUBCASE("edt with one seed gives identical model files") {
    const std::string base = "train --features '" + (dir / "train") + "' --model edt --trees 20 --seed 4 --out ";
    REQUIRE(cli(base + "'" + (dir / "a.edt") + "'").code == 0);
    REQUIRE(cli(base + "'" + (dir / "b.edt") + "'").code == 0);
    CHECK(slurp(dir / "a.edt") == slurp(dir / "b.edt"));
    // The seed can come from the environment instead.
    const std::string env_base = "train --features '" + (dir / "train") + "' --model edt --trees 20 --out ";
    REQUIRE(cli(env_base + "'" + (dir / "c.edt") + "'", "GESTURE_SEED=4").code == 0);
    CHECK(slurp(dir / "c.edt") == slurp(dir / "a.edt"));
  }
  SUBCASE("single-class labels are a computation error") {
    std::ofstream(dir / "one") << "train_0.csv,c0\ntrain_1.csv,c0\n";
    CHECK(cli("train --features '" + (dir / "one") + "' --model svm --out '" + (dir / "x") + "'").code == 3);
  }
  SUBCASE("dimension mismatch is a computation error") {
    REQUIRE(cli("train --features '" + (dir / "train") + "' --model knn --out '" + (dir / "m.knn") + "'").code == 0);
    std::ofstream(dir / "wide.csv") << "x,y,z\n1,2,3\n";
    std::ofstream(dir / "wide") << "wide.csv,c0\n";
    CHECK(cli("evaluate --model '" + (dir / "m.knn") + "' --features '" + (dir / "wide") + "'").code == 3);
  }
  SUBCASE("corrupt model file is an input error") {
    std::ofstream(dir / "junk.model") << "gesture-model 1\nkind svm\n";
    CHECK(cli("predict --model '" + (dir / "junk.model") + "' --input '" + (dir / "test_0.csv") + "'").code == 2);
  }
}

TEST_CASE("cli friedman") {
  TempDir dir("gesture_cli_friedman");
  std::ofstream(dir / "t.csv") << "algorithm,d1,d2,d3\nSVM,0.9,0.9,0.9\nkNN,0.5,0.5,0.5\nEDT,0.7,0.7,0.6\nLMA-NN,0.6,0.6,0.7\n";
  const Run r = cli("friedman --scores '" + (dir / "t.csv") + "'");
  CHECK(r.code == 0);
  CHECK(r.out.find("8.2000") != std::string::npos);
  CHECK(r.out.find("\nreject the null hypothesis") != std::string::npos);

  std::ofstream(dir / "eq.csv") << "algorithm,d1,d2\nA,1,1\nB,1,1\nC,1,1\n";
  const Run eq = cli("friedman --scores '" + (dir / "eq.csv") + "'");
  CHECK(eq.out.find("0.0000") != std::string::npos);
  CHECK(eq.out.find("fail to reject") != std::string::npos);

  std::ofstream(dir / "two.csv") << "algorithm,d1\nA,0.9\nB,0.1\n";
  const Run two = cli("friedman --scores '" + (dir / "two.csv") + "'");
  CHECK(two.code == 0);
  CHECK(two.out.find("3.841") != std::string::npos);

  std::ofstream(dir / "bad.csv") << "algorithm,d1\nA,high\nB,0.1\n";
  CHECK(cli("friedman --scores '" + (dir / "bad.csv") + "'").code == 2);
  std::ofstream(dir / "ragged.csv") << "algorithm,d1,d2\nA,0.1\nB,0.1,0.2\n";
  CHECK(cli("friedman --scores '" + (dir / "ragged.csv") + "'").code == 2);
}

TEST_CASE("cli gen-synth, experiment and round-trip-check") {
  TempDir dir("gesture_cli_gen");
  const std::string args = "gen-synth --classes waving,clap --samples 3 --frames 20 --seed 5 --features --out-dir ";
  REQUIRE(cli(args + "'" + (dir / "a") + "'").code == 0);
  REQUIRE(cli(args + "'" + (dir / "b") + "'").code == 0);
  for (const auto& e : fs::directory_iterator(dir.path / "a"))
    CHECK(slurp(e.path()) == slurp(dir.path / "b" / e.path().filename()));
  CHECK(cli("round-trip-check --input '" + (dir / "a/clap_002.txt") + "'").code == 0);

  std::ofstream(dir / "cfg.txt") << "gesture-experiment 1\nclasses = waving,clap\nsamples_per_class = 3\nframes = 20\n";
  REQUIRE(cli("gen-synth --config '" + (dir / "cfg.txt") + "' --out-dir '" + (dir / "c") + "'").code == 0);
  CHECK(fs::exists(dir.path / "c" / "waving_003.txt"));
  CHECK(cli("gen-synth --config '" + (dir / "missing.txt") + "' --out-dir '" + (dir / "d") + "'").code == 2);

  REQUIRE(cli("gen-synth --interaction shaking-hands,pushing --frames 30 --out-dir '" + (dir / "i") + "'").code == 0);
  CHECK(read_skeleton_file(dir / "i/shaking-hands_pushing_left.txt").frames.size() == 30);
  CHECK(read_skeleton_file(dir / "i/shaking-hands_pushing_right.txt").frames.size() == 30);

  const Run x1 = cli("experiment --config '" + (dir / "cfg.txt") + "' --classifier knn");
  const Run x2 = cli("experiment --config '" + (dir / "cfg.txt") + "' --classifier knn");
  CHECK(x1.code == 0);
  CHECK(x1.out == x2.out);
  CHECK(x1.out.find("macro") != std::string::npos);

  std::ofstream(dir / "bad.txt") << "1 2 3\n";
  CHECK(cli("round-trip-check --input '" + (dir / "bad.txt") + "'").code == 2);
}
