#include <charconv>
#include <fstream>
#include <sstream>

#include "gesture/classifiers.hpp"
#include "gesture/errors.hpp"
#include "gesture/skeleton.hpp"

namespace gesture {

namespace {

constexpr std::string_view kMagic = "gesture-model";
constexpr int kFormatVersion = 1;

class Writer {
public:
  Writer& key(std::string_view k) {
    out_ += k;
    return *this;
  }
  Writer& value(double v) {
    out_ += ' ';
    out_ += format_double(v);
    return *this;
  }
  Writer& value(std::size_t v) {
    out_ += ' ';
    out_ += std::to_string(v);
    return *this;
  }
  Writer& value(std::string_view v) {
    out_ += ' ';
    out_ += v;
    return *this;
  }
  void end_line() { out_ += '\n'; }
  std::string str() && { return std::move(out_); }

private:
  std::string out_;
};

// Line-oriented reader: each line is a key followed by space-separated values.
class Reader {
public:
  explicit Reader(const std::string& text) : in_(text) {}

  std::vector<std::string> line(std::string_view expected_key) {
    std::string raw = next_raw();
    std::istringstream ls(raw);
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;) tokens.push_back(t);
    if (tokens.empty() || tokens.front() != expected_key)
      fail("expected '" + std::string(expected_key) + "'");
    tokens.erase(tokens.begin());
    return tokens;
  }

  /// Rest of the line after `expected_key` and one space, verbatim.
  std::string text_line(std::string_view expected_key) {
    std::string raw = next_raw();
    if (raw.rfind(expected_key, 0) != 0 || raw.size() <= expected_key.size() + 1 || raw[expected_key.size()] != ' ')
      fail("expected '" + std::string(expected_key) + " <text>'");
    return raw.substr(expected_key.size() + 1);
  }

  std::string single(std::string_view key) {
    auto t = line(key);
    if (t.size() != 1) fail("'" + std::string(key) + "' takes exactly one value");
    return t.front();
  }

  std::size_t count(std::string_view key) { return to_size(single(key)); }
  double real(std::string_view key) { return to_double(single(key)); }

  std::size_t to_size(const std::string& s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) fail("bad integer '" + s + "'");
    return v;
  }

  double to_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) fail("bad number '" + s + "'");
    return v;
  }

  std::vector<double> reals(const std::vector<std::string>& tokens, std::size_t from, std::size_t n) {
    if (tokens.size() != from + n) fail("expected " + std::to_string(n) + " values");
    std::vector<double> v;
    v.reserve(n);
    for (std::size_t i = from; i < tokens.size(); ++i) v.push_back(to_double(tokens[i]));
    return v;
  }

  /// Only blank lines remain.
  bool at_end() {
    for (std::string raw; std::getline(in_, raw);) {
      ++line_no_;
      if (raw.find_first_not_of(" \t\r") != std::string::npos) return false;
    }
    return true;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ModelFormatError("model file line " + std::to_string(line_no_) + ": " + why);
  }

private:
  std::string next_raw() {
    std::string raw;
    if (!std::getline(in_, raw)) {
      ++line_no_;
      fail("unexpected end of file");
    }
    ++line_no_;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    return raw;
  }

  std::istringstream in_;
  std::size_t line_no_ = 0;
};

void write_header(Writer& w, std::string_view kind, const std::vector<std::string>& classes, std::size_t dimension) {
  w.key(kMagic).value(static_cast<std::size_t>(kFormatVersion)).end_line();
  w.key("kind").value(kind).end_line();
  w.key("dimension").value(dimension).end_line();
  w.key("classes").value(classes.size()).end_line();
  for (const auto& c : classes) {
    if (c.empty() || c.find('\n') != std::string::npos || c.front() == ' ')
      throw InvalidArgument("class label cannot be stored: '" + c + "'");
    w.key("class").value(std::string_view(c)).end_line();
  }
}

void write_vector(Writer& w, std::string_view key, const std::vector<double>& v) {
  w.key(key);
  for (double x : v) w.value(x);
  w.end_line();
}

std::string to_text(const SvmModel& m) {
  Writer w;
  write_header(w, "svm", m.classes, m.dimension);
  w.key("sigma").value(m.params.sigma).end_line();
  w.key("c").value(m.params.c).end_line();
  w.key("tolerance").value(m.params.tolerance).end_line();
  w.key("max_iterations_per_sample").value(m.params.max_iterations_per_sample).end_line();
  w.key("support_vectors").value(m.support_vectors.size()).end_line();
  for (const auto& sv : m.support_vectors) write_vector(w, "sv", sv);
  w.key("machines").value(m.machines.size()).end_line();
  for (const BinaryMachine& mc : m.machines) {
    w.key("machine").value(mc.bias).value(mc.support.size());
    for (std::size_t i = 0; i < mc.support.size(); ++i) w.value(mc.support[i]).value(mc.coef[i]);
    w.end_line();
  }
  w.key("end").end_line();
  return std::move(w).str();
}

std::string to_text(const EnsembleModel& m) {
  Writer w;
  write_header(w, "edt", m.classes, m.dimension);
  w.key("bootstrap_fraction").value(m.params.bootstrap_fraction).end_line();
  w.key("seed").value(std::to_string(m.params.seed)).end_line();
  w.key("bootstrap_mode").value(m.params.mode == BootstrapMode::identity ? "identity" : "resample").end_line();
  w.key("trees").value(m.trees.size()).end_line();
  for (const DecisionTree& t : m.trees) {
    w.key("tree").value(t.nodes.size()).end_line();
    for (const auto& n : t.nodes) {
      if (n.feature < 0) {
        w.key("node").value("leaf").value(n.label).end_line();
      } else {
        w.key("node").value("split").value(static_cast<std::size_t>(n.feature)).value(n.threshold);
        w.value(n.left).value(n.right).end_line();
      }
    }
  }
  w.key("end").end_line();
  return std::move(w).str();
}

std::string to_text(const KnnModel& m) {
  Writer w;
  write_header(w, "knn", m.classes, m.dimension);
  w.key("k").value(m.k).end_line();
  w.key("points").value(m.points.size()).end_line();
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    w.key("point").value(m.targets[i]);
    for (double x : m.points[i]) w.value(x);
    w.end_line();
  }
  w.key("end").end_line();
  return std::move(w).str();
}

SvmModel read_svm(Reader& r, std::vector<std::string> classes, std::size_t dim) {
  SvmModel m;
  m.classes = std::move(classes);
  m.dimension = dim;
  m.params.sigma = r.real("sigma");
  m.params.c = r.real("c");
  m.params.tolerance = r.real("tolerance");
  m.params.max_iterations_per_sample = r.count("max_iterations_per_sample");
  if (!(m.params.sigma > 0.0)) r.fail("sigma must be positive");
  const std::size_t n_sv = r.count("support_vectors");
  for (std::size_t i = 0; i < n_sv; ++i) m.support_vectors.push_back(r.reals(r.line("sv"), 0, dim));
  const std::size_t n_machines = r.count("machines");
  if (n_machines != m.classes.size()) r.fail("machine count must equal class count");
  for (std::size_t i = 0; i < n_machines; ++i) {
    auto t = r.line("machine");
    if (t.size() < 2) r.fail("truncated machine");
    BinaryMachine mc;
    mc.bias = r.to_double(t[0]);
    const std::size_t n = r.to_size(t[1]);
    if (t.size() != 2 + 2 * n) r.fail("machine has wrong number of terms");
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t idx = r.to_size(t[2 + 2 * s]);
      if (idx >= n_sv) r.fail("support vector index out of range");
      mc.support.push_back(idx);
      mc.coef.push_back(r.to_double(t[3 + 2 * s]));
    }
    m.machines.push_back(std::move(mc));
  }
  return m;
}

EnsembleModel read_edt(Reader& r, std::vector<std::string> classes, std::size_t dim) {
  EnsembleModel m;
  m.classes = std::move(classes);
  m.dimension = dim;
  m.params.bootstrap_fraction = r.real("bootstrap_fraction");
  const std::string seed = r.single("seed");
  {
    auto [ptr, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), m.params.seed);
    if (ec != std::errc{} || ptr != seed.data() + seed.size()) r.fail("bad seed");
  }
  const std::string mode = r.single("bootstrap_mode");
  if (mode == "identity") m.params.mode = BootstrapMode::identity;
  else if (mode == "resample") m.params.mode = BootstrapMode::resample;
  else r.fail("unknown bootstrap mode '" + mode + "'");
  m.params.trees = r.count("trees");
  for (std::size_t t = 0; t < m.params.trees; ++t) {
    DecisionTree tree;
    const std::size_t n_nodes = r.count("tree");
    if (n_nodes == 0) r.fail("empty tree");
    tree.nodes.resize(n_nodes);
    for (std::size_t id = 0; id < n_nodes; ++id) {
      auto fields = r.line("node");
      auto& node = tree.nodes[id];
      if (fields.size() == 2 && fields[0] == "leaf") {
        node.label = r.to_size(fields[1]);
        if (node.label >= m.classes.size()) r.fail("leaf label out of range");
      } else if (fields.size() == 5 && fields[0] == "split") {
        const std::size_t feature = r.to_size(fields[1]);
        if (feature >= dim) r.fail("split feature out of range");
        node.feature = static_cast<std::int64_t>(feature);
        node.threshold = r.to_double(fields[2]);
        node.left = r.to_size(fields[3]);
        node.right = r.to_size(fields[4]);
        // Children always follow their parent, which also rules out cycles.
        if (node.left <= id || node.right <= id || node.left >= n_nodes || node.right >= n_nodes)
          r.fail("child index out of range");
      } else {
        r.fail("malformed node");
      }
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

KnnModel read_knn(Reader& r, std::vector<std::string> classes, std::size_t dim) {
  KnnModel m;
  m.classes = std::move(classes);
  m.dimension = dim;
  m.k = r.count("k");
  const std::size_t n = r.count("points");
  if (m.k == 0 || m.k % 2 == 0 || m.k > n) r.fail("invalid k");
  for (std::size_t i = 0; i < n; ++i) {
    auto t = r.line("point");
    if (t.empty()) r.fail("truncated point");
    const std::size_t label = r.to_size(t[0]);
    if (label >= m.classes.size()) r.fail("point label out of range");
    m.targets.push_back(label);
    m.points.push_back(r.reals(t, 1, dim));
  }
  return m;
}

}  // namespace

std::string serialize_model(const Model& model) {
  return std::visit([](const auto& m) { return to_text(m); }, model);
}

Model deserialize_model(const std::string& text) {
  Reader r(text);
  const auto magic = r.line(kMagic);
  if (magic.size() != 1 || magic.front() != std::to_string(kFormatVersion))
    r.fail("unsupported format version");
  const std::string kind = r.single("kind");
  if (kind != "svm" && kind != "edt" && kind != "knn") r.fail("unknown model kind '" + kind + "'");
  const std::size_t dim = r.count("dimension");
  if (dim == 0) r.fail("dimension must be positive");
  const std::size_t n_classes = r.count("classes");
  if (n_classes < 2) r.fail("a model needs at least two classes");
  std::vector<std::string> classes;
  for (std::size_t i = 0; i < n_classes; ++i) {
    classes.push_back(r.text_line("class"));
    if (i > 0 && !(classes[i - 1] < classes[i])) r.fail("classes must be sorted and distinct");
  }

  Model model;
  if (kind == "svm") model = read_svm(r, std::move(classes), dim);
  else if (kind == "edt") model = read_edt(r, std::move(classes), dim);
  else model = read_knn(r, std::move(classes), dim);
  if (!r.line("end").empty() || !r.at_end()) r.fail("trailing data after 'end'");
  return model;
}

void save_model(const Model& model, const std::string& path) {
  const std::string text = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write model file: " + path);
  out << text;
  if (!out) throw InputError("failed writing model file: " + path);
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

Prediction predict(const Model& model, std::span<const double> x) {
  struct Visitor {
    std::span<const double> x;
    Prediction operator()(const SvmModel& m) const {
      auto p = svm_predict(m, x);
      return {std::move(p.label), std::move(p.scores)};
    }
    Prediction operator()(const EnsembleModel& m) const {
      auto p = edt_predict(m, x);
      return {std::move(p.label), std::vector<double>(p.votes.begin(), p.votes.end())};
    }
    Prediction operator()(const KnnModel& m) const {
      auto p = knn_classify(m, x);
      return {std::move(p.label), std::vector<double>(p.votes.begin(), p.votes.end())};
    }
  };
  return std::visit(Visitor{x}, model);
}

std::string model_kind(const Model& model) {
  switch (model.index()) {
    case 0: return "svm";
    case 1: return "edt";
    default: return "knn";
  }
}

const std::vector<std::string>& model_classes(const Model& model) {
  return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.classes; }, model);
}

std::size_t model_dimension(const Model& model) {
  return std::visit([](const auto& m) { return m.dimension; }, model);
}

}  // namespace gesture
