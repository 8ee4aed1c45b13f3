#include "gesture/dataset.hpp"

#include <algorithm>

#include "gesture/errors.hpp"

namespace gesture {

std::vector<std::string> LabeledDataset::classes() const {
  std::vector<std::string> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back(s.label);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void LabeledDataset::check_consistent() const {
  const std::size_t dim = dimension();
  for (const Sample& s : samples)
    if (s.features.size() != dim) throw DimensionMismatch(dim, s.features.size());
}

std::size_t class_index(std::span<const std::string> classes, const std::string& label) {
  auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) throw InvalidArgument("unknown class label '" + label + "'");
  return static_cast<std::size_t>(it - classes.begin());
}

EncodedLabels encode_for_training(const LabeledDataset& data) {
  data.check_consistent();
  EncodedLabels enc{data.classes(), {}};
  if (enc.classes.size() < 2) throw InsufficientClasses(enc.classes.size());
  if (data.dimension() == 0) throw InvalidArgument("training vectors are empty");
  enc.targets.reserve(data.size());
  for (const Sample& s : data.samples) enc.targets.push_back(class_index(enc.classes, s.label));
  return enc;
}

}  // namespace gesture
