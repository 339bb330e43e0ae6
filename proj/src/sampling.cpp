#include "gfred/sampling.hpp"

#include <map>
#include <string>
#include <utility>

#include "gfred/error.hpp"

namespace gfred {

namespace {

template <typename T>
void partial_shuffle(std::vector<T>& items, std::size_t picks, CounterRng& rng) {
  for (std::size_t j = 0; j < picks; ++j) {
    const std::size_t r = j + static_cast<std::size_t>(rng.uniform(items.size() - j));
    std::swap(items[j], items[r]);
  }
}

}  // namespace

Subset sample_subset(const LabeledData& data, const SubsetSpec& spec, std::uint64_t trial_index) {
  if (spec.classes_to_pick < 1 || spec.images_per_class < 1)
    throw Error(Errc::InvalidArgument, "classes and images per class must be positive");
  if (data.labels.size() != static_cast<std::size_t>(data.X.cols()))
    throw Error(Errc::CountMismatch, "subset sampling requires one label per column");

  std::map<int, std::vector<Eigen::Index>> by_class;
  for (std::size_t i = 0; i < data.labels.size(); ++i)
    by_class[data.labels[i]].push_back(static_cast<Eigen::Index>(i));

  std::vector<int> eligible;
  for (const auto& [label, members] : by_class)
    if (members.size() >= static_cast<std::size_t>(spec.images_per_class))
      eligible.push_back(label);
  if (eligible.size() < static_cast<std::size_t>(spec.classes_to_pick))
    throw Error(Errc::InsufficientImages,
                std::to_string(eligible.size()) + " classes have at least " +
                    std::to_string(spec.images_per_class) + " images, need " +
                    std::to_string(spec.classes_to_pick));

  CounterRng rng(spec.seed, trial_index);
  partial_shuffle(eligible, static_cast<std::size_t>(spec.classes_to_pick), rng);

  Subset out;
  for (int c = 0; c < spec.classes_to_pick; ++c) {
    std::vector<Eigen::Index> members = by_class[eligible[c]];
    partial_shuffle(members, static_cast<std::size_t>(spec.images_per_class), rng);
    for (int j = 0; j < spec.images_per_class; ++j) {
      out.indices.push_back(members[j]);
      out.labels.push_back(eligible[c]);
    }
  }
  out.X.resize(data.X.rows(), static_cast<Eigen::Index>(out.indices.size()));
  for (std::size_t j = 0; j < out.indices.size(); ++j)
    out.X.col(static_cast<Eigen::Index>(j)) = data.X.col(out.indices[j]);
  return out;
}

}  // namespace gfred
