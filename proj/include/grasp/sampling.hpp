#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "grasp/clustering.hpp"
#include "grasp/corpus.hpp"

namespace grasp {

// Origin of a page in the assembled audit sample.
enum class Provenance { kStructured, kProcess, kCollective, kRandom };

std::string_view to_string(Provenance provenance);

struct SampleEntry {
  PageId page_id = 0;
  Provenance provenance = Provenance::kCollective;
  std::optional<int> cluster_id;  // set for collective entries
};

struct SampleSet {
  std::vector<SampleEntry> entries;
  nlohmann::ordered_json params_echo = nlohmann::ordered_json::object();

  std::vector<PageId> pages(Provenance provenance) const;
};

// What the randomly selected share is a fraction of.
enum class RandomBase { kStructured, kCollective };

std::string_view to_string(RandomBase base);
std::optional<RandomBase> parse_random_base(std::string_view name);

// ceil(10% of base_size), computed exactly in integers.
std::size_t random_share(std::size_t base_size);

// Uniform draw without replacement from pool \ exclude. The result does not
// depend on the order of `pool`. Throws SamplingError if too few candidates.
std::vector<PageId> random_sample(const std::vector<PageId>& pool, std::size_t size,
                                  std::uint64_t seed, const std::vector<PageId>& exclude = {});

// Merges the structured sample, complete-process pages and the collective
// representatives (dedup priority structured > process > collective), then
// appends random pages disjoint from everything else.
SampleSet assemble_sample(const std::vector<Representative>& collective,
                          const std::vector<PageId>& structured,
                          const std::vector<PageId>& processes, const Corpus& corpus,
                          std::uint64_t seed, RandomBase base = RandomBase::kStructured);

}  // namespace grasp
