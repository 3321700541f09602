#include "grasp/sampling.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "grasp/error.hpp"

namespace grasp {

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::kStructured:
      return "structured";
    case Provenance::kProcess:
      return "process";
    case Provenance::kCollective:
      return "collective";
    case Provenance::kRandom:
      return "random";
  }
  return "unknown";
}

std::string_view to_string(RandomBase base) {
  return base == RandomBase::kStructured ? "structured" : "collective";
}

std::optional<RandomBase> parse_random_base(std::string_view name) {
  if (name == "structured") return RandomBase::kStructured;
  if (name == "collective") return RandomBase::kCollective;
  return std::nullopt;
}

std::vector<PageId> SampleSet::pages(Provenance provenance) const {
  std::vector<PageId> out;
  for (const auto& e : entries) {
    if (e.provenance == provenance) out.push_back(e.page_id);
  }
  return out;
}

std::size_t random_share(std::size_t base_size) { return (base_size + 9) / 10; }

std::vector<PageId> random_sample(const std::vector<PageId>& pool, std::size_t size,
                                  std::uint64_t seed, const std::vector<PageId>& exclude) {
  const std::set<PageId> excluded(exclude.begin(), exclude.end());
  std::vector<PageId> candidates;
  for (const auto id : std::set<PageId>(pool.begin(), pool.end())) {
    if (!excluded.contains(id)) candidates.push_back(id);
  }
  if (size > candidates.size()) {
    throw SamplingError("random sample of " + std::to_string(size) + " pages requested but only " +
                        std::to_string(candidates.size()) + " eligible (short by " +
                        std::to_string(size - candidates.size()) + ")");
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < size; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
    std::swap(candidates[i], candidates[pick(rng)]);
  }
  candidates.resize(size);
  return candidates;
}

SampleSet assemble_sample(const std::vector<Representative>& collective,
                          const std::vector<PageId>& structured,
                          const std::vector<PageId>& processes, const Corpus& corpus,
                          std::uint64_t seed, RandomBase base) {
  const auto check = [&](PageId id, std::string_view what) {
    if (id >= corpus.size()) {
      throw ReferentialError(std::string(what) + " page id " + std::to_string(id) +
                             " is not in the corpus");
    }
  };
  for (const auto id : structured) check(id, "structured");
  for (const auto id : processes) check(id, "process");
  for (const auto& r : collective) check(r.page_id, "collective");

  SampleSet sample;
  std::set<PageId> taken;
  std::size_t structured_count = 0;
  std::size_t collective_count = 0;
  for (const auto id : structured) {
    if (taken.insert(id).second) {
      sample.entries.push_back({id, Provenance::kStructured, std::nullopt});
      ++structured_count;
    }
  }
  for (const auto id : processes) {
    if (taken.insert(id).second) sample.entries.push_back({id, Provenance::kProcess, std::nullopt});
  }
  std::set<PageId> distinct_collective;
  for (const auto& r : collective) {
    distinct_collective.insert(r.page_id);
    if (taken.insert(r.page_id).second) {
      sample.entries.push_back({r.page_id, Provenance::kCollective, r.cluster});
    }
  }
  collective_count = distinct_collective.size();

  const std::size_t random_count =
      random_share(base == RandomBase::kStructured ? structured_count : collective_count);
  std::vector<PageId> pool(corpus.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<PageId>(i);
  const std::vector<PageId> exclude(taken.begin(), taken.end());
  for (const auto id : random_sample(pool, random_count, seed, exclude)) {
    sample.entries.push_back({id, Provenance::kRandom, std::nullopt});
  }

  sample.params_echo["random_base"] = to_string(base);
  sample.params_echo["random_count"] = random_count;
  sample.params_echo["random_seed"] = seed;
  return sample;
}

}  // namespace grasp
