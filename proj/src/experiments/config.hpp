#ifndef EHAM_EXPERIMENTS_CONFIG_HPP
#define EHAM_EXPERIMENTS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "memory/hamr.hpp"
#include "retrieval/retrieval.hpp"

namespace eham {

enum class CorpusSource { Idx, Synthetic };

struct ExperimentConfig {
  std::uint64_t seed = 1;
  // Number of folds to run, taken in order from the ten partitions.
  std::uint32_t folds = 10;
  Dims dims{64, 64, 16, 16};
  std::uint32_t cap = kDefaultCap;
  std::vector<std::string> presets{"default", "operational"};
  std::vector<std::uint32_t> schedule{1, 2, 4, 8, 16, 32, 64, 100};
  std::vector<Method> methods{Method::RS, Method::ST, Method::SS};
  std::vector<Direction> directions{Direction::AtoB, Direction::BtoA};
  std::uint32_t samples = 128;
  std::uint32_t budget = 800;
  MemParams gate;
  // 0 keeps every pair the corpora allow.
  std::size_t pairs_per_class = 0;
  bool run_recognition = true;
  bool run_retrieval = true;
  unsigned jobs = 1;
  // When false the wall_time_s column is written as 0 so runs are
  // byte-comparable.
  bool measure_time = true;

  CorpusSource corpus = CorpusSource::Idx;
  std::vector<std::filesystem::path> digits_images;
  std::vector<std::filesystem::path> digits_labels;
  std::vector<std::filesystem::path> letters_images;
  std::vector<std::filesystem::path> letters_labels;
  bool digits_transpose = false;
  bool letters_transpose = true;
  std::size_t synth_per_class = 500;
  double synth_distortion = 1.0;
  std::uint64_t synth_seed = 1;

  void validate() const;
};

// Recognition parameter presets: "default" (0,0,0), "operational"
// (iota 0.05, xi 32), "caption" (iota 0.05, kappa 32).
MemParams preset_params(std::string_view name);

void validate_schedule(const std::vector<std::uint32_t>& schedule);

// Flat `key = value` lines; '#' starts a comment. Relative paths resolve
// against `base_dir`.
ExperimentConfig parse_config(std::string_view text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Fills empty IDX paths from $EHAM_DATA_DIR using the stock file names.
void resolve_corpus_paths(ExperimentConfig& cfg);

}  // namespace eham

#endif  // EHAM_EXPERIMENTS_CONFIG_HPP
