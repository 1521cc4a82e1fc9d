#ifndef EHAM_EXPERIMENTS_EXPERIMENTS_HPP
#define EHAM_EXPERIMENTS_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "experiments/config.hpp"
#include "experiments/hemnist.hpp"
#include "featurizer/featurize.hpp"

namespace eham {

inline constexpr int kMeanFold = -1;
inline constexpr int kSdFold = -2;

struct MetricsRow {
  int fold = 0;  // kMeanFold / kSdFold mark summary rows
  std::string method;
  std::string direction;
  std::uint32_t fill_percent = 0;
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
  double entropy = 0.0;
  double wall_time = 0.0;
};

inline constexpr std::string_view kCsvHeader =
    "fold,method,direction,fill_percent,precision,recall,accuracy,entropy,"
    "wall_time_s";

std::string format_csv(std::span<const MetricsRow> rows);

struct ClassTally {
  std::uint64_t cues = 0;
  std::uint64_t responses = 0;
  std::uint64_t correct = 0;
};

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
};

// Macro averages over classes with at least one cue. A class that gave no
// response has precision 1 (it made no wrong response). Accuracy is the
// pooled correct / cues.
Scores macro_scores(std::span<const ClassTally> tallies);

// Featurized corpora, labels as in the source files.
struct Corpus {
  std::vector<LabeledFn> digits;
  std::vector<LabeledFn> letters;
};

std::vector<LabeledFn> featurize_set(const LabeledSet& set, unsigned jobs = 1);
Corpus load_corpus(ExperimentConfig cfg);

struct FoldData {
  std::uint32_t fold = 0;
  std::uint64_t seed = 0;  // config seed + fold
  ClassMap map;
  std::vector<PairSample> pairs;
  Partition part;
  // remembering ids in registration order
  std::vector<std::size_t> fill_order;
  CentroidModel digit_model;
  CentroidModel letter_model;
  double digit_accuracy = 0.0;   // on the testing split
  double letter_accuracy = 0.0;
};

FoldData prepare_fold(const Corpus& corpus, const ExperimentConfig& cfg,
                      std::uint32_t fold);

// Number of remembering pairs registered at `percent` fill.
std::size_t fill_count(std::size_t total, std::uint32_t percent);

struct RecognitionCase {
  PairCue cue;
  bool positive;
};

// Test pairs (positives) plus as many random pairs of non-corresponding
// classes drawn from the same split (negatives).
std::vector<RecognitionCase> recognition_mixture(const FoldData& fold);

struct RunOptions {
  Dims dims{64, 64, 16, 16};
  std::uint32_t cap = kDefaultCap;
  unsigned jobs = 1;
  bool measure_time = true;
};

std::vector<MetricsRow> recognition_experiment(
    const FoldData& fold, const std::string& preset, const MemParams& params,
    std::span<const std::uint32_t> schedule, const RunOptions& opts);

std::vector<MetricsRow> retrieval_experiment(
    const FoldData& fold, Method method, Direction dir,
    const SearchConfig& search, std::span<const std::uint32_t> schedule,
    const RunOptions& opts);

struct CrossValidation {
  std::vector<MetricsRow> rows;
  std::vector<MetricsRow> summary;
  std::vector<double> digit_accuracy;  // per fold
  std::vector<double> letter_accuracy;
};

using Progress = std::function<void(const std::string&)>;

CrossValidation cross_validate(const ExperimentConfig& cfg,
                               const Corpus& corpus,
                               const Progress& progress = {});
CrossValidation cross_validate(const ExperimentConfig& cfg,
                               const Progress& progress = {});

// Mean and sample standard deviation rows for every (method, direction,
// fill) group, in first-appearance order.
std::vector<MetricsRow> summarize(std::span<const MetricsRow> rows);

}  // namespace eham

#endif  // EHAM_EXPERIMENTS_EXPERIMENTS_HPP
