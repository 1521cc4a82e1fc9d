#include "experiments/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "common/parallel.hpp"
#include "experiments/synth.hpp"

namespace eham {

namespace {

constexpr std::uint64_t kFillTag = 0x66696c6cULL;
constexpr std::uint64_t kNegTag = 0x6e656761ULL;
constexpr std::uint64_t kCueTag = 0x63756573ULL;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void append_row(std::string& out, const MetricsRow& r) {
  char buf[256];
  std::string fold = r.fold == kMeanFold ? "mean"
                     : r.fold == kSdFold ? "sd"
                                         : std::to_string(r.fold);
  std::snprintf(buf, sizeof buf, ",%s,%s,%u,%.6f,%.6f,%.6f,%.6f,%.3f\n",
                r.method.c_str(), r.direction.c_str(), r.fill_percent,
                r.precision, r.recall, r.accuracy, r.entropy, r.wall_time);
  out += fold;
  out += buf;
}

}  // namespace

std::string format_csv(std::span<const MetricsRow> rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) append_row(out, r);
  return out;
}

Scores macro_scores(std::span<const ClassTally> tallies) {
  Scores s;
  std::size_t classes = 0;
  std::uint64_t cues = 0;
  std::uint64_t correct = 0;
  for (const auto& t : tallies) {
    if (t.correct > t.responses || t.responses > t.cues) {
      throw std::invalid_argument("inconsistent class tally");
    }
    if (t.cues == 0) continue;
    ++classes;
    s.precision += t.responses == 0
                       ? 1.0
                       : static_cast<double>(t.correct) / t.responses;
    s.recall += static_cast<double>(t.correct) / t.cues;
    cues += t.cues;
    correct += t.correct;
  }
  if (classes == 0) return s;
  s.precision /= classes;
  s.recall /= classes;
  s.accuracy = static_cast<double>(correct) / cues;
  return s;
}

std::vector<LabeledFn> featurize_set(const LabeledSet& set, unsigned jobs) {
  set.validate();
  std::vector<LabeledFn> out(set.size());
  parallel_for(set.size(), jobs, [&](std::size_t i) {
    out[i] = {set.labels[i], featurize(set.images[i])};
  });
  return out;
}

namespace {

LabeledSet load_many(const std::vector<std::filesystem::path>& images,
                     const std::vector<std::filesystem::path>& labels,
                     bool transpose) {
  if (images.size() != labels.size()) {
    throw std::invalid_argument("image and label path lists differ in length");
  }
  LabeledSet all;
  for (std::size_t f = 0; f < images.size(); ++f) {
    auto part = load_idx(images[f], labels[f], transpose);
    all.images.insert(all.images.end(),
                      std::make_move_iterator(part.images.begin()),
                      std::make_move_iterator(part.images.end()));
    all.labels.insert(all.labels.end(), part.labels.begin(), part.labels.end());
    if (part.class_names.size() > all.class_names.size()) {
      all.class_names = std::move(part.class_names);
    }
  }
  return all;
}

}  // namespace

Corpus load_corpus(ExperimentConfig cfg) {
  Corpus corpus;
  if (cfg.corpus == CorpusSource::Synthetic) {
    SynthOptions opts;
    opts.per_class = cfg.synth_per_class;
    opts.seed = cfg.synth_seed;
    opts.distortion = cfg.synth_distortion;
    corpus.digits = featurize_set(synth_glyphs(GlyphKind::Digits, opts), cfg.jobs);
    corpus.letters =
        featurize_set(synth_glyphs(GlyphKind::Letters, opts), cfg.jobs);
    return corpus;
  }
  resolve_corpus_paths(cfg);
  corpus.digits = featurize_set(
      load_many(cfg.digits_images, cfg.digits_labels, cfg.digits_transpose),
      cfg.jobs);
  corpus.letters = featurize_set(
      load_many(cfg.letters_images, cfg.letters_labels, cfg.letters_transpose),
      cfg.jobs);
  return corpus;
}

std::size_t fill_count(std::size_t total, std::uint32_t percent) {
  if (percent == 0 || percent > 100) {
    throw std::invalid_argument("fill percent " + std::to_string(percent) +
                                " outside (0, 100]");
  }
  if (percent == 100 || total == 0) return total;
  const std::size_t n = (total * percent + 50) / 100;
  return std::clamp<std::size_t>(n, 1, total);
}

FoldData prepare_fold(const Corpus& corpus, const ExperimentConfig& cfg,
                      std::uint32_t fold) {
  FoldData fd;
  fd.fold = fold;
  fd.seed = cfg.seed + fold;
  // pairing depends on the base seed only, so folds partition one corpus
  fd.pairs = build_pairs(corpus.digits, corpus.letters, fd.map, cfg.seed,
                         cfg.pairs_per_class);
  fd.part = make_partition(fd.pairs, fold);
  fd.fill_order = fd.part.remembering;
  Rng rng(derive_seed(fd.seed, {kFillTag}));
  shuffle(fd.fill_order, rng);

  std::vector<LabeledFn> digit_train;
  std::vector<LabeledFn> letter_train;
  for (auto idx : fd.part.training) {
    const auto& p = fd.pairs[idx];
    digit_train.push_back({p.pair_class, p.digit});
    letter_train.push_back({fd.map.letter(p.pair_class), p.letter});
  }
  std::vector<std::uint16_t> digit_classes;
  std::vector<std::uint16_t> letter_classes;
  for (std::uint16_t c = 0; c < ClassMap::kClasses; ++c) {
    digit_classes.push_back(c);
    letter_classes.push_back(fd.map.letter(c));
  }
  fd.digit_model = fit_centroids(digit_train, digit_classes);
  fd.letter_model = fit_centroids(letter_train, letter_classes);

  std::size_t digit_ok = 0;
  std::size_t letter_ok = 0;
  for (auto idx : fd.part.testing) {
    const auto& p = fd.pairs[idx];
    digit_ok += fd.digit_model.classify(p.digit) == p.pair_class;
    letter_ok += fd.letter_model.classify(p.letter) == fd.map.letter(p.pair_class);
  }
  const double n_test = static_cast<double>(fd.part.testing.size());
  if (n_test > 0) {
    fd.digit_accuracy = digit_ok / n_test;
    fd.letter_accuracy = letter_ok / n_test;
  }
  return fd;
}

std::vector<RecognitionCase> recognition_mixture(const FoldData& fold) {
  std::vector<RecognitionCase> cases;
  std::array<std::vector<std::size_t>, ClassMap::kClasses> by_class;
  for (auto idx : fold.part.testing) {
    const auto& p = fold.pairs[idx];
    cases.push_back({{p.digit, p.letter}, true});
    by_class[p.pair_class].push_back(idx);
  }
  std::vector<std::uint16_t> present;
  for (std::uint16_t c = 0; c < ClassMap::kClasses; ++c) {
    if (!by_class[c].empty()) present.push_back(c);
  }
  if (present.size() < 2) {
    throw std::invalid_argument("negatives need at least two classes in test");
  }
  Rng rng(derive_seed(fold.seed, {kNegTag}));
  const std::size_t positives = cases.size();
  for (std::size_t k = 0; k < positives; ++k) {
    // uniform over ordered pairs of distinct classes
    const auto a = rng.below(present.size());
    auto b = rng.below(present.size() - 1);
    if (b >= a) ++b;
    const auto& da = by_class[present[a]];
    const auto& lb = by_class[present[b]];
    const auto& digit = fold.pairs[da[rng.below(da.size())]].digit;
    const auto& letter = fold.pairs[lb[rng.below(lb.size())]].letter;
    cases.push_back({{digit, letter}, false});
  }
  return cases;
}

std::vector<MetricsRow> recognition_experiment(
    const FoldData& fold, const std::string& preset, const MemParams& params,
    std::span<const std::uint32_t> schedule, const RunOptions& opts) {
  validate_schedule({schedule.begin(), schedule.end()});
  params.validate();
  const auto cases = recognition_mixture(fold);
  Hamr4D mem(opts.dims, opts.cap);
  std::size_t registered = 0;
  std::vector<MetricsRow> rows;
  for (auto percent : schedule) {
    const auto t0 = Clock::now();
    const auto target = fill_count(fold.fill_order.size(), percent);
    for (; registered < target; ++registered) {
      const auto& p = fold.pairs[fold.fill_order[registered]];
      mem.register_pair({p.digit, p.letter});
    }
    const OmegaTable omega(mem);
    std::vector<char> accepted(cases.size());
    parallel_for(cases.size(), opts.jobs, [&](std::size_t i) {
      accepted[i] = recognize(mem, omega, cases[i].cue, params).accepted;
    });
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      if (cases[i].positive) {
        (accepted[i] ? tp : fn)++;
      } else {
        (accepted[i] ? fp : tn)++;
      }
    }
    MetricsRow row;
    row.fold = static_cast<int>(fold.fold);
    row.method = "recog-" + preset;
    row.direction = "pair";
    row.fill_percent = percent;
    row.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
    row.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    row.accuracy = static_cast<double>(tp + tn) / cases.size();
    row.entropy = mem.entropy();
    row.wall_time = opts.measure_time ? seconds_since(t0) : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<MetricsRow> retrieval_experiment(
    const FoldData& fold, Method method, Direction dir,
    const SearchConfig& search, std::span<const std::uint32_t> schedule,
    const RunOptions& opts) {
  validate_schedule({schedule.begin(), schedule.end()});
  search.validate();
  const auto& tests = fold.part.testing;
  Hamr4D mem(opts.dims, opts.cap);
  std::size_t registered = 0;
  std::vector<MetricsRow> rows;
  for (auto percent : schedule) {
    const auto t0 = Clock::now();
    const auto target = fill_count(fold.fill_order.size(), percent);
    for (; registered < target; ++registered) {
      const auto& p = fold.pairs[fold.fill_order[registered]];
      mem.register_pair({p.digit, p.letter});
    }
    // 0 = failed, 1 = wrong class, 2 = correct
    std::vector<char> verdict(tests.size());
    parallel_for(tests.size(), opts.jobs, [&](std::size_t i) {
      const auto& p = fold.pairs[tests[i]];
      SearchConfig cfg = search;
      cfg.rng_seed =
          derive_seed(fold.seed, {kCueTag, static_cast<std::uint64_t>(method),
                                  static_cast<std::uint64_t>(dir), percent, i});
      const bool a2b = dir == Direction::AtoB;
      const auto outcome = retrieve(method, mem, a2b ? p.digit : p.letter, dir, cfg);
      if (!outcome.object) {
        verdict[i] = 0;
        return;
      }
      const bool ok =
          a2b ? fold.letter_model.classify(*outcome.object) ==
                    fold.map.letter(p.pair_class)
              : fold.digit_model.classify(*outcome.object) == p.pair_class;
      verdict[i] = ok ? 2 : 1;
    });
    std::vector<ClassTally> tallies(ClassMap::kClasses);
    for (std::size_t i = 0; i < tests.size(); ++i) {
      auto& t = tallies[fold.pairs[tests[i]].pair_class];
      ++t.cues;
      t.responses += verdict[i] != 0;
      t.correct += verdict[i] == 2;
    }
    const auto scores = macro_scores(tallies);
    MetricsRow row;
    row.fold = static_cast<int>(fold.fold);
    row.method = std::string(to_string(method));
    for (auto& ch : row.method) ch = static_cast<char>(std::toupper(ch));
    row.direction = std::string(to_string(dir));
    row.fill_percent = percent;
    row.precision = scores.precision;
    row.recall = scores.recall;
    row.accuracy = scores.accuracy;
    row.entropy = mem.entropy();
    row.wall_time = opts.measure_time ? seconds_since(t0) : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<MetricsRow> summarize(std::span<const MetricsRow> rows) {
  struct Group {
    MetricsRow key;
    std::vector<const MetricsRow*> members;
  };
  std::vector<Group> groups;
  for (const auto& r : rows) {
    if (r.fold < 0) continue;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.key.method == r.method && g.key.direction == r.direction &&
             g.key.fill_percent == r.fill_percent;
    });
    if (it == groups.end()) {
      groups.push_back({r, {}});
      it = std::prev(groups.end());
    }
    it->members.push_back(&r);
  }
  std::vector<MetricsRow> out;
  for (const auto& g : groups) {
    MetricsRow mean = g.key;
    MetricsRow sd = g.key;
    mean.fold = kMeanFold;
    sd.fold = kSdFold;
    const double n = static_cast<double>(g.members.size());
    auto stat = [&](double MetricsRow::*field) {
      double sum = 0.0;
      for (const auto* m : g.members) sum += m->*field;
      const double mu = sum / n;
      double ss = 0.0;
      for (const auto* m : g.members) ss += (m->*field - mu) * (m->*field - mu);
      mean.*field = mu;
      sd.*field = g.members.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    };
    stat(&MetricsRow::precision);
    stat(&MetricsRow::recall);
    stat(&MetricsRow::accuracy);
    stat(&MetricsRow::entropy);
    stat(&MetricsRow::wall_time);
    out.push_back(std::move(mean));
    out.push_back(std::move(sd));
  }
  return out;
}

CrossValidation cross_validate(const ExperimentConfig& cfg,
                               const Corpus& corpus,
                               const Progress& progress) {
  cfg.validate();
  RunOptions opts;
  opts.dims = cfg.dims;
  opts.cap = cfg.cap;
  opts.jobs = cfg.jobs;
  opts.measure_time = cfg.measure_time;
  SearchConfig search;
  search.n_samples = cfg.samples;
  search.descent_budget = cfg.budget;
  search.gate = cfg.gate;

  auto say = [&](const std::string& msg) {
    if (progress) progress(msg);
  };

  CrossValidation cv;
  for (std::uint32_t fold = 0; fold < cfg.folds; ++fold) {
    const auto fd = prepare_fold(corpus, cfg, fold);
    cv.digit_accuracy.push_back(fd.digit_accuracy);
    cv.letter_accuracy.push_back(fd.letter_accuracy);
    say("fold " + std::to_string(fold) + ": " +
        std::to_string(fd.pairs.size()) + " pairs, classifier accuracy " +
        std::to_string(fd.digit_accuracy) + " / " +
        std::to_string(fd.letter_accuracy));
    if (cfg.run_recognition) {
      for (const auto& preset : cfg.presets) {
        say("fold " + std::to_string(fold) + ": recognition " + preset);
        auto rows = recognition_experiment(fd, preset, preset_params(preset),
                                           cfg.schedule, opts);
        cv.rows.insert(cv.rows.end(), rows.begin(), rows.end());
      }
    }
    if (cfg.run_retrieval) {
      for (auto method : cfg.methods) {
        for (auto dir : cfg.directions) {
          say("fold " + std::to_string(fold) + ": retrieval " +
              std::string(to_string(method)) + " " +
              std::string(to_string(dir)));
          auto rows =
              retrieval_experiment(fd, method, dir, search, cfg.schedule, opts);
          cv.rows.insert(cv.rows.end(), rows.begin(), rows.end());
        }
      }
    }
  }
  cv.summary = summarize(cv.rows);
  return cv;
}

CrossValidation cross_validate(const ExperimentConfig& cfg,
                               const Progress& progress) {
  return cross_validate(cfg, load_corpus(cfg), progress);
}

}  // namespace eham
