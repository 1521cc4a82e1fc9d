// eham: command-line front end over the libeham C API.
//
// Exit codes: 0 success, 1 domain failure, 2 usage error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eham/eham.h"

namespace {

struct MemoryDeleter {
  void operator()(eham_memory* m) const { eham_memory_free(m); }
};
struct CorpusDeleter {
  void operator()(eham_corpus* c) const { eham_corpus_free(c); }
};
struct ExperimentDeleter {
  void operator()(eham_experiment* e) const { eham_experiment_free(e); }
};
using Memory = std::unique_ptr<eham_memory, MemoryDeleter>;
using Corpus = std::unique_ptr<eham_corpus, CorpusDeleter>;
using Experiment = std::unique_ptr<eham_experiment, ExperimentDeleter>;

// Carries a C API failure up to main.
struct Failure {
  eham_status status;
  std::string message;
};

void check(eham_status st, const std::string& context) {
  if (st != EHAM_OK) throw Failure{st, context + ": " + eham_last_error()};
}

Memory open_memory(const std::string& path) {
  eham_memory* m = nullptr;
  check(eham_memory_load(path.c_str(), &m), path);
  return Memory(m);
}

Corpus open_corpus(const std::string& path) {
  eham_corpus* c = nullptr;
  check(eham_corpus_load(path.c_str(), &c), path);
  return Corpus(c);
}

std::vector<std::uint16_t> record(const eham_corpus* c, std::size_t idx,
                                  std::uint16_t* label = nullptr) {
  std::vector<std::uint16_t> v(eham_corpus_n_args(c));
  check(eham_corpus_get(c, idx, label, v.data(), v.size()),
        "record " + std::to_string(idx));
  return v;
}

eham_fn_view view(const std::vector<std::uint16_t>& v, std::uint32_t levels) {
  return {v.data(), nullptr, v.size(), levels};
}

// Relative corpus paths that do not exist fall back to $EHAM_DATA_DIR.
std::string data_path(const std::string& p) {
  namespace fs = std::filesystem;
  if (fs::exists(p) || fs::path(p).is_absolute()) return p;
  if (const char* dir = std::getenv("EHAM_DATA_DIR"); dir && *dir) {
    auto alt = fs::path(dir) / p;
    if (fs::exists(alt)) return alt.string();
  }
  return p;
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Failure{EHAM_ERR_IO, "cannot create " + path};
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

eham_params preset(const std::string& name) {
  if (name == "default") return {0.0, 0.0, 0};
  if (name == "operational") return {0.05, 0.0, 32};
  if (name == "caption") return {0.05, 32.0, 0};
  throw CLI::ValidationError("--preset", "unknown preset " + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic hetero-associative memory toolkit"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", eham_version());

  // featurize
  auto* featurize = app.add_subcommand(
      "featurize", "Featurize an IDX image/label pair into an EHFN corpus");
  std::string images, labels, out;
  bool transpose = false, no_transpose = false;
  featurize->add_option("--images", images, "IDX image file (gzip ok)")->required();
  featurize->add_option("--labels", labels, "IDX label file (gzip ok)")->required();
  featurize->add_flag("--transpose", transpose,
                      "Transpose images (default for files named *emnist*)");
  featurize->add_flag("--no-transpose", no_transpose, "Never transpose");
  featurize->add_option("--out", out, "Output .ehfn file")->required();

  // fill
  auto* fill = app.add_subcommand(
      "fill", "Register aligned records of two EHFN corpora as pairs");
  std::string corpus_a, corpus_b, memory_path;
  std::uint32_t cap = 65535;
  std::size_t limit = 0;
  fill->add_option("--a", corpus_a, "A-field corpus (.ehfn)")->required();
  fill->add_option("--b", corpus_b, "B-field corpus (.ehfn), same length")->required();
  fill->add_option("--memory", memory_path,
                   "Existing snapshot to extend (default: empty memory)");
  fill->add_option("--cap", cap, "Cell saturation cap for a new memory")
      ->check(CLI::Range(1u, 65535u));
  fill->add_option("--limit", limit, "Register only the first N pairs (0 = all)");
  fill->add_option("--out", out, "Output .eham snapshot")->required();

  // recognize
  auto* recog = app.add_subcommand(
      "recognize", "Test aligned record pairs against a memory");
  double iota = 0.0, kappa = 0.0;
  std::uint64_t xi = 0;
  std::string preset_name;
  recog->add_option("--memory", memory_path, "Memory snapshot")->required();
  recog->add_option("--a", corpus_a, "A-field corpus (.ehfn)")->required();
  recog->add_option("--b", corpus_b, "B-field corpus (.ehfn)")->required();
  recog->add_option("--iota", iota, "Threshold factor")->check(CLI::NonNegativeNumber);
  recog->add_option("--kappa", kappa, "Mass factor")->check(CLI::NonNegativeNumber);
  recog->add_option("--xi", xi, "Allowed unsupported cells");
  recog->add_option("--preset", preset_name,
                    "default | operational | caption (overrides the above)");
  recog->add_option("--out", out, "Write results here instead of stdout");

  // retrieve
  auto* retr = app.add_subcommand(
      "retrieve", "Retrieve the partner of every cue in an EHFN corpus");
  std::string cue_path, method = "ss", dir = "a2b";
  std::uint64_t seed = 0;
  std::uint32_t samples = 128, budget = 800;
  double gate_iota = 0.0, gate_kappa = 0.0;
  std::uint64_t gate_xi = 0;
  bool uniform_fallback = false;
  retr->add_option("--memory", memory_path, "Memory snapshot")->required();
  retr->add_option("--cue", cue_path, "Cue corpus (.ehfn)")->required();
  retr->add_option("--method", method, "rs | st | ss")
      ->check(CLI::IsMember({"rs", "st", "ss", "RS", "ST", "SS"}));
  retr->add_option("--dir", dir, "a2b | b2a")->check(CLI::IsMember({"a2b", "b2a"}));
  retr->add_option("--seed", seed, "Base RNG seed");
  retr->add_option("--samples", samples, "Candidates drawn per cue")
      ->check(CLI::PositiveNumber);
  retr->add_option("--budget", budget, "Descent evaluations per candidate (ss)");
  retr->add_option("--iota", gate_iota, "Distance gate iota")
      ->check(CLI::NonNegativeNumber);
  retr->add_option("--kappa", gate_kappa, "Distance gate kappa")
      ->check(CLI::NonNegativeNumber);
  retr->add_option("--xi", gate_xi, "Distance gate xi");
  retr->add_flag("--uniform-fallback", uniform_fallback,
                 "Sample uniformly from empty plane columns");
  retr->add_option("--out", out, "Output .ehfn with retrieved functions")->required();

  // entropy
  auto* entropy = app.add_subcommand("entropy", "Print the memory entropy in bits");
  entropy->add_option("--memory", memory_path, "Memory snapshot")->required();

  // experiment
  auto* experiment = app.add_subcommand(
      "experiment", "Run recognition/retrieval cross validation from a config");
  std::string config_path;
  unsigned jobs = 0;
  bool quiet = false;
  experiment->add_option("--config", config_path, "key = value config file")
      ->required();
  experiment->add_option("--out", out, "Results CSV (default stdout)");
  experiment->add_option("--jobs", jobs, "Worker threads (overrides config)");
  experiment->add_flag("--quiet", quiet, "No progress on stderr");

  // dump
  auto* dump = app.add_subcommand("dump", "Render one EHFN record as a PGM image");
  std::string fn_path;
  std::size_t index = 0;
  std::uint32_t scale = 4;
  dump->add_option("--fn", fn_path, "Corpus (.ehfn)")->required();
  dump->add_option("--index", index, "Record index");
  dump->add_option("--scale", scale, "Pixels per block")->check(CLI::PositiveNumber);
  dump->add_option("--out", out, "Output .pgm")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*featurize) {
      bool tr = std::filesystem::path(images).filename().string().find("emnist") !=
                std::string::npos;
      if (transpose) tr = true;
      if (no_transpose) tr = false;
      eham_corpus* c = nullptr;
      check(eham_corpus_from_idx(data_path(images).c_str(),
                                 data_path(labels).c_str(), tr, &c),
            "featurize");
      Corpus corpus(c);
      check(eham_corpus_save(corpus.get(), out.c_str()), out);
      std::cerr << eham_corpus_size(corpus.get()) << " records written to "
                << out << "\n";
    } else if (*fill) {
      auto a = open_corpus(corpus_a);
      auto b = open_corpus(corpus_b);
      const auto n = eham_corpus_size(a.get());
      if (n != eham_corpus_size(b.get())) {
        throw Failure{EHAM_ERR_INVALID_ARGUMENT,
                      "corpora differ in length; records pair by index"};
      }
      Memory mem;
      if (!memory_path.empty()) {
        mem = open_memory(memory_path);
      } else {
        eham_memory* m = nullptr;
        check(eham_memory_new(eham_corpus_n_args(a.get()),
                              eham_corpus_n_args(b.get()),
                              eham_corpus_n_levels(a.get()),
                              eham_corpus_n_levels(b.get()), cap, &m),
              "new memory");
        mem.reset(m);
      }
      const auto count = limit == 0 ? n : std::min(limit, n);
      for (std::size_t k = 0; k < count; ++k) {
        const auto fa = record(a.get(), k);
        const auto fb = record(b.get(), k);
        check(eham_memory_register(mem.get(),
                                   view(fa, eham_corpus_n_levels(a.get())),
                                   view(fb, eham_corpus_n_levels(b.get()))),
              "register " + std::to_string(k));
      }
      check(eham_memory_save(mem.get(), out.c_str()), out);
      std::cerr << count << " pairs registered\n";
    } else if (*recog) {
      auto mem = open_memory(memory_path);
      auto a = open_corpus(corpus_a);
      auto b = open_corpus(corpus_b);
      const auto n = std::min(eham_corpus_size(a.get()), eham_corpus_size(b.get()));
      eham_params params{iota, kappa, xi};
      if (!preset_name.empty()) params = preset(preset_name);
      Output o(out);
      std::size_t accepted = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const auto fa = record(a.get(), k);
        const auto fb = record(b.get(), k);
        eham_recognition r{};
        check(eham_memory_recognize(mem.get(),
                                    view(fa, eham_corpus_n_levels(a.get())),
                                    view(fb, eham_corpus_n_levels(b.get())),
                                    &params, &r),
              "recognize " + std::to_string(k));
        accepted += r.accepted != 0;
        char line[128];
        std::snprintf(line, sizeof line, "%zu %d %llu %.9g\n", k, r.accepted,
                      static_cast<unsigned long long>(r.violations), r.rho);
        o.stream() << line;
      }
      std::cerr << accepted << " of " << n << " pairs accepted\n";
    } else if (*retr) {
      auto mem = open_memory(memory_path);
      auto cues = open_corpus(cue_path);
      std::uint32_t dims[4];
      check(eham_memory_dims(mem.get(), dims, nullptr), "dims");
      const bool a2b = dir == "a2b";
      const std::uint32_t target_args = a2b ? dims[1] : dims[0];
      const std::uint32_t target_levels = a2b ? dims[3] : dims[2];
      std::string lower = method;
      for (auto& ch : lower) ch = static_cast<char>(std::tolower(ch));
      const eham_method m = lower == "rs" ? EHAM_RS : lower == "st" ? EHAM_ST : EHAM_SS;

      eham_corpus* oc = nullptr;
      check(eham_corpus_new(target_args, target_levels, &oc), "output corpus");
      Corpus result(oc);
      std::size_t failures = 0;
      for (std::size_t k = 0; k < eham_corpus_size(cues.get()); ++k) {
        std::uint16_t label = 0;
        const auto cue = record(cues.get(), k, &label);
        eham_search_config cfg;
        eham_search_config_default(&cfg);
        cfg.n_samples = samples;
        cfg.descent_budget = budget;
        cfg.seed = seed + k;
        cfg.gate = {gate_iota, gate_kappa, gate_xi};
        cfg.uniform_fallback = uniform_fallback;
        std::vector<std::uint16_t> got(target_args);
        eham_outcome_info info{};
        const auto st = eham_retrieve(mem.get(), m, a2b ? EHAM_A2B : EHAM_B2A,
                                      view(cue, eham_corpus_n_levels(cues.get())),
                                      &cfg, got.data(), got.size(), &info);
        if (st == EHAM_ERR_RETRIEVAL_FAILED) {
          ++failures;
          std::cerr << "cue " << k << ": " << eham_last_error() << "\n";
          continue;
        }
        check(st, "retrieve " + std::to_string(k));
        check(eham_corpus_append(result.get(), label, got.data(), got.size()),
              "append");
        std::cerr << "cue " << k << ": distance " << info.distance << " after "
                  << info.evaluations << " evaluations\n";
      }
      check(eham_corpus_save(result.get(), out.c_str()), out);
      if (failures > 0) {
        std::cerr << failures << " retrieval(s) failed\n";
        return 1;
      }
    } else if (*entropy) {
      auto mem = open_memory(memory_path);
      double e = 0.0;
      check(eham_memory_entropy(mem.get(), &e), "entropy");
      std::printf("%.9f\n", e);
    } else if (*experiment) {
      eham_experiment* e = nullptr;
      check(eham_experiment_load(config_path.c_str(), &e), config_path);
      Experiment exp(e);
      if (jobs > 0) check(eham_experiment_set_jobs(exp.get(), jobs), "jobs");
      auto progress = [](const char* msg, void*) {
        std::fprintf(stderr, "%s\n", msg);
      };
      char* csv = nullptr;
      check(eham_experiment_run(exp.get(), quiet ? nullptr : +progress, nullptr,
                                &csv),
            "experiment");
      std::unique_ptr<char, decltype(&eham_string_free)> owned(csv,
                                                               eham_string_free);
      Output o(out);
      o.stream() << csv;
    } else if (*dump) {
      auto corpus = open_corpus(fn_path);
      const auto values = record(corpus.get(), index);
      check(eham_write_pgm(values.data(), values.size(), scale, out.c_str()), out);
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return 1;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
