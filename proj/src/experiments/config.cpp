#include "experiments/config.hpp"

#include "common/bytes.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eham {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = s.find(sep, start);
    auto item = trim(s.substr(start, end == std::string_view::npos
                                         ? std::string_view::npos
                                         : end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

template <class T>
T parse_int(const std::string& key, const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw std::invalid_argument("config: '" + key + "' expects an integer, got '" +
                                v + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw std::invalid_argument("config: '" + key + "' expects a number, got '" +
                                v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: '" + key + "' expects a boolean");
}

std::vector<std::filesystem::path> parse_paths(
    const std::string& v, const std::filesystem::path& base) {
  std::vector<std::filesystem::path> out;
  for (const auto& item : split(v, ',')) {
    std::filesystem::path p(item);
    out.push_back(p.is_relative() && !base.empty() ? base / p : p);
  }
  return out;
}

}  // namespace

MemParams preset_params(std::string_view name) {
  if (name == "default") return {0.0, 0.0, 0};
  if (name == "operational") return {0.05, 0.0, 32};
  if (name == "caption") return {0.05, 32.0, 0};
  throw std::invalid_argument("unknown recognition preset '" +
                              std::string(name) + "'");
}

void validate_schedule(const std::vector<std::uint32_t>& schedule) {
  if (schedule.empty()) throw std::invalid_argument("empty fill schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] == 0 || schedule[i] > 100) {
      throw std::invalid_argument("fill percent " +
                                  std::to_string(schedule[i]) +
                                  " outside (0, 100]");
    }
    if (i > 0 && schedule[i] <= schedule[i - 1]) {
      throw std::invalid_argument("fill schedule must be increasing");
    }
  }
}

void ExperimentConfig::validate() const {
  validate_schedule(schedule);
  if (folds == 0 || folds > 10) {
    throw std::invalid_argument("folds must be in [1, 10]");
  }
  if (dims.n != 64 || dims.m != 64 || dims.p != 16 || dims.q != 16) {
    throw std::invalid_argument(
        "experiment dims must match the featurizer (64x64x16x16)");
  }
  if (cap == 0 || cap > kMaxCap) throw std::invalid_argument("bad cap");
  if (samples == 0) throw std::invalid_argument("samples must be >= 1");
  for (const auto& p : presets) preset_params(p);
  gate.validate();
}

ExperimentConfig parse_config(std::string_view text,
                              const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto v = trim(std::string_view(line).substr(eq + 1));

    if (key == "seed") {
      cfg.seed = parse_int<std::uint64_t>(key, v);
    } else if (key == "folds") {
      cfg.folds = parse_int<std::uint32_t>(key, v);
    } else if (key == "dims") {
      auto parts = split(v, 'x');
      if (parts.size() != 4) parts = split(v, ',');
      if (parts.size() != 4) {
        throw std::invalid_argument("config: dims expects n x m x p x q");
      }
      cfg.dims = {parse_int<std::uint32_t>(key, parts[0]),
                  parse_int<std::uint32_t>(key, parts[1]),
                  parse_int<std::uint32_t>(key, parts[2]),
                  parse_int<std::uint32_t>(key, parts[3])};
    } else if (key == "cap") {
      cfg.cap = parse_int<std::uint32_t>(key, v);
    } else if (key == "presets") {
      cfg.presets = split(v, ',');
    } else if (key == "schedule") {
      cfg.schedule.clear();
      for (const auto& s : split(v, ',')) {
        cfg.schedule.push_back(parse_int<std::uint32_t>(key, s));
      }
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& s : split(v, ',')) cfg.methods.push_back(parse_method(s));
    } else if (key == "directions") {
      cfg.directions.clear();
      for (const auto& s : split(v, ',')) {
        cfg.directions.push_back(parse_direction(s));
      }
    } else if (key == "samples") {
      cfg.samples = parse_int<std::uint32_t>(key, v);
    } else if (key == "budget") {
      cfg.budget = parse_int<std::uint32_t>(key, v);
    } else if (key == "gate_iota") {
      cfg.gate.iota = parse_real(key, v);
    } else if (key == "gate_kappa") {
      cfg.gate.kappa = parse_real(key, v);
    } else if (key == "gate_xi") {
      cfg.gate.xi = parse_int<std::uint64_t>(key, v);
    } else if (key == "pairs_per_class") {
      cfg.pairs_per_class = parse_int<std::size_t>(key, v);
    } else if (key == "experiments") {
      cfg.run_recognition = cfg.run_retrieval = false;
      for (const auto& s : split(v, ',')) {
        if (s == "recognition") {
          cfg.run_recognition = true;
        } else if (s == "retrieval") {
          cfg.run_retrieval = true;
        } else {
          throw std::invalid_argument("config: unknown experiment '" + s + "'");
        }
      }
    } else if (key == "jobs") {
      cfg.jobs = parse_int<unsigned>(key, v);
    } else if (key == "wall_time") {
      if (v == "measure") {
        cfg.measure_time = true;
      } else if (v == "omit") {
        cfg.measure_time = false;
      } else {
        throw std::invalid_argument("config: wall_time is measure or omit");
      }
    } else if (key == "corpus") {
      if (v == "idx") {
        cfg.corpus = CorpusSource::Idx;
      } else if (v == "synthetic") {
        cfg.corpus = CorpusSource::Synthetic;
      } else {
        throw std::invalid_argument("config: corpus is idx or synthetic");
      }
    } else if (key == "digits_images") {
      cfg.digits_images = parse_paths(v, base_dir);
    } else if (key == "digits_labels") {
      cfg.digits_labels = parse_paths(v, base_dir);
    } else if (key == "letters_images") {
      cfg.letters_images = parse_paths(v, base_dir);
    } else if (key == "letters_labels") {
      cfg.letters_labels = parse_paths(v, base_dir);
    } else if (key == "digits_transpose") {
      cfg.digits_transpose = parse_bool(key, v);
    } else if (key == "letters_transpose") {
      cfg.letters_transpose = parse_bool(key, v);
    } else if (key == "synth_per_class") {
      cfg.synth_per_class = parse_int<std::size_t>(key, v);
    } else if (key == "synth_distortion") {
      cfg.synth_distortion = parse_real(key, v);
    } else if (key == "synth_seed") {
      cfg.synth_seed = parse_int<std::uint64_t>(key, v);
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

namespace {

std::filesystem::path find_stock(const std::filesystem::path& dir,
                                 const std::string& name) {
  for (const auto& candidate : {dir / name, dir / (name + ".gz")}) {
    if (std::filesystem::exists(candidate)) return candidate;
  }
  throw IoError("corpus file " + name + " not found in " +
                           dir.string());
}

}  // namespace

void resolve_corpus_paths(ExperimentConfig& cfg) {
  if (cfg.corpus != CorpusSource::Idx) return;
  const bool complete = !cfg.digits_images.empty() &&
                        !cfg.digits_labels.empty() &&
                        !cfg.letters_images.empty() &&
                        !cfg.letters_labels.empty();
  if (complete) return;
  const char* env = std::getenv("EHAM_DATA_DIR");
  if (!env || !*env) {
    throw std::invalid_argument(
        "corpus paths missing from config and EHAM_DATA_DIR is not set");
  }
  const std::filesystem::path dir(env);
  if (cfg.digits_images.empty()) {
    cfg.digits_images = {find_stock(dir, "train-images-idx3-ubyte"),
                         find_stock(dir, "t10k-images-idx3-ubyte")};
  }
  if (cfg.digits_labels.empty()) {
    cfg.digits_labels = {find_stock(dir, "train-labels-idx1-ubyte"),
                         find_stock(dir, "t10k-labels-idx1-ubyte")};
  }
  if (cfg.letters_images.empty()) {
    cfg.letters_images = {
        find_stock(dir, "emnist-balanced-train-images-idx3-ubyte"),
        find_stock(dir, "emnist-balanced-test-images-idx3-ubyte")};
  }
  if (cfg.letters_labels.empty()) {
    cfg.letters_labels = {
        find_stock(dir, "emnist-balanced-train-labels-idx1-ubyte"),
        find_stock(dir, "emnist-balanced-test-labels-idx1-ubyte")};
  }
}

}  // namespace eham
