// extern "C" surface over the C++ engine. Exceptions never cross this
// boundary; they become status codes plus a thread-local message.

#include "eham/eham.h"

#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "common/bytes.hpp"
#include "experiments/experiments.hpp"
#include "experiments/synth.hpp"
#include "featurizer/featurize.hpp"
#include "memory/hamr.hpp"
#include "memory/snapshot.hpp"
#include "retrieval/retrieval.hpp"

struct eham_memory {
  eham::Hamr4D mem;
};

struct eham_corpus {
  std::uint32_t n_args;
  std::uint32_t n_levels;
  std::vector<eham::LabeledFn> records;
};

struct eham_experiment {
  eham::ExperimentConfig cfg;
  eham::CrossValidation result;
};

namespace {

thread_local std::string g_last_error;

eham_status fail(eham_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <class Fn>
eham_status guarded(Fn&& fn) {
  try {
    fn();
    return EHAM_OK;
  } catch (const eham::ParseError& e) {
    return fail(EHAM_ERR_PARSE, e.what());
  } catch (const eham::IoError& e) {
    return fail(EHAM_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(EHAM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(EHAM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EHAM_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* name) {
  if (!p) throw std::invalid_argument(std::string(name) + " is null");
}

eham::QuantizedFn to_fn(const eham_fn_view& v) {
  if (v.n_args > 0) need(v.values, "values");
  std::vector<std::uint16_t> values(v.values, v.values + v.n_args);
  if (!v.weights) return eham::QuantizedFn(std::move(values), v.n_levels);
  std::vector<std::uint32_t> weights(v.weights, v.weights + v.n_args);
  return eham::QuantizedFn(std::move(values), std::move(weights), v.n_levels);
}

eham::MemParams to_params(const eham_params* p) {
  if (!p) return {};
  eham::MemParams out{p->iota, p->kappa, p->xi};
  out.validate();
  return out;
}

eham::Direction to_dir(eham_direction d) {
  switch (d) {
    case EHAM_A2B: return eham::Direction::AtoB;
    case EHAM_B2A: return eham::Direction::BtoA;
  }
  throw std::invalid_argument("unknown direction");
}

eham::Method to_method(eham_method m) {
  switch (m) {
    case EHAM_RS: return eham::Method::RS;
    case EHAM_ST: return eham::Method::ST;
    case EHAM_SS: return eham::Method::SS;
  }
  throw std::invalid_argument("unknown method");
}

eham::WeightedPlane to_plane(const double* cells, std::uint32_t n_args,
                             std::uint32_t n_levels) {
  need(cells, "cells");
  return eham::WeightedPlane(
      n_args, n_levels,
      std::vector<double>(cells, cells + std::size_t{n_args} * n_levels));
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* eham_last_error(void) { return g_last_error.c_str(); }
const char* eham_version(void) { return "1.0.0"; }
void eham_string_free(char* s) { std::free(s); }

eham_status eham_memory_new(uint32_t n, uint32_t m, uint32_t p, uint32_t q,
                            uint32_t cap, eham_memory** out) {
  return guarded([&] {
    need(out, "out");
    *out = new eham_memory{eham::Hamr4D({n, m, p, q}, cap)};
  });
}

void eham_memory_free(eham_memory* mem) { delete mem; }

eham_status eham_memory_load(const char* path, eham_memory** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new eham_memory{eham::load_snapshot(path)};
  });
}

eham_status eham_memory_save(const eham_memory* mem, const char* path) {
  return guarded([&] {
    need(mem, "mem");
    need(path, "path");
    eham::save_snapshot(mem->mem, path);
  });
}

eham_status eham_memory_dims(const eham_memory* mem, uint32_t dims[4],
                             uint32_t* cap) {
  return guarded([&] {
    need(mem, "mem");
    const auto& d = mem->mem.dims();
    if (dims) {
      dims[0] = d.n;
      dims[1] = d.m;
      dims[2] = d.p;
      dims[3] = d.q;
    }
    if (cap) *cap = mem->mem.cap();
  });
}

eham_status eham_memory_cell(const eham_memory* mem, uint32_t i, uint32_t j,
                             uint32_t k, uint32_t l, uint16_t* out) {
  return guarded([&] {
    need(mem, "mem");
    need(out, "out");
    *out = mem->mem.at(i, j, k, l);
  });
}

eham_status eham_memory_register(eham_memory* mem, eham_fn_view fa,
                                 eham_fn_view fb) {
  return guarded([&] {
    need(mem, "mem");
    mem->mem.register_pair({to_fn(fa), to_fn(fb)});
  });
}

eham_status eham_memory_recognize(const eham_memory* mem, eham_fn_view fa,
                                  eham_fn_view fb, const eham_params* params,
                                  eham_recognition* out) {
  return guarded([&] {
    need(mem, "mem");
    need(out, "out");
    const auto r = mem->mem.recognize({to_fn(fa), to_fn(fb)}, to_params(params));
    out->accepted = r.accepted;
    out->violations = r.violations;
    out->rho = r.rho;
    out->degenerate = r.degenerate;
  });
}

eham_status eham_memory_omega_pair(const eham_memory* mem, uint32_t i,
                                   uint32_t j, double* out) {
  return guarded([&] {
    need(mem, "mem");
    need(out, "out");
    *out = mem->mem.omega_pair(i, j);
  });
}

eham_status eham_memory_omega_mean(const eham_memory* mem, double* out) {
  return guarded([&] {
    need(mem, "mem");
    need(out, "out");
    *out = mem->mem.omega_mean();
  });
}

eham_status eham_memory_thresholded(const eham_memory* mem, double iota,
                                    uint32_t i, uint32_t j, uint32_t k,
                                    uint32_t l, uint16_t* out) {
  return guarded([&] {
    need(mem, "mem");
    need(out, "out");
    if (!(iota >= 0.0)) throw std::invalid_argument("iota must be >= 0");
    *out = mem->mem.thresholded(iota, i, j, k, l);
  });
}

eham_status eham_memory_entropy_pair(const eham_memory* mem, uint32_t i,
                                     uint32_t j, double* out) {
  return guarded([&] {
    need(mem, "mem");
    need(out, "out");
    *out = mem->mem.entropy_pair(i, j);
  });
}

eham_status eham_memory_entropy(const eham_memory* mem, double* out) {
  return guarded([&] {
    need(mem, "mem");
    need(out, "out");
    *out = mem->mem.entropy();
  });
}

void eham_search_config_default(eham_search_config* cfg) {
  if (!cfg) return;
  const eham::SearchConfig d;
  cfg->n_samples = d.n_samples;
  cfg->descent_budget = d.descent_budget;
  cfg->seed = d.rng_seed;
  cfg->gate = {d.gate.iota, d.gate.kappa, d.gate.xi};
  cfg->uniform_fallback = d.uniform_fallback;
}

eham_status eham_reduce(const eham_memory* mem, eham_fn_view cue,
                        eham_direction dir, double* cells, size_t len) {
  return guarded([&] {
    need(mem, "mem");
    need(cells, "cells");
    const auto plane = eham::reduce(mem->mem, to_fn(cue), to_dir(dir));
    if (len != plane.cells().size()) {
      throw std::invalid_argument("output buffer must hold " +
                                  std::to_string(plane.cells().size()) +
                                  " cells");
    }
    std::copy(plane.cells().begin(), plane.cells().end(), cells);
  });
}

eham_status eham_plane_distance(const double* cells, uint32_t n_args,
                                uint32_t n_levels, eham_fn_view f,
                                const eham_params* params, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = eham::distance(to_plane(cells, n_args, n_levels), to_fn(f),
                          to_params(params));
  });
}

eham_status eham_sample_plane(const double* cells, uint32_t n_args,
                              uint32_t n_levels, uint64_t seed,
                              int uniform_fallback, uint16_t* out) {
  try {
    need(out, "out");
    eham::Rng rng(seed);
    const auto f = eham::sample_plane(to_plane(cells, n_args, n_levels), rng,
                                      uniform_fallback != 0);
    std::copy(f.values().begin(), f.values().end(), out);
    return EHAM_OK;
  } catch (const eham::EmptyColumnError& e) {
    return fail(EHAM_ERR_RETRIEVAL_FAILED, e.what());
  } catch (...) {
    return guarded([] { throw; });
  }
}

eham_status eham_retrieve(const eham_memory* mem, eham_method method,
                          eham_direction dir, eham_fn_view cue,
                          const eham_search_config* cfg, uint16_t* out_values,
                          size_t out_len, eham_outcome_info* info) {
  eham::RetrievalOutcome outcome;
  const auto st = guarded([&] {
    need(mem, "mem");
    need(out_values, "out_values");
    eham::SearchConfig sc;
    if (cfg) {
      sc.n_samples = cfg->n_samples;
      sc.descent_budget = cfg->descent_budget;
      sc.rng_seed = cfg->seed;
      sc.gate = to_params(&cfg->gate);
      sc.uniform_fallback = cfg->uniform_fallback != 0;
    }
    const auto d = to_dir(dir);
    const auto& dims = mem->mem.dims();
    const std::size_t target_args = d == eham::Direction::AtoB ? dims.m : dims.n;
    if (out_len != target_args) {
      throw std::invalid_argument("output buffer must hold " +
                                  std::to_string(target_args) + " values");
    }
    outcome = eham::retrieve(to_method(method), mem->mem, to_fn(cue), d, sc);
  });
  if (st != EHAM_OK) return st;
  if (info) {
    info->distance = outcome.distance;
    info->evaluations = outcome.evaluations;
    info->failed = outcome.failure.has_value();
  }
  if (outcome.failure) {
    return fail(EHAM_ERR_RETRIEVAL_FAILED, outcome.failure->message.c_str());
  }
  std::copy(outcome.object->values().begin(), outcome.object->values().end(),
            out_values);
  return EHAM_OK;
}

eham_status eham_corpus_new(uint32_t n_args, uint32_t n_levels,
                            eham_corpus** out) {
  return guarded([&] {
    need(out, "out");
    if (n_args == 0 || n_levels == 0 || n_levels > 256) {
      throw std::invalid_argument("corpus needs n_args >= 1, levels in [1, 256]");
    }
    *out = new eham_corpus{n_args, n_levels, {}};
  });
}

void eham_corpus_free(eham_corpus* corpus) { delete corpus; }

eham_status eham_corpus_load(const char* path, eham_corpus** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    const auto bytes = eham::read_file(path);
    auto records = eham::decode_fn_corpus(bytes);
    // header fields survive even for an empty corpus
    eham::ByteReader r(bytes);
    r.expect_tag("EHFN");
    r.u32();
    const auto n_args = r.u32();
    const auto n_levels = r.u32();
    *out = new eham_corpus{n_args, n_levels, std::move(records)};
  });
}

eham_status eham_corpus_save(const eham_corpus* corpus, const char* path) {
  return guarded([&] {
    need(corpus, "corpus");
    need(path, "path");
    if (corpus->records.empty()) {
      eham::ByteWriter w;
      w.tag("EHFN");
      w.u32(0);
      w.u32(corpus->n_args);
      w.u32(corpus->n_levels);
      eham::write_file(path, w.take());
      return;
    }
    eham::save_fn_corpus(corpus->records, path);
  });
}

eham_status eham_corpus_from_idx(const char* images_path,
                                 const char* labels_path, int transpose,
                                 eham_corpus** out) {
  return guarded([&] {
    need(images_path, "images_path");
    need(labels_path, "labels_path");
    need(out, "out");
    const auto set = eham::load_idx(images_path, labels_path, transpose != 0);
    *out = new eham_corpus{eham::kFeatureArgs, eham::kFeatureLevels,
                           eham::featurize_set(set)};
  });
}

size_t eham_corpus_size(const eham_corpus* corpus) {
  return corpus ? corpus->records.size() : 0;
}

uint32_t eham_corpus_n_args(const eham_corpus* corpus) {
  return corpus ? corpus->n_args : 0;
}

uint32_t eham_corpus_n_levels(const eham_corpus* corpus) {
  return corpus ? corpus->n_levels : 0;
}

eham_status eham_corpus_get(const eham_corpus* corpus, size_t index,
                            uint16_t* label, uint16_t* values, size_t len) {
  return guarded([&] {
    need(corpus, "corpus");
    if (index >= corpus->records.size()) {
      throw std::invalid_argument("record index out of range");
    }
    const auto& rec = corpus->records[index];
    if (label) *label = rec.label;
    if (values) {
      if (len != rec.fn.n_args()) {
        throw std::invalid_argument("values buffer has the wrong length");
      }
      std::copy(rec.fn.values().begin(), rec.fn.values().end(), values);
    }
  });
}

eham_status eham_corpus_append(eham_corpus* corpus, uint16_t label,
                               const uint16_t* values, size_t len) {
  return guarded([&] {
    need(corpus, "corpus");
    need(values, "values");
    if (len != corpus->n_args) {
      throw std::invalid_argument("record length does not match corpus");
    }
    corpus->records.push_back(
        {label, eham::QuantizedFn(std::vector<std::uint16_t>(values, values + len),
                                  corpus->n_levels)});
  });
}

eham_status eham_featurize(const uint8_t* pixels, uint32_t width,
                           uint32_t height, uint16_t out[64]) {
  return guarded([&] {
    need(pixels, "pixels");
    need(out, "out");
    eham::GrayImage img{width, height,
                        {pixels, pixels + std::size_t{width} * height}};
    const auto f = eham::featurize(img);
    std::copy(f.values().begin(), f.values().end(), out);
  });
}

eham_status eham_write_pgm(const uint16_t* values, size_t len, uint32_t scale,
                           const char* path) {
  return guarded([&] {
    need(values, "values");
    need(path, "path");
    const eham::QuantizedFn f(std::vector<std::uint16_t>(values, values + len),
                              eham::kFeatureLevels);
    eham::write_file(path, eham::render_pgm(f, scale));
  });
}

eham_status eham_experiment_load(const char* config_path,
                                 eham_experiment** out) {
  return guarded([&] {
    need(config_path, "config_path");
    need(out, "out");
    *out = new eham_experiment{eham::load_config(config_path), {}};
  });
}

eham_status eham_experiment_parse(const char* config_text,
                                  const char* base_dir,
                                  eham_experiment** out) {
  return guarded([&] {
    need(config_text, "config_text");
    need(out, "out");
    *out = new eham_experiment{
        eham::parse_config(config_text, base_dir ? base_dir : ""), {}};
  });
}

void eham_experiment_free(eham_experiment* exp) { delete exp; }

eham_status eham_experiment_set_jobs(eham_experiment* exp, unsigned jobs) {
  return guarded([&] {
    need(exp, "exp");
    exp->cfg.jobs = jobs == 0 ? 1 : jobs;
  });
}

eham_status eham_experiment_run(eham_experiment* exp, eham_progress_fn progress,
                                void* user, char** csv_out) {
  return guarded([&] {
    need(exp, "exp");
    need(csv_out, "csv_out");
    eham::Progress cb;
    if (progress) {
      cb = [progress, user](const std::string& msg) {
        progress(msg.c_str(), user);
      };
    }
    exp->result = eham::cross_validate(exp->cfg, cb);
    std::vector<eham::MetricsRow> all = exp->result.rows;
    all.insert(all.end(), exp->result.summary.begin(),
               exp->result.summary.end());
    *csv_out = dup_string(eham::format_csv(all));
  });
}

eham_status eham_experiment_classifier_accuracy(const eham_experiment* exp,
                                                uint32_t fold, double* digits,
                                                double* letters) {
  return guarded([&] {
    need(exp, "exp");
    if (fold >= exp->result.digit_accuracy.size()) {
      throw std::invalid_argument("fold has not been run");
    }
    if (digits) *digits = exp->result.digit_accuracy[fold];
    if (letters) *letters = exp->result.letter_accuracy[fold];
  });
}

eham_status eham_synth_write(int kind, size_t per_class, uint64_t seed,
                             double distortion, const char* dir,
                             const char* prefix) {
  return guarded([&] {
    need(dir, "dir");
    need(prefix, "prefix");
    if (kind != 0 && kind != 1) throw std::invalid_argument("kind is 0 or 1");
    eham::SynthOptions opts{per_class, seed, distortion};
    eham::write_synth_idx(
        kind == 0 ? eham::GlyphKind::Digits : eham::GlyphKind::Letters, opts,
        dir, prefix);
  });
}

}  // extern "C"
