// Exercises the shared library through its C header only.
#include <eham/eham.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace {

int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      std::fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, \
                   #cond);                                             \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

eham_fn_view view(const std::vector<uint16_t>& v, uint32_t levels) {
  return {v.data(), nullptr, v.size(), levels};
}

void memory_basics() {
  eham_memory* mem = nullptr;
  EXPECT(eham_memory_new(0, 2, 2, 2, 10, &mem) == EHAM_ERR_INVALID_ARGUMENT);
  EXPECT(mem == nullptr);
  EXPECT(std::strlen(eham_last_error()) > 0);

  EXPECT(eham_memory_new(2, 2, 2, 2, 255, &mem) == EHAM_OK);
  uint32_t dims[4];
  uint32_t cap = 0;
  EXPECT(eham_memory_dims(mem, dims, &cap) == EHAM_OK);
  EXPECT(dims[0] == 2 && dims[3] == 2 && cap == 255);

  const std::vector<uint16_t> fa{0, 1}, fb{1, 0};
  EXPECT(eham_memory_register(mem, view(fa, 2), view(fb, 2)) == EHAM_OK);
  uint16_t cell = 0;
  EXPECT(eham_memory_cell(mem, 1, 0, 1, 1, &cell) == EHAM_OK && cell == 1);
  EXPECT(eham_memory_cell(mem, 1, 0, 0, 1, &cell) == EHAM_OK && cell == 0);
  EXPECT(eham_memory_cell(mem, 2, 0, 0, 0, &cell) == EHAM_ERR_INVALID_ARGUMENT);

  const std::vector<uint16_t> bad{0, 1, 1};
  EXPECT(eham_memory_register(mem, view(bad, 2), view(fb, 2)) ==
         EHAM_ERR_INVALID_ARGUMENT);

  eham_params params{0.0, 0.0, 0};
  eham_recognition rec{};
  EXPECT(eham_memory_recognize(mem, view(fa, 2), view(fb, 2), &params, &rec) ==
         EHAM_OK);
  EXPECT(rec.accepted && rec.violations == 0 && !rec.degenerate);

  const uint32_t five[] = {5, 5};
  eham_fn_view heavy{fa.data(), five, 2, 2};
  eham_recognition rec5{};
  EXPECT(eham_memory_recognize(mem, heavy, view(fb, 2), &params, &rec5) == EHAM_OK);
  EXPECT(rec5.accepted == rec.accepted && rec5.rho == rec.rho);

  double omega = -1, ent = -1;
  EXPECT(eham_memory_omega_mean(mem, &omega) == EHAM_OK && omega == 1.0);
  EXPECT(eham_memory_omega_pair(mem, 0, 0, &omega) == EHAM_OK && omega == 1.0);
  EXPECT(eham_memory_entropy(mem, &ent) == EHAM_OK && ent == 0.0);
  EXPECT(eham_memory_entropy_pair(mem, 0, 0, &ent) == EHAM_OK && ent == 0.0);
  EXPECT(eham_memory_thresholded(mem, 2.0, 0, 0, 0, 1, &cell) == EHAM_OK &&
         cell == 0);

  // snapshot round trip
  const auto path = (std::filesystem::temp_directory_path() / "eham_capi.eham").string();
  EXPECT(eham_memory_save(mem, path.c_str()) == EHAM_OK);
  eham_memory* back = nullptr;
  EXPECT(eham_memory_load(path.c_str(), &back) == EHAM_OK);
  EXPECT(eham_memory_cell(back, 0, 1, 0, 0, &cell) == EHAM_OK && cell == 1);
  eham_memory_free(back);
  std::filesystem::remove(path);
  EXPECT(eham_memory_load(path.c_str(), &back) == EHAM_ERR_IO);

  const auto junk = (std::filesystem::temp_directory_path() / "eham_capi.junk").string();
  if (FILE* f = std::fopen(junk.c_str(), "wb")) {
    std::fputs("EHAX", f);
    std::fclose(f);
  }
  EXPECT(eham_memory_load(junk.c_str(), &back) == EHAM_ERR_PARSE);
  std::filesystem::remove(junk);

  eham_memory_free(mem);
  eham_memory_free(nullptr);
}

void retrieval() {
  eham_memory* mem = nullptr;
  EXPECT(eham_memory_new(3, 4, 5, 6, 65535, &mem) == EHAM_OK);
  const std::vector<uint16_t> fa{4, 0, 2}, fb{5, 1, 0, 3};
  EXPECT(eham_memory_register(mem, view(fa, 5), view(fb, 6)) == EHAM_OK);

  std::vector<double> plane(4 * 6);
  EXPECT(eham_reduce(mem, view(fa, 5), EHAM_A2B, plane.data(), plane.size()) ==
         EHAM_OK);
  EXPECT(plane[0 * 6 + 5] == 1.0 && plane[3 * 6 + 3] == 1.0);
  EXPECT(eham_reduce(mem, view(fa, 5), EHAM_A2B, plane.data(), 3) ==
         EHAM_ERR_INVALID_ARGUMENT);

  eham_params gate{0.0, 0.0, 0};
  double d = -1;
  EXPECT(eham_plane_distance(plane.data(), 4, 6, view(fb, 6), &gate, &d) == EHAM_OK);
  EXPECT(d == 0.0);

  std::vector<uint16_t> drawn(4);
  EXPECT(eham_sample_plane(plane.data(), 4, 6, 3, 0, drawn.data()) == EHAM_OK);
  EXPECT(drawn == fb);

  eham_search_config cfg;
  eham_search_config_default(&cfg);
  EXPECT(cfg.n_samples == 128 && cfg.descent_budget == 800);
  cfg.n_samples = 8;
  cfg.descent_budget = 20;
  for (eham_method m : {EHAM_RS, EHAM_ST, EHAM_SS}) {
    std::vector<uint16_t> out(4);
    eham_outcome_info info{};
    EXPECT(eham_retrieve(mem, m, EHAM_A2B, view(fa, 5), &cfg, out.data(),
                         out.size(), &info) == EHAM_OK);
    EXPECT(out == fb);
    EXPECT(info.distance == 0.0 && !info.failed);

    std::vector<uint16_t> back(3);
    EXPECT(eham_retrieve(mem, m, EHAM_B2A, view(fb, 6), &cfg, back.data(),
                         back.size(), &info) == EHAM_OK);
    EXPECT(back == fa);
  }

  eham_memory* empty = nullptr;
  EXPECT(eham_memory_new(3, 4, 5, 6, 65535, &empty) == EHAM_OK);
  std::vector<uint16_t> out(4);
  eham_outcome_info info{};
  EXPECT(eham_retrieve(empty, EHAM_ST, EHAM_A2B, view(fa, 5), &cfg, out.data(),
                       out.size(), &info) == EHAM_ERR_RETRIEVAL_FAILED);
  EXPECT(info.failed && std::isinf(info.distance));
  eham_memory_free(empty);
  eham_memory_free(mem);
}

void corpus_and_featurize() {
  std::vector<uint8_t> white(784, 255);
  uint16_t f[64];
  EXPECT(eham_featurize(white.data(), 28, 28, f) == EHAM_OK);
  EXPECT(f[0] == 3 && f[9] == 15);
  EXPECT(eham_featurize(white.data(), 27, 28, f) == EHAM_ERR_INVALID_ARGUMENT);

  eham_corpus* c = nullptr;
  EXPECT(eham_corpus_new(64, 16, &c) == EHAM_OK);
  EXPECT(eham_corpus_append(c, 7, f, 64) == EHAM_OK);
  EXPECT(eham_corpus_append(c, 7, f, 63) == EHAM_ERR_INVALID_ARGUMENT);
  EXPECT(eham_corpus_size(c) == 1);

  const auto tmp = std::filesystem::temp_directory_path() / "eham_capi_corpus";
  std::filesystem::create_directories(tmp);
  const auto path = (tmp / "c.ehfn").string();
  EXPECT(eham_corpus_save(c, path.c_str()) == EHAM_OK);
  eham_corpus* back = nullptr;
  EXPECT(eham_corpus_load(path.c_str(), &back) == EHAM_OK);
  uint16_t label = 0;
  uint16_t values[64];
  EXPECT(eham_corpus_get(back, 0, &label, values, 64) == EHAM_OK);
  EXPECT(label == 7 && std::memcmp(values, f, sizeof f) == 0);
  EXPECT(eham_corpus_get(back, 1, &label, values, 64) == EHAM_ERR_INVALID_ARGUMENT);
  EXPECT(eham_corpus_n_args(back) == 64 && eham_corpus_n_levels(back) == 16);

  EXPECT(eham_write_pgm(f, 64, 4, (tmp / "f.pgm").string().c_str()) == EHAM_OK);
  EXPECT(std::filesystem::file_size(tmp / "f.pgm") == 13 + 32 * 32);

  EXPECT(eham_synth_write(0, 3, 1, 1.0, tmp.string().c_str(), "d") == EHAM_OK);
  eham_corpus* synth = nullptr;
  EXPECT(eham_corpus_from_idx((tmp / "d-images-idx3-ubyte").string().c_str(),
                              (tmp / "d-labels-idx1-ubyte").string().c_str(), 0,
                              &synth) == EHAM_OK);
  EXPECT(eham_corpus_size(synth) == 30);
  EXPECT(eham_synth_write(2, 3, 1, 1.0, tmp.string().c_str(), "x") ==
         EHAM_ERR_INVALID_ARGUMENT);

  eham_corpus_free(synth);
  eham_corpus_free(back);
  eham_corpus_free(c);
  std::filesystem::remove_all(tmp);
}

void progress_sink(const char*, void* user) { ++*static_cast<int*>(user); }

void experiments() {
  eham_experiment* exp = nullptr;
  EXPECT(eham_experiment_parse("colour = red", nullptr, &exp) ==
         EHAM_ERR_INVALID_ARGUMENT);
  EXPECT(eham_experiment_load("/nonexistent/eham.cfg", &exp) == EHAM_ERR_IO);

  const char* cfg =
      "corpus = synthetic\n"
      "synth_per_class = 20\n"
      "folds = 1\n"
      "schedule = 100\n"
      "samples = 2\n"
      "budget = 4\n"
      "wall_time = omit\n";
  EXPECT(eham_experiment_parse(cfg, nullptr, &exp) == EHAM_OK);
  EXPECT(eham_experiment_set_jobs(exp, 2) == EHAM_OK);
  int calls = 0;
  char* csv = nullptr;
  EXPECT(eham_experiment_run(exp, progress_sink, &calls, &csv) == EHAM_OK);
  EXPECT(calls > 0);
  EXPECT(csv != nullptr);
  if (csv) {
    const std::string text(csv);
    EXPECT(text.rfind("fold,method,direction,fill_percent,precision,recall,"
                      "accuracy,entropy,wall_time_s\n", 0) == 0);
    EXPECT(text.find("\nmean,SS,b2a,100,") != std::string::npos);
    eham_string_free(csv);
  }
  double digits = 0, letters = 0;
  EXPECT(eham_experiment_classifier_accuracy(exp, 0, &digits, &letters) == EHAM_OK);
  EXPECT(digits > 0.0 && letters > 0.0);
  EXPECT(eham_experiment_classifier_accuracy(exp, 1, &digits, &letters) ==
         EHAM_ERR_INVALID_ARGUMENT);
  eham_experiment_free(exp);
}

}  // namespace

int main() {
  EXPECT(std::strlen(eham_version()) > 0);
  memory_basics();
  retrieval();
  corpus_and_featurize();
  experiments();
  if (failures) {
    std::fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  std::puts("C API checks passed");
  return 0;
}
