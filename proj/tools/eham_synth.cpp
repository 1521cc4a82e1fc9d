// eham_synth: writes the synthetic digit/letter glyph corpus as IDX files,
// for running the pipeline where the real corpora are not available.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "eham/eham.h"

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic HEMNIST-style glyph corpus (IDX format)"};
  std::string dir;
  std::size_t per_class = 500;
  std::uint64_t seed = 1;
  double distortion = 1.0;
  app.add_option("--dir", dir, "Output directory")->required();
  app.add_option("--per-class", per_class, "Images per class")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--distortion", distortion, "Distortion amplitude factor")
      ->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  if (eham_synth_write(0, per_class, seed, distortion, dir.c_str(),
                       "synth-digits") != EHAM_OK ||
      eham_synth_write(1, per_class, seed, distortion, dir.c_str(),
                       "synth-letters") != EHAM_OK) {
    std::cerr << "error: " << eham_last_error() << "\n";
    return 1;
  }
  std::cerr << "wrote " << 10 * per_class << " digits and " << 10 * per_class
            << " letters to " << dir << "\n";
  return 0;
}
