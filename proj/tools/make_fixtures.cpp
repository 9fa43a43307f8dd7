// Writes the sample data set shipped in examples_data/.
//   make_fixtures <output-dir>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "../tests/support/synthetic.hpp"
#include "tfrcorr/io.hpp"

using namespace tfrcorr;

namespace {

std::filesystem::path dir;

template <class Fn>
void emit(const std::string& name, Fn&& fn) {
  std::ofstream out(dir / name, std::ios::binary);
  fn(out);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <output-dir>\n";
    return 1;
  }
  dir = argv[1];
  std::filesystem::create_directories(dir);

  const auto params = CorrelationParams::defaults();
  auto world = synth::grid_world();
  const TFRPanel panel = synth::simulate_panel(world, params, 11, 20111);
  emit("tfr.csv", [&](std::ostream& o) { io::write_tfr(o, panel); });
  emit("phases.csv", [&](std::ostream& o) { io::write_phases(o, panel); });
  emit("covariates.csv", [&](std::ostream& o) { io::write_covariates(o, world.pairs()); });
  emit("theta.csv", [&](std::ostream& o) { io::write_theta(o, world.thetas()); });

  std::map<std::string, std::vector<PopulationWeights::Entry>> raw;
  for (std::size_t i = 0; i < world.countries.size(); ++i)
    raw[world.region[i]].emplace_back(world.countries[i], 1.0 + static_cast<double>((i * 37) % 11));
  std::vector<PopulationWeights> regions;
  for (auto& [name, entries] : raw) regions.emplace_back(name, entries);
  emit("weights.csv", [&](std::ostream& o) { io::write_weights(o, regions); });

  // Two further periods from the same model give regional "observations".
  const Period last = panel.periods().back();
  for (std::size_t c = 0; c < world.countries.size(); ++c) {
    const auto* rec = panel.find(world.countries[c], last);
    world.launch_tfr[c] = rec->tfr;
    world.launch_phase[c] = rec->phase == Phase::post_transition ? Phase::post_transition : Phase::transition;
  }
  const TFRPanel future = synth::simulate_panel(world, params, 2, 20112, last.start_year);
  emit("observed.csv", [&](std::ostream& o) {
    io::CsvWriter w(o);
    w.row({"region", "period_start", "tfr"});
    for (const auto& reg : regions)
      for (int k = 1; k <= 2; ++k) {
        const Period p{last.start_year + 5 * k};
        double v = 0;
        for (const auto& [c, share] : reg.entries()) v += share * future.find(c, p)->tfr;
        w.row({reg.region(), std::to_string(p.start_year), io::format_number(v)});
      }
  });

  emit("na_covariates.csv", [](std::ostream& o) {
    io::write_covariates(o, PairCovariateTable({{{"CAN"}, {"USA"}, {true, false, true}}}));
  });
  emit("na_weights.csv", [](std::ostream& o) {
    io::write_weights(o, {PopulationWeights("Northern America", {{{"USA"}, 0.9}, {{"CAN"}, 0.1}})});
  });

  CorrelationMatrix m{{{"AAA"}, {"BBB"}, {"CCC"}}, Eigen::MatrixXd(3, 3)};
  m.values << 1, 0.9, 0.2, 0.9, 1, 0.9, 0.2, 0.9, 1;
  emit("matrix.csv", [&](std::ostream& o) { io::write_matrix(o, m); });
  return 0;
}
