#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rescomm/conduction_net.hpp"
#include "rescomm/diffusion.hpp"
#include "rescomm/memristor.hpp"
#include "rescomm/p1906.hpp"

namespace rescomm {

/// Memristor I-V sweep settings.
struct SweepSettings {
  MemristorParams device{};
  double amplitude = 1.0;     // V
  double frequency = 1.0;     // Hz
  double w0_fraction = 0.1;   // initial w / depth
  double dt = 1e-4;           // s
  double periods = 1.0;       // sweep length in drive periods
  double pinch_band = 1e-3;   // fraction of the amplitude below which pinch_residual looks
};

/// Diffusion pulse and OOK settings.
struct DiffusionSettings {
  DiffusionParams channel{};
  OokLinkParams link{};
  double t_max = 1e-3;       // s, pulse response horizon
  std::size_t samples = 1001;
  std::vector<int> bits{1, 0, 1, 1, 0, 0, 1, 0};
};

struct MetricPair {
  std::size_t src;
  std::size_t dst;
  p1906::MeasureOptions options;
};

/// Everything a scenario file can declare. Sections not present keep the
/// defaults shown in the member initialisers.
struct ScenarioConfig {
  NetworkConfig network;          // [sim], [device], [network], [nodes], [edges], [stimuli]
  NeuristorParams device{};       // [device]; copied into every node
  std::vector<MetricPair> metrics;
  SweepSettings sweep;            // [memristor]
  DiffusionSettings diffusion;    // [diffusion]
  std::string output_dir;         // [output] dir
  std::size_t trace_stride = 1;   // [output] trace_stride
};

/// Parses and validates scenario text.
///
/// The format is line-oriented. `#` starts a comment. `[name]` opens a
/// section. Key-value sections ([sim], [device], [network], [memristor],
/// [diffusion], [output]) hold `key = value` lines. Table sections ([nodes],
/// [edges], [stimuli], [metrics]) start with a header line naming their
/// columns, followed by one whitespace-separated row per entry; `-` leaves a
/// cell at its default.
///
/// Throws ConfigError with the offending line number. The [sim] section is
/// mandatory.
ScenarioConfig load_scenario(std::string_view text);

/// Reads a file and parses it. Throws IoError when the file cannot be read.
ScenarioConfig load_scenario_file(const std::filesystem::path& path);

}  // namespace rescomm
