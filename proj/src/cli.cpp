#include "rescomm/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "rescomm/conduction_net.hpp"
#include "rescomm/diffusion.hpp"
#include "rescomm/engine/csv.hpp"
#include "rescomm/engine/rng.hpp"
#include "rescomm/error.hpp"
#include "rescomm/memristor.hpp"
#include "rescomm/neuristor.hpp"
#include "rescomm/p1906.hpp"
#include "rescomm/scenario.hpp"

namespace rescomm {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kExamples = R"(Examples:
  rescomm sweep --out out/ --amplitude 1 --frequency 2
  rescomm spike --out out/ --amplitude 0.6 --width 20e-6 --threshold-report
  rescomm net --scenario tests/data/chain.scn --out out/ --seed 7
  rescomm diffuse --out out/ --mode ook --bits 10110 --symbol-period 2e-3
  rescomm metrics --sent sent.txt --received received.txt --out out/ --window 2e-3

Exit status: 0 success, 2 configuration or input error, 3 model error, 4 I/O error.)";

struct Common {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
};

void add_common(CLI::App* cmd, Common& c, bool with_scenario = true) {
  if (with_scenario) cmd->add_option("--scenario", c.scenario, "Scenario file");
  cmd->add_option("--out", c.out, "Existing output directory (overrides [output] dir)");
  cmd->add_option("--seed", c.seed, "RNG seed (overrides [sim] seed)");
  cmd->add_option("--dt", c.dt, "Integration step in s (overrides the scenario)");
}

std::optional<ScenarioConfig> load(const Common& c) {
  if (c.scenario.empty()) return std::nullopt;
  return load_scenario_file(c.scenario);
}

fs::path output_dir(const Common& c, const std::optional<ScenarioConfig>& sc) {
  const std::string dir = !c.out.empty() ? c.out : (sc ? sc->output_dir : std::string());
  if (dir.empty()) throw InputError("no output directory; pass --out <dir>");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw InputError("output directory '" + dir + "' does not exist");
  return dir;
}

template <typename F>
void write_file(const fs::path& path, std::ostream& log, F&& body) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  body(os);
  os.flush();
  if (!os) throw IoError("failed writing " + path.string());
  log << "wrote " << path.string() << '\n';
}

template <typename T>
void kv(std::ostream& os, std::string_view key, const T& value) {
  os << key << '=';
  if constexpr (std::is_floating_point_v<T>) {
    os << csv::number(value);
  } else {
    os << value;
  }
  os << '\n';
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::optional<double> amplitude;
  std::optional<double> frequency;
  std::optional<double> periods;
  std::optional<double> w0;
};

void cmd_sweep(const Common& c, const SweepArgs& a, std::ostream& out) {
  const auto sc = load(c);
  SweepSettings s = sc ? sc->sweep : SweepSettings{};
  if (a.amplitude) s.amplitude = *a.amplitude;
  if (a.frequency) s.frequency = *a.frequency;
  if (a.periods) s.periods = *a.periods;
  if (a.w0) s.w0_fraction = *a.w0;
  if (c.dt) s.dt = *c.dt;
  const auto dir = output_dir(c, sc);

  s.device.validate();
  if (!(s.w0_fraction >= 0.0 && s.w0_fraction <= 1.0)) throw InputError("--w0 must lie in [0, 1]");
  if (!std::isfinite(s.amplitude)) throw InputError("--amplitude must be finite");
  if (!(s.frequency > 0.0 && s.periods > 0.0)) throw InputError("--frequency and --periods must be > 0");
  const auto samples = iv_sweep(s.device, WaveformSpec::sine(s.amplitude, s.frequency), s.dt, s.periods / s.frequency,
                                MemristorState::at_fraction(s.device, s.w0_fraction));
  const double band = s.pinch_band * std::abs(s.amplitude);

  write_file(dir / "iv.csv", out, [&](std::ostream& os) { write_iv_csv(os, samples); });
  write_file(dir / "summary.txt", out, [&](std::ostream& os) {
    kv(os, "amplitude", s.amplitude);
    kv(os, "frequency", s.frequency);
    kv(os, "dt", s.dt);
    kv(os, "periods", s.periods);
    kv(os, "samples", samples.size());
    kv(os, "loop_area", loop_area(samples));
    kv(os, "pinch_band", band);
    kv(os, "pinch_residual", pinch_residual(samples, band));
  });
}

// ---------------------------------------------------------------- spike

struct SpikeArgs {
  std::optional<double> amplitude;
  std::optional<double> width;
  std::optional<double> start;
  std::optional<double> duration;
  std::optional<std::string> kind;
  std::string node;
  std::optional<std::size_t> stride;
  bool threshold_report = false;
};

void cmd_spike(const Common& c, const SpikeArgs& a, std::ostream& out) {
  const auto sc = load(c);
  const NeuristorParams params = sc ? sc->device : NeuristorParams{};
  const double dt = c.dt.value_or(sc ? sc->network.dt : 1e-7);
  const double duration = a.duration.value_or(sc ? sc->network.duration : 300e-6);
  const std::size_t stride = a.stride.value_or(sc ? sc->trace_stride : 1);
  const std::uint64_t seed = c.seed.value_or(sc ? sc->network.seed : 0);
  const auto dir = output_dir(c, sc);
  if (stride == 0) throw InputError("--stride must be >= 1");

  std::vector<WaveformSpec> drive;
  const bool from_flags = a.amplitude || a.width || a.start || a.kind || !sc || sc->network.stimuli.empty();
  if (from_flags) {
    const std::string kind = a.kind.value_or("pulse");
    const double amplitude = a.amplitude.value_or(0.6);
    const double start = a.start.value_or(10e-6);
    drive.push_back(kind == "step" ? WaveformSpec::step(amplitude, start)
                                   : WaveformSpec::pulse(amplitude, start, a.width.value_or(20e-6)));
  } else {
    const auto& net = sc->network;
    if (net.nodes.empty()) throw InputError("scenario declares stimuli but no nodes");
    const std::size_t node = a.node.empty() ? 0 : net.node_index(a.node);
    for (const auto& s : net.stimuli) {
      if (s.node == node) drive.push_back(s.waveform);
    }
  }
  const CounterRng keys(seed);
  for (std::size_t i = 0; i < drive.size(); ++i) {
    drive[i].seed = keys.at(i);
    drive[i].validate();
  }

  const InputSignal input = [&drive](double t) {
    double v = 0.0;
    for (const auto& w : drive) v += w.value(t);
    return v;
  };
  const auto run = run_neuristor(params, input, dt, duration);

  write_file(dir / "trace.csv", out, [&](std::ostream& os) { run.trace.write_csv(os, stride); });
  write_file(dir / "spikes.csv", out, [&](std::ostream& os) { write_spikes_csv(os, run.spikes); });
  write_file(dir / "summary.txt", out, [&](std::ostream& os) {
    kv(os, "dt", dt);
    kv(os, "duration", duration);
    kv(os, "seed", seed);
    kv(os, "v_rest", run.v_rest);
    kv(os, "detect_level", run.threshold);
    kv(os, "spike_count", run.spikes.size());
  });
  if (a.threshold_report) {
    const double threshold = find_threshold(params, dt);
    write_file(dir / "threshold.txt", out, [&](std::ostream& os) {
      kv(os, "step_threshold", threshold);
      kv(os, "dt", dt);
    });
  }
}

// ---------------------------------------------------------------- net

struct NetArgs {
  std::optional<std::size_t> stride;
};

void cmd_net(const Common& c, const NetArgs& a, std::ostream& out) {
  const auto sc = load(c);
  if (!sc) throw InputError("net needs --scenario");
  NetworkConfig cfg = sc->network;
  if (c.seed) cfg.seed = *c.seed;
  if (c.dt) cfg.dt = *c.dt;
  const std::size_t stride = a.stride.value_or(sc->trace_stride);
  if (stride == 0) throw InputError("--stride must be >= 1");
  const auto dir = output_dir(c, sc);

  const auto result = run_network(cfg);

  std::vector<MetricPair> pairs = sc->metrics;
  if (pairs.empty()) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : cfg.edges) {
      if (seen.insert({e.src, e.dst}).second) pairs.push_back(MetricPair{e.src, e.dst, {}});
    }
  }

  write_file(dir / "spikes.csv", out, [&](std::ostream& os) { write_spike_log_csv(os, cfg, result.spikes); });
  for (std::size_t n = 0; n < cfg.nodes.size(); ++n) {
    write_file(dir / ("trace_" + cfg.nodes[n].id + ".csv"), out,
               [&](std::ostream& os) { result.traces[n].write_csv(os, stride); });
  }
  write_file(dir / "deliveries.csv", out, [&](std::ostream& os) {
    os << "t_deliver,t_effective,src,dst,kind,contribution\n";
    for (const auto& d : result.deliveries) {
      const auto& e = cfg.edges[d.event.edge];
      csv::row(os, d.event.t_deliver, d.t_effective, cfg.nodes[e.src].id, cfg.nodes[e.dst].id, to_string(e.kind),
               d.contribution);
    }
  });

  std::ostringstream text;
  json links = json::array();
  for (const auto& pair : pairs) {
    const auto ev = link_events(cfg, result, pair.src, pair.dst);
    const auto m = p1906::measure(ev.sent, ev.received, pair.options);
    const std::string name = cfg.nodes[pair.src].id + "->" + cfg.nodes[pair.dst].id;
    p1906::write_metrics_text(text, m, name + ".");
    json link;
    link["src"] = cfg.nodes[pair.src].id;
    link["dst"] = cfg.nodes[pair.dst].id;
    const json fields = json::parse(p1906::metrics_json(m));
    for (const auto& [k, v] : fields.items()) link[k] = v;
    links.push_back(std::move(link));
  }
  write_file(dir / "metrics.txt", out, [&](std::ostream& os) { os << text.str(); });
  write_file(dir / "metrics.json", out, [&](std::ostream& os) { os << json{{"links", links}}.dump(2) << '\n'; });
}

// ---------------------------------------------------------------- diffuse

struct DiffuseArgs {
  std::string mode = "pulse";
  std::optional<double> q;
  std::optional<double> d;
  std::optional<double> r;
  std::optional<double> t_max;
  std::optional<std::size_t> samples;
  std::optional<std::string> bits;
  std::optional<double> symbol_period;
  std::optional<double> threshold;
};

void cmd_diffuse(const Common& c, const DiffuseArgs& a, std::ostream& out) {
  const auto sc = load(c);
  DiffusionSettings s = sc ? sc->diffusion : DiffusionSettings{};
  if (a.q) s.channel.q_molecules = *a.q;
  if (a.d) s.channel.d_coeff = *a.d;
  if (a.r) s.channel.r = *a.r;
  if (a.t_max) s.t_max = *a.t_max;
  if (a.samples) s.samples = *a.samples;
  if (a.symbol_period) s.link.symbol_period = *a.symbol_period;
  if (a.threshold) s.link.detect_threshold = *a.threshold;
  if (a.bits) {
    s.bits.clear();
    for (char ch : *a.bits) {
      if (ch != '0' && ch != '1') throw InputError("--bits must contain only 0 and 1");
      s.bits.push_back(ch - '0');
    }
  }
  const auto dir = output_dir(c, sc);

  if (a.mode == "pulse") {
    const auto samples = pulse_response(s.channel, s.t_max, s.samples);
    std::size_t best = 0;
    for (std::size_t k = 1; k < samples.size(); ++k) {
      if (samples[k].c > samples[best].c) best = k;
    }
    write_file(dir / "pulse.csv", out, [&](std::ostream& os) { write_pulse_csv(os, samples); });
    write_file(dir / "summary.txt", out, [&](std::ostream& os) {
      kv(os, "q", s.channel.q_molecules);
      kv(os, "d", s.channel.d_coeff);
      kv(os, "r", s.channel.r);
      kv(os, "peak_sample_t", samples[best].t);
      kv(os, "peak_sample_c", samples[best].c);
      if (s.channel.r > 0.0) kv(os, "peak_time", peak_time(s.channel));
    });
  } else {
    const auto res = simulate_ook(s.channel, s.link, s.bits);
    std::size_t errors = 0;
    for (std::size_t k = 0; k < res.sent.size(); ++k) errors += res.sent[k] != res.received[k] ? 1 : 0;
    write_file(dir / "ook.csv", out, [&](std::ostream& os) { write_ook_csv(os, res); });
    write_file(dir / "summary.txt", out, [&](std::ostream& os) {
      kv(os, "bits", res.sent.size());
      kv(os, "bit_errors", errors);
      kv(os, "symbol_period", s.link.symbol_period);
      kv(os, "detect_threshold", s.link.detect_threshold);
    });
  }
}

// ---------------------------------------------------------------- metrics

std::vector<double> read_times(const std::string& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) throw IoError("cannot read " + path + ": is a directory");
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::vector<double> times;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_first_of(", \t\r", b);
    const std::string cell = line.substr(b, e == std::string::npos ? std::string::npos : e - b);
    double t = 0.0;
    const auto [ptr, err] = std::from_chars(cell.data(), cell.data() + cell.size(), t);
    if (err != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(t)) {
      if (times.empty() && line_no == 1) continue;  // header
      throw InputError(path + ":" + std::to_string(line_no) + ": expected a time, got '" + cell + "'");
    }
    times.push_back(t);
  }
  if (in.bad()) throw IoError("error while reading " + path);
  return times;
}

struct MetricsArgs {
  std::string sent;
  std::string received;
  double window = p1906::MeasureOptions{}.window;
  double symbol = p1906::MeasureOptions{}.symbol_period;
};

void cmd_metrics(const Common& c, const MetricsArgs& a, std::ostream& out) {
  const auto dir = output_dir(c, std::nullopt);
  const auto sent = read_times(a.sent);
  const auto received = read_times(a.received);
  const auto m = p1906::measure(sent, received, {a.window, a.symbol});
  write_file(dir / "metrics.txt", out, [&](std::ostream& os) { p1906::write_metrics_text(os, m); });
  write_file(dir / "metrics.json", out, [&](std::ostream& os) { os << p1906::metrics_json(m, 2) << '\n'; });
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resistive and molecular nanoscale communication simulator", "rescomm"};
  app.footer(kExamples);
  app.require_subcommand(1);

  Common common;

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Memristor I-V sweep under sine drive: iv.csv, summary.txt");
  add_common(c_sweep, common);
  c_sweep->add_option("--amplitude", sweep.amplitude, "Drive amplitude, V (default 1)");
  c_sweep->add_option("--frequency", sweep.frequency, "Drive frequency, Hz (default 1)");
  c_sweep->add_option("--periods", sweep.periods, "Sweep length in drive periods (default 1)");
  c_sweep->add_option("--w0", sweep.w0, "Initial doped fraction w/D (default 0.1)");

  SpikeArgs spike;
  auto* c_spike = app.add_subcommand("spike", "Single neuristor: trace.csv, spikes.csv, summary.txt");
  add_common(c_spike, common);
  c_spike->add_option("--amplitude", spike.amplitude, "Input amplitude, V (default 0.6)");
  c_spike->add_option("--width", spike.width, "Pulse width, s (default 20e-6)");
  c_spike->add_option("--start", spike.start, "Input onset, s (default 10e-6)");
  c_spike->add_option("--kind", spike.kind, "Input shape")->check(CLI::IsMember({"pulse", "step"}));
  c_spike->add_option("--duration", spike.duration, "Run length, s (default 300e-6)");
  c_spike->add_option("--node", spike.node, "Scenario node whose stimuli drive the cell (default: first)");
  c_spike->add_option("--stride", spike.stride, "Write every n-th trace row");
  c_spike->add_flag("--threshold-report", spike.threshold_report, "Also write threshold.txt (step threshold)");

  NetArgs net;
  auto* c_net = app.add_subcommand("net", "Neuristor network: spikes.csv, trace_<node>.csv, deliveries.csv, metrics");
  add_common(c_net, common);
  c_net->add_option("--stride", net.stride, "Write every n-th trace row");

  DiffuseArgs diffuse;
  auto* c_diffuse = app.add_subcommand("diffuse", "Diffusion channel: pulse.csv or ook.csv, summary.txt");
  add_common(c_diffuse, common);
  c_diffuse->add_option("--mode", diffuse.mode, "pulse or ook")->check(CLI::IsMember({"pulse", "ook"}));
  c_diffuse->add_option("--q", diffuse.q, "Molecules per release");
  c_diffuse->add_option("--d", diffuse.d, "Diffusion coefficient, m^2/s");
  c_diffuse->add_option("--r", diffuse.r, "Receiver distance, m");
  c_diffuse->add_option("--t-max", diffuse.t_max, "Pulse response horizon, s");
  c_diffuse->add_option("--samples", diffuse.samples, "Pulse response samples");
  c_diffuse->add_option("--bits", diffuse.bits, "OOK bit string, e.g. 10110");
  c_diffuse->add_option("--symbol-period", diffuse.symbol_period, "OOK symbol period, s");
  c_diffuse->add_option("--threshold", diffuse.threshold, "OOK detection threshold, molecules/m^3");

  MetricsArgs metrics;
  auto* c_metrics = app.add_subcommand("metrics", "Link metrics from event files: metrics.txt, metrics.json");
  add_common(c_metrics, common, false);
  c_metrics->add_option("--sent", metrics.sent, "Sent event times, one per line")->required();
  c_metrics->add_option("--received", metrics.received, "Received event times, one per line")->required();
  c_metrics->add_option("--window", metrics.window, "Matching latency window, s");
  c_metrics->add_option("--symbol", metrics.symbol, "Symbol period for peak_rate, s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (c_sweep->parsed()) cmd_sweep(common, sweep, out);
    if (c_spike->parsed()) cmd_spike(common, spike, out);
    if (c_net->parsed()) cmd_net(common, net, out);
    if (c_diffuse->parsed()) cmd_diffuse(common, diffuse, out);
    if (c_metrics->parsed()) cmd_metrics(common, metrics, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "model error: " << e.what() << '\n';
    return kExitModel;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitModel;
  }
  return kExitOk;
}

}  // namespace rescomm
