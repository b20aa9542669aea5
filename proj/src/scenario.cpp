#include "rescomm/scenario.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "rescomm/engine/csv.hpp"
#include "rescomm/error.hpp"

namespace rescomm {

namespace {

using Kind = ConfigError::Kind;

struct Entry {
  std::string value;
  std::size_t line;
};

struct Row {
  std::vector<std::string> cells;
  std::size_t line;
};

struct Section {
  std::string name;
  std::size_t line = 0;
  bool table = false;
  std::map<std::string, Entry> entries;  // key-value sections
  std::vector<std::string> columns;      // table sections
  std::size_t columns_line = 0;
  std::vector<Row> rows;
};

const std::vector<std::string_view> kKeyValueSections{"sim", "device", "network", "memristor", "diffusion", "output"};
const std::vector<std::string_view> kTableSections{"nodes", "edges", "stimuli", "metrics"};

bool contains(const std::vector<std::string_view>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& text, std::size_t line, std::string_view what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError(Kind::Syntax, line, "expected a number for '" + std::string(what) + "', got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& text, std::size_t line, std::string_view what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(Kind::Syntax, line, "expected a non-negative integer for '" + std::string(what) + "', got '" + text + "'");
  }
  return v;
}

std::vector<Section> tokenize(std::string_view text) {
  std::vector<Section> sections;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(Kind::Syntax, line_no, "unterminated section header");
      const std::string name{trim(line.substr(1, line.size() - 2))};
      const bool table = contains(kTableSections, name);
      if (!table && !contains(kKeyValueSections, name)) {
        throw ConfigError(Kind::UnknownKey, line_no, "unknown section [" + name + "]");
      }
      for (const auto& s : sections) {
        if (s.name == name) {
          throw ConfigError(Kind::Syntax, line_no, "section [" + name + "] repeated (first at line " + std::to_string(s.line) + ")");
        }
      }
      sections.push_back(Section{name, line_no, table, {}, {}, 0, {}});
      continue;
    }

    if (sections.empty()) throw ConfigError(Kind::Syntax, line_no, "content outside any section");
    Section& sec = sections.back();
    if (sec.table) {
      auto cells = split_ws(line);
      if (sec.columns.empty()) {
        sec.columns = std::move(cells);
        sec.columns_line = line_no;
      } else {
        if (cells.size() != sec.columns.size()) {
          throw ConfigError(Kind::Syntax, line_no, "row has " + std::to_string(cells.size()) + " cells, header has " +
                                                      std::to_string(sec.columns.size()));
        }
        sec.rows.push_back(Row{std::move(cells), line_no});
      }
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ConfigError(Kind::Syntax, line_no, "expected 'key = value'");
      const std::string key{trim(line.substr(0, eq))};
      const std::string value{trim(line.substr(eq + 1))};
      if (key.empty() || value.empty()) throw ConfigError(Kind::Syntax, line_no, "expected 'key = value'");
      if (!sec.entries.emplace(key, Entry{value, line_no}).second) {
        throw ConfigError(Kind::Syntax, line_no, "key '" + key + "' repeated in [" + sec.name + "]");
      }
    }
  }
  return sections;
}

const Section* find(const std::vector<Section>& sections, std::string_view name) {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

using Setter = std::function<void(const Entry&)>;

void apply_entries(const Section& sec, const std::map<std::string, Setter>& setters) {
  for (const auto& [key, entry] : sec.entries) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(Kind::UnknownKey, entry.line, "unknown key '" + key + "' in [" + sec.name + "]");
    it->second(entry);
  }
}

Setter number_into(double& target, std::string key) {
  return [&target, key](const Entry& e) { target = parse_double(e.value, e.line, key); };
}

/// Column accessor for one table section.
class Table {
 public:
  Table(const Section& sec, const std::vector<std::string_view>& known, const std::vector<std::string_view>& required)
      : sec_(sec) {
    if (sec.columns.empty()) {
      if (!sec.rows.empty()) throw ConfigError(Kind::Syntax, sec.line, "table without header");
      return;
    }
    for (std::size_t c = 0; c < sec.columns.size(); ++c) {
      const auto& name = sec.columns[c];
      if (!contains(known, name)) {
        throw ConfigError(Kind::UnknownKey, sec.columns_line, "unknown column '" + name + "' in [" + sec.name + "]");
      }
      if (!index_.emplace(name, c).second) {
        throw ConfigError(Kind::Syntax, sec.columns_line, "column '" + name + "' repeated in [" + sec.name + "]");
      }
    }
    for (auto r : required) {
      if (!index_.count(std::string(r))) {
        throw ConfigError(Kind::Syntax, sec.columns_line, "[" + sec.name + "] needs a '" + std::string(r) + "' column");
      }
    }
  }

  const std::vector<Row>& rows() const { return sec_.rows; }

  /// Cell text, or nullopt when the column is absent or the cell is `-`.
  std::optional<std::string> cell(const Row& row, std::string_view column) const {
    auto it = index_.find(std::string(column));
    if (it == index_.end() || row.cells[it->second] == "-") return std::nullopt;
    return row.cells[it->second];
  }

  std::optional<double> number(const Row& row, std::string_view column) const {
    auto c = cell(row, column);
    if (!c) return std::nullopt;
    return parse_double(*c, row.line, column);
  }

  std::string required(const Row& row, std::string_view column) const {
    auto c = cell(row, column);
    if (!c) throw ConfigError(Kind::Syntax, row.line, "'" + std::string(column) + "' cannot be '-'");
    return *c;
  }

 private:
  const Section& sec_;
  std::map<std::string, std::size_t> index_;
};

std::size_t resolve(const NetworkConfig& net, const std::string& id, std::size_t line) {
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    if (net.nodes[i].id == id) return i;
  }
  throw ConfigError(Kind::DanglingReference, line, "unknown node '" + id + "'");
}

template <typename F>
void as_invariant(std::size_t line, F&& f) {
  try {
    f();
  } catch (const InputError& e) {
    throw ConfigError(Kind::Invariant, line, e.what());
  }
}

void apply_device(const Section& sec, NeuristorParams& p) {
  MottChannelParams ch{};
  std::map<std::string, Setter> setters{
      {"c1", number_into(p.c1, "c1")},           {"c2", number_into(p.c2, "c2")},
      {"v_bias1", number_into(p.v_bias1, "v_bias1")}, {"v_bias2", number_into(p.v_bias2, "v_bias2")},
      {"r_load1", number_into(p.r_load1, "r_load1")}, {"r_load2", number_into(p.r_load2, "r_load2")},
      {"r_out", number_into(p.r_out, "r_out")},    {"c_out", number_into(p.c_out, "c_out")},
      {"r_ins", number_into(ch.r_ins, "r_ins")},    {"r_met", number_into(ch.r_met, "r_met")},
      {"v_on", number_into(ch.v_on, "v_on")},       {"v_hold", number_into(ch.v_hold, "v_hold")},
      {"tau_switch", number_into(ch.tau_switch, "tau_switch")},
  };
  apply_entries(sec, setters);
  p.ch1 = ch;
  p.ch2 = ch;
  as_invariant(sec.line, [&] { p.validate(); });
}

void apply_sim(const Section& sec, NetworkConfig& net) {
  apply_entries(sec, {
                         {"dt", number_into(net.dt, "dt")},
                         {"duration", number_into(net.duration, "duration")},
                         {"seed", [&](const Entry& e) { net.seed = parse_u64(e.value, e.line, "seed"); }},
                     });
  const auto line_of = [&](const char* key) {
    auto it = sec.entries.find(key);
    return it == sec.entries.end() ? sec.line : it->second.line;
  };
  if (!(net.dt > 0.0)) throw ConfigError(Kind::Invariant, line_of("dt"), "dt must be > 0");
  if (!(net.duration >= net.dt)) throw ConfigError(Kind::Invariant, line_of("duration"), "duration must be >= dt");
}

void apply_network(const Section& sec, NetworkConfig& net) {
  apply_entries(sec, {
                         {"syn_width", number_into(net.syn_width, "syn_width")},
                         {"modulation_duration", number_into(net.modulation_duration, "modulation_duration")},
                         {"response_window", number_into(net.response_window, "response_window")},
                         {"min_separation", number_into(net.min_separation, "min_separation")},
                     });
  for (const auto& [key, entry] : sec.entries) {
    const double v = parse_double(entry.value, entry.line, key);
    if (key == "min_separation" ? v < 0.0 : v <= 0.0) {
      throw ConfigError(Kind::Invariant, entry.line, key + " must be " + (key == "min_separation" ? ">= 0" : "> 0"));
    }
  }
}

void apply_nodes(const Section& sec, const NeuristorParams& device, NetworkConfig& net) {
  const Table t(sec, {"id", "v_rest", "v_threshold"}, {"id"});
  for (const auto& row : t.rows()) {
    NeuronNodeParams node;
    node.id = t.required(row, "id");
    node.cell = device;
    if (auto v = t.number(row, "v_rest")) node.v_rest = *v;
    node.v_threshold = t.number(row, "v_threshold");
    for (const auto& other : net.nodes) {
      if (other.id == node.id) throw ConfigError(Kind::Invariant, row.line, "duplicate node id '" + node.id + "'");
    }
    as_invariant(row.line, [&] { node.validate(); });
    net.nodes.push_back(std::move(node));
  }
}

void apply_edges(const Section& sec, NetworkConfig& net) {
  const Table t(sec, {"src", "dst", "kind", "weight", "length", "velocity"}, {"src", "dst", "kind", "length"});
  for (const auto& row : t.rows()) {
    SynapseEdge e;
    e.src = resolve(net, t.required(row, "src"), row.line);
    e.dst = resolve(net, t.required(row, "dst"), row.line);
    as_invariant(row.line, [&] { e.kind = parse_synapse_kind(t.required(row, "kind")); });
    if (auto v = t.number(row, "weight")) e.weight = *v;
    e.axon_length = t.number(row, "length").value_or(0.0);
    if (auto v = t.number(row, "velocity")) e.velocity = *v;
    as_invariant(row.line, [&] { e.validate(); });
    if (e.delay() == 0.0 && e.src == e.dst) {
      throw ConfigError(Kind::Invariant, row.line, "zero-delay self-loop on node '" + net.nodes[e.src].id + "'");
    }
    net.edges.push_back(e);
  }
}

void apply_stimuli(const Section& sec, NetworkConfig& net) {
  const Table t(sec, {"node", "kind", "amplitude", "start", "width", "period", "frequency", "phase", "count", "jitter"},
                {"node", "kind", "amplitude"});
  for (const auto& row : t.rows()) {
    Stimulus s;
    s.node = resolve(net, t.required(row, "node"), row.line);
    auto& w = s.waveform;
    as_invariant(row.line, [&] { w.kind = parse_waveform_kind(t.required(row, "kind")); });
    w.amplitude = parse_double(t.required(row, "amplitude"), row.line, "amplitude");
    w.start = t.number(row, "start").value_or(0.0);
    w.width = t.number(row, "width").value_or(0.0);
    w.period = t.number(row, "period").value_or(0.0);
    w.frequency = t.number(row, "frequency").value_or(0.0);
    w.phase = t.number(row, "phase").value_or(0.0);
    w.jitter = t.number(row, "jitter").value_or(0.0);
    if (auto c = t.cell(row, "count")) w.count = parse_u64(*c, row.line, "count");
    as_invariant(row.line, [&] { w.validate(); });
    net.stimuli.push_back(s);
  }
}

void apply_metrics(const Section& sec, const NetworkConfig& net, std::vector<MetricPair>& out) {
  const Table t(sec, {"src", "dst", "window", "symbol"}, {"src", "dst"});
  for (const auto& row : t.rows()) {
    MetricPair m{resolve(net, t.required(row, "src"), row.line), resolve(net, t.required(row, "dst"), row.line), {}};
    if (auto v = t.number(row, "window")) m.options.window = *v;
    if (auto v = t.number(row, "symbol")) m.options.symbol_period = *v;
    if (!(m.options.window > 0.0 && m.options.symbol_period > 0.0)) {
      throw ConfigError(Kind::Invariant, row.line, "metric window and symbol must be > 0");
    }
    out.push_back(m);
  }
}

void apply_memristor(const Section& sec, SweepSettings& s) {
  auto& d = s.device;
  apply_entries(sec, {
                         {"r_on", number_into(d.r_on, "r_on")},
                         {"r_off", number_into(d.r_off, "r_off")},
                         {"depth", number_into(d.depth, "depth")},
                         {"mobility", number_into(d.mobility, "mobility")},
                         {"amplitude", number_into(s.amplitude, "amplitude")},
                         {"frequency", number_into(s.frequency, "frequency")},
                         {"w0", number_into(s.w0_fraction, "w0")},
                         {"dt", number_into(s.dt, "dt")},
                         {"periods", number_into(s.periods, "periods")},
                         {"pinch_band", number_into(s.pinch_band, "pinch_band")},
                     });
  as_invariant(sec.line, [&] { d.validate(); });
  if (!(s.frequency > 0.0)) throw ConfigError(Kind::Invariant, sec.line, "[memristor] frequency must be > 0");
  if (!(s.w0_fraction >= 0.0 && s.w0_fraction <= 1.0)) throw ConfigError(Kind::Invariant, sec.line, "[memristor] w0 must lie in [0, 1]");
  if (!(s.dt > 0.0 && s.periods > 0.0)) throw ConfigError(Kind::Invariant, sec.line, "[memristor] need dt > 0 and periods > 0");
  if (!(s.pinch_band > 0.0)) throw ConfigError(Kind::Invariant, sec.line, "[memristor] pinch_band must be > 0");
}

std::vector<int> parse_bits(const Entry& e) {
  std::vector<int> bits;
  for (char c : e.value) {
    if (c == '0' || c == '1') {
      bits.push_back(c - '0');
    } else if (c != ' ' && c != ',') {
      throw ConfigError(Kind::Syntax, e.line, "bits must be a string of 0 and 1");
    }
  }
  if (bits.empty()) throw ConfigError(Kind::Invariant, e.line, "bits must not be empty");
  return bits;
}

void apply_diffusion(const Section& sec, DiffusionSettings& s) {
  apply_entries(sec, {
                         {"q", number_into(s.channel.q_molecules, "q")},
                         {"d", number_into(s.channel.d_coeff, "d")},
                         {"r", number_into(s.channel.r, "r")},
                         {"t_max", number_into(s.t_max, "t_max")},
                         {"samples", [&](const Entry& e) { s.samples = parse_u64(e.value, e.line, "samples"); }},
                         {"symbol_period", number_into(s.link.symbol_period, "symbol_period")},
                         {"detect_threshold", number_into(s.link.detect_threshold, "detect_threshold")},
                         {"samples_per_symbol",
                          [&](const Entry& e) { s.link.samples_per_symbol = parse_u64(e.value, e.line, "samples_per_symbol"); }},
                         {"bits", [&](const Entry& e) { s.bits = parse_bits(e); }},
                     });
  as_invariant(sec.line, [&] {
    s.channel.validate();
    s.link.validate();
  });
  if (!(s.t_max > 0.0)) throw ConfigError(Kind::Invariant, sec.line, "[diffusion] t_max must be > 0");
  if (s.samples < 2) throw ConfigError(Kind::Invariant, sec.line, "[diffusion] samples must be >= 2");
}

void apply_output(const Section& sec, ScenarioConfig& cfg) {
  apply_entries(sec, {
                         {"dir", [&](const Entry& e) { cfg.output_dir = e.value; }},
                         {"trace_stride",
                          [&](const Entry& e) {
                            cfg.trace_stride = parse_u64(e.value, e.line, "trace_stride");
                            if (cfg.trace_stride == 0) throw ConfigError(Kind::Invariant, e.line, "trace_stride must be >= 1");
                          }},
                     });
}

}  // namespace

ScenarioConfig load_scenario(std::string_view text) {
  const auto sections = tokenize(text);
  const Section* sim = find(sections, "sim");
  if (!sim) throw ConfigError(Kind::MissingSection, 0, "no sim block");

  ScenarioConfig cfg;
  auto& net = cfg.network;
  if (const auto* s = find(sections, "device")) apply_device(*s, cfg.device);
  apply_sim(*sim, net);
  if (net.dt > cfg.device.dt_max() * (1.0 + 1e-9)) {
    auto it = sim->entries.find("dt");
    throw ConfigError(Kind::Invariant, it == sim->entries.end() ? sim->line : it->second.line,
                      "dt exceeds the neuristor's stable step " + csv::number(cfg.device.dt_max()) + " s");
  }
  if (const auto* s = find(sections, "network")) apply_network(*s, net);
  if (const auto* s = find(sections, "nodes")) apply_nodes(*s, cfg.device, net);
  if (const auto* s = find(sections, "edges")) apply_edges(*s, net);
  if (const auto* s = find(sections, "stimuli")) apply_stimuli(*s, net);
  if (const auto* s = find(sections, "metrics")) apply_metrics(*s, net, cfg.metrics);
  if (const auto* s = find(sections, "memristor")) apply_memristor(*s, cfg.sweep);
  if (const auto* s = find(sections, "diffusion")) apply_diffusion(*s, cfg.diffusion);
  if (const auto* s = find(sections, "output")) apply_output(*s, cfg);

  try {
    net.validate();
  } catch (const ConfigError& e) {
    const Section* edges = find(sections, "edges");
    throw ConfigError(e.kind(), edges ? edges->line : sim->line, e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) throw IoError("cannot read scenario " + path.string() + ": is a directory");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading scenario " + path.string());
  return load_scenario(buf.str());
}

}  // namespace rescomm
