#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "hetsched/experiment.hpp"

namespace hetsched {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

template <class Int>
Int parse_int(std::string_view text, std::string_view what) {
  text = trim(text);
  Int v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("invalid integer for " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
  std::string v = lower(trim(text));
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean for " + std::string(what) + ": '" + std::string(text) + "'");
}

double parse_number(std::string_view text, std::string_view what) {
  try {
    return parse_double(text);
  } catch (const ConfigError&) {
    throw ConfigError("invalid number for " + std::string(what) + ": '" + std::string(trim(text)) + "'");
  }
}

}  // namespace

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("invalid number '" + std::string(text) + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void apply_setting(ExperimentConfig& cfg, std::string_view section, std::string_view key, std::string_view value) {
  const std::string s = lower(trim(section));
  const std::string k = lower(trim(key));
  const std::string what = s + "." + k;
  value = trim(value);

  if (s == "kernel") {
    if (k == "family" || k == "name") {
      try {
        cfg.family = parse_family(lower(value));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else if (k == "nt") {
      cfg.matrix.nt = parse_int<unsigned>(value, what);
    } else if (k == "tile" || k == "b") {
      cfg.matrix.b = parse_int<unsigned>(value, what);
    } else if (k == "ib") {
      cfg.matrix.ib = parse_int<unsigned>(value, what);
    } else if (k == "materialize_aux") {
      cfg.materialize_aux = parse_bool(value, what);
    } else {
      throw ConfigError("unknown setting " + what);
    }
  } else if (s == "platform") {
    if (k == "cpus") {
      cfg.platform.cpu_cores = parse_int<unsigned>(value, what);
    } else if (k == "gpus") {
      cfg.platform.gpus = parse_int<unsigned>(value, what);
    } else if (k == "switches") {
      cfg.platform.switches = parse_int<unsigned>(value, what);
    } else if (k == "bandwidth") {
      cfg.platform.link_bandwidth = parse_number(value, what);
    } else if (k == "latency") {
      cfg.platform.link_latency = parse_number(value, what);
    } else if (k == "switch_cap") {
      if (lower(value) == "inf") {
        cfg.platform.switch_cap = std::numeric_limits<double>::infinity();
      } else {
        cfg.platform.switch_cap = parse_number(value, what);
      }
    } else if (k == "peer_to_peer") {
      cfg.platform.peer_to_peer = parse_bool(value, what);
    } else {
      throw ConfigError("unknown setting " + what);
    }
  } else if (s == "scheduler") {
    if (k == "name") {
      cfg.scheduler.name = lower(value);
    } else if (k == "alpha") {
      cfg.scheduler.dada.alpha = parse_number(value, what);
    } else if (k == "epsilon") {
      cfg.scheduler.dada.epsilon = parse_number(value, what);
    } else if (k == "cp") {
      cfg.scheduler.dada.with_cp = parse_bool(value, what);
    } else if (k == "steal_latency") {
      cfg.steal_latency = parse_number(value, what);
    } else {
      throw ConfigError("unknown setting " + what);
    }
  } else if (s == "run") {
    if (k == "seed") {
      cfg.seed = parse_int<std::uint64_t>(value, what);
    } else if (k == "noise") {
      cfg.noise = parse_number(value, what);
    } else if (k == "reps" || k == "repetitions") {
      cfg.repetitions = parse_int<unsigned>(value, what);
    } else {
      throw ConfigError("unknown setting " + what);
    }
  } else {
    throw ConfigError("unknown section [" + s + "]");
  }
}

void apply_timing_line(ExperimentConfig& cfg, std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    fields.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (fields.size() != 3) throw ConfigError("timing line must be kind,class,seconds: '" + std::string(line) + "'");
  std::string cls = lower(fields[1]);
  ResourceClass rc;
  if (cls == "cpu") {
    rc = ResourceClass::CPU;
  } else if (cls == "gpu") {
    rc = ResourceClass::GPU;
  } else {
    throw ConfigError("unknown resource class '" + std::string(fields[1]) + "'");
  }
  double seconds = parse_number(fields[2], "timing " + std::string(fields[0]));
  if (!(seconds > 0.0)) throw ConfigError("timing for " + std::string(fields[0]) + " must be positive");
  cfg.timing_overrides[TimingKey{std::string(fields[0]), rc}] = seconds;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError("unterminated section header");
        section = lower(trim(line.substr(1, line.size() - 2)));
        continue;
      }
      if (section == "timings") {
        apply_timing_line(cfg, line);
        continue;
      }
      std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) throw ConfigError("expected key = value");
      if (section.empty()) throw ConfigError("setting outside of a section");
      apply_setting(cfg, section, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (cfg.matrix.nt < 1) throw ConfigError("nt must be at least 1");
  if (cfg.matrix.b < 1) throw ConfigError("tile must be at least 1");
  if (cfg.matrix.ib < 1 || cfg.matrix.ib > cfg.matrix.b) throw ConfigError("ib must satisfy 1 <= ib <= tile");
  if (!(cfg.noise >= 0.0 && cfg.noise < 1.0)) throw ConfigError("noise must lie in [0, 1)");
  if (!(cfg.steal_latency >= 0.0)) throw ConfigError("steal_latency must be non-negative");
  if (cfg.scheduler.name != "heft" && cfg.scheduler.name != "dada" && cfg.scheduler.name != "ws") {
    throw ConfigError("unknown scheduler '" + cfg.scheduler.name + "' (expected heft, dada or ws)");
  }
  try {
    cfg.scheduler.dada.validate();
    Platform::build(cfg.platform);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

TimingTable timing_table(const ExperimentConfig& cfg) {
  TimingTable t = default_timing_table(cfg.matrix.b, cfg.matrix.ib);
  for (const auto& [key, value] : cfg.timing_overrides) t[key] = value;
  return t;
}

}  // namespace hetsched
