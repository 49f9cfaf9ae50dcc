// SPDX-License-Identifier: Apache-2.0
#include "rmshare/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "rmshare/errors.hpp"

namespace rmshare {

namespace {

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<double, std::string, bool, Array> data;
  int line = 0;
};

struct Entry {
  Value value;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

class Parser {
public:
  Parser(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  std::map<std::string, Section> parse() {
    std::map<std::string, Section> out;
    std::string section;
    while (skip_blank_lines(), pos_ < text_.size()) {
      if (peek() == '[') {
        ++pos_;
        section = read_bare_key();
        skip_inline_space();
        expect(']');
        if (out.count(section)) fail("duplicate section [" + section + "]");
        out[section];
        finish_line();
        continue;
      }
      const int key_line = line_;
      std::string key = read_bare_key();
      if (section.empty()) fail("key '" + key + "' outside of any section");
      skip_inline_space();
      expect('=');
      skip_inline_space();
      Value v = read_value();
      v.line = key_line;
      auto& sec = out[section];
      if (sec.count(key)) fail("duplicate key " + section + "." + key);
      sec[key] = Entry{std::move(v), false};
      finish_line();
    }
    return out;
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + what);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_inline_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }
  }

  // Whitespace, newlines and comments (used between array elements and between statements).
  void skip_blank_lines() {
    while (true) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      return;
    }
  }

  void finish_line() {
    skip_inline_space();
    skip_comment();
    if (pos_ < text_.size() && text_[pos_] != '\n') fail("unexpected trailing text");
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string read_bare_key() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  Value read_value() {
    const char c = peek();
    if (c == '"') return read_string();
    if (c == '[') return read_array();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return {true, line_};
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return {false, line_};
    }
    return read_number();
  }

  Value read_string() {
    ++pos_;
    std::string s;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\n') fail("unterminated string");
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      s.push_back(text_[pos_++]);
    }
    expect('"');
    return {s, line_};
  }

  Value read_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                   text_[pos_] == '-' || text_[pos_] == '+' || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string tok(text_.substr(start, pos_ - start));
    std::erase(tok, '_');
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) fail("invalid value '" + tok + "'");
    return {v, line_};
  }

  Value read_array() {
    const int start_line = line_;
    ++pos_;
    Array items;
    while (true) {
      skip_blank_lines();
      if (peek() == ']') {
        ++pos_;
        break;
      }
      if (pos_ >= text_.size()) fail("unterminated array");
      items.push_back(read_value());
      skip_blank_lines();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    return {items, start_line};
  }

  std::string_view text_;
  std::string source_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

class Reader {
public:
  Reader(std::map<std::string, Section> doc, std::string source) : doc_(std::move(doc)), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key, int line, const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + section + "." + key + ": " + what);
  }

  const Entry* find(const std::string& section, const std::string& key) {
    auto s = doc_.find(section);
    if (s == doc_.end()) return nullptr;
    auto e = s->second.find(key);
    if (e == s->second.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  const Entry& require(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) throw ConfigError(source_ + ": missing required key " + section + "." + key);
    return *e;
  }

  double number(const std::string& section, const std::string& key, const Value& v) const {
    if (const double* d = std::get_if<double>(&v.data)) return *d;
    fail(section, key, v.line, "expected a number");
  }

  double number(const std::string& section, const std::string& key, double fallback) {
    const Entry* e = find(section, key);
    return e ? number(section, key, e->value) : fallback;
  }

  double required_number(const std::string& section, const std::string& key) {
    return number(section, key, require(section, key).value);
  }

  long integer(const std::string& section, const std::string& key, long fallback) {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const double d = number(section, key, e->value);
    if (d != static_cast<double>(static_cast<long>(d))) fail(section, key, e->value.line, "expected an integer");
    return static_cast<long>(d);
  }

  std::string string(const std::string& section, const std::string& key, const std::string& fallback) {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (const std::string* s = std::get_if<std::string>(&e->value.data)) return *s;
    fail(section, key, e->value.line, "expected a string");
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (const bool* b = std::get_if<bool>(&e->value.data)) return *b;
    fail(section, key, e->value.line, "expected true or false");
  }

  std::vector<double> numbers(const std::string& section, const std::string& key, const Value& v) const {
    const Array* a = std::get_if<Array>(&v.data);
    if (!a) fail(section, key, v.line, "expected an array of numbers");
    std::vector<double> out;
    for (const Value& item : *a) out.push_back(number(section, key, item));
    return out;
  }

  std::vector<double> numbers(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    return e ? numbers(section, key, e->value) : std::vector<double>{};
  }

  std::vector<std::string> strings(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return {};
    const Array* a = std::get_if<Array>(&e->value.data);
    if (!a) fail(section, key, e->value.line, "expected an array of strings");
    std::vector<std::string> out;
    for (const Value& item : *a) {
      const std::string* s = std::get_if<std::string>(&item.data);
      if (!s) fail(section, key, e->value.line, "expected an array of strings");
      out.push_back(*s);
    }
    return out;
  }

  /// Array of fixed-width number tuples, e.g. positions [[x, y], ...].
  std::vector<std::vector<double>> tuples(const std::string& section, const std::string& key, std::size_t width,
                                          bool required) {
    const Entry* e = required ? &require(section, key) : find(section, key);
    if (!e) return {};
    const Array* a = std::get_if<Array>(&e->value.data);
    if (!a) fail(section, key, e->value.line, "expected an array of arrays");
    std::vector<std::vector<double>> out;
    for (const Value& item : *a) {
      auto row = numbers(section, key, item);
      if (row.size() != width) {
        fail(section, key, e->value.line, "each entry needs " + std::to_string(width) + " numbers");
      }
      out.push_back(std::move(row));
    }
    return out;
  }

  Position position(const std::string& section, const std::string& key) {
    const Entry& e = require(section, key);
    auto v = numbers(section, key, e.value);
    if (v.size() != 2) fail(section, key, e.value.line, "expected [x, y]");
    return {v[0], v[1]};
  }

  int line_of(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    return e ? e->value.line : 0;
  }

  void check_all_used() const {
    static const std::set<std::string> known{"topology", "limits", "field", "run", "map", "waveform", "sweep"};
    for (const auto& [name, sec] : doc_) {
      if (!known.count(name)) throw ConfigError(source_ + ": unknown section [" + name + "]");
      for (const auto& [key, entry] : sec) {
        if (!entry.used) fail(name, key, entry.value.line, "unknown key");
      }
    }
  }

private:
  std::map<std::string, Section> doc_;
  std::string source_;
};

// Re-throws a validation error with the line of the key it names, when the message starts with one.
[[noreturn]] void rethrow_with_line(const Error& err, Reader& reader, const std::string& source) {
  const std::string msg = err.what();
  const auto colon = msg.find(':');
  const auto dot = msg.find('.');
  if (colon != std::string::npos && dot != std::string::npos && dot < colon) {
    const int line = reader.line_of(msg.substr(0, dot), msg.substr(dot + 1, colon - dot - 1));
    if (line > 0) throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
  }
  throw ConfigError(source + ": " + msg);
}

} // namespace

ScenarioConfig parse_config(std::string_view text, const std::string& source) {
  Reader r(Parser(text, source).parse(), source);
  ScenarioConfig c;
  c.source = source;

  for (const auto& p : r.tuples("topology", "bs", 2, true)) c.topology.bs_positions.push_back({p[0], p[1]});
  for (const auto& p : r.tuples("topology", "radars", 2, true)) c.topology.radar_positions.push_back({p[0], p[1]});
  c.topology.user_position = r.position("topology", "user");
  c.topology.target_position = r.position("topology", "target");
  c.topology.user_antennas = static_cast<int>(r.integer("topology", "nc", 1));

  c.limits.p_cmax = r.required_number("limits", "p_cmax_w");
  c.limits.p_rmax = r.required_number("limits", "p_rmax_w");
  c.limits.p_csum = r.required_number("limits", "p_csum_w");
  c.limits.p_rsum = r.required_number("limits", "p_rsum_w");
  c.limits.r_req = r.required_number("limits", "r_req_bps_hz");
  c.limits.noise_power = dbm_to_watts(r.number("limits", "noise_dbm", -107.0));
  c.limits.pulses_per_cpi = static_cast<int>(r.integer("limits", "pulses_n", 256));
  c.limits.false_alarm_prob = r.number("limits", "pfa", 1e-4);

  c.radio.carrier_ghz = r.number("field", "carrier_ghz", c.radio.carrier_ghz);
  c.radio.target_rcs_m2 = r.number("field", "target_rcs_m2", c.radio.target_rcs_m2);
  c.field.reference_loss_db = r.number("field", "reference_loss_db", c.field.reference_loss_db);
  c.field.pathloss_exponent = r.number("field", "pathloss_exponent", c.field.pathloss_exponent);
  c.field.shadowing_sigma_db = r.number("field", "shadowing_sigma_db", 0.0);
  c.field.shadowing_seed = static_cast<std::uint64_t>(r.integer("field", "shadowing_seed", 0));
  for (const auto& s : r.tuples("field", "screens", 5, false)) c.field.screens.push_back({{s[0], s[1]}, {s[2], s[3]}, s[4]});
  c.antenna.theta_3db_deg = r.number("field", "theta_3db_deg", c.antenna.theta_3db_deg);
  c.antenna.peak_gain_dbi = r.number("field", "peak_gain_dbi", c.antenna.peak_gain_dbi);
  c.antenna.sidelobe_dbi = r.number("field", "sidelobe_dbi", c.antenna.sidelobe_dbi);

  c.run.seed = static_cast<std::uint64_t>(r.integer("run", "seed", 1));
  c.run.mc_samples = r.integer("run", "mc_samples", c.run.mc_samples);
  c.run.estimator = r.string("run", "estimator", c.run.estimator);
  c.run.workers = static_cast<int>(r.integer("run", "workers", 0));
  c.run.epsilon = r.number("run", "epsilon", c.run.epsilon);
  c.run.max_iter = static_cast<int>(r.integer("run", "max_iter", c.run.max_iter));
  c.run.step_w = r.number("run", "step_w", c.run.step_w);
  c.run.coupling_uses_num_bs = r.boolean("run", "coupling_uses_num_bs", false);

  c.map.sample_spacing_m = r.number("map", "sample_spacing_m", c.map.sample_spacing_m);
  c.map.cell_m = r.number("map", "cell_m", c.map.cell_m);
  c.map.margin_m = r.number("map", "margin_m", c.map.margin_m);
  c.map.dataset = r.string("map", "dataset", "");

  c.waveform.pulse_duration_s = r.number("waveform", "pulse_duration_us", 2.0) * 1e-6;
  c.waveform.bandwidth_hz = r.number("waveform", "bandwidth_mhz", 5.0) * 1e6;

  c.sweep.rreq = r.numbers("sweep", "rreq");
  c.sweep.schemes = r.strings("sweep", "schemes");
  c.sweep.pcsum_w = r.numbers("sweep", "pcsum_w");
  c.sweep.prsum_w = r.numbers("sweep", "prsum_w");
  c.sweep.beamwidths_deg = r.numbers("sweep", "beamwidths_deg");
  for (double ns : r.numbers("sweep", "delay_errors_ns")) c.sweep.delay_errors_s.push_back(ns * 1e-9);
  c.sweep.doppler_errors_hz = r.numbers("sweep", "doppler_errors_hz");
  c.sweep.placements = static_cast<int>(r.integer("sweep", "placements", c.sweep.placements));

  r.check_all_used();

  try {
    validate_topology(c.topology);
    validate_limits(c.limits);
    validate_field(c.field);
  } catch (const Error& e) {
    rethrow_with_line(e, r, source);
  }
  auto check = [&](bool ok, const char* section, const char* key, const char* what) {
    if (!ok) throw ConfigError(source + ":" + std::to_string(r.line_of(section, key)) + ": " + section + "." + key + ": " + what);
  };
  check(c.radio.carrier_ghz > 0.0, "field", "carrier_ghz", "must be positive");
  check(c.radio.target_rcs_m2 > 0.0, "field", "target_rcs_m2", "must be positive");
  check(c.antenna.theta_3db_deg > 0.0, "field", "theta_3db_deg", "must be positive");
  check(c.run.mc_samples > 0, "run", "mc_samples", "must be positive");
  check(c.run.estimator == "truth" || c.run.estimator == "grid" || c.run.estimator == "curvefit", "run", "estimator",
        "must be one of truth, grid, curvefit");
  check(c.run.workers >= 0, "run", "workers", "must be >= 0");
  check(c.run.epsilon > 0.0, "run", "epsilon", "must be positive");
  check(c.run.max_iter > 0, "run", "max_iter", "must be positive");
  check(c.run.step_w > 0.0, "run", "step_w", "must be positive");
  check(c.map.sample_spacing_m > 0.0, "map", "sample_spacing_m", "must be positive");
  check(c.map.cell_m > 0.0, "map", "cell_m", "must be positive");
  check(c.map.margin_m >= 0.0, "map", "margin_m", "must be >= 0");
  check(c.waveform.pulse_duration_s > 0.0, "waveform", "pulse_duration_us", "must be positive");
  check(c.waveform.bandwidth_hz > 0.0, "waveform", "bandwidth_mhz", "must be positive");
  check(c.sweep.placements > 0, "sweep", "placements", "must be positive");
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ScenarioConfig c = parse_config(ss.str(), path.string());
  // Relative dataset paths resolve against the config file's directory.
  if (!c.map.dataset.empty() && std::filesystem::path(c.map.dataset).is_relative()) {
    c.map.dataset = (path.parent_path() / c.map.dataset).string();
  }
  return c;
}

} // namespace rmshare
