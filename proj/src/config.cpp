#include "topobus/config.hpp"

#include "topobus/constants.hpp"
#include "topobus/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace topobus::cli {

namespace {

struct RawValue {
  std::string text;
  int line = 0;
  int column = 0;
};

using Section = std::map<std::string, RawValue>;

[[noreturn]] void fail(int line, int column, const std::string& message) {
  std::ostringstream msg;
  msg << "config error at line " << line << ", column " << column << ": " << message;
  throw std::invalid_argument(msg.str());
}

[[noreturn]] void fail(const RawValue& v, const std::string& message) {
  fail(v.line, v.column, message);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    // allow comma-separated lists
    std::string cleaned;
    for (char c : tok) {
      if (c == ',') {
        if (!cleaned.empty()) out.push_back(std::exchange(cleaned, {}));
      } else {
        cleaned.push_back(c);
      }
    }
    if (!cleaned.empty()) out.push_back(cleaned);
  }
  return out;
}

const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s = {
      {"run", {"experiment", "out", "seed", "format"}},
      {"wire",
       {"units", "num_sites", "length", "effective_mass", "chemical_potential", "rashba",
        "zeeman", "pairing", "g_factor", "b_field"}},
      {"flux", {"ej", "ej2", "ec", "external_flux", "attempt_frequency", "q_ext"}},
      {"protocol",
       {"direction", "source", "target", "resource_mode", "shots", "input", "psi_t", "psi_c"}},
      {"scan",
       {"mu_min", "mu_max", "mu_points", "vx_min", "vx_max", "vx_points", "lengths",
        "phi_points", "q_max", "q_points"}},
  };
  return s;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ", ";
    out += item;
  }
  return out;
}

// Dimensions a numeric value may carry. Energies are reduced to meV, lengths
// to nm, frequencies to GHz, fields to tesla.
enum class Dim { none, energy, length, field, frequency, rashba };

double unit_factor(const std::string& unit, Dim dim, const RawValue& v) {
  const bool micro = unit == "ueV" || unit == "µeV" || unit == "μeV";
  switch (dim) {
    case Dim::energy:
      if (unit == "meV") return 1.0;
      if (micro) return 1e-3;
      if (unit == "GHz") return constants::kPlanckMeVPerGHz;
      break;
    case Dim::length:
      if (unit == "nm") return 1.0;
      break;
    case Dim::field:
      if (unit == "T") return 1.0;
      break;
    case Dim::frequency:
      if (unit == "GHz") return 1.0;
      break;
    case Dim::rashba:
      if (unit == "meV*nm") return 1.0;
      break;
    case Dim::none:
      break;
  }
  fail(v, "unit '" + unit + "' is not valid for this field");
}

struct NumberParser {
  bool physical_units = false;

  double number(const RawValue& v, Dim dim) const {
    const auto toks = tokens(v.text);
    if (toks.empty()) fail(v, "expected a number");
    double value = 0.0;
    const auto& t = toks[0];
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
      fail(v, "'" + t + "' is not a number");
    }
    if (toks.size() == 1) return value;
    if (toks.size() > 2) fail(v, "expected 'number [unit]'");
    if (!physical_units) {
      fail(v, "unit suffix '" + toks[1] + "' requires [wire] units = physical");
    }
    return value * unit_factor(toks[1], dim, v);
  }

  long integer(const RawValue& v) const {
    const auto toks = tokens(v.text);
    long value = 0;
    if (toks.size() != 1 ||
        std::from_chars(toks[0].data(), toks[0].data() + toks[0].size(), value).ptr !=
            toks[0].data() + toks[0].size()) {
      fail(v, "expected an integer");
    }
    return value;
  }

  std::vector<double> number_list(const RawValue& v) const {
    const auto toks = tokens(v.text);
    if (toks.empty()) fail(v, "expected a list of numbers");
    std::vector<double> out;
    for (const auto& t : toks) {
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
      if (ec != std::errc{} || ptr != t.data() + t.size()) {
        fail(v, "'" + t + "' is not a number");
      }
      out.push_back(value);
    }
    return out;
  }

  std::string word(const RawValue& v, const std::vector<std::string>& allowed) const {
    const auto toks = tokens(v.text);
    if (toks.size() != 1 ||
        std::find(allowed.begin(), allowed.end(), toks[0]) == allowed.end()) {
      fail(v, "expected one of {" + join(allowed) + "}");
    }
    return toks[0];
  }
};

std::array<double, 4> qubit_amplitudes(const NumberParser& np, const RawValue& v) {
  const auto values = np.number_list(v);
  if (values.size() != 4) {
    fail(v, "expected 4 numbers: re(alpha) im(alpha) re(beta) im(beta)");
  }
  std::array<double, 4> out{};
  std::copy(values.begin(), values.end(), out.begin());
  const double norm = std::sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2] +
                                out[3] * out[3]);
  if (std::abs(norm - 1.0) > 1e-8) {
    fail(v, "qubit amplitudes must be normalized (norm = " + io::format_double(norm) + ")");
  }
  return out;
}

const std::vector<std::string> kExperiments = {
    "wire-spectrum", "phase-diagram", "majorana-splitting", "flux-potential",
    "flux-splitting", "entangle",     "teleport",           "bell-stats"};

}  // namespace

RunConfig parse_config(std::string_view text) {
  std::map<std::string, Section> sections;
  std::string current;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string_view raw_line =
        text.substr(start, end == std::string_view::npos ? text.size() - start : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    std::string_view line = raw_line;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, 1, "unterminated section header");
      std::string name(trim(line.substr(1, line.size() - 2)));
      if (!schema().contains(name)) {
        std::vector<std::string> names;
        for (const auto& [s, _] : schema()) names.push_back(s);
        fail(line_no, 1, "unknown section [" + name + "]; valid sections: " + join(names));
      }
      current = name;
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, 1, "expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail(line_no, 1, "empty key");
    if (current.empty()) fail(line_no, 1, "key '" + key + "' appears before any [section]");
    const auto& valid = schema().at(current);
    if (std::find(valid.begin(), valid.end(), key) == valid.end()) {
      fail(line_no, 1,
           "unknown key '" + key + "' in [" + current + "]; valid keys: " + join(valid));
    }
    const int column = static_cast<int>(raw_line.find('=') + 2);
    if (sections[current].contains(key)) fail(line_no, 1, "duplicate key '" + key + "'");
    sections[current][key] = RawValue{value, line_no, column};
  }

  RunConfig cfg;
  auto get = [&](const std::string& section, const std::string& key) -> const RawValue* {
    const auto sec = sections.find(section);
    if (sec == sections.end()) return nullptr;
    const auto it = sec->second.find(key);
    return it == sec->second.end() ? nullptr : &it->second;
  };

  // [wire] -- parse units first, everything else in declared units.
  NumberParser raw_np{false};
  bool physical = false;
  if (const auto* v = get("wire", "units")) {
    physical = raw_np.word(*v, {"raw", "physical"}) == "physical";
  }
  NumberParser np{physical};

  if (const auto* v = get("wire", "num_sites")) cfg.wire.num_sites = static_cast<int>(np.integer(*v));
  if (const auto* v = get("wire", "length")) cfg.wire.length = np.number(*v, Dim::length);
  else if (physical) fail(1, 1, "[wire] units = physical requires an explicit length");
  if (const auto* v = get("wire", "effective_mass")) cfg.wire.effective_mass = np.number(*v, Dim::none);
  if (const auto* v = get("wire", "chemical_potential")) cfg.wire.chemical_potential = np.number(*v, Dim::energy);
  if (const auto* v = get("wire", "rashba")) cfg.wire.rashba = np.number(*v, Dim::rashba);
  if (const auto* v = get("wire", "pairing")) cfg.wire.pairing = np.number(*v, Dim::energy);

  const auto* zeeman = get("wire", "zeeman");
  const auto* g_factor = get("wire", "g_factor");
  const auto* b_field = get("wire", "b_field");
  if (zeeman && (g_factor || b_field)) {
    fail(*zeeman, "give either zeeman or the g_factor/b_field pair, not both");
  }
  if ((g_factor != nullptr) != (b_field != nullptr)) {
    fail(g_factor ? *g_factor : *b_field, "g_factor and b_field must be given together");
  }
  if (zeeman) cfg.wire.zeeman = np.number(*zeeman, Dim::energy);
  if (g_factor) {
    if (!physical) fail(*g_factor, "g_factor/b_field require [wire] units = physical");
    cfg.wire.zeeman =
        wire::zeeman_splitting(np.number(*g_factor, Dim::none), np.number(*b_field, Dim::field));
  }

  if (physical) {
    // Reduce to t = 1, a = 1: energies in units of the hopping, lengths in
    // units of the spacing.
    if (cfg.wire.num_sites < 2) fail(1, 1, "num_sites must be >= 2");
    const double a = cfg.wire.length / cfg.wire.num_sites;
    const double t = constants::kHbar2Over2MeMeVnm2 / (cfg.wire.effective_mass * a * a);
    cfg.wire.chemical_potential /= t;
    cfg.wire.zeeman /= t;
    cfg.wire.pairing /= t;
    cfg.wire.rashba /= t * a;
    cfg.wire.length = cfg.wire.num_sites;
    cfg.wire.effective_mass = 0.5;
  }

  // [flux]
  if (const auto* v = get("flux", "ej")) cfg.flux.ej = np.number(*v, Dim::energy);
  if (const auto* v = get("flux", "ej2")) cfg.flux.ej2 = np.number(*v, Dim::energy);
  if (const auto* v = get("flux", "ec")) cfg.flux.ec = np.number(*v, Dim::energy);
  if (const auto* v = get("flux", "external_flux")) cfg.flux.external_flux = np.number(*v, Dim::none);
  if (const auto* v = get("flux", "attempt_frequency")) cfg.flux.attempt_frequency = np.number(*v, Dim::frequency);
  if (const auto* v = get("flux", "q_ext")) cfg.q_ext = np.number(*v, Dim::none);

  // [protocol]
  if (const auto* v = get("protocol", "direction")) cfg.protocol.direction = np.word(*v, {"t_to_c", "c_to_t"});
  if (const auto* v = get("protocol", "source")) cfg.protocol.source = static_cast<int>(np.integer(*v));
  if (const auto* v = get("protocol", "target")) cfg.protocol.target = static_cast<int>(np.integer(*v));
  if (const auto* v = get("protocol", "resource_mode")) {
    cfg.protocol.resource_mode = np.word(*v, {"measured", "injected"}) == "measured"
                                     ? bus::ResourceMode::measured
                                     : bus::ResourceMode::injected;
  }
  if (const auto* v = get("protocol", "shots")) {
    cfg.protocol.shots = static_cast<int>(np.integer(*v));
    if (cfg.protocol.shots < 1) fail(*v, "shots must be >= 1");
  }
  if (const auto* v = get("protocol", "input")) cfg.protocol.input = qubit_amplitudes(np, *v);
  if (const auto* v = get("protocol", "psi_t")) cfg.protocol.psi_t = qubit_amplitudes(np, *v);
  if (const auto* v = get("protocol", "psi_c")) cfg.protocol.psi_c = qubit_amplitudes(np, *v);

  // [scan]
  if (const auto* v = get("scan", "mu_min")) cfg.scan.mu_min = np.number(*v, Dim::energy);
  if (const auto* v = get("scan", "mu_max")) cfg.scan.mu_max = np.number(*v, Dim::energy);
  if (const auto* v = get("scan", "mu_points")) cfg.scan.mu_points = static_cast<int>(np.integer(*v));
  if (const auto* v = get("scan", "vx_min")) cfg.scan.vx_min = np.number(*v, Dim::energy);
  if (const auto* v = get("scan", "vx_max")) cfg.scan.vx_max = np.number(*v, Dim::energy);
  if (const auto* v = get("scan", "vx_points")) cfg.scan.vx_points = static_cast<int>(np.integer(*v));
  if (const auto* v = get("scan", "lengths")) cfg.scan.lengths = np.number_list(*v);
  if (const auto* v = get("scan", "phi_points")) cfg.scan.phi_points = static_cast<int>(np.integer(*v));
  if (const auto* v = get("scan", "q_max")) cfg.scan.q_max = np.number(*v, Dim::none);
  if (const auto* v = get("scan", "q_points")) cfg.scan.q_points = static_cast<int>(np.integer(*v));
  for (const char* key : {"mu_points", "vx_points", "phi_points", "q_points"}) {
    const int value = key == std::string("mu_points")   ? cfg.scan.mu_points
                      : key == std::string("vx_points")  ? cfg.scan.vx_points
                      : key == std::string("phi_points") ? cfg.scan.phi_points
                                                         : cfg.scan.q_points;
    if (value < 1) {
      const auto* v = get("scan", key);
      fail(v ? *v : RawValue{"", 1, 1}, std::string(key) + " must be >= 1");
    }
  }

  // [run]
  if (const auto* v = get("run", "experiment")) cfg.experiment = np.word(*v, kExperiments);
  if (const auto* v = get("run", "out")) cfg.out_path = v->text;
  if (const auto* v = get("run", "seed")) {
    const long s = np.integer(*v);
    if (s < 0) fail(*v, "seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (const auto* v = get("run", "format")) {
    cfg.format = np.word(*v, {"csv", "json"}) == "csv" ? OutputFormat::csv : OutputFormat::json;
  }

  // Physical-parameter validation; exceptions already name the field.
  cfg.wire.validate();
  cfg.flux.validate();
  return cfg;
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  using io::format_double;
  std::vector<std::pair<std::string, std::string>> out;
  auto amp4 = [](const std::array<double, 4>& a) {
    return format_double(a[0]) + " " + format_double(a[1]) + " " + format_double(a[2]) + " " +
           format_double(a[3]);
  };
  out.emplace_back("wire.num_sites", std::to_string(wire.num_sites));
  out.emplace_back("wire.length", format_double(wire.length));
  out.emplace_back("wire.effective_mass", format_double(wire.effective_mass));
  out.emplace_back("wire.chemical_potential", format_double(wire.chemical_potential));
  out.emplace_back("wire.rashba", format_double(wire.rashba));
  out.emplace_back("wire.zeeman", format_double(wire.zeeman));
  out.emplace_back("wire.pairing", format_double(wire.pairing));
  out.emplace_back("wire.hopping", format_double(wire.hopping()));
  out.emplace_back("flux.ej", format_double(flux.ej));
  out.emplace_back("flux.ej2", format_double(flux.ej2));
  out.emplace_back("flux.ec", format_double(flux.ec));
  out.emplace_back("flux.external_flux", format_double(flux.external_flux));
  out.emplace_back("flux.attempt_frequency", format_double(flux.attempt_frequency));
  out.emplace_back("flux.q_ext", format_double(q_ext));
  out.emplace_back("protocol.direction", protocol.direction);
  if (protocol.source) out.emplace_back("protocol.source", std::to_string(*protocol.source));
  if (protocol.target) out.emplace_back("protocol.target", std::to_string(*protocol.target));
  out.emplace_back("protocol.resource_mode",
                   protocol.resource_mode == bus::ResourceMode::measured ? "measured" : "injected");
  out.emplace_back("protocol.shots", std::to_string(protocol.shots));
  out.emplace_back("protocol.input", amp4(protocol.input));
  out.emplace_back("protocol.psi_t", amp4(protocol.psi_t));
  out.emplace_back("protocol.psi_c", amp4(protocol.psi_c));
  out.emplace_back("scan.mu_min", format_double(scan.mu_min));
  out.emplace_back("scan.mu_max", format_double(scan.mu_max));
  out.emplace_back("scan.mu_points", std::to_string(scan.mu_points));
  out.emplace_back("scan.vx_min", format_double(scan.vx_min));
  out.emplace_back("scan.vx_max", format_double(scan.vx_max));
  out.emplace_back("scan.vx_points", std::to_string(scan.vx_points));
  {
    std::string lengths;
    for (double l : scan.lengths) {
      if (!lengths.empty()) lengths += " ";
      lengths += format_double(l);
    }
    out.emplace_back("scan.lengths", lengths);
  }
  out.emplace_back("scan.phi_points", std::to_string(scan.phi_points));
  out.emplace_back("scan.q_max", format_double(scan.q_max));
  out.emplace_back("scan.q_points", std::to_string(scan.q_points));
  return out;
}

}  // namespace topobus::cli
