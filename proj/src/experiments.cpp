#include "topobus/experiments.hpp"

#include "topobus/csv.hpp"
#include "topobus/protocol.hpp"
#include "topobus/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace topobus::cli {

namespace {

using nlohmann::ordered_json;
using qsim::complex;

OutputFormat effective_format(const std::string& subcommand, const RunConfig& cfg) {
  const bool trace_experiment = subcommand == "entangle" || subcommand == "teleport";
  if (cfg.format) {
    if (trace_experiment && *cfg.format == OutputFormat::csv) {
      throw std::invalid_argument(subcommand + " emits a protocol trace; format must be json");
    }
    return *cfg.format;
  }
  return trace_experiment ? OutputFormat::json : OutputFormat::csv;
}

std::vector<std::pair<std::string, std::string>> metadata(const std::string& subcommand,
                                                          const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("tool", std::string("topobus ") + kToolVersion);
  meta.emplace_back("experiment", subcommand);
  meta.emplace_back("seed", std::to_string(cfg.seed));
  for (auto& [key, value] : cfg.echo()) meta.emplace_back("config." + key, value);
  return meta;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  }
  return out;
}

std::string render_table(const std::string& subcommand, const RunConfig& cfg,
                         io::CsvDocument doc) {
  auto meta = metadata(subcommand, cfg);
  meta.insert(meta.end(), doc.metadata.begin(), doc.metadata.end());
  doc.metadata = std::move(meta);
  if (effective_format(subcommand, cfg) == OutputFormat::csv) {
    return io::write_csv(doc);
  }
  ordered_json j;
  for (auto& [key, value] : doc.metadata) j["meta"][key] = value;
  j["columns"] = doc.header;
  j["rows"] = doc.rows;
  return j.dump(2) + "\n";
}

std::string render_trace(const std::string& subcommand, const RunConfig& cfg,
                         ordered_json trace_doc, const ordered_json& extra) {
  effective_format(subcommand, cfg);  // validates csv rejection
  ordered_json meta;
  for (auto& [key, value] : metadata(subcommand, cfg)) meta[key] = value;
  ordered_json out;
  out["meta"] = meta;
  for (auto& [key, value] : trace_doc.items()) out[key] = value;
  for (const auto& [key, value] : extra.items()) out[key] = value;
  return out.dump(2) + "\n";
}

std::pair<complex, complex> to_pair(const std::array<double, 4>& a) {
  return {complex(a[0], a[1]), complex(a[2], a[3])};
}

// ---------------------------------------------------------------------------

std::string wire_spectrum(const RunConfig& cfg) {
  const wire::BdGSpectrum s = wire::diagonalize(wire::build_bdg_hamiltonian(cfg.wire));
  io::CsvDocument doc;
  doc.metadata.emplace_back("gap", io::format_double(s.gap));
  doc.metadata.emplace_back("zero_mode_splitting", io::format_double(s.zero_mode_splitting));
  doc.header = {"index", "energy"};
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    doc.rows.push_back({static_cast<double>(k), s.eigenvalues[k]});
  }
  return render_table("wire-spectrum", cfg, std::move(doc));
}

std::string phase_diagram(const RunConfig& cfg) {
  const auto mu = linspace(cfg.scan.mu_min, cfg.scan.mu_max, cfg.scan.mu_points);
  const auto vx = linspace(cfg.scan.vx_min, cfg.scan.vx_max, cfg.scan.vx_points);
  const auto points = wire::phase_diagram_scan(cfg.wire, mu, vx);
  io::CsvDocument doc;
  doc.header = {"mu", "vx", "gap", "is_topological"};
  for (const auto& p : points) {
    doc.rows.push_back({p.mu, p.v_x, p.gap, p.is_topological ? 1.0 : 0.0});
  }
  return render_table("phase-diagram", cfg, std::move(doc));
}

std::string majorana_splitting(const RunConfig& cfg) {
  const auto samples = wire::zero_mode_splitting_vs_length(cfg.wire, cfg.scan.lengths);
  io::CsvDocument doc;
  doc.header = {"length", "splitting"};
  for (const auto& [length, energy] : samples) doc.rows.push_back({length, energy});
  if (samples.size() >= 3) {
    const auto fit = wire::coherence_length_fit(samples);
    doc.metadata.emplace_back("xi_fit", io::format_double(fit.xi));
    doc.metadata.emplace_back("r_squared", io::format_double(fit.r_squared));
  }
  return render_table("majorana-splitting", cfg, std::move(doc));
}

std::string flux_potential(const RunConfig& cfg) {
  const auto phis = linspace(-std::numbers::pi, std::numbers::pi, cfg.scan.phi_points);
  io::CsvDocument doc;
  doc.header = {"phi1", "phi2", "u_over_ej"};
  for (double p1 : phis) {
    for (double p2 : phis) {
      doc.rows.push_back({p1, p2, flux::josephson_potential(p1, p2, cfg.flux)});
    }
  }
  return render_table("flux-potential", cfg, std::move(doc));
}

std::string flux_splitting(const RunConfig& cfg) {
  const flux::TunnelingResult wkb = flux::wkb_tunneling_amplitude(cfg.flux);
  io::CsvDocument doc;
  doc.metadata.emplace_back("delta0", io::format_double(wkb.delta0));
  doc.metadata.emplace_back("phi_star", io::format_double(wkb.phi_star));
  doc.metadata.emplace_back("wkb_action", io::format_double(wkb.action));
  doc.header = {"q_ext", "splitting_np0", "splitting_np1"};
  for (double q : linspace(0.0, cfg.scan.q_max, cfg.scan.q_points)) {
    doc.rows.push_back({q, flux::flux_qubit_splitting(wkb, {0, q}),
                        flux::flux_qubit_splitting(wkb, {1, q})});
  }
  return render_table("flux-splitting", cfg, std::move(doc));
}

std::string entangle(const RunConfig& cfg) {
  const auto layout = bus::DeviceLayout::reference_device(cfg.flux);
  Rng rng(cfg.seed);
  const auto result = bus::entangle_pair(layout, 1, to_pair(cfg.protocol.psi_t),
                                         to_pair(cfg.protocol.psi_c), rng);
  ordered_json extra;
  extra["concurrence"] = result.concurrence;
  return render_trace("entangle", cfg,
                      bus::trace_json(layout, cfg.seed, result.trace, result.state, std::nullopt),
                      extra);
}

std::string teleport(const RunConfig& cfg) {
  const auto layout = bus::DeviceLayout::reference_device(cfg.flux);
  int source = cfg.protocol.direction == "t_to_c" ? 1 : 2;
  int target = cfg.protocol.direction == "t_to_c" ? 3 : 0;
  if (cfg.protocol.source) source = *cfg.protocol.source;
  if (cfg.protocol.target) target = *cfg.protocol.target;

  bus::TeleportOptions options;
  options.resource_mode = cfg.protocol.resource_mode;
  options.q_ext = cfg.q_ext;
  Rng rng(cfg.seed);
  const auto result =
      bus::teleport(layout, source, target, to_pair(cfg.protocol.input), rng, options);
  ordered_json extra;
  extra["bell_mu"] = result.bell_mu;
  extra["output_qubit"] = {{result.output_qubit.first.real(), result.output_qubit.first.imag()},
                           {result.output_qubit.second.real(), result.output_qubit.second.imag()}};
  return render_trace(
      "teleport", cfg,
      bus::trace_json(layout, cfg.seed, result.trace, result.final_state, result.fidelity),
      extra);
}

std::string bell_stats(const RunConfig& cfg) {
  auto layout = bus::DeviceLayout::reference_device(cfg.flux);
  layout = bus::set_coupling(layout, 1, true);
  const auto& pair = layout.interferometer(1).pair;

  std::vector<std::pair<complex, complex>> qubit_states(layout.qubits.size(), {1.0, 0.0});
  qubit_states[pair.first] = to_pair(cfg.protocol.psi_t);
  qubit_states[pair.second] = to_pair(cfg.protocol.psi_c);
  const qsim::StateVector state = qsim::StateVector::product(qubit_states);

  const auto branches = qsim::bell_branches(state, pair.first, pair.second);
  std::array<long, 4> counts{};
  Rng rng(cfg.seed);
  bus::ProtocolTrace scratch;
  for (int shot = 0; shot < cfg.protocol.shots; ++shot) {
    Rng stream = rng.split(static_cast<std::uint64_t>(shot));
    scratch.steps.clear();
    const auto outcome =
        bus::bell_measurement_via_device(layout, 1, state, stream, scratch, cfg.q_ext);
    counts[outcome.mu] += 1;
  }

  io::CsvDocument doc;
  doc.header = {"mu", "count", "frequency", "born_probability"};
  for (int mu = 0; mu < 4; ++mu) {
    doc.rows.push_back({static_cast<double>(mu), static_cast<double>(counts[mu]),
                        static_cast<double>(counts[mu]) / cfg.protocol.shots,
                        branches[mu].probability});
  }
  return render_table("bell-stats", cfg, std::move(doc));
}

}  // namespace

std::string render_experiment(const std::string& subcommand, const RunConfig& cfg) {
  if (!cfg.experiment.empty() && cfg.experiment != subcommand) {
    throw std::invalid_argument("config names experiment '" + cfg.experiment +
                                "' but subcommand is '" + subcommand + "'");
  }
  if (subcommand == "wire-spectrum") return wire_spectrum(cfg);
  if (subcommand == "phase-diagram") return phase_diagram(cfg);
  if (subcommand == "majorana-splitting") return majorana_splitting(cfg);
  if (subcommand == "flux-potential") return flux_potential(cfg);
  if (subcommand == "flux-splitting") return flux_splitting(cfg);
  if (subcommand == "entangle") return entangle(cfg);
  if (subcommand == "teleport") return teleport(cfg);
  if (subcommand == "bell-stats") return bell_stats(cfg);
  throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
}

std::string default_output_name(const std::string& subcommand, const RunConfig& cfg) {
  return subcommand + (effective_format(subcommand, cfg) == OutputFormat::csv ? ".csv" : ".json");
}

int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& err) {
  try {
    const std::string content = render_experiment(subcommand, cfg);
    const std::string path =
        cfg.out_path.empty() ? default_output_name(subcommand, cfg) : cfg.out_path;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      err << "error: cannot open output file '" << path << "'\n";
      return 2;
    }
    out << content;
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace topobus::cli
