#pragma once

#include "topobus/flux_qubit.hpp"
#include "topobus/protocol.hpp"
#include "topobus/wire.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace topobus::cli {

enum class OutputFormat { csv, json };

struct ProtocolConfig {
  std::string direction = "t_to_c";     ///< or "c_to_t"; explicit source/target win
  std::optional<int> source;
  std::optional<int> target;
  bus::ResourceMode resource_mode = bus::ResourceMode::measured;
  int shots = 10000;
  std::array<double, 4> input{1, 0, 0, 0};  ///< re/im alpha, re/im beta
  std::array<double, 4> psi_t{1.0 / 1.4142135623730951, 0, 1.0 / 1.4142135623730951, 0};
  std::array<double, 4> psi_c{1.0 / 1.4142135623730951, 0, 1.0 / 1.4142135623730951, 0};
};

struct ScanConfig {
  double mu_min = 0.0, mu_max = 1.0;
  int mu_points = 5;
  double vx_min = 0.2, vx_max = 2.0;
  int vx_points = 10;
  std::vector<double> lengths{80, 120, 160, 200};
  int phi_points = 41;      ///< per axis, landscape raster over [-pi, pi]^2
  double q_max = 2.0;       ///< gate-charge sweep upper end, units of e
  int q_points = 81;
};

/// Fully validated run description. Wire parameters are already reduced to
/// the internal t = 1, a = 1 system when the config was in physical units.
struct RunConfig {
  std::string experiment;  ///< empty means "take the CLI subcommand"
  wire::WireParameters wire{0.5, 0.0, 0.5, 1.0, 0.5, 200.0, 200};
  flux::FluxQubitParameters flux{1.0, 1.25, 0.1, 0.5, 1.0};
  double q_ext = 0.0;  ///< units of e
  ProtocolConfig protocol;
  ScanConfig scan;
  std::string out_path;  ///< empty means "<experiment>.<ext>"
  std::uint64_t seed = 0;
  std::optional<OutputFormat> format;  ///< default depends on the experiment

  /// Canonical key = value echo of every setting after defaulting and unit
  /// reduction; emitted verbatim in output metadata.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Parses the key-value config grammar:
///
///   # comment (anywhere; rest of line)
///   [section]              sections: run, wire, flux, protocol, scan
///   key = value            numbers may carry a unit suffix in physical mode
///
/// Accepted suffixes: meV, ueV (or the micro sign), GHz, T, nm, and meV*nm
/// for the spin-orbit strength. [wire] units = physical converts to the
/// reduced t = 1, a = 1 system; units = raw (default) forbids suffixes.
/// Errors carry line/column positions; unknown keys list the valid ones.
RunConfig parse_config(std::string_view text);

}  // namespace topobus::cli
