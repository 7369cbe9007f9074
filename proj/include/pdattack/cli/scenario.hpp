#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdattack/attacks/engine.hpp"
#include "pdattack/ncs/config.hpp"
#include "pdattack/ncs/plant.hpp"

namespace pdattack::cli {

/// Invalid scenario document; the message names the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AttackSpec {
  std::string name;
  AttackVariant variant = AttackVariant::TpdaNominal;
  Mat Q;
  Mat Z;
  Mat F_a0;
  Vec aux0;
  // delay-induced engine only; defaults Z1 = Z, P1 = Lyapunov solution,
  // P4 = 0.01·I
  std::optional<Mat> Z1;
  std::optional<Mat> P1;
  std::optional<Mat> P4;
};

struct CalibrationSpec {
  std::size_t n_runs = 500;
  double settle = 5.0;
};

struct CheckIcSpec {
  Mat M;
  Vec x0;
  std::optional<Mat> X;
  std::optional<Mat> J;
  double reconstruction_tolerance = 1e-6;
};

struct OmegaSpec {
  Mat A, B, K, P1, P2, P3, P4;
  double h = 0.0;
};

struct Scenario {
  std::optional<PlantModel> plant;
  std::optional<NominalModel> nominal;
  std::vector<AttackSpec> attacks;
  SimConfig sim;
  NoiseConfig noise;
  DetectorConfig detector;
  /// Present when the detector threshold is to be calibrated before use.
  /// Calibration runs reuse sim and noise without the attack.
  std::optional<CalibrationSpec> calibration;
  std::optional<CheckIcSpec> check_ic;
  std::optional<OmegaSpec> omega;
  std::size_t csv_stride = 1;
};

/// Names accepted in the "preset" field.
std::vector<std::string> preset_names();
/// Full JSON document of a preset. Throws ConfigError for unknown names.
nlohmann::json preset(const std::string& name);

/// Expands "preset" (the document is merge-patched onto it) and returns the
/// resulting document.
nlohmann::json resolve(const nlohmann::json& doc);

/// Validates and converts a resolved document. Unknown keys are rejected.
Scenario parse_scenario(const nlohmann::json& doc);

/// Reads, resolves and parses a config file. Throws ConfigError for
/// malformed content and std::ios_base::failure when unreadable.
Scenario load_scenario(const std::string& path);

/// Builds the attack engine for a spec against the scenario's plant and
/// nominal model.
AttackEngine build_engine(const Scenario& scenario, const AttackSpec& spec);

std::optional<AttackVariant> parse_variant(std::string_view name);

}  // namespace pdattack::cli
