#pragma once

#include "chemolab/model.hpp"
#include "chemolab/solver.hpp"

#include "json.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace chemolab {

/// Invalid configuration; the message starts with the offending key path.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class InitialKind { constant, cosine_bump, gaussian, file };

/// Closed-form or file-backed initial field, sampled at cell centers.
///   constant:    value
///   cosine_bump: base + amplitude * prod_i cos(modes_i * pi * x_i / L_i)
///   gaussian:    floor + amplitude * exp(-|x - center|^2 / (2 width^2))
///   file:        raw little-endian float64 cell array, x index fastest
struct InitialSpec {
  InitialKind kind{InitialKind::constant};
  double value{0};
  double base{0};
  double amplitude{0};
  std::array<int, 3> modes{0, 0, 0};
  std::array<double, 3> center{0, 0, 0};
  double width{1};
  double floor{0};
  std::filesystem::path path;
};

struct ScenarioConfig {
  ModelParamsd params;
  Gridd grid;
  InitialSpec u0, v0, w0;
  double t_end{1};
  double dt_max{0};
  double cfl_safety{0.5};
  double output_every{0};
  Advection scheme{Advection::central};
  double blowup_linf{1e8};
  std::optional<double> weight_p;
  std::optional<double> weight_eps;

  SchemeOptionsd scheme_options() const { return {scheme, dt_max, cfl_safety, blowup_linf}; }
};

/// Reads and validates a JSON config. Duplicate and unknown keys are rejected;
/// relative file paths resolve against the config's directory.
ScenarioConfig parse_config(const std::filesystem::path& path);

ScenarioConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});

ScenarioConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Fully resolved config (defaults applied) in the same schema parse_config accepts.
nlohmann::json config_to_json(const ScenarioConfig& cfg);

/// Same scenario with every grid axis refined by `factor`.
ScenarioConfig refined(const ScenarioConfig& cfg, int factor);

Fieldd materialize(const InitialSpec& spec, const Gridd& grid);

const char* to_string(Advection a);

}  // namespace chemolab
