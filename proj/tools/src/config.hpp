#pragma once

#include <optional>
#include <string>

#include "occtime/filippov.hpp"
#include "occtime/occupation.hpp"

namespace occtime::cli {

enum class SystemKind { two_valued, builtin_example, piecewise_affine };

/// Parsed system configuration file. Exactly one of `two_valued` or
/// (`system`, `noise`, `y0`) is meaningful, depending on kind.
struct SystemConfig {
  SystemKind kind = SystemKind::two_valued;
  TwoValuedDriftSpec two_valued;
  std::optional<FilippovSystem> system;
  NoiseSpec noise;
  VectorXd y0;
  /// Raw file text; the manifest hashes it.
  std::string text;

  bool is_filippov() const noexcept { return kind != SystemKind::two_valued; }
};

/// Throws Error{InvalidConfig} on malformed JSON, unknown keys or
/// inconsistent dimensions.
SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::string& path);

}  // namespace occtime::cli
