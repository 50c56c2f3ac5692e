#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ipose {

struct AblationInput {
  std::string description;
  double mpjpe = 0.0;
};

struct AblationRow {
  std::string description;
  double mpjpe = 0.0;
  /// (prev - curr) / prev * 100, rounded half-up to one decimal. Empty for the first row.
  std::optional<double> relative_improvement;
};

/// Rounds half away from zero at `decimals` places. A 1e-9 nudge absorbs
/// binary representation error so decimal ties such as 0.05 round up.
double round_half_up(double value, int decimals);

std::vector<AblationRow> ablation_report(const std::vector<AblationInput>& rows);

/// description,mpjpe_mm,relative_improvement_pct
std::string ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace ipose
