#include "ipose/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ipose/error.hpp"

namespace ipose {

double round_half_up(double value, int decimals) {
  const double f = std::pow(10.0, decimals);
  const double scaled = value * f;
  const double nudge = 1e-9 * std::max(1.0, std::abs(scaled));
  const double r = scaled >= 0 ? std::floor(scaled + 0.5 + nudge) : -std::floor(-scaled + 0.5 + nudge);
  return r / f;
}

std::vector<AblationRow> ablation_report(const std::vector<AblationInput>& rows) {
  std::vector<AblationRow> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double v = rows[i].mpjpe;
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw InvalidInput("ablation row " + std::to_string(i) + " has non-positive MPJPE");
    }
    AblationRow row{rows[i].description, v, std::nullopt};
    if (i > 0) {
      const double prev = rows[i - 1].mpjpe;
      row.relative_improvement = round_half_up((prev - v) / prev * 100.0, 1);
    }
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string out = "description,mpjpe_mm,relative_improvement_pct\n";
  char buf[64];
  for (const auto& r : rows) {
    out += csv_field(r.description);
    std::snprintf(buf, sizeof buf, ",%.10g,", r.mpjpe);
    out += buf;
    if (r.relative_improvement) {
      std::snprintf(buf, sizeof buf, "%.1f", *r.relative_improvement);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace ipose
