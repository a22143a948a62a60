#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "toomlab/bounds.hpp"
#include "toomlab/eroder.hpp"
#include "toomlab/lattice.hpp"
#include "toomlab/noise.hpp"
#include "toomlab/rule.hpp"

namespace toomlab::io {

using Json = nlohmann::ordered_json;

/// Rule file: {"dimension", "neighborhood", "table": hex} or with "plus_sets"
/// (lists of offset indices) in place of "table"; optional "name".
RuleSpec parse_rule(const Json& j);
RuleSpec load_rule_file(const std::filesystem::path& path);
/// A builtin name, or a path to a rule file.
RuleSpec resolve_rule(const std::string& name_or_path);
Json rule_to_json(const RuleSpec& rule);

/// {"kind": "symmetric", "eps"} | {"kind": "biased", "eps_plus", "eps_minus"}
/// | {"kind": "table", "p_plus": [2^R probabilities]}
NoiseModel parse_noise(const Json& j);
Json noise_to_json(const NoiseModel& noise);

Json rational_json(const Rational& q);
Json certificate_to_json(const ErosionCertificate& cert);
ErosionCertificate certificate_from_json(const Json& j);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Binary PPM (P6); `plus` is width * height row-major, white for +1.
std::string ppm_image(int width, int height, const std::vector<bool>& plus);
/// 2-D state as one frame.
std::string ppm_frame(const LatticeState& state);
/// 1-D states stacked as rows, time running downwards.
std::string ppm_strip(const std::vector<LatticeState>& history);

/// CSV body with a leading "# config: <json>" line and a fixed header.
class CsvWriter {
 public:
  CsvWriter(const Json& config, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  const std::string& str() const noexcept { return out_; }

 private:
  std::string out_;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace toomlab::io
