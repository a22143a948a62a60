#include "toomlab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "toomlab/error.hpp"

namespace toomlab::io {

namespace fs = std::filesystem;

namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(std::string("unknown field '") + it.key() + "' in " + what);
  }
}

template <class T>
T get_field(const Json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw ConfigError(std::string(what) + " is missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(what) + " field '" + key + "' has the wrong type");
  }
}

}  // namespace

RuleSpec parse_rule(const Json& j) {
  if (!j.is_object()) throw ConfigError("rule must be a JSON object");
  reject_unknown(j, {"name", "dimension", "neighborhood", "table", "plus_sets"}, "rule");
  const int d = get_field<int>(j, "dimension", "rule");
  auto nb = get_field<std::vector<Offset>>(j, "neighborhood", "rule");
  const std::string name = j.value("name", std::string{});
  const bool has_table = j.contains("table"), has_sets = j.contains("plus_sets");
  if (has_table == has_sets) throw ConfigError("rule needs exactly one of 'table' or 'plus_sets'");
  if (has_sets)
    return rule_from_plus_sets(d, std::move(nb),
                               get_field<std::vector<std::vector<int>>>(j, "plus_sets", "rule"), name);
  if (nb.empty() || nb.size() > static_cast<std::size_t>(kMaxNeighborhood))
    throw InputShapeError("neighborhood size out of range");
  auto table = table_from_hex(get_field<std::string>(j, "table", "rule"), std::size_t{1} << nb.size());
  return RuleSpec(d, std::move(nb), std::move(table), name);
}

RuleSpec load_rule_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rule file " + path.string());
  try {
    return parse_rule(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("rule file " + path.string() + " is not valid JSON: " + e.what());
  }
}

RuleSpec resolve_rule(const std::string& name_or_path) {
  for (const auto& b : builtin_names())
    if (b == name_or_path) return builtin(b);
  if (fs::exists(name_or_path)) return load_rule_file(name_or_path);
  throw LookupError("'" + name_or_path + "' is neither a builtin rule nor a rule file");
}

Json rule_to_json(const RuleSpec& rule) {
  Json j;
  if (!rule.name().empty()) j["name"] = rule.name();
  j["dimension"] = rule.dimension();
  j["neighborhood"] = rule.neighborhood();
  j["table"] = table_to_hex(rule.table());
  return j;
}

NoiseModel parse_noise(const Json& j) {
  if (!j.is_object()) throw ConfigError("noise must be a JSON object");
  const auto kind = get_field<std::string>(j, "kind", "noise");
  if (kind == "symmetric") {
    reject_unknown(j, {"kind", "eps"}, "symmetric noise");
    return NoiseModel::symmetric(get_field<double>(j, "eps", "noise"));
  }
  if (kind == "biased") {
    reject_unknown(j, {"kind", "eps_plus", "eps_minus"}, "biased noise");
    return NoiseModel::biased(get_field<double>(j, "eps_plus", "noise"),
                              get_field<double>(j, "eps_minus", "noise"));
  }
  if (kind == "table") {
    reject_unknown(j, {"kind", "p_plus"}, "table noise");
    return NoiseModel::table(get_field<std::vector<double>>(j, "p_plus", "noise"));
  }
  throw ConfigError("unknown noise kind '" + kind + "'");
}

Json noise_to_json(const NoiseModel& noise) {
  Json j;
  switch (noise.kind()) {
    case NoiseModel::Kind::Symmetric:
      j["kind"] = "symmetric";
      j["eps"] = noise.eps_plus();
      break;
    case NoiseModel::Kind::Biased:
      j["kind"] = "biased";
      j["eps_plus"] = noise.eps_plus();
      j["eps_minus"] = noise.eps_minus();
      break;
    case NoiseModel::Kind::Table:
      j["kind"] = "table";
      j["p_plus"] = noise.p_plus_table();
      break;
  }
  return j;
}

Json rational_json(const Rational& q) { return to_fraction_string(q); }

namespace {

Json rational_list(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& q : v) a.push_back(rational_json(q));
  return a;
}

std::vector<Rational> parse_rational_list(const Json& j) {
  if (!j.is_array()) throw ValidationError("expected an array of rationals");
  std::vector<Rational> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw ValidationError("rationals are serialized as \"num/den\" strings");
    out.push_back(parse_rational(e.get<std::string>()));
  }
  return out;
}

}  // namespace

Json certificate_to_json(const ErosionCertificate& cert) {
  Json j;
  j["verdict"] = cert.verdict == Verdict::Eroder ? "ERODER" : "NON_ERODER";
  j["dimension"] = cert.dimension;
  if (cert.verdict == Verdict::NonEroder) {
    j["witness"] = rational_list(cert.witness);
    Json w = Json::array();
    for (const auto& v : cert.weights) w.push_back(rational_list(v));
    j["weights"] = w;
  } else {
    j["selected"] = cert.selected;
    Json f = Json::array();
    for (const auto& v : cert.functionals) f.push_back(rational_list(v));
    j["functionals"] = f;
    j["bounds"] = rational_list(cert.bounds);
    j["q"] = cert.q;
    j["r"] = rational_json(cert.r);
  }
  return j;
}

ErosionCertificate certificate_from_json(const Json& j) {
  try {
    ErosionCertificate cert;
    const auto verdict = j.at("verdict").get<std::string>();
    if (verdict == "ERODER")
      cert.verdict = Verdict::Eroder;
    else if (verdict == "NON_ERODER")
      cert.verdict = Verdict::NonEroder;
    else
      throw ValidationError("unknown verdict '" + verdict + "'");
    cert.dimension = j.at("dimension").get<int>();
    if (cert.verdict == Verdict::NonEroder) {
      cert.witness = parse_rational_list(j.at("witness"));
      for (const auto& w : j.at("weights")) cert.weights.push_back(parse_rational_list(w));
    } else {
      cert.selected = j.at("selected").get<std::vector<int>>();
      for (const auto& f : j.at("functionals")) cert.functionals.push_back(parse_rational_list(f));
      cert.bounds = parse_rational_list(j.at("bounds"));
      cert.q = j.at("q").get<int>();
      cert.r = parse_rational(j.at("r").get<std::string>());
    }
    return cert;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed certificate: ") + e.what());
  }
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string ppm_image(int width, int height, const std::vector<bool>& plus) {
  if (static_cast<std::size_t>(width) * height != plus.size())
    throw InputShapeError("pixel count differs from width * height");
  std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.reserve(out.size() + 3 * plus.size());
  for (bool p : plus) out.append(3, p ? '\xff' : '\x00');
  return out;
}

std::string ppm_frame(const LatticeState& state) {
  const auto& dims = state.torus().dims();
  if (dims.size() != 2) throw ConfigError("PPM frames require a 2-D torus");
  std::vector<bool> px(state.sites());
  for (std::uint64_t x = 0; x < state.sites(); ++x) px[x] = state.plus(x);
  return ppm_image(dims[1], dims[0], px);
}

std::string ppm_strip(const std::vector<LatticeState>& history) {
  if (history.empty()) throw InputShapeError("empty history");
  const auto& dims = history.front().torus().dims();
  if (dims.size() != 1) throw ConfigError("PPM strips require a 1-D torus");
  std::vector<bool> px;
  for (const auto& s : history)
    for (std::uint64_t x = 0; x < s.sites(); ++x) px.push_back(s.plus(x));
  return ppm_image(dims[0], static_cast<int>(history.size()), px);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const Json& config, const std::vector<std::string>& header) {
  out_ = "# config: " + config.dump() + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) out_ += (i ? "," : "") + header[i];
  out_ += "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out_ += (i ? "," : "") + cells[i];
  out_ += "\n";
}

}  // namespace toomlab::io
