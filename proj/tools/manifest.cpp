#include "manifest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sikam/error.hpp"

namespace sikam::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw InvalidArgument(key + ": not a number: '" + value + "'");
  return out;
}

long to_long(const std::string& key, const std::string& value) {
  long out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw InvalidArgument(key + ": not an integer: '" + value + "'");
  return out;
}

int to_int(const std::string& key, const std::string& value) { return static_cast<int>(to_long(key, value)); }

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw InvalidArgument(key + ": expected true or false, got '" + value + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

std::vector<std::pair<double, double>> parse_support(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidArgument("support range '" + item + "' is not start:end");
    const double a = to_double("support", trim(item.substr(0, colon)));
    const double b = to_double("support", trim(item.substr(colon + 1)));
    if (a < 0.0 || b < a) throw InvalidArgument("support range '" + item + "' is empty or negative");
    out.emplace_back(a, b);
  }
  return out;
}

std::string format_support(const std::vector<std::pair<double, double>>& ranges) {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < ranges.size(); ++i) os << (i ? "," : "") << ranges[i].first << ':' << ranges[i].second;
  return os.str();
}

void apply_setting(RunManifest& m, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir) {
  auto& sep = m.separation;
  auto& tf = m.transform;
  if (key == "input") m.input = resolve(base_dir, value);
  else if (key == "output_dir") m.output_dir = resolve(base_dir, value);
  else if (key == "reference") m.reference = resolve(base_dir, value);
  else if (key == "variant") sep.variant = parse_variant(value);
  else if (key == "k") sep.k = to_int(key, value);
  else if (key == "delta") sep.delta = to_int(key, value);
  else if (key == "p") sep.p = to_int(key, value);
  else if (key == "drop_head") sep.drop_head = to_int(key, value);
  else if (key == "clamp_shift") sep.clamp_shift = to_bool(key, value);
  else if (key == "deconv_epsilon") sep.deconv_epsilon = to_double(key, value);
  else if (key == "support") m.support = parse_support(value);
  else if (key == "seed") m.seed = static_cast<uint64_t>(to_long(key, value));
  else if (key == "bins_per_octave") tf.bins_per_octave = to_int(key, value);
  else if (key == "f_min") tf.f_min = to_double(key, value);
  else if (key == "f_max") tf.f_max = to_double(key, value);
  else if (key == "hop") tf.hop = to_int(key, value);
  else if (key == "window_length") tf.window_length = to_int(key, value);
  else if (key == "window_policy") {
    if (value == "fixed") tf.window_policy = WindowPolicy::Fixed;
    else if (value == "per_bin") tf.window_policy = WindowPolicy::PerBin;
    else throw InvalidArgument("window_policy: expected fixed or per_bin");
  } else if (key == "gamma") tf.gamma = to_double(key, value);
  else throw InvalidArgument("unknown manifest key '" + key + "'");
}

void load_manifest(const std::filesystem::path& path, RunManifest& manifest) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  const auto base = path.parent_path();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    apply_setting(manifest, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), base);
  }
}

}  // namespace sikam::cli
