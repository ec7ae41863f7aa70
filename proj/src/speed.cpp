#include "gesture/speed.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "gesture/error.hpp"

namespace gesture {

StartPositionTable StartPositionTable::load(const std::filesystem::path& path) {
  using nlohmann::json;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  StartPositionTable table;
  try {
    const json doc = json::parse(in);
    table.encoding = parse_encoding(doc.at("encoding").get<std::string>());
    const auto dim = static_cast<std::size_t>(feature_dim(table.encoding));
    for (const auto& [name, values] : doc.at("positions").items()) {
      FeatureVector fv;
      fv.encoding = table.encoding;
      fv.values = values.get<std::vector<double>>();
      if (fv.values.size() != dim) {
        throw Error(ErrorCode::LengthMismatch, "start position for " + name + " has wrong length");
      }
      table.positions[parse_label(name)] = std::move(fv);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, std::string("start position file: ") + e.what());
  }
  return table;
}

void StartPositionTable::save(const std::filesystem::path& path) const {
  using nlohmann::json;
  json positions_json = json::object();
  for (const auto& [label, fv] : positions) positions_json[std::string(to_string(label))] = fv.values;
  const json doc = {{"encoding", std::string(to_string(encoding))}, {"positions", positions_json}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<double> distance_series(std::span<const FeatureVector> window, const FeatureVector& reference) {
  std::vector<double> out;
  out.reserve(window.size());
  for (const FeatureVector& fv : window) {
    if (fv.encoding != reference.encoding) {
      throw Error(ErrorCode::EncodingMismatch, "frame and start position use different encodings");
    }
    if (fv.values.size() != reference.values.size()) {
      throw Error(ErrorCode::LengthMismatch, "frame and start position differ in length");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < fv.values.size(); ++j) {
      const double d = fv.values[j] - reference.values[j];
      sum += d * d;
    }
    out.push_back(std::sqrt(sum));
  }
  return out;
}

std::vector<std::size_t> local_minima(std::span<const double> series, int radius) {
  if (radius < 1) throw Error(ErrorCode::InvalidConfig, "radius must be positive");
  const auto r = static_cast<std::size_t>(radius);
  if (series.size() <= 2 * r) {
    throw Error(ErrorCode::TooShort, "series of " + std::to_string(series.size()) +
                                         " values is too short for radius " + std::to_string(radius));
  }
  std::vector<std::size_t> out;
  for (std::size_t i = r; i + r < series.size(); ++i) {
    bool lowest = true;
    bool strictly_below_one = false;
    for (std::size_t j = i - r; j <= i + r; ++j) {
      if (series[j] < series[i]) {
        lowest = false;
        break;
      }
      if (series[i] < series[j]) strictly_below_one = true;
    }
    if (!lowest || !strictly_below_one) continue;
    // collapse a plateau of equal minima to its first index
    if (!out.empty() && series[out.back()] == series[i]) {
      bool same_run = true;
      for (std::size_t k = out.back(); k <= i; ++k) {
        if (series[k] != series[i]) {
          same_run = false;
          break;
        }
      }
      if (same_run) continue;
    }
    out.push_back(i);
  }
  return out;
}

SpeedEstimate estimate_speed(std::span<const FeatureVector> window, GestureLabel label,
                             const StartPositionTable& table, double fps, int radius) {
  if (!(fps > 0.0)) throw Error(ErrorCode::InvalidConfig, "fps must be positive");
  const auto it = table.positions.find(label);
  if (it == table.positions.end()) {
    throw Error(ErrorCode::NotCyclic, std::string(to_string(label)) + " has no start position");
  }
  const std::vector<double> series = distance_series(window, it->second);
  const std::vector<std::size_t> minima = local_minima(series, radius);
  if (minima.size() < 2) {
    throw Error(ErrorCode::InsufficientMinima,
                "found " + std::to_string(minima.size()) + " local minima, need 2");
  }
  SpeedEstimate est;
  est.minima_indices = minima;
  est.period_frames = static_cast<int>(minima[1] - minima[0]);
  est.cycles_per_second = fps / est.period_frames;
  return est;
}

}  // namespace gesture
