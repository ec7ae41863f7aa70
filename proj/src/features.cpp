#include "gesture/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include <json.hpp>

#include "gesture/error.hpp"

namespace gesture {

std::string_view to_string(Encoding encoding) {
  return encoding == Encoding::Coordinate ? "coordinate" : "angle";
}

Encoding parse_encoding(std::string_view name) {
  if (name == "coordinate") return Encoding::Coordinate;
  if (name == "angle") return Encoding::Angle;
  throw Error(ErrorCode::InvalidConfig, "unknown encoding '" + std::string(name) + "'");
}

int feature_dim(Encoding encoding) {
  return encoding == Encoding::Coordinate ? kCoordinateDim : kAngleDim;
}

FeatureVector encode_coordinates(const NormalizedPose& np) {
  FeatureVector fv;
  fv.encoding = Encoding::Coordinate;
  fv.values.reserve(kCoordinateDim);
  for (int i = 0; i < kUpperBodySize; ++i) {
    if (!np.present[i]) throw Error::missing_keypoint(i);
    fv.values.push_back(np.points[i].x);
    fv.values.push_back(np.points[i].y);
  }
  return fv;
}

double angle_at(Point2 a, Point2 vertex, Point2 b) {
  const double ux = a.x - vertex.x;
  const double uy = a.y - vertex.y;
  const double vx = b.x - vertex.x;
  const double vy = b.y - vertex.y;
  const double nu = std::hypot(ux, uy);
  const double nv = std::hypot(vx, vy);
  if (!(nu > 0.0) || !(nv > 0.0)) {
    throw Error(ErrorCode::ZeroLengthRay, "angle ray has zero length");
  }
  const double c = std::clamp((ux * vx + uy * vy) / (nu * nv), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

FeatureVector encode_angles(const std::array<Point2, kUpperBodySize>& points,
                            const std::array<bool, kUpperBodySize>& present) {
  FeatureVector fv;
  fv.encoding = Encoding::Angle;
  fv.values.reserve(kAngleDim);
  for (const AngleTriple& t : kAngleSpec) {
    for (int id : {t.a, t.vertex, t.b}) {
      if (!present[static_cast<std::size_t>(id)]) throw Error::missing_keypoint(id);
    }
    const auto at = [&](int id) { return points[static_cast<std::size_t>(id)]; };
    fv.values.push_back(angle_at(at(t.a), at(t.vertex), at(t.b)) / 180.0);
  }
  return fv;
}

FeatureVector encode_angles(const Pose& pose) {
  const Keypoint& neck = pose[kp::Neck];
  if (!neck.present()) throw Error::missing_keypoint(kp::Neck);
  std::array<Point2, kUpperBodySize> points{};
  std::array<bool, kUpperBodySize> present{};
  for (int i = 0; i < kUpperBodySize; ++i) {
    const Keypoint& k = pose[i];
    present[i] = k.present();
    if (present[i]) points[i] = Point2{k.x - neck.x, k.y - neck.y};
  }
  return encode_angles(points, present);
}

FeatureVector encode_frame(const Pose& pose, Encoding encoding) {
  if (encoding == Encoding::Coordinate) return encode_coordinates(normalize_1x1(pose));
  return encode_angles(pose);
}

Eigen::MatrixXd encode_sequence(const Sequence& seq, Encoding encoding) {
  const int dim = feature_dim(encoding);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(seq.frames.size()), dim);
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    try {
      const FeatureVector fv = encode_frame(seq.frames[t], encoding);
      for (int j = 0; j < dim; ++j) out(static_cast<Eigen::Index>(t), j) = fv.values[static_cast<std::size_t>(j)];
    } catch (const Error& e) {
      throw e.with_frame(t);
    }
  }
  return out;
}

void write_feature_cache(const std::filesystem::path& path, const std::vector<CachedWindow>& windows) {
  using nlohmann::json;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const CachedWindow& w : windows) {
    json frames = json::array();
    for (Eigen::Index t = 0; t < w.frames.rows(); ++t) {
      json row = json::array();
      for (Eigen::Index j = 0; j < w.frames.cols(); ++j) row.push_back(w.frames(t, j));
      frames.push_back(std::move(row));
    }
    json line = {{"encoding", std::string(to_string(w.encoding))}, {"frames", std::move(frames)}};
    line["label"] = w.label ? json(std::string(to_string(*w.label))) : json(nullptr);
    out << line.dump() << '\n';
  }
}

std::vector<CachedWindow> read_feature_cache(const std::filesystem::path& path) {
  using nlohmann::json;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<CachedWindow> windows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const json doc = json::parse(line);
      CachedWindow w;
      w.encoding = parse_encoding(doc.at("encoding").get<std::string>());
      if (!doc.at("label").is_null()) w.label = parse_label(doc["label"].get<std::string>());
      const json& frames = doc.at("frames");
      const auto dim = static_cast<std::size_t>(feature_dim(w.encoding));
      w.frames.resize(static_cast<Eigen::Index>(frames.size()), static_cast<Eigen::Index>(dim));
      for (std::size_t t = 0; t < frames.size(); ++t) {
        if (frames[t].size() != dim) throw Error(ErrorCode::LengthMismatch, "cached frame width");
        for (std::size_t j = 0; j < dim; ++j) {
          w.frames(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = frames[t][j].get<double>();
        }
      }
      windows.push_back(std::move(w));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedJson, e.what()).with_frame(windows.size());
    }
  }
  return windows;
}

}  // namespace gesture
