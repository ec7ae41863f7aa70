#include "gesture/skeleton.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "gesture/error.hpp"

namespace gesture {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kNumGestures> kLabelNames = {
    "RightHandLeftCircle", "RightHandRightCircle", "StandStill", "LeftHandWave",
    "RightHandWave",       "CallToPass",           "LeftHandRightCircle",
    "LeftHandLeftCircle",
};

void check_sequence(const Sequence& seq) {
  if (seq.frames.empty()) throw Error(ErrorCode::IoError, "no frames");
  if (!(seq.fps > 0.0)) throw Error(ErrorCode::InvalidConfig, "fps must be positive");
}

std::vector<std::string> read_nonempty_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

std::string_view to_string(GestureLabel label) {
  return kLabelNames[static_cast<std::size_t>(label)];
}

GestureLabel parse_label(std::string_view name) {
  for (std::size_t i = 0; i < kLabelNames.size(); ++i) {
    if (kLabelNames[i] == name) return static_cast<GestureLabel>(i);
  }
  throw Error(ErrorCode::UnknownLabel, "unknown gesture label '" + std::string(name) + "'");
}

GestureLabel label_from_index(int index) {
  if (index < 0 || index >= kNumGestures) {
    throw Error(ErrorCode::LabelOutOfRange, "class index " + std::to_string(index));
  }
  return static_cast<GestureLabel>(index);
}

Pose parse_openpose_frame(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  if (!doc.is_object() || !doc.contains("people") || !doc["people"].is_array()) {
    throw Error(ErrorCode::MalformedJson, "expected an object with a 'people' array");
  }
  const json& people = doc["people"];
  if (people.empty()) throw Error(ErrorCode::NoPerson, "frame has no detected person");
  if (people.size() > 1) {
    std::cerr << "warning: " << people.size() << " people in frame, using the first\n";
  }
  const json& person = people.front();
  if (!person.is_object() || !person.contains("pose_keypoints_2d") ||
      !person["pose_keypoints_2d"].is_array()) {
    throw Error(ErrorCode::MalformedJson, "person entry lacks 'pose_keypoints_2d'");
  }
  const json& values = person["pose_keypoints_2d"];
  if (values.size() != 3 * kBody25Size) {
    throw Error(ErrorCode::WrongArity,
                "pose_keypoints_2d has " + std::to_string(values.size()) + " values, expected 75");
  }
  Pose pose;
  for (int i = 0; i < kBody25Size; ++i) {
    const auto base = static_cast<std::size_t>(3 * i);
    for (std::size_t k = 0; k < 3; ++k) {
      if (!values[base + k].is_number()) {
        throw Error(ErrorCode::MalformedJson, "non-numeric keypoint value");
      }
    }
    pose[i] = Keypoint{values[base].get<double>(), values[base + 1].get<double>(),
                       values[base + 2].get<double>()};
  }
  return pose;
}

Sequence load_sequence(const std::filesystem::path& path, double fps) {
  namespace fs = std::filesystem;
  Sequence seq;
  seq.fps = fps;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    for (std::size_t i = 0; i < files.size(); ++i) {
      std::ifstream in(files[i], std::ios::binary);
      if (!in) throw Error(ErrorCode::IoError, "cannot open " + files[i].string()).with_frame(i);
      std::stringstream buf;
      buf << in.rdbuf();
      try {
        seq.frames.push_back(parse_openpose_frame(buf.str()));
      } catch (const Error& e) {
        throw e.with_frame(i);
      }
    }
  } else {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    const auto lines = read_nonempty_lines(in);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      try {
        seq.frames.push_back(parse_openpose_frame(lines[i]));
      } catch (const Error& e) {
        throw e.with_frame(i);
      }
    }
  }
  check_sequence(seq);
  return seq;
}

void write_sequence(std::ostream& out, const Sequence& seq) {
  json header = {{"fps", seq.fps}};
  if (seq.label) header["label"] = std::string(to_string(*seq.label));
  if (seq.view_angle_deg) header["view_angle_deg"] = *seq.view_angle_deg;
  out << header.dump() << '\n';
  for (const Pose& pose : seq.frames) {
    json kps = json::array();
    for (const Keypoint& k : pose.keypoints) kps.push_back({k.x, k.y, k.confidence});
    out << json{{"kp", std::move(kps)}}.dump() << '\n';
  }
}

void write_sequence(const std::filesystem::path& path, const Sequence& seq) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_sequence(out, seq);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Sequence read_sequence(std::istream& in) {
  const auto lines = read_nonempty_lines(in);
  if (lines.empty()) throw Error(ErrorCode::IoError, "empty sequence file");
  Sequence seq;
  try {
    const json header = json::parse(lines.front());
    seq.fps = header.at("fps").get<double>();
    if (header.contains("label")) seq.label = parse_label(header["label"].get<std::string>());
    if (header.contains("view_angle_deg")) {
      seq.view_angle_deg = header["view_angle_deg"].get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, std::string("sequence header: ") + e.what());
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t frame = i - 1;
    try {
      const json doc = json::parse(lines[i]);
      const json& kps = doc.at("kp");
      if (!kps.is_array() || kps.size() != kBody25Size) {
        throw Error(ErrorCode::WrongArity, "frame must hold 25 keypoints");
      }
      Pose pose;
      for (int k = 0; k < kBody25Size; ++k) {
        const json& t = kps[static_cast<std::size_t>(k)];
        if (!t.is_array() || t.size() != 3) throw Error(ErrorCode::WrongArity, "keypoint triple");
        pose[k] = Keypoint{t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
      }
      seq.frames.push_back(pose);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedJson, e.what()).with_frame(frame);
    } catch (const Error& e) {
      throw e.with_frame(frame);
    }
  }
  check_sequence(seq);
  return seq;
}

Sequence read_sequence(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_sequence(in);
}

std::vector<std::filesystem::path> list_sequence_files(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

}  // namespace gesture
