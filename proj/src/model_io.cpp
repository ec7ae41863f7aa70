#include "gesture/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "gesture/error.hpp"

namespace gesture {

namespace {

static_assert(std::endian::native == std::endian::little, "weight files assume little-endian");

constexpr char kMagic[4] = {'G', 'P', 'W', 'T'};

nlohmann::json config_json(const nn::ModelConfig& c) {
  return {{"input_dim", c.input_dim}, {"hidden1", c.hidden1},       {"hidden2", c.hidden2},
          {"gru_hidden", c.gru_hidden}, {"head", c.head},           {"output_dim", c.output_dim},
          {"seed", c.seed}};
}

template <class T>
void write_raw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_raw(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw Error(ErrorCode::IoError, "truncated weight file");
  }
  return value;
}

}  // namespace

void save_model(const std::filesystem::path& path, const Model& model) {
  using nlohmann::json;
  json header;
  header["format"] = "gesture-pipe-weights";
  header["config"] = config_json(model.config);
  header["encoding"] = std::string(to_string(model.encoding));
  header["window"] = model.window;
  header["gru_gate_order"] = "update,reset,candidate";
  json tensors = json::array();
  const auto ts = model.params.tensors();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tensors.push_back({{"name", std::string(nn::Params::kNames[i])},
                       {"rows", ts[i]->rows()},
                       {"cols", ts[i]->cols()}});
  }
  header["tensors"] = std::move(tensors);
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  write_raw(out, kWeightFileVersion);
  write_raw(out, static_cast<std::uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const nn::MatrixXd* t : ts) {
    out.write(reinterpret_cast<const char*>(t->data()),
              static_cast<std::streamsize>(t->size() * static_cast<Eigen::Index>(sizeof(double))));
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Model load_model(const std::filesystem::path& path, std::optional<Encoding> expected) {
  using nlohmann::json;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw Error(ErrorCode::IoError, path.string() + " is not a weight file");
  }
  const auto version = read_raw<std::uint32_t>(in);
  if (version != kWeightFileVersion) {
    throw Error(ErrorCode::IoError, "unsupported weight file version " + std::to_string(version));
  }
  const auto header_len = read_raw<std::uint64_t>(in);
  if (header_len > (1u << 24)) throw Error(ErrorCode::IoError, "weight file header too large");
  std::string text(header_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) {
    throw Error(ErrorCode::IoError, "truncated weight file header");
  }

  Model model;
  try {
    const json header = json::parse(text);
    const json& c = header.at("config");
    model.config.input_dim = c.at("input_dim").get<int>();
    model.config.hidden1 = c.at("hidden1").get<int>();
    model.config.hidden2 = c.at("hidden2").get<int>();
    model.config.gru_hidden = c.at("gru_hidden").get<int>();
    model.config.head = c.at("head").get<int>();
    model.config.output_dim = c.at("output_dim").get<int>();
    model.config.seed = c.at("seed").get<std::uint64_t>();
    model.encoding = parse_encoding(header.at("encoding").get<std::string>());
    model.window = header.at("window").get<int>();
    if (header.at("gru_gate_order").get<std::string>() != "update,reset,candidate") {
      throw Error(ErrorCode::InvalidConfig, "unsupported GRU gate order");
    }
    if (expected && *expected != model.encoding) {
      throw Error(ErrorCode::EncodingMismatch,
                  "weights were trained with " + std::string(to_string(model.encoding)) +
                      " features, expected " + std::string(to_string(*expected)));
    }
    if (model.config.input_dim != feature_dim(model.encoding)) {
      throw Error(ErrorCode::InvalidConfig, "input_dim does not match the feature encoding");
    }
    model.params = nn::Params::zeros(model.config);
    const json& tensors = header.at("tensors");
    auto ts = model.params.tensors();
    if (tensors.size() != ts.size()) throw Error(ErrorCode::InvalidConfig, "tensor count mismatch");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const json& t = tensors[i];
      if (t.at("name").get<std::string>() != nn::Params::kNames[i] ||
          t.at("rows").get<Eigen::Index>() != ts[i]->rows() ||
          t.at("cols").get<Eigen::Index>() != ts[i]->cols()) {
        throw Error(ErrorCode::InvalidConfig,
                    "tensor " + std::string(nn::Params::kNames[i]) + " disagrees with the config");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, std::string("weight file header: ") + e.what());
  }
  for (nn::MatrixXd* t : model.params.tensors()) {
    const auto bytes = static_cast<std::streamsize>(t->size()) * static_cast<std::streamsize>(sizeof(double));
    if (!in.read(reinterpret_cast<char*>(t->data()), bytes)) {
      throw Error(ErrorCode::IoError, "truncated weight data");
    }
  }
  return model;
}

}  // namespace gesture
