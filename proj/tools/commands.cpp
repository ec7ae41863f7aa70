#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gesture/augment.hpp"
#include "gesture/error.hpp"
#include "gesture/evaluation.hpp"
#include "gesture/model_io.hpp"
#include "gesture/recognizer.hpp"
#include "gesture/speed.hpp"
#include "gesture/synth.hpp"
#include "gesture/train.hpp"

namespace gesture::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "manifest.ndjson";

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// One manifest line per command run. Everything except started_at and
// duration_s is a function of the flags and inputs.
class RunManifest {
 public:
  RunManifest(const CLI::App& sub) : command_(sub.get_name()), start_(std::chrono::steady_clock::now()) {
    started_at_ = utc_now();
    argv_ = json::array({"gesture_pipe", command_});
    for (const CLI::Option* opt : sub.get_options()) {
      if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
      const std::string name = opt->get_lnames().front();
      if (opt->get_type_size() == 0) {
        const bool set = opt->count() > 0;
        flags_[name] = set;
        if (set) argv_.push_back("--" + name);
        continue;
      }
      std::string value;
      if (opt->count() > 0) {
        const auto& results = opt->results();
        for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
      } else {
        value = opt->get_default_str();
        if (value.size() >= 2 && value.front() == '[' && value.back() == ']') value = value.substr(1, value.size() - 2);
      }
      flags_[name] = value;
      if (!value.empty()) {
        argv_.push_back("--" + name);
        argv_.push_back(value);
      }
    }
  }

  void input(const fs::path& p) { inputs_.push_back(p.string()); }
  void output(const fs::path& p) { outputs_.push_back(p.string()); }
  void seed(const std::string& name, std::uint64_t value) { seeds_[name] = value; }

  void append_to(const fs::path& dir) const {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const json line = {{"command", command_}, {"version", kVersion},  {"argv", argv_},
                       {"flags", flags_},     {"inputs", inputs_},    {"outputs", outputs_},
                       {"seeds", seeds_},     {"started_at", started_at_}, {"duration_s", seconds}};
    if (!dir.empty()) fs::create_directories(dir);
    std::ofstream out(dir / kManifestName, std::ios::app);
    if (!out) throw Error(ErrorCode::IoError, "cannot append to " + (dir / kManifestName).string());
    out << line.dump() << '\n';
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  std::string started_at_;
  json argv_;
  json flags_ = json::object();
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  json seeds_ = json::object();
};

// Directory that receives the manifest of a command whose output is a file
// or stdout ("-").
fs::path manifest_dir_for(const std::string& out) {
  if (out == "-") return fs::current_path();
  const fs::path parent = fs::path(out).parent_path();
  return parent.empty() ? fs::current_path() : parent;
}

std::unique_ptr<std::ofstream> open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto file = std::make_unique<std::ofstream>(path, std::ios::trunc);
  if (!*file) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return file;
}

struct NamedSequence {
  std::string name;
  Sequence seq;
};

std::vector<NamedSequence> load_dataset(const fs::path& dir, RunManifest& manifest) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
  std::vector<NamedSequence> out;
  for (const fs::path& file : list_sequence_files(dir)) {
    out.push_back({file.filename().string(), read_sequence(file)});
    manifest.input(file);
  }
  if (out.empty()) throw Error(ErrorCode::EmptyDataset, "no *.jsonl sequences in " + dir.string());
  return out;
}

std::vector<double> with_both_sides(std::vector<double> angles, bool both_sides) {
  if (!both_sides) return angles;
  std::vector<double> out;
  for (double a : angles) {
    out.push_back(a);
    if (a != 0.0) out.push_back(-a);
  }
  return out;
}

DepthTable depth_table(const std::string& path, RunManifest& manifest) {
  if (path.empty()) return DepthTable::defaults();
  manifest.input(path);
  return DepthTable::load(path);
}

std::string angle_tag(double deg) {
  std::ostringstream ss;
  ss << (deg >= 0 ? "+" : "") << deg;
  return ss.str();
}

std::string stem_of(const std::string& filename) { return fs::path(filename).stem().string(); }

void print_line(std::ostream* file, const std::string& line) {
  std::cout << line << '\n';
  if (file) *file << line << '\n';
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string out;
  int per_class = 40;
  std::string gesture;
  int frames = 50;
  double fps = 30.0;
  std::vector<int> period_range = {20, 40};
  std::vector<double> scale_range = {80.0, 160.0};
  std::vector<double> offset_x_range = {200.0, 440.0};
  std::vector<double> offset_y_range = {120.0, 240.0};
  std::vector<double> noise_range = {0.0, 0.02};
  std::vector<double> phase_range = {0.0, 1.0};
  double drop_prob = 0.0;
  std::uint64_t seed = 1;
  std::string start_positions;
  std::string encoding = "coordinate";
};

void run_synth(const CLI::App& sub, const SynthArgs& a) {
  RunManifest manifest(sub);
  manifest.seed("seed", a.seed);
  SynthConfig base;
  base.n_frames = a.frames;
  base.fps = a.fps;
  base.drop_prob = a.drop_prob;
  base.seed = a.seed;
  SynthJitter j;
  j.period_min = a.period_range[0];
  j.period_max = a.period_range[1];
  j.scale_min = a.scale_range[0];
  j.scale_max = a.scale_range[1];
  j.offset_x_min = a.offset_x_range[0];
  j.offset_x_max = a.offset_x_range[1];
  j.offset_y_min = a.offset_y_range[0];
  j.offset_y_max = a.offset_y_range[1];
  j.noise_frac_min = a.noise_range[0];
  j.noise_frac_max = a.noise_range[1];
  j.phase_min = a.phase_range[0];
  j.phase_max = a.phase_range[1];

  std::vector<Sequence> seqs = generate_dataset(a.per_class, base, j);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  std::map<GestureLabel, int> counter;
  std::optional<GestureLabel> only;
  if (!a.gesture.empty()) only = parse_label(a.gesture);
  int written = 0;
  for (const Sequence& s : seqs) {
    const int k = counter[*s.label]++;
    if (only && *s.label != *only) continue;
    char name[96];
    std::snprintf(name, sizeof name, "%s_%03d.jsonl", std::string(to_string(*s.label)).c_str(), k);
    write_sequence(dir / name, s);
    manifest.output(dir / name);
    ++written;
  }
  if (!a.start_positions.empty()) {
    SynthConfig geometry = base;
    geometry.subject_scale = 0.5 * (a.scale_range[0] + a.scale_range[1]);
    default_start_positions(parse_encoding(a.encoding), geometry).save(a.start_positions);
    manifest.output(a.start_positions);
  }
  std::cout << "wrote " << written << " sequences to " << dir.string() << '\n';
  manifest.append_to(dir);
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string input;
  std::string out;
  double fps = 30.0;
  std::string label;
  std::optional<double> view_angle;
};

void run_ingest(const CLI::App& sub, const IngestArgs& a) {
  RunManifest manifest(sub);
  manifest.input(a.input);
  Sequence seq = load_sequence(a.input, a.fps);
  if (!a.label.empty()) seq.label = parse_label(a.label);
  if (a.view_angle) seq.view_angle_deg = *a.view_angle;
  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_sequence(out, seq);
  manifest.output(out);
  std::cout << "ingested " << seq.size() << " frames into " << out.string() << '\n';
  manifest.append_to(manifest_dir_for(a.out));
}

// ---------------------------------------------------------------- augment

struct AugmentArgs {
  std::string input;
  std::string out;
  std::vector<double> angles;
  bool both_sides = false;
  std::vector<double> speed_ratios;
  std::string depths;
  bool include_original = false;
};

void run_augment(const CLI::App& sub, const AugmentArgs& a) {
  if (fs::exists(a.out) && fs::exists(a.input) && fs::equivalent(a.out, a.input)) {
    throw CLI::ValidationError("--out", "must differ from --input; inputs are never modified");
  }
  RunManifest manifest(sub);
  const auto data = load_dataset(a.input, manifest);
  const DepthTable table = depth_table(a.depths, manifest);
  const std::vector<double> angles = with_both_sides(a.angles, a.both_sides);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  int written = 0;
  const auto emit = [&](const std::string& name, const Sequence& s) {
    write_sequence(dir / name, s);
    manifest.output(dir / name);
    ++written;
  };
  for (const auto& [name, seq] : data) {
    if (a.include_original) emit(name, seq);
    for (double deg : angles) emit(stem_of(name) + "_rot" + angle_tag(deg) + ".jsonl", rotate_sequence(seq, table, {deg}));
    for (double r : a.speed_ratios) {
      std::ostringstream tag;
      tag << r;
      emit(stem_of(name) + "_x" + tag.str() + ".jsonl", resample_speed(seq, r));
    }
  }
  std::cout << "wrote " << written << " sequences to " << dir.string() << '\n';
  manifest.append_to(dir);
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string out;
  std::string encoding = "coordinate";
  int window = 50;
  int stride = 0;
  int epochs = 30;
  double lr = 1e-3;
  int batch = 16;
  int patience = 0;
  std::uint64_t seed = 1;
  std::uint64_t split_seed = 1;
  std::vector<double> augment_angles;
  bool both_sides = false;
  std::string depths;
};

const char* subset_name(std::size_t which) { return which == 0 ? "train" : which == 1 ? "val" : "test"; }

void run_train(const CLI::App& sub, const TrainArgs& a) {
  RunManifest manifest(sub);
  manifest.seed("seed", a.seed);
  manifest.seed("split_seed", a.split_seed);
  const Encoding enc = parse_encoding(a.encoding);
  const int stride = a.stride > 0 ? a.stride : a.window;
  const auto data = load_dataset(a.data, manifest);
  std::vector<int> labels;
  for (const auto& d : data) {
    if (!d.seq.label) throw Error(ErrorCode::UnknownLabel, d.name + " has no label");
    labels.push_back(class_index(*d.seq.label));
  }
  const Split split = split_dataset(labels, a.split_seed);

  // Rotated copies are added after the split, so no view of a test
  // sequence reaches training or validation.
  const DepthTable table = depth_table(a.depths, manifest);
  const std::vector<double> angles = with_both_sides(a.augment_angles, a.both_sides);
  const auto part = [&](const std::vector<std::size_t>& idx, bool augment) {
    std::vector<Sequence> seqs;
    for (std::size_t i : idx) {
      seqs.push_back(data[i].seq);
      if (!augment) continue;
      for (double deg : angles) seqs.push_back(rotate_sequence(data[i].seq, table, {deg}));
    }
    return make_samples(seqs, enc, a.window, stride);
  };
  const std::vector<Sample> train_set = part(split.train, true);
  const std::vector<Sample> val_set = part(split.val, true);
  const std::vector<Sample> test_set = part(split.test, false);

  TrainOptions options;
  options.model = nn::ModelConfig::standard(feature_dim(enc), kNumGestures, a.seed);
  options.epochs = a.epochs;
  options.lr = a.lr;
  options.batch_size = a.batch;
  options.patience = a.patience;
  options.on_epoch = [](const EpochStats& e) {
    std::cout << "epoch " << e.epoch << " train_loss " << fmt("%.6f", e.train_loss) << " val_loss "
              << fmt("%.6f", e.val_loss) << " val_accuracy " << fmt("%.4f", e.val_accuracy) << std::endl;
  };
  std::cout << "training on " << train_set.size() << " windows, validating on " << val_set.size()
            << ", testing on " << test_set.size() << std::endl;
  if (val_set.empty()) std::cout << "validation subset is empty; epochs are ranked on the training windows\n";
  const TrainResult result = fit(train_set, val_set, options);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  save_model(dir / "weights.bin", Model{options.model, result.params, enc, a.window});
  manifest.output(dir / "weights.bin");
  {
    std::ofstream h(dir / "history.csv", std::ios::trunc);
    h << "epoch,train_loss,val_loss,val_accuracy\n";
    for (const EpochStats& e : result.history) {
      h << e.epoch << ',' << fmt("%.17g", e.train_loss) << ',' << fmt("%.17g", e.val_loss) << ','
        << fmt("%.17g", e.val_accuracy) << '\n';
    }
    manifest.output(dir / "history.csv");
  }
  {
    std::ofstream s(dir / "split.csv", std::ios::trunc);
    s << "file,label,subset\n";
    const std::vector<std::size_t>* parts[] = {&split.train, &split.val, &split.test};
    std::vector<std::string> subset_of(data.size());
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t i : *parts[p]) subset_of[i] = subset_name(p);
    for (std::size_t i = 0; i < data.size(); ++i) {
      s << data[i].name << ',' << to_string(*data[i].seq.label) << ',' << subset_of[i] << '\n';
    }
    manifest.output(dir / "split.csv");
  }
  const EpochStats& best = result.history[static_cast<std::size_t>(result.best_epoch - 1)];
  std::cout << "best epoch " << result.best_epoch << " val_accuracy " << fmt("%.4f", best.val_accuracy);
  if (!test_set.empty()) std::cout << " test_accuracy " << fmt("%.4f", accuracy(result.params, test_set));
  std::cout << '\n';
  manifest.append_to(dir);
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string model;
  std::string data;
  std::string out;
  std::string encoding;
  std::string split;
  std::string subset;
  std::vector<double> angles;
  bool both_sides = false;
  std::string depths;
  double speed_ratio = 1.0;
  int stride = 0;
};

std::map<std::string, std::string> read_split(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::map<std::string, std::string> subset;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.rfind(',');
    if (c1 == std::string::npos || c1 == c2) throw Error(ErrorCode::MalformedJson, "bad split line: " + line);
    subset[line.substr(0, c1)] = line.substr(c2 + 1);
  }
  return subset;
}

void run_eval(const CLI::App& sub, const EvalArgs& a) {
  if (!a.subset.empty() && a.split.empty()) throw CLI::ValidationError("--subset", "requires --split");
  RunManifest manifest(sub);
  std::optional<Encoding> expected;
  if (!a.encoding.empty()) expected = parse_encoding(a.encoding);
  manifest.input(a.model);
  const Model model = load_model(a.model, expected);
  auto data = load_dataset(a.data, manifest);
  if (!a.split.empty()) {
    manifest.input(a.split);
    const auto subset = read_split(a.split);
    const std::string want = a.subset.empty() ? "test" : a.subset;
    std::vector<NamedSequence> kept;
    for (auto& d : data) {
      const auto it = subset.find(d.name);
      if (it != subset.end() && it->second == want) kept.push_back(std::move(d));
    }
    data = std::move(kept);
    if (data.empty()) throw Error(ErrorCode::EmptyDataset, "no sequences in subset '" + want + "'");
  }
  const DepthTable table = depth_table(a.depths, manifest);
  const std::vector<double> angles = with_both_sides(a.angles, a.both_sides);

  WindowConfig wc;
  wc.base_len = model.window;
  wc.speed_ratio = a.speed_ratio;
  const int window = effective_window(wc);
  const int stride = a.stride > 0 ? a.stride : window;

  ConfusionTable confusion;
  const auto score = [&](const Sequence& s) {
    const Sequence seq = a.speed_ratio == 1.0 ? s : resample_speed(s, a.speed_ratio);
    const auto windows = slice_windows(encode_sequence(seq, model.encoding), window, stride);
    std::vector<const Eigen::MatrixXd*> ptrs;
    for (const auto& w : windows) ptrs.push_back(&w);
    const double angle = seq.view_angle_deg.value_or(0.0);
    for (int pred : predict(model.params, ptrs)) confusion.add(class_index(*seq.label), angle, pred);
  };
  for (const auto& d : data) {
    if (!d.seq.label) throw Error(ErrorCode::UnknownLabel, d.name + " has no label");
    try {
      score(d.seq);
      for (double deg : angles) score(rotate_sequence(d.seq, table, {deg}));
    } catch (const Error& e) {
      throw Error(e.code(), d.name + ": " + e.message());
    }
  }

  const fs::path dir(a.out);
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "confusion.csv", std::ios::trunc);
    confusion.write_csv(csv);
    manifest.output(dir / "confusion.csv");
  }
  std::ostringstream text;
  confusion.render(text);
  text << "\naccuracy " << fmt("%.4f", confusion.accuracy()) << " over " << confusion.total() << " windows of "
       << window << " frames\n";
  std::map<double, bool> seen_angles;
  for (const auto& [key, counts] : confusion.rows()) seen_angles[key.view_angle_deg] = true;
  for (const auto& [deg, _] : seen_angles) {
    text << "accuracy at " << angle_tag(deg) << " deg " << fmt("%.4f", confusion.accuracy_at(deg)) << '\n';
  }
  const auto per_class = confusion.per_class_accuracy();
  for (int c = 0; c < kNumGestures; ++c) {
    if (per_class[static_cast<std::size_t>(c)] == per_class[static_cast<std::size_t>(c)]) {
      text << "class " << to_string(label_from_index(c)) << ' ' << fmt("%.4f", per_class[static_cast<std::size_t>(c)]) << '\n';
    }
  }
  {
    std::ofstream txt(dir / "confusion.txt", std::ios::trunc);
    txt << text.str();
    manifest.output(dir / "confusion.txt");
  }
  std::cout << text.str();
  manifest.append_to(dir);
}

// ---------------------------------------------------------------- stream

struct StreamArgs {
  std::string model;
  std::string input;
  std::string out = "-";
  std::optional<double> fps;
  double base_fps = 30.0;
  double speed_ratio = 1.0;
  int vote_n = 5;
  double retention = 0.5;
  bool realtime = false;
};

void run_stream(const CLI::App& sub, const StreamArgs& a) {
  RunManifest manifest(sub);
  manifest.input(a.model);
  manifest.input(a.input);
  auto model = std::make_shared<const Model>(load_model(a.model));
  const Sequence seq = read_sequence(fs::path(a.input));
  WindowConfig wc;
  wc.base_len = model->window;
  wc.base_fps = a.base_fps;
  wc.fps = a.fps.value_or(seq.fps);
  wc.speed_ratio = a.speed_ratio;
  wc.vote_n = a.vote_n;
  wc.retention = a.retention;
  Recognizer rec(model, wc);

  std::unique_ptr<std::ofstream> file;
  if (a.out != "-") {
    file = open_output(a.out);
    manifest.output(a.out);
  }
  print_line(file.get(), "frame,raw,smoothed,confidence");
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    if (a.realtime) {
      std::this_thread::sleep_until(t0 + std::chrono::duration<double>(static_cast<double>(i) / wc.fps));
    }
    std::optional<Emission> e;
    try {
      e = rec.push_frame(encode_frame(seq.frames[i], model->encoding));
    } catch (const Error& err) {
      throw err.with_frame(i);
    }
    if (!e) continue;
    print_line(file.get(), std::to_string(e->frame) + ',' + std::string(to_string(label_from_index(e->raw))) + ',' +
                               std::string(to_string(label_from_index(e->smoothed))) + ',' +
                               fmt("%.6f", e->confidence));
    std::cout.flush();
  }
  if (seq.frames.size() < static_cast<std::size_t>(rec.capacity())) {
    std::cerr << "warning: " << seq.frames.size() << " frames never fill the " << rec.capacity()
              << "-frame window\n";
  }
  manifest.append_to(manifest_dir_for(a.out));
}

// ---------------------------------------------------------------- speed

struct SpeedArgs {
  std::string input;
  std::string label;
  std::string start_positions;
  std::string encoding = "coordinate";
  std::optional<double> fps;
  int radius = kDefaultMinimaRadius;
  std::string out = "-";
};

void run_speed(const CLI::App& sub, const SpeedArgs& a) {
  RunManifest manifest(sub);
  manifest.input(a.input);
  const Sequence seq = read_sequence(fs::path(a.input));
  GestureLabel label;
  if (!a.label.empty()) {
    label = parse_label(a.label);
  } else if (seq.label) {
    label = *seq.label;
  } else {
    throw CLI::ValidationError("--label", "sequence has no label; pass --label");
  }
  StartPositionTable table;
  if (a.start_positions.empty()) {
    table = default_start_positions(parse_encoding(a.encoding));
  } else {
    manifest.input(a.start_positions);
    table = StartPositionTable::load(a.start_positions);
  }
  const auto frames = to_feature_vectors(encode_sequence(seq, table.encoding), table.encoding);
  const SpeedEstimate est = estimate_speed(frames, label, table, a.fps.value_or(seq.fps), a.radius);

  std::unique_ptr<std::ofstream> file;
  if (a.out != "-") {
    file = open_output(a.out);
    manifest.output(a.out);
  }
  std::string minima;
  for (std::size_t i = 0; i < est.minima_indices.size(); ++i) {
    minima += (i ? "," : "") + std::to_string(est.minima_indices[i]);
  }
  print_line(file.get(), "period_frames " + std::to_string(est.period_frames));
  print_line(file.get(), "cycles_per_second " + fmt("%.6f", est.cycles_per_second));
  print_line(file.get(), "minima " + minima);
  manifest.append_to(manifest_dir_for(a.out));
}

// ---------------------------------------------------------------- wiring

CLI::Validator label_name() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        for (GestureLabel g : kAllGestures)
          if (to_string(g) == s) return {};
        return "unknown gesture '" + s + "'";
      },
      "GESTURE");
}

const auto kEncodings = CLI::IsMember({"coordinate", "angle"});

}  // namespace

void register_commands(CLI::App& app) {
  {
    auto args = std::make_shared<SynthArgs>();
    CLI::App* sub = app.add_subcommand("synth", "Generate labelled synthetic gesture sequences (JSONL).");
    sub->add_option("--out", args->out, "Output directory")->required();
    sub->add_option("--per-class", args->per_class, "Sequences per gesture")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--gesture", args->gesture, "Write only this gesture")->check(label_name());
    sub->add_option("--frames", args->frames, "Frames per sequence")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--fps", args->fps, "Frame rate")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--period-range", args->period_range, "Cycle length range in frames, min,max")
        ->delimiter(',')->expected(2)->capture_default_str()->check(CLI::Range(4, 100000));
    sub->add_option("--scale-range", args->scale_range, "Shoulder width range in pixels")
        ->delimiter(',')->expected(2)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--offset-x-range", args->offset_x_range, "Neck x range in pixels")->delimiter(',')->expected(2)->capture_default_str();
    sub->add_option("--offset-y-range", args->offset_y_range, "Neck y range in pixels")->delimiter(',')->expected(2)->capture_default_str();
    sub->add_option("--noise-range", args->noise_range, "Gaussian noise range as a fraction of shoulder width")
        ->delimiter(',')->expected(2)->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--phase-range", args->phase_range, "Starting phase range, fraction of a cycle (mod 1)")
        ->delimiter(',')->expected(2)->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--drop-prob", args->drop_prob, "Probability of dropping each keypoint")->capture_default_str()->check(CLI::Range(0.0, 0.999));
    sub->add_option("--seed", args->seed, "Random seed")->capture_default_str();
    sub->add_option("--start-positions", args->start_positions, "Also write default start positions to this JSON file");
    sub->add_option("--encoding", args->encoding, "Encoding of the start positions")->capture_default_str()->check(kEncodings);
    sub->callback([sub, args] { run_synth(*sub, *args); });
  }
  {
    auto args = std::make_shared<IngestArgs>();
    CLI::App* sub = app.add_subcommand("ingest", "Convert OpenPose output (directory of JSON frames or JSONL) to a sequence file.");
    sub->add_option("--input", args->input, "OpenPose output directory or JSONL file")->required();
    sub->add_option("--out", args->out, "Sequence file to write (.jsonl)")->required();
    sub->add_option("--fps", args->fps, "Frame rate of the recording")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--label", args->label, "Gesture label")->check(label_name());
    sub->add_option("--view-angle", args->view_angle, "Camera view angle in degrees");
    sub->callback([sub, args] { run_ingest(*sub, *args); });
  }
  {
    auto args = std::make_shared<AugmentArgs>();
    CLI::App* sub = app.add_subcommand(
        "augment",
        "Rotated-view and speed-resampled copies of a dataset. Positive angles turn the subject so that "
        "keypoint 2 (the image-left shoulder) comes toward the camera.");
    sub->add_option("--input", args->input, "Directory of sequences")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--out", args->out, "Output directory")->required();
    sub->add_option("--angles", args->angles, "Rotation angles in degrees, e.g. 15,30,45")->delimiter(',')->check(CLI::Range(-90.0, 90.0));
    sub->add_flag("--both-sides", args->both_sides, "Also rotate by the negated angles");
    sub->add_option("--speed-ratios", args->speed_ratios, "Speed ratios, e.g. 0.5,2.0")->delimiter(',')->check(CLI::PositiveNumber);
    sub->add_option("--depths", args->depths, "Depth table file (default: built-in table)")->check(CLI::ExistingFile);
    sub->add_flag("--include-original", args->include_original, "Copy the unmodified sequences too");
    sub->callback([sub, args] { run_augment(*sub, *args); });
  }
  {
    auto args = std::make_shared<TrainArgs>();
    CLI::App* sub = app.add_subcommand("train", "Train the recognition network with a 60/10/30 split.");
    sub->add_option("--data", args->data, "Directory of labelled sequences")->required();
    sub->add_option("--out", args->out, "Output directory for weights.bin, history.csv, split.csv")->required();
    sub->add_option("--encoding", args->encoding, "Feature encoding")->capture_default_str()->check(kEncodings);
    sub->add_option("--window", args->window, "Window length in frames")->capture_default_str()->check(CLI::Range(2, 100000));
    sub->add_option("--stride", args->stride, "Frames between training windows (0 = window)")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--epochs", args->epochs, "Epochs")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--lr", args->lr, "Adam learning rate")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--batch", args->batch, "Minibatch size")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--patience", args->patience, "Stop after this many epochs without improvement (0 = off)")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", args->seed, "Initialisation and shuffling seed")->capture_default_str();
    sub->add_option("--split-seed", args->split_seed, "Seed of the train/val/test split")->capture_default_str();
    sub->add_option("--augment-angles", args->augment_angles, "Add rotated copies of training and validation sequences")
        ->delimiter(',')->check(CLI::Range(-90.0, 90.0));
    sub->add_flag("--both-sides", args->both_sides, "Also use the negated augmentation angles");
    sub->add_option("--depths", args->depths, "Depth table file (default: built-in table)")->check(CLI::ExistingFile);
    sub->callback([sub, args] { run_train(*sub, *args); });
  }
  {
    auto args = std::make_shared<EvalArgs>();
    CLI::App* sub = app.add_subcommand("eval", "Confusion matrix and accuracy of a trained model.");
    sub->add_option("--model", args->model, "weights.bin from train")->required();
    sub->add_option("--data", args->data, "Directory of labelled sequences")->required();
    sub->add_option("--out", args->out, "Output directory for confusion.csv and confusion.txt")->required();
    sub->add_option("--encoding", args->encoding, "Expected encoding of the model")->check(kEncodings);
    sub->add_option("--split", args->split, "split.csv from train; evaluates one subset");
    sub->add_option("--subset", args->subset, "Subset of --split to use (default test)")->check(CLI::IsMember({"train", "val", "test"}));
    sub->add_option("--angles", args->angles, "Also evaluate rotated copies at these angles")->delimiter(',')->check(CLI::Range(-90.0, 90.0));
    sub->add_flag("--both-sides", args->both_sides, "Also use the negated angles");
    sub->add_option("--depths", args->depths, "Depth table file (default: built-in table)")->check(CLI::ExistingFile);
    sub->add_option("--speed-ratio", args->speed_ratio, "Resample sequences to this speed and adapt the window")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--stride", args->stride, "Frames between evaluated windows (0 = window)")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->callback([sub, args] { run_eval(*sub, *args); });
  }
  {
    auto args = std::make_shared<StreamArgs>();
    CLI::App* sub = app.add_subcommand("stream", "Replay a sequence through the streaming recognizer.");
    sub->add_option("--model", args->model, "weights.bin from train")->required();
    sub->add_option("--input", args->input, "Sequence file (.jsonl)")->required();
    sub->add_option("--out", args->out, "Also write the emissions here ('-' = stdout only)")->capture_default_str();
    sub->add_option("--fps", args->fps, "Stream frame rate (default: the sequence's)")->check(CLI::PositiveNumber);
    sub->add_option("--base-fps", args->base_fps, "Frame rate of the training data")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--speed-ratio", args->speed_ratio, "Expected gesture speed relative to training")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--vote-n", args->vote_n, "Votes in the majority filter")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--retention", args->retention, "Fraction of the window kept between evaluations")->capture_default_str()->check(CLI::Range(0.001, 0.999));
    sub->add_flag("--realtime", args->realtime, "Pace frames at --fps");
    sub->callback([sub, args] { run_stream(*sub, *args); });
  }
  {
    auto args = std::make_shared<SpeedArgs>();
    CLI::App* sub = app.add_subcommand("speed", "Estimate the cycle period of a cyclic gesture.");
    sub->add_option("--input", args->input, "Sequence file (.jsonl)")->required();
    sub->add_option("--label", args->label, "Gesture (default: the sequence's label)")->check(label_name());
    sub->add_option("--start-positions", args->start_positions, "Start position JSON (default: synthetic start poses)");
    sub->add_option("--encoding", args->encoding, "Encoding of the default start positions")->capture_default_str()->check(kEncodings);
    sub->add_option("--fps", args->fps, "Frame rate (default: the sequence's)")->check(CLI::PositiveNumber);
    sub->add_option("--radius", args->radius, "Neighbourhood radius of a local minimum")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--out", args->out, "Also write the estimate here ('-' = stdout only)")->capture_default_str();
    sub->callback([sub, args] { run_speed(*sub, *args); });
  }
}

}  // namespace gesture::cli
