#include "mdslab/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>

#include "mdslab/fs_util.hpp"

namespace mdslab {

namespace {

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

double to_double(const std::string& s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), ErrorCode::kParse,
          "expected a number, got '" + s + "'");
  return v;
}

long long to_int(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), ErrorCode::kParse,
          "expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), ErrorCode::kParse,
          "expected an unsigned integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  fail(ErrorCode::kParse, "expected true or false, got '" + s + "'");
}

#define MDSLAB_DOUBLE(k, member)                                                  \
  Field { k, [](const RunConfig& c) { return format_double(c.member); },          \
          [](RunConfig& c, const std::string& v) { c.member = to_double(v); } }
#define MDSLAB_INT(k, member)                                                     \
  Field { k, [](const RunConfig& c) { return std::to_string(c.member); },         \
          [](RunConfig& c, const std::string& v) { c.member = static_cast<int>(to_int(v)); } }
#define MDSLAB_BOOL(k, member)                                                    \
  Field { k, [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }, \
          [](RunConfig& c, const std::string& v) { c.member = to_bool(v); } }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      MDSLAB_DOUBLE("radar.carrier_hz", radar.carrier_hz),
      MDSLAB_DOUBLE("radar.bandwidth_hz", radar.bandwidth_hz),
      MDSLAB_DOUBLE("radar.chirp_s", radar.chirp_s),
      MDSLAB_DOUBLE("radar.adc_rate_hz", radar.adc_rate_hz),
      MDSLAB_DOUBLE("radar.chirp_interval_s", radar.chirp_interval_s),
      MDSLAB_INT("radar.chirps", radar.chirps),
      MDSLAB_INT("radar.n_tx", radar.n_tx),
      MDSLAB_INT("radar.n_rx", radar.n_rx),
      MDSLAB_INT("radar.angle_fft", radar.angle_fft),
      MDSLAB_INT("radar.frames", radar.frames),
      MDSLAB_INT("pipeline.cfar_train", pipeline.window.train),
      MDSLAB_INT("pipeline.cfar_guard", pipeline.window.guard),
      MDSLAB_DOUBLE("pipeline.pfa", pipeline.pfa),
      MDSLAB_INT("pipeline.gap_range", pipeline.gaps.range),
      MDSLAB_INT("pipeline.gap_doppler", pipeline.gaps.doppler),
      MDSLAB_INT("pipeline.gap_angle", pipeline.gaps.angle),
      MDSLAB_INT("pipeline.n_res_s", pipeline.n_res_s),
      MDSLAB_INT("pipeline.n_res_theta", pipeline.n_res_theta),
      MDSLAB_INT("stft.overlap", stft_overlap),
      MDSLAB_INT("stft.n_fft", stft_n_fft),
      Field{"stft.norm", [](const RunConfig& c) { return std::string(norm_mode_name(c.norm)); },
            [](RunConfig& c, const std::string& v) { c.norm = parse_norm_mode(v); }},
      MDSLAB_INT("model.emb", model.emb),
      MDSLAB_INT("model.heads", model.heads),
      MDSLAB_INT("model.blocks", model.blocks),
      MDSLAB_INT("model.mlp_ratio", model.mlp_ratio),
      Field{"model.pooling",
            [](const RunConfig& c) { return std::string(c.model.pooling == Pooling::kMean ? "mean" : "cls"); },
            [](RunConfig& c, const std::string& v) {
              require(v == "mean" || v == "cls", ErrorCode::kParse, "expected mean or cls, got '" + v + "'");
              c.model.pooling = v == "mean" ? Pooling::kMean : Pooling::kClassToken;
            }},
      MDSLAB_BOOL("model.decay_all", model.decay_all),
      MDSLAB_DOUBLE("train.lr", train.hyper.adam.lr),
      MDSLAB_DOUBLE("train.beta1", train.hyper.adam.beta1),
      MDSLAB_DOUBLE("train.beta2", train.hyper.adam.beta2),
      MDSLAB_DOUBLE("train.eps", train.hyper.adam.eps),
      MDSLAB_INT("train.batch", train.hyper.batch),
      MDSLAB_INT("train.epochs", train.hyper.epochs),
      MDSLAB_INT("train.k_fold", train.k_fold),
      MDSLAB_DOUBLE("train.weight_decay", model.weight_decay),
      Field{"train.seed", [](const RunConfig& c) { return std::to_string(c.train.seed); },
            [](RunConfig& c, const std::string& v) { c.train.seed = to_u64(v); }},
      MDSLAB_INT("dataset.samples", dataset.samples),
      MDSLAB_DOUBLE("dataset.noise_sigma", dataset.noise_sigma),
  };
  return table;
}

#undef MDSLAB_DOUBLE
#undef MDSLAB_INT
#undef MDSLAB_BOOL

const Field& field(const std::string& key) {
  for (const Field& f : fields()) {
    if (key == f.key) return f;
  }
  fail(ErrorCode::kParse, "unknown config key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

StftParams RunConfig::stft() const {
  StftParams p = StftParams::from_overlap(radar.chirps, stft_overlap);
  p.n_fft = stft_n_fft;
  return p;
}

void RunConfig::resolve() {
  radar.validate();
  require(stft_n_fft == radar.chirps, ErrorCode::kInvalidArgument,
          "stft.n_fft (" + std::to_string(stft_n_fft) + ") must equal radar.chirps (" +
              std::to_string(radar.chirps) + ")");
  const StftParams sp = stft();
  sp.validate();
  const std::size_t n_time = static_cast<std::size_t>(radar.chirps) * radar.frames;
  require(static_cast<std::size_t>(radar.chirps) <= n_time &&
              (n_time - radar.chirps) / sp.hop + 1 >= static_cast<std::size_t>(sp.n_fft),
          ErrorCode::kInvalidArgument,
          "stft.overlap " + std::to_string(stft_overlap) + " yields fewer than stft.n_fft frames over " +
              std::to_string(n_time) + " chirps");
  require(pipeline.n_res_s >= 1 && pipeline.n_res_theta >= 1, ErrorCode::kInvalidArgument,
          "pipeline.n_res_s and pipeline.n_res_theta must be positive");
  require(pipeline.n_res_s <= radar.samples_per_chirp() && pipeline.n_res_theta <= radar.angle_fft,
          ErrorCode::kInvalidArgument, "crop window exceeds the range or angle axis");
  require(pipeline.pfa > 0 && pipeline.pfa < 1, ErrorCode::kInvalidArgument, "pipeline.pfa must lie in (0, 1)");
  require(pipeline.window.train >= 1 && pipeline.window.guard >= 0, ErrorCode::kInvalidArgument,
          "pipeline.cfar_train must be >= 1 and pipeline.cfar_guard >= 0");
  require(pipeline.gaps.range >= 0 && pipeline.gaps.doppler >= 0 && pipeline.gaps.angle >= 0,
          ErrorCode::kInvalidArgument, "cluster gaps must be non-negative");

  model.n_tokens = pipeline.n_res_s * pipeline.n_res_theta;
  model.d_in = stft_n_fft * stft_n_fft;
  model.classes = static_cast<int>(default_class_templates().size());
  model.validate();

  require(train.k_fold >= 2, ErrorCode::kInvalidArgument, "train.k_fold must be at least 2");
  require(dataset.samples >= train.k_fold, ErrorCode::kInvalidArgument,
          "dataset.samples must be at least train.k_fold");
  require(dataset.samples >= model.classes, ErrorCode::kInvalidArgument,
          "dataset.samples must be at least the class count");
  require(dataset.noise_sigma >= 0, ErrorCode::kInvalidArgument, "dataset.noise_sigma must be non-negative");
  require(train.hyper.epochs >= 0, ErrorCode::kInvalidArgument, "train.epochs must be non-negative");
  require(train.hyper.adam.lr > 0, ErrorCode::kInvalidArgument, "train.lr must be positive");
  const int smallest_train = dataset.samples - (dataset.samples + train.k_fold - 1) / train.k_fold;
  require(train.hyper.batch >= 1 && train.hyper.batch <= smallest_train, ErrorCode::kInvalidArgument,
          "train.batch must lie in [1, " + std::to_string(smallest_train) + "]");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.emplace_back(f.key);
  return keys;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  const Field& f = field(key);
  try {
    f.set(config, value);
  } catch (const Error& e) {
    fail(e.code(), key + ": " + e.what());
  }
}

std::string get_config_value(const RunConfig& config, const std::string& key) { return field(key).get(config); }

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    require(eq != std::string::npos, ErrorCode::kParse, where + "expected key = value");
    try {
      set_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      fail(e.code(), where + e.what());
    }
  }
  config.resolve();
  return config;
}

RunConfig load_config(const std::string& path) {
  if (path.empty() || path == "default") {
    RunConfig config;
    config.resolve();
    return config;
  }
  return parse_config(read_file(path), path);
}

std::string format_config(const RunConfig& config) {
  std::string out;
  for (const Field& f : fields()) out += std::string(f.key) + " = " + f.get(config) + "\n";
  return out;
}

RunConfig small_config() {
  RunConfig c;
  c.radar.bandwidth_hz = 100e6;
  c.radar.adc_rate_hz = 0.5e6;
  c.radar.chirps = 32;
  c.radar.angle_fft = 32;
  c.radar.frames = 4;
  c.stft_n_fft = 32;
  c.stft_overlap = 29;
  c.pipeline.n_res_s = 3;
  c.pipeline.n_res_theta = 3;
  c.model.emb = 16;
  c.model.heads = 2;
  c.model.blocks = 1;
  c.model.mlp_ratio = 2;
  c.train.hyper.epochs = 3;
  c.train.hyper.batch = 4;
  c.train.k_fold = 3;
  c.dataset.samples = 12;
  c.resolve();
  return c;
}

}  // namespace mdslab
