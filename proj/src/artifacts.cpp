#include "mdslab/artifacts.hpp"

#include <sstream>

#include "mdslab/config.hpp"
#include "mdslab/fs_util.hpp"
#include "mdslab/tensor_io.hpp"

namespace mdslab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && !s.empty(), ErrorCode::kParse, where + "expected a number, got '" + s + "'");
  return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& where) {
  require(s.size() >= 2 && s.front() == '[' && s.back() == ']', ErrorCode::kParse,
          where + "expected a bracketed list");
  std::vector<double> out;
  std::istringstream in(s.substr(1, s.size() - 2));
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_number(trim(item), where));
  return out;
}

std::string csv_number(double v) { return format_double(v); }

}  // namespace

std::string format_scene(const Scene& scene) {
  std::ostringstream os;
  os << "noise_sigma = " << format_double(scene.noise_sigma) << "\n";
  os << "seed = " << scene.seed << "\n";
  os << "tracks = " << scene.tracks.size() << "\n";
  for (std::size_t i = 0; i < scene.tracks.size(); ++i) {
    const TargetTrack& t = scene.tracks[i];
    const std::string p = "track" + std::to_string(i) + ".";
    os << p << "class_id = " << t.class_id << "\n";
    os << p << "range = " << format_double(t.range) << "\n";
    os << p << "velocity = " << format_double(t.velocity) << "\n";
    os << p << "sin_azimuth = " << format_double(t.sin_azimuth) << "\n";
    os << p << "scatterers = " << t.scatterers.size() << "\n";
    for (std::size_t k = 0; k < t.scatterers.size(); ++k) {
      const Scatterer& s = t.scatterers[k];
      os << p << "scatterer" << k << " = [" << format_double(s.range_offset) << ", "
         << format_double(s.angle_offset) << ", " << format_double(s.amplitude) << ", "
         << format_double(s.micro_freq) << ", " << format_double(s.micro_amp) << ", "
         << format_double(s.micro_phase) << "]\n";
    }
  }
  return os.str();
}

Scene parse_scene(const std::string& text, const std::string& origin) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<int> line_of;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::kParse,
            origin + ":" + std::to_string(lineno) + ": expected key = value");
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    line_of.push_back(lineno);
  }

  Scene scene;
  std::vector<bool> used(kv.size(), false);
  auto lookup = [&](const std::string& key) -> std::pair<std::string, std::string> {
    for (std::size_t i = 0; i < kv.size(); ++i) {
      if (kv[i].first == key) {
        used[i] = true;
        return {kv[i].second, origin + ":" + std::to_string(line_of[i]) + ": "};
      }
    }
    fail(ErrorCode::kParse, origin + ": missing key '" + key + "'");
  };
  auto number = [&](const std::string& key) {
    const auto [v, where] = lookup(key);
    return parse_number(v, where);
  };
  auto count = [&](const std::string& key) {
    const double v = number(key);
    require(v >= 0 && v == static_cast<double>(static_cast<long long>(v)), ErrorCode::kParse,
            origin + ": '" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
  };

  scene.noise_sigma = number("noise_sigma");
  {
    const auto [v, where] = lookup("seed");
    std::size_t pos = 0;
    try {
      scene.seed = std::stoull(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    require(pos == v.size() && !v.empty(), ErrorCode::kParse, where + "bad seed '" + v + "'");
  }
  const std::size_t n_tracks = count("tracks");
  for (std::size_t i = 0; i < n_tracks; ++i) {
    const std::string p = "track" + std::to_string(i) + ".";
    TargetTrack t;
    t.class_id = static_cast<int>(count(p + "class_id"));
    t.range = number(p + "range");
    t.velocity = number(p + "velocity");
    t.sin_azimuth = number(p + "sin_azimuth");
    const std::size_t n_sc = count(p + "scatterers");
    for (std::size_t k = 0; k < n_sc; ++k) {
      const auto [v, where] = lookup(p + "scatterer" + std::to_string(k));
      const std::vector<double> f = parse_list(v, where);
      require(f.size() == 6, ErrorCode::kParse, where + "scatterer lists hold 6 values");
      t.scatterers.push_back({f[0], f[1], f[2], f[3], f[4], f[5]});
    }
    scene.tracks.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < kv.size(); ++i) {
    require(used[i], ErrorCode::kParse,
            origin + ":" + std::to_string(line_of[i]) + ": unknown key '" + kv[i].first + "'");
  }
  return scene;
}

void write_scene(const std::string& path, const Scene& scene) { write_file_atomic(path, format_scene(scene)); }

Scene read_scene(const std::string& path) { return parse_scene(read_file(path), path); }

void write_checkpoint(const std::string& path, const ModelParams& params) {
  const ModelConfig& c = params.config;
  Container box;
  box.add("config",
          {c.n_tokens, c.d_in, c.emb, c.heads, c.blocks, c.mlp_ratio, c.classes,
           c.pooling == Pooling::kClassToken ? 1 : 0, c.decay_all ? 1 : 0},
          {9}, {"field"});
  box.add("weight_decay", RTensor({1}, std::vector<double>{c.weight_decay}));
  params.visit([&](const std::string& name, const Mat& m, bool) {
    RTensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
    std::copy(m.data(), m.data() + m.size(), t.data());
    box.add(name, t, {"row", "col"});
  });
  write_container(path, box);
}

ModelParams read_checkpoint(const std::string& path) {
  const Container box = read_container(path);
  const std::vector<std::int64_t> f = box.ints("config");
  require(f.size() == 9, ErrorCode::kShapeMismatch, "checkpoint '" + path + "': config tensor must hold 9 fields");
  ModelConfig c;
  c.n_tokens = static_cast<int>(f[0]);
  c.d_in = static_cast<int>(f[1]);
  c.emb = static_cast<int>(f[2]);
  c.heads = static_cast<int>(f[3]);
  c.blocks = static_cast<int>(f[4]);
  c.mlp_ratio = static_cast<int>(f[5]);
  c.classes = static_cast<int>(f[6]);
  c.pooling = f[7] ? Pooling::kClassToken : Pooling::kMean;
  c.decay_all = f[8] != 0;
  c.weight_decay = box.real("weight_decay", {1})(0);
  c.validate();
  ModelParams params = zero_params(c);
  params.visit([&](const std::string& name, Mat& m, bool) {
    const RTensor t = box.real(name, {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
    std::copy(t.data(), t.data() + t.size(), m.data());
  });
  return params;
}

void write_centroids_csv(const std::string& path, const std::vector<Centroid>& centroids) {
  std::string out = "k_r,k_v,k_theta,power\n";
  for (const Centroid& c : centroids) {
    out += std::to_string(c.k_r) + "," + std::to_string(c.k_v) + "," + std::to_string(c.k_theta) + "," +
           csv_number(c.mean_power) + "\n";
  }
  write_file_atomic(path, out);
}

void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm) {
  std::string out = "true\\pred";
  for (int q = 0; q < cm.classes; ++q) out += "," + std::to_string(q);
  out += "\n";
  for (int p = 0; p < cm.classes; ++p) {
    out += std::to_string(p);
    for (int q = 0; q < cm.classes; ++q) out += "," + std::to_string(cm.at(p, q));
    out += "\n";
  }
  write_file_atomic(path, out);
}

void write_metrics_csv(const std::string& path, const EvalResult& eval) {
  std::string out = "class,tp,fp,fn,tn\n";
  for (std::size_t k = 0; k < eval.per_class.size(); ++k) {
    const ClassCounts& c = eval.per_class[k];
    out += std::to_string(k) + "," + std::to_string(c.tp) + "," + std::to_string(c.fp) + "," +
           std::to_string(c.fn) + "," + std::to_string(c.tn) + "\n";
  }
  out += "accuracy," + csv_number(eval.accuracy) + ",,,\n";
  write_file_atomic(path, out);
}

void write_loss_trace_csv(const std::string& path, const TrainReport& report) {
  std::string out = "fold,epoch,loss\n";
  for (std::size_t j = 0; j < report.folds.size(); ++j) {
    const auto& trace = report.folds[j].epoch_loss;
    for (std::size_t e = 0; e < trace.size(); ++e) {
      out += std::to_string(j) + "," + std::to_string(e) + "," + csv_number(trace[e]) + "\n";
    }
  }
  write_file_atomic(path, out);
}

void write_relevance_csv(const std::string& path, const RelevanceMap& map, const std::vector<double>& energy) {
  require(energy.empty() || energy.size() == map.tokens.size(), ErrorCode::kShapeMismatch,
          "energy list does not match the relevance map");
  const int cols = map.spatial.rank() == 2 ? static_cast<int>(map.spatial.dim(1)) : 1;
  std::string out = "token,n_s,n_theta,relevance,energy\n";
  for (std::size_t t = 0; t < map.tokens.size(); ++t) {
    out += std::to_string(t) + "," + std::to_string(t / cols) + "," + std::to_string(t % cols) + "," +
           csv_number(map.tokens[t]) + "," + (energy.empty() ? "" : csv_number(energy[t])) + "\n";
  }
  write_file_atomic(path, out);
}

void write_train_report(const std::string& path, const TrainReport& report) {
  std::ostringstream os;
  os << "folds = " << report.folds.size() << "\n";
  os << "parameters = " << report.parameters << "\n";
  os << "acc_avg = " << format_double(report.acc_avg) << "\n";
  os << "acc_best = " << format_double(report.acc_best) << "\n";
  os << "best_fold = " << report.best_fold << "\n";
  for (std::size_t j = 0; j < report.folds.size(); ++j) {
    const FoldResult& f = report.folds[j];
    os << "fold" << j << ".accuracy = " << format_double(f.accuracy) << "\n";
    if (!f.epoch_loss.empty()) os << "fold" << j << ".final_loss = " << format_double(f.epoch_loss.back()) << "\n";
  }
  write_file_atomic(path, os.str());
}

void write_labels_csv(const std::string& path, const std::vector<LabelRow>& rows,
                      const std::vector<std::string>& class_names) {
  std::string out = "sample,class_id,class_name\n";
  for (const LabelRow& r : rows) {
    require(r.class_id >= 0 && r.class_id < static_cast<int>(class_names.size()), ErrorCode::kOutOfRange,
            "label of " + r.sample + " has no class name");
    out += r.sample + "," + std::to_string(r.class_id) + "," + class_names[r.class_id] + "\n";
  }
  write_file_atomic(path, out);
}

std::vector<LabelRow> read_labels_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && trim(line) == "sample,class_id,class_name",
          ErrorCode::kParse, "'" + path + "' is not a labels file");
  std::vector<LabelRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::string sample, id;
    require(std::getline(ls, sample, ',') && std::getline(ls, id, ','), ErrorCode::kParse,
            path + ":" + std::to_string(lineno) + ": expected sample,class_id,class_name");
    LabelRow r;
    r.sample = sample;
    r.class_id = static_cast<int>(parse_number(id, path + ":" + std::to_string(lineno) + ": "));
    rows.push_back(std::move(r));
  }
  require(!rows.empty(), ErrorCode::kInvalidArgument, "'" + path + "' lists no samples");
  return rows;
}

}  // namespace mdslab
