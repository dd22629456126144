#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "archmark/config.hpp"
#include "archmark/dataset.hpp"
#include "archmark/error.hpp"
#include "archmark/evalstats.hpp"
#include "archmark/io.hpp"
#include "archmark/pipeline.hpp"
#include "archmark/random.hpp"
#include "archmark/synth_arch.hpp"
#include "json.hpp"

namespace archmark::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

PipelineConfig resolve_config(const Common& c) {
  PipelineConfig cfg = c.config_path.empty() ? parse_config("") : load_config(c.config_path);
  if (c.seed) {
    cfg.seed = *c.seed;
    cfg.derive_seeds();
  }
  return cfg;
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("ARCHMARK_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw Error(ErrorCode::InvalidValue, "ARCHMARK_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects the files a command writes and emits the run metadata next to
// them: run_meta.json is reproducible, run_times.json holds the clock.
class RunRecord {
 public:
  RunRecord(std::string command, std::vector<std::string> args, const PipelineConfig& cfg, fs::path dir)
      : command_(std::move(command)), args_(std::move(args)), cfg_(cfg), dir_(std::move(dir)),
        started_(utc_now()), t0_(std::chrono::steady_clock::now()) {
    fs::create_directories(dir_);
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, std::string_view text) {
    write_file_atomic(path(name).string(), text);
    artifacts_.push_back({name, text.size()});
  }
  void write(const std::string& name, std::span<const std::uint8_t> bytes) {
    write_file_atomic(path(name).string(), bytes);
    artifacts_.push_back({name, bytes.size()});
  }

  void finish() {
    ordered_json meta;
    meta["tool"] = "archmark";
    meta["version"] = std::string(library_version());
    meta["command"] = command_;
    meta["args"] = args_;
    meta["seed"] = cfg_.seed;
    meta["config_hash"] = config_hash(cfg_);
    meta["config"] = config_to_toml(cfg_);
    auto& list = meta["artifacts"] = ordered_json::array();
    for (const auto& [name, size] : artifacts_) list.push_back({{"name", name}, {"bytes", size}});
    write_file_atomic(path("run_meta.json").string(), meta.dump(2) + "\n");

    ordered_json times;
    times["command"] = command_;
    times["started_utc"] = started_;
    times["finished_utc"] = utc_now();
    times["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    write_file_atomic(path("run_times.json").string(), times.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  PipelineConfig cfg_;
  fs::path dir_;
  std::string started_;
  std::chrono::steady_clock::time_point t0_;
  std::vector<std::pair<std::string, std::size_t>> artifacts_;
};

TriangleMesh load_mesh(const std::string& path) { return parse_stl(read_file_bytes(path)); }

LandmarkSet load_landmarks(const std::string& path) {
  return read_landmarks(read_text_file(path), landmark_format_for_path(path));
}

std::optional<SplitRequest> parse_auto_split(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto slash = text.find('/');
  auto number = [&](std::string_view s) -> std::size_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string_view::npos) {
      throw Error(ErrorCode::InvalidValue, "--auto-split expects TRAIN/TEST counts, got '" + text + "'");
    }
    return std::stoul(std::string(s));
  };
  if (slash == std::string::npos) number("");
  return SplitRequest{number(std::string_view(text).substr(0, slash)), number(std::string_view(text).substr(slash + 1))};
}

SplitResult resolve_split(const Manifest& m, const std::string& auto_split, std::uint64_t seed, std::ostream& err) {
  auto split = split_dataset(m, parse_auto_split(auto_split), seed);
  for (const auto& w : split.warnings) err << "warning: " << w << "\n";
  return split;
}

std::string pgm(const std::vector<std::uint8_t>& pixels, int w, int h) {
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.append(pixels.begin(), pixels.end());
  return out;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

std::string view_name(int v, const char* what, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "view_%02d_%s.%s", v, what, ext);
  return buf;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  int n = 10;
  std::string out;
  std::string mode = "balanced";
  bool ascii = false;
};

int cmd_synth(const SynthArgs& a, const Common& common, const std::vector<std::string>& args, std::ostream& out) {
  PipelineConfig cfg = resolve_config(common);
  if (a.n < 1) throw Error(ErrorCode::InvalidValue, "--n must be at least 1");
  PopulationSpec spec;
  if (a.mode == "pre") {
    spec.mode = PopulationSpec::Mode::PreOnly;
  } else if (a.mode == "post") {
    spec.mode = PopulationSpec::Mode::PostOnly;
  } else if (a.mode != "balanced") {
    throw Error(ErrorCode::InvalidValue, "--mode must be balanced, pre or post");
  }
  RunRecord rec("synth", args, cfg, a.out);
  const auto population = sample_population(a.n, spec, cfg.seed);
  Manifest manifest;
  for (std::size_t i = 0; i < population.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "arch_%03zu", i);
    const auto arch = generate_arch(population[i].params);
    const std::string stl = std::string(id) + ".stl";
    const std::string fcsv = std::string(id) + ".fcsv";
    rec.write(stl, write_stl(arch.mesh, a.ascii ? StlMode::Ascii : StlMode::Binary));
    rec.write(fcsv, write_landmarks(arch.landmarks, LandmarkFormat::Fcsv));
    manifest.rows.push_back({id, stl, fcsv, Split::Unassigned, population[i].tag, arch.large_side});
  }
  rec.write("manifest.csv", format_manifest(manifest));
  rec.finish();
  out << "wrote " << population.size() << " arches and manifest.csv to " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct RenderArgs {
  std::string mesh;
  std::string landmarks;
  std::string out;
};

int cmd_render(const RenderArgs& a, const Common& common, const std::vector<std::string>& args, std::ostream& out) {
  const PipelineConfig cfg = resolve_config(common);
  const int threads = resolve_threads(common.threads);
  const TriangleMesh mesh = load_mesh(a.mesh);
  std::optional<LandmarkSet> truth;
  if (!a.landmarks.empty()) truth = load_landmarks(a.landmarks);

  RunRecord rec("render", args, cfg, a.out);
  const auto views = render_views(mesh, cfg.views, threads);
  ordered_json cams = ordered_json::array();
  for (std::size_t v = 0; v < views.size(); ++v) {
    const auto& r = views[v];
    const int w = r.camera.width, h = r.camera.height;
    const auto input = network_input(r);
    std::vector<std::uint8_t> near(static_cast<std::size_t>(w) * h), shade(near.size());
    for (std::size_t i = 0; i < near.size(); ++i) {
      near[i] = to_byte(input.data[i]);
      shade[i] = to_byte(input.data[near.size() + i]);
    }
    const int vi = static_cast<int>(v);
    rec.write(view_name(vi, "depth", "pgm"), pgm(near, w, h));
    rec.write(view_name(vi, "shading", "pgm"), pgm(shade, w, h));
    if (truth) {
      const auto t = make_targets(r.camera, *truth, r, cfg.heatmap.sigma_px, cfg.heatmap.visibility_epsilon_mm);
      std::vector<std::uint8_t> heat(near.size(), 0);
      for (int k = 0; k < kLandmarkCount; ++k) {
        const auto ch = t.channel(k);
        for (std::size_t i = 0; i < heat.size(); ++i) heat[i] = std::max(heat[i], to_byte(ch[i]));
      }
      rec.write(view_name(vi, "targets", "pgm"), pgm(heat, w, h));
    }
    const auto& R = r.camera.rotation;
    cams.push_back({{"view", vi},
                    {"rotation", {R(0, 0), R(0, 1), R(0, 2), R(1, 0), R(1, 1), R(1, 2), R(2, 0), R(2, 1), R(2, 2)}},
                    {"translation", {r.camera.translation.x(), r.camera.translation.y(), r.camera.translation.z()}},
                    {"projection", r.camera.projection == Projection::Orthographic ? "orthographic" : "perspective"},
                    {"scale", r.camera.scale},
                    {"focal", r.camera.focal},
                    {"width", w},
                    {"height", h}});
  }
  rec.write("cameras.json", cams.dump(2) + "\n");
  rec.finish();
  out << "rendered " << views.size() << " views to " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string out;
  std::string auto_split;
  bool fast_nondeterministic = false;
};

int cmd_train(const TrainArgs& a, const Common& common, const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err) {
  const PipelineConfig cfg = resolve_config(common);
  // Sample generation only fans out when determinism may be traded away.
  const int threads = a.fast_nondeterministic ? resolve_threads(common.threads) : 1;
  const Manifest manifest = load_manifest(a.manifest);
  const SplitResult split = resolve_split(manifest, a.auto_split, cfg.seed, err);
  if (split.train.empty()) throw Error(ErrorCode::EmptyDataset, "no training rows in the manifest");

  std::vector<TrainingSample> samples;
  for (const auto& row : split.train) {
    const auto mesh = load_mesh(manifest.resolve(row.mesh_path));
    const auto lms = load_landmarks(manifest.resolve(row.landmarks_path));
    auto s = make_training_samples(mesh, lms, cfg.views, cfg.heatmap, threads);
    std::move(s.begin(), s.end(), std::back_inserter(samples));
  }
  err << "training on " << split.train.size() << " meshes (" << samples.size() << " views)\n";

  Network net(cfg.network);
  const TrainingLog log = train(net, samples, cfg.train);

  RunRecord rec("train", args, cfg, a.out);
  rec.write("weights.amhg", save_weights(net));
  std::ostringstream csv;
  csv << "epoch,mean_loss\n";
  csv.precision(9);
  for (std::size_t e = 0; e < log.epoch_loss.size(); ++e) csv << e + 1 << ',' << log.epoch_loss[e] << '\n';
  rec.write("train_log.csv", csv.str());

  // Resolved split with paths rewritten against the output directory.
  Manifest resolved;
  for (const auto* part : {&split.train, &split.test}) {
    for (auto row : *part) {
      for (auto* p : {&row.mesh_path, &row.landmarks_path}) {
        *p = fs::relative(fs::absolute(manifest.resolve(*p)), fs::absolute(a.out)).generic_string();
      }
      resolved.rows.push_back(row);
    }
  }
  rec.write("manifest.csv", format_manifest(resolved));
  rec.finish();
  out << "trained " << log.epoch_loss.size() << " epochs, final loss "
      << (log.epoch_loss.empty() ? 0.0 : log.epoch_loss.back()) << ", weights in " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct PredictArgs {
  std::string manifest;
  std::string mesh;
  std::string landmarks;
  std::string weights;
  std::string out;
  std::string split = "test";
  std::string auto_split;
  bool oracle = false;
  double oracle_noise = 0.0;
};

int cmd_predict(const PredictArgs& a, const Common& common, const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  const PipelineConfig cfg = resolve_config(common);
  const int threads = resolve_threads(common.threads);
  if (a.manifest.empty() == a.mesh.empty()) throw Error(ErrorCode::InvalidValue, "give exactly one of --manifest or --mesh");
  if (a.oracle == !a.weights.empty()) throw Error(ErrorCode::InvalidValue, "give exactly one of --weights or --oracle");

  struct Item {
    std::string id, mesh, landmarks;
  };
  std::vector<Item> items;
  if (!a.mesh.empty()) {
    items.push_back({fs::path(a.mesh).stem().string(), a.mesh, a.landmarks});
  } else {
    const Manifest m = load_manifest(a.manifest);
    std::vector<ManifestRow> rows;
    if (a.split == "all") {
      rows = m.rows;
    } else if (a.split == "test" || a.split == "train") {
      const auto s = resolve_split(m, a.auto_split, cfg.seed, err);
      rows = a.split == "test" ? s.test : s.train;
    } else {
      throw Error(ErrorCode::InvalidValue, "--split must be test, train or all");
    }
    if (rows.empty()) throw Error(ErrorCode::EmptyDataset, "no manifest rows in split '" + a.split + "'");
    for (const auto& r : rows) items.push_back({r.id, m.resolve(r.mesh_path), m.resolve(r.landmarks_path)});
  }

  std::optional<Network> net;
  if (!a.weights.empty()) net.emplace(load_weights<float>(read_file_bytes(a.weights), cfg.network));

  RunRecord rec("predict", args, cfg, a.out);
  std::ostringstream diag;
  diag.precision(9);
  diag << "id,landmark,status,n_rays,rms_ray_distance_mm,drop_iterations,snap_distance_mm,x,y,z\n";
  std::size_t found = 0;
  for (const auto& item : items) {
    const TriangleMesh mesh = load_mesh(item.mesh);
    std::unique_ptr<HeatmapPredictor> predictor;
    if (net) {
      predictor = std::make_unique<NetworkPredictor>(*net);
    } else {
      if (item.landmarks.empty()) throw Error(ErrorCode::InvalidValue, "--oracle needs ground-truth landmarks");
      predictor = std::make_unique<OraclePredictor>(load_landmarks(item.landmarks), cfg.heatmap, a.oracle_noise,
                                                    derive_seed(cfg.seed, item.id));
    }
    const Prediction p = predict_landmarks(mesh, *predictor, cfg.views, cfg.heatmap, cfg.consensus, threads);
    rec.write(item.id + ".fcsv", write_landmarks(p.landmarks, LandmarkFormat::Fcsv));
    rec.write(item.id + ".json", write_landmarks(p.landmarks, LandmarkFormat::Json));
    for (int k = 0; k < kLandmarkCount; ++k) {
      const auto& e = p.estimates[static_cast<std::size_t>(k)];
      diag << item.id << ',' << k + 1 << ',' << to_string(e.status) << ',' << e.n_rays_used << ','
           << e.rms_ray_distance << ',' << e.drop_iterations << ',' << e.snap_distance << ',' << e.position.x()
           << ',' << e.position.y() << ',' << e.position.z() << '\n';
    }
    found += p.landmarks.present_count();
  }
  rec.write("diagnostics.csv", diag.str());
  rec.finish();
  out << "predicted " << items.size() << " meshes, " << found << " of " << items.size() * kLandmarkCount
      << " landmarks placed, outputs in " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string pred;
  std::string truth;
  std::string manifest;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a, const Common& common, const std::vector<std::string>& args,
                 std::ostream& out) {
  const PipelineConfig cfg = resolve_config(common);
  Manifest m = parse_manifest(read_text_file(a.manifest), fs::path(a.manifest).parent_path().string());
  if (!a.truth.empty()) m.directory = a.truth;
  for (const auto& dir : {a.pred, a.truth}) {
    if (!dir.empty() && !fs::is_directory(dir)) throw Error(ErrorCode::Io, "not a directory: '" + dir + "'");
  }

  std::vector<ModelEvaluation> models;
  for (const auto& row : m.rows) {
    const fs::path pred = fs::path(a.pred) / (row.id + ".fcsv");
    if (!fs::is_regular_file(pred)) continue;
    ModelEvaluation e;
    e.model_id = row.id;
    e.predicted = load_landmarks(pred.string());
    e.truth = load_landmarks(m.resolve(row.landmarks_path));
    e.volume_mm3 = mesh_metrics(load_mesh(m.resolve(row.mesh_path))).volume;
    models.push_back(std::move(e));
  }
  if (models.empty()) throw Error(ErrorCode::EmptyErrors, "no predictions in '" + a.pred + "' match the manifest");

  const EvaluationReport report = build_report(models, cfg.eval);
  RunRecord rec("evaluate", args, cfg, a.out.empty() ? a.pred : a.out);
  rec.write("report_table.csv", report_table_csv(report));
  rec.write("report.json", report_json(report));
  rec.finish();
  const auto& o = report.overall;
  char line[256];
  std::snprintf(line, sizeof line, "models %zu  errors %d  skipped %d  MAE %.3f +- %.3f mm  accuracy %.2f%%\n",
                models.size(), o.n, o.skipped, o.mae, o.mae_sd, o.accuracy);
  out << line;
  return kOk;
}

// ---------------------------------------------------------------------------

struct InfoArgs {
  std::string mesh;
  std::string weights;
};

int cmd_info(const InfoArgs& a, const Common& common, std::ostream& out) {
  const PipelineConfig cfg = resolve_config(common);
  out << "archmark " << library_version() << "\n";
  out << "threads " << resolve_threads(common.threads) << "\n";
  out << "config_hash " << config_hash(cfg) << "\n";
  if (!a.mesh.empty()) {
    StlInfo info;
    const auto mesh = parse_stl(read_file_bytes(a.mesh), &info);
    const auto mm = mesh_metrics(mesh);
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "mesh %s\n  format %s\n  vertices %zu\n  faces %zu (dropped degenerate %zu)\n"
                  "  volume_mm3 %.3f\n  surface_area_mm2 %.3f\n  watertight %s\n"
                  "  bbox_min %.3f %.3f %.3f\n  bbox_max %.3f %.3f %.3f\n",
                  a.mesh.c_str(), info.ascii ? "ascii" : "binary", mesh.vertices.size(), mesh.faces.size(),
                  info.dropped_degenerate, mm.volume, mm.surface_area, mm.watertight ? "yes" : "no",
                  mm.aabb.min.x(), mm.aabb.min.y(), mm.aabb.min.z(), mm.aabb.max.x(), mm.aabb.max.y(),
                  mm.aabb.max.z());
    out << buf;
  }
  if (!a.weights.empty()) {
    const auto net = load_weights<float>(read_file_bytes(a.weights), cfg.network);
    out << "weights " << a.weights << "\n  parameters " << net.parameter_count() << "\n";
  }
  if (a.mesh.empty() && a.weights.empty()) out << "\n" << config_to_toml(cfg);
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (category_of(code)) {
    case ErrorCategory::Usage: return kUsage;
    case ErrorCategory::Data: return kData;
    case ErrorCategory::Numerical: return kNumerical;
  }
  return kData;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Landmark placement on maxillary arch meshes", "archmark"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "TOML configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Override the configuration seed");
    sub->add_option("--threads", common.threads, "Worker threads (default: ARCHMARK_THREADS or logical cores)")
        ->check(CLI::PositiveNumber);
  };

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "Generate synthetic arches with landmarks and a manifest");
  s_synth->add_option("--n", synth.n, "Number of arches")->required();
  s_synth->add_option("--out", synth.out, "Output directory")->required();
  s_synth->add_option("--mode", synth.mode, "balanced, pre or post");
  s_synth->add_flag("--ascii", synth.ascii, "Write ASCII STL");
  add_common(s_synth);

  RenderArgs render;
  auto* s_render = app.add_subcommand("render", "Render the views of one mesh as PGM images");
  s_render->add_option("--mesh", render.mesh, "STL file")->required();
  s_render->add_option("--landmarks", render.landmarks, "Landmarks to draw as target heatmaps");
  s_render->add_option("--out", render.out, "Output directory")->required();
  add_common(s_render);

  TrainArgs trainer;
  auto* s_train = app.add_subcommand("train", "Train the hourglass network on a manifest's train split");
  s_train->add_option("--manifest", trainer.manifest, "Dataset manifest CSV")->required();
  s_train->add_option("--out", trainer.out, "Output directory")->required();
  s_train->add_option("--auto-split", trainer.auto_split, "TRAIN/TEST counts, balanced by treatment tag");
  s_train->add_flag("--fast-nondeterministic", trainer.fast_nondeterministic,
                    "Allow multi-threaded data preparation");
  add_common(s_train);

  PredictArgs predict;
  auto* s_predict = app.add_subcommand("predict", "Place landmarks on meshes");
  s_predict->add_option("--manifest", predict.manifest, "Dataset manifest CSV");
  s_predict->add_option("--split", predict.split, "test, train or all (with --manifest)");
  s_predict->add_option("--auto-split", predict.auto_split, "TRAIN/TEST counts, as given to train");
  s_predict->add_option("--mesh", predict.mesh, "Single STL file");
  s_predict->add_option("--landmarks", predict.landmarks, "Ground truth for --oracle with --mesh");
  s_predict->add_option("--weights", predict.weights, "Trained weights");
  s_predict->add_flag("--oracle", predict.oracle, "Use exact Gaussian heatmaps from the ground truth");
  s_predict->add_option("--oracle-noise", predict.oracle_noise, "Pixel noise sigma for --oracle")
      ->check(CLI::NonNegativeNumber);
  s_predict->add_option("--out", predict.out, "Output directory")->required();
  add_common(s_predict);

  EvaluateArgs evaluate;
  auto* s_eval = app.add_subcommand("evaluate", "Score predictions against ground truth");
  s_eval->add_option("--pred", evaluate.pred, "Directory of predicted <id>.fcsv files")
      ->required();
  s_eval->add_option("--truth", evaluate.truth, "Directory the manifest paths resolve against");
  s_eval->add_option("--manifest", evaluate.manifest, "Dataset manifest CSV")->required();
  s_eval->add_option("--out", evaluate.out, "Output directory (default: --pred)");
  add_common(s_eval);

  InfoArgs info;
  auto* s_info = app.add_subcommand("info", "Version, resolved configuration, mesh or weights summary");
  s_info->add_option("--mesh", info.mesh, "STL file");
  s_info->add_option("--weights", info.weights, "Weights file");
  add_common(s_info);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kUsage;
  }

  try {
    if (s_synth->parsed()) return cmd_synth(synth, common, args, out);
    if (s_render->parsed()) return cmd_render(render, common, args, out);
    if (s_train->parsed()) return cmd_train(trainer, common, args, out, err);
    if (s_predict->parsed()) return cmd_predict(predict, common, args, out, err);
    if (s_eval->parsed()) return cmd_evaluate(evaluate, common, args, out);
    if (s_info->parsed()) return cmd_info(info, common, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: Io: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}

}  // namespace archmark::cli
