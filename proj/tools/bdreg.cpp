// bdreg: encode, decode, round-trip, evaluate and synthesize text-instance maps.
//
// Exit codes: 0 ok, 1 invalid input or a failed gate, 2 runtime failure.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdreg/bdreg.hpp"
#include "bdreg/io/annotations.hpp"
#include "bdreg/io/bundle.hpp"
#include "bdreg/io/detections.hpp"
#include "bdreg/io/image.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace bdreg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;
constexpr const char* kEnvPrefix = "BDREG_";

class UsageError : public Error {
 public:
  using Error::Error;
};

class GateFailure : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  EncoderConfig enc;
  DecoderConfig dec;
  EvalConfig eval;
  LossWeights loss;
  int downscale = 1;
  double min_iou = 0.9;
  std::uint64_t seed = 0;
  int jobs = 0;  // 0: one per hardware thread

  void validate() const {
    enc.validate();
    dec.validate();
    eval.validate();
    loss.validate();
    if (downscale < 1) throw ParameterError("downscale must be a positive integer");
    if (!(min_iou >= 0.0 && min_iou <= 1.0)) throw ParameterError("min_iou must be in [0, 1]");
    if (jobs < 0) throw ParameterError("jobs must be non-negative");
  }
};

Expression parse_mode(const std::string& s) {
  if (s == "bidir") return Expression::bidirectional;
  if (s == "msr") return Expression::msr;
  throw ParameterError("mode must be 'bidir' or 'msr', got '" + s + "'");
}

using Setter = std::function<void(RunConfig&, const json&)>;

template <class T>
T as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ParameterError("config key '" + key + "' has the wrong type");
  }
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&t](const std::string& key, auto member) {
      t[key] = [key, member](RunConfig& c, const json& v) { member(c) = as<double>(v, key); };
    };
    num("alpha", [](RunConfig& c) -> double& { return c.enc.alpha; });
    num("beta", [](RunConfig& c) -> double& { return c.enc.beta; });
    num("gamma", [](RunConfig& c) -> double& { return c.dec.gamma; });
    num("epsilon", [](RunConfig& c) -> double& { return c.dec.epsilon; });
    num("binarize_region", [](RunConfig& c) -> double& { return c.dec.binarize_region; });
    num("binarize_kernel", [](RunConfig& c) -> double& { return c.dec.binarize_kernel; });
    num("alpha_radius_scale", [](RunConfig& c) -> double& { return c.dec.alpha_radius_scale; });
    num("distance_scale", [](RunConfig& c) -> double& { return c.dec.distance_scale; });
    num("tr", [](RunConfig& c) -> double& { return c.eval.tr; });
    num("tp", [](RunConfig& c) -> double& { return c.eval.tp; });
    num("ignore_overlap", [](RunConfig& c) -> double& { return c.eval.ignore_overlap; });
    num("lambda1", [](RunConfig& c) -> double& { return c.loss.lambda1; });
    num("lambda2", [](RunConfig& c) -> double& { return c.loss.lambda2; });
    num("ohem_ratio", [](RunConfig& c) -> double& { return c.loss.ohem_ratio; });
    num("min_iou", [](RunConfig& c) -> double& { return c.min_iou; });
    t["mode"] = [](RunConfig& c, const json& v) { c.enc.mode = parse_mode(as<std::string>(v, "mode")); };
    t["min_kernel_area"] = [](RunConfig& c, const json& v) {
      c.dec.min_kernel_area = as<std::size_t>(v, "min_kernel_area");
    };
    t["connectivity"] = [](RunConfig& c, const json& v) {
      const int n = as<int>(v, "connectivity");
      if (n != 4 && n != 8) throw ParameterError("connectivity must be 4 or 8");
      c.dec.connectivity = n == 4 ? Connectivity::four : Connectivity::eight;
    };
    t["iou_thresholds"] = [](RunConfig& c, const json& v) {
      c.eval.iou_thresholds = as<std::vector<double>>(v, "iou_thresholds");
    };
    t["downscale"] = [](RunConfig& c, const json& v) { c.downscale = as<int>(v, "downscale"); };
    t["seed"] = [](RunConfig& c, const json& v) { c.seed = as<std::uint64_t>(v, "seed"); };
    t["jobs"] = [](RunConfig& c, const json& v) { c.jobs = as<int>(v, "jobs"); };
    return t;
  }();
  return table;
}

void apply(RunConfig& cfg, const std::string& key, const json& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ParameterError("unknown config key '" + key + "'");
  it->second(cfg, value);
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(path + ": cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError(path + ": " + e.what());
  }
  if (!doc.is_object()) throw ParameterError(path + ": config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    try {
      apply(cfg, key, value);
    } catch (const ParameterError& e) {
      throw ParameterError(path + ": " + e.what());
    }
  }
}

// BDREG_<KEY> in upper case; values are JSON, bare words are taken as strings.
void apply_environment(RunConfig& cfg) {
  for (const auto& [key, setter] : setters()) {
    std::string name = kEnvPrefix;
    for (char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    const char* raw = std::getenv(name.c_str());
    if (!raw) continue;
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = std::string(raw);
    try {
      setter(cfg, value);
    } catch (const ParameterError& e) {
      throw ParameterError(name + ": " + e.what());
    }
  }
}

/// Runs fn(i) for i in [0, n) on a pool of `jobs` threads. Results keep input
/// order; the first failure by index is rethrown after all workers finish.
template <class T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        slots[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t threads = jobs > 0 ? static_cast<std::size_t>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// Annotation inputs: files, or directories scanned for *.txt (sizes.txt
// excluded), sorted by name.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs, const std::string& ext) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ext && e.path().filename() != "sizes.txt") {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      out.push_back(p);
    } else {
      throw UsageError(in + ": no such file or directory");
    }
  }
  return out;
}

struct SizeSource {
  std::string size;       // WIDTHxHEIGHT for every image
  std::string sizes;      // "name width height" file
  std::string image_dir;  // read dimensions from image headers
};

std::optional<io::ImageSize> image_dir_size(const fs::path& dir, const std::string& stem) {
  std::vector<std::string> names{stem};
  if (stem.rfind("gt_", 0) == 0) names.push_back(stem.substr(3));
  for (const auto& name : names) {
    for (const char* ext : {".png", ".ppm", ".pgm", ".pbm", ".pnm", ".PNG"}) {
      const fs::path p = dir / (name + ext);
      if (fs::exists(p)) {
        if (auto s = io::read_image_size(p.string())) return s;
      }
    }
  }
  return std::nullopt;
}

class SizeResolver {
 public:
  explicit SizeResolver(const SizeSource& src) : src_(src) {
    if (!src.size.empty()) fixed_ = io::parse_size_spec(src.size);
    if (!src.sizes.empty()) table_ = io::read_sizes(src.sizes);
  }

  io::ImageSize operator()(const fs::path& annotation) {
    const std::string stem = annotation.stem().string();
    if (fixed_) return *fixed_;
    if (!src_.image_dir.empty()) {
      if (auto s = image_dir_size(src_.image_dir, stem)) return *s;
    }
    const auto* table = &table_;
    if (src_.sizes.empty()) {
      // Fall back to a sizes.txt next to the annotation file.
      const fs::path local = annotation.parent_path() / "sizes.txt";
      auto it = local_.find(local.string());
      if (it == local_.end()) {
        it = local_.emplace(local.string(), fs::exists(local) ? io::read_sizes(local.string())
                                                              : std::map<std::string, io::ImageSize>{})
                 .first;
      }
      table = &it->second;
    }
    const auto it = table->find(stem);
    if (it == table->end()) {
      throw ParameterError(annotation.string() + ": missing image size (use --size, --sizes or --image-dir)");
    }
    return it->second;
  }

 private:
  SizeSource src_;
  std::optional<io::ImageSize> fixed_;
  std::map<std::string, io::ImageSize> table_;
  std::map<std::string, std::map<std::string, io::ImageSize>> local_;
};

std::vector<TextAnnotation> downscaled(std::vector<TextAnnotation> anns, int k) {
  if (k == 1) return anns;
  for (auto& a : anns) a.polygon = scaled(a.polygon, 1.0 / k);
  return anns;
}

std::vector<AnnotatedImage> load_images(const std::vector<std::string>& inputs, const SizeSource& src,
                                        int downscale) {
  SizeResolver sizes(src);
  std::vector<AnnotatedImage> out;
  for (const auto& path : expand_inputs(inputs, ".txt")) {
    AnnotatedImage img;
    img.name = path.stem().string();
    const auto size = sizes(path);
    img.width = (size.width + downscale - 1) / downscale;
    img.height = (size.height + downscale - 1) / downscale;
    img.annotations = downscaled(io::read_annotations(path.string()), downscale);
    out.push_back(std::move(img));
  }
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(dir + ": cannot create output directory");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw Error(path.string() + ": write failed");
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------- commands

void cmd_synth(const RunConfig& cfg, const std::string& family, int count, const std::string& out_dir) {
  const auto f = synth::parse_family(family);
  if (!f) throw ParameterError("unknown family '" + family + "'");
  ensure_dir(out_dir);
  std::map<std::string, io::ImageSize> sizes;
  for (const auto& img : synth::synthesize(*f, count, cfg.seed)) {
    std::ostringstream os;
    io::write_annotations(os, img.annotations);
    write_text(fs::path(out_dir) / (img.name + ".txt"), os.str());
    sizes[img.name] = {img.width, img.height};
  }
  std::ostringstream os;
  io::write_sizes(os, sizes);
  write_text(fs::path(out_dir) / "sizes.txt", os.str());
  std::cout << "wrote " << count << " " << family << " fixtures to " << out_dir << "\n";
}

void cmd_encode(const RunConfig& cfg, const std::vector<std::string>& inputs, const SizeSource& src,
                const std::string& out_dir) {
  const auto images = load_images(inputs, src, cfg.downscale);
  ensure_dir(out_dir);
  parallel_map<int>(images.size(), cfg.jobs, [&](std::size_t i) {
    const auto& img = images[i];
    io::save_bundle((fs::path(out_dir) / (img.name + ".bdmap")).string(),
                    encode(img.annotations, img.width, img.height, cfg.enc));
    return 0;
  });
  std::cout << "encoded " << images.size() << " image(s) to " << out_dir << "\n";
}

void cmd_decode(const RunConfig& cfg, const std::vector<std::string>& inputs, const std::string& out_dir,
                const std::string& overlay_dir, const std::string& gt_dir) {
  const auto bundles = expand_inputs(inputs, ".bdmap");
  ensure_dir(out_dir);
  if (!overlay_dir.empty()) ensure_dir(overlay_dir);
  const auto counts = parallel_map<std::size_t>(bundles.size(), cfg.jobs, [&](std::size_t i) {
    const auto& path = bundles[i];
    const auto scores = io::as_scores(io::load_bundle(path.string()));
    const auto dets = decode(scores.maps, cfg.dec, scores.mode);
    std::ostringstream os;
    io::write_detections(os, dets);
    const std::string stem = path.stem().string();
    write_text(fs::path(out_dir) / (stem + ".txt"), os.str());
    if (!overlay_dir.empty()) {
      io::RgbImage canvas(scores.maps.width(), scores.maps.height());
      if (!gt_dir.empty()) {
        const fs::path gt = fs::path(gt_dir) / (stem + ".txt");
        if (fs::exists(gt)) {
          for (const auto& a : downscaled(io::read_annotations(gt.string()), cfg.downscale)) {
            canvas.outline(a.polygon, {0, 0, 255});
          }
        }
      }
      for (const auto& d : dets) canvas.outline(d.polygon, {0, 255, 0});
      canvas.save_ppm((fs::path(overlay_dir) / (stem + ".ppm")).string());
    }
    return dets.size();
  });
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    std::cout << bundles[i].stem().string() << "\t" << counts[i] << " instance(s)\n";
  }
}

void cmd_roundtrip(const RunConfig& cfg, const std::vector<std::string>& inputs, const SizeSource& src) {
  const auto images = load_images(inputs, src, cfg.downscale);
  const auto results = parallel_map<RoundTripResult>(
      images.size(), cfg.jobs, [&](std::size_t i) { return roundtrip(images[i], cfg.enc, cfg.dec); });
  std::vector<double> ious;
  std::cout << "image\tid\tiou\n";
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (const auto& row : results[i].rows) {
      std::cout << images[i].name << "\t" << row.id << "\t" << fixed(row.iou) << "\n";
      ious.push_back(row.iou);
    }
  }
  const auto s = summarize(ious);
  std::cout << "mode=" << to_string(cfg.enc.mode) << " instances=" << s.count << " mean=" << fixed(s.mean)
            << " min=" << fixed(s.min) << " max=" << fixed(s.max) << "\n";
  if (s.count > 0 && s.mean < cfg.min_iou) {
    throw GateFailure("mean IoU " + fixed(s.mean) + " is below --min-iou " + fixed(cfg.min_iou));
  }
}

json row_json(const ThresholdRow& r) {
  return {{"true_positives", r.counts.true_positives},
          {"detections", r.counts.detections},
          {"ground_truths", r.counts.ground_truths},
          {"ignored_detections", r.counts.ignored_detections},
          {"precision", r.metrics.precision},
          {"recall", r.metrics.recall},
          {"f_score", r.metrics.f_score}};
}

std::string report_table(const EvalReport& rep) {
  std::ostringstream os;
  os << "protocol\ttp\tdet\tgt\tprecision\trecall\tf\n";
  auto line = [&](const std::string& name, const ThresholdRow& r) {
    os << name << "\t" << r.counts.true_positives << "\t" << r.counts.detections << "\t" << r.counts.ground_truths
       << "\t" << fixed(r.metrics.precision) << "\t" << fixed(r.metrics.recall) << "\t" << fixed(r.metrics.f_score)
       << "\n";
  };
  for (const auto& r : rep.iou_rows) line("iou@" + fixed(r.threshold, 2), r);
  line("tr/tp", rep.deteval);
  return os.str();
}

std::string f_row(const EvalReport& rep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < rep.iou_rows.size(); ++i) {
    os << (i ? "  " : "") << "F@" << fixed(rep.iou_rows[i].threshold, 1) << "=" << fixed(rep.iou_rows[i].metrics.f_score);
  }
  return os.str();
}

void cmd_eval(const RunConfig& cfg, const std::string& det_dir, const std::vector<std::string>& gt_inputs,
              const std::string& report) {
  const auto gt_files = expand_inputs(gt_inputs, ".txt");
  std::vector<std::vector<DecodedInstance>> dets;
  std::vector<std::vector<TextAnnotation>> gts;
  for (const auto& g : gt_files) {
    gts.push_back(downscaled(io::read_annotations(g.string()), cfg.downscale));
    const fs::path d = fs::path(det_dir) / g.filename();
    dets.push_back(fs::exists(d) ? io::read_detections(d.string()) : std::vector<DecodedInstance>{});
  }
  const auto rep = sweep(dets, gts, cfg.eval);
  const std::string table = report_table(rep);
  std::cout << table << f_row(rep) << "\n";
  if (!report.empty()) {
    json j;
    j["images"] = gt_files.size();
    j["iou"] = json::array();
    for (const auto& r : rep.iou_rows) {
      auto row = row_json(r);
      row["threshold"] = r.threshold;
      j["iou"].push_back(row);
    }
    j["tr_tp"] = row_json(rep.deteval);
    j["tr_tp"]["tr"] = cfg.eval.tr;
    j["tr_tp"]["tp"] = cfg.eval.tp;
    write_text(report + ".txt", table);
    write_text(report + ".json", j.dump(2) + "\n");
  }
}

void cmd_compare(const RunConfig& cfg, const std::vector<std::string>& inputs, const SizeSource& src) {
  const auto images = load_images(inputs, src, cfg.downscale);
  const auto cmp = compare_expressions(images, cfg.enc, cfg.dec, cfg.eval);
  std::cout << "bidir\t" << f_row(cmp.bidirectional) << "  TR/TP=" << fixed(cmp.bidirectional.deteval.metrics.f_score)
            << "\n";
  std::cout << "msr\t" << f_row(cmp.msr) << "  TR/TP=" << fixed(cmp.msr.deteval.metrics.f_score) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bidirectional regression text-instance maps: encode, decode, round-trip, evaluate."};
  app.set_version_flag("--version", std::string(bdreg::version()));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, mode;
  double alpha = 0, beta = 0, gamma = 0, epsilon = 0, min_iou = 0;
  int downscale = 1, jobs = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  auto* o_alpha = app.add_option("--alpha", alpha, "kernel shrink ratio");
  auto* o_beta = app.add_option("--beta", beta, "region expansion ratio");
  auto* o_gamma = app.add_option("--gamma", gamma, "distance gate, in output-stride units");
  auto* o_epsilon = app.add_option("--epsilon", epsilon, "orientation gate (cosine)");
  auto* o_mode = app.add_option("--mode", mode, "instance expression")->check(CLI::IsMember({"bidir", "msr"}));
  auto* o_down = app.add_option("--downscale", downscale, "integer downscale of annotations and maps");
  auto* o_min = app.add_option("--min-iou", min_iou, "round-trip gate on the mean IoU");
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  auto* o_jobs = app.add_option("--jobs", jobs, "worker threads (0: hardware concurrency)");

  SizeSource sizes;
  auto add_sizes = [&](CLI::App* sub) {
    sub->add_option("--size", sizes.size, "WIDTHxHEIGHT for every image");
    sub->add_option("--sizes", sizes.sizes, "file of '<name> <width> <height>' lines")->check(CLI::ExistingFile);
    sub->add_option("--image-dir", sizes.image_dir, "read sizes from PNG/PNM headers")->check(CLI::ExistingDirectory);
  };

  std::vector<std::string> inputs;
  std::string out_dir, overlay_dir, gt_dir, det_dir, report, family;
  int count = 0;

  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic annotation fixtures");
  synth_cmd->add_option("--family", family, "rect, rotrect, banana, adjacent-pair or nested")->required();
  synth_cmd->add_option("--count", count, "number of images")->required()->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--out", out_dir, "output directory")->required();

  auto* encode_cmd = app.add_subcommand("encode", "annotations to label map bundles");
  encode_cmd->add_option("inputs", inputs, "annotation files or directories")->required();
  encode_cmd->add_option("--out", out_dir, "output directory")->required();
  add_sizes(encode_cmd);

  auto* decode_cmd = app.add_subcommand("decode", "map bundles to detection files");
  decode_cmd->add_option("inputs", inputs, "bundle files or directories")->required();
  decode_cmd->add_option("--out", out_dir, "output directory")->required();
  decode_cmd->add_option("--overlay", overlay_dir, "write PPM overlays here");
  decode_cmd->add_option("--gt", gt_dir, "annotation directory drawn on overlays");

  auto* roundtrip_cmd = app.add_subcommand("roundtrip", "encode, decode and score every instance");
  roundtrip_cmd->add_option("inputs", inputs, "annotation files or directories")->required();
  add_sizes(roundtrip_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "score detection files against annotations");
  eval_cmd->add_option("--det", det_dir, "detection directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("gt", inputs, "annotation files or directories")->required();
  eval_cmd->add_option("--report", report, "write <report>.txt and <report>.json");

  auto* compare_cmd = app.add_subcommand("compare", "bidir vs msr F-scores on perfect maps");
  compare_cmd->add_option("inputs", inputs, "annotation files or directories")->required();
  add_sizes(compare_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    apply_environment(cfg);
    if (o_alpha->count()) cfg.enc.alpha = alpha;
    if (o_beta->count()) cfg.enc.beta = beta;
    if (o_gamma->count()) cfg.dec.gamma = gamma;
    if (o_epsilon->count()) cfg.dec.epsilon = epsilon;
    if (o_mode->count()) cfg.enc.mode = parse_mode(mode);
    if (o_down->count()) cfg.downscale = downscale;
    if (o_min->count()) cfg.min_iou = min_iou;
    if (o_seed->count()) cfg.seed = seed;
    if (o_jobs->count()) cfg.jobs = jobs;
    cfg.validate();

    if (*synth_cmd) cmd_synth(cfg, family, count, out_dir);
    if (*encode_cmd) cmd_encode(cfg, inputs, sizes, out_dir);
    if (*decode_cmd) cmd_decode(cfg, inputs, out_dir, overlay_dir, gt_dir);
    if (*roundtrip_cmd) cmd_roundtrip(cfg, inputs, sizes);
    if (*eval_cmd) cmd_eval(cfg, det_dir, inputs, report);
    if (*compare_cmd) cmd_compare(cfg, inputs, sizes);
  } catch (const GateFailure& e) {
    std::cerr << "bdreg: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const UsageError& e) {
    std::cerr << "bdreg: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ParseError& e) {
    std::cerr << "bdreg: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ParameterError& e) {
    std::cerr << "bdreg: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const DegenerateGeometryError& e) {
    std::cerr << "bdreg: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "bdreg: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
