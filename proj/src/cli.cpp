#include "ecgd/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "ecgd/image_io.hpp"
#include "ecgd/pipeline.hpp"
#include "ecgd/serialize.hpp"
#include "ecgd/synth.hpp"

namespace ecgd::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kNoOverlap = "no-overlap";
constexpr const char* kOverlap = "overlap";

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ECGD_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

// Runs fn(i) for i in [0, jobs) on a small pool. Callers write results into
// slot i, so the output order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t jobs, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  const std::size_t workers = worker_count(jobs);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text(const fs::path& path) {
  const Bytes data = read_file(path);
  return std::string(data.begin(), data.end());
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finaliser
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string sample_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04zu", prefix, i);
  return buf;
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  fs::path out;
  std::size_t n_clean = 185;
  std::size_t n_overlap = 100;
  std::uint64_t seed = 0;
  double duration = 5.0;
  double rate = 100.0;
};

int cmd_synth(const SynthOptions& opt) {
  fs::create_directories(opt.out);
  const std::size_t total = opt.n_clean + opt.n_overlap;
  std::vector<json> entries(total);
  std::vector<std::string> errors(total);

  parallel_for(total, [&](std::size_t i) {
    const bool overlap = i >= opt.n_clean;
    const std::string id = overlap ? sample_id(kOverlap, i - opt.n_clean) : sample_id("clean", i);
    try {
      const std::uint64_t seed = sample_seed(opt.seed, i);
      const DigitalSignal sig = gen_signal(random_signal_spec(seed, opt.duration), opt.rate);
      const RenderSpec spec = random_render_spec(seed);
      const Rendering r = rasterize(sig, spec);
      write_file(opt.out / (id + ".png"), encode_png(r.image));
      write_file(opt.out / (id + ".mask.png"), encode_png(r.mask));
      write_text(opt.out / (id + ".json"), signal_to_json(sig));
      json entry = {{"id", id},
                    {"group", overlap ? kOverlap : kNoOverlap},
                    {"seed", seed},
                    {"grid", {{"width_pixels", r.grid.width_pixels}, {"height_pixels", r.grid.height_pixels}}},
                    {"clipped", r.clipped}};
      if (overlap) {
        const std::uint64_t other_seed = sample_seed(seed, 1);
        const DigitalSignal other = gen_signal(random_signal_spec(other_seed, opt.duration), opt.rate);
        const Contaminated c = inject_overlap(r.image, r.mask, other, spec, other_seed);
        write_file(opt.out / (id + ".overlap.png"), encode_png(c.image));
        write_file(opt.out / (id + ".overlap.mask.png"), encode_png(c.mask));
        entry["band"] = c.band_at_top ? "top" : "bottom";
        entry["mask_iou"] = iou(r.mask, c.mask);
      }
      entries[i] = std::move(entry);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      entries[i] = {{"id", id}, {"group", overlap ? kOverlap : kNoOverlap}, {"error", e.what()}};
    }
  });

  json manifest = {{"tool_version", kToolVersion},
                   {"command", "synth"},
                   {"seed", opt.seed},
                   {"n_clean", opt.n_clean},
                   {"n_overlap", opt.n_overlap},
                   {"duration_s", opt.duration},
                   {"rate", opt.rate},
                   {"samples", entries}};
  write_text(opt.out / "manifest.json", manifest.dump(2) + "\n");

  int status = kExitOk;
  for (std::size_t i = 0; i < total; ++i) {
    if (!errors[i].empty()) {
      std::cerr << "synth: " << entries[i]["id"].get<std::string>() << ": " << errors[i] << "\n";
      status = kExitSampleFailed;
    }
  }
  return status;
}

// ---------------------------------------------------------------- digitize

struct DigitizeOptions {
  fs::path input;
  fs::path out;
  fs::path companion;
  std::string variant = "clean";
  bool emit_diagnostics = false;
  PipelineConfig cfg;
};

struct Job {
  std::string id;
  fs::path input;
  fs::path companion;  // empty when absent
};

struct NameParts {
  std::string id;
  bool mask = false;
  bool overlap = false;
  bool derived = false;  // outputs of this tool
};

bool strip_suffix(std::string& s, std::string_view suffix) {
  if (s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
    s.resize(s.size() - suffix.size());
    return true;
  }
  return false;
}

NameParts parse_name(const fs::path& path) {
  NameParts parts;
  std::string base = path.stem().string();
  parts.mask = strip_suffix(base, ".mask");
  parts.derived = strip_suffix(base, ".pred");
  parts.overlap = strip_suffix(base, ".overlap");
  parts.id = base;
  return parts;
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".bmp";
}

std::vector<Job> collect_jobs(const DigitizeOptions& opt) {
  const bool mask_mode = opt.cfg.mode == InputMode::external_mask;
  const bool want_overlap = opt.variant == "overlap";
  std::vector<Job> jobs;
  if (fs::is_regular_file(opt.input)) {
    Job job{parse_name(opt.input).id, opt.input, opt.companion};
    jobs.push_back(job);
    return jobs;
  }
  if (!fs::is_directory(opt.input)) throw Error(Errc::io, "input not found: " + opt.input.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(opt.input)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  std::ranges::sort(files);
  for (const fs::path& f : files) {
    const NameParts parts = parse_name(f);
    if (parts.derived || parts.mask != mask_mode || parts.overlap != want_overlap) continue;
    Job job{parts.id, f, {}};
    if (mask_mode) {
      const fs::path companion = opt.input / (parts.id + (want_overlap ? ".overlap.png" : ".png"));
      if (fs::exists(companion)) job.companion = companion;
    }
    jobs.push_back(job);
  }
  return jobs;
}

int cmd_digitize(const DigitizeOptions& opt) {
  validate(opt.cfg);
  const std::vector<Job> jobs = collect_jobs(opt);
  fs::create_directories(opt.out);
  std::vector<json> entries(jobs.size());

  parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    json entry = {{"id", job.id}, {"input", job.input.filename().string()}};
    json timing = json::object();
    const char* stage = "decode";
    try {
      const auto t0 = std::chrono::steady_clock::now();
      Digitized result;
      if (opt.cfg.mode == InputMode::raw_image) {
        const RasterImage image = load_image(job.input);
        timing["decode"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        stage = "pipeline";
        result = digitize_raw(image, opt.cfg);
      } else {
        const BinaryMask mask = load_mask(job.input);
        std::optional<RasterImage> companion;
        if (!job.companion.empty()) companion = load_image(job.companion);
        timing["decode"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        stage = "pipeline";
        result = digitize_mask(mask, companion ? &*companion : nullptr, opt.cfg);
      }
      for (const auto& [name, ms] : result.diagnostics.stage_ms) timing[name] = ms;
      stage = "write";
      write_text(opt.out / (job.id + ".pred.json"), signal_to_json(result.signal));
      if (opt.emit_diagnostics) {
        write_text(opt.out / (job.id + ".diag.json"), diagnostics_to_json(result.diagnostics));
        write_file(opt.out / (job.id + ".pred.mask.png"), encode_png(result.diagnostics.traced_mask));
      }
      entry["status"] = "ok";
      entry["grid_source"] = result.diagnostics.grid_source;
    } catch (const Error& e) {
      entry["status"] = "error";
      entry["stage"] = e.stage().empty() ? stage : e.stage();
      entry["code"] = std::string(to_string(e.code()));
      entry["message"] = e.what();
    } catch (const std::exception& e) {
      entry["status"] = "error";
      entry["stage"] = stage;
      entry["message"] = e.what();
    }
    entry["timing_ms"] = timing;
    entries[i] = std::move(entry);
  });

  json manifest = {{"tool_version", kToolVersion},
                   {"command", "digitize"},
                   {"variant", opt.variant},
                   {"config", json::parse(config_to_json(opt.cfg))},
                   {"samples", entries}};
  write_text(opt.out / "run_manifest.json", manifest.dump(2) + "\n");

  int status = kExitOk;
  for (const json& e : entries) {
    if (e["status"] != "ok") {
      std::cerr << "digitize: " << e["id"].get<std::string>() << " failed in stage "
                << e["stage"].get<std::string>() << ": " << e["message"].get<std::string>() << "\n";
      status = kExitSampleFailed;
    }
  }
  std::cerr << "digitize: " << jobs.size() << " sample(s), " << (status == kExitOk ? "all ok" : "with failures")
            << "\n";
  return status;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  fs::path pred;
  fs::path ref;
  fs::path out;
  PipelineConfig cfg;
};

std::map<std::string, std::string> load_groups(const fs::path& ref_dir) {
  std::map<std::string, std::string> groups;
  const fs::path manifest = ref_dir / "manifest.json";
  if (!fs::exists(manifest)) return groups;
  const json j = json::parse(read_text(manifest));
  if (j.contains("samples")) {
    for (const json& s : j["samples"]) groups[s.at("id").get<std::string>()] = s.at("group").get<std::string>();
  }
  return groups;
}

std::string csv_number(double v) { return format_double(v); }

int cmd_evaluate(const EvaluateOptions& opt) {
  if (!fs::is_directory(opt.pred) || !fs::is_directory(opt.ref)) {
    throw Error(Errc::io, "prediction and reference directories must exist");
  }
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(opt.pred)) {
    std::string name = entry.path().filename().string();
    if (strip_suffix(name, ".pred.json")) ids.push_back(name);
  }
  std::ranges::sort(ids);
  const auto groups = load_groups(opt.ref);

  std::vector<std::string> paired;
  for (const std::string& id : ids) {
    if (fs::exists(opt.ref / (id + ".json"))) {
      paired.push_back(id);
    } else {
      std::cerr << "evaluate: no reference for " << id << ", excluded\n";
    }
  }

  struct Row {
    std::string id;
    std::string group;
    std::optional<EvalReport> report;
    std::string error;
  };
  std::vector<Row> rows(paired.size());
  parallel_for(paired.size(), [&](std::size_t i) {
    Row& row = rows[i];
    row.id = paired[i];
    if (auto it = groups.find(row.id); it != groups.end()) {
      row.group = it->second;
    } else {
      row.group = fs::exists(opt.ref / (row.id + ".overlap.png")) ? kOverlap : kNoOverlap;
    }
    try {
      const DigitalSignal pred = signal_from_json(read_text(opt.pred / (row.id + ".pred.json")));
      const DigitalSignal ref = signal_from_json(read_text(opt.ref / (row.id + ".json")));
      EvalReport report = evaluate(pred, ref, opt.cfg);
      const fs::path pred_mask = opt.pred / (row.id + ".pred.mask.png");
      const fs::path ref_mask = opt.ref / (row.id + ".mask.png");
      if (fs::exists(pred_mask) && fs::exists(ref_mask)) report.iou = iou(load_mask(pred_mask), load_mask(ref_mask));
      row.report = report;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });

  std::ostringstream csv;
  csv << "id,group,mse,pearson,lag,iou\n";
  std::map<std::string, std::vector<EvalReport>> by_group;
  int status = kExitOk;
  for (const Row& row : rows) {
    if (!row.report) {
      csv << row.id << ',' << row.group << ",NA,NA,NA,NA\n";
      std::cerr << "evaluate: " << row.id << ": " << row.error << "\n";
      status = kExitSampleFailed;
      continue;
    }
    const EvalReport& r = *row.report;
    csv << row.id << ',' << row.group << ',' << csv_number(r.mse) << ',' << csv_number(r.pearson) << ',' << r.lag
        << ',' << (r.iou ? csv_number(*r.iou) : std::string()) << '\n';
    by_group[row.group].push_back(r);
  }
  csv << "\ngroup,n,mse_mean,mse_std,mse_max,rho_mean,rho_min,rho_std\n";
  std::vector<std::string> order{kNoOverlap, kOverlap};
  for (const auto& [name, _] : by_group) {
    if (std::ranges::find(order, name) == order.end()) order.push_back(name);
  }
  for (const std::string& name : order) {
    auto it = by_group.find(name);
    if (it == by_group.end()) continue;
    const AggregateReport a = aggregate(it->second, name);
    csv << a.group << ',' << a.n << ',' << csv_number(a.mse_mean) << ',' << csv_number(a.mse_std) << ','
        << csv_number(a.mse_max) << ',' << csv_number(a.rho_mean) << ',' << csv_number(a.rho_min) << ','
        << csv_number(a.rho_std) << '\n';
  }

  if (opt.out.empty()) {
    std::cout << csv.str();
  } else {
    if (opt.out.has_parent_path()) fs::create_directories(opt.out.parent_path());
    write_text(opt.out, csv.str());
  }
  return status;
}

// ---------------------------------------------------------------- grid

int cmd_grid(const fs::path& image_path) {
  const RasterImage image = load_image(image_path);
  LineSet lines;
  const GridGeometry grid = detect_grid(image, &lines);
  std::cout << grid_to_json(grid, &lines) << "\n";
  return kExitOk;
}

void add_pipeline_flags(CLI::App& cmd, PipelineConfig& cfg) {
  cmd.add_option("--rate", cfg.rate, "Output sampling rate in Hz")->capture_default_str();
  cmd.add_option("--alpha", cfg.alpha, "Weight of step length against turn angle")->capture_default_str();
  cmd.add_option("--angle-scale", cfg.angle_scale, "Multiplier on the turn angle (radians)")
      ->capture_default_str();
  cmd.add_option("--hedge-floor", cfg.hedge_floor, "Lowest hedging factor")->capture_default_str();
  cmd.add_option("--hedge-step", cfg.hedge_step, "Multiplicative hedging decrement")->capture_default_str();
  cmd.add_option("--lag-window", cfg.lag_window, "Largest lag searched, in samples")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"ECG trace image digitizer"};
  app.name(args.empty() ? "ecgd" : args.front());
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--n-clean", synth.n_clean, "Samples without overlap")->capture_default_str();
  synth_cmd->add_option("--n-overlap", synth.n_overlap, "Samples with an intruding trace")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Corpus seed")->capture_default_str();
  synth_cmd->add_option("--duration", synth.duration, "Signal length in seconds")->capture_default_str();
  synth_cmd->add_option("--rate", synth.rate, "Ground-truth sampling rate in Hz")->capture_default_str();

  DigitizeOptions dig;
  std::string mode = "raw";
  std::string fallback = "error";
  std::optional<double> grid_px;
  auto* dig_cmd = app.add_subcommand("digitize", "Convert images or masks to signals");
  dig_cmd->add_option("--input", dig.input, "Image/mask file or directory")->required();
  dig_cmd->add_option("--out", dig.out, "Output directory")->required();
  dig_cmd->add_option("--mode", mode, "raw or mask")->check(CLI::IsMember({"raw", "mask"}))->capture_default_str();
  dig_cmd->add_option("--variant", dig.variant, "clean or overlap inputs in a corpus directory")
      ->check(CLI::IsMember({"clean", "overlap"}))
      ->capture_default_str();
  dig_cmd->add_option("--companion", dig.companion, "Color image for grid detection (single mask input)");
  dig_cmd->add_flag("--denoise", dig.cfg.denoise, "Drop tiny components after binarization");
  dig_cmd->add_flag("--emit-diagnostics", dig.emit_diagnostics, "Write <id>.diag.json and <id>.pred.mask.png");
  dig_cmd->add_option("--grid-fallback", fallback, "error or assume-square-default")
      ->check(CLI::IsMember({"error", "assume-square-default"}))
      ->capture_default_str();
  dig_cmd->add_option("--grid-px", grid_px, "Pixels per large square when the grid is not measured");
  add_pipeline_flags(*dig_cmd, dig.cfg);

  EvaluateOptions ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Score predictions against references");
  ev_cmd->add_option("--pred", ev.pred, "Directory of <id>.pred.json")->required();
  ev_cmd->add_option("--ref", ev.ref, "Directory of <id>.json references")->required();
  ev_cmd->add_option("--out", ev.out, "CSV report path (stdout when omitted)");
  ev_cmd->add_option("--lag-window", ev.cfg.lag_window, "Largest lag searched, in samples")->capture_default_str();

  fs::path grid_image;
  auto* grid_cmd = app.add_subcommand("grid", "Print the detected grid geometry as JSON");
  grid_cmd->add_option("image", grid_image, "Color ECG image")->required();

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth);
    if (*dig_cmd) {
      dig.cfg.mode = mode == "mask" ? InputMode::external_mask : InputMode::raw_image;
      dig.cfg.grid_fallback = fallback == "error" ? GridFallback::error : GridFallback::assume_square_default;
      dig.cfg.grid_px = grid_px;
      if (dig.cfg.grid_fallback == GridFallback::assume_square_default && !grid_px) {
        std::cerr << "digitize: --grid-fallback assume-square-default needs --grid-px\n";
        return kExitUsage;
      }
      try {
        validate(dig.cfg);
      } catch (const Error& e) {
        std::cerr << "digitize: " << e.what() << "\n";
        return kExitUsage;
      }
      return cmd_digitize(dig);
    }
    if (*ev_cmd) return cmd_evaluate(ev);
    if (*grid_cmd) return cmd_grid(grid_image);
  } catch (const Error& e) {
    std::cerr << app.get_name() << ": " << to_string(e.code()) << ": " << e.what() << "\n";
    return e.code() == Errc::io ? kExitUsage : kExitSampleFailed;
  } catch (const std::exception& e) {
    std::cerr << app.get_name() << ": " << e.what() << "\n";
    return kExitSampleFailed;
  }
  return kExitUsage;
}

}  // namespace ecgd::cli
