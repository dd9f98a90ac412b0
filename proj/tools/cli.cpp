#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "flowsmooth/metrics.hpp"
#include "flowsmooth/sequence.hpp"

namespace flowsmooth::cli {

namespace {

std::string normalize_key(std::string_view key) {
  std::string out;
  out.reserve(key.size());
  for (char c : key) out.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) throw UsageError("invalid value for " + key + ": '" + value + "'");
  return out;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys = {
      "input-dir", "output-dir", "prefix",     "alpha",  "pyramid-levels",      "lambda",
      "iterations", "warps",     "flow-dir",   "flow-out", "report",            "format",
      "threads",   "seed",       "kind",       "width",  "height",              "frames",
      "noise-sigma", "shift-x",  "shift-y",    "occlusion-threshold", "verbose",
  };
  return keys;
}

void log(const RunConfig& config, std::ostream& err, const std::string& line) {
  if (config.verbosity > 0) err << line << "\n";
}

std::string manifest_line(const std::string& key, const std::string& value) { return key + " = " + value + "\n"; }

std::string file_checksum(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const std::string_view view(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(view)));
  return std::string("fnv1a64:") + buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot create " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

MetricsOptions metrics_options(const RunConfig& config) {
  MetricsOptions options;
  options.flow = config.smoothing.flow;
  options.external_flow_dir = config.smoothing.external_flow_dir;
  options.threads = config.threads;
  return options;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    out[key] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& value) {
  const std::string key = normalize_key(raw_key);
  auto& flow = c.smoothing.flow;
  if (key == "input-dir") c.input_dir = value;
  else if (key == "output-dir") c.output_dir = value;
  else if (key == "prefix") c.prefix = value;
  else if (key == "alpha") c.smoothing.alpha = parse_number<double>(key, value);
  else if (key == "pyramid-levels") {
    if (value == "auto") flow.pyramid_levels.reset();
    else flow.pyramid_levels = parse_number<int>(key, value);
  }
  else if (key == "lambda") flow.smoothness_lambda = parse_number<double>(key, value);
  else if (key == "iterations") flow.iterations_per_level = parse_number<int>(key, value);
  else if (key == "warps") flow.warps_per_level = parse_number<int>(key, value);
  else if (key == "flow-dir") {
    if (value.empty()) c.smoothing.external_flow_dir.reset();
    else c.smoothing.external_flow_dir = value;
  }
  else if (key == "flow-out") c.flow_out = value;
  else if (key == "report") c.report_path = value;
  else if (key == "format") {
    const auto f = parse_image_format(value);
    if (!f) throw UsageError("format must be pgm, ppm or png, got '" + value + "'");
    c.format = f;
  }
  else if (key == "threads") c.threads = parse_number<unsigned>(key, value);
  else if (key == "seed") c.fixture.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "kind") {
    const auto k = parse_fixture_kind(value);
    if (!k) throw UsageError("kind must be static-noise, global-translation or flat, got '" + value + "'");
    c.fixture.kind = *k;
  }
  else if (key == "width") c.fixture.width = parse_number<int>(key, value);
  else if (key == "height") c.fixture.height = parse_number<int>(key, value);
  else if (key == "frames") c.fixture.frame_count = parse_number<int>(key, value);
  else if (key == "noise-sigma") c.fixture.noise_sigma = parse_number<double>(key, value);
  else if (key == "shift-x") c.fixture.shift_x = parse_number<int>(key, value);
  else if (key == "shift-y") c.fixture.shift_y = parse_number<int>(key, value);
  else if (key == "occlusion-threshold") {
    if (value == "off") c.smoothing.occlusion_check.reset();
    else c.smoothing.occlusion_check = OcclusionCheck{parse_number<double>(key, value)};
  }
  else if (key == "verbose") c.verbosity = parse_number<int>(key, value);
  else throw UsageError("unknown setting '" + raw_key + "'");
}

void validate(const RunConfig& c) {
  try {
    switch (c.command) {
      case Command::Smooth:
        if (!c.input_dir || !c.output_dir) throw UsageError("smooth needs --input-dir and --output-dir");
        c.smoothing.validate();
        break;
      case Command::Metrics:
        if (!c.input_dir) throw UsageError("metrics needs --input-dir");
        c.smoothing.flow.validate();
        break;
      case Command::Genseq:
        if (!c.output_dir) throw UsageError("genseq needs --output-dir");
        c.fixture.validate();
        break;
    }
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

int run_smooth(const RunConfig& config, std::ostream& /*out*/, std::ostream& err) {
  const SequenceHandle input = load_sequence(*config.input_dir, FramePattern{config.prefix, std::nullopt});
  log(config, err, "smooth: " + std::to_string(input.size()) + " frames, alpha " + format_real(config.smoothing.alpha));
  const SmoothedSequence result = smooth_sequence(input, config.smoothing);
  const ImageFormat format = config.format.value_or(natural_format(input));
  const auto names = write_sequence(result.frames, *config.output_dir, format);

  std::vector<std::string> flow_names;
  if (config.flow_out) {
    std::error_code ec;
    std::filesystem::create_directories(*config.flow_out, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + config.flow_out->string());
    for (std::size_t t = 1; t <= result.flows.size(); ++t) {
      flow_names.push_back(pair_flow_file_name(t));
      write_flo(result.flows[t - 1], *config.flow_out / flow_names.back());
    }
  }

  const auto& p = config.smoothing;
  std::string manifest;
  manifest += manifest_line("command", "smooth");
  manifest += manifest_line("alpha", format_real(p.alpha));
  manifest += manifest_line("pyramid_levels", p.flow.pyramid_levels ? std::to_string(*p.flow.pyramid_levels) : "auto");
  manifest += manifest_line("lambda", format_real(p.flow.smoothness_lambda));
  manifest += manifest_line("iterations", std::to_string(p.flow.iterations_per_level));
  manifest += manifest_line("warps", std::to_string(p.flow.warps_per_level));
  manifest += manifest_line("flow_source", p.external_flow_dir ? "external" : "internal");
  manifest += manifest_line("occlusion_check",
                            p.occlusion_check ? "forward-backward:" + format_real(p.occlusion_check->threshold_px) : "off");
  manifest += manifest_line("frame_count", std::to_string(result.frames.size()));
  manifest += manifest_line("width", std::to_string(result.frames.width()));
  manifest += manifest_line("height", std::to_string(result.frames.height()));
  manifest += manifest_line("channels", std::to_string(result.frames.channels()));
  manifest += manifest_line("format", std::string(extension(format)));
  for (std::size_t i = 0; i < names.size(); ++i)
    manifest += manifest_line("frame." + names[i], input.source_names()[i] + " " +
                                                       file_checksum(*config.output_dir / names[i]));
  for (const auto& name : flow_names) manifest += manifest_line("flow." + name, file_checksum(*config.flow_out / name));
  write_text(*config.output_dir / "manifest.txt", manifest);
  log(config, err, "smooth: wrote " + std::to_string(names.size()) + " frames to " + config.output_dir->string());
  return kExitOk;
}

int run_metrics(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const SequenceHandle input = load_sequence(*config.input_dir, FramePattern{config.prefix, std::nullopt});
  log(config, err, "metrics: " + std::to_string(input.size()) + " frames");
  const MetricsReport report = evaluate_sequence(input, metrics_options(config));
  if (config.report_path) {
    if (config.report_path->has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(config.report_path->parent_path(), ec);
    }
    write_text(*config.report_path, report_to_json(report));
  }
  out << summary_line(report) << "\n";
  return kExitOk;
}

int run_genseq(const RunConfig& config, std::ostream& /*out*/, std::ostream& err) {
  const Fixture fixture = generate(config.fixture);
  write_fixture(fixture, config.fixture, *config.output_dir);
  log(config, err, "genseq: wrote " + std::to_string(fixture.sequence.size()) + " " +
                       std::string(to_string(config.fixture.kind)) + " frames to " + config.output_dir->string());
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optical-flow-guided temporal smoothing and temporal-consistency metrics"};
  app.require_subcommand(1, 1);

  // Storage is per subcommand: CLI11 may touch the bound variables of
  // subcommands that were not selected.
  struct Bindings {
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;
    int verbose_count = 0;
  };
  std::vector<Bindings> bindings(3);

  const std::map<std::string, std::string> help = {
      {"input-dir", "directory of input frames"},
      {"output-dir", "directory for output frames"},
      {"prefix", "frame file prefix (default frame_)"},
      {"alpha", "blend weight of the warped previous output, in [0, 1] (default 0.5)"},
      {"pyramid-levels", "pyramid levels or 'auto' (default auto)"},
      {"lambda", "Horn-Schunck smoothness weight (default 15)"},
      {"iterations", "Jacobi iterations per warp pass (default 100)"},
      {"warps", "warp passes per pyramid level (default 3)"},
      {"flow-dir", "directory of pair_%06d.flo files to use instead of estimation"},
      {"flow-out", "directory to dump the per-pair flow fields"},
      {"report", "path of the JSON metrics report"},
      {"format", "output image format: pgm, ppm or png"},
      {"threads", "worker threads for per-pair metrics (0 = all cores, default 1)"},
      {"seed", "fixture seed (default 1)"},
      {"kind", "fixture kind: static-noise, global-translation or flat"},
      {"width", "fixture width (default 256)"},
      {"height", "fixture height (default 256)"},
      {"frames", "fixture frame count (default 64)"},
      {"noise-sigma", "fixture noise standard deviation (default 10)"},
      {"shift-x", "fixture per-frame horizontal shift in px"},
      {"shift-y", "fixture per-frame vertical shift in px"},
      {"occlusion-threshold", "enable forward-backward fallback with this threshold in px, or 'off'"},
  };

  const std::vector<std::pair<Command, std::string>> commands = {
      {Command::Smooth, "smooth"}, {Command::Metrics, "metrics"}, {Command::Genseq, "genseq"}};
  const std::map<std::string, std::string> descriptions = {
      {"smooth", "smooth a frame directory"},
      {"metrics", "compute ITF / ISI / MOFM for a frame directory"},
      {"genseq", "generate a synthetic fixture sequence"}};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const std::string& name = commands[i].second;
    Bindings& b = bindings[i];
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    for (const auto& key : setting_keys()) {
      if (key == "verbose") continue;
      b.options[key] = sub->add_option("--" + key, b.values[key], help.at(key));
    }
    sub->add_option("--config", b.config_path, "key = value settings file; flags take precedence");
    sub->add_flag("-v,--verbose", b.verbose_count, "log progress to standard error");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  RunConfig config;
  std::size_t active = 0;
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) active = i;
  config.command = commands[active].first;
  CLI::App* sub = subs[active];
  const Bindings& b = bindings[active];

  try {
    if (!b.config_path.empty())
      for (const auto& [key, value] : read_config_file(b.config_path)) apply_setting(config, key, value);
    for (const auto& [key, opt] : b.options)
      if (opt->count() > 0) apply_setting(config, key, b.values.at(key));
    if (b.verbose_count > 0) config.verbosity = b.verbose_count;
    validate(config);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << sub->help();
    return kExitUsage;
  }

  try {
    switch (config.command) {
      case Command::Smooth: return run_smooth(config, out, err);
      case Command::Metrics: return run_metrics(config, out, err);
      case Command::Genseq: return run_genseq(config, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return kExitPipeline;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("flowsmooth");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace flowsmooth::cli
