// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowsmooth/fixtures.hpp"
#include "flowsmooth/image_io.hpp"
#include "flowsmooth/metrics.hpp"
#include "flowsmooth/smoothing.hpp"
#include "flowsmooth/warp.hpp"
#include "oracles/ema_reference.hpp"
#include "oracles/report_schema.hpp"
#include "oracles/ssim_reference.hpp"
#include "support.hpp"

using namespace flowsmooth;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SequenceHandle quantized(const SequenceHandle& seq) {
  std::vector<Frame> out;
  for (const auto& f : seq.frames()) out.push_back(quantize(f));
  return SequenceHandle(std::move(out));
}

FixtureSpec jitter_spec() {
  FixtureSpec spec;
  spec.kind = FixtureKind::StaticNoise;
  spec.width = spec.height = 256;
  spec.frame_count = 64;
  spec.noise_sigma = 10.0;
  spec.seed = 1;
  return spec;
}

Verdict improvement_direction() {
  const auto start = std::chrono::steady_clock::now();
  const SequenceHandle input = generate(jitter_spec()).sequence;
  MetricsOptions mo;
  mo.threads = 0;
  // The input pairs' flows are the same for the "before" report and every
  // alpha, so they are estimated once.
  const std::vector<FlowField> input_flows = estimate_pair_flows(input, mo.flow, mo.threads);
  const MetricsReport before = evaluate_sequence(input, input_flows, mo);
  bool ok = true;
  std::string detail = "before ITF " + fmt("%.3f", before.itf_db) + " ISI " + fmt("%.4f", before.isi) + " MOFM " +
                       fmt("%.4f", before.mofm_px) + ";";
  for (double a : {0.3, 0.5, 0.8}) {
    SmoothingParams p;
    p.alpha = a;
    const MetricsReport after = evaluate_sequence(quantized(smooth_sequence(input, p, input_flows).frames), mo);
    const bool dir = after.itf_db > before.itf_db && after.isi > before.isi && after.mofm_px < before.mofm_px;
    ok = ok && dir;
    detail += " a=" + fmt("%.1f", a) + ": " + fmt("%.3f", after.itf_db) + "/" + fmt("%.4f", after.isi) + "/" +
              fmt("%.4f", after.mofm_px) + (dir ? "" : " (wrong direction)") + ";";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok = ok && secs < 60.0;
  detail += " runtime " + fmt("%.1f", secs) + " s (< 60 s)";
  return {ok, detail};
}

Verdict ema_gain() {
  const FixtureSpec spec = jitter_spec();
  const SequenceHandle input = generate(spec).sequence;
  test::TempDir dir("acc_zero_flow");
  for (int t = 1; t < spec.frame_count; ++t)
    write_flo(FlowField(spec.width, spec.height), dir / pair_flow_file_name(static_cast<std::size_t>(t)));
  SmoothingParams p;
  p.alpha = 0.8;
  p.external_flow_dir = dir.path();
  MetricsOptions mo;
  mo.external_flow_dir = dir.path();
  const MetricsReport before = evaluate_sequence(input, mo);
  const MetricsReport after = evaluate_sequence(quantized(smooth_sequence(input, p).frames), mo);
  double gain = 0.0;
  const std::size_t n = after.per_pair.size();
  for (std::size_t i = n - 32; i < n; ++i) gain += after.per_pair[i].psnr_db - before.per_pair[i].psnr_db;
  gain /= 32.0;
  const double closed = oracle::ema_itf_gain_db(0.8);
  const double mc = oracle::ema_itf_gain_monte_carlo_db(0.8, 2'000'000, 17);
  const bool oracle_ok = std::abs(mc - closed) < 0.1;
  return {oracle_ok && std::abs(gain - closed) <= 1.5,
          "steady-state gain " + fmt("%.3f", gain) + " dB vs " + fmt("%.3f", closed) + " dB (+-1.5); Monte-Carlo " +
              fmt("%.3f", mc) + " dB"};
}

Verdict flow_accuracy() {
  FixtureSpec spec;
  spec.kind = FixtureKind::GlobalTranslation;
  spec.width = spec.height = 128;
  spec.frame_count = 10;
  spec.noise_sigma = 0.0;
  spec.shift_x = 2;
  const Fixture fx = generate(spec);
  double worst = 0.0;
  for (std::size_t t = 1; t < fx.sequence.size(); ++t)
    worst = std::max(worst, mean_endpoint_error(estimate_flow(fx.sequence[t - 1], fx.sequence[t]), fx.ground_truth[t - 1], 8));

  double still = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Frame f({base_texture(128, 128, seed)});
    still = std::max(still, max_magnitude(estimate_flow(f, f)));
  }
  return {worst <= 0.5 && still <= 1e-3,
          "worst interior EPE " + fmt("%.5f", worst) + " px (<= 0.5); identical-frame max " + fmt("%.2e", still) +
              " px (<= 1e-3)"};
}

Verdict metric_oracles() {
  std::mt19937_64 rng(2024);
  double psnr_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int w = 8 + i % 13, h = 8 + i % 7, c = i % 2 ? 3 : 1;
    const Frame a = test::random_byte_frame(rng, w, h, c);
    Frame b = test::random_real_frame(rng, w, h, c);
    if (i % 10 == 0) b = a;
    long double s = 0.0L;
    for (int ch = 0; ch < c; ++ch)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const long double d = static_cast<long double>(a(x, y, ch)) - b(x, y, ch);
          s += d * d;
        }
    const long double mse = s / (static_cast<long double>(w) * h * c);
    const double direct = mse < 1e-12L ? 99.0 : static_cast<double>(10.0L * std::log10(65025.0L / mse));
    psnr_err = std::max(psnr_err, std::abs(psnr(a, b) - direct));
  }
  double ssim_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Frame a = test::random_byte_frame(rng, 32, 32, 1);
    const Frame b = i % 2 ? test::random_byte_frame(rng, 32, 32, 1) : test::random_real_frame(rng, 32, 32, 1);
    ssim_err = std::max(ssim_err, std::abs(ssim(a, b) - oracle::ssim_reference(a.plane(0), b.plane(0))));
  }
  const double same = ssim(Frame(32, 32, 1, 0.0), Frame(32, 32, 1, 0.0));
  const double opposite = ssim(Frame(32, 32, 1, 0.0), Frame(32, 32, 1, 255.0));
  const double const_err = std::max(std::abs(same - 1.0), std::abs(opposite - 6.5025 / (65025.0 + 6.5025)));
  return {psnr_err <= 1e-9 && ssim_err <= 1e-6 && const_err <= 1e-8,
          "PSNR max err " + fmt("%.2e", psnr_err) + " dB (<= 1e-9); SSIM max err " + fmt("%.2e", ssim_err) +
              " (<= 1e-6); constant cases err " + fmt("%.2e", const_err) + " (<= 1e-8)"};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + FLOWSMOOTH_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

Verdict warp_blend_exactness() {
  std::mt19937_64 rng(77);
  bool warp_ok = true;
  for (int i = 0; i < 50; ++i) {
    const Frame f = test::random_real_frame(rng, 5 + i, 3 + i % 9, i % 2 ? 3 : 1);
    warp_ok = warp_ok && warp(f, FlowField(f.width(), f.height())) == f;
  }

  FixtureSpec spec = jitter_spec();
  spec.width = spec.height = 64;
  spec.frame_count = 8;
  test::TempDir dir("acc_alpha0");
  write_fixture(generate(spec), spec, dir.path());
  const bool cli_ok = run_cli("smooth --alpha 0 --input-dir \"" + dir.path().string() + "\" --output-dir \"" +
                              (dir / "out").string() + "\"") == 0;
  bool alpha0_ok = cli_ok;
  for (int t = 0; t < spec.frame_count && cli_ok; ++t) {
    const std::string name = frame_file_name(static_cast<std::size_t>(t), ImageFormat::Pgm);
    alpha0_ok = alpha0_ok && read_file_bytes(dir / name) == read_file_bytes(dir / "out" / name);
  }

  spec.noise_sigma = 0.0;
  const SequenceHandle still = generate(spec).sequence;
  bool fixed_ok = true;
  for (double a : {0.0, 0.3, 0.5, 0.8, 1.0}) {
    SmoothingParams p;
    p.alpha = a;
    const SmoothedSequence r = smooth_sequence(still, p);
    for (std::size_t t = 0; t < still.size(); ++t) fixed_ok = fixed_ok && r.frames[t] == still[t];
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> side(12, 24);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const int w = side(rng), h = side(rng), c = i % 3 == 0 ? 3 : 1;
    const Frame prev = test::random_real_frame(rng, w, h, c);
    const Frame gp = test::random_real_frame(rng, w, h, c);
    const Frame gc = test::random_real_frame(rng, w, h, c);
    SmoothingParams p;
    p.alpha = unit(rng);
    p.flow.iterations_per_level = 20;
    const StepResult r = smooth_step(prev, gp, gc, p);
    const Frame warped = warp(prev, r.flow);
    for (int ch = 0; ch < c; ++ch) {
      const PlaneD& o = r.frame.plane(ch);
      if (!((o >= warped.plane(ch).cwiseMin(gc.plane(ch))).all() && (o <= warped.plane(ch).cwiseMax(gc.plane(ch))).all()))
        ++violations;
    }
  }
  return {warp_ok && alpha0_ok && fixed_ok && violations == 0,
          std::string("warp(I,0)==I ") + (warp_ok ? "yes" : "no") + "; alpha 0 CLI byte-identical " +
              (alpha0_ok ? "yes" : "no") + "; static fixed point " + (fixed_ok ? "yes" : "no") +
              "; convex-bound violations " + std::to_string(violations) + "/1000"};
}

Verdict round_trips() {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> dim(1, 40);
  std::uniform_int_distribution<std::uint32_t> bits;
  test::TempDir dir("acc_rt");
  bool flo_ok = true;
  for (int i = 0; i < 100; ++i) {
    FlowField f(dim(rng), dim(rng));
    for (Eigen::Index k = 0; k < f.u.size(); ++k) {
      float a, b;
      do a = std::bit_cast<float>(bits(rng)); while (!std::isfinite(a));
      do b = std::bit_cast<float>(bits(rng)); while (!std::isfinite(b));
      f.u.data()[k] = a;
      f.v.data()[k] = b;
    }
    const auto path = dir / ("f" + std::to_string(i) + ".flo");
    write_flo(f, path);
    const FlowField back = read_flo(path);
    for (Eigen::Index k = 0; k < f.u.size() && flo_ok; ++k)
      flo_ok = std::bit_cast<std::uint64_t>(back.u.data()[k]) == std::bit_cast<std::uint64_t>(f.u.data()[k]) &&
               std::bit_cast<std::uint64_t>(back.v.data()[k]) == std::bit_cast<std::uint64_t>(f.v.data()[k]);
  }

  FixtureSpec spec = jitter_spec();
  spec.frame_count = 6;
  const SequenceHandle gray = generate(spec).sequence;
  bool pnm_ok = true;
  write_sequence(gray, dir / "pgm", ImageFormat::Pgm);
  const SequenceHandle gray_back = load_sequence(dir / "pgm");
  for (std::size_t t = 0; t < gray.size(); ++t) pnm_ok = pnm_ok && gray_back[t] == gray[t];
  std::vector<Frame> rgb;
  for (std::size_t t = 0; t + 2 < gray.size(); t += 3)
    rgb.emplace_back(std::vector<PlaneD>{gray[t].plane(0), gray[t + 1].plane(0), gray[t + 2].plane(0)});
  const SequenceHandle color(rgb);
  write_sequence(color, dir / "ppm", ImageFormat::Ppm);
  const SequenceHandle color_back = load_sequence(dir / "ppm");
  for (std::size_t t = 0; t < color.size(); ++t) pnm_ok = pnm_ok && color_back[t] == color[t];

  spec.width = spec.height = 64;
  spec.frame_count = 9;
  const MetricsReport report = evaluate_sequence(generate(spec).sequence);
  const nlohmann::json j = nlohmann::json::parse(report_to_json(report));
  const auto schema = oracle::report_schema_errors(j);
  double itf = 0, isi = 0, mofm = 0;
  for (const auto& p : report.per_pair) {
    itf += p.psnr_db;
    isi += p.ssim;
    mofm += p.flow_mag_px;
  }
  const double n = static_cast<double>(report.per_pair.size());
  const bool agg_ok = report.itf_db == itf / n && report.isi == isi / n && report.mofm_px == mofm / n;
  double json_sum = 0;
  for (const auto& p : j["per_pair"]) json_sum += p["psnr_db"].get<double>();
  const bool json_agg_ok = std::abs(j["itf_db"].get<double>() - json_sum / n) <= 1e-6;
  return {flo_ok && pnm_ok && schema.empty() && agg_ok && json_agg_ok,
          std::string(".flo bit-identical ") + (flo_ok ? "100/100" : "no") + "; PGM/PPM fixture frames " +
              (pnm_ok ? "identical" : "differ") + "; JSON schema " +
              (schema.empty() ? "valid" : "invalid: " + schema.front()) + "; aggregates = per-pair means " +
              (agg_ok && json_agg_ok ? "yes" : "no")};
}

Verdict cli_determinism() {
  test::TempDir root("acc_det");
  const std::string fixture = (root / "fixture").string();
  if (run_cli("genseq --output-dir \"" + fixture + "\"") != 0) return {false, "genseq failed"};
  const auto pipeline = [&](const std::string& tag, int threads) {
    const std::string out = (root / tag).string();
    return run_cli("smooth --input-dir \"" + fixture + "\" --output-dir \"" + out + "/frames\" --flow-out \"" + out +
                   "/flows\"") == 0 &&
           run_cli("metrics --input-dir \"" + out + "/frames\" --report \"" + out + "/report.json\" --threads " +
                   std::to_string(threads)) == 0;
  };
  if (!pipeline("run_a", 4) || !pipeline("run_b", 4)) return {false, "CLI run failed"};
  if (run_cli("metrics --input-dir \"" + (root / "run_a" / "frames").string() + "\" --report \"" +
              (root / "serial.json").string() + "\" --threads 1") != 0)
    return {false, "serial metrics run failed"};
  const auto a = test::snapshot_tree(root / "run_a"), b = test::snapshot_tree(root / "run_b");
  const bool trees = a == b && a.size() == 64 + 63 + 2;
  const bool serial = test::read_text(root / "serial.json") == a.at("report.json");
  return {trees && serial, std::to_string(a.size()) + " files per run, trees " + (trees ? "identical" : "differ") +
                               "; report with 4 threads vs 1 thread " + (serial ? "identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"1 smoothing raises ITF and ISI and lowers MOFM on the static-noise fixture", improvement_direction},
      {"2 EMA analytic gain with zero external flow", ema_gain},
      {"3 flow accuracy on global translation", flow_accuracy},
      {"4 metric oracles", metric_oracles},
      {"5 warping and blending exactness", warp_blend_exactness},
      {"6 format round-trips and report schema", round_trips},
      {"7 CLI determinism with parallel metrics", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
