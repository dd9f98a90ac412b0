#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "flowsmooth/metrics.hpp"
#include "support.hpp"

using namespace flowsmooth;
using flowsmooth::test::TempDir;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

void genseq(const std::filesystem::path& dir, const std::string& kind, int size, int frames, double sigma = 10.0) {
  const Outcome r = invoke({"genseq", "--output-dir", dir.string(), "--kind", kind, "--width", std::to_string(size),
                            "--height", std::to_string(size), "--frames", std::to_string(frames), "--noise-sigma",
                            std::to_string(sigma)});
  REQUIRE(r.status == cli::kExitOk);
}

std::map<std::string, std::string> frames_only(const std::filesystem::path& dir) {
  auto files = test::snapshot_tree(dir);
  std::erase_if(files, [](const auto& kv) { return kv.first.rfind("frame_", 0) != 0; });
  return files;
}

}  // namespace

TEST_CASE("config text parsing") {
  const auto kv = cli::parse_config_text("# comment\n alpha = 0.25 \n\nPyramid_Levels=3  # trailing\nprefix = img_\n");
  CHECK(kv.at("alpha") == "0.25");
  CHECK(kv.at("pyramid-levels") == "3");
  CHECK(kv.at("prefix") == "img_");
  CHECK_THROWS_AS(cli::parse_config_text("alpha 0.3\n"), cli::UsageError);
}

TEST_CASE("apply_setting parses strictly") {
  cli::RunConfig c;
  cli::apply_setting(c, "alpha", "0.8");
  CHECK(c.smoothing.alpha == 0.8);
  cli::apply_setting(c, "pyramid-levels", "auto");
  CHECK_FALSE(c.smoothing.flow.pyramid_levels.has_value());
  cli::apply_setting(c, "occlusion-threshold", "1.5");
  REQUIRE(c.smoothing.occlusion_check.has_value());
  CHECK(c.smoothing.occlusion_check->threshold_px == 1.5);
  cli::apply_setting(c, "occlusion-threshold", "off");
  CHECK_FALSE(c.smoothing.occlusion_check.has_value());
  cli::apply_setting(c, "kind", "flat");
  CHECK(c.fixture.kind == FixtureKind::Flat);
  CHECK_THROWS_AS(cli::apply_setting(c, "alpha", "0.8x"), cli::UsageError);
  CHECK_THROWS_AS(cli::apply_setting(c, "iterations", "1.5"), cli::UsageError);
  CHECK_THROWS_AS(cli::apply_setting(c, "colour", "red"), cli::UsageError);
  CHECK_THROWS_AS(cli::apply_setting(c, "format", "gif"), cli::UsageError);
}

TEST_CASE("flags override the config file, which overrides defaults") {
  TempDir dir("prec");
  std::ofstream(dir / "run.cfg") << "kind = flat\nframes = 4\nwidth = 20\nheight = 20\n";
  const Outcome r = invoke({"genseq", "--config", (dir / "run.cfg").string(), "--frames", "2", "--output-dir",
                            (dir / "out").string()});
  REQUIRE(r.status == 0);
  CHECK(std::filesystem::exists(dir / "out" / "frame_000001.pgm"));
  CHECK_FALSE(std::filesystem::exists(dir / "out" / "frame_000002.pgm"));
  const Frame f = read_image(dir / "out" / "frame_000000.pgm");
  CHECK(f.width() == 20);
  CHECK((f.plane(0) == 128.0).all());
}

TEST_CASE("usage errors exit 2, pipeline errors exit 1") {
  TempDir dir("codes");
  Outcome r = invoke({"genseq", "--frames", "0", "--output-dir", dir.path().string()});
  CHECK(r.status == cli::kExitUsage);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(invoke({}).status == cli::kExitUsage);
  CHECK(invoke({"smooth", "--alpha", "2", "--input-dir", "a", "--output-dir", "b"}).status == cli::kExitUsage);
  CHECK(invoke({"smooth", "--input-dir", dir.path().string()}).status == cli::kExitUsage);
  CHECK(invoke({"smooth", "--bogus", "1"}).status == cli::kExitUsage);
  CHECK(invoke({"genseq", "--config", (dir / "nope.cfg").string(), "--output-dir", "x"}).status == cli::kExitUsage);

  r = invoke({"metrics", "--input-dir", (dir / "missing").string()});
  CHECK(r.status == cli::kExitPipeline);
  CHECK(r.err.rfind("error: ", 0) == 0);
  CHECK(r.out.empty());
}

TEST_CASE("genseq flat writes identical frames and metrics reports the sentinel line") {
  TempDir dir("flat");
  genseq(dir.path(), "flat", 24, 5);
  const auto files = frames_only(dir.path());
  REQUIRE(files.size() == 5);
  for (const auto& [name, bytes] : files) CHECK(bytes == files.begin()->second);
  const Outcome r = invoke({"metrics", "--input-dir", dir.path().string()});
  REQUIRE(r.status == 0);
  CHECK(r.out == "ITF=99.000000 dB  ISI=1.000000  MOFM=0.000000 px\n");
  CHECK(r.err.empty());
}

TEST_CASE("smooth --alpha 0 and static smoothing are byte-identical to the input") {
  TempDir noisy("a0"), still("still");
  genseq(noisy.path(), "static-noise", 32, 4);
  genseq(still.path(), "static-noise", 32, 4, 0.0);
  REQUIRE(invoke({"smooth", "--alpha", "0", "--input-dir", noisy.path().string(), "--output-dir",
                  (noisy / "out").string()})
              .status == 0);
  CHECK(frames_only(noisy / "out") == frames_only(noisy.path()));
  REQUIRE(invoke({"smooth", "--alpha", "0.8", "--input-dir", still.path().string(), "--output-dir",
                  (still / "out").string()})
              .status == 0);
  CHECK(frames_only(still / "out") == frames_only(still.path()));
}

TEST_CASE("metrics --flow-dir with constant (3,4) flow") {
  TempDir dir("flowdir");
  genseq(dir.path(), "static-noise", 24, 2);
  std::filesystem::create_directories(dir / "flows");
  write_flo(FlowField(24, 24, 3.0, 4.0), dir / "flows" / "pair_000001.flo");
  const Outcome r = invoke({"metrics", "--input-dir", dir.path().string(), "--flow-dir", (dir / "flows").string()});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("MOFM=5.000000 px") != std::string::npos);
}

TEST_CASE("smooth writes a manifest and flow dumps") {
  TempDir dir("manifest");
  genseq(dir.path(), "static-noise", 24, 3);
  REQUIRE(invoke({"smooth", "--input-dir", dir.path().string(), "--output-dir", (dir / "out").string(),
                  "--flow-out", (dir / "flows").string(), "--iterations", "20"})
              .status == 0);
  const std::string manifest = test::read_text(dir / "out" / "manifest.txt");
  CHECK(manifest.find("alpha = 0.5\n") != std::string::npos);
  CHECK(manifest.find("iterations = 20\n") != std::string::npos);
  CHECK(manifest.find("frame_count = 3\n") != std::string::npos);
  CHECK(manifest.find("frame.frame_000002.pgm = frame_000002.pgm fnv1a64:") != std::string::npos);
  CHECK(manifest.find("flow.pair_000002.flo = fnv1a64:") != std::string::npos);
  CHECK(read_flo(dir / "flows" / "pair_000001.flo").width() == 24);
  CHECK(cli::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(cli::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("repeated CLI runs and genseq runs are byte-identical") {
  TempDir a("rep_a"), b("rep_b");
  genseq(a.path(), "static-noise", 32, 4);
  genseq(b.path(), "static-noise", 32, 4);
  CHECK(test::snapshot_tree(a.path()) == test::snapshot_tree(b.path()));
  for (const TempDir* d : {&a, &b}) {
    REQUIRE(invoke({"smooth", "--input-dir", d->path().string(), "--output-dir", (*d / "out").string()}).status == 0);
    REQUIRE(invoke({"metrics", "--input-dir", (*d / "out").string(), "--report", (*d / "report.json").string(),
                    "--threads", d == &a ? "1" : "3"})
                .status == 0);
  }
  CHECK(test::snapshot_tree(a / "out") == test::snapshot_tree(b / "out"));
  CHECK(test::read_text(a / "report.json") == test::read_text(b / "report.json"));
}

TEST_CASE("CLI smooth + metrics equals the library pipeline") {
  TempDir dir("lib");
  genseq(dir.path(), "static-noise", 32, 4);
  REQUIRE(invoke({"smooth", "--alpha", "0.7", "--input-dir", dir.path().string(), "--output-dir",
                  (dir / "out").string()})
              .status == 0);
  const Outcome m = invoke({"metrics", "--input-dir", (dir / "out").string(), "--report", (dir / "r.json").string()});
  REQUIRE(m.status == 0);

  FixtureSpec spec;
  spec.width = spec.height = 32;
  spec.frame_count = 4;
  SmoothingParams p;
  p.alpha = 0.7;
  const SmoothedSequence smoothed = smooth_sequence(generate(spec).sequence, p);
  std::vector<Frame> q;
  for (const auto& f : smoothed.frames.frames()) q.push_back(quantize(f));
  const MetricsReport report = evaluate_sequence(SequenceHandle(std::move(q)));
  CHECK(test::read_text(dir / "r.json") == report_to_json(report));
  CHECK(m.out == summary_line(report) + "\n");
}
