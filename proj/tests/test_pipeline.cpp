#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cinerad/cinerad.hpp"
#include "helpers.hpp"

using namespace cinerad;
using test_helpers::tmp_path;

namespace fs = std::filesystem;

namespace {

PipelineConfig mini_config(const std::string& out_dir) {
  PipelineConfig c;
  c.seed = 3;
  c.matrix_size = 24;
  c.n_coils = 3;
  c.n_phases = 3;
  c.duration_s = 2.0;
  c.tr_s = 0.004;
  c.noise_sigma = 0.5;
  c.gate_keep_fraction = 0.5;
  c.compress_method = "soc";
  c.n_virtual = 2;
  c.methods = {"gridding", "igrasp", "unrolled-tv"};
  c.accelerations = {2.0};
  c.igrasp_iters = 8;
  c.unrolled_stages = 2;
  c.unrolled_cg = 4;
  c.out_dir = out_dir;
  return c;
}

struct TmpDir {
  fs::path path;
  explicit TmpDir(const std::string& name) : path(tmp_path(name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TmpDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config survives a dump/load round trip", "[pipeline]") {
  PipelineConfig c;
  c.seed = 7;
  c.matrix_size = 32;
  c.n_readout = 48;
  c.n_coils = 5;
  c.noise_sigma = 0.25;
  c.phase_correct = false;
  c.gate_keep_fraction = 0.4;
  c.compress_method = "svd";
  c.n_virtual = 4;
  c.methods = {"gridding", "unrolled-resnet"};
  c.accelerations = {2.0, 8.0};
  c.weights_path = "weights.bin";
  c.out_dir = "study";
  c.previews = false;

  const std::string text = dump_pipeline_config(c);
  const std::string path = tmp_path("roundtrip.cfg");
  {
    std::ofstream f(path);
    f << text;
  }
  PipelineConfig r = load_pipeline_config(path);
  REQUIRE(dump_pipeline_config(r) == text);
  REQUIRE(r.seed == 7);
  REQUIRE(r.n_readout == 48);
  REQUIRE(r.phase_correct == false);
  REQUIRE(r.compress_method == "svd");
  REQUIRE(r.methods == std::vector<std::string>{"gridding", "unrolled-resnet"});
  REQUIRE(r.accelerations == std::vector<double>{2.0, 8.0});
  REQUIRE(r.weights_path == "weights.bin");
  REQUIRE(r.previews == false);
  fs::remove(path);
}

TEST_CASE("config loads from json with nested sections", "[pipeline]") {
  const std::string path = tmp_path("config.json");
  {
    std::ofstream f(path);
    f << R"({
      "sim": {"matrix_size": 32, "n_coils": 4, "seed": 11},
      "compress": {"n_virtual": 3},
      "recon": {"methods": ["gridding", "igrasp"], "accelerations": [4.0]},
      "out": {"dir": "j-out", "previews": false}
    })";
  }
  PipelineConfig c = load_pipeline_config(path);
  REQUIRE(c.matrix_size == 32);
  REQUIRE(c.n_coils == 4);
  REQUIRE(c.n_virtual == 3);
  REQUIRE(c.seed == 11);
  REQUIRE(c.methods == std::vector<std::string>{"gridding", "igrasp"});
  REQUIRE(c.accelerations == std::vector<double>{4.0});
  REQUIRE(c.out_dir == "j-out");
  REQUIRE(c.previews == false);
  fs::remove(path);
}

TEST_CASE("config parsing rejects unknown keys and malformed values", "[pipeline]") {
  PipelineConfig c;
  REQUIRE_THROWS_WITH(apply_config_kv(c, "bogus.key", "1"),
                      Catch::Matchers::ContainsSubstring("bogus.key"));
  REQUIRE_THROWS_WITH(apply_config_kv(c, "sim.matrix_size", "abc"),
                      Catch::Matchers::ContainsSubstring("sim.matrix_size"));
  REQUIRE_THROWS_WITH(apply_config_kv(c, "sim.noise_sigma", "0.1x"),
                      Catch::Matchers::ContainsSubstring("sim.noise_sigma"));
  REQUIRE_THROWS_WITH(apply_config_kv(c, "preprocess.gate", "maybe"),
                      Catch::Matchers::ContainsSubstring("preprocess.gate"));

  const std::string path = tmp_path("bad.cfg");
  {
    std::ofstream f(path);
    f << "sim.matrix_size 32\n";  // missing '='
  }
  REQUIRE_THROWS_WITH(load_pipeline_config(path), Catch::Matchers::ContainsSubstring("line 1"));
  fs::remove(path);
  REQUIRE_THROWS_WITH(load_pipeline_config(tmp_path("missing.cfg")),
                      Catch::Matchers::ContainsSubstring("cannot open"));
}

TEST_CASE("config validation enforces parameter ranges", "[pipeline]") {
  const auto expect_reject = [](void (*mod)(PipelineConfig&), const std::string& what) {
    PipelineConfig c;
    mod(c);
    REQUIRE_THROWS_WITH(check_pipeline_config(c), Catch::Matchers::ContainsSubstring(what));
  };
  expect_reject([](PipelineConfig& c) { c.matrix_size = 15; }, "matrix_size");
  expect_reject([](PipelineConfig& c) { c.tr_s = 0.0; }, "tr_s");
  expect_reject([](PipelineConfig& c) { c.rr_jitter_s = 2.0; }, "rr_jitter_s");
  expect_reject([](PipelineConfig& c) { c.gate_keep_fraction = 0.0; }, "keep_fraction");
  expect_reject([](PipelineConfig& c) { c.compress_method = "pca"; }, "compress.method");
  expect_reject([](PipelineConfig& c) { c.n_virtual = 9; }, "n_virtual");
  expect_reject([](PipelineConfig& c) { c.methods = {"magic"}; }, "magic");
  expect_reject([](PipelineConfig& c) { c.accelerations = {0.5}; }, "accelerations");
  expect_reject([](PipelineConfig& c) { c.out_dir = ""; }, "out.dir");
}

TEST_CASE("checksums match reference vectors and file contents", "[pipeline]") {
  REQUIRE(fnv1a64(std::string("")) == 0xcbf29ce484222325ull);
  REQUIRE(fnv1a64(std::string("a")) == 0xaf63dc4c8601ec8cull);
  REQUIRE(checksum_string("") == "cbf29ce484222325");
  REQUIRE(checksum_string("abc") != checksum_string("abd"));

  const std::string path = tmp_path("checksum.bin");
  {
    std::ofstream f(path, std::ios::binary);
    f << "payload\x00with bytes";
  }
  std::ifstream f(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  REQUIRE(checksum_file(path) == checksum_string(content));
  fs::remove(path);
  REQUIRE_THROWS_WITH(checksum_file(tmp_path("missing.bin")),
                      Catch::Matchers::ContainsSubstring("cannot open"));
}

TEST_CASE("pgm writer emits a valid binary header and payload", "[pipeline]") {
  ArrayD img({3, 5});
  for (std::size_t i = 0; i < img.size(); ++i) img.flat(i) = static_cast<double>(i);
  const std::string path = tmp_path("img.pgm");
  write_pgm(path, img, 100.0);

  std::ifstream f(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const std::string header = "P5\n5 3\n255\n";
  REQUIRE(content.size() == header.size() + 15);
  REQUIRE(content.compare(0, header.size(), header) == 0);
  // Shared window: the largest pixel maps to full scale.
  REQUIRE(static_cast<unsigned char>(content.back()) == 255);
  fs::remove(path);

  ArrayD bad({2, 2, 2});
  REQUIRE_THROWS_WITH(write_pgm(path, bad), Catch::Matchers::ContainsSubstring("2-d"));
}

TEST_CASE("montage tiles frames into a near-square grid", "[pipeline]") {
  ArrayD stack({3, 4, 4});
  for (std::size_t i = 0; i < stack.size(); ++i) stack.flat(i) = static_cast<double>(i);
  ArrayD m = montage(stack);
  REQUIRE(m.shape(0) == 9);  // 2 rows of 4 + 1 separator
  REQUIRE(m.shape(1) == 9);
  REQUIRE(m(0, 0) == stack(0, 0, 0));
  REQUIRE(m(0, 5) == stack(1, 0, 0));   // second tile starts after the separator column
  REQUIRE(m(5, 0) == stack(2, 0, 0));   // third tile wraps to the next grid row
  REQUIRE(m(4, 4) == 0.0);              // separator stays empty
  REQUIRE(m(5, 5) == 0.0);              // unused fourth cell stays empty
}

TEST_CASE("study pipeline runs, caches, and reruns on seed changes", "[pipeline]") {
  TmpDir dir("study");
  PipelineConfig cfg = mini_config(dir.path.string());

  PipelineResult res = run_pipeline(cfg);
  REQUIRE(res.metrics.size() == 3);
  for (const auto& m : res.metrics) {
    REQUIRE(std::isfinite(m.psnr_db));
    REQUIRE(m.psnr_db > 5.0);
    REQUIRE(m.ssim_mean > 0.0);
    REQUIRE(m.ssim_mean <= 1.0);
    REQUIRE(m.sar_mean >= 0.0);
    REQUIRE(m.r == 2.0);
  }

  REQUIRE(fs::exists(dir.path / "config.txt"));
  REQUIRE(fs::exists(dir.path / "manifest.json"));
  REQUIRE(fs::exists(dir.path / "sim/kspace.npy"));
  REQUIRE(fs::exists(dir.path / "sim/truth.npy"));
  REQUIRE(fs::exists(dir.path / "r2/recon-gridding.npy"));
  REQUIRE(fs::exists(dir.path / "r2/recon-igrasp.npy"));
  REQUIRE(fs::exists(dir.path / "r2/recon-unrolled-tv.npy"));
  REQUIRE(fs::exists(dir.path / "r2/metrics-igrasp.json"));
  REQUIRE(fs::exists(dir.path / "r2/maps.npy"));
  REQUIRE(fs::exists(dir.path / "r2/igrasp-trace.json"));
  REQUIRE(fs::exists(dir.path / "truth.pgm"));
  REQUIRE(fs::exists(dir.path / "r2/preview-gridding.pgm"));

  bool saw_fresh_sim = false;
  for (const auto& s : res.stages)
    if (s.name == "simulate") saw_fresh_sim = !s.cached;
  REQUIRE(saw_fresh_sim);

  // Same config again: every stage with a cache key reloads; evaluation is
  // always recomputed.
  PipelineResult again = run_pipeline(cfg);
  std::size_t cached = 0;
  for (const auto& s : again.stages) {
    if (s.name.rfind("evaluate", 0) == 0) continue;
    REQUIRE(s.cached);
    ++cached;
  }
  REQUIRE(cached >= 6);  // simulate, preprocess, compress, three recons

  // Metrics are recomputed either way and agree.
  REQUIRE(again.metrics.size() == res.metrics.size());
  for (std::size_t i = 0; i < res.metrics.size(); ++i) {
    REQUIRE(again.metrics[i].method == res.metrics[i].method);
    REQUIRE(again.metrics[i].psnr_db == Catch::Approx(res.metrics[i].psnr_db).margin(1e-9));
  }

  // A new seed invalidates the simulation stage.
  cfg.seed = 4;
  PipelineResult reseeded = run_pipeline(cfg);
  for (const auto& s : reseeded.stages)
    if (s.name == "simulate") REQUIRE(!s.cached);
}

TEST_CASE("metric rows round trip through the on-disk report", "[pipeline]") {
  TmpDir dir("report");
  PipelineConfig cfg = mini_config(dir.path.string());
  cfg.methods = {"gridding", "igrasp"};
  PipelineResult res = run_pipeline(cfg);

  std::vector<MethodMetrics> rows = collect_metrics(dir.path.string());
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].method == "gridding");  // sorted by acceleration, then name
  REQUIRE(rows[1].method == "igrasp");
  for (const auto& row : rows) {
    const MethodMetrics* src = nullptr;
    for (const auto& m : res.metrics)
      if (m.method == row.method) src = &m;
    REQUIRE(src != nullptr);
    REQUIRE(row.r == src->r);
    REQUIRE(row.psnr_db == Catch::Approx(src->psnr_db).margin(1e-9));
    REQUIRE(row.ssim_mean == Catch::Approx(src->ssim_mean).margin(1e-9));
    REQUIRE(row.sar_mean == Catch::Approx(src->sar_mean).margin(1e-9));
    REQUIRE(row.psnr_frames.size() == src->psnr_frames.size());
  }

  write_report(dir.path.string(), rows);
  REQUIRE(fs::exists(dir.path / "report.txt"));
  std::ifstream csv(dir.path / "report.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(csv, line)) ++lines;
  REQUIRE(lines == 3);  // header + one row per method

  REQUIRE_THROWS_WITH(collect_metrics(tmp_path("no_such_study")),
                      Catch::Matchers::ContainsSubstring("no such directory"));
}

TEST_CASE("pipeline honors stage stop points", "[pipeline]") {
  TmpDir dir("stopearly");
  PipelineConfig cfg = mini_config(dir.path.string());

  PipelineResult res = run_pipeline(cfg, "simulate");
  REQUIRE(res.metrics.empty());
  REQUIRE(fs::exists(dir.path / "sim/kspace.npy"));
  REQUIRE(fs::exists(dir.path / "manifest.json"));
  REQUIRE(!fs::exists(dir.path / "r2"));
  REQUIRE(res.stages.size() == 1);

  REQUIRE_THROWS_WITH(run_pipeline(cfg, "teardown"),
                      Catch::Matchers::ContainsSubstring("unknown stage"));
}

TEST_CASE("simulated spoke geometry matches the trajectory module", "[pipeline]") {
  TmpDir dir("geometry");
  PipelineConfig cfg = mini_config(dir.path.string());
  run_pipeline(cfg, "simulate");

  ArrayC ks = npy::read<cdouble>((dir.path / "sim/kspace.npy").string());
  const std::size_t nsp = static_cast<std::size_t>(cfg.duration_s / cfg.tr_s);
  REQUIRE(ks.shape(0) == cfg.matrix_size);
  REQUIRE(ks.shape(1) == nsp);
  REQUIRE(ks.shape(2) == cfg.n_coils);

  ArrayC truth = npy::read<cdouble>((dir.path / "sim/truth.npy").string());
  REQUIRE(truth.shape(0) == cfg.n_phases);
  REQUIRE(truth.shape(1) == cfg.matrix_size);

  ArrayD ts = npy::read<double>((dir.path / "sim/timestamps.npy").string());
  REQUIRE(ts.size() == nsp);
  REQUIRE(ts.flat(0) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(ts.flat(nsp - 1) == Catch::Approx(cfg.tr_s * static_cast<double>(nsp - 1)).margin(1e-9));
}
