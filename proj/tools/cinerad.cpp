#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cinerad/cinerad.hpp"

namespace {

using namespace cinerad;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("-c,--config", o.config_path, "Config file (JSON or key=value lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", o.out_dir, "Output directory (overrides out.dir)");
  cmd->add_option("--seed", o.seed, "Simulation seed (overrides sim.seed)");
  cmd->add_option("--set", o.sets, "Extra key=value override, repeatable")
      ->type_name("KEY=VALUE");
}

PipelineConfig build_config(const CommonOpts& o) {
  PipelineConfig cfg;
  if (!o.config_path.empty()) cfg = load_pipeline_config(o.config_path);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects KEY=VALUE, got '" + kv + "'");
    apply_config_kv(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  check_pipeline_config(cfg);
  return cfg;
}

void print_stages(const PipelineResult& res) {
  for (const auto& s : res.stages)
    std::printf("  %-12s %s  %.2fs\n", s.name.c_str(), s.cached ? "cached" : "ran   ",
                s.seconds);
}

void print_metrics(const PipelineResult& res) {
  if (res.metrics.empty()) return;
  std::printf("  %-14s %6s %9s %8s %8s %8s\n", "method", "R", "PSNR(dB)", "SSIM", "streak",
              "time(s)");
  for (const auto& m : res.metrics)
    std::printf("  %-14s %6.3g %9.2f %8.4f %8.4f %8.2f\n", m.method.c_str(), m.r, m.psnr_db,
                m.ssim_mean, m.sar_mean, m.recon_seconds);
}

int run_stage(const CommonOpts& o, const std::string& stop_after) {
  const PipelineConfig cfg = build_config(o);
  const PipelineResult res = run_pipeline(cfg, stop_after);
  print_stages(res);
  if (stop_after.empty()) {
    print_metrics(res);
    write_report(res.out_dir, res.metrics);
    std::printf("report: %s/report.txt\n", res.out_dir.c_str());
  }
  std::printf("output: %s\n", res.out_dir.c_str());
  return 0;
}

int run_report(const std::string& out_dir) {
  const auto rows = collect_metrics(out_dir);
  if (rows.empty()) {
    std::fprintf(stderr, "report: no metrics found under %s\n", out_dir.c_str());
    return 1;
  }
  write_report(out_dir, rows);
  for (const auto& m : rows)
    std::printf("  %-14s R=%-5.3g PSNR=%7.2f dB  SSIM=%6.4f  streak=%6.4f\n", m.method.c_str(),
                m.r, m.psnr_db, m.ssim_mean, m.sar_mean);
  std::printf("report: %s/report.txt\n", out_dir.c_str());
  return 0;
}

int run_profile(const std::string& in_path, const std::string& out_path,
                const std::string& pgm_path, long long column) {
  const ArrayC frames = npy::read<cdouble>(in_path);
  if (frames.ndim() != 3)
    throw std::invalid_argument("profile: expected a [frames, rows, cols] stack");
  const std::size_t col =
      column < 0 ? SIZE_MAX : static_cast<std::size_t>(column);
  const ArrayD prof = xt_profile(frames, col);
  npy::write(out_path, prof);
  std::printf("profile: %zu frames x %zu rows -> %s\n", prof.shape(0), prof.shape(1),
              out_path.c_str());
  if (!pgm_path.empty()) {
    write_pgm(pgm_path, prof);
    std::printf("preview: %s\n", pgm_path.c_str());
  }
  return 0;
}

int run_make_weights(const std::string& out_path, std::size_t channels, std::size_t blocks,
                     double scale, std::uint64_t seed) {
  const ProxWeights w =
      make_prox_weights(channels, blocks, static_cast<float>(scale), seed);
  save_prox_weights(out_path, w);
  std::printf("weights: %zu blocks, %zu channels, scale %g -> %s\n", blocks, channels, scale,
              out_path.c_str());
  return 0;
}

// Fast numerical sanity checks on the core operators. Exits nonzero if any fail.
int run_selftest() {
  int failures = 0;
  auto check = [&](const char* name, bool ok, double value, const char* what) {
    std::printf("[%s] %-34s %s = %.3e\n", ok ? "PASS" : "FAIL", name, what, value);
    if (!ok) ++failures;
  };

  const std::size_t n = 32;
  const Trajectory traj = make_trajectory(16, n);
  const NufftPlan plan = plan_nufft(n, traj.coords);
  auto eng = seeded_engine(7, 0);
  std::normal_distribution<double> gauss;
  auto fill_random = [&](ArrayC& a) {
    for (std::size_t i = 0; i < a.size(); ++i) a.flat(i) = {gauss(eng), gauss(eng)};
  };

  ArrayC x({n, n});
  fill_random(x);
  ArrayC y({traj.coords.shape(0) * traj.coords.shape(1)});
  fill_random(y);

  // Forward and adjoint must be exact transposes of each other.
  const ArrayC ax = nufft_forward(plan, x);
  const ArrayC aty = nufft_adjoint(plan, y);
  const cdouble lhs = dotc(y, ax);
  const cdouble rhs = dotc(aty, x);
  const double dot_err = std::abs(lhs - rhs) / std::abs(lhs);
  check("adjoint dot test", dot_err < 1e-12, dot_err, "rel err");

  // Gridded transform tracks the direct transform.
  const ArrayC exact = direct_dft(traj.coords, x);
  const double fwd_err = rel_l2(ax, exact);
  check("forward vs direct transform", fwd_err < 1e-4, fwd_err, "rel l2");

  // Uniform image: the spoke centre sample equals the pixel sum.
  ArrayC ones({n, n});
  ones.fill(cdouble{1.0, 0.0});
  const ArrayC dc = nufft_forward(plan, ones);
  const double dc_val = std::abs(dc(std::size_t{0}, n / 2));
  const double dc_err = std::abs(dc_val - double(n * n)) / double(n * n);
  check("uniform image centre sample", dc_err < 1e-4, dc_err, "rel err");

  // Projection transform round trip is exact.
  ArrayC ks({4, n, 3});
  fill_random(ks);
  const double sino_err = rel_l2(from_sinogram(to_sinogram(ks)), ks);
  check("sinogram round trip", sino_err < 1e-12, sino_err, "rel l2");

  // Zero-strength denoisers must pass signals through untouched.
  ArrayC frames({3, n, n});
  fill_random(frames);
  const double tv_err = rel_l2(temporal_tv_prox(frames, 0.0), frames);
  check("tv prox at tau=0", tv_err == 0.0, tv_err, "rel l2");
  const ProxWeights w0 = make_prox_weights(8, 2, 0.0f, 1);
  const double net_err = rel_l2(resnet_prox_infer(frames, 0.5, w0), frames);
  check("zero-weight prox identity", net_err == 0.0, net_err, "rel l2");

  // Density weights integrate to the area of the sampled disk.
  const DCFWeights dcf = compute_dcf(traj);
  double wsum = 0.0;
  for (std::size_t i = 0; i < dcf.w.size(); ++i) wsum += dcf.w.flat(i);
  const double area_err = std::abs(wsum - M_PI * 0.25) / (M_PI * 0.25);
  check("density weights vs disk area", area_err < 2e-2, area_err, "rel err");

  std::printf("%s (%d failure%s)\n", failures == 0 ? "selftest passed" : "selftest FAILED",
              failures, failures == 1 ? "" : "s");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic radial MRI reconstruction pipeline"};
  app.require_subcommand(1);

  CommonOpts run_o, sim_o, prep_o, comp_o, rec_o;
  std::string report_dir = "out";
  std::string prof_in, prof_out = "profile.npy", prof_pgm;
  long long prof_col = -1;
  std::string w_out = "weights.bin";
  std::size_t w_channels = 8, w_blocks = 3;
  double w_scale = 0.01;
  std::uint64_t w_seed = 1;

  auto* c_run = app.add_subcommand("run", "Run the full pipeline and write a report");
  add_common(c_run, run_o);
  auto* c_sim = app.add_subcommand("simulate", "Simulate raw spokes and ground truth");
  add_common(c_sim, sim_o);
  auto* c_prep =
      app.add_subcommand("preprocess", "Simulate, then whiten, phase-correct and gate");
  add_common(c_prep, prep_o);
  auto* c_comp = app.add_subcommand("compress", "Run through coil compression");
  add_common(c_comp, comp_o);
  auto* c_rec = app.add_subcommand("recon", "Run through reconstruction, skip scoring");
  add_common(c_rec, rec_o);

  auto* c_rep = app.add_subcommand("report", "Rebuild report.txt/csv from stored metrics");
  c_rep->add_option("-o,--out", report_dir, "Pipeline output directory")->required();

  auto* c_prof = app.add_subcommand("profile", "Extract a column-vs-time profile");
  c_prof->add_option("-i,--input", prof_in, "Frame stack (.npy, complex)")
      ->required()
      ->check(CLI::ExistingFile);
  c_prof->add_option("-o,--out", prof_out, "Output profile (.npy)");
  c_prof->add_option("--pgm", prof_pgm, "Optional PGM preview path");
  c_prof->add_option("--column", prof_col, "Image column (default: centre)");

  auto* c_w = app.add_subcommand("make-random-weights", "Write a denoiser weight file");
  c_w->add_option("-o,--out", w_out, "Output path");
  c_w->add_option("--channels", w_channels, "Hidden channels")->check(CLI::PositiveNumber);
  c_w->add_option("--blocks", w_blocks, "Residual blocks")->check(CLI::PositiveNumber);
  c_w->add_option("--scale", w_scale, "Weight scale (0 = identity)");
  c_w->add_option("--seed", w_seed, "RNG seed");

  auto* c_self = app.add_subcommand("selftest", "Quick numerical checks of the operators");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_run->parsed()) return run_stage(run_o, "");
    if (c_sim->parsed()) return run_stage(sim_o, "simulate");
    if (c_prep->parsed()) return run_stage(prep_o, "preprocess");
    if (c_comp->parsed()) return run_stage(comp_o, "compress");
    if (c_rec->parsed()) return run_stage(rec_o, "recon");
    if (c_rep->parsed()) return run_report(report_dir);
    if (c_prof->parsed()) return run_profile(prof_in, prof_out, prof_pgm, prof_col);
    if (c_w->parsed()) return run_make_weights(w_out, w_channels, w_blocks, w_scale, w_seed);
    if (c_self->parsed()) return run_selftest();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
