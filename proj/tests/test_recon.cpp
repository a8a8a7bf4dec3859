#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

#include "cinerad/cinerad.hpp"
#include "helpers.hpp"

using namespace cinerad;
using test_helpers::fill_gaussian;
using test_helpers::tmp_path;

namespace {

// Small multi-phase problem: two cardiac phases built by splitting a
// golden-angle shot into even and odd spokes, with samples synthesized
// through the operator itself so forward/solver identities are exact.
struct MiniProblem {
  SensitivityMaps maps;
  SenseOperator op;
  ArrayC truth;            // [2 x n x n]
  std::vector<ArrayC> y;   // per phase [nc x M]
};

MiniProblem make_mini(std::size_t n = 16, std::size_t nsp = 16, std::size_t nc = 2) {
  MiniProblem m;
  m.maps = simulate_coils(nc, n);

  Trajectory traj = make_trajectory(nsp, n);
  RadialKSpace ks;
  ks.data = ArrayC({n, nsp, nc});  // contents unused, bins only carry geometry here
  std::vector<std::vector<std::size_t>> phases(2);
  for (std::size_t s = 0; s < nsp; ++s) phases[s % 2].push_back(s);
  BinnedKSpace bins = materialize_bins(ks, traj, phases);
  m.op = make_sense_operator(bins, m.maps);

  PhantomConfig pc = default_phantom_config(n);
  m.truth = ArrayC({2, n, n});
  for (std::size_t t = 0; t < 2; ++t) {
    ArrayD f = make_phantom_frame(pc, t == 0 ? 0.25 : 0.75, 0.0);
    for (std::size_t i = 0; i < n * n; ++i) m.truth.flat(t * n * n + i) = f.flat(i);
  }
  m.y = sense_forward(m.op, m.truth);
  return m;
}

// Dense matrix of A_t^H A_t assembled column by column from unit images.
Eigen::MatrixXcd dense_normal(const SenseOperator& op, std::size_t t) {
  const std::size_t np = op.n * op.n;
  Eigen::MatrixXcd h(np, np);
  ArrayC e({op.n, op.n});
  for (std::size_t p = 0; p < np; ++p) {
    e.fill(cdouble(0));
    e.flat(p) = cdouble(1);
    ArrayC col = sense_normal_phase(op, t, e);
    for (std::size_t q = 0; q < np; ++q) h(static_cast<Eigen::Index>(q),
                                           static_cast<Eigen::Index>(p)) = col.flat(q);
  }
  return h;
}

double tv_objective(const ArrayC& v, const ArrayC& x, double tau) {
  double q = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) q += std::norm(v.flat(i) - x.flat(i));
  return 0.5 * q + tau * temporal_tv(v);
}

}  // namespace

TEST_CASE("sense forward and adjoint are exact transposes", "[recon]") {
  MiniProblem m = make_mini();
  for (std::size_t t = 0; t < m.op.n_phases(); ++t) {
    ArrayC x({m.op.n, m.op.n});
    ArrayC y({m.op.n_coils(), m.op.n_samples(t)});
    fill_gaussian(x, 11, t);
    fill_gaussian(y, 12, t);

    ArrayC ax = sense_forward_phase(m.op, t, x);
    ArrayC aty = sense_adjoint_phase(m.op, t, y, false);
    const cdouble lhs = dotc(y, ax);   // <y, A x>
    const cdouble rhs = dotc(aty, x);  // <A^H y, x>
    REQUIRE(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs));
  }
}

TEST_CASE("density-weighted adjoint equals manual sample weighting", "[recon]") {
  MiniProblem m = make_mini();
  const std::size_t t = 0;
  ArrayC y({m.op.n_coils(), m.op.n_samples(t)});
  fill_gaussian(y, 13);

  ArrayC yw = y;
  const ArrayD& w = m.op.dcf[t];  // [N_sp_t x N_RO], sample m = s * nro + j
  for (std::size_t c = 0; c < yw.shape(0); ++c)
    for (std::size_t s = 0; s < yw.shape(1); ++s) yw(c, s) *= w.flat(s);

  ArrayC a = sense_adjoint_phase(m.op, t, y, true);
  ArrayC b = sense_adjoint_phase(m.op, t, yw, false);
  REQUIRE(rel_l2(a, b) < 1e-13);
  REQUIRE(rel_l2(a, sense_adjoint_phase(m.op, t, y, false)) > 1e-3);
}

TEST_CASE("gridding reconstruction stacks the weighted adjoint per phase", "[recon]") {
  MiniProblem m = make_mini();
  CineImage g = gridding_recon(m.op, m.y);
  REQUIRE(g.n_phases() == 2);
  REQUIRE(g.matrix() == m.op.n);
  for (std::size_t t = 0; t < 2; ++t) {
    ArrayC frame = sense_adjoint_phase(m.op, t, m.y[t], true);
    for (std::size_t i = 0; i < frame.size(); ++i)
      REQUIRE(g.frames.flat(t * frame.size() + i) == frame.flat(i));
  }
}

TEST_CASE("conjugate-gradient solve matches a dense factorization", "[recon]") {
  MiniProblem m = make_mini();
  const std::size_t n = m.op.n, np = n * n, tph = 2;

  const double lam = 0.5 * estimate_lipschitz(m.op);
  ArrayC z({tph, n, n});
  fill_gaussian(z, 21);

  CgResult cg = cg_solve_dc(m.op, m.y, lam, &z, 300, 0.0);
  REQUIRE(cg.x.shape(0) == tph);
  REQUIRE(cg.rel_residual.size() == tph);

  for (std::size_t t = 0; t < tph; ++t) {
    Eigen::MatrixXcd h = dense_normal(m.op, t);
    h += lam * Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(np),
                                          static_cast<Eigen::Index>(np));

    ArrayC aty = sense_adjoint_phase(m.op, t, m.y[t], false);
    Eigen::VectorXcd b(np);
    for (std::size_t q = 0; q < np; ++q)
      b(static_cast<Eigen::Index>(q)) = aty.flat(q) + lam * z.flat(t * np + q);

    Eigen::VectorXcd xd = h.llt().solve(b);
    double num = 0.0, den = 0.0;
    for (std::size_t q = 0; q < np; ++q) {
      num += std::norm(cg.x.flat(t * np + q) - xd(static_cast<Eigen::Index>(q)));
      den += std::norm(xd(static_cast<Eigen::Index>(q)));
    }
    REQUIRE(std::sqrt(num / den) < 1e-6);
    REQUIRE(cg.rel_residual[t] < 1e-8);
  }
}

TEST_CASE("conjugate-gradient solve validates its inputs", "[recon]") {
  MiniProblem m = make_mini();
  REQUIRE_THROWS_WITH(cg_solve_dc(m.op, m.y, -1.0, nullptr, 5), Catch::Matchers::ContainsSubstring("lambda"));
  ArrayC bad({1, m.op.n, m.op.n});
  REQUIRE_THROWS_WITH(cg_solve_dc(m.op, m.y, 0.1, &bad, 5), Catch::Matchers::ContainsSubstring("prior"));
  std::vector<ArrayC> one(m.y.begin(), m.y.begin() + 1);
  REQUIRE_THROWS_WITH(cg_solve_dc(m.op, one, 0.1, nullptr, 5), Catch::Matchers::ContainsSubstring("phase count"));
}

TEST_CASE("power iteration brackets the dense spectral norm", "[recon]") {
  MiniProblem m = make_mini();
  // The estimate targets the phase with the most samples; both phases tie
  // here, so the first is used.
  Eigen::MatrixXcd h = dense_normal(m.op, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const double lmax = es.eigenvalues().maxCoeff();

  const double est = estimate_lipschitz(m.op, 30);
  REQUIRE(est <= lmax * (1.0 + 1e-9));
  REQUIRE(est >= 0.85 * lmax);
}

TEST_CASE("temporal total variation sums frame-to-frame magnitudes", "[recon]") {
  ArrayC x({3, 2, 2});
  x.fill(cdouble(0));
  // One pixel steps 0 -> 3 -> 3+4i: |3| + |4i| = 7.
  x(1, 0, 1) = cdouble(3, 0);
  x(2, 0, 1) = cdouble(3, 4);
  // A constant pixel contributes nothing.
  x(0, 1, 1) = x(1, 1, 1) = x(2, 1, 1) = cdouble(2, -1);
  REQUIRE(temporal_tv(x) == Catch::Approx(7.0).margin(1e-12));

  ArrayC single({1, 2, 2});
  fill_gaussian(single, 31);
  REQUIRE(temporal_tv(single) == 0.0);
}

TEST_CASE("tv prox: zero threshold is the identity", "[recon]") {
  ArrayC x({4, 3, 3});
  fill_gaussian(x, 32);
  ArrayC out = temporal_tv_prox(x, 0.0, 50);
  for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(out.flat(i) == x.flat(i));
}

TEST_CASE("tv prox: a huge threshold averages each pixel over time", "[recon]") {
  const std::size_t t = 4, n = 3;
  ArrayC x({t, n, n});
  fill_gaussian(x, 33);
  ArrayC out = temporal_tv_prox(x, 1e9, 300);
  for (std::size_t i = 0; i < n * n; ++i) {
    cdouble mean(0);
    for (std::size_t f = 0; f < t; ++f) mean += x.flat(f * n * n + i);
    mean /= static_cast<double>(t);
    for (std::size_t f = 0; f < t; ++f)
      REQUIRE(std::abs(out.flat(f * n * n + i) - mean) < 1e-10);
  }
}

TEST_CASE("tv prox minimizes its variational objective", "[recon]") {
  ArrayC x({5, 2, 2});
  fill_gaussian(x, 34);
  const double tau = 0.3;
  ArrayC p = temporal_tv_prox(x, tau, 400);
  const double fp = tv_objective(p, x, tau);

  auto eng = seeded_engine(35, 0);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    ArrayC v = p;
    for (std::size_t i = 0; i < v.size(); ++i)
      v.flat(i) += 1e-2 * cdouble(dist(eng), dist(eng));
    REQUIRE(fp <= tv_objective(v, x, tau) + 1e-12);
  }
}

TEST_CASE("tv prox is non-expansive", "[recon]") {
  ArrayC a({4, 3, 3}), b({4, 3, 3});
  fill_gaussian(a, 36);
  fill_gaussian(b, 37);
  ArrayC pa = temporal_tv_prox(a, 0.5, 200);
  ArrayC pb = temporal_tv_prox(b, 0.5, 200);
  double dp = 0.0, dx = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dp += std::norm(pa.flat(i) - pb.flat(i));
    dx += std::norm(a.flat(i) - b.flat(i));
  }
  REQUIRE(std::sqrt(dp) <= std::sqrt(dx) * (1.0 + 1e-9));
}

TEST_CASE("accelerated solve decreases its objective monotonically", "[recon]") {
  MiniProblem m = make_mini();
  IgraspConfig cfg;
  cfg.n_iters = 15;
  IgraspResult res = igrasp_reconstruct(m.op, m.y, cfg);

  REQUIRE(res.objective.size() == cfg.n_iters + 1);
  REQUIRE(res.lambda > 0.0);
  REQUIRE(res.lipschitz > 0.0);
  for (std::size_t k = 0; k + 1 < res.objective.size(); ++k)
    REQUIRE(res.objective[k + 1] <= res.objective[k] * (1.0 + 1e-12) + 1e-12);
  REQUIRE(res.objective.back() < res.objective.front());

  CineImage grid = gridding_recon(m.op, m.y);
  REQUIRE(rel_l2(res.image.frames, m.truth) < rel_l2(grid.frames, m.truth));
}

TEST_CASE("unrolled tv solve reduces data-consistency residual per stage", "[recon]") {
  MiniProblem m = make_mini();
  UnrolledConfig cfg;
  cfg.n_stages = 4;
  cfg.n_cg = 8;
  UnrolledResult res = unrolled_reconstruct(m.op, m.y, cfg);

  REQUIRE(res.dc_before.size() == 4);
  REQUIRE(res.dc_after.size() == 4);
  REQUIRE(res.change.size() == 4);
  for (std::size_t k = 0; k < 4; ++k)
    REQUIRE(res.dc_after[k] <= res.dc_before[k] + 1e-12);

  CineImage grid = gridding_recon(m.op, m.y);
  REQUIRE(rel_l2(res.image.frames, m.truth) < rel_l2(grid.frames, m.truth));
}

TEST_CASE("single zero-weight denoiser stage equals one regularized solve", "[recon]") {
  MiniProblem m = make_mini();
  ProxWeights w = make_prox_weights(8, 2, 0.0f, 99);

  UnrolledConfig cfg;
  cfg.n_stages = 1;
  cfg.n_cg = 12;
  cfg.prox = ProxKind::resnet;
  cfg.weights = &w;
  UnrolledResult res = unrolled_reconstruct(m.op, m.y, cfg);

  ArrayC x0 = sense_adjoint(m.op, m.y, true);
  const double lam = cfg.lambda_rel * estimate_lipschitz(m.op, cfg.power_iters);
  CgResult cg = cg_solve_dc(m.op, m.y, lam, &x0, cfg.n_cg);
  REQUIRE(rel_l2(res.image.frames, cg.x) < 1e-13);
  REQUIRE(res.lambda == Catch::Approx(lam).epsilon(1e-12));
}

TEST_CASE("unrolled solve rejects a denoiser prox without weights", "[recon]") {
  MiniProblem m = make_mini();
  UnrolledConfig cfg;
  cfg.prox = ProxKind::resnet;
  REQUIRE_THROWS_WITH(unrolled_reconstruct(m.op, m.y, cfg),
                      Catch::Matchers::ContainsSubstring("weights"));
}

TEST_CASE("denoiser prox with zero weights is the exact identity", "[recon]") {
  ProxWeights w = make_prox_weights(6, 3, 0.0f, 7);
  ArrayC x({3, 8, 8});
  fill_gaussian(x, 41);
  ArrayC out = resnet_prox_infer(x, 0.3, w);
  for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(out.flat(i) == x.flat(i));
}

TEST_CASE("denoiser prox commutes with circular shifts", "[recon]") {
  ProxWeights w = make_prox_weights(6, 2, 0.05f, 8);
  const std::size_t nt = 3, n = 8;
  ArrayC x({nt, n, n});
  fill_gaussian(x, 42);

  const std::size_t st = 1, sy = 3, sx = 2;
  ArrayC xs({nt, n, n});
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t v = 0; v < n; ++v)
        xs((t + st) % nt, (y + sy) % n, (v + sx) % n) = x(t, y, v);

  ArrayC a = resnet_prox_infer(xs, 0.5, w);
  ArrayC b = resnet_prox_infer(x, 0.5, w);
  ArrayC bs({nt, n, n});
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t v = 0; v < n; ++v)
        bs((t + st) % nt, (y + sy) % n, (v + sx) % n) = b(t, y, v);
  REQUIRE(rel_l2(a, bs) < 1e-12);
}

TEST_CASE("denoiser prox responds to its stage conditioning", "[recon]") {
  ProxWeights w = make_prox_weights(6, 2, 0.05f, 9);
  ArrayC x({2, 8, 8});
  fill_gaussian(x, 43);
  ArrayC a = resnet_prox_infer(x, 0.0, w);
  ArrayC b = resnet_prox_infer(x, 1.0, w);
  REQUIRE(rel_l2(a, b) > 1e-9);
  REQUIRE_THROWS_WITH(resnet_prox_infer(x, 1.5, w), Catch::Matchers::ContainsSubstring("stage"));
}

TEST_CASE("denoiser weights survive a save/load round trip bitwise", "[recon]") {
  ProxWeights w = make_prox_weights(5, 2, 0.03f, 10);
  const std::string path = tmp_path("prox_weights.bin");
  save_prox_weights(path, w);
  ProxWeights r = load_prox_weights(path);

  REQUIRE(r.channels == w.channels);
  REQUIRE(r.n_blocks == w.n_blocks);
  auto same = [](const ConvKernel& a, const ConvKernel& b) {
    REQUIRE(a.w.size() == b.w.size());
    for (std::size_t i = 0; i < a.w.size(); ++i) REQUIRE(a.w.flat(i) == b.w.flat(i));
    REQUIRE(a.b == b.b);
  };
  same(r.stem, w.stem);
  for (std::size_t i = 0; i < w.n_blocks; ++i) {
    same(r.blocks[i].first, w.blocks[i].first);
    same(r.blocks[i].second, w.blocks[i].second);
  }
  same(r.head, w.head);
  std::remove(path.c_str());
}

TEST_CASE("denoiser weight loader rejects damaged containers", "[recon]") {
  ProxWeights w = make_prox_weights(4, 1, 0.03f, 11);
  const std::string path = tmp_path("prox_weights_bad.bin");
  save_prox_weights(path, w);

  {
    std::ifstream f(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(f)),
                            std::istreambuf_iterator<char>());
    std::ofstream g(path, std::ios::binary | std::ios::trunc);
    g.write(bytes.data(), 40);
  }
  REQUIRE_THROWS_WITH(load_prox_weights(path), Catch::Matchers::ContainsSubstring("truncated"));

  {
    std::ofstream g(path, std::ios::binary | std::ios::trunc);
    const char junk[] = "\x08\x00\x00\x00{\"k\":1}x";
    g.write(junk, sizeof(junk) - 1);
  }
  REQUIRE_THROWS_WITH(load_prox_weights(path),
                      Catch::Matchers::ContainsSubstring("not a weight container"));
  REQUIRE_THROWS_WITH(load_prox_weights(tmp_path("missing_weights.bin")),
                      Catch::Matchers::ContainsSubstring("cannot open"));
  std::remove(path.c_str());
}

TEST_CASE("sensitivity estimation recovers simulated coil maps", "[recon]") {
  const std::size_t n = 32, nc = 3, nsp = 64;
  SensitivityMaps maps = simulate_coils(nc, n);
  ArrayD img = make_phantom_frame(default_phantom_config(n), 0.3, 0.0);
  Trajectory traj = make_trajectory(nsp, n);

  ArrayC data({n, nsp, nc});
  ArrayC coil_img({n, n});
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t i = 0; i < n * n; ++i)
      coil_img.flat(i) = maps.maps.flat(c * n * n + i) * img.flat(i);
    ArrayC s = direct_dft(traj.coords, coil_img);
    for (std::size_t sp = 0; sp < nsp; ++sp)
      for (std::size_t j = 0; j < n; ++j) data(j, sp, c) = s.flat(sp * n + j);
  }

  SensitivityMaps est = estimate_sensitivities(data, traj.coords, n);
  REQUIRE(est.n_coils() == nc);
  REQUIRE(est.matrix() == n);

  double worst = 1.0, mean = 0.0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < n * n; ++i) {
    double rss = 0.0;
    cdouble coh(0);
    for (std::size_t c = 0; c < nc; ++c) {
      rss += std::norm(est.maps.flat(c * n * n + i));
      coh += est.maps.flat(c * n * n + i) * std::conj(maps.maps.flat(c * n * n + i));
    }
    if (rss > 0.0) REQUIRE(rss == Catch::Approx(1.0).margin(1e-9));
    if (img.flat(i) >= 0.5) {  // body interior; background tissue is 1.0
      // Unit coil vectors on both sides, so |coherence| = 1 means a
      // per-pixel phase factor is the only disagreement.
      worst = std::min(worst, std::abs(coh));
      mean += std::abs(coh);
      ++checked;
    }
  }
  REQUIRE(checked > 400);
  REQUIRE(worst > 0.9);
  REQUIRE(mean / static_cast<double>(checked) > 0.99);

  ArrayC flat({n, n});
  REQUIRE_THROWS_WITH(estimate_sensitivities(flat, traj.coords, n),
                      Catch::Matchers::ContainsSubstring("3-d"));
  REQUIRE_THROWS_WITH(estimate_sensitivities(data, traj.coords, n, 0.0),
                      Catch::Matchers::ContainsSubstring("taper_radius"));
}
