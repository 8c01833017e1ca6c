// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero
// if any selected criterion fails.
//
//   acceptance                 run all criteria
//   acceptance --criterion N   run criterion N only

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "quadfit/chi_star.hpp"
#include "quadfit/distance.hpp"
#include "quadfit/dof.hpp"
#include "quadfit/error.hpp"
#include "quadfit/gof.hpp"
#include "quadfit/model.hpp"
#include "quadfit/quadrature.hpp"
#include "quadfit/score_centering.hpp"
#include "quadfit/spectral.hpp"
#include "quadfit/trace.hpp"

using namespace quadfit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// 1. Cramer–von Mises constants.
Outcome cvm_constants() {
  Outcome o;
  const auto ck = center_kernel(Kernel::cvm(), BaselineMeasure::uniform01());
  const auto t = null_traces(ck);
  const auto d = null_dof(ck);
  o.check(std::fabs(t.trace - 1.0 / 6.0) <= 1e-9, fmt("trace %.15g", t.trace));
  o.check(std::fabs(t.trace_sq - 1.0 / 90.0) <= 1e-9, fmt("trace_sq %.15g", t.trace_sq));
  o.check(std::fabs(d.dof - 2.5) <= 1e-9, fmt("dof %.15g", d.dof));
  return o;
}

// 2. Poisson series against the closed form, and the DOF formula.
Outcome poisson_closure() {
  Outcome o;
  for (double rho : {0.3, 0.5, 0.9}) {
    const auto k = Kernel::poisson(rho);
    const auto s = poisson_spectrum(rho, 60, false);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        const double th = kTwoPi * (i + 0.5) / 10.0;
        const double ph = kTwoPi * (j + 0.25) / 10.0;
        double series = 0.0;
        for (std::size_t n = 0; n < s.terms(); ++n)
          series += s.eigenvalues[n] * s.eigenfunctions[n](th) * s.eigenfunctions[n](ph);
        worst = std::max(worst, std::fabs(series - k(th, ph)));
      }
    o.check(worst <= 1e-9, fmt("rho=%.1f series max err %.3g", rho, worst));

    const auto full = poisson_spectrum(rho, geometric_terms(rho), true);
    const double d = sdof(full.sum() + full.tail_bound, full.sum_sq());
    o.check(std::fabs(d - poisson_dof(rho)) <= 1e-8, fmt("rho=%.1f sdof %.12g vs %.12g", rho, d, poisson_dof(rho)));
  }
  return o;
}

// 3. Mehler decomposition of the normal kernel.
Outcome mehler() {
  Outcome o;
  const auto p = mehler_params(1.0, 1.0);
  const double root = std::fabs(p.r * p.w - (1 - p.w) * (1 - p.w));
  o.check(root <= 1e-12, fmt("root residual %.3g", root));

  const auto rule = normal_rule(0.0, 1.0, 128);
  std::vector<double> gram(121, 0.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto g = mehler_eigenfunctions(p, 11, rule.nodes[i]);
    for (int m = 0; m <= 10; ++m)
      for (int n = 0; n <= 10; ++n) gram[m * 11 + n] += rule.weights[i] * g[m] * g[n];
  }
  double ortho = 0.0;
  for (int m = 0; m <= 10; ++m)
    for (int n = 0; n <= 10; ++n) ortho = std::max(ortho, std::fabs(gram[m * 11 + n] - (m == n ? 1.0 : 0.0)));
  o.check(ortho <= 1e-7, fmt("orthonormality err %.3g", ortho));

  const auto s = normal_spectrum(1.0, 1.0, 40);
  const auto k = Kernel::normal(1.0);
  double recon = 0.0;
  for (double x = -2.0; x <= 2.0 + 1e-12; x += 0.2)
    for (double y = -2.0; y <= 2.0 + 1e-12; y += 0.2) {
      const auto gx = mehler_eigenfunctions(p, 40, x);
      const auto gy = mehler_eigenfunctions(p, 40, y);
      double sum = 0.0;
      for (std::size_t n = 0; n < 40; ++n) sum += s.eigenvalues[n] * gx[n] * gy[n];
      recon = std::max(recon, std::fabs(sum - k(x, y)));
    }
  o.check(recon <= 1e-6, fmt("40-term reconstruction err %.3g", recon));

  const double target = 1.0 / std::sqrt(2.0 * oracle::kPi);
  const double gap = std::fabs(s.sum() - target);
  o.check(gap <= s.tail_bound * (1 + 1e-9) && std::fabs(s.sum() + s.tail_bound - target) <= 1e-12,
          fmt("sum %.15g, tail %.3g, target %.15g", s.sum(), s.tail_bound, target));
  return o;
}

// 4. V/U identity and Monte Carlo bias.
Outcome estimator_identities() {
  Outcome o;
  const auto ck = center_kernel(Kernel::cvm(), BaselineMeasure::uniform01());
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x(2 + rep);
    for (auto& v : x) v = u(rng);
    const double n = static_cast<double>(x.size());
    const auto mm = matrix_means(ck.matrix(x));
    double diag = 0.0;
    for (double xi : x) diag += ck(xi, xi);
    worst = std::max(worst, std::fabs(mm.v - (n - 1) / n * mm.u - diag / (n * n)));
  }
  o.check(worst <= 1e-12, fmt("identity max err %.3g", worst));

  std::vector<double> vs, us;
  for (int rep = 0; rep < 10000; ++rep) {
    std::vector<double> x(50);
    for (auto& v : x) v = u(rng);
    const auto mm = matrix_means(ck.matrix(x));
    vs.push_back(mm.v);
    us.push_back(mm.u);
  }
  const auto mv = oracle::moments(vs);
  const auto mu = oracle::moments(us);
  const double bias = (1.0 / 6.0) / 50.0;
  o.check(std::fabs(mu.mean) <= 3 * mu.se, fmt("mean U %.3g (se %.3g)", mu.mean, mu.se));
  o.check(std::fabs(mv.mean - bias) <= 3 * mv.se, fmt("mean V %.6g vs %.6g (se %.3g)", mv.mean, bias, mv.se));
  return o;
}

// 5. Simple-null calibration, Poisson kernel on the circle.
Outcome simple_null_calibration() {
  Outcome o;
  GofOptions opt;
  opt.seed = 5;
  const SimpleNullTest test(Kernel::poisson(0.5), BaselineMeasure::circle(), opt);
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  int spectral = 0, satterthwaite = 0;
  const int reps = 2000;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<double> x(200);
    for (auto& v : x) v = u(rng);
    const auto r = test(x);
    spectral += r.spectral->p < 0.05;
    satterthwaite += *r.satterthwaite < 0.05;
  }
  const double a = spectral / double(reps), b = satterthwaite / double(reps);
  o.check(a >= 0.035 && a <= 0.065, fmt("spectral rejection rate %.4f", a));
  o.check(b >= 0.03 && b <= 0.07, fmt("Satterthwaite rejection rate %.4f", b));
  return o;
}

// 6. Composite-null calibration and suppressed directions.
Outcome composite_null_calibration() {
  Outcome o;
  const auto model = normal_model();
  const auto kernel = Kernel::normal(1.0);
  GofOptions opt;
  opt.draws = 20000;
  opt.methods.satterthwaite = false;
  opt.spectrum.route = SpectrumRoute::quadrature;
  std::mt19937_64 rng(66);
  std::normal_distribution<double> z;
  int rejections = 0;
  const int reps = 2000;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<double> x(200);
    for (auto& v : x) v = z(rng);
    opt.seed = static_cast<std::uint64_t>(rep);
    rejections += composite_null_test(x, model, kernel, opt).spectral->p < 0.05;
  }
  const double rate = rejections / double(reps);
  o.check(rate >= 0.03 && rate <= 0.07, fmt("rejection rate %.4f", rate));

  const ScoreCenteredKernel sck(kernel, model, {0.0, 1.0});
  const auto nm = nystrom_matrices(sck, 2000, 6);
  const auto sup = suppressed_directions(nm.score_centered, nm.scores);
  o.check(sup.count == 3, fmt("suppressed directions %.0f", double(sup.count)));
  return o;
}

// 7. Pearson kernel on the independence model gives Pearson's X^2.
Outcome pearson_reduction() {
  Outcome o;
  std::mt19937_64 rng(77);
  GofOptions opt;
  opt.methods.spectral = false;
  opt.methods.satterthwaite = false;
  double worst = 0.0;
  int done = 0;
  while (done < 50) {
    const std::size_t rows = 2 + rng() % 4, cols = 2 + rng() % 4;
    const auto model = std::make_shared<IndependenceModel>(rows, cols);
    std::vector<double> w(rows * cols);
    std::gamma_distribution<double> g(0.7);
    for (auto& v : w) v = g(rng) + 1e-3;
    std::discrete_distribution<int> cell(w.begin(), w.end());
    std::vector<double> x(40 + rng() % 300);
    for (auto& v : x) v = cell(rng);
    GofTestResult r;
    try {
      r = composite_null_test(x, model, Kernel::pearson(), opt);
    } catch (const FitError&) {
      continue;  // an empty margin; draw another table
    }
    const double x2 = model->pearson_x2(x);
    worst = std::max(worst, std::fabs(r.statistic - x2) / std::max(1.0, x2));
    ++done;
  }
  o.check(worst <= 1e-10, fmt("max deviation from X^2 %.3g", worst));
  return o;
}

// 8. Cumulant theory.
Outcome cumulants() {
  Outcome o;
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mono = 0, ratio = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> lam(1 + rng() % 50);
    for (auto& v : lam) v = std::pow(u(rng), 1 + rep % 5) + 1e-9;
    const auto d = cumulant_diagnostics(lam, 8);
    for (std::size_t i = 1; i < d.normed.size(); ++i) mono += d.normed[i] > d.normed[i - 1] * (1 + 1e-12);
    for (double r : d.ratios) ratio += r < 1.0 - 1e-12;
  }
  o.check(mono == 0, fmt("monotonicity violations %.0f", mono));
  o.check(ratio == 0, fmt("ratio < 1 violations %.0f", ratio));

  auto geometric = [](double rho) {
    std::vector<double> v;
    for (std::size_t k = 1; k <= 200000; ++k) {
      const double l = std::pow(rho, static_cast<double>(k));
      if (l < 1e-300) break;
      v.push_back(l);
      v.push_back(l);
    }
    return v;
  };
  double worst = 0.0;
  for (double rho : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double expect = (1 + rho) * (1 + rho) / (1 + rho + rho * rho);
    worst = std::max(worst, std::fabs(cumulant_ratio(geometric(rho), 3) - expect));
  }
  o.check(worst <= 1e-10, fmt("skewness ratio max err %.3g", worst));

  const auto near = geometric(0.999);
  const double r3 = cumulant_ratio(near, 3);
  o.check(std::fabs(r3 - 4.0 / 3.0) <= 1e-2, fmt("rho=0.999 skewness ratio %.8f", r3));
  double lim = 0.0;
  for (int r = 3; r <= 8; ++r) lim = std::max(lim, std::fabs(cumulant_ratio(near, r) - std::pow(2.0, r - 1) / r));
  o.check(lim <= 1e-2, fmt("general-r limit max err %.3g", lim));
  return o;
}

// 9. Satterthwaite beats the normal reference.
Outcome approximation_ordering() {
  Outcome o;
  for (double rho : {0.5, 0.9}) {
    const auto s = poisson_spectrum(rho, geometric_terms(rho), true);
    const auto d = ChiStarDistribution::from_spectrum(s);
    const double mean = d.mean(), var = d.variance();
    const double sum_sq = s.sum_sq();
    const ChiStarTail mc(d, 1000000, 99);
    for (double level : {0.90, 0.95}) {
      const double q = mc.quantile(level);
      const double p = mc(q).p;
      const double sat = satterthwaite_tail(q, pearson_scale(mean, sum_sq), sdof(mean, sum_sq));
      const double nor = normal_tail(q, mean, var);
      o.check(std::fabs(sat - p) < std::fabs(nor - p),
              fmt("rho=%.1f q%.2f: |sat-mc| %.4f", rho, level, std::fabs(sat - p)) +
                  fmt(" vs |normal-mc| %.4f", std::fabs(nor - p)));
    }
  }
  return o;
}

// 10. Gauge invariance.
Outcome gauge_invariance() {
  Outcome o;
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<Kernel> bases = {Kernel::normal(0.7), Kernel::cvm(), Kernel::identity()};
  double worst = 0.0;
  for (int rep = 0; rep < 60; ++rep) {
    const auto& base = bases[rep % bases.size()];
    const double c1 = 4 * u(rng) - 2, c2 = 4 * u(rng) - 2, b = 10 * u(rng) - 5;
    auto a = [c1, c2](double t) { return c1 * t + c2 * std::sin(3 * t); };
    const auto shifted = gauge_shift(base, a, b);
    const std::size_t nf = 1 + rng() % 6, ng = 1 + rng() % 6;
    std::vector<double> fs(nf), fp(nf), gs(ng), gp(ng);
    double tf = 0.0, tg = 0.0;
    for (std::size_t i = 0; i < nf; ++i) fs[i] = u(rng), fp[i] = u(rng) + 0.01, tf += fp[i];
    for (std::size_t i = 0; i < ng; ++i) gs[i] = u(rng), gp[i] = u(rng) + 0.01, tg += gp[i];
    for (auto& p : fp) p /= tf;
    for (auto& p : gp) p /= tg;
    const auto f = BaselineMeasure::discrete(fs, fp);
    const auto g = BaselineMeasure::discrete(gs, gp);
    // brute-force oracle with the shifted kernel written out by hand
    const double oracle_d = oracle::four_term_distance(fs, fp, gs, gp, [&](double x, double y) {
      return base(x, y) + a(x) + a(y) + b;
    });
    const double d_base = quadratic_distance(f, g, base);
    const double d_shift = quadratic_distance(f, g, shifted);
    worst = std::max({worst, std::fabs(d_shift - d_base), std::fabs(oracle_d - d_base)});
  }
  o.check(worst <= 1e-10, fmt("max |d_K* - d_K| %.3g", worst));
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria = {
    {"Cramer-von Mises trace, trace_sq and DOF", cvm_constants},
    {"Poisson series closure and DOF formula", poisson_closure},
    {"Mehler decomposition of the normal kernel", mehler},
    {"V/U identity and Monte Carlo bias", estimator_identities},
    {"simple-null calibration (Poisson, n=200)", simple_null_calibration},
    {"composite-null calibration (normal model, n=200)", composite_null_calibration},
    {"Pearson kernel reduces to Pearson X^2", pearson_reduction},
    {"cumulant monotonicity, ratios and limits", cumulants},
    {"Satterthwaite closer than normal reference", approximation_ordering},
    {"gauge invariance of the quadratic distance", gauge_invariance},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(kCriteria.size())) {
    std::fprintf(stderr, "criterion must be in 1..%zu\n", kCriteria.size());
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = kCriteria[i].run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %zu: %s (%.1fs) -- %s\n", out.pass ? "PASS" : "FAIL", i + 1, kCriteria[i].name, secs,
                out.detail.c_str());
    std::fflush(stdout);
    all = all && out.pass;
  }
  return all ? 0 : 1;
}
