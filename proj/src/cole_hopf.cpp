#include "kpzlab/cole_hopf.hpp"

#include <array>
#include <cmath>

#include "kpzlab/run.hpp"
#include "kpzlab/stats.hpp"

namespace kpzlab {

std::vector<double> q_process(const std::vector<double>& density, double dt) {
  std::vector<double> q{0.0};
  for (double d : density) q.push_back(q.back() + dt * d);
  return q;
}

DriftRegression drift_slope(const SimConfig& cfg, long n_samples, long record_every) {
  if (cfg.lambda == 0) throw std::domain_error("drift_slope: lambda = 0");
  if (record_every < 1) throw std::invalid_argument("drift_slope: record_every must be >= 1");
  const long steps = cfg.steps();
  const int kmax = cfg.K / 4;
  Observer<double> obs = [&](long s, CoupledSbe<double>& sim, const StepInfo<double>&, PathRecord& rec) {
    if (s % record_every == 0 || s == steps) {
      rec.stamp(double(sim.time()));
      rec.put("gap", sim.gap());
    }
    if (s == steps) {
      const double e = hminus1_field_norm(sim.gradient_discrepancy(), kmax);
      rec.series["grad_err2"].assign(rec.t.size(), e * e);
      rec.series["nonpositive"].assign(rec.t.size(), double(sim.nonpositive_count()));
    }
  };
  const auto recs = run_ensemble<double>(cfg, n_samples, obs, true);

  DriftRegression r;
  const auto mc = aggregate(recs, "gap");
  r.t = mc.t;
  r.mean_gap = mc.mean;
  r.stderr_ = mc.stderr_;
  const double lam = normalize_parameters(cfg.nu, cfg.D, cfg.lambda).lambda;
  r.target = lam * lam * lam / 12.0;

  const auto fit = ols(r.t, r.mean_gap);
  r.slope = fit.slope;
  r.residual_rms = fit.residual_rms;
  // slopes of individual samples carry the time correlation honestly
  std::vector<double> per, g2;
  for (auto& rec : recs) {
    per.push_back(ols(rec.t, rec["gap"]).slope);
    g2.push_back(rec["grad_err2"].back());
    r.nonpositive += long(rec["nonpositive"].back());
  }
  r.slope_stderr = per.size() > 1 ? standard_error(per) : fit.slope_stderr;
  r.gradient_error = std::sqrt(mean(g2));
  return r;
}

SelfConvergence self_convergence(const SimConfig& cfg, long n_samples, const std::vector<int>& refinements) {
  if (refinements.size() < 3) throw std::invalid_argument("self_convergence: need >= 3 levels");
  const int finest = refinements.back();
  for (int m : refinements)
    if (m < 1 || finest % m != 0) throw std::invalid_argument("self_convergence: levels must divide the finest");
  if (cfg.lambda == 0) throw std::domain_error("self_convergence: lambda = 0");
  const long coarse_steps = cfg.steps();
  const int kmax = cfg.K / 4;
  const std::size_t nl = refinements.size();

  auto per_sample = parallel_map<std::vector<double>>(n_samples, [&](long i) {
    Stream rng(cfg.seed, static_cast<std::uint64_t>(i));
    const auto u0 = sample_white_noise<double>(cfg.K, rng);
    std::vector<CoupledSbe<double>> sims;
    for (int m : refinements) {
      SimConfig c = cfg;
      c.dt = cfg.dt / m;
      sims.emplace_back(c);
      sims.back().initialize(u0);
    }
    const double h_half = double(sims.back().workspace().dt) / 2;  // finest half-step
    std::vector<NoiseIncrement<double>> acc(nl);
    auto reset = [&](NoiseIncrement<double>& n) {
      n.a = CoeffVector<double>::Zero(cfg.K + 1);
      n.b = CoeffVector<double>::Zero(cfg.K + 1);
      n.w0 = 0;
    };
    for (auto& a : acc) reset(a);
    const long fine_halves = 2 * coarse_steps * finest;
    for (long j = 0; j < fine_halves; ++j) {
      const CoeffVector<double> inc = sample_white_noise<double>(cfg.K, rng).c * std::sqrt(h_half);
      const double w = rng.gaussian() * std::sqrt(h_half);
      for (std::size_t l = 0; l < nl; ++l) {
        const long per_half = finest / refinements[l];  // fine halves per half-step at this level
        const long pos = j % (2 * per_half);
        (pos < per_half ? acc[l].a : acc[l].b) += inc;
        acc[l].w0 += w;
        if (pos == 2 * per_half - 1) {
          sims[l].step(acc[l]);
          reset(acc[l]);
        }
      }
    }
    std::vector<double> e2;
    for (auto& s : sims) {
      const double e = hminus1_field_norm(s.gradient_discrepancy(), kmax);
      e2.push_back(e * e);
    }
    return e2;
  });

  SelfConvergence sc;
  for (std::size_t l = 0; l < nl; ++l) {
    std::vector<double> col;
    for (auto& v : per_sample) col.push_back(v[l]);
    sc.dts.push_back(cfg.dt / refinements[l]);
    sc.errors.push_back(std::sqrt(mean(col)));
  }
  sc.decreasing = true;
  for (std::size_t l = 0; l + 1 < nl; ++l) sc.decreasing = sc.decreasing && sc.errors[l + 1] < sc.errors[l];
  double acc = 0;
  for (std::size_t l = 0; l + 2 < nl; ++l) {
    const double d0 = sc.errors[l] - sc.errors[l + 1], d1 = sc.errors[l + 1] - sc.errors[l + 2];
    const double ratio = sc.dts[l] / sc.dts[l + 1];
    const double p = std::log(d0 / d1) / std::log(ratio);
    sc.orders.push_back(p);
    acc += p;
  }
  sc.order = acc / double(sc.orders.size());
  return sc;
}

DecayStudy remainder_decay(const SimConfig& cfg, const std::vector<int>& levels, const SpectralField<double>& phi,
                           long n_samples) {
  if (levels.size() < 2) throw std::invalid_argument("remainder_decay: need >= 2 levels");
  const Mollifier m;
  DecayStudy out;
  out.levels = levels;
  for (int L : levels) {
    SimConfig c = cfg;
    c.N = 2 * L;
    c.L_noise = L;
    if (c.K < c.N) throw std::invalid_argument("remainder_decay: K below the drift level 2L");
    const long steps = c.steps();
    auto per = parallel_map<std::array<double, 2>>(n_samples, [&](long i) {
      Stream rng(c.seed, static_cast<std::uint64_t>(i));
      CoupledSbe<double> sim(c, m, false);
      sim.initialize(rng);
      auto& ws = sim.workspace();
      RemainderProcess<double> R(m, L, ws.lambda, ws.dt, phi, c.K);
      double sup = 0;
      for (long s = 0; s < steps; ++s) {
        const CoeffVector<double> left = sim.u().c;
        const auto d = sim.step(draw_increment<double>(c.K, ws.dt, rng));
        R.update(left, d);
        sup = std::max(sup, std::abs(R.value()));
      }
      return std::array<double, 2>{sup * sup, R.value()};
    });
    std::vector<double> s2, fin;
    for (auto& p : per) {
      s2.push_back(p[0]);
      fin.push_back(p[1]);
    }
    out.mean_sup2.push_back(mean(s2));
    out.stderr_.push_back(s2.size() > 1 ? standard_error(s2) : 0.0);
    out.mean_final.push_back(mean(fin));
  }
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    lx.push_back(std::log(double(levels[j])));
    ly.push_back(std::log(out.mean_sup2[j]));
    if (j > 0) out.max_ratio = std::max(out.max_ratio, out.mean_sup2[j] / out.mean_sup2[j - 1]);
  }
  out.slope = ols(lx, ly).slope;
  return out;
}

RateStudy nonlinearity_cauchy_rate(const SimConfig& cfg, const std::vector<int>& levels,
                                   const SpectralField<double>& phi, long n_samples) {
  if (levels.size() < 2) throw std::invalid_argument("nonlinearity_cauchy_rate: need >= 2 levels");
  const Mollifier m;
  for (int N : levels)
    if (N < 1 || 2 * N * m.support > cfg.K + 1)
      throw std::invalid_argument("nonlinearity_cauchy_rate: level 2N exceeds the resolved modes");
  // <Pi0 d_x w, phi> = <w, psi> with psi = -d_x phi
  SpectralField<double> psi = derivative(phi);
  psi.c = -psi.c;
  const long steps = cfg.steps();
  const std::size_t nl = levels.size();

  auto per = parallel_map<std::vector<double>>(n_samples, [&](long i) {
    Stream rng(cfg.seed, static_cast<std::uint64_t>(i));
    CoupledSbe<double> sim(cfg, m, false);
    sim.initialize(rng);
    const double dt = sim.workspace().dt;
    std::vector<double> acc(nl, 0.0), sup(nl, 0.0);
    auto pairing = [&](const SpectralField<double>& u, int level) {
      return square_pairing(mollify(u, m, level), psi) - mollified_variance(m, level) * psi.c(0).real();
    };
    for (long s = 0; s < steps; ++s) {
      for (std::size_t j = 0; j < nl; ++j) {
        acc[j] += dt * (pairing(sim.u(), 2 * levels[j]) - pairing(sim.u(), levels[j]));
        sup[j] = std::max(sup[j], std::abs(acc[j]));
      }
      sim.step(rng);
    }
    for (auto& v : sup) v *= v;
    return sup;
  });

  RateStudy out;
  out.levels = levels;
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < nl; ++j) {
    std::vector<double> col;
    for (auto& v : per) col.push_back(v[j]);
    out.mean_d2.push_back(mean(col));
    out.stderr_.push_back(col.size() > 1 ? standard_error(col) : 0.0);
    lx.push_back(std::log(double(levels[j])));
    ly.push_back(std::log(out.mean_d2.back()));
  }
  out.slope = ols(lx, ly).slope;
  return out;
}

}  // namespace kpzlab
