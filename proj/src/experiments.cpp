#include "kpzlab/experiments.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "kpzlab/chaos.hpp"
#include "kpzlab/cole_hopf.hpp"
#include "kpzlab/ensemble.hpp"
#include "kpzlab/path_stats.hpp"
#include "kpzlab/stats.hpp"

namespace kpzlab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double pi = std::numbers::pi;

using Defaults = std::map<std::string, std::string>;

Defaults sim_defaults() {
  return {{"K", "128"},      {"dt", "1e-5"}, {"T", "0.25"},  {"lambda", "1"},         {"nu", "1"},
          {"D", "2"},        {"N", "16"},    {"L_noise", "16"}, {"drift", "symmetric"}, {"she", "lognormal"},
          {"cfl_max", "50"}, {"n_samples", "100"}};
}

Defaults with(Defaults base, const Defaults& extra) {
  for (auto& [k, v] : extra) base[k] = v;
  return base;
}

const std::map<std::string, Defaults>& registry() {
  static const std::map<std::string, Defaults> r = {
      {"k-constant", {{"levels", "16,64,256"}}},
      {"stationarity",
       with(sim_defaults(), {{"K", "64"}, {"T", "1"}, {"n_samples", "200"}, {"level", "0.01"}, {"min_pass_fraction", "0.95"}})},
      {"cole-hopf-drift",
       with(sim_defaults(), {{"record_every", "250"},
                             {"tolerance", "0.15"},
                             {"sc_K", "64"},
                             {"sc_dt", "4e-5"},
                             {"sc_T", "0.05"},
                             {"sc_n_samples", "40"},
                             {"sc_levels", "1,2,4,8"},
                             {"sc_min_order", "0.4"}})},
      {"nonlinearity-rate",
       with(sim_defaults(), {{"dt", "2.5e-6"}, {"T", "0.1"}, {"levels", "8,16,32,64"}, {"slope_lo", "-1.3"}, {"slope_hi", "-0.7"}})},
      {"holder",
       with(sim_defaults(), {{"n_samples", "60"},
                             {"wick_level", "64"},
                             {"q_level", "16"},
                             {"lag_min", "10"},
                             {"lag_max", "316"},
                             {"n_lags", "12"},
                             {"lo", "0.65"},
                             {"hi", "0.80"},
                             {"control_tolerance", "0.05"}})},
      {"r-decay",
       with(sim_defaults(), {{"dt", "2.5e-6"},
                             {"n_samples", "200"},
                             {"levels", "8,16,32,64"},
                             {"max_ratio", "1.2"},
                             {"slope_lo", "-1.5"},
                             {"slope_hi", "-0.5"}})},
      {"qv-drift",
       with(sim_defaults(),
            {{"n_samples", "8"}, {"lags", "1,2,4,8,16,32"}, {"drift_fraction", "0.05"}, {"noise_tolerance", "0.1"}})},
      {"chaos-identities", {{"box", "8"}, {"n_samples", "100000"}, {"pairs", "5"}, {"n_sigma", "3"}}},
  };
  return r;
}

ScalarResult band(std::string name, double value, double stderr_, double target, double lo, double hi,
                  bool gating = true) {
  ScalarResult r;
  r.name = std::move(name);
  r.value = value;
  r.stderr_ = stderr_;
  r.target = target;
  r.lo = lo;
  r.hi = hi;
  r.tolerance = std::isfinite(hi) && std::isfinite(lo) ? 0.5 * (hi - lo) : (std::isfinite(hi) ? hi - target : target - lo);
  r.gating = gating;
  return r;
}

std::vector<int> to_int(const std::vector<long>& v) { return {v.begin(), v.end()}; }

// sqrt2 cos(2 pi x)
SpectralField<double> cosine_mode(int K) {
  SpectralField<double> f(K, true);
  f.c(1) = std::sqrt(2.0) / 2;
  return f;
}

// ---- experiments ----

void k_constant_experiment(const Config& c, EnsembleSummary& s) {
  const Mollifier m;
  Table t{{"L", "value", "bound", "error"}, {}};
  double last = 0;
  long last_L = 0;
  for (long L : c.integers("levels")) {
    if (L < 1) throw std::invalid_argument("k-constant: levels must be >= 1");
    const double v = k_constant(m, double(L), int(std::ceil(m.support * L)) + 1);
    const double bound = 4.0 / (pi * pi * double(L));
    s.add(band("k_constant_L" + std::to_string(L), v, 0, 1.0 / 12, 1.0 / 12 - bound, 1.0 / 12 + bound));
    t.rows.push_back({double(L), v, bound, v - 1.0 / 12});
    if (L > last_L) {
      last_L = L;
      last = v;
    }
  }
  if (last_L >= 256) s.add(band("k_constant_3dp", last, 0, 0.08333, 0.08333 - 5e-4, 0.08333 + 5e-4));
  s.tables["levels"] = t;
  s.main_table = "levels";
}

void stationarity_experiment(const Config& c, std::uint64_t seed, EnsembleSummary& s) {
  const SimConfig cfg = sim_config(c, seed);
  const long n = c.integer("n_samples");
  const double level = c.real("level");
  const double need = c.real("min_pass_fraction");
  const long steps = cfg.steps();
  auto finals = parallel_map<SpectralField<double>>(n, [&](long i) {
    Stream rng(cfg.seed, static_cast<std::uint64_t>(i));
    CoupledSbe<double> sim(cfg, Mollifier{}, false);
    sim.initialize(rng);
    for (long k = 0; k < steps; ++k) sim.step(rng);
    // standard-form fields have unit variance per mode
    return sim.u();
  });
  std::vector<SpectralField<double>> fresh;
  Stream ctl(stream_key(cfg.seed, ~std::uint64_t(0)));
  for (long i = 0; i < n; ++i) fresh.push_back(sample_white_noise<double>(cfg.K, ctl));

  const auto rs = white_noise_law_test(finals, level);
  const auto rf = white_noise_law_test(fresh, level);
  s.add(band("sbe_mode_pass_fraction", rs.mode_pass_fraction, 0, 1 - level, need, 1));
  s.add(band("fresh_mode_pass_fraction", rf.mode_pass_fraction, 0, 1 - level, need, 1));
  s.add(band("sbe_pair_pass_fraction", rs.pair_pass_fraction, 0, 1 - level, need, 1, false));
  s.add(band("sbe_pairing_pass_fraction", rs.pairing_pass_fraction, 0, 1 - level, 0.8, 1, false));
  Table t{{"k", "p_sbe", "p_fresh"}, {}};
  for (std::size_t k = 0; k < rs.mode_p.size(); ++k) t.rows.push_back({double(k + 1), rs.mode_p[k], rf.mode_p[k]});
  s.tables["modes"] = t;
  s.main_table = "modes";
}

Table drift_table(const DriftRegression& r) {
  Table t{{"t", "mean_gap", "stderr"}, {}};
  for (std::size_t j = 0; j < r.t.size(); ++j) t.rows.push_back({r.t[j], r.mean_gap[j], r.stderr_[j]});
  return t;
}

void drift_experiment(const Config& c, std::uint64_t seed, EnsembleSummary& s) {
  SimConfig cfg = sim_config(c, seed);
  const long n = c.integer("n_samples");
  const long every = c.integer("record_every");
  const double tol = c.real("tolerance");

  const auto pos = drift_slope(cfg, n, every);
  SimConfig neg_cfg = cfg;
  neg_cfg.lambda = -cfg.lambda;
  const auto neg = drift_slope(neg_cfg, n, every);

  const double target = pos.target;
  const double lo = target > 0 ? target * (1 - tol) : target * (1 + tol);
  const double hi = target > 0 ? target * (1 + tol) : target * (1 - tol);
  s.add(band("drift_slope", pos.slope, pos.slope_stderr, target, lo, hi));
  // opposite sign under lambda -> -lambda
  if (target > 0)
    s.add(band("drift_slope_flipped", neg.slope, neg.slope_stderr, neg.target, -inf, 0));
  else
    s.add(band("drift_slope_flipped", neg.slope, neg.slope_stderr, neg.target, 0, inf));
  const double se = std::hypot(pos.slope_stderr, neg.slope_stderr);
  const double odd = se > 0 ? (pos.slope + neg.slope) / se : 0;
  s.add(band("oddness_z", odd, 0, 0, -3, 3, false));
  s.add(band("gradient_error", pos.gradient_error, 0, 0, 0, inf, false));
  s.add(band("nonpositive_values", double(pos.nonpositive + neg.nonpositive), 0, 0, 0, 0, false));

  SimConfig sc_cfg = cfg;
  sc_cfg.K = int(c.integer("sc_K"));
  sc_cfg.dt = c.real("sc_dt");
  sc_cfg.T = c.real("sc_T");
  const auto sc = self_convergence(sc_cfg, c.integer("sc_n_samples"), to_int(c.integers("sc_levels")));
  s.add(band("self_convergence_decreasing", sc.decreasing ? 1 : 0, 0, 1, 1, 1));
  s.add(band("self_convergence_order", sc.order, 0, 1, c.real("sc_min_order"), inf));

  s.tables["drift"] = drift_table(pos);
  s.tables["drift_flipped"] = drift_table(neg);
  Table sct{{"dt", "error"}, {}};
  for (std::size_t j = 0; j < sc.dts.size(); ++j) sct.rows.push_back({sc.dts[j], sc.errors[j]});
  s.tables["self_convergence"] = sct;
  s.main_table = "drift";
}

void rate_experiment(const Config& c, std::uint64_t seed, EnsembleSummary& s) {
  const SimConfig cfg = sim_config(c, seed);
  const auto r = nonlinearity_cauchy_rate(cfg, to_int(c.integers("levels")), cosine_mode(cfg.K), c.integer("n_samples"));
  s.add(band("rate_slope", r.slope, 0, -1, c.real("slope_lo"), c.real("slope_hi")));
  Table t{{"N", "mean_d2", "stderr"}, {}};
  for (std::size_t j = 0; j < r.levels.size(); ++j) t.rows.push_back({double(r.levels[j]), r.mean_d2[j], r.stderr_[j]});
  s.tables["rate"] = t;
  s.main_table = "rate";
}

struct HolderPaths {
  std::vector<double> wick, brownian, q;
  double q_final = 0;
};

void holder_experiment(const Config& c, std::uint64_t seed, EnsembleSummary& s) {
  const SimConfig cfg = sim_config(c, seed);
  const long n = c.integer("n_samples");
  const int wick_level = int(c.integer("wick_level"));
  const double q_level = double(c.integer("q_level"));
  const int lag_min = int(c.integer("lag_min")), lag_max = int(c.integer("lag_max"));
  const int n_lags = int(c.integer("n_lags"));
  const auto phi = cosine_mode(cfg.K);
  const Mollifier m;
  const long steps = cfg.steps();

  auto per = parallel_map<HolderPaths>(n, [&](long i) {
    Stream rng(cfg.seed, static_cast<std::uint64_t>(i));
    CoupledSbe<double> sim(cfg, m, false);
    sim.initialize(rng);
    const double dt = sim.workspace().dt;
    const double cw = mollified_variance(m, wick_level);
    HolderPaths p;
    p.wick.reserve(steps + 1);
    p.wick.push_back(0);
    p.brownian.push_back(0);
    p.q.push_back(0);
    for (long k = 0; k < steps; ++k) {
      const double w = square_pairing(mollify(sim.u(), m, wick_level), phi) - cw * phi.c(0).real();
      const double qd = q_density(sim.u().c, m, q_level);
      const auto dW = draw_increment<double>(cfg.K, dt, rng);
      SpectralField<double> inc(dW.total(), true);
      sim.step(dW);
      p.wick.push_back(p.wick.back() + dt * w);
      p.brownian.push_back(p.brownian.back() + std::sqrt(2.0) * inc.dot(phi));
      p.q.push_back(p.q.back() + dt * qd);
    }
    p.q_final = p.q.back();
    // centre Q around its mean growth 2t
    for (long k = 0; k <= steps; ++k) p.q[k] -= 2.0 * dt * double(k);
    return p;
  });

  const double dt = normalize_parameters(cfg.nu, cfg.D, cfg.lambda).standard_time(cfg.dt);
  std::vector<ScalarPath> wick, bm, q;
  std::vector<double> q_slopes;
  for (auto& p : per) {
    wick.emplace_back(dt, std::move(p.wick));
    bm.emplace_back(dt, std::move(p.brownian));
    q.emplace_back(dt, std::move(p.q));
    q_slopes.push_back(p.q_final / (dt * double(steps)));
  }
  const std::vector<double> qs{2.0, 4.0};
  const auto hw = holder_exponent(wick, qs, lag_min, lag_max, n_lags);
  const auto hb = holder_exponent(bm, qs, lag_min, lag_max, n_lags);
  const auto hq = holder_exponent(q, qs, lag_min, lag_max, n_lags);
  const double ctl = c.real("control_tolerance");
  s.add(band("holder_wick", hw.exponent, hw.stderr_, 0.75, c.real("lo"), c.real("hi")));
  s.add(band("holder_brownian_control", hb.exponent, hb.stderr_, 0.5, 0.5 - ctl, 0.5 + ctl));
  s.add(band("holder_q_process", hq.exponent, hq.stderr_, 0.75, c.real("lo"), inf, false));
  const double qm = mean(q_slopes), qse = q_slopes.size() > 1 ? standard_error(q_slopes) : 0;
  s.add(band("q_process_mean_slope", qm, qse, 2, 2 - 3 * qse, 2 + 3 * qse, false));

  Table t{{"lag", "wick_m2", "wick_m4", "brownian_m2", "brownian_m4"}, {}};
  for (std::size_t j = 0; j < hw.lags.size(); ++j)
    t.rows.push_back({hw.lags[j] * dt, hw.moments[0][j], hw.moments[1][j], hb.moments[0][j], hb.moments[1][j]});
  s.tables["moments"] = t;
  s.main_table = "moments";
}

void decay_experiment(const Config& c, std::uint64_t seed, EnsembleSummary& s) {
  const SimConfig cfg = sim_config(c, seed);
  SpectralField<double> one(cfg.K, false);
  one.c(0) = 1;
  const auto d = remainder_decay(cfg, to_int(c.integers("levels")), one, c.integer("n_samples"));
  s.add(band("decay_max_ratio", d.max_ratio, 0, 0, 0, c.real("max_ratio")));
  s.add(band("decay_slope", d.slope, 0, -1, c.real("slope_lo"), c.real("slope_hi")));
  Table t{{"L", "mean_sup2", "stderr", "mean_final"}, {}};
  for (std::size_t j = 0; j < d.levels.size(); ++j)
    t.rows.push_back({double(d.levels[j]), d.mean_sup2[j], d.stderr_[j], d.mean_final[j]});
  s.tables["decay"] = t;
  s.main_table = "decay";
}

struct QvPaths {
  std::vector<double> drift, noise;
};

void qv_experiment(const Config& c, std::uint64_t seed, EnsembleSummary& s) {
  const SimConfig cfg = sim_config(c, seed);
  const long n = c.integer("n_samples");
  const auto lags = to_int(c.integers("lags"));
  const auto phi = cosine_mode(cfg.K);
  const long steps = cfg.steps();

  auto per = parallel_map<QvPaths>(n, [&](long i) {
    Stream rng(cfg.seed, static_cast<std::uint64_t>(i));
    CoupledSbe<double> sim(cfg, Mollifier{}, false);
    sim.initialize(rng);
    const double dt = sim.workspace().dt;
    QvPaths p;
    p.drift.reserve(steps + 1);
    p.noise.reserve(steps + 1);
    p.drift.push_back(0);
    p.noise.push_back(0);
    for (long k = 0; k < steps; ++k) {
      const auto dW = draw_increment<double>(cfg.K, dt, rng);
      const SpectralField<double> d(sim.step(dW), true);
      p.drift.push_back(p.drift.back() + d.dot(phi));
      p.noise.push_back(p.noise.back() + std::sqrt(2.0) * SpectralField<double>(dW.total(), true).dot(phi));
    }
    return p;
  });

  const double dt = normalize_parameters(cfg.nu, cfg.D, cfg.lambda).standard_time(cfg.dt);
  const double horizon = dt * double(steps);
  const double grad2 = 4 * pi * pi * phi.dot(phi);  // ||d_x phi||^2 for a single mode
  const double martingale_qv = 2.0 * grad2 * horizon;
  const double noise_target = 2.0 * horizon * phi.dot(phi);

  std::vector<double> dq, nq;
  std::vector<std::vector<double>> dest(lags.size()), nest(lags.size());
  for (auto& p : per) {
    const auto a = quadratic_variation(ScalarPath(dt, std::move(p.drift)), lags);
    const auto b = quadratic_variation(ScalarPath(dt, std::move(p.noise)), lags);
    dq.push_back(a.extrapolated);
    nq.push_back(b.extrapolated);
    for (std::size_t j = 0; j < lags.size(); ++j) {
      dest[j].push_back(a.estimates[j]);
      nest[j].push_back(b.estimates[j]);
    }
  }
  const double f = c.real("drift_fraction"), tol = c.real("noise_tolerance");
  const double lim = f * martingale_qv;
  s.add(band("drift_qv", mean(dq), dq.size() > 1 ? standard_error(dq) : 0, 0, -lim, lim));
  s.add(band("noise_qv_ratio", mean(nq) / noise_target, nq.size() > 1 ? standard_error(nq) / noise_target : 0, 1,
             1 - tol, 1 + tol));
  Table t{{"lag", "drift_qv", "noise_qv"}, {}};
  for (std::size_t j = 0; j < lags.size(); ++j) t.rows.push_back({lags[j] * dt, mean(dest[j]), mean(nest[j])});
  s.tables["qv"] = t;
  s.main_table = "qv";
}

// smooth low-mode test fields for the integration-by-parts family
std::array<SpectralField<double>, 3> ibp_tests(int K) {
  std::array<SpectralField<double>, 3> t{SpectralField<double>(K), SpectralField<double>(K), SpectralField<double>(K)};
  t[0].c(1) = {0.3, 0.1};
  t[0].c(2) = {-0.2, 0.15};
  t[1].c(1) = {0.1, -0.25};
  t[1].c(3) = {0.2, 0.0};
  t[2].c(2) = {0.0, 0.3};
  t[2].c(4) = {0.15, -0.1};
  return t;
}

void chaos_experiment(const Config& c, std::uint64_t seed, EnsembleSummary& s) {
  const int K = int(c.integer("box"));
  const long n = c.integer("n_samples");
  const long pairs = c.integer("pairs");
  const double z = c.real("n_sigma");
  if (K < 4) throw std::invalid_argument("chaos-identities: box must be >= 4");

  Table pt{{"pair", "mc", "exact", "stderr"}, {}};
  for (long p = 0; p < pairs; ++p) {
    Stream kr(seed, 1000 + 2 * std::uint64_t(p));
    const auto f = random_kernel<double>(K, kr);
    const auto g = random_kernel<double>(K, kr);
    const double exact = 2 * inner(f, g);
    const long chunks = 16;
    auto part = parallel_map<std::vector<double>>(chunks, [&](long j) {
      Stream rng(seed, 100000 + std::uint64_t(p) * chunks + std::uint64_t(j));
      std::vector<double> v;
      for (long i = j; i < n; i += chunks) {
        const auto eta = sample_white_noise<double>(K, rng);
        v.push_back(evaluate_W2(f, eta) * evaluate_W2(g, eta));
      }
      return v;
    });
    std::vector<double> all;
    for (auto& v : part) all.insert(all.end(), v.begin(), v.end());
    const double mc = mean(all), se = standard_error(all);
    s.add(band("isometry_mc_pair" + std::to_string(p), (mc - exact) / se, se, 0, -z, z));
    pt.rows.push_back({double(p), mc, exact, se});

    // L0 isometry between the H1 and H-1 norms
    const double a = hminus1_norm(apply_L0(f)), b = h1_norm(f);
    s.add(band("l0_isometry_pair" + std::to_string(p), std::abs(a - b) / b, 0, 0, 0, 1e-12));
  }

  Table it{{"kind", "lhs", "rhs", "residual", "stderr"}, {}};
  Stream kr(seed, 999);
  const auto f = random_kernel<double>(K, kr);
  const auto tests = ibp_tests(K);
  const std::array<std::pair<Cylinder<double>::Kind, const char*>, 4> kinds{{{Cylinder<double>::Kind::one, "one"},
                                                                             {Cylinder<double>::Kind::square, "square"},
                                                                             {Cylinder<double>::Kind::exp, "exp"},
                                                                             {Cylinder<double>::Kind::product3, "product3"}}};
  for (std::size_t j = 0; j < kinds.size(); ++j) {
    Cylinder<double> F;
    F.kind = kinds[j].first;
    F.tests = tests;
    Stream rng(seed, 200000 + j);
    const auto r = mc_ibp_residual(f, F, n, rng);
    const double zz = r.stderr_ > 0 ? r.residual / r.stderr_ : 0;
    s.add(band(std::string("ibp_") + kinds[j].second, zz, r.stderr_, 0, -z, z));
    it.rows.push_back({double(j), r.lhs, r.rhs, r.residual, r.stderr_});
  }
  s.tables["pairs"] = pt;
  s.tables["ibp"] = it;
  s.main_table = "pairs";
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (auto& [k, d] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

Config default_config(const std::string& experiment) {
  auto it = registry().find(experiment);
  if (it == registry().end()) throw std::invalid_argument("unknown experiment '" + experiment + "'");
  return Config(it->second);
}

SimConfig sim_config(const Config& c, std::uint64_t seed) {
  SimConfig s;
  s.K = int(c.integer("K"));
  s.dt = c.real("dt");
  s.T = c.real("T");
  s.lambda = c.real("lambda");
  s.nu = c.real("nu");
  s.D = c.real("D");
  s.N = int(c.integer("N"));
  s.L_noise = int(c.integer("L_noise"));
  s.drift = c.str("drift");
  s.she = c.str("she");
  s.cfl_max = c.real("cfl_max");
  s.seed = seed;
  s.validate();
  return s;
}

EnsembleSummary run_experiment(const std::string& experiment, const Config& c, std::uint64_t seed) {
  default_config(experiment);  // rejects unknown names
  EnsembleSummary s;
  s.experiment = experiment;
  s.seed = seed;
  s.config = c.values();
  if (experiment == "k-constant")
    k_constant_experiment(c, s);
  else if (experiment == "stationarity")
    stationarity_experiment(c, seed, s);
  else if (experiment == "cole-hopf-drift")
    drift_experiment(c, seed, s);
  else if (experiment == "nonlinearity-rate")
    rate_experiment(c, seed, s);
  else if (experiment == "holder")
    holder_experiment(c, seed, s);
  else if (experiment == "r-decay")
    decay_experiment(c, seed, s);
  else if (experiment == "qv-drift")
    qv_experiment(c, seed, s);
  else
    chaos_experiment(c, seed, s);
  return s;
}

std::string describe() {
  std::ostringstream out;
  for (auto& [name, d] : registry()) {
    out << "[" << name << "]\n";
    for (auto& [k, v] : d) out << "  " << k << " = " << v << "\n";
  }
  return out.str();
}

}  // namespace kpzlab
