#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cartoon.hpp"
#include "io.hpp"
#include "pseudospline.hpp"
#include "refinable.hpp"
#include "shearlet.hpp"
#include "transform.hpp"

namespace shearframe {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Typed result table. CSV renders doubles with six significant digits; the
/// JSON form keeps full precision.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != header.size()) throw std::invalid_argument("table row width mismatch");
    rows.push_back(std::move(row));
  }

  [[nodiscard]] std::string csv() const {
    CsvTable t;
    t.header = header;
    for (const auto& r : rows) {
      std::vector<std::string> out;
      for (const auto& c : r) {
        if (const auto* i = std::get_if<std::int64_t>(&c)) out.push_back(std::to_string(*i));
        else if (const auto* d = std::get_if<double>(&c)) out.push_back(fmt6(*d));
        else out.push_back(std::get<std::string>(c));
      }
      t.rows.push_back(std::move(out));
    }
    return t.str();
  }

  [[nodiscard]] json precise() const {
    json a = json::array();
    for (const auto& r : rows) {
      json o;
      for (std::size_t i = 0; i < r.size(); ++i) std::visit([&](const auto& v) { o[header[i]] = v; }, r[i]);
      a.push_back(std::move(o));
    }
    return a;
  }
};

struct PipelineResult {
  Table table;
  json summary;
  bool ok = true;
  std::optional<Image> image;
};

inline constexpr std::uint64_t default_seed = 20240611;

// ---- pseudo-spline tables ----------------------------------------------------

inline PipelineResult run_table1(int n_min = 2, int n_max = 9) {
  PipelineResult r;
  r.table.header = {"N", "l", "beta"};
  for (const auto& row : table1_rows(n_min, n_max)) r.table.add({std::int64_t{row.n}, std::int64_t{row.l}, row.beta});
  r.summary = {{"rows", r.table.rows.size()}};
  return r;
}

inline PipelineResult run_mask_check(int n_max = 9, std::size_t grid = default_grid, double tol = 1e-12) {
  PipelineResult r;
  r.table.header = {"N", "l", "max_residual"};
  double worst = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    for (int l = 0; l < n; ++l) {
      const MaskOrder order(n, l);
      double m = 0.0;
      for (double xi : uniform_grid(-pi, pi, grid)) m = std::max(m, identity_residual(order, xi));
      worst = std::max(worst, m);
      r.table.add({std::int64_t{n}, std::int64_t{l}, m});
    }
  }
  r.ok = worst <= tol;
  r.summary = {{"max_residual", worst}, {"tolerance", tol}, {"grid", grid}};
  return r;
}

/// Every bound of the pseudo-spline chain for one order, as rows
/// (N, l, check, max_violation, points).
inline void add_bound_rows(Table& t, const MaskOrder& o, std::size_t grid, double window, int J, double& worst) {
  auto row = [&](const std::string& name, const BoundCheck& c) {
    worst = std::max(worst, c.max_violation);
    t.add({std::int64_t{o.n()}, std::int64_t{o.l()}, name, c.max_violation, static_cast<std::int64_t>(c.points)});
  };
  row("lemma1", check_lemma1(o, grid));
  row("lemma2", check_lemma2(o, grid));
  row("lemma3", check_lemma3(o, grid));
  row("distribution", check_distribution_bounds(o, grid));
  const auto s = verify_sandwich(o, window, grid, J);
  row("phi_lower", s.lower);
  row("phi_upper", s.upper);
}

inline PipelineResult run_bound_suite(const std::vector<MaskOrder>& orders, std::size_t grid = default_grid,
                                      double window = pi, int J = 10, double tol = 1e-9) {
  PipelineResult r;
  r.table.header = {"N", "l", "check", "max_violation", "points"};
  double worst = 0.0;
  for (const auto& o : orders) add_bound_rows(r.table, o, grid, window, J, worst);
  r.ok = worst <= tol;
  r.summary = {{"max_violation", worst}, {"tolerance", tol}, {"grid", grid}, {"K", window}, {"J", J}};
  return r;
}

/// Samples of |φ̂| with the C4 window bound and the C3 decay bound.
inline PipelineResult run_bounds(const MaskOrder& o, std::size_t grid = default_grid, double window = pi,
                                 int J = 10) {
  PipelineResult r;
  r.table.header = {"xi", "phi_hat_abs", "lower", "upper"};
  const auto b = constants(o, J, window);
  const RefinableEvaluator ev(o);
  std::vector<double> xs = uniform_grid(-std::ldexp(pi, 10), std::ldexp(pi, 10), grid);
  const auto inner = uniform_grid(-window, window, grid);
  xs.insert(xs.end(), inner.begin(), inner.end());
  std::sort(xs.begin(), xs.end());
  for (double xi : xs) {
    const double ax = std::abs(xi);
    const double lower = ax <= window ? b.C4 : 0.0;
    const double upper = ax == 0.0 ? 1.0 : std::min(1.0, b.C3 * std::pow(ax, b.upper_exponent));
    r.table.add({xi, std::abs(ev(xi)), lower, upper});
  }
  Table checks;
  checks.header = {"N", "l", "check", "max_violation", "points"};
  double worst = 0.0;
  add_bound_rows(checks, o, grid, window, J, worst);
  r.ok = worst <= 1e-9;
  r.summary = {{"N", o.n()},   {"l", o.l()},   {"C1", b.C1}, {"C2", b.C2},       {"Cb", b.Cb},
               {"q1", b.q1},   {"q2", b.q2},   {"kappa", b.kappa}, {"beta", b.beta}, {"J", b.J},
               {"C3", b.C3},   {"upper_exponent", b.upper_exponent}, {"K", b.K}, {"k0", b.k0},
               {"C4", b.C4},   {"checks", checks.precise()}, {"max_violation", worst}};
  return r;
}

// ---- shearlet diagnostics ---------------------------------------------------

inline json to_json(const ConeScanReport& s) {
  return {{"grid", s.grid},
          {"j_max", s.j_max},
          {"alpha", s.alpha},
          {"L_inf", s.L_inf},
          {"L_sup", s.L_sup},
          {"argmin", {s.argmin.x1, s.argmin.x2}},
          {"theory_lower", s.theory_lower},
          {"theory_lower_half_argument", s.theory_lower_half_argument},
          {"L_inf_dilated", s.L_inf_dilated},
          {"coverage_ok", s.coverage_ok},
          {"uncovered", s.uncovered},
          {"tail_bound", s.tail_bound}};
}

inline PipelineResult run_frame_scan(const ShearSystemConfig& cfg, std::size_t grid, bool write_samples = true) {
  const Shearlet sh(cfg);
  const auto rep = cone_frame_scan(sh, grid, cfg.j_max, write_samples);
  PipelineResult r;
  r.table.header = {"xi1", "xi2", "theta0"};
  for (const auto& s : rep.samples) r.table.add({s.xi.x1, s.xi.x2, s.value});
  r.summary = to_json(rep);
  r.summary["config"] = to_json(cfg);
  r.ok = rep.coverage_ok && rep.L_inf > 0.0 && rep.L_inf >= rep.theory_lower;
  return r;
}

inline PipelineResult run_decay_check(const ShearSystemConfig& cfg, std::size_t samples = 10000,
                                      std::uint64_t seed = default_seed) {
  const Shearlet sh(cfg);
  const auto rep = decay_condition_check(sh, samples, seed);
  const auto hyp = hypotheses(cfg);
  PipelineResult r;
  r.table.header = {"quantity", "value"};
  r.table.add({std::string("alpha_exponent"), rep.alpha_exponent});
  r.table.add({std::string("gamma_exponent"), rep.gamma_exponent});
  r.table.add({std::string("fitted_C"), rep.fitted_C});
  r.table.add({std::string("derivative_constant"), rep.derivative_constant});
  r.table.add({std::string("h_l1"), rep.h_l1});
  r.table.add({std::string("h_integrable"), std::int64_t{rep.h_integrable}});
  r.table.add({std::string("envelope_violation"), rep.envelope_violation});
  r.table.add({std::string("derivative_violation"), rep.derivative_violation});
  r.table.add({std::string("max_violation"), rep.max_violation});
  r.table.add({std::string("exponents_ok"), std::int64_t{rep.exponents_ok}});
  r.table.add({std::string("pass"), std::int64_t{rep.pass()}});
  r.summary = {{"config", to_json(cfg)},
               {"samples", rep.samples},
               {"seed", seed},
               {"pass", rep.pass()},
               {"hypotheses",
                {{"bspline_cone_frame", hyp.bspline_cone_frame},
                 {"pseudo_cone_frame", hyp.pseudo_cone_frame},
                 {"sparsity_exponents", hyp.sparsity_exponents}}}};
  r.ok = rep.pass();
  return r;
}

// ---- images and transforms --------------------------------------------------

inline PipelineResult run_cartoon_gen(const CartoonSpec& spec, std::size_t M, int supersample = 1) {
  PipelineResult r;
  r.image = generate(spec, M, supersample);
  r.table.header = {"quantity", "value"};
  r.table.add({std::string("curvature"), curvature_check(spec)});
  r.table.add({std::string("radius_bound"), radius_bound(spec)});
  r.table.add({std::string("norm2"), r.image->norm2()});
  r.summary = {{"spec", to_json(spec)}, {"M", M}, {"supersample", supersample}};
  return r;
}

/// Transform settings for N-term experiments: the shearlet system plus the
/// translation-lattice oversampling exponent (nullopt: undecimated).
struct SparseSettings {
  ShearSystemConfig system = [] {
    ShearSystemConfig c = example2_config();
    c.j_max = 4;
    return c;
  }();
  std::optional<int> oversampling = 1;
};

inline std::vector<std::size_t> default_ns() {
  std::vector<std::size_t> ns;
  for (int e = 8; e <= 14; ++e) ns.push_back(std::size_t{1} << e);
  return ns;
}

inline PipelineResult run_sparse_approx(const SparseSettings& set, const Image& img,
                                        const std::vector<std::size_t>& ns) {
  const Shearlet sh(set.system);
  const FilterBank sb = build_filter_bank(sh, img.M);
  const FilterBank wb = build_wavelet_bank(sh, img.M);
  auto lattice = [&](const FilterBank& fb) {
    return set.oversampling ? sampled_lattice(fb, *set.oversampling) : undecimated_lattice(fb);
  };
  const NTermApproximator sa(sb, img, lattice(sb));
  const NTermApproximator wa(wb, img, lattice(wb));
  PipelineResult r;
  r.table.header = {"N", "err2_shearlet", "err2_wavelet"};
  std::vector<double> xs;
  std::vector<double> es;
  std::vector<double> ew;
  json iters = json::array();
  for (std::size_t n : ns) {
    const auto s = sa.approx(n);
    const auto w = wa.approx(n);
    r.table.add({static_cast<std::int64_t>(n), s.err2, w.err2});
    xs.push_back(static_cast<double>(n));
    es.push_back(s.err2);
    ew.push_back(w.err2);
    iters.push_back({s.iterations, w.iterations});
  }
  r.summary = {{"config", to_json(set.system)},
               {"oversampling", set.oversampling ? json(*set.oversampling) : json("undecimated")},
               {"M", img.M},
               {"norm2", img.norm2()},
               {"shearlet_channels", sb.size()},
               {"wavelet_channels", wb.size()},
               {"shearlet_coefficients", sa.total()},
               {"wavelet_coefficients", wa.total()},
               {"pcg_iterations", iters}};
  if (ns.size() >= 2 && std::all_of(es.begin(), es.end(), [](double e) { return e > 0.0; }) &&
      std::all_of(ew.begin(), ew.end(), [](double e) { return e > 0.0; })) {
    r.summary["slope_shearlet"] = loglog_slope(xs, es);
    r.summary["slope_wavelet"] = loglog_slope(xs, ew);
  }
  return r;
}

/// Random uniform [0,1) image from a seeded generator.
inline Image random_image(std::size_t M, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(M);
  for (auto& v : img.pixels) v = u(rng);
  return img;
}

inline PipelineResult run_transform_roundtrip(const ShearSystemConfig& cfg, std::size_t M, std::size_t count,
                                              std::uint64_t seed = default_seed, double rec_tol = 1e-8,
                                              double energy_tol = 1e-10) {
  const FilterBank fb = build_filter_bank(cfg, M);
  std::mt19937_64 rng(seed);
  PipelineResult r;
  r.table.header = {"image", "rel_error", "energy_rel_error"};
  double worst_rec = 0.0;
  double worst_energy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const Image img = random_image(M, rng);
    const auto st = analyze(fb, img);
    const Image back = synthesize(fb, st);
    const double rec = std::sqrt(distance2(img, back) / img.norm2());
    const double e_pred = predicted_energy(fb, img);
    const double energy = std::abs(st.energy() - e_pred) / e_pred;
    worst_rec = std::max(worst_rec, rec);
    worst_energy = std::max(worst_energy, energy);
    r.table.add({static_cast<std::int64_t>(i), rec, energy});
  }
  r.ok = worst_rec <= rec_tol && worst_energy <= energy_tol;
  r.summary = {{"config", to_json(cfg)}, {"M", M},          {"images", count},
               {"seed", seed},           {"channels", fb.size()}, {"gamma_min", fb.gamma_min},
               {"gamma_max", fb.gamma_max}, {"max_rel_error", worst_rec}, {"max_energy_rel_error", worst_energy}};
  return r;
}

}  // namespace shearframe
