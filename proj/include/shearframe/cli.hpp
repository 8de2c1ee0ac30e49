#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"
#include "pipelines.hpp"

namespace shearframe::cli {

enum ExitCode : int { ok = 0, usage_error = 1, validation_failure = 2 };

/// Collects written artifacts and echoes the resolved parameters into
/// <outdir>/<command>.manifest.json.
class Run {
 public:
  Run(std::string command, std::filesystem::path outdir, bool precise)
      : command_(std::move(command)), outdir_(std::move(outdir)), precise_(precise) {}

  json params = json::object();

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : outdir_ / p;
  }

  void write(const std::filesystem::path& name, const std::string& data) {
    const auto path = resolve(name);
    write_file(path, data);
    hashes_[name.string()] = sha256_hex(data);
  }

  void write_table(const std::filesystem::path& name, const PipelineResult& r) {
    write(name, r.table.csv());
    if (precise_) {
      auto jname = name;
      jname.replace_extension(".json");
      write(jname, json{{"rows", r.table.precise()}, {"summary", r.summary}}.dump(2) + "\n");
    }
  }

  void finish(const PipelineResult& r) {
    json m;
    m["command"] = command_;
    m["parameters"] = params;
    m["summary"] = r.summary;
    m["status"] = r.ok ? "ok" : "validation_failure";
    json outs = json::object();
    for (const auto& [k, v] : hashes_) outs[k] = {{"sha256", v}};
    m["outputs"] = outs;
    write_file(resolve(command_ + ".manifest.json"), m.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::filesystem::path outdir_;
  bool precise_;
  std::map<std::string, std::string> hashes_;
};

inline std::vector<std::size_t> parse_ns(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(static_cast<std::size_t>(std::stoull(tok)));
  }
  if (out.empty()) throw std::invalid_argument("--Ns must list at least one count");
  return out;
}

inline std::string ns_to_string(const std::vector<std::size_t>& ns) {
  std::string s;
  for (std::size_t i = 0; i < ns.size(); ++i) s += (i ? "," : "") + std::to_string(ns[i]);
  return s;
}

struct GeneratorFlags {
  int n1 = 4;
  int n2 = 3;
  int l1 = -1;
  int l2 = -1;

  void attach(CLI::App* app, int default_n1, int default_n2) {
    n1 = default_n1;
    n2 = default_n2;
    app->add_option("--N1", n1, "wavelet order")->capture_default_str();
    app->add_option("--N2", n2, "scaling order")->capture_default_str();
    app->add_option("--l1", l1, "pseudo-spline parameter of the wavelet mask (omit for B-splines)");
    app->add_option("--l2", l2, "pseudo-spline parameter of the scaling mask (omit for B-splines)");
  }

  [[nodiscard]] Generator generator() const {
    if (l1 < 0 && l2 < 0) return BSplineGenerator{n1, n2};
    return PseudoGenerator{MaskOrder(n1, std::max(l1, 0)), MaskOrder(n2, std::max(l2, 0))};
  }
};

inline std::string usage_text(const CLI::App& app) { return app.help(); }

/// Runs one subcommand; returns 0 on success, 2 on a violated bound or an
/// invalid specification, 1 on a usage error.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Shearlet frames from B-splines and pseudo splines: bounds, frame scans and N-term experiments",
               "shearframe"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string outdir = ".";
  bool precise = false;
  std::uint64_t seed = default_seed;
  app.add_option("--outdir", outdir, "directory for outputs and the manifest")->capture_default_str();
  app.add_flag("--precise", precise, "also write full-precision JSON next to every CSV");
  app.add_option("--seed", seed, "random seed")->capture_default_str();

  // table1
  auto* t1 = app.add_subcommand("table1", "decay rates beta_{N,l} of type-II pseudo splines");
  std::string t1_out = "table1.csv";
  int t1_nmin = 2;
  int t1_nmax = 9;
  t1->add_option("--out", t1_out)->capture_default_str();
  t1->add_option("--Nmin", t1_nmin)->capture_default_str()->check(CLI::Range(1, 32));
  t1->add_option("--Nmax", t1_nmax)->capture_default_str()->check(CLI::Range(1, 32));

  // mask-check
  auto* mc = app.add_subcommand("mask-check", "binomial identity residuals of the type-II masks");
  std::string mc_out = "mask_check.csv";
  int mc_nmax = 9;
  std::size_t mc_grid = default_grid;
  mc->add_option("--out", mc_out)->capture_default_str();
  mc->add_option("--Nmax", mc_nmax)->capture_default_str()->check(CLI::Range(1, 32));
  mc->add_option("--grid", mc_grid)->capture_default_str();

  // bounds
  auto* bd = app.add_subcommand("bounds", "mask, highpass and refinable-function bounds for one order");
  std::string bd_out = "bounds.csv";
  std::string bd_checks = "bounds_checks.csv";
  int bd_n = 2;
  int bd_l = 1;
  int bd_j = 10;
  double bd_k = pi;
  std::size_t bd_grid = default_grid;
  bd->add_option("--N", bd_n)->capture_default_str();
  bd->add_option("--l", bd_l)->capture_default_str();
  bd->add_option("--J", bd_j, "integer J of the decay bound")->capture_default_str();
  bd->add_option("--K", bd_k, "window [-K, K] of the lower bound")->capture_default_str();
  bd->add_option("--grid", bd_grid)->capture_default_str();
  bd->add_option("--out", bd_out, "samples xi,phi_hat_abs,lower,upper")->capture_default_str();
  bd->add_option("--checks", bd_checks, "per-inequality violations")->capture_default_str();

  // frame-scan
  auto* fs = app.add_subcommand("frame-scan", "cone-sum scan over the horizontal cone");
  GeneratorFlags fs_gen;
  fs_gen.attach(fs, 4, 3);
  double fs_alpha = pi / 4.0;
  int fs_jmax = 20;
  std::size_t fs_grid = 512;
  std::string fs_out = "frame_scan.csv";
  std::string fs_summary = "frame_scan.json";
  fs->add_option("--alpha", fs_alpha)->capture_default_str();
  fs->add_option("--jmax", fs_jmax)->capture_default_str();
  fs->add_option("--grid", fs_grid)->capture_default_str();
  fs->add_option("--out", fs_out)->capture_default_str();
  fs->add_option("--summary", fs_summary)->capture_default_str();

  // decay-check
  auto* dc = app.add_subcommand("decay-check", "decay and derivative conditions of the generator");
  GeneratorFlags dc_gen;
  dc_gen.attach(dc, 6, 4);
  std::size_t dc_samples = 10000;
  std::string dc_out = "decay_check.csv";
  dc->add_option("--samples", dc_samples)->capture_default_str();
  dc->add_option("--out", dc_out)->capture_default_str();

  // cartoon-gen
  auto* cg = app.add_subcommand("cartoon-gen", "cartoon-like test image");
  std::string cg_spec;
  std::size_t cg_m = 512;
  std::string cg_out = "cartoon.pgm";
  int cg_super = 1;
  cg->add_option("--spec", cg_spec, "JSON spec (default spec when omitted)");
  cg->add_option("--M", cg_m)->capture_default_str();
  cg->add_option("--out", cg_out)->capture_default_str();
  cg->add_option("--supersample", cg_super, "subsamples per axis for display images")->capture_default_str();

  // sparse-approx
  auto* sa = app.add_subcommand("sparse-approx", "N-term errors of the shearlet and wavelet systems");
  std::string sa_config;
  std::string sa_image;
  std::size_t sa_m = 512;
  std::string sa_ns = ns_to_string(default_ns());
  std::string sa_out = "sparse_approx.csv";
  sa->add_option("--config", sa_config, "JSON system config (generator, j_max, oversampling)");
  sa->add_option("--image", sa_image, "PGM input (default cartoon when omitted)");
  sa->add_option("--M", sa_m, "size of the default cartoon")->capture_default_str();
  sa->add_option("--Ns", sa_ns, "comma-separated term counts")->capture_default_str();
  sa->add_option("--out", sa_out)->capture_default_str();

  // transform-roundtrip
  auto* tr = app.add_subcommand("transform-roundtrip", "analysis/synthesis exactness on random images");
  std::string tr_config;
  std::size_t tr_m = 256;
  std::size_t tr_count = 100;
  std::string tr_out = "transform_roundtrip.csv";
  tr->add_option("--config", tr_config, "JSON system config");
  tr->add_option("--M", tr_m)->capture_default_str();
  tr->add_option("--images", tr_count)->capture_default_str();
  tr->add_option("--out", tr_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << usage_text(app);
    return usage_error;
  }

  CLI::App* sub = app.get_subcommands().front();
  Run run(sub->get_name(), outdir, precise);
  run.params["outdir"] = outdir;
  run.params["seed"] = seed;
  run.params["precise"] = precise;
  auto report = [&](const PipelineResult& r) {
    run.finish(r);
    out << r.summary.dump(2) << "\n";
    return r.ok ? ok : validation_failure;
  };

  try {
    if (sub == t1) {
      if (t1_nmin > t1_nmax) throw CLI::ValidationError("--Nmin must not exceed --Nmax");
      run.params.update({{"Nmin", t1_nmin}, {"Nmax", t1_nmax}, {"out", t1_out}});
      const auto r = run_table1(t1_nmin, t1_nmax);
      run.write_table(t1_out, r);
      out << r.table.csv();
      return report(r);
    }
    if (sub == mc) {
      run.params.update({{"Nmax", mc_nmax}, {"grid", mc_grid}, {"out", mc_out}});
      const auto r = run_mask_check(mc_nmax, mc_grid);
      run.write_table(mc_out, r);
      return report(r);
    }
    if (sub == bd) {
      run.params.update({{"N", bd_n}, {"l", bd_l}, {"J", bd_j}, {"K", bd_k}, {"grid", bd_grid}, {"out", bd_out},
                         {"checks", bd_checks}});
      const MaskOrder order(bd_n, bd_l);
      const auto r = run_bounds(order, bd_grid, bd_k, bd_j);
      run.write_table(bd_out, r);
      const auto checks = run_bound_suite({order}, bd_grid, bd_k, bd_j);
      run.write_table(bd_checks, checks);
      return report(r);
    }
    if (sub == fs) {
      ShearSystemConfig cfg{fs_gen.generator(), fs_alpha, fs_jmax};
      cfg.validate();
      run.params.update({{"config", to_json(cfg)}, {"grid", fs_grid}, {"out", fs_out}, {"summary", fs_summary}});
      const auto r = run_frame_scan(cfg, fs_grid);
      run.write_table(fs_out, r);
      run.write(fs_summary, r.summary.dump(2) + "\n");
      return report(r);
    }
    if (sub == dc) {
      ShearSystemConfig cfg{dc_gen.generator()};
      cfg.validate();
      run.params.update({{"config", to_json(cfg)}, {"samples", dc_samples}, {"out", dc_out}});
      const auto r = run_decay_check(cfg, dc_samples, seed);
      run.write_table(dc_out, r);
      return report(r);
    }
    if (sub == cg) {
      const CartoonSpec spec = cg_spec.empty() ? default_cartoon() : cartoon_from_json(json::parse(read_file(cg_spec)));
      run.params.update({{"spec", to_json(spec)}, {"M", cg_m}, {"supersample", cg_super}, {"out", cg_out}});
      const auto r = run_cartoon_gen(spec, cg_m, cg_super);
      run.write(cg_out, encode_pgm(*r.image));
      return report(r);
    }
    if (sub == sa) {
      SparseSettings set;
      if (!sa_config.empty()) {
        const json j = json::parse(read_file(sa_config));
        set.system = shear_config_from_json(j, set.system);
        if (j.contains("oversampling")) {
          if (j.at("oversampling").is_null()) set.oversampling.reset();
          else set.oversampling = j.at("oversampling").get<int>();
        }
      }
      const Image img = sa_image.empty() ? generate(default_cartoon(), sa_m) : read_pgm(sa_image);
      const auto ns = parse_ns(sa_ns);
      run.params.update({{"config", to_json(set.system)},
                         {"oversampling", set.oversampling ? json(*set.oversampling) : json(nullptr)},
                         {"image", sa_image.empty() ? json("default_cartoon") : json(sa_image)},
                         {"M", img.M},
                         {"Ns", ns},
                         {"out", sa_out}});
      const auto r = run_sparse_approx(set, img, ns);
      run.write_table(sa_out, r);
      return report(r);
    }
    if (sub == tr) {
      ShearSystemConfig cfg = example2_config();
      cfg.j_max = 4;
      if (!tr_config.empty()) cfg = shear_config_from_json(json::parse(read_file(tr_config)), cfg);
      run.params.update({{"config", to_json(cfg)}, {"M", tr_m}, {"images", tr_count}, {"out", tr_out}});
      const auto r = run_transform_roundtrip(cfg, tr_m, tr_count, seed);
      run.write_table(tr_out, r);
      return report(r);
    }
  } catch (const CLI::ValidationError& e) {
    err << e.what() << "\n";
    return usage_error;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return validation_failure;
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << "\n";
    return validation_failure;
  } catch (const json::exception& e) {
    err << "malformed JSON: " << e.what() << "\n";
    return usage_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return usage_error;
  }
  err << usage_text(app);
  return usage_error;
}

}  // namespace shearframe::cli
