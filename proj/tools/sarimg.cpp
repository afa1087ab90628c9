// sarimg: simulate phase histories, form sub-aperture images, composite them,
// and report statistics. See README.md for the file formats.

#include "sar/admm.hpp"
#include "sar/composite.hpp"
#include "sar/geometry.hpp"
#include "sar/io.hpp"
#include "sar/metrics.hpp"
#include "sar/simulator.hpp"
#include "sar/solver.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sar;

namespace {

struct Flags {
  std::string config;
  std::string method;
  std::string regularizer;
  Scalar span = 0, overlap = 0, eps = 0, lambda = 0;
  int workers = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string in;
  std::vector<std::string> images;
  std::vector<int> region;
  std::string timing;
};

// Config file first, then any flag the user actually passed wins.
RunConfig resolve_config(const CLI::App* cmd, const Flags& fl) {
  RunConfig cfg;
  if (!fl.config.empty()) cfg = load_run_config(fl.config);
  if (cmd->count("--method")) cfg.method = fl.method;
  if (cmd->count("--regularizer")) cfg.regularizer = fl.regularizer;
  if (cmd->count("--span")) cfg.span_deg = fl.span;
  if (cmd->count("--overlap")) cfg.overlap_deg = fl.overlap;
  if (cmd->count("--eps")) cfg.eps = fl.eps;
  if (cmd->count("--lambda")) cfg.lambda = fl.lambda;
  if (cmd->count("--workers")) cfg.workers = fl.workers;
  if (cmd->count("--seed")) cfg.seed = fl.seed;
  if (cmd->count("--out")) cfg.out = fl.out;
  if (cfg.method != "nufft" && cfg.method != "l1" && cfg.method != "bcd")
    throw ConfigError("config key 'method': must be nufft, l1 or bcd");
  regularizer_kind(cfg.regularizer);
  if (!(cfg.eps > 0)) throw ConfigError("config key 'eps': must be positive");
  if (cfg.lambda < 0) throw ConfigError("config key 'lambda': must be nonnegative");
  if (cfg.workers < 0) throw ConfigError("config key 'workers': must be nonnegative");
  return cfg;
}

std::string window_tag(size_t w) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%03zu", w);
  return buf;
}

// dB rendering that tolerates an all-zero image (display floor everywhere).
RealImage db_or_floor(const ComplexImage& img) {
  if (img.values.isZero(0)) {
    RealImage db;
    db.grid = img.grid;
    db.values = Vec::Constant(img.grid.n(), -100.0);
    return db;
  }
  return to_db(img);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("config key 'out': cannot create directory '" + out + "'");
}

int cmd_simulate(const CLI::App* cmd, const Flags& fl) {
  const RunConfig cfg = resolve_config(cmd, fl);
  ensure_out_dir(cfg.out);

  const AcquisitionSpec acq = acquisition_spec(cfg);
  const AperturePlan plan = plan_subapertures(acq.azimuths, cfg.span_deg, cfg.overlap_deg);
  const SceneSpec scene = scene_spec(cfg);

  const PhaseHistory ph = synthesize(scene, acq, plan, cfg.nufft);
  write_phase_history(fs::path(cfg.out) / "ph.sarph", ph);
  for (size_t w = 0; w < plan.windows.size(); ++w) {
    const ComplexImage truth = make_scene(scene, plan.windows[w]);
    const std::string stem = "truth_" + window_tag(w);
    write_complex_image(fs::path(cfg.out) / (stem + ".sarim"), truth);
    write_pgm_db(fs::path(cfg.out) / (stem + ".pgm"), db_or_floor(truth));
  }
  std::cout << "simulated " << ph.pulses() << " pulses x " << ph.samples_per_pulse()
            << " samples over " << plan.size() << " windows into " << cfg.out << "\n";
  return 0;
}

int cmd_form(const CLI::App* cmd, const Flags& fl) {
  const RunConfig cfg = resolve_config(cmd, fl);
  if (fl.in.empty()) throw ConfigError("config key 'in': form needs --in <phase history>");
  ensure_out_dir(cfg.out);

  const PhaseHistory ph = read_phase_history(fl.in);
  const AperturePlan plan = plan_subapertures(ph.azimuths, cfg.span_deg, cfg.overlap_deg);
  std::vector<TimedRun> timings;
  const auto t0 = std::chrono::steady_clock::now();

  if (cfg.method == "bcd") {
    const auto posteriors = run_all(ph, plan, cfg.grid, regularizer_kind(cfg.regularizer),
                                    solver_config(cfg), cfg.nufft, cfg.workers);
    timings.push_back({"bcd", seconds_since(t0), cfg.workers});
    for (size_t w = 0; w < posteriors.size(); ++w) {
      const std::string stem = "win_" + window_tag(w);
      write_posterior(fs::path(cfg.out) / (stem + ".sarpost"), posteriors[w]);
      write_pgm_db(fs::path(cfg.out) / (stem + ".pgm"), db_or_floor(posteriors[w].mu));
    }
  } else {
    std::vector<ComplexImage> images;
    if (cfg.method == "nufft") {
      images = nufft_baseline(ph, plan, cfg.grid, cfg.nufft);
      timings.push_back({"nufft", seconds_since(t0), 1});
    } else {
      const SparsifyingOperator T = regularizer_kind(cfg.regularizer) ==
                                            SparsifyingOperator::Kind::Identity
                                        ? SparsifyingOperator::identity(cfg.grid)
                                        : SparsifyingOperator::tv2d(cfg.grid);
      for (const auto& win : plan.windows) {
        NufftOperator op(cfg.grid, freq_coords(win, ph), cfg.nufft);
        images.push_back(l1_admm(window_data(win, ph), op, T, admm_config(cfg)).f);
      }
      timings.push_back({"l1", seconds_since(t0), 1});
    }
    for (size_t w = 0; w < images.size(); ++w) {
      const std::string stem = "win_" + window_tag(w);
      write_complex_image(fs::path(cfg.out) / (stem + ".sarim"), images[w]);
      write_pgm_db(fs::path(cfg.out) / (stem + ".pgm"), db_or_floor(images[w]));
    }
  }

  std::ofstream tf(fs::path(cfg.out) / "timing.csv");
  tf << "label,seconds,workers\n";
  for (const auto& r : timings)
    tf << r.label << "," << r.seconds << "," << r.workers << "\n";
  std::cout << "formed " << plan.size() << " windows with method " << cfg.method << " into "
            << cfg.out << "\n";
  return 0;
}

int cmd_composite(const CLI::App* cmd, const Flags& fl) {
  const std::string in = fl.in.empty() ? "out" : fl.in;
  const std::string out = cmd->count("--out") ? fl.out : in;
  ensure_out_dir(out);

  std::vector<std::string> names;
  {
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(in, ec))
      if (e.path().extension() == ".sarpost") names.push_back(e.path().string());
    if (ec) throw ConfigError("config key 'in': cannot read directory '" + in + "'");
  }
  std::sort(names.begin(), names.end());
  if (names.empty())
    throw ConfigError("config key 'in': no .sarpost files in '" + in + "'");

  std::vector<SubAperturePosterior> posteriors;
  posteriors.reserve(names.size());
  for (const auto& n : names) posteriors.push_back(read_posterior(n));

  const ComplexImage cmax = composite_max(posteriors);
  write_complex_image(fs::path(out) / "composite_max.sarim", cmax);
  write_pgm_db(fs::path(out) / "composite_max.pgm", db_or_floor(cmax));

  const CompositeMean cmean = composite_mean(posteriors);
  write_complex_image(fs::path(out) / "composite_mean.sarim", cmean.image);
  write_pgm_db(fs::path(out) / "composite_mean.pgm", db_or_floor(cmean.image));

  const RealImage cstd = composite_std(cmean.cov_diag, cmean.image.grid);
  write_real_image(fs::path(out) / "composite_std.sarre", cstd);
  write_pgm_db(fs::path(out) / "composite_std.pgm", to_db(cstd));

  if (posteriors.front().reg_kind == SparsifyingOperator::Kind::Identity) {
    const RealImage calpha = composite_alpha(posteriors);
    write_real_image(fs::path(out) / "composite_alpha.sarre", calpha);
    write_pgm_db(fs::path(out) / "composite_alpha.pgm", to_db(calpha));
  } else {
    std::cerr << "note: tv posteriors carry difference precisions, skipping composite_alpha\n";
  }
  std::cout << "composited " << posteriors.size() << " windows into " << out << "\n";
  return 0;
}

int cmd_stats(const CLI::App* cmd, const Flags& fl) {
  const std::string out = cmd->count("--out") ? fl.out : ".";
  ensure_out_dir(out);
  if (fl.images.empty() && fl.timing.empty())
    throw ConfigError("config key 'in': stats needs image files or --timing");

  if (!fl.images.empty()) {
    std::ofstream vf(fs::path(out) / "variance.csv");
    vf << "file,region_variance\n";
    for (const auto& path : fl.images) {
      const ComplexImage img = read_complex_image(path);
      if (fl.region.size() == 4) {
        RegionSpec region{fl.region[0], fl.region[1], fl.region[2], fl.region[3]};
        char num[32];
        std::snprintf(num, sizeof num, "%.17g", region_variance(img, region));
        vf << path << "," << num << "\n";
      }
      const LogHistogram h = log_histogram(img, 60);
      const std::string stem = fs::path(path).stem().string();
      std::ofstream hf(fs::path(out) / ("hist_" + stem + ".csv"));
      hf << "log10_lo,log10_hi,count\n";
      hf << "underflow,underflow," << h.underflow << "\n";
      for (Index b = 0; b < h.counts.size(); ++b)
        hf << h.edges[b] << "," << h.edges[b + 1] << "," << h.counts[b] << "\n";
    }
  }

  if (!fl.timing.empty()) {
    std::ifstream tf(fl.timing);
    if (!tf) throw FormatError(fl.timing + ": cannot open for reading");
    std::vector<TimedRun> runs;
    std::string line;
    std::getline(tf, line);  // header
    while (std::getline(tf, line)) {
      if (line.empty()) continue;
      const auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
      if (c1 == std::string::npos)
        throw FormatError(fl.timing + ": bad timing row '" + line + "'");
      TimedRun r;
      r.label = line.substr(0, c1);
      r.seconds = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      if (c2 != std::string::npos) r.workers = std::stoi(line.substr(c2 + 1));
      runs.push_back(r);
    }
    std::ofstream rf(fs::path(out) / "timings.txt");
    rf << timing_report(runs);
  }
  std::cout << "stats written to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-aperture SAR image formation"};
  app.require_subcommand(1);
  Flags fl;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", fl.config, "JSON run configuration");
    cmd->add_option("--method", fl.method, "nufft | l1 | bcd");
    cmd->add_option("--regularizer", fl.regularizer, "identity | tv");
    cmd->add_option("--span", fl.span, "window span, degrees");
    cmd->add_option("--overlap", fl.overlap, "window overlap, degrees");
    cmd->add_option("--eps", fl.eps, "solver stopping tolerance");
    cmd->add_option("--lambda", fl.lambda, "l1 weight");
    cmd->add_option("--workers", fl.workers, "worker threads, 0 = hardware");
    cmd->add_option("--seed", fl.seed, "simulation seed");
    cmd->add_option("--out", fl.out, "output directory");
  };

  CLI::App* sim = app.add_subcommand("simulate", "Synthesize a phase history and truth images");
  add_common(sim);

  CLI::App* form = app.add_subcommand("form", "Form per-window images from a phase history");
  add_common(form);
  form->add_option("--in", fl.in, "input .sarph phase history")->required();

  CLI::App* comp = app.add_subcommand("composite", "Combine per-window posteriors");
  comp->add_option("--in", fl.in, "directory holding .sarpost files")->required();
  comp->add_option("--out", fl.out, "output directory (default: same as --in)");

  CLI::App* stats = app.add_subcommand("stats", "Region variance, histograms and timing tables");
  stats->add_option("images", fl.images, "complex image files (.sarim)");
  stats->add_option("--region", fl.region, "x0 y0 w h pixel rectangle")->expected(4);
  stats->add_option("--timing", fl.timing, "timing.csv emitted by form");
  stats->add_option("--out", fl.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim, fl);
    if (form->parsed()) return cmd_form(form, fl);
    if (comp->parsed()) return cmd_composite(comp, fl);
    return cmd_stats(stats, fl);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
}
