// Command-line front end for the growth-process laboratory.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime abort.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "uidla/analysis.hpp"
#include "uidla/couplings.hpp"
#include "uidla/exit_kernel.hpp"
#include "uidla/genealogy.hpp"
#include "uidla/harness.hpp"
#include "uidla/processes.hpp"
#include "uidla/selftest.hpp"
#include "uidla/stats.hpp"

using namespace uidla;

namespace {

Point parse_point(const std::string& text, int dim) {
  Point p;
  std::istringstream in(text);
  std::string tok;
  int i = 0;
  while (std::getline(in, tok, ',')) {
    if (i >= dim) throw ConfigError("point has too many coordinates: " + text);
    p.c[i++] = std::stoi(tok);
  }
  if (i != dim) throw ConfigError("point has too few coordinates: " + text);
  return p;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

GeomConvention parse_convention(const std::string& name) {
  if (name == "param-half") return GeomConvention::ParamHalf;
  if (name == "mean-half") return GeomConvention::MeanHalf;
  throw ConfigError("unknown geometric convention: " + name);
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file_atomic(path, content);
  }
}

WalkOptions make_walk_options(bool accel, int dim, int kernel_radius,
                              KernelBank& bank) {
  WalkOptions opts;
  if (accel) {
    int r = kernel_radius > 0 ? kernel_radius : default_kernel_radius(dim);
    bank = KernelBank(dim, r);
    opts.kernels = &bank;
  }
  return opts;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const ExperimentConfig& cfg, const std::string& dump_config) {
  if (!dump_config.empty()) {
    emit(dump_config, cfg.serialize());
    return 0;
  }
  run_experiment(cfg);
  return 0;
}

struct CoupleArgs {
  std::string scheme = "killed";
  int dim = 2;
  uint64_t seed = 1;
  uint64_t replicas = 1;
  uint64_t particles = 10;
  int ball_radius = 10;     // killed: S0 = B[n]
  double eta = 0.5;         // killed
  std::string starts = "origin";  // killed: origin | uniform (in B[n/2])
  double e_radius = 0.0;    // tricolor: E = B[e_radius]
  double f_radius = 1.0;    // tricolor: F = B[f_radius]
  std::string out;
};

int cmd_couple(const CoupleArgs& a) {
  std::ostringstream csv;
  if (a.scheme == "killed") {
    csv << "replica,kappa,e_size,f_size,e_outradius,f_outradius\n";
    for (uint64_t rep = 0; rep < a.replicas; ++rep) {
      StreamFamily fam{a.seed, rep};
      std::vector<Point> starts;
      if (a.starts == "origin") {
        starts = repeated_starts(Point{}, a.particles);
      } else if (a.starts == "uniform") {
        RngStream rng(a.seed, (uint64_t(1) << 48) + rep);
        starts = sample_ball_points(a.dim, a.ball_radius / 2.0, a.particles, rng);
      } else {
        throw ConfigError("unknown starts mode: " + a.starts);
      }
      KilledCouplingResult r =
          coupled_domination_run(a.dim, a.ball_radius, starts, a.eta, fam);
      csv << rep << ',' << r.kappa << ',' << r.e_final.size() << ','
          << r.f_final.size() << ',' << format_sig9(r.e_final.outradius()) << ','
          << format_sig9(r.f_final.outradius()) << "\n";
    }
  } else if (a.scheme == "tricolor") {
    csv << "replica,n_blue,n_red,n_black,total\n";
    Aggregate e = make_ball_aggregate(a.dim, a.e_radius);
    Aggregate f = make_ball_aggregate(a.dim, a.f_radius);
    for (uint64_t rep = 0; rep < a.replicas; ++rep) {
      TricolorResult r = tricolor_run(e, f, a.particles, StreamFamily{a.seed, rep});
      csv << rep << ',' << r.n_blue << ',' << r.n_red << ',' << r.n_black << ','
          << r.aggregate.size() << "\n";
    }
  } else {
    throw ConfigError("unknown coupling scheme: " + a.scheme);
  }
  emit(a.out, csv.str());
  return 0;
}

struct EstimateArgs {
  std::string what = "harmonic";
  int dim = 2;
  int ball_radius = 5;
  std::string start = "0,0";
  uint64_t samples = 100'000;
  uint64_t seed = 1;
  uint64_t replicas = 1;
  double mass = 100.0;   // sandpile
  double tol = 1e-8;     // sandpile
  std::string out;
};

int cmd_estimate(const EstimateArgs& a) {
  std::ostringstream csv;
  if (a.what == "harmonic") {
    Aggregate ball = make_ball_aggregate(a.dim, a.ball_radius);
    Point x = parse_point(a.start, a.dim);
    csv << "replica,exit_point,count,frequency\n";
    for (uint64_t rep = 0; rep < a.replicas; ++rep) {
      RngStream rng(a.seed, rep);
      HarmonicMeasureEstimate est =
          estimate_harmonic_measure(ball, x, a.samples, rng);
      for (const auto& [y, count] : est.exit_counts) {
        csv << rep << ',' << format_point(y, a.dim, ';') << ',' << count << ','
            << format_sig9(double(count) / double(a.samples)) << "\n";
      }
    }
  } else if (a.what == "harnack") {
    csv << "replica,min_ratio,argmin_start,argmin_exit,excluded_exits\n";
    for (uint64_t rep = 0; rep < a.replicas; ++rep) {
      RngStream rng(a.seed, rep);
      HarnackScanResult r = harnack_ratio_scan(a.dim, a.ball_radius, a.samples, rng);
      csv << rep << ',' << format_sig9(r.min_ratio) << ','
          << format_point(r.argmin_start, a.dim, ';') << ','
          << format_point(r.argmin_exit, a.dim, ';') << ',' << r.excluded_exits
          << "\n";
    }
  } else if (a.what == "defect") {
    csv << "replica,n,defect,n_times_defect\n";
    for (uint64_t rep = 0; rep < a.replicas; ++rep) {
      RngStream rng(a.seed, rep);
      double d = averaging_defect(a.dim, a.ball_radius, a.samples, rng);
      csv << rep << ',' << a.ball_radius << ',' << format_sig9(d) << ','
          << format_sig9(a.ball_radius * d) << "\n";
    }
  } else if (a.what == "sandpile") {
    SandpileState s = sandpile_relax(a.dim, a.mass, a.tol);
    csv << "mass,total_mass,support_outradius,full_inradius,odometer_origin\n";
    csv << format_sig9(a.mass) << ',' << format_sig9(s.total_mass()) << ','
        << format_sig9(s.support_outradius()) << ','
        << format_sig9(s.full_mass_inradius()) << ','
        << format_sig9(s.odometer(Point{})) << "\n";
  } else {
    throw ConfigError("unknown estimator: " + a.what);
  }
  emit(a.out, csv.str());
  return 0;
}

struct GenealogyArgs {
  int dim = 2;
  uint64_t particles = 1000;
  uint64_t seed = 1;
  bool accel = true;
  std::string convention = "param-half";
  std::string forest_out;
  // Yule reference tree
  bool yule = false;
  double t_target = -1.0;
  uint64_t n_target = 0;
  uint64_t replicas = 1;
  std::string levels_out;
};

int cmd_genealogy(const GenealogyArgs& a) {
  if (a.yule) {
    std::ostringstream csv;
    csv << "replica,final_time,size,depth,count\n";
    for (uint64_t rep = 0; rep < a.replicas; ++rep) {
      RngStream rng(a.seed, rep);
      YuleTree t = grow_yule(YuleStop{a.n_target, a.t_target}, rng);
      std::vector<uint64_t> levels = t.level_counts();
      for (size_t k = 0; k < levels.size(); ++k) {
        csv << rep << ',' << format_sig9(t.final_time) << ',' << t.size() << ','
            << k << ',' << levels[k] << "\n";
      }
    }
    emit(a.levels_out, csv.str());
    return 0;
  }
  Aggregate start(a.dim);
  start.insert(Point{});
  KernelBank bank;
  WalkOptions opts = make_walk_options(a.accel, a.dim, 0, bank);
  UidlaResult r = run_uidla(start, a.particles, StreamFamily{a.seed, 0}, opts);
  RngStream wrng(a.seed, uint64_t(1) << 40);
  r.forest.assign_edge_weights(parse_convention(a.convention), wrng);
  std::ostringstream csv;
  r.forest.dump_csv(csv, a.dim);
  emit(a.forest_out, csv.str());
  return 0;
}

struct AnalyzeArgs {
  std::string snapshot;
  std::string report_out;
  // fluctuation table
  bool fluctuation = false;
  std::string process = "uidla";
  int dim = 2;
  std::string radii = "20,40,80";
  uint64_t replicas = 5;
  uint64_t seed = 1;
  bool accel = true;
  std::string out;
  // annulus probe
  bool annulus = false;
  double inner = 30.0;
  double width = 10.0;
  int count = 6;
  uint64_t walks = 10'000;
  uint64_t n_starts = 256;
};

int cmd_analyze(const AnalyzeArgs& a) {
  if (a.fluctuation) {
    KernelBank bank;
    WalkOptions opts = make_walk_options(a.accel, a.dim, 0, bank);
    std::vector<FluctuationRow> rows =
        fluctuation_scaling(process_from_name(a.process), a.dim,
                            parse_doubles(a.radii), a.replicas,
                            StreamFamily{a.seed, 0}, opts);
    std::ostringstream csv;
    write_fluctuation_csv(csv, rows);
    emit(a.out, csv.str());
    return 0;
  }
  if (a.annulus) {
    if (a.snapshot.empty()) throw ConfigError("annulus probe needs --snapshot");
    Aggregate s = Aggregate::load_snapshot_file(a.snapshot);
    RngStream rng(a.seed, 0);
    std::vector<Point> starts = sample_ball_points(s.dim(), a.inner, a.n_starts, rng);
    AnnulusSpec spec{a.inner, a.width, a.count};
    AnnulusCrossingReport rep = annulus_crossing_probe(s, spec, starts, a.walks, rng);
    std::ostringstream csv;
    csv << "k,crossed_count,crossed_frequency,max_index_count\n";
    for (int k = 0; k < spec.count; ++k) {
      csv << k << ',' << rep.crossed_counts[size_t(k)] << ','
          << format_sig9(rep.crossed_frequency(k)) << ','
          << rep.max_index_histogram[size_t(k)] << "\n";
    }
    emit(a.out, csv.str());
    return 0;
  }
  if (a.snapshot.empty()) throw ConfigError("analyze needs --snapshot");
  Aggregate agg = Aggregate::load_snapshot_file(a.snapshot);
  ShapeReport rep = shape_report(agg);
  std::ostringstream csv;
  write_shape_report_csv(csv, rep);
  emit(a.report_out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice growth-process laboratory: aggregation processes, "
               "couplings, genealogy, and shape analysis"};
  app.require_subcommand(1);

  // --- simulate ------------------------------------------------------------
  ExperimentConfig cfg;
  std::string config_path, dump_config, process = "uidla", accel = "on";
  uint64_t particles = 0;
  double radius = -1.0;
  auto* sim = app.add_subcommand("simulate", "Run a growth process");
  sim->add_option("--config", config_path, "Config file (key = value); flags override");
  sim->add_option("--process", process, "idla|uidla|subset|richardson");
  sim->add_option("--dim", cfg.dim, "Lattice dimension (1-4)");
  sim->add_option("--particles", particles, "Number of particles to add");
  sim->add_option("--radius", radius, "Grow to the volume of B[radius] instead");
  sim->add_option("--seed", cfg.seed, "Base RNG seed");
  sim->add_option("--accel", accel, "on|off: exit-kernel acceleration");
  sim->add_option("--kernel-radius", cfg.kernel_radius, "Kernel radius (0 = default)");
  sim->add_option("--replicas", cfg.replicas, "Independent replicas");
  sim->add_option("--threads", cfg.threads, "Worker threads for replicas");
  sim->add_option("--stats-every", cfg.stats_every,
                  "Emit a stats row every k additions (0 = final only)");
  sim->add_option("--init-radius", cfg.init_radius,
                  "Start from B[r] instead of {0} (idla: instead of empty)");
  sim->add_option("--subset-host-size", cfg.subset_host_size,
                  "Host size m for the subset process");
  sim->add_option("--stats-out", cfg.stats_out,
                  "CSV: step,n_sites,inradius,outradius");
  sim->add_option("--summary-out", cfg.summary_out, "CSV: one row per replica");
  sim->add_option("--snapshot-out", cfg.snapshot_out,
                  "Aggregate snapshot (suffixed per replica)");
  sim->add_option("--render-out", cfg.render_out,
                  "P6 symmetric-difference image (d=2, replica 0)");
  sim->add_option("--dump-config", dump_config,
                  "Serialize the effective config to this path and exit");

  // --- couple ---------------------------------------------------------------
  CoupleArgs cargs;
  auto* cpl = app.add_subcommand("couple", "Run a coupling construction");
  cpl->add_option("--scheme", cargs.scheme, "killed|tricolor");
  cpl->add_option("--dim", cargs.dim, "Lattice dimension");
  cpl->add_option("--seed", cargs.seed, "Base RNG seed");
  cpl->add_option("--replicas", cargs.replicas, "Replicas (one CSV row each)");
  cpl->add_option("--particles", cargs.particles, "Particles per replica");
  cpl->add_option("--ball-radius", cargs.ball_radius, "killed: S0 = B[n]");
  cpl->add_option("--eta", cargs.eta, "killed: survival probability");
  cpl->add_option("--starts", cargs.starts, "killed: origin|uniform");
  cpl->add_option("--e-radius", cargs.e_radius, "tricolor: E = B[r]");
  cpl->add_option("--f-radius", cargs.f_radius, "tricolor: F = B[r]");
  cpl->add_option("--out", cargs.out,
                  "CSV out; killed: replica,kappa,e_size,f_size,e_outradius,"
                  "f_outradius; tricolor: replica,n_blue,n_red,n_black,total");

  // --- estimate ---------------------------------------------------------------
  EstimateArgs eargs;
  auto* est = app.add_subcommand("estimate", "Monte Carlo estimators");
  est->add_option("--what", eargs.what, "harmonic|harnack|defect|sandpile");
  est->add_option("--dim", eargs.dim, "Lattice dimension");
  est->add_option("--ball-radius", eargs.ball_radius, "Region radius n (A = B[n])");
  est->add_option("--start", eargs.start, "harmonic: start point x as 'x,y'");
  est->add_option("--samples", eargs.samples, "Walks per estimate");
  est->add_option("--seed", eargs.seed, "Base RNG seed");
  est->add_option("--replicas", eargs.replicas, "Replicas (one row each)");
  est->add_option("--mass", eargs.mass, "sandpile: initial mass at the origin");
  est->add_option("--tol", eargs.tol, "sandpile: max residual excess");
  est->add_option("--out", eargs.out,
                  "CSV out; harmonic: replica,exit_point,count,frequency; "
                  "harnack/defect: one row per replica; sandpile: one summary row");

  // --- genealogy --------------------------------------------------------------
  GenealogyArgs gargs;
  std::string gaccel = "on";
  auto* gen = app.add_subcommand("genealogy", "Forests and the Yule reference tree");
  gen->add_option("--dim", gargs.dim, "Lattice dimension");
  gen->add_option("--particles", gargs.particles, "uIDLA particles from {0}");
  gen->add_option("--seed", gargs.seed, "Base RNG seed");
  gen->add_option("--accel", gaccel, "on|off");
  gen->add_option("--geom-convention", gargs.convention,
                  "param-half|mean-half edge-weight convention");
  gen->add_option("--forest-out", gargs.forest_out,
                  "CSV: index,parent_index,site_coords,edge_weight,depth,reaching_time");
  gen->add_flag("--yule", gargs.yule, "Grow the continuous-time reference tree");
  gen->add_option("--t-target", gargs.t_target, "yule: stop at time t");
  gen->add_option("--n-target", gargs.n_target, "yule: stop at size n");
  gen->add_option("--replicas", gargs.replicas, "yule: replicas");
  gen->add_option("--levels-out", gargs.levels_out,
                  "yule CSV: replica,final_time,size,depth,count");

  // --- analyze ----------------------------------------------------------------
  AnalyzeArgs aargs;
  std::string aaccel = "on";
  auto* ana = app.add_subcommand("analyze", "Shape reports and probes");
  ana->add_option("--snapshot", aargs.snapshot, "Aggregate snapshot to analyze");
  ana->add_option("--report-out", aargs.report_out, "Shape report CSV");
  ana->add_flag("--fluctuation", aargs.fluctuation, "Fluctuation scaling table");
  ana->add_option("--process", aargs.process, "fluctuation: idla|uidla|richardson");
  ana->add_option("--dim", aargs.dim, "Lattice dimension");
  ana->add_option("--radii", aargs.radii, "fluctuation: comma-separated radii");
  ana->add_option("--replicas", aargs.replicas, "fluctuation: replicas per radius");
  ana->add_option("--seed", aargs.seed, "Base RNG seed");
  ana->add_option("--accel", aaccel, "on|off");
  ana->add_flag("--annulus", aargs.annulus, "Annulus-crossing probe");
  ana->add_option("--inner", aargs.inner, "annulus: inner radius m");
  ana->add_option("--width", aargs.width, "annulus: width w");
  ana->add_option("--count", aargs.count, "annulus: number of annuli");
  ana->add_option("--walks", aargs.walks, "annulus: walk count");
  ana->add_option("--starts", aargs.n_starts, "annulus: sampled starts in B[m]");
  ana->add_option("--out", aargs.out,
                  "CSV out; fluctuation: n,particles,replicas,mean/sd columns; "
                  "annulus: k,crossed_count,crossed_frequency,max_index_count");

  // --- render -----------------------------------------------------------------
  std::string render_snapshot, render_out = "symdiff.ppm";
  auto* ren = app.add_subcommand("render", "Symmetric-difference image from a snapshot");
  ren->add_option("--snapshot", render_snapshot, "Aggregate snapshot (d=2)")->required();
  ren->add_option("--out", render_out, "P6 output path");

  // --- selftest -----------------------------------------------------------------
  SelftestOptions sopts;
  auto* self = app.add_subcommand("selftest", "Run the acceptance suite");
  self->add_option("--seed", sopts.seed, "Suite seed");
  self->add_option("--out-dir", sopts.out_dir, "Artifact directory");
  self->add_flag("--quick", sopts.quick, "Reduced sample sizes (development only)");
  self->add_option("--criterion", sopts.only, "Run only these criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      if (!config_path.empty()) {
        ExperimentConfig from_file = ExperimentConfig::parse_file(config_path);
        // Flags override file values where given.
        ExperimentConfig merged = from_file;
        if (sim->count("--process")) merged.process = process_from_name(process);
        if (sim->count("--dim")) merged.dim = cfg.dim;
        if (sim->count("--particles")) merged.particles = particles;
        if (sim->count("--radius")) merged.radius_target = radius;
        if (sim->count("--seed")) merged.seed = cfg.seed;
        if (sim->count("--accel")) merged.accel = (accel == "on");
        if (sim->count("--kernel-radius")) merged.kernel_radius = cfg.kernel_radius;
        if (sim->count("--replicas")) merged.replicas = cfg.replicas;
        if (sim->count("--threads")) merged.threads = cfg.threads;
        if (sim->count("--stats-every")) merged.stats_every = cfg.stats_every;
        if (sim->count("--init-radius")) merged.init_radius = cfg.init_radius;
        if (sim->count("--subset-host-size")) merged.subset_host_size = cfg.subset_host_size;
        if (sim->count("--stats-out")) merged.stats_out = cfg.stats_out;
        if (sim->count("--summary-out")) merged.summary_out = cfg.summary_out;
        if (sim->count("--snapshot-out")) merged.snapshot_out = cfg.snapshot_out;
        if (sim->count("--render-out")) merged.render_out = cfg.render_out;
        return cmd_simulate(merged, dump_config);
      }
      cfg.process = process_from_name(process);
      cfg.accel = (accel == "on");
      if (sim->count("--particles")) cfg.particles = particles;
      if (sim->count("--radius")) cfg.radius_target = radius;
      if (!dump_config.empty()) return cmd_simulate(cfg, dump_config);
      cfg.validate();
      return cmd_simulate(cfg, "");
    }
    if (cpl->parsed()) return cmd_couple(cargs);
    if (est->parsed()) return cmd_estimate(eargs);
    if (gen->parsed()) {
      gargs.accel = (gaccel == "on");
      return cmd_genealogy(gargs);
    }
    if (ana->parsed()) {
      aargs.accel = (aaccel == "on");
      return cmd_analyze(aargs);
    }
    if (ren->parsed()) {
      Aggregate a = Aggregate::load_snapshot_file(render_snapshot);
      render_symdiff(a, render_out);
      return 0;
    }
    if (self->parsed()) {
      std::vector<CriterionResult> results = run_selftest(sopts, std::cout);
      int failures = 0;
      for (const CriterionResult& r : results) failures += r.pass ? 0 : 1;
      std::cout << (failures == 0 ? "selftest: all criteria passed\n"
                                  : "selftest: " + std::to_string(failures) +
                                        " criterion(s) failed\n");
      return failures == 0 ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime abort: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
