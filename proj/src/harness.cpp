#include "uidla/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "uidla/exit_kernel.hpp"
#include "uidla/processes.hpp"
#include "uidla/stats.hpp"

namespace uidla {

std::string process_name(ProcessKind p) {
  switch (p) {
    case ProcessKind::Idla: return "idla";
    case ProcessKind::Uidla: return "uidla";
    case ProcessKind::Subset: return "subset";
    case ProcessKind::Richardson: return "richardson";
  }
  return "?";
}

ProcessKind process_from_name(const std::string& name) {
  if (name == "idla") return ProcessKind::Idla;
  if (name == "uidla") return ProcessKind::Uidla;
  if (name == "subset") return ProcessKind::Subset;
  if (name == "richardson") return ProcessKind::Richardson;
  throw ConfigError("unknown process: " + name);
}

uint64_t ExperimentConfig::resolved_particles() const {
  if (particles) return *particles;
  if (radius_target) return ball_volume(dim, *radius_target);
  throw ConfigError("config: set particles or radius");
}

void ExperimentConfig::validate() const {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("config: dim out of range");
  if (particles.has_value() == radius_target.has_value()) {
    throw ConfigError("config: set exactly one of particles / radius");
  }
  if (replicas == 0) throw ConfigError("config: replicas must be positive");
  if (threads < 1) throw ConfigError("config: threads must be positive");
  if (kernel_radius < 0 || kernel_radius > ExitKernel::kMaxRadius) {
    throw ConfigError("config: kernel_radius out of range");
  }
  if (process == ProcessKind::Subset && subset_host_size == 0) {
    throw ConfigError("config: subset process needs subset_host_size");
  }
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "seed = " << seed << "\n";
  out << "dim = " << dim << "\n";
  out << "process = " << process_name(process) << "\n";
  if (particles) out << "particles = " << *particles << "\n";
  if (radius_target) out << "radius = " << format_sig9(*radius_target) << "\n";
  out << "replicas = " << replicas << "\n";
  out << "accel = " << (accel ? "on" : "off") << "\n";
  out << "kernel_radius = " << kernel_radius << "\n";
  out << "stats_every = " << stats_every << "\n";
  out << "subset_host_size = " << subset_host_size << "\n";
  out << "init_radius = " << format_sig9(init_radius) << "\n";
  out << "threads = " << threads << "\n";
  out << "geom_convention = "
      << (geom_convention == GeomConvention::ParamHalf ? "param-half" : "mean-half")
      << "\n";
  out << "stats_out = " << stats_out << "\n";
  out << "summary_out = " << summary_out << "\n";
  out << "snapshot_out = " << snapshot_out << "\n";
  out << "render_out = " << render_out << "\n";
  return out.str();
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip comments and surrounding whitespace.
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    std::string t = trim(line);
    if (t.empty()) continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": missing '='");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    try {
      if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "dim") cfg.dim = std::stoi(value);
      else if (key == "process") cfg.process = process_from_name(value);
      else if (key == "particles") cfg.particles = std::stoull(value);
      else if (key == "radius") cfg.radius_target = std::stod(value);
      else if (key == "replicas") cfg.replicas = std::stoull(value);
      else if (key == "accel") cfg.accel = (value == "on" || value == "true" || value == "1");
      else if (key == "kernel_radius") cfg.kernel_radius = std::stoi(value);
      else if (key == "stats_every") cfg.stats_every = std::stoull(value);
      else if (key == "subset_host_size") cfg.subset_host_size = std::stoull(value);
      else if (key == "init_radius") cfg.init_radius = std::stod(value);
      else if (key == "threads") cfg.threads = std::stoi(value);
      else if (key == "geom_convention") {
        if (value == "param-half") cfg.geom_convention = GeomConvention::ParamHalf;
        else if (value == "mean-half") cfg.geom_convention = GeomConvention::MeanHalf;
        else throw ConfigError("bad geom_convention: " + value);
      }
      else if (key == "stats_out") cfg.stats_out = value;
      else if (key == "summary_out") cfg.summary_out = value;
      else if (key == "snapshot_out") cfg.snapshot_out = value;
      else if (key == "render_out") cfg.render_out = value;
      else throw ConfigError("unknown config key: " + key);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": bad value for " + key);
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse(in);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("rename failed: " + path);
  }
}

namespace {

std::string stats_row(uint64_t step, const Aggregate& a) {
  std::ostringstream out;
  out << step << ',' << a.size() << ',' << format_sig9(a.inradius()) << ','
      << format_sig9(a.outradius()) << '\n';
  return out.str();
}

ReplicaOutcome run_replica(const ExperimentConfig& cfg, uint64_t replica,
                           const KernelBank* bank) {
  StreamFamily fam{cfg.seed, replica};
  WalkOptions opts;
  if (cfg.accel) opts.kernels = bank;

  std::ostringstream stats;
  stats << "step,n_sites,inradius,outradius\n";
  const uint64_t every = cfg.stats_every;
  StepObserver observe = [&](const Aggregate& a, uint64_t step) {
    if (every != 0 && step % every == 0) stats << stats_row(step, a);
  };

  const uint64_t k = cfg.resolved_particles();
  Aggregate final_agg(cfg.dim);
  Aggregate init(cfg.dim);
  if (cfg.init_radius >= 0) {
    init = make_ball_aggregate(cfg.dim, cfg.init_radius);
  } else {
    init.insert(Point{});
  }
  switch (cfg.process) {
    case ProcessKind::Idla: {
      Aggregate start = cfg.init_radius >= 0 ? init : Aggregate(cfg.dim);
      final_agg = run_idla(start, repeated_starts(Point{}, k), fam, opts, observe);
      break;
    }
    case ProcessKind::Uidla:
      final_agg = run_uidla(init, k, fam, opts, observe).aggregate;
      break;
    case ProcessKind::Subset:
      final_agg = run_subset_uidla(init, cfg.subset_host_size, k, fam, opts, observe);
      break;
    case ProcessKind::Richardson:
      final_agg = run_richardson(init, k, fam, observe);
      break;
  }
  stats << stats_row(k, final_agg);

  ReplicaOutcome out;
  out.replica = replica;
  out.shape = shape_report(final_agg);
  out.stats_csv = stats.str();

  if (!cfg.snapshot_out.empty()) {
    std::string path = cfg.replicas == 1
                           ? cfg.snapshot_out
                           : cfg.snapshot_out + "." + std::to_string(replica);
    final_agg.save_snapshot_file(path);
  }
  if (!cfg.render_out.empty() && replica == 0) {
    render_symdiff(final_agg, cfg.render_out);
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.render_out.empty() && cfg.dim != 2) {
    throw ConfigError("render output requires dim = 2");
  }

  KernelBank bank;
  if (cfg.accel) {
    int r = cfg.kernel_radius > 0 ? cfg.kernel_radius : default_kernel_radius(cfg.dim);
    bank = KernelBank(cfg.dim, r);
  }

  ExperimentResult result;
  result.replicas.resize(cfg.replicas);
  std::atomic<uint64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      uint64_t j = next.fetch_add(1);
      if (j >= cfg.replicas) return;
      try {
        result.replicas[j] = run_replica(cfg, j, cfg.accel ? &bank : nullptr);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  int n_threads = int(std::min<uint64_t>(uint64_t(cfg.threads), cfg.replicas));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  if (!cfg.stats_out.empty()) {
    std::string all;
    for (const ReplicaOutcome& r : result.replicas) {
      all += "# replica " + std::to_string(r.replica) + "\n";
      all += r.stats_csv;
    }
    write_file_atomic(cfg.stats_out, all);
  }
  if (!cfg.summary_out.empty()) {
    std::ostringstream out;
    out << "replica,process,dim,seed,particles,n_sites,inradius,outradius,"
           "ball_radius_equiv,symdiff_count\n";
    for (const ReplicaOutcome& r : result.replicas) {
      out << r.replica << ',' << process_name(cfg.process) << ',' << cfg.dim
          << ',' << cfg.seed << ',' << cfg.resolved_particles() << ','
          << r.shape.n_sites << ',' << format_sig9(r.shape.inradius) << ','
          << format_sig9(r.shape.outradius) << ','
          << format_sig9(r.shape.ball_radius_equiv) << ','
          << r.shape.symdiff_count << '\n';
    }
    write_file_atomic(cfg.summary_out, out.str());
  }
  return result;
}

}  // namespace uidla
