#pragma once

#include <cstdint>
#include <stdexcept>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uidla/analysis.hpp"
#include "uidla/genealogy.hpp"
#include "uidla/lattice.hpp"

namespace uidla {

/// Invalid configuration (bad file, bad flag combination). The CLI maps
/// this to exit code 2; other runtime failures exit 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key = value experiment description. Reloading a serialized config
/// reproduces byte-identical results.
struct ExperimentConfig {
  uint64_t seed = 1;
  int dim = 2;
  ProcessKind process = ProcessKind::Uidla;
  // Exactly one of the two budgets: explicit particle count, or the volume
  // of the ball with the given radius.
  std::optional<uint64_t> particles;
  std::optional<double> radius_target;
  uint64_t replicas = 1;
  bool accel = true;
  int kernel_radius = 0;  // 0 = dimension default
  uint64_t stats_every = 0;  // 0 = only the final row
  // subset process only
  uint64_t subset_host_size = 0;
  double init_radius = -1.0;  // <0: start from {0} (or empty for idla)
  int threads = 1;
  GeomConvention geom_convention = GeomConvention::ParamHalf;
  // Output targets; empty = skip.
  std::string stats_out;
  std::string summary_out;
  std::string snapshot_out;  // per replica: path gets .<replica> suffix
  std::string render_out;

  uint64_t resolved_particles() const;
  std::string serialize() const;
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig parse_file(const std::string& path);
  void validate() const;
};

std::string process_name(ProcessKind p);
ProcessKind process_from_name(const std::string& name);

struct ReplicaOutcome {
  uint64_t replica = 0;
  ShapeReport shape;
  std::string stats_csv;  // in-memory rows for deterministic assembly
};

struct ExperimentResult {
  std::vector<ReplicaOutcome> replicas;
};

/// Runs cfg.replicas independent replicas with stream families
/// (seed, replica) and writes the configured artifacts. Replicas may run on
/// cfg.threads workers; outputs are assembled in replica order so files are
/// identical regardless of scheduling.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes text atomically via temp-and-rename.
void write_file_atomic(const std::string& path, const std::string& content);

/// P6 rasterization of the symmetric difference between a 2-d aggregate and
/// its volume-equivalent ball: aggregate-only sites blue, ball-only sites
/// red, agreement white. One lattice site per pixel, origin centered.
void render_symdiff(const Aggregate& a, const std::string& out_path);

struct PpmImage {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> rgb;  // 3 bytes per pixel, row-major

  unsigned char const* pixel(int x, int y) const {
    return &rgb[3 * (size_t(y) * size_t(width) + size_t(x))];
  }
};
PpmImage read_ppm(const std::string& path);

}  // namespace uidla
