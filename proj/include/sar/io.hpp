#pragma once

#include "sar/admm.hpp"
#include "sar/simulator.hpp"
#include "sar/solver.hpp"

#include <stdexcept>
#include <string>

namespace sar {

// Error taxonomy; the CLI maps each family to its own exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Phase-history container: text header (version, counts, azimuth list or rule,
// k list or chirp metadata, endianness) followed by a binary payload of
// pulses * samples little-endian float64 (re, im) pairs, pulse-major.
void write_phase_history(const std::string& path, const PhaseHistory& ph);
PhaseHistory read_phase_history(const std::string& path);

void write_complex_image(const std::string& path, const ComplexImage& img);
ComplexImage read_complex_image(const std::string& path);

void write_real_image(const std::string& path, const RealImage& img);
RealImage read_real_image(const std::string& path);

void write_posterior(const std::string& path, const SubAperturePosterior& post);
SubAperturePosterior read_posterior(const std::string& path);

// 8-bit binary PGM of a dB image: -100 dB maps to 0, 0 dB to 255.
void write_pgm_db(const std::string& path, const RealImage& db);

// One run configuration: a JSON file plus flag overrides applied by the CLI.
struct RunConfig {
  std::string method = "bcd";  // nufft | l1 | bcd
  std::string regularizer = "identity";
  Scalar span_deg = 40;
  Scalar overlap_deg = 10;
  Scalar eps = 0.01;
  int max_iters = 50;
  Scalar lambda = 0.05;
  Scalar admm_rho = 1.0;
  Scalar admm_beta = 1.0;
  int admm_iters = 20;
  int workers = 0;
  std::uint64_t seed = 1;
  std::string out = "out";
  SceneGrid grid{128, 128, 1.0};
  Scalar alpha_bg = 0;
  std::vector<Scatterer> scatterers;
  Index pulses = 256;
  Index samples = 64;
  Scalar beta_true = std::numeric_limits<Scalar>::infinity();
  Scalar k_min_frac = 0.05;  // radial band as a fraction of pi / dx
  Scalar k_max_frac = 0.95;
  NufftSettings nufft;
  int cov_probes = 64;
};

RunConfig load_run_config(const std::string& path);

SceneSpec scene_spec(const RunConfig& cfg);
AcquisitionSpec acquisition_spec(const RunConfig& cfg);
SolverConfig solver_config(const RunConfig& cfg);
AdmmConfig admm_config(const RunConfig& cfg);
SparsifyingOperator::Kind regularizer_kind(const std::string& name);

}  // namespace sar
