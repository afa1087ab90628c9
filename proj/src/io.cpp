#include "sar/io.hpp"

#include "sar/geometry.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sar {

namespace {

std::string fmt_double(Scalar v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_line(std::ostream& os, const std::string& line) { os << line << '\n'; }

void write_payload(std::ostream& os, const void* data, size_t bytes) {
  os.write(static_cast<const char*>(data), std::streamsize(bytes));
}

void read_payload(std::istream& is, const std::string& path, const std::string& what, void* data,
                  size_t bytes) {
  is.read(static_cast<char*>(data), std::streamsize(bytes));
  if (size_t(is.gcount()) != bytes)
    throw FormatError(path + ": truncated " + what + " payload, expected " +
                      std::to_string(bytes) + " bytes, found " + std::to_string(is.gcount()));
}

void expect_no_trailing(std::istream& is, const std::string& path) {
  char c;
  if (is.read(&c, 1))
    throw FormatError(path + ": trailing bytes after declared payload");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError(path + ": cannot open for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(path + ": cannot open for reading");
  return is;
}

// Header lines are "key value...", terminated by a bare "data" line.
struct HeaderLine {
  std::string key;
  std::vector<std::string> tokens;
};

std::vector<HeaderLine> read_header(std::istream& is, const std::string& path,
                                    const std::string& magic) {
  std::vector<HeaderLine> lines;
  std::string line;
  if (!std::getline(is, line) || line != magic + " 1")
    throw FormatError(path + ": bad magic or version, expected '" + magic + " 1'");
  while (std::getline(is, line)) {
    if (line == "data") return lines;
    std::istringstream ss(line);
    HeaderLine hl;
    ss >> hl.key;
    std::string tok;
    while (ss >> tok) hl.tokens.push_back(tok);
    if (hl.key.empty()) throw FormatError(path + ": empty header line");
    lines.push_back(std::move(hl));
  }
  throw FormatError(path + ": missing 'data' terminator in header");
}

const HeaderLine* find_line(const std::vector<HeaderLine>& lines, const std::string& key) {
  for (const auto& l : lines)
    if (l.key == key) return &l;
  return nullptr;
}

const HeaderLine& need_line(const std::vector<HeaderLine>& lines, const std::string& path,
                            const std::string& key) {
  const HeaderLine* l = find_line(lines, key);
  if (!l) throw FormatError(path + ": missing header field '" + key + "'");
  return *l;
}

Scalar parse_double(const std::string& path, const std::string& key, const std::string& tok) {
  char* end = nullptr;
  const Scalar v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw FormatError(path + ": field '" + key + "': bad number '" + tok + "'");
  return v;
}

long long parse_int(const std::string& path, const std::string& key, const std::string& tok) {
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0')
    throw FormatError(path + ": field '" + key + "': bad integer '" + tok + "'");
  return v;
}

Vec parse_double_list(const std::string& path, const HeaderLine& l, Index expected) {
  if (Index(l.tokens.size()) != expected)
    throw FormatError(path + ": field '" + l.key + "': expected " + std::to_string(expected) +
                      " values, found " + std::to_string(l.tokens.size()));
  Vec v(expected);
  for (Index i = 0; i < expected; ++i) v[i] = parse_double(path, l.key, l.tokens[size_t(i)]);
  return v;
}

void check_endian(const std::vector<HeaderLine>& lines, const std::string& path) {
  const HeaderLine& l = need_line(lines, path, "endian");
  if (l.tokens.size() != 1 || l.tokens[0] != "little")
    throw FormatError(path + ": field 'endian': only 'little' payloads are supported");
}

}  // namespace

void write_phase_history(const std::string& path, const PhaseHistory& ph) {
  const Index P = ph.pulses(), K = ph.samples_per_pulse();
  if (P == 0 || K == 0) throw FormatError(path + ": refusing to write an empty phase history");
  if (ph.k.rows() != P || ph.samples.rows() != P || ph.samples.cols() != K)
    throw FormatError(path + ": inconsistent pulse/sample dimensions");

  auto os = open_out(path);
  write_line(os, "SARPH 1");
  write_line(os, "pulses " + std::to_string(P));
  write_line(os, "samples " + std::to_string(K));
  write_line(os, "endian little");
  {
    std::string az = "azimuths";
    for (Index p = 0; p < P; ++p) az += " " + fmt_double(ph.azimuths[p]);
    write_line(os, az);
  }
  if (ph.chirp.valid) {
    write_line(os, "chirp " + fmt_double(ph.chirp.omega) + " " + fmt_double(ph.chirp.alpha) +
                       " " + fmt_double(ph.chirp.tau0) + " " + fmt_double(ph.chirp.c) + " " +
                       fmt_double(ph.chirp.t0) + " " + fmt_double(ph.chirp.dt));
  } else {
    const bool shared = (ph.k.array().rowwise() - ph.k.row(0).array()).abs().maxCoeff() == 0;
    if (shared) {
      std::string ks = "k";
      for (Index s = 0; s < K; ++s) ks += " " + fmt_double(ph.k(0, s));
      write_line(os, ks);
    } else {
      std::string ks = "k_rows";
      for (Index p = 0; p < P; ++p)
        for (Index s = 0; s < K; ++s) ks += " " + fmt_double(ph.k(p, s));
      write_line(os, ks);
    }
  }
  write_line(os, "data");
  MatC row_major = ph.samples;
  for (Index p = 0; p < P; ++p)
    write_payload(os, row_major.row(p).eval().data(), size_t(K) * sizeof(Complex));
}

PhaseHistory read_phase_history(const std::string& path) {
  auto is = open_in(path);
  const auto lines = read_header(is, path, "SARPH");
  check_endian(lines, path);

  const auto& pl = need_line(lines, path, "pulses");
  const auto& sl = need_line(lines, path, "samples");
  if (pl.tokens.size() != 1 || sl.tokens.size() != 1)
    throw FormatError(path + ": fields 'pulses'/'samples' take one value");
  const long long P = parse_int(path, "pulses", pl.tokens[0]);
  const long long K = parse_int(path, "samples", sl.tokens[0]);
  if (P <= 0 || K <= 0)
    throw FormatError(path + ": fields 'pulses'/'samples' must be positive");

  PhaseHistory ph;
  if (const HeaderLine* az = find_line(lines, "azimuths")) {
    ph.azimuths = parse_double_list(path, *az, P);
  } else if (const HeaderLine* rule = find_line(lines, "azimuths_linspace")) {
    if (rule->tokens.size() != 2)
      throw FormatError(path + ": field 'azimuths_linspace' takes start and step");
    const Scalar start = parse_double(path, rule->key, rule->tokens[0]);
    const Scalar step = parse_double(path, rule->key, rule->tokens[1]);
    ph.azimuths = start + step * Vec::LinSpaced(P, 0, Scalar(P - 1)).array();
  } else {
    throw FormatError(path + ": missing header field 'azimuths' or 'azimuths_linspace'");
  }
  for (Index p = 1; p < P; ++p)
    if (ph.azimuths[p] < ph.azimuths[p - 1])
      throw FormatError(path + ": field 'azimuths': values must be nondecreasing");

  if (const HeaderLine* kl = find_line(lines, "k")) {
    const Vec k = parse_double_list(path, *kl, K);
    ph.k = k.transpose().replicate(P, 1);
  } else if (const HeaderLine* kr = find_line(lines, "k_rows")) {
    const Vec flat = parse_double_list(path, *kr, P * K);
    ph.k.resize(P, K);
    for (Index p = 0; p < P; ++p) ph.k.row(p) = flat.segment(p * K, K).transpose();
  } else if (const HeaderLine* ch = find_line(lines, "chirp")) {
    if (ch->tokens.size() != 6)
      throw FormatError(path + ": field 'chirp' takes omega alpha tau0 c t0 dt");
    ph.chirp.omega = parse_double(path, "chirp", ch->tokens[0]);
    ph.chirp.alpha = parse_double(path, "chirp", ch->tokens[1]);
    ph.chirp.tau0 = parse_double(path, "chirp", ch->tokens[2]);
    ph.chirp.c = parse_double(path, "chirp", ch->tokens[3]);
    ph.chirp.t0 = parse_double(path, "chirp", ch->tokens[4]);
    ph.chirp.dt = parse_double(path, "chirp", ch->tokens[5]);
    ph.chirp.valid = true;
    const Vec t = ph.chirp.t0 + ph.chirp.dt * Vec::LinSpaced(K, 0, Scalar(K - 1)).array();
    const Vec k = compute_spatial_frequencies(t, ph.chirp);
    ph.k = k.transpose().replicate(P, 1);
  } else {
    throw FormatError(path + ": missing header field 'k', 'k_rows' or 'chirp'");
  }
  for (Index p = 0; p < P; ++p)
    for (Index s = 0; s < K; ++s)
      if (!(ph.k(p, s) > 0) || !std::isfinite(ph.k(p, s)))
        throw FormatError(path + ": field 'k': values must be finite and positive");

  ph.samples.resize(P, K);
  std::vector<Complex> row(static_cast<size_t>(K));
  for (Index p = 0; p < P; ++p) {
    read_payload(is, path, "sample", row.data(), size_t(K) * sizeof(Complex));
    for (Index s = 0; s < K; ++s) ph.samples(p, s) = row[size_t(s)];
  }
  expect_no_trailing(is, path);
  return ph;
}

namespace {
void write_grid_header(std::ostream& os, const SceneGrid& g) {
  write_line(os, "nx " + std::to_string(g.nx));
  write_line(os, "ny " + std::to_string(g.ny));
  write_line(os, "extent " + fmt_double(g.extent));
  write_line(os, "endian little");
}

SceneGrid read_grid_header(const std::vector<HeaderLine>& lines, const std::string& path) {
  check_endian(lines, path);
  SceneGrid g;
  g.nx = int(parse_int(path, "nx", need_line(lines, path, "nx").tokens.at(0)));
  g.ny = int(parse_int(path, "ny", need_line(lines, path, "ny").tokens.at(0)));
  g.extent = parse_double(path, "extent", need_line(lines, path, "extent").tokens.at(0));
  if (g.nx <= 0 || g.ny <= 0 || !(g.extent > 0))
    throw FormatError(path + ": fields 'nx'/'ny'/'extent' must be positive");
  return g;
}
}  // namespace

void write_complex_image(const std::string& path, const ComplexImage& img) {
  if (img.values.size() != img.grid.n())
    throw FormatError(path + ": image length does not match its grid");
  auto os = open_out(path);
  write_line(os, "SARIM 1");
  write_grid_header(os, img.grid);
  write_line(os, "data");
  write_payload(os, img.values.data(), size_t(img.values.size()) * sizeof(Complex));
}

ComplexImage read_complex_image(const std::string& path) {
  auto is = open_in(path);
  const auto lines = read_header(is, path, "SARIM");
  ComplexImage img;
  img.grid = read_grid_header(lines, path);
  img.values.resize(img.grid.n());
  read_payload(is, path, "image", img.values.data(),
               size_t(img.values.size()) * sizeof(Complex));
  expect_no_trailing(is, path);
  return img;
}

void write_real_image(const std::string& path, const RealImage& img) {
  if (img.values.size() != img.grid.n())
    throw FormatError(path + ": image length does not match its grid");
  auto os = open_out(path);
  write_line(os, "SARRE 1");
  write_grid_header(os, img.grid);
  write_line(os, "data");
  write_payload(os, img.values.data(), size_t(img.values.size()) * sizeof(Scalar));
}

RealImage read_real_image(const std::string& path) {
  auto is = open_in(path);
  const auto lines = read_header(is, path, "SARRE");
  RealImage img;
  img.grid = read_grid_header(lines, path);
  img.values.resize(img.grid.n());
  read_payload(is, path, "image", img.values.data(),
               size_t(img.values.size()) * sizeof(Scalar));
  expect_no_trailing(is, path);
  return img;
}

void write_posterior(const std::string& path, const SubAperturePosterior& post) {
  const Index N = post.mu.grid.n();
  if (post.mu.values.size() != N || post.theta.diag.size() != N)
    throw FormatError(path + ": posterior image/phase length mismatch");
  auto os = open_out(path);
  write_line(os, "SARPOST 1");
  write_grid_header(os, post.mu.grid);
  write_line(os, std::string("regularizer ") +
                     (post.reg_kind == SparsifyingOperator::Kind::Identity ? "identity" : "tv"));
  write_line(os, "beta " + fmt_double(post.beta));
  write_line(os, "iterations " + std::to_string(post.iterations));
  write_line(os, "converged " + std::to_string(post.converged ? 1 : 0));
  write_line(os, "cg_healthy " + std::to_string(post.cg_healthy ? 1 : 0));
  write_line(os, "alpha_len " + std::to_string(post.alpha.size()));
  write_line(os, "cov " + std::to_string(post.cov_diag.size() > 0 ? 1 : 0));
  write_line(os, "data");
  write_payload(os, post.mu.values.data(), size_t(N) * sizeof(Complex));
  write_payload(os, post.theta.diag.data(), size_t(N) * sizeof(Complex));
  write_payload(os, post.alpha.data(), size_t(post.alpha.size()) * sizeof(Scalar));
  if (post.cov_diag.size() > 0)
    write_payload(os, post.cov_diag.data(), size_t(N) * sizeof(Scalar));
}

SubAperturePosterior read_posterior(const std::string& path) {
  auto is = open_in(path);
  const auto lines = read_header(is, path, "SARPOST");
  SubAperturePosterior post;
  post.mu.grid = read_grid_header(lines, path);
  const Index N = post.mu.grid.n();

  const std::string reg = need_line(lines, path, "regularizer").tokens.at(0);
  if (reg != "identity" && reg != "tv")
    throw FormatError(path + ": field 'regularizer': unknown value '" + reg + "'");
  post.reg_kind =
      reg == "identity" ? SparsifyingOperator::Kind::Identity : SparsifyingOperator::Kind::Tv2d;
  post.beta = parse_double(path, "beta", need_line(lines, path, "beta").tokens.at(0));
  post.iterations =
      int(parse_int(path, "iterations", need_line(lines, path, "iterations").tokens.at(0)));
  post.converged =
      parse_int(path, "converged", need_line(lines, path, "converged").tokens.at(0)) != 0;
  post.cg_healthy =
      parse_int(path, "cg_healthy", need_line(lines, path, "cg_healthy").tokens.at(0)) != 0;
  const long long Q =
      parse_int(path, "alpha_len", need_line(lines, path, "alpha_len").tokens.at(0));
  const bool has_cov = parse_int(path, "cov", need_line(lines, path, "cov").tokens.at(0)) != 0;
  if (Q != N && Q != 2 * N)
    throw FormatError(path + ": field 'alpha_len': must be N or 2N for the declared grid");

  post.mu.values.resize(N);
  post.theta.diag.resize(N);
  post.alpha.resize(Q);
  read_payload(is, path, "mu", post.mu.values.data(), size_t(N) * sizeof(Complex));
  read_payload(is, path, "theta", post.theta.diag.data(), size_t(N) * sizeof(Complex));
  read_payload(is, path, "alpha", post.alpha.data(), size_t(Q) * sizeof(Scalar));
  if (has_cov) {
    post.cov_diag.resize(N);
    read_payload(is, path, "cov", post.cov_diag.data(), size_t(N) * sizeof(Scalar));
    if (post.reg_kind == SparsifyingOperator::Kind::Identity)
      post.precision_diag = post.cov_diag.cwiseInverse();
  }
  expect_no_trailing(is, path);
  return post;
}

void write_pgm_db(const std::string& path, const RealImage& db) {
  if (db.values.size() != db.grid.n())
    throw FormatError(path + ": image length does not match its grid");
  auto os = open_out(path);
  os << "P5\n" << db.grid.nx << " " << db.grid.ny << "\n255\n";
  std::vector<unsigned char> row(size_t(db.grid.nx));
  for (int iy = 0; iy < db.grid.ny; ++iy) {
    for (int ix = 0; ix < db.grid.nx; ++ix) {
      const Scalar v = std::clamp(db.values[db.grid.idx(ix, iy)], -100.0, 0.0);
      row[size_t(ix)] = static_cast<unsigned char>(std::lround((v + 100.0) * 2.55));
    }
    write_payload(os, row.data(), row.size());
  }
}

namespace {
using nlohmann::json;

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

template <typename T>
T get_field(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad_key(key, "wrong type");
  }
}
}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }

  RunConfig cfg;
  cfg.method = get_field<std::string>(j, "method", cfg.method);
  if (cfg.method != "nufft" && cfg.method != "l1" && cfg.method != "bcd")
    bad_key("method", "must be nufft, l1 or bcd");
  cfg.regularizer = get_field<std::string>(j, "regularizer", cfg.regularizer);
  regularizer_kind(cfg.regularizer);
  cfg.span_deg = get_field<Scalar>(j, "span_deg", cfg.span_deg);
  cfg.overlap_deg = get_field<Scalar>(j, "overlap_deg", cfg.overlap_deg);
  cfg.eps = get_field<Scalar>(j, "eps", cfg.eps);
  if (!(cfg.eps > 0)) bad_key("eps", "must be positive");
  cfg.max_iters = get_field<int>(j, "max_iters", cfg.max_iters);
  if (cfg.max_iters < 1) bad_key("max_iters", "must be at least 1");
  cfg.lambda = get_field<Scalar>(j, "lambda", cfg.lambda);
  if (cfg.lambda < 0) bad_key("lambda", "must be nonnegative");
  cfg.admm_rho = get_field<Scalar>(j, "admm_rho", cfg.admm_rho);
  cfg.admm_beta = get_field<Scalar>(j, "admm_beta", cfg.admm_beta);
  cfg.admm_iters = get_field<int>(j, "admm_iters", cfg.admm_iters);
  cfg.workers = get_field<int>(j, "workers", cfg.workers);
  if (cfg.workers < 0) bad_key("workers", "must be nonnegative");
  cfg.seed = get_field<std::uint64_t>(j, "seed", cfg.seed);
  cfg.out = get_field<std::string>(j, "out", cfg.out);
  cfg.cov_probes = get_field<int>(j, "cov_probes", cfg.cov_probes);

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    cfg.grid.nx = get_field<int>(g, "nx", cfg.grid.nx);
    cfg.grid.ny = get_field<int>(g, "ny", cfg.grid.ny);
    cfg.grid.extent = get_field<Scalar>(g, "extent", cfg.grid.extent);
    if (cfg.grid.nx < 2 || cfg.grid.ny < 2) bad_key("grid.nx", "grid must be at least 2x2");
    if (!(cfg.grid.extent > 0)) bad_key("grid.extent", "must be positive");
  }
  if (j.contains("scene")) {
    const json& s = j.at("scene");
    cfg.alpha_bg = get_field<Scalar>(s, "alpha_bg", cfg.alpha_bg);
    if (cfg.alpha_bg < 0) bad_key("scene.alpha_bg", "must be nonnegative");
    if (s.contains("scatterers")) {
      if (!s.at("scatterers").is_array()) bad_key("scene.scatterers", "must be an array");
      for (const json& e : s.at("scatterers")) {
        Scatterer sc;
        sc.ix = get_field<int>(e, "ix", 0);
        sc.iy = get_field<int>(e, "iy", 0);
        sc.amplitude = Complex(get_field<Scalar>(e, "re", 1.0), get_field<Scalar>(e, "im", 0.0));
        if (e.contains("theta_a_deg") || e.contains("theta_b_deg")) {
          sc.full_view = false;
          sc.theta_a = get_field<Scalar>(e, "theta_a_deg", 0.0) * std::numbers::pi / 180;
          sc.theta_b = get_field<Scalar>(e, "theta_b_deg", 0.0) * std::numbers::pi / 180;
        }
        cfg.scatterers.push_back(sc);
      }
    }
  }
  if (j.contains("acquisition")) {
    const json& a = j.at("acquisition");
    cfg.pulses = get_field<Index>(a, "pulses", cfg.pulses);
    cfg.samples = get_field<Index>(a, "samples", cfg.samples);
    if (cfg.pulses < 1 || cfg.samples < 1)
      bad_key("acquisition.pulses", "pulses and samples must be positive");
    cfg.beta_true = get_field<Scalar>(a, "beta_true", cfg.beta_true);
    if (!(cfg.beta_true > 0)) bad_key("acquisition.beta_true", "must be positive");
    cfg.k_min_frac = get_field<Scalar>(a, "k_min_frac", cfg.k_min_frac);
    cfg.k_max_frac = get_field<Scalar>(a, "k_max_frac", cfg.k_max_frac);
    if (!(cfg.k_min_frac > 0 && cfg.k_min_frac < cfg.k_max_frac && cfg.k_max_frac < 1))
      bad_key("acquisition.k_min_frac", "need 0 < k_min_frac < k_max_frac < 1");
  }
  if (j.contains("nufft")) {
    const json& n = j.at("nufft");
    cfg.nufft.oversampling = get_field<Scalar>(n, "oversampling", cfg.nufft.oversampling);
    cfg.nufft.width = get_field<int>(n, "width", cfg.nufft.width);
  }
  return cfg;
}

SceneSpec scene_spec(const RunConfig& cfg) {
  SceneSpec spec;
  spec.grid = cfg.grid;
  spec.scatterers = cfg.scatterers;
  spec.alpha_bg = cfg.alpha_bg;
  spec.seed = cfg.seed;
  return spec;
}

AcquisitionSpec acquisition_spec(const RunConfig& cfg) {
  AcquisitionSpec acq;
  acq.azimuths = Vec::LinSpaced(cfg.pulses, 0, 2 * std::numbers::pi * (cfg.pulses - 1) /
                                                  Scalar(cfg.pulses));
  const Scalar k_nyq = std::numbers::pi / cfg.grid.dx();
  acq.k = Vec::LinSpaced(cfg.samples, cfg.k_min_frac * k_nyq, cfg.k_max_frac * k_nyq);
  acq.beta_true = cfg.beta_true;
  return acq;
}

SolverConfig solver_config(const RunConfig& cfg) {
  SolverConfig sc;
  sc.eps = cfg.eps;
  sc.max_iters = cfg.max_iters;
  sc.path = regularizer_kind(cfg.regularizer) == SparsifyingOperator::Kind::Identity
                ? SolverPath::DiagonalFast
                : SolverPath::GeneralSparse;
  sc.cov_probes = cfg.cov_probes;
  return sc;
}

AdmmConfig admm_config(const RunConfig& cfg) {
  AdmmConfig ac;
  ac.lambda = cfg.lambda;
  ac.rho = cfg.admm_rho;
  ac.beta = cfg.admm_beta;
  ac.iters = cfg.admm_iters;
  return ac;
}

SparsifyingOperator::Kind regularizer_kind(const std::string& name) {
  if (name == "identity") return SparsifyingOperator::Kind::Identity;
  if (name == "tv") return SparsifyingOperator::Kind::Tv2d;
  throw ConfigError("config key 'regularizer': must be identity or tv");
}

}  // namespace sar
