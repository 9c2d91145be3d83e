#include "pwfwi/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "pwfwi/errors.hpp"
#include "pwfwi/raster_io.hpp"
#include "pwfwi/run_config.hpp"

namespace pwfwi {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kVelMin = 1000.0;
constexpr double kVelMax = 6000.0;

void require_velocity(double v, const std::string& what) {
  if (!(v >= kVelMin && v <= kVelMax))
    throw ConfigError(what + ": velocity " + std::to_string(v) +
                      " outside physical range [1000, 6000] m/s");
}

// Properties vary along the depth axis: z in 2D, x for 1D profiles.
int depth_count(const ModelGrid& grid) { return grid.is_1d() ? grid.nx : grid.nz; }

ScalarField from_depth_profile(const ModelGrid& grid, const VectorXd& profile) {
  ScalarField out = ScalarField::zeros(grid);
  for (int ix = 0; ix < grid.nx; ++ix)
    for (int iz = 0; iz < grid.nz; ++iz)
      out.values[grid.index(ix, iz)] = profile[grid.is_1d() ? ix : iz];
  return out;
}

// Band boundaries: lengths proportional to 1 + u_i, every band >= 1 cell.
std::vector<int> band_edges(int n, int blocks, RandomStream& rng) {
  std::vector<double> weights(blocks);
  double total = 0.0;
  for (auto& w : weights) {
    w = 1.0 + rng.uniform();
    total += w;
  }
  std::vector<int> edges(blocks + 1, 0);
  double acc = 0.0;
  for (int j = 0; j < blocks; ++j) {
    acc += weights[j] / total;
    edges[j + 1] = std::max(edges[j] + 1, static_cast<int>(std::lround(acc * n)));
  }
  edges[blocks] = n;
  for (int j = blocks; j > 0; --j)
    if (edges[j] <= edges[j - 1]) edges[j - 1] = edges[j] - 1;
  if (edges[0] != 0) throw ConfigError("too many blocks for the grid size");
  return edges;
}

// Alternating low/high band levels keep consecutive bands apart; `margin` is
// the per-band headroom (fraction of the range) left for in-band variation.
double band_level(int j, double v_low, double v_high, double margin, RandomStream& rng) {
  const double range = v_high - v_low;
  if (j % 2 == 0) return v_low + range * rng.uniform(margin, 0.4);
  return v_high - range * rng.uniform(margin, 0.4);
}

VectorXd profile_piecewise_constant(int n, const SynthParams& p, RandomStream& rng) {
  const std::vector<int> edges = band_edges(n, p.blocks, rng);
  VectorXd prof(n);
  for (int j = 0; j < p.blocks; ++j) {
    const double level = band_level(j, p.v_low, p.v_high, 0.0, rng);
    for (int t = edges[j]; t < edges[j + 1]; ++t) prof[t] = level;
  }
  return prof;
}

VectorXd profile_piecewise_smooth(int n, const SynthParams& p, RandomStream& rng) {
  const std::vector<int> edges = band_edges(n, p.blocks, rng);
  const double range = p.v_high - p.v_low;
  VectorXd prof(n);
  for (int j = 0; j < p.blocks; ++j) {
    const double level = band_level(j, p.v_low, p.v_high, 0.2, rng);
    const double slope = range * rng.uniform(-0.12, 0.12);
    const double amp = range * rng.uniform(0.04, 0.08);
    const double cycles = rng.uniform(1.0, 2.0);
    const int len = edges[j + 1] - edges[j];
    for (int t = edges[j]; t < edges[j + 1]; ++t) {
      const double s = len > 1 ? static_cast<double>(t - edges[j]) / (len - 1) : 0.0;
      prof[t] = level + slope * (s - 0.5) + amp * std::sin(2.0 * kPi * cycles * s);
    }
  }
  return prof;
}

VectorXd profile_piecewise_linear(int n, const SynthParams& p, RandomStream& rng) {
  const std::vector<int> edges = band_edges(n, p.blocks, rng);
  std::vector<double> knots(p.blocks + 1);
  for (int j = 0; j <= p.blocks; ++j) knots[j] = band_level(j, p.v_low, p.v_high, 0.0, rng);
  VectorXd prof(n);
  for (int j = 0; j < p.blocks; ++j) {
    const int len = edges[j + 1] - edges[j];
    for (int t = edges[j]; t < edges[j + 1]; ++t) {
      const double s = static_cast<double>(t - edges[j]) / len;
      prof[t] = knots[j] + s * (knots[j + 1] - knots[j]);
    }
  }
  return prof;
}

ScalarField gradient_inclusion(const ModelGrid& grid, const SynthParams& p) {
  const int nd = depth_count(grid);
  VectorXd prof(nd);
  for (int t = 0; t < nd; ++t) {
    const double s = nd > 1 ? static_cast<double>(t) / (nd - 1) : 0.0;
    prof[t] = p.v_top + s * (p.v_bottom - p.v_top);
  }
  ScalarField vel = from_depth_profile(grid, prof);

  const auto extent = [&](int n) {
    return std::max(1, static_cast<int>(std::lround(p.inclusion_fraction * n)));
  };
  // Center the inclusion laterally, at 35% along the depth axis.
  const int cx = grid.is_1d() ? static_cast<int>(std::lround(0.35 * (grid.nx - 1)))
                              : (grid.nx - 1) / 2;
  const int cz = grid.is_1d() ? 0 : static_cast<int>(std::lround(0.35 * (grid.nz - 1)));
  const int hx = extent(grid.nx) / 2;
  const int hz = grid.is_1d() ? 0 : extent(grid.nz) / 2;
  for (int ix = std::max(0, cx - hx); ix <= std::min(grid.nx - 1, cx + hx); ++ix)
    for (int iz = std::max(0, cz - hz); iz <= std::min(grid.nz - 1, cz + hz); ++iz)
      vel.values[grid.index(ix, iz)] = p.v_inclusion;
  return vel;
}

ScalarField velocity_to_model(const ScalarField& vel) {
  ScalarField m = vel;
  m.values = vel.values.array().square().inverse().matrix();
  return m;
}

}  // namespace

SynthKind parse_synth_kind(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "piecewise-constant") return SynthKind::PiecewiseConstant;
  if (s == "piecewise-smooth") return SynthKind::PiecewiseSmooth;
  if (s == "piecewise-linear") return SynthKind::PiecewiseLinear;
  if (s == "gradient-inclusion" || s == "inclusion" ||
      s == "gradient-background-with-inclusion")
    return SynthKind::GradientInclusion;
  throw ConfigError("unknown synthetic model kind: '" + name + "'");
}

std::string to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::PiecewiseConstant: return "piecewise-constant";
    case SynthKind::PiecewiseSmooth: return "piecewise-smooth";
    case SynthKind::PiecewiseLinear: return "piecewise-linear";
    case SynthKind::GradientInclusion: return "gradient-inclusion";
  }
  return "?";
}

void SynthParams::validate() const {
  if (blocks < 1) throw ConfigError("synthetic model needs at least one block");
  require_velocity(v_low, "v_low");
  require_velocity(v_high, "v_high");
  if (!(v_high > v_low)) throw ConfigError("need v_low < v_high");
  require_velocity(v_top, "v_top");
  require_velocity(v_bottom, "v_bottom");
  require_velocity(v_inclusion, "v_inclusion");
  if (!(inclusion_fraction > 0.0 && inclusion_fraction < 1.0))
    throw ConfigError("inclusion_fraction must be in (0, 1)");
}

ScalarField synth_velocity(SynthKind kind, const SynthParams& params, const ModelGrid& grid,
                           std::uint64_t seed) {
  params.validate();
  RandomStream rng(seed);
  const int nd = depth_count(grid);
  switch (kind) {
    case SynthKind::PiecewiseConstant:
      return from_depth_profile(grid, profile_piecewise_constant(nd, params, rng));
    case SynthKind::PiecewiseSmooth:
      return from_depth_profile(grid, profile_piecewise_smooth(nd, params, rng));
    case SynthKind::PiecewiseLinear:
      return from_depth_profile(grid, profile_piecewise_linear(nd, params, rng));
    case SynthKind::GradientInclusion: return gradient_inclusion(grid, params);
  }
  throw ConfigError("unknown synthetic model kind");
}

ScalarField synth_model(SynthKind kind, const SynthParams& params, const ModelGrid& grid,
                        std::uint64_t seed) {
  return velocity_to_model(synth_velocity(kind, params, grid, seed));
}

ScalarField model_from_reference(const std::string& reference, const ModelGrid& grid,
                                 std::uint64_t seed, const ScalarField* true_model) {
  const std::vector<std::string> parts = split_list(reference, ':');
  const std::string& head = parts[0];
  const auto arg = [&](size_t i, double fallback) {
    if (parts.size() <= i || parts[i].empty()) return fallback;
    try {
      size_t pos = 0;
      const double v = std::stod(parts[i], &pos);
      if (pos != parts[i].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("model reference '" + reference + "': bad number '" + parts[i] + "'");
    }
  };
  const auto expect_args = [&](size_t max_args) {
    if (parts.size() > max_args + 1)
      throw ConfigError("model reference '" + reference + "': too many parameters");
  };

  if (head == "homogeneous") {
    expect_args(1);
    if (parts.size() < 2) throw ConfigError("homogeneous model needs a velocity");
    const double v = arg(1, 0.0);
    require_velocity(v, "homogeneous velocity");
    return ScalarField::constant(grid, 1.0 / (v * v));
  }
  if (head == "gradient") {
    expect_args(2);
    if (parts.size() < 3) throw ConfigError("gradient model needs two velocities");
    const double v0 = arg(1, 0.0), v1 = arg(2, 0.0);
    require_velocity(v0, "gradient v0");
    require_velocity(v1, "gradient v1");
    const int nd = depth_count(grid);
    VectorXd prof(nd);
    for (int t = 0; t < nd; ++t) {
      const double s = nd > 1 ? static_cast<double>(t) / (nd - 1) : 0.0;
      prof[t] = v0 + s * (v1 - v0);
    }
    return velocity_to_model(from_depth_profile(grid, prof));
  }
  if (head == "mean-of-true") {
    expect_args(0);
    if (!true_model)
      throw ConfigError("model reference 'mean-of-true' needs grid.true_model");
    const double v_mean = true_model->values.array().rsqrt().mean();
    return ScalarField::constant(grid, 1.0 / (v_mean * v_mean));
  }
  if (head == "file") {
    // The path may itself contain ':'; take everything after the head.
    const std::string path = parts.size() > 1 ? reference.substr(5) : "";
    if (path.empty()) throw ConfigError("model reference 'file:' needs a path");
    const ModelRaster raster = read_model_raster(path);
    if (raster.field.grid.nx != grid.nx || raster.field.grid.nz != grid.nz)
      throw ConfigError("model raster " + path + " is " +
                        std::to_string(raster.field.grid.nx) + "x" +
                        std::to_string(raster.field.grid.nz) + ", expected " +
                        std::to_string(grid.nx) + "x" + std::to_string(grid.nz));
    const double dh = std::abs(raster.field.grid.spacing - grid.spacing);
    if (dh > 1e-9 * grid.spacing)
      throw ConfigError("model raster " + path + " spacing mismatch");
    ScalarField m = to_squared_slowness(raster);
    m.grid = grid;
    return m;
  }

  SynthParams p;
  const SynthKind kind = parse_synth_kind(head);
  if (kind == SynthKind::GradientInclusion) {
    expect_args(4);
    p.v_top = arg(1, p.v_top);
    p.v_bottom = arg(2, p.v_bottom);
    p.v_inclusion = arg(3, p.v_inclusion);
    p.inclusion_fraction = arg(4, p.inclusion_fraction);
  } else {
    expect_args(3);
    const double blocks = arg(1, static_cast<double>(p.blocks));
    if (blocks != std::floor(blocks) || blocks < 1)
      throw ConfigError("model reference '" + reference + "': block count must be a positive integer");
    p.blocks = static_cast<int>(blocks);
    p.v_low = arg(2, p.v_low);
    p.v_high = arg(3, p.v_high);
  }
  return synth_model(kind, p, grid, seed);
}

DataSet simulate_data(const ScalarField& m_true, const PmlSpec& pml, const Acquisition& acq,
                      const std::vector<double>& frequencies_hz, double wavelet_f0_hz) {
  if (frequencies_hz.empty()) throw ConfigError("no frequencies to simulate");
  acq.validate(m_true.grid);
  if (!(wavelet_f0_hz >= 0.0))
    throw ConfigError("wavelet_f0_hz must be >= 0 (0 selects a flat unit spectrum)");

  const double v_min = m_true.values.array().rsqrt().minCoeff();
  DataSet data;
  data.num_sources = acq.num_sources();
  data.num_receivers = acq.num_receivers();
  std::vector<double> freqs = frequencies_hz;
  std::sort(freqs.begin(), freqs.end());
  freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());

  for (double f : freqs) {
    if (!(f > 0.0)) throw ConfigError("frequencies must be positive");
    const double ppw = v_min / (f * m_true.grid.spacing);
    if (ppw < 10.0)
      std::fprintf(stderr,
                   "warning: %.6g Hz has %.1f grid points per minimum wavelength "
                   "(>= 10 recommended)\n",
                   f, ppw);
    const double amp = wavelet_f0_hz > 0.0 ? ricker_spectrum(f, wavelet_f0_hz) : 1.0;
    const HelmholtzOperator op = HelmholtzOperator::assemble(m_true, f, pml);
    const ForwardSolver solver(op);
    std::vector<VectorXcd> rows;
    rows.reserve(acq.num_sources());
    for (int s = 0; s < acq.num_sources(); ++s) {
      const VectorXcd b =
          point_source(m_true.grid, acq.source_cells[s], amp * acq.amplitude(s));
      const Wavefield u{m_true.grid, solver.solve(b), f, s};
      rows.push_back(sample(u, acq));
    }
    data.frequencies.push_back(f);
    data.values.push_back(std::move(rows));
  }
  return data;
}

}  // namespace pwfwi
