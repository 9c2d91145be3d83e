#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pwfwi/grid.hpp"
#include "pwfwi/helmholtz.hpp"

namespace pwfwi {

enum class SynthKind { PiecewiseConstant, PiecewiseSmooth, PiecewiseLinear, GradientInclusion };

SynthKind parse_synth_kind(const std::string& name);
std::string to_string(SynthKind kind);

// Parameters of the synthetic velocity generators.  All velocities in m/s and
// restricted to the physical range [1000, 6000].
struct SynthParams {
  int blocks = 8;             // band count of the piecewise kinds
  double v_low = 1500.0;      // band velocity range (piecewise kinds)
  double v_high = 3000.0;
  double v_top = 1500.0;      // gradient endpoints (inclusion kind)
  double v_bottom = 3000.0;
  double v_inclusion = 4000.0;
  double inclusion_fraction = 0.25;  // inclusion extent as a fraction of each axis

  void validate() const;
};

// Deterministic uniform stream: the standard mt19937_64 sequence mapped to
// [0, 1) by (x >> 11) * 2^-53.  The engine is pinned by the standard and the
// mapping is ours, so the stream is identical on every platform (the standard
// *distributions* are not, which is why they are avoided here).
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::mt19937_64 engine_;
};

// Synthetic velocity model: profiles vary along the depth axis (z in 2D, x in
// 1D) and are constant along the other axis.  Same seed, same grid -> same
// field, bit for bit.
ScalarField synth_velocity(SynthKind kind, const SynthParams& params,
                           const ModelGrid& grid, std::uint64_t seed);

// Same model as squared slowness (the inverted quantity).
ScalarField synth_model(SynthKind kind, const SynthParams& params, const ModelGrid& grid,
                        std::uint64_t seed);

// Model reference strings used by the config layer:
//   homogeneous:<v>                      constant velocity
//   gradient:<v0>:<v1>                   linear in depth from v0 to v1
//   mean-of-true                         homogeneous at the true model's mean velocity
//   file:<path>                          model raster (either quantity)
//   piecewise-constant[:blocks[:v_low[:v_high]]]
//   piecewise-smooth[:blocks[:v_low[:v_high]]]
//   piecewise-linear[:blocks[:v_low[:v_high]]]
//   inclusion[:v_top[:v_bottom[:v_inc[:fraction]]]]
// Returns squared slowness on the grid.
ScalarField model_from_reference(const std::string& reference, const ModelGrid& grid,
                                 std::uint64_t seed, const ScalarField* true_model);

// Noiseless synthetic data d = P A(m_true)^-1 b for every (frequency, source),
// the source scaled by the Ricker spectrum at wavelet_f0_hz (flat when 0).
// Warns on stderr below 10 grid points per minimum wavelength.
DataSet simulate_data(const ScalarField& m_true, const PmlSpec& pml, const Acquisition& acq,
                      const std::vector<double>& frequencies_hz, double wavelet_f0_hz);

}  // namespace pwfwi
