#pragma once

#include <cstdint>
#include <string>

#include "pwfwi/grid.hpp"
#include "pwfwi/helmholtz.hpp"

namespace pwfwi {

// Binary model raster: 32-byte little-endian header
//   bytes 0-7   magic "PWFWI1\0\0"
//   u32         nx
//   u32         nz
//   f64         spacing (m)
//   u32         quantity tag (1 = squared slowness s^2/m^2, 2 = velocity m/s)
//   u32         reserved (0)
// followed by nx*nz float64 values, z-fastest.  write -> read -> write is
// byte-identical.
enum class RasterQuantity : std::uint32_t { SquaredSlowness = 1, Velocity = 2 };

struct ModelRaster {
  ScalarField field;
  RasterQuantity quantity = RasterQuantity::SquaredSlowness;
};

void write_model_raster(const std::string& path, const ScalarField& field,
                        RasterQuantity quantity);
ModelRaster read_model_raster(const std::string& path);

// Quantity conversions (both require strictly positive values).
ScalarField to_squared_slowness(const ModelRaster& raster);
ScalarField to_velocity(const ModelRaster& raster);

// Observed-data CSV: header row "frequency_hz,source_index,receiver_index,real,imag",
// rows sorted by (frequency, source, receiver), doubles printed in their
// shortest round-trippable form so the round trip is byte-identical.
void write_data_csv(const std::string& path, const DataSet& data);
DataSet read_data_csv(const std::string& path);

// Shortest round-trippable decimal form (%g at 15..17 significant digits,
// whichever parses back exactly), shared by every CSV writer.
std::string format_double(double v);

}  // namespace pwfwi
