#include "pwfwi/raster_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace pwfwi {

namespace {

constexpr char kMagic[8] = {'P', 'W', 'F', 'W', 'I', '1', '\0', '\0'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

double get_f64(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_model_raster(const std::string& path, const ScalarField& field,
                        RasterQuantity quantity) {
  if (!field.values.allFinite())
    throw ConfigError("refusing to write non-finite raster to " + path);
  std::string buf;
  buf.reserve(32 + 8 * static_cast<size_t>(field.values.size()));
  buf.append(kMagic, 8);
  put_u32(buf, static_cast<std::uint32_t>(field.grid.nx));
  put_u32(buf, static_cast<std::uint32_t>(field.grid.nz));
  put_f64(buf, field.grid.spacing);
  put_u32(buf, static_cast<std::uint32_t>(quantity));
  put_u32(buf, 0);
  for (Eigen::Index i = 0; i < field.values.size(); ++i) put_f64(buf, field.values[i]);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw ConfigError("write failed for " + path);
}

ModelRaster read_model_raster(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open raster file " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 32) throw ConfigError(path + ": truncated raster header");
  if (std::memcmp(buf.data(), kMagic, 8) != 0)
    throw ConfigError(path + ": bad raster magic");
  const std::uint32_t nx = get_u32(buf.data() + 8);
  const std::uint32_t nz = get_u32(buf.data() + 12);
  const double spacing = get_f64(buf.data() + 16);
  const std::uint32_t tag = get_u32(buf.data() + 24);
  if (nx < 1 || nz < 1) throw ConfigError(path + ": invalid raster dimensions");
  if (!(spacing > 0.0)) throw ConfigError(path + ": invalid raster spacing");
  if (tag != 1 && tag != 2) throw ConfigError(path + ": unknown raster quantity tag");
  const size_t n = static_cast<size_t>(nx) * nz;
  if (buf.size() != 32 + 8 * n)
    throw ConfigError(path + ": payload length does not match header dimensions");

  ModelRaster r;
  r.quantity = static_cast<RasterQuantity>(tag);
  VectorXd values(static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < n; ++i) values[static_cast<Eigen::Index>(i)] = get_f64(buf.data() + 32 + 8 * i);
  if (!values.allFinite()) throw ConfigError(path + ": non-finite raster values");
  r.field = ScalarField(ModelGrid(static_cast<int>(nx), static_cast<int>(nz), spacing),
                        std::move(values));
  return r;
}

ScalarField to_squared_slowness(const ModelRaster& raster) {
  if ((raster.field.values.array() <= 0.0).any())
    throw ConfigError("raster values must be positive for quantity conversion");
  if (raster.quantity == RasterQuantity::SquaredSlowness) return raster.field;
  ScalarField out = raster.field;
  out.values = raster.field.values.array().square().inverse();
  return out;
}

ScalarField to_velocity(const ModelRaster& raster) {
  if ((raster.field.values.array() <= 0.0).any())
    throw ConfigError("raster values must be positive for quantity conversion");
  if (raster.quantity == RasterQuantity::Velocity) return raster.field;
  ScalarField out = raster.field;
  out.values = raster.field.values.array().sqrt().inverse();
  return out;
}

void write_data_csv(const std::string& path, const DataSet& data) {
  std::ostringstream out;
  out << "frequency_hz,source_index,receiver_index,real,imag\n";
  std::vector<size_t> order(data.frequencies.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return data.frequencies[a] < data.frequencies[b];
  });
  for (size_t oi : order) {
    for (int s = 0; s < data.num_sources; ++s) {
      const VectorXcd& row = data.values[oi][static_cast<size_t>(s)];
      if (row.size() != data.num_receivers)
        throw ConfigError("data set receiver count mismatch");
      for (int r = 0; r < data.num_receivers; ++r) {
        if (!std::isfinite(row[r].real()) || !std::isfinite(row[r].imag()))
          throw ConfigError("refusing to write non-finite data value");
        out << format_double(data.frequencies[oi]) << ',' << s << ',' << r << ','
            << format_double(row[r].real()) << ',' << format_double(row[r].imag()) << '\n';
      }
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  const std::string s = out.str();
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!f) throw ConfigError("write failed for " + path);
}

DataSet read_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty data file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "frequency_hz,source_index,receiver_index,real,imag")
    throw ConfigError(path + ": unexpected data header row");

  std::map<double, std::map<int, std::map<int, Complex>>> table;
  int max_source = -1, max_receiver = -1;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string, 5> cols;
    size_t start = 0;
    for (int c = 0; c < 5; ++c) {
      const size_t end = c < 4 ? line.find(',', start) : line.size();
      if (c < 4 && end == std::string::npos)
        throw ConfigError(path + ": malformed row at line " + std::to_string(line_no));
      cols[c] = line.substr(start, end - start);
      start = end + 1;
    }
    try {
      const double f = std::stod(cols[0]);
      const int s = std::stoi(cols[1]);
      const int r = std::stoi(cols[2]);
      const double re = std::stod(cols[3]);
      const double im = std::stod(cols[4]);
      if (!(f > 0.0) || s < 0 || r < 0 || !std::isfinite(re) || !std::isfinite(im))
        throw ConfigError(path + ": invalid values at line " + std::to_string(line_no));
      if (table[f][s].count(r))
        throw ConfigError(path + ": duplicate row at line " + std::to_string(line_no));
      table[f][s][r] = Complex(re, im);
      max_source = std::max(max_source, s);
      max_receiver = std::max(max_receiver, r);
    } catch (const std::invalid_argument&) {
      throw ConfigError(path + ": unparsable row at line " + std::to_string(line_no));
    } catch (const std::out_of_range&) {
      throw ConfigError(path + ": out-of-range value at line " + std::to_string(line_no));
    }
  }
  if (table.empty()) throw ConfigError(path + ": data file has no rows");

  DataSet d;
  d.num_sources = max_source + 1;
  d.num_receivers = max_receiver + 1;
  for (const auto& [f, per_source] : table) {
    d.frequencies.push_back(f);
    std::vector<VectorXcd> rows(static_cast<size_t>(d.num_sources));
    for (int s = 0; s < d.num_sources; ++s) {
      auto it = per_source.find(s);
      if (it == per_source.end() || static_cast<int>(it->second.size()) != d.num_receivers)
        throw ConfigError(path + ": incomplete (frequency, source) block for frequency " +
                          format_double(f));
      VectorXcd row(d.num_receivers);
      for (int r = 0; r < d.num_receivers; ++r) {
        auto rit = it->second.find(r);
        if (rit == it->second.end())
          throw ConfigError(path + ": missing receiver " + std::to_string(r) +
                            " for frequency " + format_double(f));
        row[r] = rit->second;
      }
      rows[static_cast<size_t>(s)] = std::move(row);
    }
    d.values.push_back(std::move(rows));
  }
  return d;
}

}  // namespace pwfwi
