#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pwfwi/raster_io.hpp"
#include "pwfwi/run_config.hpp"
#include "pwfwi/synth.hpp"

using namespace pwfwi;

namespace {

// Scratch directory fresh per test case; removed afterwards.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("pwfwi_io_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// A config that satisfies every required key, as a baseline for overrides.
std::string base_config() {
  return "[grid]\n"
         "nx = 12\n"
         "spacing = 25\n"
         "[acquisition]\n"
         "sources = 3\n"
         "receivers = 5;8\n"
         "[schedule]\n"
         "batches = 3;3,4\n";
}

}  // namespace

TEST_CASE("model raster round trip is byte identical") {
  TempDir dir;
  const ModelGrid grid(5, 3, 12.5);
  oracles::Rng rng(42);
  ScalarField field(grid, rng.vec(grid.cell_count()).cwiseAbs());
  field.values.array() += 0.1;

  const std::string a = dir.file("model_a.bin");
  write_model_raster(a, field, RasterQuantity::Velocity);
  const ModelRaster back = read_model_raster(a);
  CHECK(back.quantity == RasterQuantity::Velocity);
  CHECK(back.field.grid == grid);
  CHECK((back.field.values - field.values).norm() == 0.0);

  const std::string b = dir.file("model_b.bin");
  write_model_raster(b, back.field, back.quantity);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("model raster header layout is pinned") {
  TempDir dir;
  const ModelGrid grid(4, 2, 10.0);
  ScalarField field(grid, VectorXd::LinSpaced(8, 1.0, 8.0));
  const std::string path = dir.file("header.bin");
  write_model_raster(path, field, RasterQuantity::SquaredSlowness);

  const std::string bytes = slurp(path);
  REQUIRE(bytes.size() == 32 + 8 * 8);
  CHECK(bytes.substr(0, 8) == std::string("PWFWI1\0\0", 8));

  const auto u32 = [&](size_t off) {
    return static_cast<uint32_t>(static_cast<unsigned char>(bytes[off])) |
           static_cast<uint32_t>(static_cast<unsigned char>(bytes[off + 1])) << 8 |
           static_cast<uint32_t>(static_cast<unsigned char>(bytes[off + 2])) << 16 |
           static_cast<uint32_t>(static_cast<unsigned char>(bytes[off + 3])) << 24;
  };
  CHECK(u32(8) == 4);    // nx
  CHECK(u32(12) == 2);   // nz
  double h = 0.0;        // spacing, little-endian f64 at offset 16
  std::memcpy(&h, bytes.data() + 16, 8);
  CHECK(h == 10.0);
  CHECK(u32(24) == 1);   // quantity tag: squared slowness
  CHECK(u32(28) == 0);   // reserved

  double first = 0.0;    // payload is z-fastest float64
  std::memcpy(&first, bytes.data() + 32, 8);
  CHECK(first == 1.0);
}

TEST_CASE("model raster reader rejects corrupt files") {
  TempDir dir;
  const ModelGrid grid(4, 2, 10.0);
  ScalarField field(grid, VectorXd::Ones(8));
  const std::string good = dir.file("good.bin");
  write_model_raster(good, field, RasterQuantity::Velocity);
  const std::string bytes = slurp(good);

  const std::string magic = dir.file("magic.bin");
  std::string tampered = bytes;
  tampered[0] = 'X';
  spit(magic, tampered);
  CHECK_THROWS_AS(read_model_raster(magic), ConfigError);

  const std::string truncated = dir.file("trunc.bin");
  spit(truncated, bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS_AS(read_model_raster(truncated), ConfigError);

  const std::string tag = dir.file("tag.bin");
  tampered = bytes;
  tampered[24] = 9;
  spit(tag, tampered);
  CHECK_THROWS_AS(read_model_raster(tag), ConfigError);

  CHECK_THROWS_AS(read_model_raster(dir.file("missing.bin")), ConfigError);
}

TEST_CASE("raster quantity conversions invert each other") {
  const ModelGrid grid(4, 1, 10.0);
  VectorXd v(4);
  v << 1500.0, 2000.0, 3200.0, 4500.0;

  ModelRaster vel{ScalarField(grid, v), RasterQuantity::Velocity};
  const ScalarField s2 = to_squared_slowness(vel);
  for (int i = 0; i < 4; ++i)
    CHECK(s2.values[i] == doctest::Approx(1.0 / (v[i] * v[i])).epsilon(1e-15));

  ModelRaster slow{s2, RasterQuantity::SquaredSlowness};
  const ScalarField v_back = to_velocity(slow);
  CHECK((v_back.values - v).norm() <= 1e-12 * v.norm());

  // Identity passes are exact.
  CHECK((to_velocity(vel).values - v).norm() == 0.0);
  CHECK((to_squared_slowness(slow).values - s2.values).norm() == 0.0);

  ModelRaster bad{ScalarField(grid, VectorXd::Zero(4)), RasterQuantity::Velocity};
  CHECK_THROWS_AS(to_squared_slowness(bad), ConfigError);
  CHECK_THROWS_AS(to_velocity(bad), ConfigError);
}

TEST_CASE("data CSV round trip is byte identical and sorted") {
  TempDir dir;
  const ModelGrid grid(9, 1, 20.0);
  Acquisition acq;
  acq.source_cells = {4, 6};
  acq.receiver_cells = {1, 7};
  const ScalarField m = ScalarField::constant(grid, 1.0 / (2000.0 * 2000.0));
  const DataSet data = simulate_data(m, PmlSpec{2, 1e-3}, acq, {4.0, 3.0}, 0.0);
  REQUIRE(data.frequencies == std::vector<double>{3.0, 4.0});

  const std::string a = dir.file("data_a.csv");
  write_data_csv(a, data);
  const std::string text = slurp(a);
  CHECK(text.rfind("frequency_hz,source_index,receiver_index,real,imag\n", 0) == 0);
  // one header + 2 freq * 2 src * 2 rcv rows
  CHECK(std::count(text.begin(), text.end(), '\n') == 9);

  const DataSet back = read_data_csv(a);
  CHECK(back.frequencies == data.frequencies);
  CHECK(back.num_sources == data.num_sources);
  CHECK(back.num_receivers == data.num_receivers);
  for (size_t f = 0; f < data.values.size(); ++f)
    for (int s = 0; s < data.num_sources; ++s)
      CHECK((back.values[f][s] - data.values[f][s]).norm() == 0.0);

  const std::string b = dir.file("data_b.csv");
  write_data_csv(b, back);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("data CSV reader rejects malformed content") {
  TempDir dir;
  const std::string bad_header = dir.file("h.csv");
  spit(bad_header, "freq,src,rcv,re,im\n3,0,0,1,0\n");
  CHECK_THROWS_AS(read_data_csv(bad_header), ConfigError);

  const std::string bad_field = dir.file("f.csv");
  spit(bad_field,
       "frequency_hz,source_index,receiver_index,real,imag\n3,0,zero,1,0\n");
  CHECK_THROWS_AS(read_data_csv(bad_field), ConfigError);

  const std::string short_row = dir.file("s.csv");
  spit(short_row, "frequency_hz,source_index,receiver_index,real,imag\n3,0,0,1\n");
  CHECK_THROWS_AS(read_data_csv(short_row), ConfigError);

  CHECK_THROWS_AS(read_data_csv(dir.file("absent.csv")), ConfigError);
}

TEST_CASE("format_double survives a parse round trip on awkward values") {
  for (double v : {0.1, 1.0 / 3.0, 2.5e-7, 1e300, -4.9406564584124654e-324,
                   123456789.123456789, -0.0, 3.0}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(3.0) == "3");
}

TEST_CASE("config parsing enforces the registry") {
  const RunConfig cfg = RunConfig::from_string(base_config(), "test.ini");
  CHECK(cfg.integer("grid", "nx") == 12);
  CHECK(cfg.number("grid", "spacing") == 25.0);
  CHECK(cfg.is_set("grid", "nx"));
  CHECK_FALSE(cfg.is_set("grid", "nz"));
  CHECK(cfg.integer("grid", "nz") == 1);          // default
  CHECK(cfg.number("grid", "pml_reflection_target") == 1e-3);
  CHECK(cfg.str("regularizer", "kind") == "tt");  // default
  CHECK(cfg.boolean("regularizer", "mixed_hessian") == false);

  SUBCASE("unknown key names the file and line") {
    const std::string text = base_config() + "typo_key = 3\n";
    CHECK_THROWS_WITH_AS(RunConfig::from_string(text, "test.ini"),
                         doctest::Contains("test.ini:9"), ConfigError);
  }
  SUBCASE("unknown section is rejected") {
    CHECK_THROWS_AS(RunConfig::from_string(base_config() + "[extras]\n", "t"),
                    ConfigError);
  }
  SUBCASE("duplicate key is rejected") {
    CHECK_THROWS_WITH_AS(
        RunConfig::from_string(base_config() + "[grid]\nnx = 9\n", "t"),
        doctest::Contains("duplicate"), ConfigError);
  }
  SUBCASE("key before any section is rejected") {
    CHECK_THROWS_AS(RunConfig::from_string("nx = 3\n", "t"), ConfigError);
  }
  SUBCASE("garbage line is rejected") {
    CHECK_THROWS_AS(RunConfig::from_string(base_config() + "not an assignment\n", "t"),
                    ConfigError);
  }
  SUBCASE("comments and blank lines are ignored") {
    const std::string text = "# leading comment\n; another\n\n" + base_config();
    CHECK_NOTHROW(RunConfig::from_string(text, "t"));
  }
  SUBCASE("number and boolean parsing is strict") {
    RunConfig c = RunConfig::from_string(base_config(), "t");
    c.set("grid", "spacing", "fast");
    CHECK_THROWS_AS(c.number("grid", "spacing"), ConfigError);
    c.set("regularizer", "mixed_hessian", "maybe");
    CHECK_THROWS_AS(c.boolean("regularizer", "mixed_hessian"), ConfigError);
    c.set("grid", "nx", "3.7");
    CHECK_THROWS_AS(c.integer("grid", "nx"), ConfigError);
  }
  SUBCASE("required unset key names itself") {
    const RunConfig c = RunConfig::from_string("[grid]\nnx = 12\n", "t");
    CHECK_THROWS_WITH_AS(c.number("grid", "spacing", true),
                         doctest::Contains("grid.spacing"), ConfigError);
  }
  SUBCASE("unregistered lookups are programming errors") {
    CHECK_THROWS_AS(cfg.str("grid", "no_such_key"), ConfigError);
  }
}

TEST_CASE("echo lists every registered key exactly once") {
  const RunConfig cfg = RunConfig::from_string(base_config(), "t");
  const std::string echo = cfg.echo();
  for (const ConfigKey& k : RunConfig::registry()) {
    const std::string line = k.section + "." + k.key + " = ";
    INFO("missing: ", line);
    CHECK(echo.find(line) != std::string::npos);
  }
  CHECK(echo.find("grid.nx = 12") != std::string::npos);
  CHECK(echo.find("grid.true_model = <unset>") != std::string::npos);
  // Line count equals registry size.
  CHECK(std::count(echo.begin(), echo.end(), '\n') ==
        static_cast<long>(RunConfig::registry().size()));
}

TEST_CASE("grid, pml, and regularizer builders honor their keys") {
  RunConfig cfg = RunConfig::from_string(base_config(), "t");
  const ModelGrid grid = config_grid(cfg);
  CHECK(grid.nx == 12);
  CHECK(grid.nz == 1);
  CHECK(grid.spacing == 25.0);

  const PmlSpec pml = config_pml(cfg);
  CHECK(pml.width == 10);
  CHECK(pml.reflection_target == 1e-3);

  RegularizerSpec reg = config_regularizer(cfg);
  CHECK(reg.kind == RegularizerKind::TT);
  CHECK(reg.alpha == 0.5);
  CHECK(reg.mixed_hessian == false);

  cfg.set("regularizer", "kind", "tgv");
  cfg.set("regularizer", "alpha", "0.3");
  cfg.set("regularizer", "mixed_hessian", "true");
  reg = config_regularizer(cfg);
  CHECK(reg.kind == RegularizerKind::TGV);
  CHECK(reg.alpha == 0.3);
  CHECK(reg.mixed_hessian == true);

  cfg.set("regularizer", "kind", "ridge");
  CHECK_THROWS_AS(config_regularizer(cfg), ConfigError);

  cfg.set("regularizer", "kind", "tt");
  cfg.set("regularizer", "alpha", "1.0");  // degenerate endpoint for TT
  CHECK_THROWS_AS(config_regularizer(cfg), ConfigError);
}

TEST_CASE("position DSL expands coordinates, ranges, and products") {
  const ModelGrid line(12, 1, 10.0);
  CHECK(parse_positions("5", line, "sources") == std::vector<int>{5});
  CHECK(parse_positions("0;11", line, "sources") == std::vector<int>{0, 11});
  CHECK(parse_positions("2:6:2", line, "sources") == std::vector<int>{2, 4, 6});
  CHECK(parse_positions("2:3", line, "sources") == std::vector<int>{2, 3});

  const ModelGrid area(6, 4, 10.0);  // flat index = ix * nz + iz
  CHECK(parse_positions("2,3", area, "r") == std::vector<int>{2 * 4 + 3});
  CHECK(parse_positions("1:2,0:1", area, "r") ==
        std::vector<int>{4, 5, 8, 9});  // x varies slowest
  CHECK(parse_positions("0,0;5,3", area, "r") == std::vector<int>{0, 23});

  CHECK_THROWS_AS(parse_positions("", line, "sources"), ConfigError);
  CHECK_THROWS_AS(parse_positions("12", line, "sources"), ConfigError);     // off grid
  CHECK_THROWS_AS(parse_positions("-1", line, "sources"), ConfigError);
  CHECK_THROWS_AS(parse_positions("4:2", line, "sources"), ConfigError);    // end < start
  CHECK_THROWS_AS(parse_positions("2:6:0", line, "sources"), ConfigError);  // step 0
  CHECK_THROWS_AS(parse_positions("1,1", line, "sources"), ConfigError);    // z on 1D grid
  CHECK_THROWS_AS(parse_positions("1,2,3", line, "sources"), ConfigError);
  CHECK_THROWS_AS(parse_positions("a:b", line, "sources"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_positions("oops", line, "sources"),
                       doctest::Contains("sources"), ConfigError);
}

TEST_CASE("acquisition builder wires positions and amplitude") {
  RunConfig cfg = RunConfig::from_string(base_config(), "t");
  const ModelGrid grid = config_grid(cfg);
  Acquisition acq = config_acquisition(cfg, grid);
  CHECK(acq.source_cells == std::vector<int>{3});
  CHECK(acq.receiver_cells == std::vector<int>{5, 8});
  CHECK(acq.amplitude(0) == Complex(1.0, 0.0));

  cfg.set("acquisition", "source_amplitude", "2.5");
  acq = config_acquisition(cfg, grid);
  CHECK(acq.amplitude(0) == Complex(2.5, 0.0));

  cfg.set("acquisition", "receivers", "5;5");
  CHECK_THROWS_AS(config_acquisition(cfg, grid), ConfigError);
}

TEST_CASE("schedule builder parses batches and broadcasts stopping controls") {
  RunConfig cfg = RunConfig::from_string(base_config(), "t");
  ContinuationSchedule sched = config_schedule(cfg);
  REQUIRE(sched.batches.size() == 2);
  CHECK(sched.batches[0].frequencies_hz == std::vector<double>{3.0});
  CHECK(sched.batches[1].frequencies_hz == std::vector<double>{3.0, 4.0});
  CHECK(sched.paths == 1);
  CHECK(sched.bound_activation_iteration == 0);
  // scalar defaults broadcast to every batch
  CHECK(sched.batches[0].stop.k_max == 15);
  CHECK(sched.batches[1].stop.k_max == 15);
  CHECK(sched.batches[1].stop.eps_b == 1e-3);
  CHECK(sched.batches[1].stop.eps_d == 1e-5);

  cfg.set("schedule", "max_iterations", "10;20");
  cfg.set("schedule", "eps_background", "1e-2;1e-3");
  cfg.set("schedule", "eps_data", "1e-4;1e-6");
  cfg.set("schedule", "paths", "3");
  cfg.set("schedule", "bound_activation_iteration", "20");
  sched = config_schedule(cfg);
  CHECK(sched.batches[0].stop.k_max == 10);
  CHECK(sched.batches[1].stop.k_max == 20);
  CHECK(sched.batches[0].stop.eps_b == 1e-2);
  CHECK(sched.batches[1].stop.eps_d == 1e-6);
  CHECK(sched.paths == 3);
  CHECK(sched.bound_activation_iteration == 20);

  cfg.set("schedule", "max_iterations", "10;20;30");  // three values, two batches
  CHECK_THROWS_AS(config_schedule(cfg), ConfigError);

  cfg.set("schedule", "max_iterations", "15");
  cfg.set("schedule", "batches", "3;;4");
  CHECK_THROWS_AS(config_schedule(cfg), ConfigError);
}

TEST_CASE("model reference builders resolve the reference DSL") {
  RunConfig cfg = RunConfig::from_string(base_config(), "t");
  const ModelGrid grid = config_grid(cfg);

  SUBCASE("no true model configured") {
    CHECK_FALSE(config_true_model(cfg, grid, 1).has_value());
  }

  SUBCASE("homogeneous and gradient references") {
    cfg.set("grid", "true_model", "homogeneous:2000");
    const auto truth = config_true_model(cfg, grid, 1);
    REQUIRE(truth.has_value());
    CHECK((truth->values.array() - 1.0 / (2000.0 * 2000.0)).abs().maxCoeff() <= 1e-22);

    cfg.set("grid", "initial_model", "gradient:1500:3000");
    const ScalarField init = config_initial_model(cfg, grid, &*truth, 1);
    CHECK(init.values[0] == doctest::Approx(1.0 / (1500.0 * 1500.0)).epsilon(1e-15));
    CHECK(init.values[grid.cell_count() - 1] ==
          doctest::Approx(1.0 / (3000.0 * 3000.0)).epsilon(1e-15));
  }

  SUBCASE("initial model defaults to the smoothed mean of the truth") {
    cfg.set("grid", "true_model", "gradient:1600:2400");
    const auto truth = config_true_model(cfg, grid, 1);
    const ScalarField init = config_initial_model(cfg, grid, &*truth, 1);
    // mean-of-true: homogeneous at the truth's mean velocity
    const double v_mean =
        truth->values.array().rsqrt().mean();
    CHECK((init.values.array() - 1.0 / (v_mean * v_mean)).abs().maxCoeff() <= 1e-20);
  }

  SUBCASE("mean-of-true without a true model is an error") {
    CHECK_THROWS_AS(config_initial_model(cfg, grid, nullptr, 1), ConfigError);
  }

  SUBCASE("file reference round-trips through a raster") {
    TempDir dir;
    const std::string path = dir.file("truth.bin");
    oracles::Rng rng(7);
    ScalarField stored(grid, VectorXd::Constant(grid.cell_count(), 2400.0));
    stored.values += 100.0 * rng.vec(grid.cell_count());
    write_model_raster(path, stored, RasterQuantity::Velocity);

    cfg.set("grid", "true_model", "file:" + path);
    const auto truth = config_true_model(cfg, grid, 1);
    REQUIRE(truth.has_value());
    CHECK((truth->values.array() - stored.values.array().square().inverse())
              .abs()
              .maxCoeff() <= 1e-20);
  }

  SUBCASE("file reference rejects a grid mismatch") {
    TempDir dir;
    const std::string path = dir.file("other.bin");
    const ModelGrid other(5, 1, 25.0);
    write_model_raster(path, ScalarField::constant(other, 2000.0),
                       RasterQuantity::Velocity);
    cfg.set("grid", "true_model", "file:" + path);
    CHECK_THROWS_AS(config_true_model(cfg, grid, 1), ConfigError);
  }

  SUBCASE("velocities outside the physical range are rejected") {
    cfg.set("grid", "true_model", "homogeneous:900");
    CHECK_THROWS_AS(config_true_model(cfg, grid, 1), ConfigError);
    cfg.set("grid", "true_model", "homogeneous:6500");
    CHECK_THROWS_AS(config_true_model(cfg, grid, 1), ConfigError);
    cfg.set("grid", "true_model", "gradient:1500");
    CHECK_THROWS_AS(config_true_model(cfg, grid, 1), ConfigError);
    cfg.set("grid", "true_model", "nonsense:1");
    CHECK_THROWS_AS(config_true_model(cfg, grid, 1), ConfigError);
  }
}

TEST_CASE("bounds builder supports none, benchmark, and explicit modes") {
  RunConfig cfg = RunConfig::from_string(base_config(), "t");
  const ModelGrid grid = config_grid(cfg);
  const int n = grid.cell_count();

  CHECK(config_bounds(cfg, grid, nullptr).empty());

  VectorXd v = VectorXd::LinSpaced(n, 1800.0, 2600.0);
  const ScalarField truth(grid, v.array().square().inverse());

  cfg.set("bounds", "mode", "benchmark");
  const BoxBounds bench = config_bounds(cfg, grid, &truth);
  REQUIRE_FALSE(bench.empty());
  // velocities 50%..150% of [1800, 2600] -> slowness^2 bounds
  CHECK(bench.lower[0] == doctest::Approx(1.0 / (1.5 * 2600.0 * 1.5 * 2600.0)).epsilon(1e-14));
  CHECK(bench.upper[0] == doctest::Approx(1.0 / (0.5 * 1800.0 * 0.5 * 1800.0)).epsilon(1e-14));
  CHECK(bench.lower.size() == n);

  cfg.set("bounds", "lower_fraction", "0.9");
  cfg.set("bounds", "upper_fraction", "1.1");
  const BoxBounds tight = config_bounds(cfg, grid, &truth);
  CHECK(tight.lower[0] > bench.lower[0]);
  CHECK(tight.upper[0] < bench.upper[0]);

  SUBCASE("benchmark mode needs a true model") {
    CHECK_THROWS_AS(config_bounds(cfg, grid, nullptr), ConfigError);
  }

  SUBCASE("explicit velocities map to inverted squared slowness") {
    cfg.set("bounds", "mode", "explicit");
    cfg.set("bounds", "v_min", "1500");
    cfg.set("bounds", "v_max", "3000");
    const BoxBounds box = config_bounds(cfg, grid, nullptr);
    CHECK(box.lower[0] == doctest::Approx(1.0 / (3000.0 * 3000.0)).epsilon(1e-15));
    CHECK(box.upper[0] == doctest::Approx(1.0 / (1500.0 * 1500.0)).epsilon(1e-15));

    cfg.set("bounds", "v_min", "3000");
    cfg.set("bounds", "v_max", "1500");
    CHECK_THROWS_AS(config_bounds(cfg, grid, nullptr), ConfigError);
  }

  SUBCASE("unknown mode is rejected") {
    cfg.set("bounds", "mode", "loose");
    CHECK_THROWS_AS(config_bounds(cfg, grid, &truth), ConfigError);
  }
}

TEST_CASE("list helpers are strict about empty items") {
  CHECK(split_list("a;b;c", ';') == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_list(" a ; b ", ';') == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(split_list("a;;b", ';'), ConfigError);
  CHECK_THROWS_AS(split_list("", ';'), ConfigError);

  CHECK(parse_number_list("1,2.5,3", ',', "freqs") ==
        std::vector<double>{1.0, 2.5, 3.0});
  CHECK_THROWS_WITH_AS(parse_number_list("1,x", ',', "freqs"),
                       doctest::Contains("freqs"), ConfigError);
}
