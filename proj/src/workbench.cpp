#include "pwfwi/workbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "pwfwi/errors.hpp"
#include "pwfwi/raster_io.hpp"
#include "pwfwi/synth.hpp"

namespace pwfwi {
namespace {

struct RunPieces {
  InversionSetup setup;
  ContinuationSchedule schedule;
  std::string prefix;
  bool write_batch_models = false;
};

// Everything a run needs except the observed data (loaded only by invert).
RunPieces assemble(const RunConfig& cfg, const WorkbenchOptions& opt, bool need_true_model) {
  RunPieces rp;
  InversionSetup& s = rp.setup;
  s.grid = config_grid(cfg);
  s.pml = config_pml(cfg);
  s.acq = config_acquisition(cfg, s.grid);
  rp.schedule = config_schedule(cfg);

  const std::optional<ScalarField> truth = config_true_model(cfg, s.grid, opt.seed);
  if (need_true_model && !truth)
    throw ConfigError("this command requires grid.true_model");
  s.true_model = truth;
  s.initial_model =
      config_initial_model(cfg, s.grid, truth ? &*truth : nullptr, opt.seed);
  s.bounds = config_bounds(cfg, s.grid, truth ? &*truth : nullptr);

  s.reg = config_regularizer(cfg);
  s.lambda_over_gamma = cfg.number("penalties", "lambda_over_gamma", true);
  s.gamma_scale = cfg.number("penalties", "gamma_scale", true);
  s.penalty_ratio = cfg.number("penalties", "penalty_ratio", true);
  s.zeta2_ratio = cfg.number("penalties", "zeta2_ratio", true);
  s.quadratic_weight = cfg.number("penalties", "quadratic_weight", true);
  s.inner_iterations = static_cast<int>(cfg.integer("regularizer", "inner_iterations", true));
  s.epsilon_factor = cfg.number("regularizer", "epsilon_factor", true);
  s.wavelet_f0_hz = cfg.number("acquisition", "wavelet_f0", true);

  rp.prefix = cfg.str("output", "prefix", true);
  rp.write_batch_models = cfg.boolean("output", "write_batch_models", true);
  return rp;
}

std::vector<double> schedule_frequencies(const ContinuationSchedule& sched) {
  std::set<double> seen;
  std::vector<double> out;
  for (const auto& b : sched.batches)
    for (double f : b.frequencies_hz)
      if (seen.insert(f).second) out.push_back(f);
  return out;
}

void write_log_header(std::ofstream& log) {
  log << "iter,batch,data_res,wave_res,model_err,reg_value,flag\n";
  log.flush();
}

void write_log_row(std::ofstream& log, const ConvergenceRecord& rec) {
  log << rec.global_iteration << ',' << rec.batch << ','
      << format_double(rec.data_residual) << ',' << format_double(rec.wave_residual) << ',';
  if (rec.model_error) log << format_double(*rec.model_error);
  log << ',' << format_double(rec.regularizer_value) << ',' << rec.stop_flag << '\n';
  log.flush();
}

void write_velocity_raster(const std::string& path, const ScalarField& m) {
  ScalarField vel = m;
  vel.values = m.values.array().rsqrt().matrix();
  write_model_raster(path, vel, RasterQuantity::Velocity);
}

// Inversion with explicit pieces so `compare` can vary the regularizer while
// sharing the model, data, and schedule.
double invert_pieces(const RunConfig& cfg, const WorkbenchOptions& opt, RunPieces& rp) {
  const std::string log_path = rp.prefix + "_log.csv";
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw ConfigError("cannot write log file: " + log_path);
  write_log_header(log);

  const ProgressFn progress = [&](const ConvergenceRecord& rec) {
    write_log_row(log, rec);
    if (opt.verbosity >= 2)
      std::fprintf(stderr, "iter %d batch %d data %.3e wave %.3e\n", rec.global_iteration,
                   rec.batch, rec.data_residual, rec.wave_residual);
  };
  const BatchEndFn batch_end = [&](int path, int batch, const ScalarField& m) {
    if (rp.write_batch_models)
      write_model_raster(rp.prefix + "_model_p" + std::to_string(path) + "_b" +
                             std::to_string(batch) + ".bin",
                         m, RasterQuantity::SquaredSlowness);
    if (opt.verbosity >= 1)
      std::fprintf(stderr, "path %d batch %d done\n", path, batch);
  };

  const InversionResult result = run_continuation(rp.setup, rp.schedule, progress, batch_end);

  write_model_raster(rp.prefix + "_model_slowness2.bin", result.model,
                     RasterQuantity::SquaredSlowness);
  write_velocity_raster(rp.prefix + "_model_velocity.bin", result.model);

  const std::string header_path = rp.prefix + "_header.txt";
  std::ofstream hdr(header_path, std::ios::binary);
  if (!hdr) throw ConfigError("cannot write header file: " + header_path);
  hdr << "pwfwi run header\n";
  hdr << "command = invert\n";
  hdr << "seed = " << opt.seed << "\n";
  hdr << "config:\n";
  std::istringstream echo(cfg.echo());
  for (std::string line; std::getline(echo, line);) hdr << "  " << line << "\n";
  hdr << "derived:\n";
  hdr << "  reference_scale = " << format_double(result.reference_scale) << "\n";
  for (const auto& p : result.penalties)
    hdr << "  penalties path=" << p.path << " batch=" << p.batch
        << ": t_inf = " << format_double(p.t_inf) << ", gamma = " << format_double(p.gamma)
        << ", zeta = " << format_double(p.zeta) << ", eta = " << format_double(p.eta)
        << ", zeta2 = " << format_double(p.zeta2)
        << ", lambda = " << format_double(p.lambda) << "\n";
  hdr << "final:\n";
  hdr << "  iterations = " << result.records.size() << "\n";
  double err = std::numeric_limits<double>::quiet_NaN();
  if (!result.records.empty() && result.records.back().model_error) {
    err = *result.records.back().model_error;
    hdr << "  model_error = " << format_double(err) << "\n";
  }
  if (!result.records.empty())
    hdr << "  stop_flag = " << result.records.back().stop_flag << "\n";
  return err;
}

std::string alpha_tag(double alpha) {
  std::string s = format_double(alpha);
  for (char& c : s)
    if (c == '.' || c == '+' || c == '-') c = '_';
  return s;
}

}  // namespace

void run_synth(const RunConfig& cfg, const WorkbenchOptions& opt) {
  const ModelGrid grid = config_grid(cfg);
  const std::optional<ScalarField> truth = config_true_model(cfg, grid, opt.seed);
  if (!truth) throw ConfigError("synth requires grid.true_model");
  const std::string prefix = cfg.str("output", "prefix", true);
  write_model_raster(prefix + "_true_slowness2.bin", *truth,
                     RasterQuantity::SquaredSlowness);
  write_velocity_raster(prefix + "_true_velocity.bin", *truth);
}

void run_simulate(const RunConfig& cfg, const WorkbenchOptions& opt) {
  const ModelGrid grid = config_grid(cfg);
  const PmlSpec pml = config_pml(cfg);
  const Acquisition acq = config_acquisition(cfg, grid);
  const ContinuationSchedule sched = config_schedule(cfg);
  const std::optional<ScalarField> truth = config_true_model(cfg, grid, opt.seed);
  if (!truth) throw ConfigError("simulate requires grid.true_model");
  const std::string data_path = cfg.str("acquisition", "data", true);
  const double f0 = cfg.number("acquisition", "wavelet_f0", true);
  const DataSet data = simulate_data(*truth, pml, acq, schedule_frequencies(sched), f0);
  write_data_csv(data_path, data);
}

double run_invert(const RunConfig& cfg, const WorkbenchOptions& opt) {
  RunPieces rp = assemble(cfg, opt, false);
  rp.setup.data = read_data_csv(cfg.str("acquisition", "data", true));
  rp.setup.validate();
  return invert_pieces(cfg, opt, rp);
}

void run_compare(const RunConfig& cfg, const WorkbenchOptions& opt) {
  RunPieces base = assemble(cfg, opt, true);
  base.setup.data = read_data_csv(cfg.str("acquisition", "data", true));
  const std::string prefix = base.prefix;

  const std::vector<std::string> kinds =
      split_list(cfg.str("regularizer", "compare_kinds", true), ',');
  const std::vector<double> alphas =
      parse_number_list(cfg.str("regularizer", "compare_alphas", true), ',',
                        "regularizer.compare_alphas");

  const std::string runs_path = prefix + "_runs.csv";
  std::ofstream runs(runs_path, std::ios::binary);
  if (!runs) throw ConfigError("cannot write runs file: " + runs_path);
  runs << "kind,alpha,model_error\n";
  runs.flush();

  struct Best {
    std::string kind;
    std::optional<double> alpha;
    double error = 0.0;
  };
  std::vector<Best> best_rows;

  for (const std::string& kind_name : kinds) {
    RegularizerSpec spec = base.setup.reg;
    spec.kind = parse_regularizer_kind(kind_name);
    const bool sweep = spec.is_compound();
    const std::vector<double> grid_alphas = sweep ? alphas : std::vector<double>{spec.alpha};

    Best best;
    best.kind = to_string(spec.kind);
    bool have = false;
    for (double a : grid_alphas) {
      RunPieces rp = base;
      rp.setup.reg = spec;
      rp.setup.reg.alpha = a;
      rp.setup.reg.validate();
      rp.prefix = prefix + "_" + to_string(spec.kind) + (sweep ? "_a" + alpha_tag(a) : "");
      rp.setup.validate();
      const double err = invert_pieces(cfg, opt, rp);
      if (std::isnan(err))
        throw NumericalError("compare run produced no model error (missing true model)");
      runs << to_string(spec.kind) << ',' << (sweep ? format_double(a) : std::string())
           << ',' << format_double(err) << '\n';
      runs.flush();
      if (!have || err < best.error) {
        best.error = err;
        best.alpha = sweep ? std::optional<double>(a) : std::nullopt;
        have = true;
      }
    }
    best_rows.push_back(best);
  }

  double max_err = 0.0;
  for (const auto& b : best_rows) max_err = std::max(max_err, b.error);
  const std::string ranking_path = prefix + "_ranking.csv";
  std::ofstream ranking(ranking_path, std::ios::binary);
  if (!ranking) throw ConfigError("cannot write ranking file: " + ranking_path);
  ranking << "kind,alpha,model_error,normalized_error\n";
  for (const auto& b : best_rows) {
    ranking << b.kind << ',';
    if (b.alpha) ranking << format_double(*b.alpha);
    ranking << ',' << format_double(b.error) << ','
            << format_double(max_err > 0.0 ? b.error / max_err : 0.0) << '\n';
  }
}

double model_error_files(const std::string& model_path, const std::string& true_path) {
  const ScalarField m = to_squared_slowness(read_model_raster(model_path));
  const ScalarField t = to_squared_slowness(read_model_raster(true_path));
  return relative_model_error(m.values, t.values);
}

}  // namespace pwfwi
