#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pwfwi/helmholtz.hpp"
#include "pwfwi/model_update.hpp"
#include "pwfwi/prox.hpp"

namespace pwfwi {

// Batch stopping rule: stop when both residual norms fall below their
// thresholds, or after k_max outer iterations, whichever comes first.
struct StopThresholds {
  double eps_b = 1e-3;  // wave-equation residual |A(m)u - b|
  double eps_d = 1e-5;  // data residual |P u - d|
  int k_max = 15;
};

enum class StopReason { None, Residuals, IterationCap };

StopReason check_stop(double wave_residual, double data_residual, int iterations_done,
                      const StopThresholds& stop);

struct FrequencyBatch {
  std::vector<double> frequencies_hz;
  StopThresholds stop;
};

struct ContinuationSchedule {
  std::vector<FrequencyBatch> batches;
  int paths = 1;  // number of sweeps through the batch list
  // Completed outer iterations (across the whole run) before box bounds engage.
  int bound_activation_iteration = 0;

  void validate() const;
};

struct InversionSetup {
  ModelGrid grid;
  PmlSpec pml;
  Acquisition acq;
  DataSet data;
  ScalarField initial_model;  // squared slowness
  std::optional<ScalarField> true_model;
  RegularizerSpec reg;
  BoxBounds bounds;
  double lambda_over_gamma = 100.0;
  double gamma_scale = 1.0;    // target of gamma * |sum L^H L|_inf in normalized units
  double penalty_ratio = 0.1;  // zeta = eta = ratio * gamma * |sum L^H L|_inf
  double zeta2_ratio = 0.1;
  double quadratic_weight = 1.0;  // scale of the DMP/Tikhonov/TT quadratic term
  int inner_iterations = 1;
  double epsilon_factor = 1e-8;
  double wavelet_f0_hz = 0.0;  // Ricker peak frequency; 0 = flat unit spectrum

  void validate() const;
};

struct ConvergenceRecord {
  int path = 0;
  int batch = 0;
  int iteration_in_batch = 0;  // 1-based
  int global_iteration = 0;    // 1-based across the whole run
  double wave_residual = 0.0;
  double data_residual = 0.0;
  std::optional<double> model_error;
  double regularizer_value = 0.0;
  std::string stop_flag;  // "", "residuals", or "iteration_cap"
};

// Penalty weights resolved at the start of a batch (normalized model units).
struct BatchPenalties {
  int path = 0;
  int batch = 0;
  double t_inf = 0.0;  // |sum L^H L|_inf at the first iteration
  double gamma = 0.0;
  double zeta = 0.0;
  double eta = 0.0;
  double zeta2 = 0.0;
  double lambda = 0.0;
};

struct InversionResult {
  ScalarField model;
  ScalarField m1;
  ScalarField m2;
  std::vector<ConvergenceRecord> records;
  std::vector<BatchPenalties> penalties;
  double reference_scale = 1.0;  // model normalization constant M_ref
};

// Work state of one frequency batch.  Holds the per-(frequency, source)
// duals, the source vectors, and the penalty weights once resolved; the
// model itself lives outside so it can warm-start across batches.
struct BatchState {
  std::vector<double> frequencies;
  std::vector<std::vector<VectorXcd>> sources;      // [freq][source], grid-sized
  std::vector<std::vector<VectorXcd>> data_duals;   // receiver-sized
  std::vector<std::vector<VectorXcd>> source_duals; // grid-sized
  bool penalties_set = false;
  BatchPenalties penalties;
  int iterations_done = 0;
};

BatchState make_batch_state(const InversionSetup& setup, const FrequencyBatch& batch);

struct StepDiagnostics {
  double wave_residual = 0.0;
  double data_residual = 0.0;
};

// One outer iteration: wavefield reconstruction per (frequency, source) with
// the current duals, model update through the inner ADMM, then dual ascent
// on the data and source constraints.  m1/m2/inner are updated in place.
StepDiagnostics outer_step(const InversionSetup& setup, BatchState& batch,
                           double reference_scale, const BoxBounds& normalized_bounds,
                           bool bounds_active, ScalarField& m1, ScalarField& m2,
                           InnerState& inner);

using ProgressFn = std::function<void(const ConvergenceRecord&)>;
// Called after each batch completes with (path, batch index, current model).
using BatchEndFn = std::function<void(int, int, const ScalarField&)>;

// Full frequency-continuation driver: sweeps the batch list `paths` times,
// resetting duals and inner state at every batch boundary while carrying the
// model (and its split) forward.
InversionResult run_continuation(const InversionSetup& setup,
                                 const ContinuationSchedule& schedule,
                                 const ProgressFn& progress = {},
                                 const BatchEndFn& batch_end = {});

double relative_model_error(const VectorXd& m, const VectorXd& reference);

}  // namespace pwfwi
