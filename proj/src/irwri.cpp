#include "pwfwi/irwri.hpp"

#include <cmath>

namespace pwfwi {

StopReason check_stop(double wave_residual, double data_residual, int iterations_done,
                      const StopThresholds& stop) {
  if (wave_residual <= stop.eps_b && data_residual <= stop.eps_d)
    return StopReason::Residuals;
  if (iterations_done >= stop.k_max) return StopReason::IterationCap;
  return StopReason::None;
}

void ContinuationSchedule::validate() const {
  if (batches.empty()) throw ConfigError("schedule needs at least one frequency batch");
  if (paths < 1) throw ConfigError("schedule paths must be >= 1");
  if (bound_activation_iteration < 0)
    throw ConfigError("bound activation iteration must be >= 0");
  for (const auto& b : batches) {
    if (b.frequencies_hz.empty()) throw ConfigError("frequency batch is empty");
    for (double f : b.frequencies_hz)
      if (!(f > 0.0)) throw ConfigError("frequencies must be positive");
    if (b.stop.k_max < 1) throw ConfigError("k_max must be >= 1");
    if (!(b.stop.eps_b >= 0.0 && b.stop.eps_d >= 0.0))
      throw ConfigError("stopping thresholds must be nonnegative");
  }
}

void InversionSetup::validate() const {
  if (initial_model.grid != grid) throw ConfigError("initial model grid mismatch");
  if ((initial_model.values.array() <= 0.0).any())
    throw ConfigError("initial squared slowness must be positive");
  if (true_model && true_model->grid != grid) throw ConfigError("true model grid mismatch");
  acq.validate(grid);
  reg.validate();
  bounds.validate(grid.cell_count());
  if (!(lambda_over_gamma >= 0.0)) throw ConfigError("lambda_over_gamma must be >= 0");
  if (!(gamma_scale > 0.0)) throw ConfigError("gamma_scale must be positive");
  if (!(penalty_ratio > 0.0)) throw ConfigError("penalty_ratio must be positive");
  if (!(zeta2_ratio > 0.0)) throw ConfigError("zeta2_ratio must be positive");
  if (!(quadratic_weight >= 0.0)) throw ConfigError("quadratic_weight must be nonnegative");
  if (inner_iterations < 1) throw ConfigError("inner_iterations must be >= 1");
  if (!(wavelet_f0_hz >= 0.0))
    throw ConfigError("wavelet_f0_hz must be >= 0 (0 selects a flat unit spectrum)");
  if (data.num_receivers != acq.num_receivers())
    throw ConfigError("data receiver count does not match acquisition");
  if (data.num_sources != acq.num_sources())
    throw ConfigError("data source count does not match acquisition");
}

BatchState make_batch_state(const InversionSetup& setup, const FrequencyBatch& batch) {
  BatchState st;
  st.frequencies = batch.frequencies_hz;
  const int ns = setup.acq.num_sources();
  const int nr = setup.acq.num_receivers();
  const int n = setup.grid.cell_count();
  for (double f : st.frequencies) {
    if (!setup.data.has_frequency(f))
      throw ConfigError("no observed data for frequency " + std::to_string(f) + " Hz");
    std::vector<VectorXcd> b(ns);
    const double amp =
        setup.wavelet_f0_hz > 0.0 ? ricker_spectrum(f, setup.wavelet_f0_hz) : 1.0;
    for (int s = 0; s < ns; ++s)
      b[s] = point_source(setup.grid, setup.acq.source_cells[s],
                          amp * setup.acq.amplitude(s));
    st.sources.push_back(std::move(b));
    st.data_duals.emplace_back(ns, VectorXcd::Zero(nr));
    st.source_duals.emplace_back(ns, VectorXcd::Zero(n));
  }
  return st;
}

StepDiagnostics outer_step(const InversionSetup& setup, BatchState& batch,
                           double reference_scale, const BoxBounds& normalized_bounds,
                           bool bounds_active, ScalarField& m1, ScalarField& m2,
                           InnerState& inner) {
  const ModelGrid& grid = setup.grid;
  const int n = grid.cell_count();
  const int ns = setup.acq.num_sources();
  const size_t nf = batch.frequencies.size();

  ScalarField m(grid, m1.values + m2.values);

  // Wavefield reconstruction (per frequency factorization, shared by sources).
  std::vector<std::vector<Wavefield>> fields(nf);
  std::vector<SourceTerm> terms;
  terms.reserve(nf * static_cast<size_t>(ns));
  for (size_t fi = 0; fi < nf; ++fi) {
    const double f = batch.frequencies[fi];
    const HelmholtzOperator op = HelmholtzOperator::assemble(m, f, setup.pml);
    const WavefieldReconstructor rec(op, setup.acq, setup.lambda_over_gamma, 1.0);
    fields[fi].reserve(ns);
    for (int s = 0; s < ns; ++s) {
      const VectorXcd d_aug = setup.data.at(f, s) + batch.data_duals[fi][s];
      const VectorXcd b_aug = batch.sources[fi][s] + batch.source_duals[fi][s];
      Wavefield u = rec.solve(d_aug, b_aug);
      u.source_index = s;
      SourceTerm t;
      t.L_diag = reference_scale * build_L(u, op.omega());
      t.y = b_aug - op.laplacian() * u.values;
      terms.push_back(std::move(t));
      fields[fi].push_back(std::move(u));
    }
  }

  if (!batch.penalties_set) {
    VectorXd t_diag = VectorXd::Zero(n);
    for (const auto& t : terms) t_diag += t.L_diag.cwiseAbs2();
    const double t_inf = t_diag.maxCoeff();
    if (!(t_inf > 0.0)) throw NumericalError("virtual source vanished everywhere");
    batch.penalties.t_inf = t_inf;
    batch.penalties.gamma = setup.gamma_scale / t_inf;
    batch.penalties.zeta = setup.penalty_ratio * setup.gamma_scale;
    batch.penalties.eta = setup.penalty_ratio * setup.gamma_scale;
    batch.penalties.zeta2 = setup.zeta2_ratio * setup.gamma_scale;
    batch.penalties.lambda = setup.lambda_over_gamma * batch.penalties.gamma;
    batch.penalties_set = true;
  }

  ModelUpdateParams params;
  params.gamma = batch.penalties.gamma;
  params.zeta = batch.penalties.zeta;
  params.eta = batch.penalties.eta;
  params.zeta2 = batch.penalties.zeta2;
  params.quadratic_weight = setup.quadratic_weight;
  params.inner_iterations = setup.inner_iterations;
  params.epsilon_factor = setup.epsilon_factor;
  params.bounds_active = bounds_active && !normalized_bounds.empty();

  ScalarField m1n(grid, m1.values / reference_scale);
  ScalarField m2n(grid, m2.values / reference_scale);
  const ModelUpdateResult upd = update_model(terms, m1n, m2n, setup.reg, normalized_bounds,
                                             params, inner);
  m1.values = reference_scale * upd.m1.values;
  m2.values = reference_scale * upd.m2.values;
  ScalarField m_new(grid, m1.values + m2.values);
  if ((m_new.values.array() <= 0.0).any())
    throw NumericalError("model update left the positive cone; tighten bounds or penalties");

  // Dual ascent on the data and wave-equation constraints (Eq. duals use the
  // new model and the reconstructed fields).
  StepDiagnostics diag;
  double wave_sq = 0.0, data_sq = 0.0;
  for (size_t fi = 0; fi < nf; ++fi) {
    const double f = batch.frequencies[fi];
    const HelmholtzOperator op_new = HelmholtzOperator::assemble(m_new, f, setup.pml);
    for (int s = 0; s < ns; ++s) {
      const Wavefield& u = fields[fi][s];
      const VectorXcd rd = setup.data.at(f, s) - sample(u, setup.acq);
      const VectorXcd rb = batch.sources[fi][s] - op_new.matrix() * u.values;
      batch.data_duals[fi][s] += rd;
      batch.source_duals[fi][s] += rb;
      data_sq += rd.squaredNorm();
      wave_sq += rb.squaredNorm();
    }
  }
  diag.data_residual = std::sqrt(data_sq);
  diag.wave_residual = std::sqrt(wave_sq);
  batch.iterations_done += 1;
  return diag;
}

double relative_model_error(const VectorXd& m, const VectorXd& reference) {
  const double rn = reference.norm();
  if (rn == 0.0) throw ConfigError("reference model has zero norm");
  if (m.size() != reference.size()) throw ConfigError("model size mismatch");
  return (m - reference).norm() / rn;
}

InversionResult run_continuation(const InversionSetup& setup,
                                 const ContinuationSchedule& schedule,
                                 const ProgressFn& progress,
                                 const BatchEndFn& batch_end) {
  setup.validate();
  schedule.validate();

  const ModelGrid& grid = setup.grid;
  InversionResult out;
  out.reference_scale = setup.initial_model.values.maxCoeff();

  if (setup.reg.is_split()) {
    out.m1 = ScalarField::zeros(grid);
    out.m2 = setup.initial_model;
  } else {
    out.m1 = setup.initial_model;
    out.m2 = ScalarField::zeros(grid);
  }

  BoxBounds nbounds = setup.bounds;
  if (!nbounds.empty()) {
    nbounds.lower /= out.reference_scale;
    nbounds.upper /= out.reference_scale;
  }

  int global_iteration = 0;
  for (int path = 0; path < schedule.paths; ++path) {
    for (size_t bi = 0; bi < schedule.batches.size(); ++bi) {
      const FrequencyBatch& fb = schedule.batches[bi];
      BatchState batch = make_batch_state(setup, fb);
      InnerState inner;  // duals and splits restart at every batch
      for (int k = 0; k < fb.stop.k_max; ++k) {
        const bool bounds_active =
            global_iteration >= schedule.bound_activation_iteration;
        const StepDiagnostics diag =
            outer_step(setup, batch, out.reference_scale, nbounds, bounds_active,
                       out.m1, out.m2, inner);
        ++global_iteration;

        ConvergenceRecord rec;
        rec.path = path;
        rec.batch = static_cast<int>(bi);
        rec.iteration_in_batch = k + 1;
        rec.global_iteration = global_iteration;
        rec.wave_residual = diag.wave_residual;
        rec.data_residual = diag.data_residual;
        const VectorXd m_now = out.m1.values + out.m2.values;
        if (setup.true_model)
          rec.model_error = relative_model_error(m_now, setup.true_model->values);
        if (setup.reg.is_split())
          rec.regularizer_value = eval_regularizer(setup.reg, out.m1, out.m2);
        else
          rec.regularizer_value =
              eval_regularizer(setup.reg, ScalarField(grid, m_now));

        const StopReason reason =
            check_stop(diag.wave_residual, diag.data_residual, k + 1, fb.stop);
        if (reason == StopReason::Residuals) rec.stop_flag = "residuals";
        if (reason == StopReason::IterationCap) rec.stop_flag = "iteration_cap";
        out.records.push_back(rec);
        if (progress) progress(out.records.back());
        if (reason != StopReason::None) break;
      }
      batch.penalties.path = path;
      batch.penalties.batch = static_cast<int>(bi);
      out.penalties.push_back(batch.penalties);
      if (batch_end)
        batch_end(path, static_cast<int>(bi),
                  ScalarField(grid, out.m1.values + out.m2.values));
    }
  }
  out.model = ScalarField(grid, out.m1.values + out.m2.values);
  return out;
}

}  // namespace pwfwi
