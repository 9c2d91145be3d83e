#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pwfwi/irwri.hpp"
#include "pwfwi/synth.hpp"

using namespace pwfwi;

namespace {

// Small 1D scene shared by most cases: homogeneous truth, slightly slow
// initial guess, one source, a handful of receivers, noiseless data.
struct Scene {
  ModelGrid grid{41, 1, 25.0};
  PmlSpec pml{4, 1e-3};
  Acquisition acq;
  ScalarField truth;
  ScalarField initial;

  explicit Scene(double v_true = 2000.0, double v_init = 1900.0)
      : truth(grid, VectorXd::Constant(grid.cell_count(), 1.0 / (v_true * v_true))),
        initial(grid, VectorXd::Constant(grid.cell_count(), 1.0 / (v_init * v_init))) {
    acq.source_cells = {20};
    acq.receiver_cells = {6, 12, 28, 34};
  }

  InversionSetup setup(RegularizerKind kind, const std::vector<double>& freqs,
                       double alpha = 0.5) const {
    InversionSetup s;
    s.grid = grid;
    s.pml = pml;
    s.acq = acq;
    s.data = simulate_data(truth, pml, acq, freqs, 0.0);
    s.initial_model = initial;
    s.true_model = truth;
    s.reg = RegularizerSpec{kind, alpha, false};
    s.bounds = BoxBounds::none();
    return s;
  }
};

ContinuationSchedule one_batch(const std::vector<double>& freqs, int k_max,
                               double eps_b = 0.0, double eps_d = 0.0) {
  ContinuationSchedule sched;
  sched.batches.push_back({freqs, StopThresholds{eps_b, eps_d, k_max}});
  return sched;
}

}  // namespace

TEST_CASE("check_stop combines both residual thresholds and the iteration cap") {
  const StopThresholds stop{1e-3, 1e-5, 15};
  // Both residuals under their thresholds: stop on residuals.
  CHECK(check_stop(1e-4, 1e-6, 1, stop) == StopReason::Residuals);
  // Wave-equation residual too large: keep iterating.
  CHECK(check_stop(1e-2, 1e-6, 1, stop) == StopReason::None);
  // Data residual too large: keep iterating.
  CHECK(check_stop(1e-4, 1e-4, 1, stop) == StopReason::None);
  // Iteration cap fires regardless of residuals.
  CHECK(check_stop(1.0, 1.0, 15, stop) == StopReason::IterationCap);
  CHECK(check_stop(1.0, 1.0, 14, stop) == StopReason::None);
  // Thresholds are inclusive, and residual stopping wins at the cap.
  CHECK(check_stop(1e-3, 1e-5, 1, stop) == StopReason::Residuals);
  CHECK(check_stop(1e-3, 1e-5, 15, stop) == StopReason::Residuals);
}

TEST_CASE("schedule validation rejects malformed batches") {
  ContinuationSchedule empty;
  CHECK_THROWS_AS(empty.validate(), ConfigError);

  ContinuationSchedule ok = one_batch({3.0, 4.0}, 10);
  CHECK_NOTHROW(ok.validate());

  ContinuationSchedule no_paths = ok;
  no_paths.paths = 0;
  CHECK_THROWS_AS(no_paths.validate(), ConfigError);

  ContinuationSchedule neg_act = ok;
  neg_act.bound_activation_iteration = -1;
  CHECK_THROWS_AS(neg_act.validate(), ConfigError);

  ContinuationSchedule no_freqs = ok;
  no_freqs.batches[0].frequencies_hz.clear();
  CHECK_THROWS_AS(no_freqs.validate(), ConfigError);

  ContinuationSchedule bad_freq = ok;
  bad_freq.batches[0].frequencies_hz = {0.0};
  CHECK_THROWS_AS(bad_freq.validate(), ConfigError);

  ContinuationSchedule bad_kmax = ok;
  bad_kmax.batches[0].stop.k_max = 0;
  CHECK_THROWS_AS(bad_kmax.validate(), ConfigError);

  ContinuationSchedule bad_eps = ok;
  bad_eps.batches[0].stop.eps_b = -1.0;
  CHECK_THROWS_AS(bad_eps.validate(), ConfigError);
}

TEST_CASE("batch state starts with zero duals and scaled point sources") {
  const Scene scene;
  auto setup = scene.setup(RegularizerKind::Tikhonov, {4.0, 5.0});

  SUBCASE("flat spectrum when no wavelet is configured") {
    const BatchState st = make_batch_state(setup, FrequencyBatch{{4.0, 5.0}, {}});
    REQUIRE(st.frequencies.size() == 2);
    REQUIRE(st.sources.size() == 2);
    for (size_t fi = 0; fi < 2; ++fi) {
      REQUIRE(st.sources[fi].size() == 1);
      const VectorXcd& b = st.sources[fi][0];
      CHECK(b[20] == Complex(1.0 / scene.grid.spacing, 0.0));
      CHECK(st.data_duals[fi][0].norm() == 0.0);
      CHECK(st.data_duals[fi][0].size() == 4);
      CHECK(st.source_duals[fi][0].norm() == 0.0);
      CHECK(st.source_duals[fi][0].size() == scene.grid.cell_count());
    }
  }

  SUBCASE("Ricker spectrum scales each frequency's source") {
    setup.wavelet_f0_hz = 6.0;
    const BatchState st = make_batch_state(setup, FrequencyBatch{{4.0, 5.0}, {}});
    CHECK(st.sources[0][0][20] ==
          Complex(ricker_spectrum(4.0, 6.0) / scene.grid.spacing, 0.0));
    CHECK(st.sources[1][0][20] ==
          Complex(ricker_spectrum(5.0, 6.0) / scene.grid.spacing, 0.0));
  }

  SUBCASE("missing observed data is reported with the frequency") {
    CHECK_THROWS_WITH_AS(make_batch_state(setup, FrequencyBatch{{7.25, 4.0}, {}}),
                         doctest::Contains("no observed data"), ConfigError);
  }
}

TEST_CASE("dual updates recompute exactly from the reconstructed fields") {
  // Replays Eq.-level algebra with the public pieces: after each step the
  // stored data dual must equal its previous value plus d - P u, and the
  // source dual its previous value plus b - A(m_new) u, with u reproduced by
  // an identical reconstruction call.
  const Scene scene;
  auto setup = scene.setup(RegularizerKind::TT, {4.0});
  setup.validate();

  const double reference_scale = setup.initial_model.values.maxCoeff();
  ScalarField m1 = ScalarField::zeros(scene.grid);
  ScalarField m2 = setup.initial_model;
  InnerState inner;
  BatchState batch = make_batch_state(setup, FrequencyBatch{{4.0}, {}});

  for (int step = 0; step < 2; ++step) {
    const ScalarField m_before(scene.grid, m1.values + m2.values);
    const VectorXcd d_dual_before = batch.data_duals[0][0];
    const VectorXcd b_dual_before = batch.source_duals[0][0];
    const VectorXcd d_aug = setup.data.at(4.0, 0) + d_dual_before;
    const VectorXcd b_aug = batch.sources[0][0] + b_dual_before;

    outer_step(setup, batch, reference_scale, BoxBounds::none(), false, m1, m2, inner);

    // Reproduce the wavefield the step used (same operator, same inputs).
    const auto op = HelmholtzOperator::assemble(m_before, 4.0, scene.pml);
    const Wavefield u = reconstruct_wavefield(op, scene.acq, d_aug, b_aug,
                                              setup.lambda_over_gamma, 1.0);

    const VectorXcd d_expect = d_dual_before + (setup.data.at(4.0, 0) - sample(u, scene.acq));
    CHECK((batch.data_duals[0][0] - d_expect).norm() <= 1e-13 * d_expect.norm());

    const ScalarField m_after(scene.grid, m1.values + m2.values);
    const auto op_new = HelmholtzOperator::assemble(m_after, 4.0, scene.pml);
    const VectorXcd b_expect =
        b_dual_before + (batch.sources[0][0] - op_new.matrix() * u.values);
    CHECK((batch.source_duals[0][0] - b_expect).norm() <= 1e-13 * b_expect.norm());
  }
  CHECK(batch.iterations_done == 2);
}

TEST_CASE("a constraint-satisfying pair is a fixed point of the outer step") {
  // Truth as initial model, noiseless data, and equality bounds pinning the
  // model: the reconstruction returns the true field, so the residual-driven
  // dual updates must stay at zero up to the solver tolerance.
  const Scene scene(2000.0, 2000.0);
  auto setup = scene.setup(RegularizerKind::TT, {4.0});
  const int n = scene.grid.cell_count();
  const double pin = scene.truth.values[0];
  setup.bounds = BoxBounds::uniform(n, pin, pin);
  setup.validate();

  const double reference_scale = setup.initial_model.values.maxCoeff();
  BoxBounds nbounds = setup.bounds;
  nbounds.lower /= reference_scale;
  nbounds.upper /= reference_scale;

  ScalarField m1 = ScalarField::zeros(scene.grid);
  ScalarField m2 = setup.initial_model;
  InnerState inner;
  BatchState batch = make_batch_state(setup, FrequencyBatch{{4.0}, {}});

  outer_step(setup, batch, reference_scale, nbounds, true, m1, m2, inner);

  const double d_norm = setup.data.at(4.0, 0).norm();
  const double b_norm = batch.sources[0][0].norm();
  CHECK(batch.data_duals[0][0].norm() <= 1e-9 * d_norm);
  CHECK(batch.source_duals[0][0].norm() <= 1e-9 * b_norm);
  CHECK((m1.values + m2.values - scene.truth.values).norm() <=
        1e-9 * scene.truth.values.norm());
}

TEST_CASE("one step from the truth stays near the truth") {
  const Scene scene(2000.0, 2000.0);
  auto setup = scene.setup(RegularizerKind::TT, {4.0});
  setup.validate();

  const auto result = run_continuation(setup, one_batch({4.0}, 1));
  REQUIRE(result.records.size() == 1);
  REQUIRE(result.records[0].model_error.has_value());
  // Regularizer bias only: the update must not be thrown off the optimum.
  CHECK(*result.records[0].model_error < 0.01);

  // From a perturbed start the same step must not increase the error.
  Scene off(2000.0, 2100.0);
  auto setup2 = off.setup(RegularizerKind::TT, {4.0});
  const double err_before =
      relative_model_error(setup2.initial_model.values, off.truth.values);
  const auto result2 = run_continuation(setup2, one_batch({4.0}, 1));
  CHECK(*result2.records[0].model_error <= err_before);
}

TEST_CASE("run_continuation accounting: one batch of k_max iterations") {
  const Scene scene;
  auto setup = scene.setup(RegularizerKind::Tikhonov, {4.0});
  const int k_max = 6;
  const auto result = run_continuation(setup, one_batch({4.0}, k_max));

  REQUIRE(static_cast<int>(result.records.size()) == k_max);
  for (int k = 0; k < k_max; ++k) {
    const auto& rec = result.records[k];
    CHECK(rec.path == 0);
    CHECK(rec.batch == 0);
    CHECK(rec.iteration_in_batch == k + 1);
    CHECK(rec.global_iteration == k + 1);
    CHECK(rec.wave_residual >= 0.0);
    CHECK(rec.data_residual >= 0.0);
    CHECK(rec.stop_flag == (k + 1 == k_max ? "iteration_cap" : ""));
  }
  REQUIRE(result.penalties.size() == 1);
  const auto& pen = result.penalties[0];
  CHECK(pen.gamma == doctest::Approx(setup.gamma_scale / pen.t_inf).epsilon(1e-15));
  CHECK(pen.zeta == setup.penalty_ratio * setup.gamma_scale);
  CHECK(pen.eta == setup.penalty_ratio * setup.gamma_scale);
  CHECK(pen.lambda == doctest::Approx(setup.lambda_over_gamma * pen.gamma).epsilon(1e-15));
  CHECK(result.reference_scale == setup.initial_model.values.maxCoeff());
}

TEST_CASE("tight thresholds trigger the residual stop flag") {
  const Scene scene(2000.0, 2000.0);  // start at the truth: residuals are tiny
  auto setup = scene.setup(RegularizerKind::Tikhonov, {4.0});
  const double pin = scene.truth.values[0];
  setup.bounds = BoxBounds::uniform(scene.grid.cell_count(), pin, pin);

  ContinuationSchedule sched = one_batch({4.0}, 10, 1e-3, 1e-5);
  const auto result = run_continuation(setup, sched);
  REQUIRE(result.records.size() < 10);
  CHECK(result.records.back().stop_flag == "residuals");
}

TEST_CASE("second batch warm-starts from the first batch's model") {
  const Scene scene;
  auto setup = scene.setup(RegularizerKind::TT, {3.0, 3.5, 4.0});

  // Reference: the first batch alone.
  const auto only_first = run_continuation(setup, one_batch({3.0, 3.5}, 4));

  ContinuationSchedule two;
  two.batches.push_back({{3.0, 3.5}, StopThresholds{0.0, 0.0, 4}});
  two.batches.push_back({{3.5, 4.0}, StopThresholds{0.0, 0.0, 4}});
  std::vector<VectorXd> snapshots;
  const auto both = run_continuation(setup, two, {}, [&](int, int, const ScalarField& m) {
    snapshots.push_back(m.values);
  });

  REQUIRE(snapshots.size() == 2);
  CHECK((snapshots[0] - only_first.model.values).norm() == 0.0);
  CHECK((snapshots[1] - both.model.values).norm() == 0.0);
  // The second batch actually moved the model further.
  CHECK((snapshots[1] - snapshots[0]).norm() > 0.0);
  // Records carry the batch index.
  CHECK(both.records.front().batch == 0);
  CHECK(both.records.back().batch == 1);
  CHECK(both.records.back().global_iteration == 8);
}

TEST_CASE("multiple paths sweep the batch list again from the previous model") {
  const Scene scene;
  auto setup = scene.setup(RegularizerKind::Tikhonov, {4.0});
  ContinuationSchedule sched = one_batch({4.0}, 3);
  sched.paths = 2;

  std::vector<int> path_order;
  const auto result = run_continuation(setup, sched, {}, [&](int path, int, const ScalarField&) {
    path_order.push_back(path);
  });
  CHECK(path_order == std::vector<int>{0, 1});
  REQUIRE(result.records.size() == 6);
  CHECK(result.records[3].path == 1);
  CHECK(result.records[3].iteration_in_batch == 1);
  CHECK(result.records[3].global_iteration == 4);
  REQUIRE(result.penalties.size() == 2);
  CHECK(result.penalties[1].path == 1);
}

TEST_CASE("identical configurations produce bit-identical records") {
  const Scene scene;
  auto setup = scene.setup(RegularizerKind::TT, {3.0, 4.0});
  ContinuationSchedule sched;
  sched.batches.push_back({{3.0}, StopThresholds{0.0, 0.0, 3}});
  sched.batches.push_back({{3.0, 4.0}, StopThresholds{0.0, 0.0, 3}});

  const auto a = run_continuation(setup, sched);
  const auto b = run_continuation(setup, sched);
  REQUIRE(a.records.size() == b.records.size());
  for (size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].wave_residual == b.records[i].wave_residual);
    CHECK(a.records[i].data_residual == b.records[i].data_residual);
    CHECK(a.records[i].regularizer_value == b.records[i].regularizer_value);
    REQUIRE(a.records[i].model_error.has_value());
    CHECK(*a.records[i].model_error == *b.records[i].model_error);
  }
  CHECK((a.model.values - b.model.values).norm() == 0.0);
}

TEST_CASE("bound activation schedule controls when the box engages") {
  const Scene scene(2000.0, 1800.0);
  auto setup = scene.setup(RegularizerKind::Tikhonov, {4.0});
  // A box that excludes the initial model (velocities 1900..2100).
  const double lo = 1.0 / (2100.0 * 2100.0), hi = 1.0 / (1900.0 * 1900.0);
  setup.bounds = BoxBounds::uniform(scene.grid.cell_count(), lo, hi);

  ContinuationSchedule immediate = one_batch({4.0}, 2);
  immediate.bound_activation_iteration = 0;
  const auto clamped = run_continuation(setup, immediate);
  CHECK(clamped.model.values.minCoeff() >= lo);
  CHECK(clamped.model.values.maxCoeff() <= hi);

  ContinuationSchedule never = one_batch({4.0}, 2);
  never.bound_activation_iteration = 1000;
  const auto free = run_continuation(setup, never);
  // Two unconstrained steps from a model outside the box stay outside it.
  CHECK(free.model.values.maxCoeff() > hi);
}

TEST_CASE("relative_model_error is the normalized l2 distance") {
  VectorXd ref(3);
  ref << 1.0, 2.0, 2.0;
  CHECK(relative_model_error(ref, ref) == 0.0);
  CHECK(relative_model_error(VectorXd::Zero(3), ref) == 1.0);
  VectorXd half = 0.5 * ref;
  CHECK(relative_model_error(half, ref) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(relative_model_error(VectorXd::Zero(2), ref), ConfigError);
  CHECK_THROWS_AS(relative_model_error(ref, VectorXd::Zero(3)), ConfigError);
}

TEST_CASE("setup validation catches inconsistent pieces") {
  const Scene scene;
  auto good = scene.setup(RegularizerKind::TT, {4.0});
  CHECK_NOTHROW(good.validate());

  auto bad_grid = good;
  bad_grid.initial_model = ScalarField::constant(ModelGrid(11, 1, 25.0), 1e-7);
  CHECK_THROWS_AS(bad_grid.validate(), ConfigError);

  auto neg_model = good;
  neg_model.initial_model.values[3] = 0.0;
  CHECK_THROWS_AS(neg_model.validate(), ConfigError);

  auto bad_lambda = good;
  bad_lambda.lambda_over_gamma = -1.0;
  CHECK_THROWS_AS(bad_lambda.validate(), ConfigError);

  auto bad_ratio = good;
  bad_ratio.penalty_ratio = 0.0;
  CHECK_THROWS_AS(bad_ratio.validate(), ConfigError);

  auto bad_wavelet = good;
  bad_wavelet.wavelet_f0_hz = -2.0;
  CHECK_THROWS_AS(bad_wavelet.validate(), ConfigError);

  auto bad_receivers = good;
  bad_receivers.data.num_receivers = 7;
  CHECK_THROWS_AS(bad_receivers.validate(), ConfigError);
}

TEST_CASE("frequency continuation halves the error on a blocky 1D profile") {
  // End-to-end desk-scale run: two-block truth, homogeneous start, three
  // overlapping low-to-high batches, TT regularizer, benchmark-style bounds.
  const ModelGrid grid(60, 1, 25.0);
  const int n = grid.cell_count();
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = i < n / 2 ? 1800.0 : 2200.0;
  VectorXd truth = v.array().square().inverse();
  const PmlSpec pml{4, 1e-3};

  Acquisition acq;
  acq.source_cells = {5, 30, 54};
  acq.receiver_cells = {2, 10, 18, 26, 33, 41, 49, 57};

  InversionSetup setup;
  setup.grid = grid;
  setup.pml = pml;
  setup.acq = acq;
  setup.initial_model = ScalarField::constant(grid, 1.0 / (2000.0 * 2000.0));
  setup.true_model = ScalarField(grid, truth);
  setup.data = simulate_data(*setup.true_model, pml, acq, {2.0, 3.0, 4.0}, 0.0);
  setup.reg = RegularizerSpec{RegularizerKind::TT, 0.5, false};
  setup.bounds = BoxBounds::uniform(n, 1.0 / (1.5 * 2200.0 * 1.5 * 2200.0),
                                    1.0 / (0.5 * 1800.0 * 0.5 * 1800.0));

  ContinuationSchedule sched;
  sched.batches.push_back({{2.0}, StopThresholds{0.0, 0.0, 15}});
  sched.batches.push_back({{2.0, 3.0}, StopThresholds{0.0, 0.0, 15}});
  sched.batches.push_back({{3.0, 4.0}, StopThresholds{0.0, 0.0, 15}});

  const double err0 = relative_model_error(setup.initial_model.values, truth);
  const auto result = run_continuation(setup, sched);
  const double err_final = *result.records.back().model_error;
  INFO("initial error ", err0, ", final error ", err_final);
  CHECK(err_final < 0.5 * err0);
  // Bounds hold exactly on the returned model.
  CHECK(result.model.values.minCoeff() >= setup.bounds.lower[0]);
  CHECK(result.model.values.maxCoeff() <= setup.bounds.upper[0]);
}
