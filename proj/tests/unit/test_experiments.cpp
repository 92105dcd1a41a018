#include <doctest.h>

#include <cmath>

#include <jointsel/errors.hpp>
#include <jointsel/experiments.hpp>

using namespace jointsel;

TEST_SUITE("experiments") {

TEST_CASE("theory lambda formula") {
  CHECK(theory_lambda(2.0, 4, 100, 25) ==
        doctest::Approx(2.0 * std::sqrt(4.0 * std::log(100.0) / 25.0))
            .epsilon(1e-15));
}

TEST_CASE("phase diagram specs are validated") {
  PhaseDiagramSpec spec;
  spec.n_grid = {100};
  spec.p_grid = {16};
  spec.k = 20;  // exceeds the smallest p
  CHECK_THROWS_AS(run_phase_diagram(spec), DataError);

  spec = PhaseDiagramSpec{};
  spec.n_grid = {200, 100};  // not ascending
  spec.p_grid = {16};
  spec.k = 2;
  CHECK_THROWS_AS(run_phase_diagram(spec), DataError);

  spec = PhaseDiagramSpec{};
  spec.n_grid = {};
  spec.p_grid = {16};
  CHECK_THROWS_AS(run_phase_diagram(spec), DataError);

  spec = PhaseDiagramSpec{};
  spec.n_grid = {100};
  spec.p_grid = {16};
  spec.k = 2;
  spec.lambda_policy = LambdaPolicy::kFixed;
  spec.lambda_fixed = 0.0;
  CHECK_THROWS_AS(run_phase_diagram(spec), DataError);
}

TEST_CASE("phase diagram is deterministic and shaped p-major") {
  PhaseDiagramSpec spec;
  spec.n_grid = {80, 160};
  spec.p_grid = {8, 12};
  spec.q = 2;
  spec.k = 2;
  spec.trials = 2;
  spec.base_seed = 4242;
  spec.phi_scale = 0.0;
  spec.noise_sigma = 0.5;
  PhaseDiagramResult a = run_phase_diagram(spec);
  PhaseDiagramResult b = run_phase_diagram(spec);

  REQUIRE(a.cells.size() == 4);
  CHECK(a.cells[0].p == 8);
  CHECK(a.cells[0].n == 80);
  CHECK(a.cells[1].p == 8);
  CHECK(a.cells[1].n == 160);
  CHECK(a.cells[2].p == 12);
  CHECK(a.cells[3].n == 160);

  CHECK(a.resolved_lambda_c == b.resolved_lambda_c);
  for (size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].recovery_probability == b.cells[i].recovery_probability);
    CHECK(a.cells[i].mean_support_jaccard == b.cells[i].mean_support_jaccard);
    CHECK(a.cells[i].failures == b.cells[i].failures);
  }
}

TEST_CASE("phase diagram results do not depend on the thread count") {
  PhaseDiagramSpec spec;
  spec.n_grid = {60, 120};
  spec.p_grid = {8};
  spec.k = 2;
  spec.trials = 3;
  spec.base_seed = 7;
  spec.phi_scale = 0.0;
  spec.noise_sigma = 0.5;
  spec.threads = 1;
  PhaseDiagramResult serial = run_phase_diagram(spec);
  spec.threads = 4;
  PhaseDiagramResult parallel = run_phase_diagram(spec);
  REQUIRE(serial.cells.size() == parallel.cells.size());
  for (size_t i = 0; i < serial.cells.size(); ++i) {
    CHECK(serial.cells[i].recovery_probability ==
          parallel.cells[i].recovery_probability);
    CHECK(serial.cells[i].mean_support_jaccard ==
          parallel.cells[i].mean_support_jaccard);
  }
}

TEST_CASE("oversampled cells recover, undersampled cells do not") {
  PhaseDiagramSpec spec;
  spec.p_grid = {16};
  spec.q = 2;
  spec.k = 2;
  // Far above and far below the recovery threshold.
  spec.n_grid = {16, 2400};
  spec.trials = 5;
  spec.base_seed = 99;
  spec.phi_scale = 0.0;
  spec.noise_sigma = 1.0;
  spec.coef_scale = 2.0;
  PhaseDiagramResult res = run_phase_diagram(spec);
  REQUIRE(res.cells.size() == 2);
  CHECK(res.cells[0].recovery_probability <= 0.2);
  CHECK(res.cells[1].recovery_probability >= 0.8);
  CHECK(res.cells[1].mean_support_jaccard >=
        res.cells[0].mean_support_jaccard);
  CHECK(res.resolved_lambda_c > 0.0);
}

TEST_CASE("scaling sweep specs are validated") {
  ScalingSpec spec;
  spec.p = 16;
  spec.k = 4;
  spec.n_list = {8};  // below 4k
  CHECK_THROWS_AS(run_scaling_sweep(spec), DataError);

  spec = ScalingSpec{};
  spec.n_list = {};
  CHECK_THROWS_AS(run_scaling_sweep(spec), DataError);
}

TEST_CASE("noiseless scaling sweep nails the coefficients") {
  ScalingSpec spec;
  spec.p = 16;
  spec.k = 2;
  spec.q = 2;
  spec.n_list = {400};
  spec.trials = 3;
  spec.base_seed = 11;
  spec.noise_sigma = 0.0;
  spec.phi_scale = 0.0;
  spec.coef_scale = 1.5;
  ScalingResult res = run_scaling_sweep(spec);
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].recovery_rate == 1.0);
  CHECK(res.rows[0].mean_error < 1e-6);
  CHECK(!res.slope.has_value());  // single sample size
  REQUIRE(res.trials.size() == 3);
  for (const auto& t : res.trials) {
    CHECK(t.recovered);
    CHECK(t.ate_err <= t.ate_bound);
    CHECK(t.ate_err < 1e-8);
  }
}

TEST_CASE("scaling error shrinks with n and the bound always holds") {
  ScalingSpec spec;
  spec.p = 16;
  spec.k = 2;
  spec.q = 2;
  spec.n_list = {200, 800, 3200};
  spec.trials = 6;
  spec.base_seed = 12;
  spec.noise_sigma = 1.0;
  spec.phi_scale = 0.0;
  spec.coef_scale = 2.0;
  ScalingResult res = run_scaling_sweep(spec);
  REQUIRE(res.rows.size() == 3);
  CHECK(res.rows[0].mean_error > res.rows[2].mean_error);
  REQUIRE(res.slope.has_value());
  CHECK(*res.slope < 0.0);
  for (const auto& t : res.trials) CHECK(t.ate_err <= t.ate_bound);
  // Rows follow the requested ascending order.
  CHECK(res.rows[0].n == 200);
  CHECK(res.rows[2].n == 3200);
}

}  // TEST_SUITE
