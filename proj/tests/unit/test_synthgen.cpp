#include <doctest.h>

#include <cmath>
#include <cstdint>

#include <jointsel/errors.hpp>
#include <jointsel/synthgen.hpp>

using namespace jointsel;

TEST_SUITE("synthgen") {

TEST_CASE("draw has the declared shapes and support size") {
  SynthSpec spec;
  spec.p = 25;
  spec.q = 3;
  spec.k = 6;
  spec.n = 120;
  spec.seed = 11;
  SynthDraw draw = generate(spec);
  CHECK(draw.data.X.rows() == 120);
  CHECK(draw.data.X.cols() == 25);
  CHECK(draw.data.q == 3);
  CHECK(draw.true_support.size() == 6);
  CHECK(draw.true_theta.rows() == 25);
  CHECK(draw.true_theta.cols() == 3);
  // Coefficients live exactly on the support rows.
  for (int i = 0; i < 25; ++i) {
    bool on = draw.true_support.contains(i);
    CHECK((draw.true_theta.row(i).cwiseAbs().maxCoeff() != 0.0) == on);
  }
  draw.data.validate();
}

TEST_CASE("same seed reproduces the draw bitwise") {
  SynthSpec spec;
  spec.p = 12;
  spec.q = 2;
  spec.k = 3;
  spec.n = 80;
  spec.seed = 77;
  SynthDraw a = generate(spec);
  SynthDraw b = generate(spec);
  CHECK((a.data.X.array() == b.data.X.array()).all());
  CHECK((a.data.y.array() == b.data.y.array()).all());
  CHECK((a.data.t.array() == b.data.t.array()).all());
  CHECK((a.true_theta.array() == b.true_theta.array()).all());
  CHECK(a.true_support == b.true_support);
  CHECK(a.true_ate_empirical == b.true_ate_empirical);

  spec.seed = 78;
  SynthDraw c = generate(spec);
  CHECK((a.data.X.array() != c.data.X.array()).any());
}

TEST_CASE("noiseless outcomes reproduce the sparse response exactly") {
  SynthSpec spec;
  spec.p = 10;
  spec.q = 2;
  spec.k = 4;
  spec.n = 50;
  spec.seed = 5;
  spec.noise_sigma = 0.0;
  SynthDraw draw = generate(spec);
  for (int r = 0; r < 50; ++r) {
    Vector x = draw.data.X.row(r).transpose();
    double want =
        sparse_response(draw.true_theta, draw.true_support, x, draw.data.t(r));
    CHECK(draw.data.y(r) == want);
  }
}

TEST_CASE("zero assignment scale gives near-uniform treatment frequencies") {
  SynthSpec spec;
  spec.p = 8;
  spec.q = 4;
  spec.k = 2;
  spec.n = 4000;
  spec.seed = 21;
  spec.phi_scale = 0.0;
  SynthDraw draw = generate(spec);
  CHECK(draw.true_phi.cwiseAbs().maxCoeff() == 0.0);
  double inv_q = 1.0 / spec.q;
  double bound = 3.0 * std::sqrt(inv_q * (1.0 - inv_q) / spec.n);
  for (int c = 0; c < spec.q; ++c) {
    double freq =
        static_cast<double>((draw.data.t.array() == c).count()) / spec.n;
    CHECK(std::abs(freq - inv_q) < bound);
  }
}

TEST_CASE("beta_min keeps every support row above the floor") {
  SynthSpec spec;
  spec.p = 20;
  spec.q = 2;
  spec.k = 5;
  spec.n = 10;
  spec.seed = 9;
  spec.beta_min = 0.8;
  SynthDraw draw = generate(spec);
  for (int i : draw.true_support.indices)
    CHECK(draw.true_theta.row(i).norm() >= 0.8);
}

TEST_CASE("empirical contrast map matches a recomputation") {
  SynthSpec spec;
  spec.p = 9;
  spec.q = 3;
  spec.k = 3;
  spec.n = 60;
  spec.seed = 14;
  SynthDraw draw = generate(spec);
  Vector mu = draw.data.X.colwise().mean().transpose();
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a == b) {
        CHECK(draw.true_ate_empirical.count({a, b}) == 0);
        continue;
      }
      double want = sparse_response(draw.true_theta, draw.true_support, mu, a) -
                    sparse_response(draw.true_theta, draw.true_support, mu, b);
      CHECK(draw.true_ate_empirical.at({a, b}) == want);
    }
  }
  // The centered generator's population contrasts are identically zero.
  CHECK(draw.true_ate_population.at({0, 1}) == 0.0);
}

TEST_CASE("restricted assignment rows confine Phi") {
  SynthSpec spec;
  spec.p = 6;
  spec.q = 2;
  spec.k = 2;
  spec.n = 30;
  spec.seed = 3;
  spec.phi_support = {1, 4};
  SynthDraw draw = generate(spec);
  for (int i = 0; i < 6; ++i) {
    bool allowed = (i == 1 || i == 4);
    if (!allowed) CHECK(draw.true_phi.row(i).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("covariate shaping via a cholesky factor scales the columns") {
  SynthSpec spec;
  spec.p = 3;
  spec.q = 2;
  spec.k = 1;
  spec.n = 5000;
  spec.seed = 8;
  spec.cov_chol = 2.0 * Matrix::Identity(3, 3);
  SynthDraw draw = generate(spec);
  for (int c = 0; c < 3; ++c) {
    double var = (draw.data.X.col(c).array() -
                  draw.data.X.col(c).mean()).square().sum() /
                 (spec.n - 1);
    CHECK(std::sqrt(var) == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("parameter validation rejects malformed specs") {
  SynthSpec spec;
  spec.k = spec.p + 1;
  CHECK_THROWS_AS(generate(spec), DataError);
  spec = SynthSpec{};
  spec.q = 1;
  CHECK_THROWS_AS(generate(spec), DataError);
  spec = SynthSpec{};
  spec.noise_sigma = -1.0;
  CHECK_THROWS_AS(generate(spec), DataError);
  spec = SynthSpec{};
  spec.phi_support = {spec.p};
  CHECK_THROWS_AS(generate(spec), DataError);
}

TEST_CASE("semisynthetic outcomes reuse the given covariates") {
  SynthSpec base;
  base.p = 25;
  base.q = 2;
  base.k = 4;
  base.n = 200;
  base.seed = 31;
  SynthDraw origin = generate(base);

  SynthSpec spec;
  spec.k = 6;
  spec.seed = 99;
  spec.noise_sigma = 0.5;
  SynthDraw draw =
      generate_semisynthetic(origin.data.X, origin.data.t, spec);
  CHECK((draw.data.X.array() == origin.data.X.array()).all());
  CHECK((draw.data.t.array() == origin.data.t.array()).all());
  CHECK(draw.true_support.size() == 6);
  CHECK(draw.true_support.p == 25);
  CHECK(draw.true_ate_population.empty());
  CHECK(draw.true_ate_empirical.count({1, 0}) == 1);

  SynthDraw again =
      generate_semisynthetic(origin.data.X, origin.data.t, spec);
  CHECK((draw.data.y.array() == again.data.y.array()).all());
}

TEST_CASE("semisynthetic rejects constant treatment and length mismatch") {
  Matrix X = Matrix::Ones(10, 3);
  IntVector t = IntVector::Zero(10);
  SynthSpec spec;
  spec.k = 2;
  CHECK_THROWS_AS(generate_semisynthetic(X, t, spec), DataError);

  IntVector t2 = IntVector::Zero(9);
  CHECK_THROWS_AS(generate_semisynthetic(X, t2, spec), DataError);
}

}  // TEST_SUITE
