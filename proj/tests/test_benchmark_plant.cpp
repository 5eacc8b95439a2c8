#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "lsfct/benchmark_plant.hpp"
#include "lsfct/errors.hpp"
#include "support.hpp"

using namespace lsfct;

namespace {

IntegrationConfig config(double step, double t_end) {
  IntegrationConfig c;
  c.step = step;
  c.t_end = t_end;
  return c;
}

}  // namespace

TEST(PlantDerivative, EquilibriumAtRest) {
  PlantConfig c = example5_plant();
  c.input.level = 0.0;
  const PlantState d = plant_derivative(PlantState{}, c, 0.0);
  EXPECT_EQ(d.x1, 0.0);
  EXPECT_EQ(d.x2, 0.0);
  EXPECT_EQ(d.f1, 0.0);
  EXPECT_EQ(d.f2, 0.0);
  EXPECT_EQ(d.f3, 0.0);
  EXPECT_EQ(d.fy, 0.0);
}

TEST(PlantDerivative, SteadyStateUnderConstantInput) {
  const PlantConfig c = example5_plant();
  // theta3 u / theta1 = 2.5
  const PlantState steady{2.5, 0.0, -2.5, 0.0, 5.0, 0.0};
  const PlantState d = plant_derivative(steady, c, 1.0);
  EXPECT_NEAR(d.x1, 0.0, 1e-15);
  EXPECT_NEAR(d.x2, 0.0, 1e-15);
  EXPECT_NEAR(d.f1, 0.0, 1e-15);
  EXPECT_NEAR(d.f3, 0.0, 1e-15);
}

TEST(PlantDerivative, PlantPolesFromFiniteDifferenceJacobian) {
  PlantConfig c = example5_plant();
  c.input.level = 0.0;
  Eigen::Matrix2d J;
  const double eps = 1e-6;
  for (int col = 0; col < 2; ++col) {
    PlantState s;
    (col == 0 ? s.x1 : s.x2) = eps;
    const PlantState d = plant_derivative(s, c, 0.0);
    J(0, col) = d.x1 / eps;
    J(1, col) = d.x2 / eps;
  }
  // s^2 + 3 s + 2
  const auto eig = J.eigenvalues();
  std::vector<double> re{eig[0].real(), eig[1].real()};
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], -2.0, 1e-8);
  EXPECT_NEAR(re[1], -1.0, 1e-8);
  EXPECT_NEAR(eig[0].imag(), 0.0, 1e-12);
}

TEST(EmitSample, ZeroInitialConditions) {
  const RegressorSample s = emit_sample(PlantState{}, example5_plant(), 0.0);
  EXPECT_EQ(s.y, 0.0);
  EXPECT_EQ(s.phi, Vector::Zero(3));
}

TEST(EmitSample, ConvergesToDcValues) {
  const PlantConfig c = example5_plant();
  const LsStandardEstimator dummy(4.0, Vector::Zero(3));
  PlantState last;
  test_support::run_plant_with(dummy, c, config(1e-3, 30.0),
                          [&](double, const PlantState& p, std::span<const double>) { last = p; });
  EXPECT_NEAR(last.x1, 2.5, 1e-9);
  EXPECT_NEAR(last.x2, 0.0, 1e-9);
  const RegressorSample s = emit_sample(last, c, 30.0);
  EXPECT_NEAR(s.phi[0], -2.5, 1e-9);
  EXPECT_NEAR(s.phi[1], 0.0, 1e-9);
  EXPECT_NEAR(s.phi[2], 5.0, 1e-9);
  EXPECT_NEAR(s.y, 0.0, 1e-9);
  EXPECT_NEAR(s.phi.dot(c.theta_true), s.y, 1e-9);
}

TEST(EmitSample, NoiselessTrajectorySatisfiesRegression) {
  for (InputKind kind : {InputKind::constant, InputKind::sine}) {
    PlantConfig c = example5_plant();
    c.input.kind = kind;
    c.input.amplitude = 2.0;
    c.input.frequency = 0.7;
    const LsStandardEstimator dummy(4.0, Vector::Zero(3));
    double worst = 0.0;
    test_support::run_plant_with(dummy, c, config(1e-4, 10.0),
                            [&](double t, const PlantState& p, std::span<const double>) {
                              const RegressorSample s = emit_sample(p, c, t);
                              worst = std::max(worst, std::abs(s.y - s.phi.dot(c.theta_true)));
                            });
    EXPECT_LE(worst, 1e-9) << to_string(kind);
  }
}

TEST(EmitSample, NoiseOnlyEntersOutput) {
  PlantConfig c = example5_plant();
  const PlantState p{1.0, 0.5, -0.3, 0.2, 2.0, 0.1};
  const RegressorSample clean = emit_sample(p, c, 1.0, 0.25);
  c.noise.enabled = true;
  const RegressorSample noisy = emit_sample(p, c, 1.0, 0.25);
  EXPECT_EQ(clean.phi, noisy.phi);
  EXPECT_DOUBLE_EQ(noisy.y - clean.y, 0.25);
}

TEST(NoiseStream, ZeroStdIsSilent) {
  const auto draws = noise_stream(NoiseConfig{true, 0.0, 3}, 1000);
  EXPECT_TRUE(std::all_of(draws.begin(), draws.end(), [](double v) { return v == 0.0; }));
  EXPECT_THROW(noise_stream(NoiseConfig{false, 0.01, 3}, 10), ConfigError);
}

TEST(NoiseStream, ReproducibleFromSeed) {
  EXPECT_EQ(noise_stream(NoiseConfig{true, 0.01, 99}, 5000), noise_stream(NoiseConfig{true, 0.01, 99}, 5000));
  EXPECT_NE(noise_stream(NoiseConfig{true, 0.01, 99}, 50), noise_stream(NoiseConfig{true, 0.01, 98}, 50));
}

TEST(NoiseStream, EmpiricalMoments) {
  const double sigma = 0.01;
  const std::size_t n = 1'000'000;
  const auto draws = noise_stream(NoiseConfig{true, sigma, 2024}, n);
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double d : draws) var += (d - mean) * (d - mean);
  const double sd = std::sqrt(var / static_cast<double>(n - 1));
  EXPECT_LE(std::abs(mean), 4.0 * sigma / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(sd, sigma, 0.01 * sigma);
}

TEST(PlantConfig, Validation) {
  PlantConfig c = example5_plant();
  EXPECT_NO_THROW(c.validate());
  c.lambda = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = example5_plant();
  c.theta_true = Vector::Ones(2);
  EXPECT_THROW(c.validate(), ConfigError);
  c = example5_plant();
  c.noise.std_dev = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_input_kind("square"), ConfigError);
}
