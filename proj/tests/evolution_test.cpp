#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace qprop;

namespace {

const Ansatz kRx(1, {GateSpec::rotation(PauliAxis::X, 0, 0)});
const Hamiltonian kZ({PauliString("Z")});

EvolutionConfig config(double total, double dtau) {
  EvolutionConfig c;
  c.total_time = total;
  c.dtau = dtau;
  return c;
}

}  // namespace

TEST(Step, RxVelocityIsTwoSine) {
  const auto r = step(kRx, RealVector::Constant(1, 0.8), kZ, config(1, 0.1), DensityOperator::basis_state(1));
  EXPECT_NEAR(r.theta_dot(0), 2 * std::sin(0.8), 1e-12);
  EXPECT_NEAR(r.theta_next(0), 0.8 + 0.1 * 2 * std::sin(0.8), 1e-12);
}

TEST(Step, StationaryPointStaysPut) {
  const auto r = step(kRx, RealVector::Constant(1, std::numbers::pi), kZ, config(1, 0.1), DensityOperator::basis_state(1));
  EXPECT_NEAR(r.theta_next(0), std::numbers::pi, 1e-15);
}

TEST(Step, DepolarizingInflatesVelocity) {
  const auto inst = sample_instance(2, 5, 77);
  const auto rho0 = DensityOperator::basis_state(2);
  EvolutionConfig cfg = config(1, 0.05);
  cfg.svd_cutoff = 0.0;
  const RealVector ideal = step(inst.ansatz, inst.theta, inst.hamiltonian, cfg, rho0).theta_dot;
  cfg.noise = NoiseChannel::depolarizing(0.05);
  cfg.reference = YReference::ideal_state;
  const RealVector noisy = step(inst.ansatz, inst.theta, inst.hamiltonian, cfg, rho0).theta_dot;
  EXPECT_LT((noisy * std::pow(0.95, 5) - ideal).norm(), 1e-9 * ideal.norm());
  EXPECT_NEAR((noisy - ideal).norm() / ideal.norm(), bounds::theorem2_relative_error(5, 0.05).value(), 1e-9);
}

TEST(Exact, ZeroTimeIsIdentity) {
  std::mt19937_64 rng(1);
  const DensityOperator rho(2, oracle::random_density(4, rng));
  EXPECT_LT((exact_imaginary_evolution(h2_hamiltonian(), rho, 0.0).matrix() - rho.matrix()).norm(), 1e-15);
}

TEST(Exact, PlusStateUnderZ) {
  Eigen::VectorXcd plus(2);
  plus << 1, 1;
  const auto rho0 = DensityOperator::pure(1, plus);
  for (double tau : {0.1, 0.5, 2.0}) {
    EXPECT_NEAR(exact_imaginary_evolution(kZ, rho0, tau).expectation(pauli::single('Z')), -std::tanh(2 * tau), 1e-12);
  }
}

TEST(Exact, LongTimeReachesGroundState) {
  const auto rho = exact_imaginary_evolution(h2_hamiltonian(), DensityOperator::maximally_mixed(2), 200.0);
  EXPECT_NEAR(rho.expectation(h2_hamiltonian().matrix()), ground_energy(h2_hamiltonian()), 1e-10);
  EXPECT_THROW(exact_imaginary_evolution(h2_hamiltonian(), rho, -1.0), DomainError);
}

TEST(Exact, ExcitedEigenstateIsStationary) {
  // |0> has no ground-state weight under Z; it must stay put however long
  // we evolve.
  const auto rho = exact_imaginary_evolution(kZ, DensityOperator::basis_state(1, 0), 1e6);
  EXPECT_NEAR(rho.matrix()(0, 0).real(), 1.0, 1e-12);
}

TEST(Run, NinePresetConvergesMonotonically) {
  const auto trace = run(presets::nine_param(), RealVector::Constant(9, 0.1), h2_hamiltonian(), EvolutionConfig{},
                         DensityOperator::basis_state(2));
  EXPECT_EQ(trace.step_count(), 100);
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    EXPECT_LE(trace.records[i].energy, trace.records[i - 1].energy + 1e-6);
    EXPECT_GT(trace.records[i].tau, trace.records[i - 1].tau);
  }
  EXPECT_NEAR(trace.final_record().energy, ground_energy(h2_hamiltonian()), 1e-3);
  EXPECT_NEAR(trace.final_record().tau, 5.0, 1e-12);
}

TEST(Run, FivePresetApproachesGroundEnergy) {
  const RealVector theta0 = (RealVector(5) << 1.5249, 2.5142, 0.4457, 1.3250, 2.8769).finished();
  const auto trace = run(presets::five_param(), theta0, h2_hamiltonian(), EvolutionConfig{}, DensityOperator::basis_state(2));
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    EXPECT_LE(trace.records[i].energy, trace.records[i - 1].energy + 1e-6);
  }
  EXPECT_NEAR(trace.final_record().energy, ground_energy(h2_hamiltonian()), 1e-3);
}

TEST(Run, EulerStepIsFirstOrder) {
  const auto rho0 = DensityOperator::basis_state(2);
  const RealVector theta0 = RealVector::Constant(9, 0.1);
  const double e0 = oracle::energy(presets::nine_param(), theta0, h2_hamiltonian(), rho0);
  auto change = [&](double dt) {
    const auto r = step(presets::nine_param(), theta0, h2_hamiltonian(), config(1, dt), rho0);
    return oracle::energy(presets::nine_param(), r.theta_next, h2_hamiltonian(), rho0) - e0;
  };
  EXPECT_NEAR(change(0.01) / change(0.005), 2.0, 0.02);
}

TEST(Run, ConvergesAtFirstOrderInStepSize) {
  // The projected flow differs from exact evolution, so compare against a
  // fine-step run of the same scheme on a well conditioned instance.
  const auto inst = sample_instance(2, 5, 41);
  const auto rho0 = DensityOperator::basis_state(2);
  auto final_energy = [&](double dt) {
    EvolutionConfig cfg = config(1.0, dt);
    cfg.svd_cutoff = 0.0;
    return run(inst.ansatz, inst.theta, inst.hamiltonian, cfg, rho0).final_record().energy;
  };
  const double fine = final_energy(0.0025);
  const double e1 = std::abs(final_energy(0.04) - fine);
  const double e2 = std::abs(final_energy(0.02) - fine);
  EXPECT_NEAR(e1 / e2, 2.0, 0.4);
}

TEST(Run, ExactEvolutionEnergyDecreases) {
  const auto start = run_circuit(presets::nine_param(), RealVector::Constant(9, 0.1), DensityOperator::basis_state(2),
                                 NoiseChannel::none());
  double prev = 1e300;
  for (double tau : {0.0, 0.5, 1.0, 2.0}) {
    const double e = exact_imaginary_evolution(h2_hamiltonian(), start, tau).expectation(h2_hamiltonian().matrix());
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(Run, RealTimeEnergyDriftShrinksWithStep) {
  const auto rho0 = DensityOperator::basis_state(2);
  auto drift = [&](double dt) {
    EvolutionConfig cfg = config(0.5, dt);
    cfg.mode = EvolutionMode::real;
    const auto trace = run(presets::nine_param(), RealVector::LinSpaced(9, 0.2, 1.4), h2_hamiltonian(), cfg, rho0);
    EXPECT_GT(trace.final_record().fidelity, 0.999);
    return std::abs(trace.final_record().energy - trace.records.front().energy);
  };
  const double coarse = drift(1e-3);
  const double fine = drift(5e-4);
  EXPECT_LT(fine, 1e-4);
  EXPECT_LT(fine, 0.7 * coarse);
}

TEST(Run, FullDepolarizingGivesFlatTrace) {
  EvolutionConfig cfg = config(0.5, 0.05);
  cfg.noise = NoiseChannel::depolarizing(1.0);
  const RealVector theta0 = RealVector::Constant(9, 0.1);
  const auto trace = run(presets::nine_param(), theta0, h2_hamiltonian(), cfg, DensityOperator::basis_state(2));
  ASSERT_FALSE(trace.diagnostics.empty());
  for (const auto& r : trace.records) EXPECT_EQ((r.theta - theta0).norm(), 0.0);
}

TEST(Run, ConfigValidation) {
  EXPECT_THROW(config(1, 0).validate(), DomainError);
  EXPECT_THROW(config(0.01, 0.1).validate(), DomainError);
  EXPECT_EQ(config(1.0, 0.3).step_count(), 4);
}
