#include <doctest.h>

#include <cmath>
#include <random>

#include "cforge/optics.hpp"

using namespace cforge;

TEST_CASE("bare PPBS realizes the factorized family") {
  const auto eff = effective_filter(InterferometerSpec::bare_ppbs(1.0, 1.0 / std::sqrt(3.0)));
  CHECK(std::abs(eff.filter[0] - Complex(-1.0 / 3.0, 0.0)) < 1e-12);
  CHECK(std::abs(eff.filter[1] - Complex(1.0 / std::sqrt(3.0), 0.0)) < 1e-12);
  CHECK(std::abs(eff.filter[2] - Complex(1.0 / std::sqrt(3.0), 0.0)) < 1e-12);
  CHECK(std::abs(eff.filter[3] - Complex(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(eff.p_l - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(eff.filter[0]) - std::norm(eff.filter[1])) < 1e-12);
  CHECK(in_two_qubit_family(eff.filter));
}

TEST_CASE("coincidence map entries are permanents") {
  const InterferometerSpec spec = InterferometerSpec::bare_ppbs(1.0, 1.0 / std::sqrt(3.0));
  const CMatrix u = mode_transfer(spec);
  const CMatrix map = coincidence_map(spec);
  CHECK(std::abs(map(0, 0) - (u(kA0, kA0) * u(kB0, kB0) + u(kA0, kB0) * u(kB0, kA0))) < 1e-15);
  CHECK(std::abs(u(kA0, kB0) + u(kB0, kA0)) < 1e-15);
  CMatrix off = map;
  off.diagonal().setZero();
  CHECK(off.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("beam splitter transmittance sets the |00> amplitude") {
  InterferometerSpec balanced;
  balanced.bs_transmittance = 0.5;
  const auto eff = effective_filter(balanced);
  CHECK(std::abs(eff.filter[0]) < 1e-12);
  CHECK(std::abs(eff.filter[1].real() - std::sqrt(0.5)) < 1e-12);

  for (double t : {0.2, 0.6, 0.9}) {
    InterferometerSpec spec;
    spec.bs_transmittance = t;
    const auto f = effective_filter(spec).filter;
    CHECK(std::abs(f[0].real() / std::norm(f[1]) - (2 * t - 1) / t) < 1e-12);
  }
}

TEST_CASE("uniform attenuation only lowers P_L") {
  InterferometerSpec spec = InterferometerSpec::bare_ppbs(1.0, 1.0 / std::sqrt(3.0));
  spec.attenuations = {0.8, 0.8, 0.8, 0.8};
  const auto eff = effective_filter(spec);
  CHECK(std::abs(eff.p_l - std::pow(0.8, 4)) < 1e-12);
  CHECK(std::abs(eff.filter[0].real() + 1.0 / 3.0) < 1e-12);

  InterferometerSpec dark;
  dark.attenuations = {0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(effective_filter(dark), DomainError);
  InterferometerSpec bad;
  bad.bs_transmittance = 1.5;
  CHECK_THROWS_AS(mode_transfer(bad), DomainError);
}

TEST_CASE("Choi matrix of an ideal filter") {
  const DiagonalFilter f(std::vector<double>{0.32, 0.8, 0.8, 1.0});
  const auto chi = choi_of_filter(f);
  CHECK(std::abs(chi.trace() - (0.32 * 0.32 + 2 * 0.64 + 1.0)) < 1e-14);
  const auto m = process_metrics(chi, chi);
  CHECK(std::abs(m.purity - 1.0) < 1e-12);
  CHECK(std::abs(m.fidelity - 1.0) < 1e-12);

  const auto zero = choi_of_filter(DiagonalFilter(std::vector<double>{0.0, 0.0, 0.0, 1.0}));
  CHECK(std::abs(zero.chi(15, 15) - 1.0) < 1e-15);
  CHECK(std::abs(zero.trace() - 1.0) < 1e-15);
}

TEST_CASE("Choi matrix reproduces the filter action") {
  const DiagonalFilter f(std::vector<double>{0.2, 0.7, 0.5, 1.0});
  const QState rho = mixed_qubit_product({0.3, 0.8}, 2);
  const CMatrix expected = f.matrix() * rho.matrix() * f.matrix().adjoint();
  CHECK((apply_choi(choi_of_filter(f), rho.matrix()) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("phase compensation restores the ideal process") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ph(-1.0, 1.0);
  const DiagonalFilter f(std::vector<double>{0.32, 0.8, 0.8, 1.0});
  const auto ideal = choi_of_filter(f);
  for (int trial = 0; trial < 5; ++trial) {
    PhaseProfile prof{{ph(rng), ph(rng), ph(rng), ph(rng)}};
    const auto chi = choi_of_filter(f, prof);
    const auto before = process_metrics(chi, ideal);
    const auto comp = compensate_phases(chi);
    const auto after = process_metrics(comp.chi, ideal);
    CHECK(std::abs(before.purity - 1.0) < 1e-12);
    CHECK(before.fidelity < 1.0);
    CHECK(std::abs(after.fidelity - 1.0) < 1e-9);
    CHECK(after.fidelity >= before.fidelity);
    for (std::size_t j = 0; j < 4; ++j) {
      double diff = std::remainder(comp.profile.phases[j] - (prof.phases[j] - prof.phases[3]), 2 * M_PI);
      CHECK(std::abs(diff) < 1e-12);
    }
  }
}

TEST_CASE("mixed Choi matrices have purity below one") {
  const auto a = choi_of_filter(DiagonalFilter(std::vector<double>{1.0, 1.0}));
  const auto b = choi_of_filter(DiagonalFilter(std::vector<double>{1.0, -1.0}));
  const auto mixed = make_choi(0.5 * (a.chi + b.chi), 2);
  const auto m = process_metrics(mixed, a);
  CHECK(std::abs(m.purity - 0.5) < 1e-14);
  CHECK(std::abs(m.fidelity - 0.5) < 1e-14);
  CHECK_THROWS_AS(make_choi(CMatrix::Identity(3, 3), 2), DimensionError);
  CHECK_THROWS_AS(make_choi(-a.chi, 2), DomainError);
}
