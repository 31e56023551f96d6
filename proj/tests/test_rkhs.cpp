#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace pspline;
using testing_support::random_complex_signal;
using testing_support::random_locations;
using testing_support::random_real_signal;
using testing_support::table_operators;

namespace {

constexpr double kPi = std::numbers::pi;

// h(t) = 1 + (t^2 - t + 1/6) / 2 for L = D, gamma = 1, on [0, 1).
double derivative_kernel_exact(double t) { return 1.0 + 0.5 * (t * t - t + 1.0 / 6.0); }

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Admissibility, Derivative) {
  const auto op = parse_operator("D", 4000);
  const auto a = rkhs_admissible(op, 2000);
  const auto b = rkhs_admissible(op, 4000);
  EXPECT_TRUE(a.admissible);
  EXPECT_LT(std::abs(b.partial_sum - a.partial_sum) / b.partial_sum, 1e-3);
}

TEST(Admissibility, IdentityIsNot) {
  const auto a = rkhs_admissible(parse_operator("I", 100), 100);
  EXPECT_FALSE(a.admissible);
  EXPECT_DOUBLE_EQ(a.partial_sum, 201.0);
}

TEST(Admissibility, Oscillator) {
  const auto op = parse_operator("D2+4pi2I", 4000);
  const auto a = rkhs_admissible(op, 2000);
  const auto b = rkhs_admissible(op, 4000);
  EXPECT_TRUE(b.admissible);
  EXPECT_LT(std::abs(b.partial_sum - a.partial_sum) / b.partial_sum, 1e-3);
}

TEST(Kernel, DerivativeCoefficients) {
  const auto h = build_kernel(parse_operator("D", 10), 1.0, 10);
  EXPECT_DOUBLE_EQ(h[0], 1.0);
  EXPECT_NEAR(h[1], 2.5330e-2, 1e-6);
  EXPECT_NEAR(h[1], 1.0 / (4 * kPi * kPi), 1e-15);
}

TEST(Kernel, GammaIrrelevantWithoutNullSpace) {
  for (double g : {0.1, 1.0, 7.0}) EXPECT_DOUBLE_EQ(build_kernel(parse_operator("D+I", 4), g, 4)[0], 1.0);
}

TEST(Kernel, OscillatorNullSpaceWeight) {
  const auto h = build_kernel(parse_operator("D2+4pi2I", 5), 2.0, 5);
  EXPECT_DOUBLE_EQ(h[1], 0.25);
  EXPECT_DOUBLE_EQ(h[-1], 0.25);
}

TEST(Kernel, RejectsNonPositiveGamma) {
  const auto op = parse_operator("D", 4);
  EXPECT_THROW(build_kernel(op, 0.0, 4), InvalidParameter);
  EXPECT_THROW(build_kernel(op, -1.0, 4), InvalidParameter);
}

TEST(Kernel, EvenAndPositive) {
  for (const auto& name : table_operators()) {
    const auto h = build_kernel(parse_operator(name, 200), 1.3, 200);
    for (int k = 0; k <= 200; ++k) {
      EXPECT_GT(h[k], 0.0);
      EXPECT_EQ(h[k], h[-k]);
    }
    EXPECT_GT(kernel_value(h, 0.0), 0.0);
    for (double t : {0.1, 0.27, 0.4999}) {
      EXPECT_NEAR(kernel_value(h, t), kernel_value(h, 1.0 - t), kRealTolerance) << name;
    }
  }
}

TEST(Kernel, DerivativeMatchesClosedForm) {
  const int big = 100000;
  const auto ref = build_kernel(parse_operator("D", big), 1.0, big);
  for (double t : {0.0, 0.25, 0.5}) {
    EXPECT_NEAR(kernel_value(ref, t), derivative_kernel_exact(t), 1e-6);
  }
  const auto h = build_kernel(parse_operator("D", 1000), 1.0, 1000);
  EXPECT_NEAR(kernel_value(h, 0.5), kernel_value(ref, 0.5), 1e-4 * kernel_value(ref, 0.5));
  EXPECT_NEAR(kernel_value(h, 0.0), kernel_value(ref, 0.0), 1e-4 * kernel_value(ref, 0.0));
}

TEST(Measurements, Validation) {
  EXPECT_THROW(MeasurementSet::time_samples({}), InvalidInput);
  EXPECT_THROW(MeasurementSet::time_samples({0.2, 0.2}), InvalidInput);
  EXPECT_THROW(MeasurementSet::time_samples({0.25, 1.25}), InvalidInput);
  EXPECT_THROW(MeasurementSet::fourier_samples({1, 2, -1}), InvalidInput);
  EXPECT_THROW(MeasurementSet::fourier_samples({1, -1, 1}), InvalidInput);
  EXPECT_NO_THROW(MeasurementSet::fourier_samples({0, 1, -1}));
  const auto m = MeasurementSet::time_samples({-0.25, 1.5});
  EXPECT_DOUBLE_EQ(m.locations()[0], 0.75);
  EXPECT_DOUBLE_EQ(m.locations()[1], 0.5);
}

TEST(Assemble, FourierGramIsDiagonal) {
  const auto h = build_kernel(parse_operator("D+I", 20), 1.0, 20);
  const auto sys = assemble_system(h, MeasurementSet::fourier_samples({-2, -1, 0, 1, 2}));
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      if (a != b) EXPECT_EQ(sys.gram(a, b), Complex{});
    }
    EXPECT_DOUBLE_EQ(sys.gram(a, a).real(), h[a - 2]);
  }
}

TEST(Assemble, SingleSample) {
  const auto h = build_kernel(parse_operator("D", 50), 1.0, 50);
  const auto sys = assemble_system(h, MeasurementSet::time_samples({0.3}));
  ASSERT_EQ(sys.gram.rows(), 1);
  EXPECT_NEAR(sys.gram(0, 0).real(), kernel_value(h, 0.0), 1e-12);
}

TEST(Assemble, TimeGramMatchesDoubleQuadrature) {
  const int n = 16;
  const int points = 5 * n;
  const auto h = build_kernel(parse_operator("D", n), 1.0, n);
  const auto meas = MeasurementSet::time_samples({0.11, 0.42, 0.8});
  const auto sys = assemble_system(h, meas);
  std::vector<double> kern(points);
  for (int i = 0; i < points; ++i) kern[i] = kernel_value(h, static_cast<double>(i) / points);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      const auto na = meas.functional(a, n);
      const auto nb = meas.functional(b, n);
      double acc = 0.0;
      for (int i = 0; i < points; ++i) {
        const double va = evaluate(na, static_cast<double>(i) / points).real();
        for (int j = 0; j < points; ++j) {
          acc += va * kern[((i - j) % points + points) % points] *
                 evaluate(nb, static_cast<double>(j) / points).real();
        }
      }
      acc /= static_cast<double>(points) * points;
      EXPECT_NEAR(sys.gram(a, b).real(), acc, 1e-6);
    }
  }
}

TEST(Assemble, TimeGramRealSymmetric) {
  RandomStream rng(4);
  const auto h = build_kernel(parse_operator("D2+4pi2I", 300), 0.7, 300);
  const auto sys = assemble_system(h, MeasurementSet::time_samples(random_locations(12, rng)));
  EXPECT_EQ(sys.gram.imag().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(max_abs(sys.gram - sys.gram.transpose()), 0.0);
}

TEST(Assemble, NullSpaceMatrix) {
  const auto h = build_kernel(parse_operator("D2+4pi2I", 30), 1.0, 30);
  const auto sys = assemble_system(h, MeasurementSet::time_samples({0.1, 0.35, 0.6}));
  ASSERT_EQ(sys.p_matrix.cols(), 2);
  for (int m = 0; m < 3; ++m) {
    const double t = sys.measurements.locations()[m];
    EXPECT_NEAR(std::abs(sys.p_matrix(m, 0) - unit_phasor(-1, t)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(sys.p_matrix(m, 1) - unit_phasor(1, t)), 0.0, 1e-14);
  }
}

TEST(Assemble, RequiresRkhsForTimeSamples) {
  const auto h = build_kernel(parse_operator("I", 30), 1.0, 30);
  EXPECT_THROW(assemble_system(h, MeasurementSet::time_samples({0.1})), NotAdmissible);
  EXPECT_NO_THROW(assemble_system(h, MeasurementSet::fourier_samples({1, -1})));
}

TEST(Assemble, DegenerateMeasurements) {
  const auto h = build_kernel(parse_operator("D2+4pi2I", 30), 1.0, 30);
  EXPECT_THROW(assemble_system(h, MeasurementSet::time_samples({0.3})), DegenerateMeasurements);
  EXPECT_THROW(assemble_system(h, MeasurementSet::fourier_samples({0, 2, -2})), DegenerateMeasurements);
  // t and t + 1/2 see e_{+-1} with opposite signs only.
  EXPECT_THROW(assemble_system(h, MeasurementSet::time_samples({0.0, 0.5})), DegenerateMeasurements);
}

TEST(Assemble, FourierIndexOutsideBand) {
  const auto h = build_kernel(parse_operator("D+I", 3), 1.0, 3);
  EXPECT_THROW(assemble_system(h, MeasurementSet::fourier_samples({4, -4})), InvalidInput);
}

TEST(Assemble, GramIsPositiveSemidefinite) {
  RandomStream rng(9);
  for (const auto& name : table_operators()) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto h = build_kernel(parse_operator(name, 200), 0.5 + rng.uniform(), 200);
      const auto sys = assemble_system(h, MeasurementSet::time_samples(random_locations(15, rng)));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sys.gram);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10 * max_abs(sys.gram)) << name;
    }
  }
}

TEST(Assemble, GramConsistency) {
  RandomStream rng(10);
  const int n = 60;
  for (const auto& name : table_operators()) {
    const auto h = build_kernel(parse_operator(name, n), 1.0, n);
    const auto meas = MeasurementSet::time_samples(random_locations(6, rng));
    const auto sys = assemble_system(h, meas);
    for (std::size_t a = 0; a < 6; ++a) {
      for (std::size_t b = 0; b < 6; ++b) {
        const Complex v = inner_product_l2(meas.functional(a, n), sys.basis[b]);
        EXPECT_NEAR(std::abs(sys.gram(a, b) - std::conj(v)), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(sys.gram(a, b) - meas.apply(a, sys.basis[b])), 0.0, 1e-10);
      }
    }
  }
}

TEST(Assemble, GenericMatchesTimeSamples) {
  const int n = 40;
  const auto h = build_kernel(parse_operator("D", n), 1.3, n);
  const auto time = MeasurementSet::time_samples({0.05, 0.5, 0.61});
  std::vector<PeriodicSignal> signals;
  for (std::size_t m = 0; m < 3; ++m) signals.push_back(time.functional(m, n));
  const auto a = assemble_system(h, time);
  const auto b = assemble_system(h, MeasurementSet::generic(signals));
  EXPECT_LT(max_abs(a.gram - b.gram), 1e-10);
  EXPECT_LT(max_abs(a.p_matrix - b.p_matrix), 1e-14);
}

TEST(Assemble, GenericComplexGramIsHermitian) {
  RandomStream rng(12);
  const int n = 10;
  const auto h = build_kernel(parse_operator("D+I", n), 1.0, n);
  std::vector<PeriodicSignal> signals;
  for (int m = 0; m < 4; ++m) signals.push_back(random_complex_signal(n, rng));
  const auto sys = assemble_system(h, MeasurementSet::generic(signals));
  EXPECT_LT(max_abs(sys.gram - sys.gram.adjoint()), 1e-12);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      EXPECT_NEAR(std::abs(sys.gram(a, b) - sys.measurements.apply(a, sys.basis[b])), 0.0, 1e-10);
    }
  }
}

TEST(Assemble, WithGammaMatchesFreshAssembly) {
  RandomStream rng(13);
  const auto op = parse_operator("D2+4pi2I", 80);
  const auto meas = MeasurementSet::time_samples(random_locations(8, rng));
  const auto base = assemble_system(build_kernel(op, 1.0, 80), meas);
  for (double g : {1e-3, 0.4, 30.0}) {
    const auto fresh = assemble_system(build_kernel(op, g, 80), meas);
    const auto moved = base.with_gamma(g);
    EXPECT_LT(max_abs(fresh.gram - moved.gram), 1e-9 * max_abs(fresh.gram));
    for (std::size_t m = 0; m < 8; ++m) {
      EXPECT_LT(l2_distance_sq(fresh.basis[m], moved.basis[m]), 1e-20 * l2_norm_sq(fresh.basis[m]));
    }
  }
}

TEST(InnerProduct, NullSpaceAtom) {
  const auto op = parse_operator("D", 5);
  const auto e0 = PeriodicSignal::atom(5, 0);
  EXPECT_DOUBLE_EQ(inner_product_hl(op, 3.0, e0, e0).real(), 9.0);
}

TEST(InnerProduct, FirstHarmonic) {
  const auto e1 = PeriodicSignal::atom(5, 1);
  EXPECT_NEAR(inner_product_hl(parse_operator("D", 5), 1.0, e1, e1).real(), 4 * kPi * kPi, 1e-12);
}

TEST(InnerProduct, ZeroAndPositivity) {
  RandomStream rng(14);
  for (const auto& name : table_operators()) {
    const auto op = parse_operator(name, 20);
    EXPECT_EQ(inner_product_hl(op, 1.0, PeriodicSignal(20), PeriodicSignal(20)), Complex{});
    const auto f = random_real_signal(20, rng);
    EXPECT_GT(inner_product_hl(op, 0.1, f, f).real(), 0.0);
  }
}

TEST(InnerProduct, ReproducingProperty) {
  RandomStream rng(15);
  const int n = 64;
  for (const auto& name : table_operators()) {
    const auto op = parse_operator(name, n);
    const auto h = build_kernel(op, 1.0, n);
    for (int trial = 0; trial < 20; ++trial) {
      const auto f = random_real_signal(n, rng);
      const double t0 = rng.uniform();
      const Complex lhs = inner_product_hl(op, 1.0, f, shifted_kernel(h, t0));
      EXPECT_NEAR(std::abs(lhs - evaluate(f, t0)), 0.0, 1e-8) << name;
    }
  }
}
