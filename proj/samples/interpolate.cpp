// Fits a periodic D^2 spline through noisy samples of a Gaussian bridge and
// prints the error of the representer solution and of the MMSE estimator.

#include <cstdio>

#include "pspline/pspline.hpp"

int main() {
  using namespace pspline;

  const int n = 500;
  const double gamma0 = 1.0;
  const double sigma0_sq = 1e-3;

  const OperatorSpec op = parse_operator("D2", n);
  const RandomStream rng(42);
  RandomStream innovation = rng.substream(0);
  const BridgeDraw truth = draw_bridge(op, gamma0, n, innovation);

  std::vector<double> t;
  RandomStream jitter = rng.substream(1);
  for (int m = 0; m < 20; ++m) t.push_back((m + jitter.uniform()) / 20.0);
  const MeasurementSet meas = MeasurementSet::time_samples(t);

  RandomStream noise = rng.substream(2);
  const MeasurementDraw data = measure(truth, meas, sigma0_sq, noise);

  const SystemMatrices sys = assemble_system(build_kernel(op, gamma0, n), meas);
  const ReconstructionModel rt = solve_representer(sys, data.y, sigma0_sq);
  const ReconstructionModel mmse = solve_gamma_regularized(sys, data.y, sigma0_sq);

  const double energy = l2_norm_sq(truth.signal);
  std::printf("representer  relative error %.4e\n", l2_distance_sq(truth.signal, rt.fitted) / energy);
  std::printf("mmse         relative error %.4e\n", l2_distance_sq(truth.signal, mmse.fitted) / energy);
  std::printf("spline check %.2e\n", verify_spline(rt, meas));

  std::printf("\n%8s %12s %12s\n", "t", "s(t)", "f(t)");
  for (int i = 0; i < 8; ++i) {
    const double ti = i / 8.0;
    std::printf("%8.3f %12.5f %12.5f\n", ti, evaluate(truth.signal, ti).real(), evaluate(rt.fitted, ti).real());
  }
}
