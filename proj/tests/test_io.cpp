#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace pspline;

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(1e-12), "9.9999999999999998e-13");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Measurements, ParseKinds) {
  const auto t = parse_measurements(Json::parse(R"({"kind":"time","locations":[0.1,0.5]})"));
  EXPECT_EQ(t.kind(), MeasurementKind::TimeSamples);
  EXPECT_EQ(t.size(), 2u);
  const auto f = parse_measurements(Json::parse(R"({"kind":"fourier","indices":[-1,0,1]})"));
  EXPECT_EQ(f.kind(), MeasurementKind::FourierSamples);
  const auto g = parse_measurements(Json::parse(R"({"kind":"generic","signals":[[0.5,1,0.5],[[0,1],0,[0,-1]]]})"));
  EXPECT_EQ(g.kind(), MeasurementKind::Generic);
  EXPECT_TRUE(g.real_valued());
  EXPECT_EQ(g.signals()[1][1], Complex(0.0, -1.0));
}

TEST(Measurements, ParseErrors) {
  EXPECT_THROW(parse_measurements(Json::parse(R"({"kind":"space"})")), ConfigError);
  EXPECT_THROW(parse_measurements(Json::parse(R"({"locations":[0.1]})")), ConfigError);
  EXPECT_THROW(parse_measurements(Json::parse(R"({"kind":"time","locations":[0.1,0.1]})")), ConfigError);
  EXPECT_THROW(parse_measurements(Json::parse(R"({"kind":"fourier","indices":[1]})")), ConfigError);
  EXPECT_THROW(parse_measurements(Json::parse(R"({"kind":"time","locations":"x"})")), ConfigError);
  EXPECT_THROW(parse_measurements(Json::parse(R"({"kind":"generic","signals":[[1,2]]})")), ConfigError);
}

TEST(Values, InlineAndFile) {
  auto y = parse_values("1, 2.5,-3");
  ASSERT_EQ(y.size(), 3);
  EXPECT_EQ(y[1], Complex(2.5, 0.0));
  y = parse_values("[1, [2, 3]]");
  EXPECT_EQ(y[1], Complex(2.0, 3.0));
  const std::string path = testing::TempDir() + "values.json";
  {
    std::ofstream out(path);
    out << "[4, 5]";
  }
  y = parse_values(path);
  ASSERT_EQ(y.size(), 2);
  EXPECT_EQ(y[0], Complex(4.0, 0.0));
  std::remove(path.c_str());
  EXPECT_THROW(parse_values(""), ConfigError);
  EXPECT_THROW(parse_values("a,b"), ConfigError);
  EXPECT_THROW(parse_values("[]"), ConfigError);
}

TEST(Config, Overlay) {
  ExperimentConfig cfg;
  apply_config(Json::parse(R"({"operator":"D2","trials":7,"seed":99,"grid":[0.1,0.2],
                              "measurements":{"kind":"fourier","indices":[-1,1]}})"),
               cfg);
  EXPECT_EQ(cfg.op, "D2");
  EXPECT_EQ(cfg.trials, 7);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.grid, (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(cfg.kind, MeasurementKind::FourierSamples);
  apply_config(Json::parse(R"({"measurements":{"kind":"time","locations":[0.3]}})"), cfg);
  EXPECT_EQ(cfg.sampling, SamplingScheme::Fixed);
  EXPECT_THROW(apply_config(Json::parse(R"({"trials":"many"})"), cfg), ConfigError);
  EXPECT_THROW(apply_config(Json::parse("[1]"), cfg), ConfigError);
  EXPECT_THROW(apply_config(Json::parse(R"({"measurements":{"kind":"generic"}})"), cfg), ConfigError);
}

TEST(Records, CsvAndJson) {
  ExperimentConfig cfg;
  cfg.trials = 3;
  cfg.n_coef = 40;
  cfg.m = 5;
  cfg.grid = {0.01, 0.02};
  const auto rec = run_lambda_sweep(cfg);
  std::ostringstream os;
  write_sweep_csv(os, rec);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "estimator,parameter,nmse,std_error,mse,normalized_mse,closed_form");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 2);
  const Json j = to_json(rec);
  EXPECT_EQ(j["points"].size(), 2u);
  EXPECT_EQ(j["config"]["trials"], 3);
  EXPECT_DOUBLE_EQ(j["points"][1]["nmse"].get<double>(), rec.points[1].nmse);
}

TEST(Records, ReconstructionJson) {
  const auto h = build_kernel(parse_operator("D", 30), 1.0, 30);
  const auto sys = assemble_system(h, MeasurementSet::time_samples({0.1, 0.6}));
  const auto model = solve_representer(sys, std::vector<double>{1.0, -1.0}, 0.1);
  const Json j = to_json(model, model.fitted, 8);
  EXPECT_EQ(j["a"].size(), 2u);
  EXPECT_EQ(j["b"].size(), 1u);
  EXPECT_EQ(j["reconstruction"]["t"].size(), 8u);
  EXPECT_EQ(j["kind"], "representer");
}
