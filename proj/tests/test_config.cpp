#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "uqsched/config.hpp"
#include "uqsched/errors.hpp"

namespace uqsched {
namespace {

TEST(Config, Defaults) {
  const AppConfig c;
  EXPECT_EQ(c.analysis.sample_threshold, 25u);
  EXPECT_EQ(c.analysis.subset_target_size, 12u);
  EXPECT_EQ(c.analysis.trust, 0.8);
  EXPECT_TRUE(c.analysis.normalize_area);
  EXPECT_EQ(c.predictor.noise_std, 4430.0);
  EXPECT_EQ(c.predictor.length_scale, 7734.0);
  EXPECT_EQ(c.predictor.alpha, 1.0);
  EXPECT_EQ(c.service.port, 8080);
}

TEST(Config, ParsesTablesOverBase) {
  const AppConfig c = parse_config(R"(
[analysis]
sample_threshold = 30
trust = 0.9

[predictor]
noise_std = 2.5
optimize = false

[service]
port = 9000
cors_origin = "http://localhost:5173"

[paths]
snapshot = "data/snapshot.json"
)");
  EXPECT_EQ(c.analysis.sample_threshold, 30u);
  EXPECT_EQ(c.analysis.subset_target_size, 12u);
  EXPECT_DOUBLE_EQ(c.analysis.epsilon(), 1.0 - 0.9);
  EXPECT_EQ(c.predictor.noise_std, 2.5);
  EXPECT_FALSE(c.predictor.optimize);
  EXPECT_EQ(c.service.port, 9000);
  EXPECT_EQ(c.service.cors_origin, "http://localhost:5173");
  EXPECT_EQ(c.snapshot_path, "data/snapshot.json");
}

TEST(Config, IntegerAcceptedForReal) {
  const AppConfig c = parse_config("[predictor]\nnoise_std = 3\n");
  EXPECT_EQ(c.predictor.noise_std, 3.0);
}

TEST(Config, EpsilonRawOverridesTrust) {
  const AppConfig c = parse_config("[analysis]\ntrust = 0.8\nepsilon_raw = 0.8\n");
  EXPECT_EQ(c.analysis.epsilon(), 0.8);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("[analysis]\ntrust = 1.5\n"), DomainError);
  EXPECT_THROW(parse_config("[analysis]\nsample_threshold = -3\n"), DomainError);
  EXPECT_THROW(parse_config("[analysis]\ntrsut = 0.5\n"), FormatError);
  EXPECT_THROW(parse_config("[analytics]\n"), FormatError);
  EXPECT_THROW(parse_config("[predictor]\nalpha = \"one\"\n"), FormatError);
  EXPECT_THROW(parse_config("[predictor]\nlength_scale = 0\n"), DomainError);
  EXPECT_THROW(parse_config("not toml at all ["), FormatError);
  EXPECT_THROW(load_config_file("/nonexistent/uqsched.toml"), IoError);
}

TEST(Config, TomlRoundTrip) {
  AppConfig c;
  c.analysis.epsilon_raw = 0.3;
  c.predictor.signal_var = 12.5;
  c.predictor.noise_std = 1.25;
  c.models_path = "m.json";
  const AppConfig back = parse_config(to_toml(c));
  EXPECT_EQ(to_toml(back), to_toml(c));
  EXPECT_EQ(back.analysis.epsilon_raw, 0.3);
  EXPECT_EQ(back.predictor.signal_var, 12.5);
}

TEST(Config, LoadFromFile) {
  fixtures::TempDir dir("cfg");
  fixtures::write_file(dir / "c.toml", "[analysis]\nsubset_target_size = 6\n");
  EXPECT_EQ(load_config_file(dir / "c.toml").analysis.subset_target_size, 6u);
}

}  // namespace
}  // namespace uqsched
