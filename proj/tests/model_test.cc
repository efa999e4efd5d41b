#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "offload/model.h"

namespace offload {
namespace {

TEST(Config, DefaultsAreReferenceSetting) {
  const SystemConfig cfg = ValidateConfig(nlohmann::json::object());
  EXPECT_EQ(cfg.num_ue, 115);
  EXPECT_EQ(cfg.num_es, 6);
  EXPECT_EQ(cfg.num_subchannels, 100);
  EXPECT_DOUBLE_EQ(cfg.bandwidth, 10e6);
}

TEST(Config, AcceptsReferenceValues) {
  const auto cfg = ValidateConfig(
      {{"num_ue", 115}, {"num_es", 6}, {"bandwidth", 10e6},
       {"num_subchannels", 100}});
  EXPECT_EQ(cfg.num_ue, 115);
  EXPECT_EQ(cfg.num_es, 6);
}

TEST(Config, NormalizesCostWeights) {
  const auto cfg = ValidateConfig({{"latency_weight", 2}, {"price_weight", 2}});
  EXPECT_DOUBLE_EQ(cfg.latency_weight, 0.5);
  EXPECT_DOUBLE_EQ(cfg.price_weight, 0.5);
}

TEST(Config, RejectsIncentiveFactorOfOne) {
  try {
    ValidateConfig({{"incentive_factor", 1.0}});
    FAIL() << "expected a range error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "incentive_factor");
  }
}

TEST(Config, NamesTheOffendingField) {
  try {
    ValidateConfig({{"num_es", "six"}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "num_es");
  }
  try {
    ValidateConfig({{"no_such_key", 1}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "no_such_key");
  }
  EXPECT_THROW(ValidateConfig({{"num_es", -1}}), ConfigError);
  EXPECT_THROW(ValidateConfig({{"deadline_min", 80}, {"deadline_max", 75}}),
               ConfigError);
  EXPECT_THROW(ValidateConfig({{"winner_mode", "fastest"}}), ConfigError);
  EXPECT_THROW(ValidateConfig(nlohmann::json::array()), ConfigError);
}

TEST(Config, RoundTripsThroughJson) {
  SystemConfig cfg;
  cfg.winner_mode = WinnerMode::kGreedy;
  cfg.incentive_factor = 0.3;
  cfg.seed = 42;
  EXPECT_TRUE(ValidateConfig(SerializeConfig(cfg)) == cfg);
}

TEST(Config, LoadsFromFile) {
  const std::string path = ::testing::TempDir() + "/offload_cfg.json";
  {
    std::ofstream out(path);
    out << R"({"num_tasks": 2000, "placement": "fixed"})";
  }
  const auto cfg = LoadConfigFile(path);
  EXPECT_EQ(cfg.num_tasks, 2000);
  EXPECT_EQ(cfg.placement, Placement::kFixed);
  std::remove(path.c_str());
  EXPECT_THROW(LoadConfigFile(path), ConfigError);
}

TEST(Units, DbmConversions) {
  EXPECT_NEAR(DbmPerHzToWatts(-174, 10e6), 3.981e-14, 1e-16);
  EXPECT_NEAR(DbmPerHzToWatts(-30, 1), 1e-6, 1e-18);
  EXPECT_NEAR(DbmPerHzToWatts(0, 1), 1e-3, 1e-15);
  EXPECT_NEAR(DbmToWatts(35), 3.1623, 1e-4);
}

TEST(Entities, ValidateRanges) {
  Task t{.len = 1e6, .complexity = 1000, .deadline = 10, .split = 0.5};
  EXPECT_NO_THROW(t.Validate());
  t.split = 1.5;
  EXPECT_THROW(t.Validate(), std::invalid_argument);
  t.split = 0.5;
  t.len = 0;
  EXPECT_THROW(t.Validate(), std::invalid_argument);

  UserEquipment ue;
  ue.offload_prob = 1.2;
  EXPECT_THROW(ue.Validate(), std::invalid_argument);

  EdgeServer es;
  es.capacity = 4;
  es.available = 5;
  EXPECT_THROW(es.Validate(), std::invalid_argument);
  es.available = 4;
  EXPECT_NO_THROW(es.Validate());
}

TEST(Geometry, Distance) {
  EXPECT_DOUBLE_EQ(Distance({0, 0}, {3, 4}), 5.0);
}

}  // namespace
}  // namespace offload
