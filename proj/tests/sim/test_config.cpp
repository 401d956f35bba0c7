#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>

#include "lsamarl/sim/config.hpp"
#include "lsamarl/sim/env.hpp"
#include "lsamarl/sim/world.hpp"

using namespace lsamarl::sim;

TEST_CASE("presets follow the scenario table") {
  struct Row {
    int cav, hdv, n;
  };
  const std::array<Row, 5> table{{{2, 4, 4}, {3, 3, 4}, {4, 2, 6}, {4, 4, 6}, {6, 6, 6}}};
  for (int id = 1; id <= 5; ++id) {
    CAPTURE(id);
    const auto cfg = ScenarioConfig::preset(id);
    CHECK(cfg.scenario_id == id);
    CHECK(cfg.n_cav == table[id - 1].cav);
    CHECK(cfg.n_hdv == table[id - 1].hdv);
    CHECK(cfg.n_obs == table[id - 1].n);
    CHECK(cfg.horizon == 120);
    CHECK(cfg.n_features() == 6);
  }
  CHECK_THROWS_AS(ScenarioConfig::preset(0), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::preset(6), ConfigError);
}

TEST_CASE("design constants keep their documented defaults") {
  const ScenarioConfig cfg;
  CHECK(cfg.road.highway_length == 520.0);
  CHECK(cfg.road.lane_width == 4.0);
  CHECK(cfg.road.merge_start == 200.0);
  CHECK(cfg.road.merge_end == 310.0);
  CHECK(cfg.sensing_radius == 90.0);
  CHECK(cfg.substeps == 15);
  CHECK(cfg.policy_period == 1.0);
  CHECK(cfg.vehicle.v_max == 30.0);
  CHECK(cfg.vehicle.pv_target_speed() == 30.0);
  CHECK(cfg.vehicle.stall_speed == 5.0);
  CHECK(cfg.vehicle.speed_step == 5.0);
  CHECK(cfg.idm.accel_max == 3.0);
  CHECK(cfg.idm.comfort_decel == 5.0);
  CHECK(cfg.idm.time_headway == 1.5);
  CHECK(cfg.idm.jam_gap == 2.0);
  CHECK(cfg.idm.exponent == 4.0);
  CHECK(cfg.mobil.politeness_hdv == 0.3);
  CHECK(cfg.mobil.politeness_pv == 0.0);
  CHECK(cfg.mobil.safe_decel == 4.0);
  CHECK(cfg.reward.speed == 0.5);
  CHECK(cfg.reward.crash == 2.0);
  CHECK(cfg.reward.stall == 0.5);
  CHECK(cfg.reward.weave == 0.1);
  CHECK(cfg.reward.pv == 0.5);
  CHECK(cfg.reward.offset == 0.5);
  CHECK(cfg.reward.pv_headway == 40.0);
}

TEST_CASE("reset spawns every vehicle of the scenario") {
  for (int id = 1; id <= 5; ++id) {
    CAPTURE(id);
    const auto cfg = ScenarioConfig::preset(id);
    HighwayEnv env(cfg);
    const auto obs = env.reset(7);
    const auto& vs = env.state().vehicles;
    REQUIRE(static_cast<int>(vs.size()) == cfg.n_cav + cfg.n_hdv + 1);
    CHECK(static_cast<int>(obs.size()) == cfg.n_cav);
    int cavs = 0, hdvs = 0, pvs = 0, ramp = 0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      CHECK(vs[i].id == static_cast<int>(i));
      cavs += vs[i].kind == VehicleKind::kCav;
      hdvs += vs[i].kind == VehicleKind::kHdv;
      pvs += vs[i].kind == VehicleKind::kPv;
      if (vs[i].kind == VehicleKind::kCav && vs[i].lane == RoadGeometry::kRampLane) ++ramp;
      if (vs[i].kind != VehicleKind::kCav) CHECK(vs[i].lane != RoadGeometry::kRampLane);
    }
    CHECK(cavs == cfg.n_cav);
    CHECK(hdvs == cfg.n_hdv);
    CHECK(pvs == 1);
    CHECK(ramp == cfg.ramp_cavs());
    CHECK(ramp >= 1);
    const auto& pv = vs.back();
    CHECK(pv.kind == VehicleKind::kPv);
    CHECK(pv.lane == RoadGeometry::kLeftLane);
    for (const auto& v : vs) {
      if (v.kind != VehicleKind::kPv) CHECK(v.x > pv.x);
    }
    CHECK(collision_check(env.state(), cfg.vehicle).empty());
    for (const auto& o : obs) {
      CHECK(o.rows() == static_cast<std::size_t>(cfg.n_obs));
      CHECK(o.cols() == 6);
      CHECK(o(0, 0) == 1.0);
    }
  }
}

TEST_CASE("reset is a pure function of the seed") {
  HighwayEnv a(ScenarioConfig::preset(4)), b(ScenarioConfig::preset(4));
  a.reset(11);
  b.reset(11);
  CHECK(a.state() == b.state());
  b.reset(12);
  CHECK_FALSE(a.state() == b.state());
  std::set<double> first_x;
  for (std::uint64_t s = 0; s < 20; ++s) first_x.insert(initial_state(ScenarioConfig::preset(4), s).vehicles[0].x);
  CHECK(first_x.size() > 1);
}

TEST_CASE("spawn ranges that cannot hold the traffic are rejected") {
  auto cfg = ScenarioConfig::preset(5);
  cfg.spawn.highway_x_max = cfg.spawn.highway_x_min + cfg.spawn.spacing;
  CHECK_THROWS_AS(HighwayEnv(cfg).reset(0), ConfigError);
  auto ramp = ScenarioConfig::preset(1);
  ramp.spawn.ramp_x_max = ramp.spawn.ramp_x_min - 1.0;
  CHECK_THROWS_AS(initial_state(ramp, 0), ConfigError);
}

TEST_CASE("invalid configurations are rejected") {
  auto bad = [](auto mutate) {
    ScenarioConfig cfg = ScenarioConfig::preset(1);
    mutate(cfg);
    return cfg;
  };
  CHECK_THROWS_AS(bad([](auto& c) { c.n_cav = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.n_obs = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.horizon = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.road.merge_end = c.road.merge_start; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.road.merge_end = c.road.highway_length + 1; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.substeps = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(HighwayEnv(bad([](auto& c) { c.sensing_radius = 0; })), ConfigError);
}

TEST_CASE("text configuration round-trips every key") {
  auto cfg = ScenarioConfig::preset(3);
  cfg.n_obs = 5;
  cfg.horizon = 77;
  cfg.seed = 1234567890123ULL;
  cfg.reward.crash = 1.75;
  cfg.spawn.spacing = 25.0 + (0.1 + 0.2);  // needs all 17 digits to round-trip
  cfg.feature_mask = FeatureMask::kNoVelocity;
  const auto text = format_scenario_config(cfg);
  const auto back = parse_scenario_config(text);
  CHECK(back.n_obs == 5);
  CHECK(back.horizon == 77);
  CHECK(back.seed == cfg.seed);
  CHECK(back.reward.crash == 1.75);
  CHECK(back.spawn.spacing == cfg.spawn.spacing);
  CHECK(back.feature_mask == FeatureMask::kNoVelocity);
  CHECK(format_scenario_config(back) == text);

  const auto path = std::filesystem::temp_directory_path() / "lsamarl_cfg_roundtrip.ini";
  save_scenario_config(path, cfg);
  CHECK(format_scenario_config(load_scenario_config(path)) == text);
  std::filesystem::remove(path);
}

TEST_CASE("text configuration starts from the named preset") {
  const auto cfg = parse_scenario_config("[scenario]\nid = 5\n\n[reward]\nw_pv = 0.25\n");
  CHECK(cfg.n_cav == 6);
  CHECK(cfg.n_hdv == 6);
  CHECK(cfg.n_obs == 6);
  CHECK(cfg.reward.pv == 0.25);
  CHECK(cfg.reward.crash == 2.0);
  const auto add = parse_scenario_config("[observation]\nfeature_mask = add_angles\n");
  CHECK(add.n_features() == 8);
}

TEST_CASE("text configuration reports bad input") {
  CHECK_THROWS_AS(parse_scenario_config("[scenario]\nn_cavs = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario_config("[reward]\nw_crash = heavy\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario_config("[scenario]\nid = 9\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario_config("[observation]\nfeature_mask = everything\n"), std::exception);
  CHECK_THROWS_AS(load_scenario_config("/nonexistent/dir/cfg.ini"), ConfigError);
}

TEST_CASE("feature mask names") {
  for (auto m : {FeatureMask::kFull, FeatureMask::kNoPosition, FeatureMask::kNoPresencePriority,
                 FeatureMask::kNoVelocity, FeatureMask::kAddAngles}) {
    CHECK(parse_feature_mask(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_feature_mask("no_angles"), std::invalid_argument);
}
