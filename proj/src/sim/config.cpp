#include "lsamarl/sim/config.hpp"

#include <array>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <sstream>

namespace lsamarl::sim {

namespace pt = boost::property_tree;

namespace {

constexpr std::array<std::pair<FeatureMask, std::string_view>, 5> kMaskNames = {{
    {FeatureMask::kFull, "full"},
    {FeatureMask::kNoPosition, "no_position"},
    {FeatureMask::kNoPresencePriority, "no_presence_priority"},
    {FeatureMask::kNoVelocity, "no_velocity"},
    {FeatureMask::kAddAngles, "add_angles"},
}};

// Calls f(key, field) for every numeric field; key is "section.name".
template <typename Cfg, typename F>
void visit_fields(Cfg& c, F&& f) {
  f("scenario.n_cav", c.n_cav);
  f("scenario.n_hdv", c.n_hdv);
  f("scenario.n_obs", c.n_obs);
  f("scenario.horizon", c.horizon);
  f("scenario.seed", c.seed);
  f("sensing.radius", c.sensing_radius);
  f("timing.policy_period", c.policy_period);
  f("timing.substeps", c.substeps);
  f("road.highway_length", c.road.highway_length);
  f("road.lane_width", c.road.lane_width);
  f("road.merge_start", c.road.merge_start);
  f("road.merge_end", c.road.merge_end);
  f("vehicle.length", c.vehicle.length);
  f("vehicle.width", c.vehicle.width);
  f("vehicle.v_max", c.vehicle.v_max);
  f("vehicle.hdv_target_speed", c.vehicle.hdv_target_speed);
  f("vehicle.stall_speed", c.vehicle.stall_speed);
  f("vehicle.speed_step", c.vehicle.speed_step);
  f("vehicle.reward_speed_min", c.vehicle.reward_speed_min);
  f("vehicle.cav_speed_gain", c.vehicle.cav_speed_gain);
  f("vehicle.cav_accel_max", c.vehicle.cav_accel_max);
  f("vehicle.cav_decel_max", c.vehicle.cav_decel_max);
  f("idm.accel_max", c.idm.accel_max);
  f("idm.comfort_decel", c.idm.comfort_decel);
  f("idm.time_headway", c.idm.time_headway);
  f("idm.jam_gap", c.idm.jam_gap);
  f("idm.exponent", c.idm.exponent);
  f("idm.decel_limit", c.idm.decel_limit);
  f("idm.lookahead", c.idm.lookahead);
  f("mobil.politeness_hdv", c.mobil.politeness_hdv);
  f("mobil.politeness_pv", c.mobil.politeness_pv);
  f("mobil.safe_decel", c.mobil.safe_decel);
  f("mobil.threshold", c.mobil.threshold);
  f("reward.w_speed", c.reward.speed);
  f("reward.w_crash", c.reward.crash);
  f("reward.w_stall", c.reward.stall);
  f("reward.w_weave", c.reward.weave);
  f("reward.w_pv", c.reward.pv);
  f("reward.offset", c.reward.offset);
  f("reward.d_pv", c.reward.pv_headway);
  f("spawn.highway_x_min", c.spawn.highway_x_min);
  f("spawn.highway_x_max", c.spawn.highway_x_max);
  f("spawn.ramp_x_min", c.spawn.ramp_x_min);
  f("spawn.ramp_x_max", c.spawn.ramp_x_max);
  f("spawn.spacing", c.spawn.spacing);
  f("spawn.pv_x", c.spawn.pv_x);
  f("spawn.cav_speed_min", c.spawn.cav_speed_min);
  f("spawn.cav_speed_max", c.spawn.cav_speed_max);
  f("spawn.hdv_speed_min", c.spawn.hdv_speed_min);
  f("spawn.hdv_speed_max", c.spawn.hdv_speed_max);
  f("spawn.pv_speed", c.spawn.pv_speed);
}

template <typename T>
std::string format_number(T v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("invalid value for " + key + ": '" + text + "'");
  }
  return v;
}

ScenarioConfig from_tree(const pt::ptree& tree) {
  ScenarioConfig cfg;
  if (auto id = tree.get_optional<std::string>("scenario.id")) {
    cfg = ScenarioConfig::preset(parse_number<int>("scenario.id", *id));
  }
  for (const auto& [section, body] : tree) {
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      bool known = full == "scenario.id" || full == "observation.feature_mask";
      visit_fields(cfg, [&](std::string_view name, auto&) { known = known || name == full; });
      if (!known) throw ConfigError("unknown configuration key: " + full);
    }
  }
  visit_fields(cfg, [&](std::string_view name, auto& field) {
    if (auto text = tree.get_optional<std::string>(pt::ptree::path_type(std::string(name), '.'))) {
      field = parse_number<std::remove_reference_t<decltype(field)>>(std::string(name), *text);
    }
  });
  if (auto mask = tree.get_optional<std::string>("observation.feature_mask")) {
    try {
      cfg.feature_mask = parse_feature_mask(*mask);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace

std::string_view to_string(FeatureMask mask) {
  for (const auto& [m, name] : kMaskNames) {
    if (m == mask) return name;
  }
  return "unknown";
}

FeatureMask parse_feature_mask(std::string_view name) {
  for (const auto& [m, n] : kMaskNames) {
    if (n == name) return m;
  }
  throw std::invalid_argument("unknown feature mask '" + std::string(name) +
                              "' (expected full, no_position, no_presence_priority, no_velocity, add_angles)");
}

void RoadGeometry::validate() const {
  if (!(lane_width > 0.0)) throw ConfigError("lane width must be positive");
  if (!(merge_start < merge_end && merge_end < highway_length)) {
    throw ConfigError("road geometry requires merge_start < merge_end < highway_length");
  }
}

ScenarioConfig ScenarioConfig::preset(int id) {
  struct Row {
    int cav, hdv, n;
  };
  static constexpr std::array<Row, 5> kRows = {{{2, 4, 4}, {3, 3, 4}, {4, 2, 6}, {4, 4, 6}, {6, 6, 6}}};
  if (id < 1 || id > 5) throw ConfigError("scenario id must be in 1..5, got " + std::to_string(id));
  ScenarioConfig cfg;
  cfg.scenario_id = id;
  cfg.n_cav = kRows[id - 1].cav;
  cfg.n_hdv = kRows[id - 1].hdv;
  cfg.n_obs = kRows[id - 1].n;
  return cfg;
}

void ScenarioConfig::validate() const {
  road.validate();
  if (n_cav < 1) throw ConfigError("at least one CAV is required");
  if (n_hdv < 0) throw ConfigError("HDV count must be non-negative");
  if (n_obs < 1) throw ConfigError("N must be at least 1");
  if (horizon < 1) throw ConfigError("horizon must be positive");
  if (substeps < 1 || !(policy_period > 0.0)) throw ConfigError("timing must be positive");
  if (!(sensing_radius > 0.0)) throw ConfigError("sensing radius must be positive");
  if (!(vehicle.v_max > 0.0) || !(vehicle.length > 0.0) || !(vehicle.width > 0.0)) {
    throw ConfigError("vehicle dimensions and v_max must be positive");
  }
  if (!(vehicle.reward_speed_min < vehicle.v_max)) throw ConfigError("reward_speed_min must be below v_max");
  if (vehicle.pv_target_speed() > vehicle.v_max) throw ConfigError("PV target speed exceeds v_max");
  if (!(spawn.spacing >= vehicle.length)) throw ConfigError("spawn spacing smaller than a vehicle");
  if (!(reward.pv_headway > 0.0)) throw ConfigError("d_pv must be positive");
}

ScenarioConfig parse_scenario_config(std::string_view text) {
  std::istringstream in{std::string(text)};
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return from_tree(tree);
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_config(buf.str());
}

std::string format_scenario_config(const ScenarioConfig& cfg) {
  pt::ptree tree;
  tree.put("scenario.id", cfg.scenario_id);
  visit_fields(cfg, [&](std::string_view name, const auto& field) {
    tree.put(pt::ptree::path_type(std::string(name), '.'), format_number(field));
  });
  tree.put("observation.feature_mask", std::string(to_string(cfg.feature_mask)));
  std::ostringstream out;
  pt::write_ini(out, tree);
  return out.str();
}

void save_scenario_config(const std::filesystem::path& path, const ScenarioConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << format_scenario_config(cfg);
}

}  // namespace lsamarl::sim
