#include "pdattack/cli/scenario.hpp"

namespace pdattack::cli {

using nlohmann::json;

namespace {

json pendulum() {
  return {
      {"plant",
       {{"kind", "pendulum"}, {"c", 3.0001}, {"g", 29.4311 / 3.0001}, {"C", {{1, 0, 0, 0}, {0, 1, 0, 0}}}}},
      {"nominal",
       {{"A_n", {{0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}, {0, 29.4311, 0, 0}}},
        {"B_n", {{0}, {0}, {1}, {3.0001}}},
        {"K_n", {{3.7569, -29.6225, 4.0648, -5.4563}}}}},
      {"sim",
       {{"t_end", 10.0},
        {"dt_int", 1e-3},
        {"h_sample", 1e-2},
        {"t0", 0.0},
        {"t_f", 10.0},
        {"x0", {0, 0, 0, 0}},
        {"limits", {0.3, 0.8}},
        {"stop_on_limit", false}}},
      {"noise", {{"sigma_meas", 0.0}, {"seed", 1}}},
      {"detector", {{"epsilon", 3.1}}},
  };
}

json mapda(double z) {
  return {{"variant", "mapda_regulated"},
          {"Q", {{"identity", 1.0}}},
          {"Z", {{"identity", z}}},
          {"F_a0", {{"identity", 1.0}}},
          {"aux0", {{"fill", 1e-4}}}};
}

json tpda_nominal() { return {{"variant", "tpda_nominal"}, {"aux0", {{"fill", 1e-4}}}}; }

// 50 µs sampling; every 20th sample is exported.
json fine_sampling() {
  return {{"sim", {{"h_sample", 5e-5}, {"dt_int", 5e-5}}}, {"output", {{"csv_stride", 20}}}};
}

json with(json base, const json& patch) {
  base.merge_patch(patch);
  return base;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"pendulum",         "pendulum-tpda-nominal", "pendulum-mapda",   "pendulum-mapda-improper",
          "pendulum-compare", "pendulum-calibration",  "pendulum-check-ic", "pendulum-omega"};
}

json preset(const std::string& name) {
  if (name == "pendulum") return pendulum();
  if (name == "pendulum-tpda-nominal") return with(pendulum(), {{"attack", tpda_nominal()}});
  if (name == "pendulum-mapda") return with(with(pendulum(), fine_sampling()), {{"attack", mapda(1e4)}});
  if (name == "pendulum-mapda-improper") return with(with(pendulum(), fine_sampling()), {{"attack", mapda(0.5)}});
  if (name == "pendulum-compare") {
    json tpda = tpda_nominal();
    tpda["name"] = "tpda_nominal";
    json adaptive = mapda(1e4);
    adaptive["name"] = "mapda_regulated";
    return with(with(pendulum(), fine_sampling()), {{"attacks", {tpda, adaptive}}});
  }
  if (name == "pendulum-calibration") {
    return with(pendulum(), {{"sim", {{"t_end", 20.0}, {"t_f", 20.0}, {"x0", {0.05, 0.05, 0, 0}}}},
                             {"noise", {{"sigma_meas", 0.25}, {"seed", 1}}},
                             {"detector", {{"settle_time", 5.0}, {"calibrate", {{"n_runs", 500}, {"settle", 5.0}}}}}});
  }
  if (name == "pendulum-check-ic") {
    return with(pendulum(),
                {{"check_ic",
                  {{"x0", {{"fill", 1e-4}}},
                   {"X", {{1, 0, 0, 0}, {0, 0, 0.5, 0.5}, {0, 1, 0, 0}, {0, 0, -2.7125, 2.7125}}},
                   {"J", {{0, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, -5.425, 0}, {0, 0, 0, 5.425}}},
                   {"reconstruction_tolerance", 1e-4}}}});
  }
  if (name == "pendulum-omega") {
    const json base = pendulum();
    return with(base, {{"omega",
                        {{"A", base["nominal"]["A_n"]},
                         {"B", base["nominal"]["B_n"]},
                         {"K", base["nominal"]["K_n"]},
                         {"P1",
                          {{1.7760, -2.0855, 0.8362, -0.3231},
                           {-2.0855, 10.6948, -2.9413, 1.4742},
                           {0.8362, -2.9413, 1.0652, -0.4646},
                           {-0.3231, 1.4742, -0.4646, 0.2755}}},
                         {"P2", {{"identity", 0.1}}},
                         {"P3", {{"identity", 0.1}}},
                         {"P4", {{"identity", 0.01}}},
                         {"h", 1e-3}}}});
  }
  throw ConfigError("preset: unknown preset \"" + name + "\"");
}

}  // namespace pdattack::cli
