#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "posegate/presets.hpp"

using namespace posegate;

TEST_CASE("published scene settings") {
  CHECK(ScenePresets().size() == 20);
  struct Row {
    const char* key;
    double d_th;
    std::size_t gamma;
    double ratio;
  };
  const Row rows[] = {
      {"chess/dfnet", 0.15, 30, 0.7},    {"fire/dfnet", 0.30, 40, 0.7},     {"heads/dfnet", 0.20, 30, 0.7},
      {"office/dfnet", 0.20, 30, 0.7},   {"pumpkin/dfnet", 0.20, 40, 0.7},  {"stairs/dfnet", 0.20, 20, 0.7},
      {"chess/dfnet_dm", 0.15, 30, 0.7}, {"fire/dfnet_dm", 0.30, 40, 0.7},  {"heads/dfnet_dm", 0.20, 30, 0.7},
      {"office/dfnet_dm", 0.25, 20, 0.7}, {"pumpkin/dfnet_dm", 0.20, 20, 0.7}, {"stairs/dfnet_dm", 0.25, 20, 0.7},
      {"kings/ms-t", 1.5, 25, 0.7},      {"hospital/ms-t", 1.5, 15, 0.5},   {"shop/ms-t", 1.5, 20, 0.7},
      {"church/ms-t", 1.5, 30, 0.7},     {"kings/dfnet_dm", 2.0, 30, 0.7},  {"hospital/dfnet_dm", 2.0, 15, 0.5},
      {"shop/dfnet_dm", 1.5, 20, 0.7},   {"church/dfnet_dm", 1.5, 30, 0.7},
  };
  for (const Row& r : rows) {
    const auto p = FindPreset(r.key);
    REQUIRE_MESSAGE(p.has_value(), r.key);
    CHECK(p->d_th == r.d_th);
    CHECK(p->gamma == r.gamma);
    CHECK(p->ratio == r.ratio);
  }
}

TEST_CASE("preset lookup") {
  CHECK(FindPreset("Chess")->model == "dfnet");
  CHECK(FindPreset("HOSPITAL")->ratio == 0.5);
  CHECK_FALSE(FindPreset("atrium").has_value());
  CHECK_FALSE(FindPreset("chess/ms-t").has_value());
}
