#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "bergman/errors.hpp"
#include "bergman/serialize.hpp"

using namespace bergman;

namespace {

const ConstructResult& result12() {
  static const ConstructResult r = construct_domain(ConstructConfig{});
  return r;
}

Point point(std::initializer_list<double> xs) {
  Point p;
  for (double x : xs) p.emplace_back(x);
  return p;
}

}  // namespace

TEST_CASE("coordinates keep every bit through a round trip") {
  const Coord x = Coord(1) + boost::multiprecision::ldexp(Coord(1), -200) - boost::multiprecision::ldexp(Coord(3), -700);
  const Coord back = coord_from_json(Json::parse(to_json(x).dump()));
  CHECK(back == x);
  CHECK(coord_from_json(Json(0.25)) == Coord(0.25));
  CHECK_THROWS_AS(coord_from_json(Json("x")), ParseError);
}

TEST_CASE("every primitive kind round-trips") {
  const AxisBox box{point({-1.0, 0.5}), point({0.0, 0.75})};
  const std::vector<Primitive> pieces{
      box,
      SphericalShell{2, 0.3, 1e-3},
      TailRegion{3, 2.5, 1.25},
      LogSimplexShell{2, 0.4, 1e-3, 0.05},
      BoxChainCorridor{"link", {box, AxisBox{point({0.0, 0.5}), point({1.0, 0.6})}}, point({-0.5, 0.6}),
                       point({0.5, 0.55})},
  };
  for (const auto& p : pieces) {
    const auto j = to_json(p);
    CHECK(to_json(primitive_from_json(Json::parse(j.dump()))) == j);
  }
  CHECK_THROWS_AS(primitive_from_json(Json{{"kind", "torus"}}), ParseError);
  CHECK_THROWS_AS(primitive_from_json(Json{{"kind", "tail"}}), ParseError);
}

TEST_CASE("a constructed domain round-trips to identical JSON") {
  const auto& d = result12().domain;
  const auto text = dump(to_json(d));
  const auto back = domain_from_json(Json::parse(text));
  CHECK(dump(to_json(back)) == text);
  CHECK(back.primitives().size() == d.primitives().size());
  CHECK(back.decomposition.L.isApprox(d.decomposition.L));
  CHECK(back.tau_star == d.tau_star);
}

TEST_CASE("decomposition files are validated") {
  const auto good = to_json(result12().domain.decomposition);
  CHECK_NOTHROW(decomposition_from_json(good));

  auto negative = good;
  negative["weights"][0] = -1.0;
  CHECK_THROWS_AS(decomposition_from_json(negative), ValidationError);

  auto zero = good;
  zero["weights"][1] = 0.0;
  CHECK_THROWS_AS(decomposition_from_json(zero), ValidationError);

  auto short_points = good;
  short_points["points"].erase(short_points["points"].begin());
  CHECK_THROWS_AS(decomposition_from_json(short_points), ValidationError);

  auto missing = good;
  missing.erase("weights");
  CHECK_THROWS_AS(decomposition_from_json(missing), ParseError);

  auto wrong_type = good;
  wrong_type["m"] = "one";
  CHECK_THROWS_AS(decomposition_from_json(wrong_type), ParseError);
}

TEST_CASE("solver report and iterate table") {
  const auto& r = result12();
  const auto j = to_json(r);
  CHECK(j.at("converged").get<bool>());
  CHECK(j.at("accepted_c").get<double>() == r.accepted_c);
  CHECK(j.at("log").size() == r.report.log.size());
  const auto csv = iterate_csv(r.report);
  CHECK(csv.rfind("iteration,residual,step,tau_0", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == r.report.log.size() + 1);
}

TEST_CASE("file helpers report I/O and parse failures") {
  const auto dir = std::filesystem::temp_directory_path() / "bergman_serialize_test";
  std::filesystem::create_directories(dir);
  CHECK_THROWS_AS(read_json_file(dir / "absent.json"), IoError);
  write_text_file(dir / "broken.json", "{\"a\": [1, 2");
  CHECK_THROWS_AS(read_json_file(dir / "broken.json"), ParseError);
  CHECK_THROWS_AS(write_text_file(dir / "no" / "such" / "dir.json", "{}"), IoError);
  std::filesystem::remove_all(dir);
}
