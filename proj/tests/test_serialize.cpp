#include <doctest.h>

#include "finvert/error.hpp"
#include "finvert/serialize.hpp"

using namespace finvert;

TEST_CASE("filter JSON") {
  CHECK(filter_from_json(Json::parse(R"({"coefficients": [1, 2.3, 1]})")).coefficients() ==
        std::vector<double>{1, 2.3, 1});
  CHECK(filter_from_json(Json::parse(R"({"half": [6.6, 4.3, 1]})")).coefficients() ==
        std::vector<double>{1, 4.3, 6.6, 4.3, 1});
  CHECK(filter_from_json(Json::parse(R"({"coefficients": [2, 5, 2]})")).gain() == 2.0);
  CHECK_THROWS_AS(filter_from_json(Json::parse(R"({"coefficients": [1, 2, 3]})")), Error);
  CHECK_THROWS_AS(filter_from_json(Json::parse(R"({"coefs": [1]})")), Error);
  CHECK_THROWS_AS(filter_from_json(Json::parse(R"({"coefficients": [1, "a", 1]})")), Error);
  const Filter f({1, 2.3, 1});
  CHECK(filter_from_json(filter_to_json(f)).coefficients() == f.coefficients());
}

TEST_CASE("kernel JSON") {
  const Kernel2D k = kernel_from_json(Json::parse(R"({"matrix": [[1, 2, 1], [2, 4, 2], [1, 2, 1]]})"));
  CHECK(k.width() == 3);
  CHECK(k.at(0, 0) == 4);
  const Kernel2D o = kernel_from_json(Json::parse(R"({"cs": [1, 2, 1], "ct": [1, 2, 1]})"));
  CHECK(o.values() == k.values());
  CHECK(kernel_from_json(kernel_to_json(k)).values() == k.values());
  CHECK_THROWS_AS(kernel_from_json(Json::parse(R"({"matrix": [[1, 2], [3]]})")), Error);
}

TEST_CASE("deterministic dump") {
  Json j{{"b", 0.1}, {"a", {1, 2}}, {"c", std::nan("")}, {"d", "x"}, {"e", true}, {"f", Json::object()}};
  const std::string s = dump_json(j);
  CHECK(s ==
        "{\n  \"a\": [\n    1,\n    2\n  ],\n  \"b\": 0.10000000000000001,\n  \"c\": null,\n  \"d\": \"x\",\n"
        "  \"e\": true,\n  \"f\": {}\n}\n");
  CHECK(Json::parse(s)["b"].get<double>() == 0.1);
  CHECK_THROWS_AS(read_json("/nonexistent/file.json"), Error);
}

TEST_CASE("inverse and decomposition JSON") {
  const auto inv = invert_elementary(2.3);
  const Json j = inverse_to_json(inv, {2.3});
  CHECK(j["metadata"]["pseudo"] == false);
  CHECK(j["metadata"]["p"][0].get<double>() == 2.3);
  CHECK(j["coefficients"].size() == inv.z.size());
  CHECK(filter_from_json(j).coefficients() == inv.z.values());

  const auto d = decompose(Filter({1, 4.3, 6.6, 4.3, 1}));
  const Json dj = decomposition_to_json(d);
  CHECK(dj["factors"].size() == 2);
  CHECK(dj["factors"][1]["class"] == "CriticalPlus");

  const ElementaryFactor cf{{1, 2}, 1, FactorClass::Invertible};
  const Json cj = factor_to_json(cf);
  CHECK(cj["p"]["re"] == 1.0);
  CHECK(cj["p"]["im"] == 2.0);
  CHECK(cj["conjugatePartner"] == 1);
}

TEST_CASE("report JSON") {
  const auto r = resolution_report(decompose(Filter({1, 1, 1})), 101);
  const Json j = report_to_json(r);
  CHECK(j["lengthLoss"] == 2);
  CHECK(j["nyquistBefore"]["den"] == 100);
  CHECK(j["nyquistAfter"]["num"] == 1);
  CHECK(j["nyquistAfter"]["den"] == 98);
  CHECK(j["decomposition"]["factors"][0]["class"] == "Oscillatory");
  CHECK(report_to_json(resolution_report(decompose(Filter({1, 1, 1})), 3))["nyquistAfter"].is_null());

  ComparisonRecord rec;
  rec.rmsDirect = 0.25;
  rec.runtimeRLMs = 12.5;
  CHECK_FALSE(comparison_to_json(rec, false).contains("runtimesMs"));
  CHECK(comparison_to_json(rec, true)["runtimesMs"]["rl"] == 12.5);
  CHECK(comparison_to_json(rec, false)["rmsDirect"] == 0.25);
}
