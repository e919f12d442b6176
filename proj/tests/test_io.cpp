#include <cstdio>
#include <filesystem>
#include <fstream>

#include "coalrec/errors.hpp"
#include "coalrec/io.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace coalrec;
using coalrec::test::hap;
using coalrec::test::sample;
using nlohmann::json;

namespace {

json model_doc() {
  return json::parse(R"({
    "loci": [
      {"K": 2, "theta": 0.8, "P": [[0.7, 0.3], [0.1, 0.9]]},
      {"K": 3, "theta": 1.5, "P": [[0.2, 0.3, 0.5], [0.2, 0.3, 0.5], [0.2, 0.3, 0.5]], "pi": [0.2, 0.3, 0.5]}
    ],
    "r": [2.5],
    "rho": 40
  })");
}

std::string error_of(const json& model) {
  try {
    (void)parse_model(model);
  } catch (const ModelValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("model parsing") {
  const ModelParams params = parse_model(model_doc());
  CHECK(params.num_loci() == 2);
  CHECK(params.alleles_per_locus() == std::vector<int>{2, 3});
  CHECK(params.rho() == 40.0);
  CHECK(params.locus(1).is_pim());
  CHECK(params.locus(0).pi()[0] == doctest::Approx(0.25));

  json no_rho = model_doc();
  no_rho.erase("rho");
  CHECK_FALSE(parse_model(no_rho).rho().has_value());
}

TEST_CASE("model errors name the field") {
  json bad = model_doc();
  bad["loci"][0]["P"][1] = {0.5, 0.6};
  CHECK(error_of(bad).find("model.loci[0]") != std::string::npos);

  bad = model_doc();
  bad["r"] = json::array();
  CHECK(error_of(bad).find("model") != std::string::npos);

  bad = model_doc();
  bad["r"][0] = -1.0;
  CHECK(error_of(bad).find("model.r[0]") != std::string::npos);

  bad = model_doc();
  bad["loci"][1]["pi"] = {0.3, 0.3, 0.4};
  CHECK(error_of(bad).find("model.loci[1]") != std::string::npos);

  bad = model_doc();
  bad["loci"][0]["theta"] = "fast";
  CHECK(error_of(bad).find("model.loci[0].theta") != std::string::npos);

  bad = model_doc();
  bad["loci"].erase(1);
  CHECK_FALSE(error_of(bad).empty());
}

TEST_CASE("sample parsing") {
  const ModelParams params = parse_model(model_doc());
  const json doc = json::parse(R"({"sample": [
    {"haplotype": [1, 3], "count": 2},
    {"haplotype": [2, "*"], "count": 1},
    {"haplotype": [1, 3], "count": 1}
  ]})");
  CHECK(parse_sample(doc, params) == sample({{"1,3", 3}, {"2,*", 1}}));

  auto error_for = [&](const char* text) -> std::string {
    try {
      (void)parse_sample(json::parse(text), params);
    } catch (const ModelValidationError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(error_for(R"({"sample": [{"haplotype": [1, 1], "count": 1}, {"haplotype": [2, "*"], "count": -1}]})")
            .find("sample.sample[1].count") != std::string::npos);
  CHECK(error_for(R"({"sample": [{"haplotype": [1, 4], "count": 1}]})").find("sample.sample[0].haplotype[1]") !=
        std::string::npos);
  CHECK(error_for(R"({"sample": [{"haplotype": ["*", "*"], "count": 1}]})").find("sample.sample[0]") !=
        std::string::npos);
  CHECK(error_for(R"({"sample": [{"haplotype": [1], "count": 1}]})").find("sample.sample[0].haplotype") !=
        std::string::npos);
  CHECK_FALSE(error_for(R"({"sample": []})").empty());
}

TEST_CASE("round trip") {
  const ModelParams params = parse_model(model_doc());
  const ModelParams again = parse_model(model_to_json(params));
  CHECK(again.r() == params.r());
  CHECK(again.rho() == params.rho());
  for (std::size_t l = 0; l < 2; ++l) {
    CHECK(again.locus(l).theta() == params.locus(l).theta());
    CHECK(again.locus(l).transition() == params.locus(l).transition());
    CHECK(again.locus(l).pi() == params.locus(l).pi());
  }

  const SampleConfig n = sample({{"1,3", 2}, {"*,2", 1}, {"2,1", 4}});
  CHECK(parse_sample(sample_to_json(n), params) == n);
}

TEST_CASE("files") {
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError);

  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "coalrec_test_io_model.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_model(path.string()), ModelValidationError);
  {
    std::ofstream out(path);
    out << model_doc().dump();
  }
  CHECK(load_model(path.string()).num_loci() == 2);
  std::filesystem::remove(path);
}

TEST_CASE("number formatting") {
  CHECK(format_real(0.015625) == "0.015625");
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(100.0) == "100");
}
