#include "coalrec/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "coalrec/errors.hpp"

namespace coalrec {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ModelValidationError(path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field \"") + key + "\"");
  return *it;
}

double real_at(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number, got " + v.dump());
  return v.get<double>();
}

int positive_int_at(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer, got " + v.dump());
  const auto x = v.get<long long>();
  if (x < 1) fail(path, "must be a positive integer, got " + std::to_string(x));
  if (x > 1'000'000) fail(path, "value " + std::to_string(x) + " is too large");
  return static_cast<int>(x);
}

LocusModel parse_locus(const json& obj, const std::string& path) {
  const int k = positive_int_at(require(obj, "K", path), path + ".K");
  if (k < 2) fail(path + ".K", "needs at least 2 alleles");
  const double theta = real_at(require(obj, "theta", path), path + ".theta");
  if (!(theta > 0.0)) fail(path + ".theta", "must be positive");

  const json& rows = require(obj, "P", path);
  if (!rows.is_array() || rows.size() != static_cast<std::size_t>(k))
    fail(path + ".P", "expected " + std::to_string(k) + " rows");
  Eigen::MatrixXd transition(k, k);
  for (int a = 0; a < k; ++a) {
    const std::string row_path = path + ".P[" + std::to_string(a) + "]";
    const json& row = rows[static_cast<std::size_t>(a)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(k))
      fail(row_path, "expected " + std::to_string(k) + " entries");
    for (int b = 0; b < k; ++b)
      transition(a, b) = real_at(row[static_cast<std::size_t>(b)], row_path + "[" + std::to_string(b) + "]");
  }

  std::optional<std::vector<double>> pi;
  if (auto it = obj.find("pi"); it != obj.end()) {
    if (!it->is_array() || it->size() != static_cast<std::size_t>(k))
      fail(path + ".pi", "expected " + std::to_string(k) + " entries");
    pi.emplace();
    for (int a = 0; a < k; ++a)
      pi->push_back(real_at((*it)[static_cast<std::size_t>(a)], path + ".pi[" + std::to_string(a) + "]"));
  }

  try {
    return LocusModel::create(theta, std::move(transition), std::move(pi));
  } catch (const ModelValidationError& e) {
    fail(path, e.what());
  }
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelValidationError(path + ": " + e.what());
  }
}

}  // namespace

ModelParams parse_model(const json& doc) {
  const json& loci = require(doc, "loci", "model");
  if (!loci.is_array()) fail("model.loci", "expected an array");
  std::vector<LocusModel> models;
  for (std::size_t l = 0; l < loci.size(); ++l)
    models.push_back(parse_locus(loci[l], "model.loci[" + std::to_string(l) + "]"));

  const json& r_doc = require(doc, "r", "model");
  if (!r_doc.is_array()) fail("model.r", "expected an array");
  std::vector<double> r;
  for (std::size_t l = 0; l < r_doc.size(); ++l) {
    const std::string p = "model.r[" + std::to_string(l) + "]";
    r.push_back(real_at(r_doc[l], p));
    if (!(r.back() > 0.0)) fail(p, "must be positive");
  }

  std::optional<double> rho;
  if (auto it = doc.find("rho"); it != doc.end() && !it->is_null()) {
    rho = real_at(*it, "model.rho");
    if (!(*rho > 0.0)) fail("model.rho", "must be positive");
  }
  try {
    return ModelParams::create(std::move(models), std::move(r), rho);
  } catch (const ModelValidationError& e) {
    fail("model", e.what());
  }
}

SampleConfig parse_sample(const json& doc, const ModelParams& params) {
  const json& list = require(doc, "sample", "sample");
  if (!list.is_array() || list.empty()) fail("sample.sample", "expected a non-empty array");
  const std::size_t num_loci = params.num_loci();
  SampleConfig n(num_loci);
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "sample.sample[" + std::to_string(i) + "]";
    const json& hap = require(list[i], "haplotype", path);
    if (!hap.is_array() || hap.size() != num_loci)
      fail(path + ".haplotype", "expected " + std::to_string(num_loci) + " entries");
    std::vector<Allele> alleles;
    for (std::size_t l = 0; l < num_loci; ++l) {
      const std::string p = path + ".haplotype[" + std::to_string(l) + "]";
      const json& v = hap[l];
      if (v.is_string() && v.get<std::string>() == "*") {
        alleles.push_back(kUnspecified);
        continue;
      }
      if (!v.is_number_integer()) fail(p, "expected a 1-based allele or \"*\", got " + v.dump());
      const auto a = v.get<long long>();
      const int k = params.alleles_per_locus()[l];
      if (a < 1 || a > k)
        fail(p, "allele " + std::to_string(a) + " outside 1.." + std::to_string(k));
      alleles.push_back(static_cast<Allele>(a - 1));
    }
    Haplotype h(std::move(alleles));
    if (h.is_sentinel()) fail(path + ".haplotype", "at least one locus must be specified");
    n.add(h, positive_int_at(require(list[i], "count", path), path + ".count"));
  }
  return n;
}

ModelParams load_model(const std::string& path) { return parse_model(read_json(path)); }

SampleConfig load_sample(const std::string& path, const ModelParams& params) {
  return parse_sample(read_json(path), params);
}

json model_to_json(const ModelParams& params) {
  json loci = json::array();
  for (const auto& m : params.loci()) {
    json rows = json::array();
    for (Eigen::Index a = 0; a < m.transition().rows(); ++a) {
      json row = json::array();
      for (Eigen::Index b = 0; b < m.transition().cols(); ++b) row.push_back(m.transition()(a, b));
      rows.push_back(std::move(row));
    }
    loci.push_back({{"K", m.num_alleles()}, {"theta", m.theta()}, {"P", rows}, {"pi", m.pi()}});
  }
  json doc = {{"loci", loci}, {"r", params.r()}};
  if (params.rho()) doc["rho"] = *params.rho();
  return doc;
}

json sample_to_json(const SampleConfig& n) {
  json list = json::array();
  for (const auto& e : n.entries()) {
    json hap = json::array();
    for (Allele a : e.haplotype.alleles()) {
      if (a == kUnspecified)
        hap.push_back("*");
      else
        hap.push_back(a + 1);
    }
    list.push_back({{"haplotype", hap}, {"count", e.count}});
  }
  return {{"sample", list}};
}

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace coalrec
