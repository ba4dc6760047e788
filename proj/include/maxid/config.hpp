#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxid/errors.hpp"
#include "maxid/model.hpp"
#include "maxid/sites.hpp"

namespace maxid {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum class MethodKind { exact_ars, exact_mh, naive };

struct Method {
  MethodKind kind = MethodKind::exact_ars;
  int naive_n = 100;

  std::string str() const {
    switch (kind) {
      case MethodKind::exact_ars: return "exact-ars";
      case MethodKind::exact_mh: return "exact-mh";
      case MethodKind::naive: return "naive:" + std::to_string(naive_n);
    }
    return "?";
  }

  static Method parse(const std::string& s) {
    if (s == "exact-ars") return {MethodKind::exact_ars, 0};
    if (s == "exact-mh") return {MethodKind::exact_mh, 0};
    if (s.rfind("naive:", 0) == 0) {
      const int n = std::stoi(s.substr(6));
      if (n < 1) throw ConfigError("method naive:<n> needs n >= 1");
      return {MethodKind::naive, n};
    }
    throw ConfigError("unknown method '" + s +
                      "' (expected exact-ars | exact-mh | naive:<n>)");
  }

  bool operator==(const Method&) const = default;
};

// Plain serializable run configuration; mirrors the JSON schema one-to-one.
struct RunConfig {
  // model
  std::string mixture = "scale";
  double alpha = 1.0;
  double beta = 1.0;   // scale mixture
  double beta1 = 1.0;  // location mixture
  double beta2 = 1.0;
  std::string correlation_kind = "stationary-exponential";
  double rate = 1.0;            // stationary-exponential
  std::string lambda_id = "constant:0.5";  // magnitude-scaled
  double nu = 0.0;
  double mh_sigma = 1.0;
  int mh_iterations = 100;

  // sites
  std::vector<int> grid;                       // [n1, n2]; empty if coords
  std::vector<std::vector<double>> coords;     // explicit site list
  std::string ordering = "coordinate-wise";

  // run
  long replicates = 1000;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  Method method;

  // output
  std::string out_dir = "out";
  std::vector<std::string> formats = {"csv"};

  bool operator==(const RunConfig&) const = default;

  // -- construction of runtime objects ------------------------------------

  ModelSpec build_model() const {
    ModelSpec spec;
    if (mixture == "scale") {
      spec.measure = ScaleMeasure{alpha, beta};
    } else if (mixture == "location") {
      spec.measure = LocationMeasure{alpha, beta1, beta2};
    } else {
      throw ConfigError("model.mixture must be 'scale' or 'location'");
    }
    if (correlation_kind == "stationary-exponential") {
      spec.correlation.kind = CorrelationModel::Kind::stationary_exponential;
      spec.correlation.rate = rate;
    } else if (correlation_kind == "magnitude-scaled") {
      spec.correlation.kind = CorrelationModel::Kind::magnitude_scaled;
      spec.correlation.lambda = parse_lambda(lambda_id);
      spec.correlation.nu = nu;
    } else {
      throw ConfigError("correlation.kind must be 'stationary-exponential' "
                        "or 'magnitude-scaled'");
    }
    spec.sampler =
        method.kind == MethodKind::exact_mh ? SamplerKind::mh
                                            : SamplerKind::ars;
    if (mixture == "location") spec.sampler = SamplerKind::mh;
    spec.mh.sigma = mh_sigma;
    spec.mh.iterations = mh_iterations;
    spec.ordering = parse_ordering(ordering);
    spec.validate();
    if (method.kind == MethodKind::exact_ars && mixture == "location") {
      throw ConfigError("method exact-ars is unavailable for the location "
                        "mixture; use exact-mh");
    }
    return spec;
  }

  std::vector<Site> build_raw_sites() const {
    std::vector<Site> out;
    if (!grid.empty()) {
      if (grid.size() != 2 || grid[0] < 1 || grid[1] < 1) {
        throw ConfigError("sites.grid must be [n1, n2] with n >= 1");
      }
      return unit_square_grid(grid[0], grid[1]);
    }
    if (coords.empty()) {
      throw ConfigError("sites: give either a grid or explicit coords");
    }
    for (const auto& c : coords) {
      if (c.empty() || c.size() > 2) {
        throw ConfigError("sites.coords entries must have 1 or 2 numbers");
      }
      Site s(static_cast<int>(c.size()));
      for (std::size_t d = 0; d < c.size(); ++d) s[d] = c[d];
      out.push_back(s);
    }
    return out;
  }

  SiteSet build_sites() const {
    return SiteSet(build_raw_sites(), parse_ordering(ordering), seed);
  }

  static Ordering parse_ordering(const std::string& s) {
    if (s == "coordinate-wise") return Ordering::coordinate_wise;
    if (s == "random") return Ordering::random;
    if (s == "middle-out") return Ordering::middle_out;
    if (s == "maximum-minimum") return Ordering::maximum_minimum;
    throw ConfigError("unknown ordering '" + s + "'");
  }

  static LambdaSurface parse_lambda(const std::string& id) {
    LambdaSurface surface;
    if (id == "ridge") {
      surface.kind = LambdaSurface::Kind::ridge;
      return surface;
    }
    if (id.rfind("constant:", 0) == 0) {
      surface.kind = LambdaSurface::Kind::constant;
      surface.value = std::stod(id.substr(9));
      if (!(surface.value > 0.0)) {
        throw ConfigError("lambda surface constant must be > 0");
      }
      return surface;
    }
    throw ConfigError("unknown lambda surface '" + id +
                      "' (expected 'ridge' or 'constant:<v>')");
  }
};

// -- JSON (de)serialization -------------------------------------------------

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["model"]["mixture"] = c.mixture;
  j["model"]["alpha"] = c.alpha;
  if (c.mixture == "scale") {
    j["model"]["beta"] = c.beta;
  } else {
    j["model"]["beta1"] = c.beta1;
    j["model"]["beta2"] = c.beta2;
  }
  j["model"]["correlation"]["kind"] = c.correlation_kind;
  if (c.correlation_kind == "stationary-exponential") {
    j["model"]["correlation"]["rate"] = c.rate;
  } else {
    j["model"]["correlation"]["lambda"] = c.lambda_id;
    j["model"]["correlation"]["nu"] = c.nu;
  }
  j["model"]["mh"]["sigma"] = c.mh_sigma;
  j["model"]["mh"]["iterations"] = c.mh_iterations;
  if (!c.grid.empty()) {
    j["sites"]["grid"] = c.grid;
  } else {
    j["sites"]["coords"] = c.coords;
  }
  j["sites"]["ordering"] = c.ordering;
  j["run"]["replicates"] = c.replicates;
  j["run"]["seed"] = c.seed;
  j["run"]["workers"] = c.workers;
  j["run"]["method"] = c.method.str();
  j["output"]["dir"] = c.out_dir;
  j["output"]["formats"] = c.formats;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    const auto& m = j.at("model");
    c.mixture = m.at("mixture").get<std::string>();
    c.alpha = m.at("alpha").get<double>();
    if (c.mixture == "scale") {
      c.beta = m.at("beta").get<double>();
    } else {
      c.beta1 = m.at("beta1").get<double>();
      c.beta2 = m.at("beta2").get<double>();
    }
    const auto& corr = m.at("correlation");
    c.correlation_kind = corr.at("kind").get<std::string>();
    if (c.correlation_kind == "stationary-exponential") {
      c.rate = corr.at("rate").get<double>();
    } else {
      c.lambda_id = corr.at("lambda").get<std::string>();
      c.nu = corr.at("nu").get<double>();
    }
    if (m.contains("mh")) {
      c.mh_sigma = m.at("mh").value("sigma", 1.0);
      c.mh_iterations = m.at("mh").value("iterations", 100);
    }
    const auto& s = j.at("sites");
    if (s.contains("grid")) {
      c.grid = s.at("grid").get<std::vector<int>>();
    } else {
      c.coords = s.at("coords").get<std::vector<std::vector<double>>>();
    }
    c.ordering = s.value("ordering", std::string("coordinate-wise"));
    const auto& r = j.at("run");
    c.replicates = r.value("replicates", 1000L);
    c.seed = r.value("seed", std::uint64_t{1});
    c.workers = r.value("workers", 0);
    c.method = Method::parse(r.value("method", std::string("exact-ars")));
    if (j.contains("output")) {
      c.out_dir = j.at("output").value("dir", std::string("out"));
      c.formats = j.at("output").value("formats",
                                       std::vector<std::string>{"csv"});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  return c;
}

// -- built-in presets ---------------------------------------------------------

// paper-s4: scale mixture, alpha=5, beta=2, magnitude-scaled correlation on
// the ridge surface with nu=3, 7x7 unit-square grid.
// extremal-t-boundary: scale mixture at the max-stable boundary beta=0.
// br-boundary: location mixture at the Brown-Resnick boundary
// alpha=beta1=beta2=1 with exponential correlation.
inline RunConfig preset(const std::string& name) {
  RunConfig c;
  if (name == "paper-s4") {
    c.mixture = "scale";
    c.alpha = 5.0;
    c.beta = 2.0;
    c.correlation_kind = "magnitude-scaled";
    c.lambda_id = "ridge";
    c.nu = 3.0;
    c.grid = {7, 7};
    c.method = Method::parse("exact-ars");
    return c;
  }
  if (name == "extremal-t-boundary") {
    c.mixture = "scale";
    c.alpha = 1.0;
    c.beta = 0.0;
    c.correlation_kind = "stationary-exponential";
    c.rate = 2.0;
    c.coords = {{0.25}, {0.75}};
    c.method = Method::parse("exact-ars");
    return c;
  }
  if (name == "br-boundary") {
    c.mixture = "location";
    c.alpha = 1.0;
    c.beta1 = 1.0;
    c.beta2 = 1.0;
    c.correlation_kind = "stationary-exponential";
    c.rate = 2.0;
    c.coords = {{0.25}, {0.75}};
    c.method = Method::parse("exact-mh");
    return c;
  }
  throw ConfigError("unknown preset '" + name +
                    "' (available: paper-s4, extremal-t-boundary, "
                    "br-boundary)");
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "paper-s4", "extremal-t-boundary", "br-boundary"};
  return names;
}

}  // namespace maxid
