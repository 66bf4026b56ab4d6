#include "wcalc/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wcalc {

namespace {

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& context) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    require(ok, context + ": unknown key \"" + it.key() + "\"");
  }
}

Vec vec_from_json(const Json& j, const std::string& context) {
  require(j.is_array(), context + ": expected an array");
  Vec v(static_cast<Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), context + ": non-numeric entry at index " + std::to_string(i));
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

}  // namespace

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw InputError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

EmpiricalMeasure measure_from_json(const Json& j) {
  reject_unknown_keys(j, {"dim", "atoms", "weights"}, "measure");
  require(j.contains("dim") && j.contains("atoms") && j.contains("weights"),
          "measure: required keys are dim, atoms, weights");
  const Index d = j["dim"].get<Index>();
  require(d >= 1, "measure: dim must be >= 1");
  const auto& atoms = j["atoms"];
  require(atoms.is_array() && !atoms.empty(), "measure: atoms must be a nonempty array");
  Mat a(d, static_cast<Index>(atoms.size()));
  for (size_t i = 0; i < atoms.size(); ++i) {
    const Vec x = vec_from_json(atoms[i], "measure: atom " + std::to_string(i));
    require(x.size() == d, "measure: atom " + std::to_string(i) + " has dimension " +
                               std::to_string(x.size()) + ", expected " + std::to_string(d));
    a.col(static_cast<Index>(i)) = x;
  }
  const Vec w = vec_from_json(j["weights"], "measure: weights");
  return EmpiricalMeasure(a, w);
}

EmpiricalMeasure read_measure(const std::string& path) {
  return measure_from_json(load_json(path));
}

Json measure_to_json(const EmpiricalMeasure& mu) {
  Json atoms = Json::array();
  for (Index i = 0; i < mu.size(); ++i) {
    Json a = Json::array();
    for (Index r = 0; r < mu.dim(); ++r) a.push_back(mu.atoms()(r, i));
    atoms.push_back(a);
  }
  Json w = Json::array();
  for (Index i = 0; i < mu.size(); ++i) w.push_back(mu.weight(i));
  return Json{{"dim", mu.dim()}, {"atoms", atoms}, {"weights", w}};
}

MetaMeasure meta_measure_from_json(const Json& j, const std::string& base_dir) {
  reject_unknown_keys(j, {"components"}, "meta measure");
  require(j.contains("components") && j["components"].is_array() && !j["components"].empty(),
          "meta measure: needs a nonempty components array");
  std::vector<MetaMeasure::Component> comps;
  size_t idx = 0;
  for (const auto& c : j["components"]) {
    reject_unknown_keys(c, {"mass", "measure"},
                        "meta measure component " + std::to_string(idx));
    require(c.contains("mass") && c.contains("measure"),
            "meta measure component " + std::to_string(idx) + ": needs mass and measure");
    const double mass = c["mass"].get<double>();
    if (c["measure"].is_string()) {
      const auto p = std::filesystem::path(base_dir) / c["measure"].get<std::string>();
      comps.push_back({mass, read_measure(p.string())});
    } else {
      comps.push_back({mass, measure_from_json(c["measure"])});
    }
    ++idx;
  }
  return MetaMeasure(std::move(comps));
}

MetaMeasure read_meta_measure(const std::string& path) {
  return meta_measure_from_json(load_json(path),
                                std::filesystem::path(path).parent_path().string());
}

GaussianMeasure gaussian_from_json(const Json& j) {
  reject_unknown_keys(j, {"mean", "cov"}, "gaussian");
  require(j.contains("mean") && j.contains("cov"), "gaussian: required keys are mean, cov");
  const Vec mean = vec_from_json(j["mean"], "gaussian: mean");
  const auto& cov = j["cov"];
  require(cov.is_array() && static_cast<Index>(cov.size()) == mean.size(),
          "gaussian: cov must be a square matrix matching mean");
  Mat c(mean.size(), mean.size());
  for (size_t r = 0; r < cov.size(); ++r) {
    const Vec row = vec_from_json(cov[r], "gaussian: cov row " + std::to_string(r));
    require(row.size() == mean.size(), "gaussian: cov row " + std::to_string(r) + " length");
    c.row(static_cast<Index>(r)) = row.transpose();
  }
  return GaussianMeasure(mean, c);
}

SmoothFeature feature_from_json(const Json& j) {
  require(j.contains("type"), "feature: missing type");
  const std::string type = j["type"].get<std::string>();
  if (type == "gaussian_bump") {
    reject_unknown_keys(j, {"type", "center", "width"}, "gaussian_bump");
    return features::gaussian_bump(vec_from_json(j.at("center"), "gaussian_bump center"),
                                   j.at("width").get<double>());
  }
  if (type == "coord_bump") {
    reject_unknown_keys(j, {"type", "coord", "center", "width"}, "coord_bump");
    return features::coord_bump(j.at("coord").get<Index>(),
                                vec_from_json(j.at("center"), "coord_bump center"),
                                j.at("width").get<double>());
  }
  if (type == "poly") {
    reject_unknown_keys(j, {"type", "exponents"}, "poly");
    return features::monomial(j.at("exponents").get<std::vector<int>>());
  }
  throw InputError("feature: unknown type \"" + type + "\"");
}

OuterFunction outer_from_json(const Json& j, Index arity) {
  require(j.contains("type"), "outer: missing type");
  const std::string type = j["type"].get<std::string>();
  if (type == "linear") {
    reject_unknown_keys(j, {"type", "coeffs", "intercept"}, "linear outer");
    Vec coeffs = j.contains("coeffs") ? vec_from_json(j["coeffs"], "linear coeffs")
                                      : Vec(Vec::Ones(arity));
    require(coeffs.size() == arity, "linear outer: coefficient count mismatch");
    return outers::linear(coeffs, j.value("intercept", 0.0));
  }
  if (type == "square") {
    reject_unknown_keys(j, {"type"}, "square outer");
    require(arity == 1, "square outer expects a single feature");
    return outers::square();
  }
  if (type == "tanh") {
    reject_unknown_keys(j, {"type"}, "tanh outer");
    require(arity == 1, "tanh outer expects a single feature");
    return outers::tanh_outer();
  }
  if (type == "polynomial") {
    // terms: [{"coeff": c, "powers": [p_1, ..., p_N]}]
    reject_unknown_keys(j, {"type", "terms"}, "polynomial outer");
    struct Term {
      double coeff;
      std::vector<int> powers;
    };
    std::vector<Term> terms;
    for (const auto& t : j.at("terms")) {
      reject_unknown_keys(t, {"coeff", "powers"}, "polynomial term");
      Term term{t.at("coeff").get<double>(), t.at("powers").get<std::vector<int>>()};
      require(static_cast<Index>(term.powers.size()) == arity,
              "polynomial term power count mismatch");
      for (int p : term.powers) require(p >= 0, "polynomial powers must be nonnegative");
      terms.push_back(std::move(term));
    }
    auto value = [terms](const Vec& s) {
      double acc = 0.0;
      for (const auto& t : terms) {
        double v = t.coeff;
        for (size_t k = 0; k < t.powers.size(); ++k)
          v *= std::pow(s[static_cast<Index>(k)], t.powers[k]);
        acc += v;
      }
      return acc;
    };
    auto partials = [terms](const Vec& s) {
      Vec d = Vec::Zero(s.size());
      for (const auto& t : terms) {
        for (size_t k = 0; k < t.powers.size(); ++k) {
          if (t.powers[k] == 0) continue;
          double v = t.coeff * t.powers[k] *
                     std::pow(s[static_cast<Index>(k)], t.powers[k] - 1);
          for (size_t q = 0; q < t.powers.size(); ++q)
            if (q != k) v *= std::pow(s[static_cast<Index>(q)], t.powers[q]);
          d[static_cast<Index>(k)] += v;
        }
      }
      return d;
    };
    return OuterFunction{"polynomial", arity, value, partials};
  }
  throw InputError("outer: unknown type \"" + type + "\"");
}

CylinderFunction cylinder_from_json(const Json& j) {
  reject_unknown_keys(j, {"outer", "features"}, "cylinder");
  require(j.contains("outer") && j.contains("features"), "cylinder: needs outer and features");
  std::vector<SmoothFeature> feats;
  for (const auto& f : j["features"]) feats.push_back(feature_from_json(f));
  require(!feats.empty(), "cylinder: needs at least one feature");
  OuterFunction outer = outer_from_json(j["outer"], static_cast<Index>(feats.size()));
  return CylinderFunction(std::move(outer), std::move(feats));
}

std::vector<double> read_scalar_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::vector<double> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    try {
      out.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw InputError(path + ": not a number on line " + std::to_string(lineno));
    }
  }
  require(!out.empty(), path + ": empty value file");
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // trim to the shortest representation that round-trips
  for (int prec = 1; prec <= 16; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    if (std::stod(shorter) == v) return shorter;
  }
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  out << content;
}

}  // namespace wcalc
