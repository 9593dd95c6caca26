#include "sacalc/io.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "sacalc/errors.hpp"
#include "sacalc/triangulate.hpp"

namespace sacalc {

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), "malformed JSON");
  }
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ParseError(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError(where, "unknown key \"" + key + "\"");
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where, std::string("missing key \"") + key + "\"");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where, "expected a number");
  return v.get<double>();
}

Polynomial polynomial(const json& v, std::size_t vars, const std::string& where) {
  if (!v.is_string()) throw ParseError(where, "expected a polynomial string");
  try {
    return Polynomial::parse(v.get<std::string>(), vars);
  } catch (const Error& e) {
    throw ParseError(where, e.what());
  }
}

SAFormula node(const json& n, std::size_t m, const std::string& where) {
  if (!n.is_object()) throw ParseError(where, "expected a formula node");
  auto list = [&](const char* key) {
    const json& arr = n.at(key);
    const std::string at = where + "." + key;
    if (!arr.is_array() || arr.empty()) throw ParseError(at, "expected a non-empty array");
    std::vector<SAFormula> parts;
    for (std::size_t i = 0; i < arr.size(); ++i) parts.push_back(node(arr[i], m, at + "[" + std::to_string(i) + "]"));
    return parts;
  };
  if (n.contains("and")) {
    only_keys(n, where, {"and"});
    return SAFormula::all_of(list("and"));
  }
  if (n.contains("or")) {
    only_keys(n, where, {"or"});
    return SAFormula::any_of(list("or"));
  }
  if (n.contains("not")) {
    only_keys(n, where, {"not"});
    return SAFormula::negate(node(n.at("not"), m, where + ".not"));
  }
  only_keys(n, where, {"poly", "rel"});
  Polynomial p = polynomial(require(n, where, "poly"), m, where + ".poly");
  const json& rel = require(n, where, "rel");
  if (!rel.is_string()) throw ParseError(where + ".rel", "expected a relation string");
  Relation r;
  try {
    r = parse_relation(rel.get<std::string>());
  } catch (const Error& e) {
    throw ParseError(where + ".rel", e.what());
  }
  if (p.is_zero()) throw ParseError(where + ".poly", "the zero polynomial is not a valid condition");
  return SAFormula::leaf(std::move(p), r);
}

}  // namespace

SetInput parse_set(std::string_view text) {
  const json doc = parse_json(text);
  only_keys(doc, "set", {"dim", "box", "formula", "family", "truncate"});
  const json& box_json = require(doc, "set", "box");
  if (!box_json.is_array() || box_json.empty()) throw ParseError("set.box", "expected a non-empty array of [lo, hi]");
  Box box;
  for (std::size_t i = 0; i < box_json.size(); ++i) {
    const std::string at = "set.box[" + std::to_string(i) + "]";
    const json& side = box_json[i];
    if (!side.is_array() || side.size() != 2) throw ParseError(at, "expected [lo, hi]");
    const double lo = number(side[0], at + "[0]");
    const double hi = number(side[1], at + "[1]");
    if (!(lo <= hi)) throw ParseError(at, "lo must not exceed hi");
    box.push_back({lo, hi});
  }
  std::size_t m = box.size();
  if (doc.contains("dim")) {
    const json& d = doc.at("dim");
    if (!d.is_number_integer() || d.get<long>() < 1) throw ParseError("set.dim", "expected a positive integer");
    m = d.get<std::size_t>();
    if (m != box.size()) throw ParseError("set.dim", "does not match the box dimension");
  }
  bool truncate = false;
  if (doc.contains("truncate")) {
    if (!doc.at("truncate").is_boolean()) throw ParseError("set.truncate", "expected true or false");
    truncate = doc.at("truncate").get<bool>();
  }
  SAFormula f = node(require(doc, "set", "formula"), m, "set.formula");
  try {
    f = truncate ? f.restricted_to(box) : f.with_box(box);
  } catch (const InvalidArgument& e) {
    throw ParseError("set.box", e.what());
  }
  SetInput in{std::move(f), {}};
  if (doc.contains("family")) {
    const json& fam = doc.at("family");
    if (!fam.is_array()) throw ParseError("set.family", "expected an array of formula nodes");
    for (std::size_t i = 0; i < fam.size(); ++i) {
      in.family.push_back(node(fam[i], m, "set.family[" + std::to_string(i) + "]"));
    }
  }
  return in;
}

DifferentialForm parse_form(std::string_view text, std::size_t ambient) {
  const json doc = parse_json(text);
  only_keys(doc, "form", {"degree", "dim", "terms"});
  const json& deg = require(doc, "form", "degree");
  if (!deg.is_number_integer() || deg.get<long>() < 0) throw ParseError("form.degree", "expected a non-negative integer");
  const auto p = deg.get<std::size_t>();
  if (doc.contains("dim")) {
    const json& d = doc.at("dim");
    if (!d.is_number_integer() || d.get<long>() < 1) throw ParseError("form.dim", "expected a positive integer");
    if (d.get<std::size_t>() != ambient) {
      throw ParseError("form.dim", "form lives on R^" + std::to_string(d.get<std::size_t>()) + " but the set on R^" +
                                       std::to_string(ambient));
    }
  }
  if (p > ambient) throw ParseError("form.degree", "degree exceeds the ambient dimension");
  const json& terms = require(doc, "form", "terms");
  if (!terms.is_array()) throw ParseError("form.terms", "expected an array of [poly, indices]");
  DifferentialForm form(p, ambient);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string at = "form.terms[" + std::to_string(i) + "]";
    const json& t = terms[i];
    if (!t.is_array() || t.size() != 2) throw ParseError(at, "expected [poly, indices]");
    Polynomial c = polynomial(t[0], ambient, at + "[0]");
    const json& idx = t[1];
    if (!idx.is_array() || idx.size() != p) throw ParseError(at + "[1]", "expected " + std::to_string(p) + " indices");
    IndexSet set;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (!idx[k].is_number_integer() || idx[k].get<long>() < 0 || idx[k].get<std::size_t>() >= ambient) {
        throw ParseError(at + "[1][" + std::to_string(k) + "]", "index out of range 0.." + std::to_string(ambient - 1));
      }
      set.push_back(idx[k].get<int>());
    }
    form.add(c, std::move(set));
  }
  return form;
}

std::vector<SmoothMap> parse_charts(std::string_view text, const SimplicialComplex& complex) {
  const json doc = parse_json(text);
  only_keys(doc, "charts", {"schema", "charts"});
  const json& schema = require(doc, "charts", "schema");
  if (!schema.is_number_integer() || schema.get<int>() != 1) throw ParseError("charts.schema", "expected schema 1");
  const int top = complex.dimension();
  if (top < 0) throw ParseError("charts", "the mesh has no simplices");
  const std::size_t count = complex.count(top);
  std::vector<std::optional<SmoothMap>> maps(count);
  const json& list = require(doc, "charts", "charts");
  if (!list.is_array()) throw ParseError("charts.charts", "expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = "charts.charts[" + std::to_string(i) + "]";
    only_keys(list[i], at, {"simplex", "map"});
    const json& id = require(list[i], at, "simplex");
    if (!id.is_number_integer() || id.get<long>() < 0 || id.get<std::size_t>() >= count) {
      throw ParseError(at + ".simplex", "no top simplex with this id");
    }
    if (maps[id.get<std::size_t>()]) throw ParseError(at + ".simplex", "duplicate chart");
    const json& comps = require(list[i], at, "map");
    if (!comps.is_array() || comps.size() != complex.ambient_dim()) {
      throw ParseError(at + ".map", "expected " + std::to_string(complex.ambient_dim()) + " component polynomials");
    }
    std::vector<Polynomial> ps;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      ps.push_back(polynomial(comps[k], static_cast<std::size_t>(top), at + ".map[" + std::to_string(k) + "]"));
    }
    if (top == 0) throw ParseError(at, "charts need simplices of positive dimension");
    maps[id.get<std::size_t>()] = SmoothMap::polynomial(std::move(ps));
  }
  std::vector<SmoothMap> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(maps[i] ? *maps[i] : affine_chart(complex.points(top, static_cast<int>(i))));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sacalc
