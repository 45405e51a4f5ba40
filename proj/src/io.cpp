#include "tensionweb/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace tensionweb {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ParseError(where + ": " + msg);
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

void expect_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
    if (!ok) fail(where, "unknown field \"" + it.key() + "\"");
  }
}

const json& field(const json& obj, const std::string& where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "number is not finite");
  return x;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

void check_header(const json& doc, int* dimension) {
  const int version = integer(field(doc, "/", "schema_version"), "/schema_version");
  if (version != kSchemaVersion) {
    fail("/schema_version", "unsupported schema version " + std::to_string(version));
  }
  *dimension = integer(field(doc, "/", "dimension"), "/dimension");
  if (*dimension != 2 && *dimension != 3) fail("/dimension", "must be 2 or 3");
}

Vec point(const json& v, int d, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != d) {
    fail(where, "expected an array of " + std::to_string(d) + " numbers");
  }
  Vec p(d);
  for (int k = 0; k < d; ++k) p[k] = number(v[k], where + "/" + std::to_string(k));
  return p;
}

json to_json(const Eigen::Ref<const Vec>& p) {
  json a = json::array();
  for (Eigen::Index k = 0; k < p.size(); ++k) a.push_back(p[k]);
  return a;
}

int parse_role(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  const std::string s = v.get<std::string>();
  if (s == "internal") return kInternal;
  constexpr std::string_view prefix = "terminal:";
  if (s.rfind(prefix, 0) == 0) {
    int k = -1;
    const char* first = s.data() + prefix.size();
    const char* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, k);
    if (ec == std::errc{} && ptr == last && first != last && k >= 0) return k;
  }
  fail(where, "role must be \"internal\" or \"terminal:<k>\"");
}

bool same(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

}  // namespace

Tolerances ToleranceOverrides::apply(Tolerances base) const {
  if (feas) base.feas = *feas;
  if (eq) base.eq = *eq;
  if (geom) base.geom = *geom;
  base.validate();
  return base;
}

TerminalConfig ProblemDocument::config(const Tolerances& tol) const { return TerminalConfig(positions, forces, tol); }

bool operator==(const ProblemDocument& a, const ProblemDocument& b) {
  return a.dimension == b.dimension && same(a.positions, b.positions) && same(a.forces, b.forces) &&
         a.tolerances == b.tolerances;
}

bool WebDocument::has_stress() const {
  return std::all_of(tensions.begin(), tensions.end(), [](const auto& t) { return t.has_value(); });
}

StressState WebDocument::stress() const {
  if (!has_stress()) throw InvalidInput("web document has edges without tension");
  StressState s(tensions.size());
  for (std::size_t e = 0; e < tensions.size(); ++e) s[static_cast<Eigen::Index>(e)] = *tensions[e];
  return s;
}

WebDocument WebDocument::from(const StressedWeb& sw) {
  WebDocument doc = from(sw.web);
  for (int e = 0; e < sw.web.edge_count(); ++e) doc.tensions[e] = sw.stress[e];
  return doc;
}

WebDocument WebDocument::from(const Web& web) {
  WebDocument doc;
  doc.dimension = web.dimension();
  doc.web = web;
  doc.tensions.assign(web.edges.size(), std::nullopt);
  return doc;
}

bool operator==(const WebDocument& a, const WebDocument& b) {
  return a.dimension == b.dimension && same(a.web.nodes, b.web.nodes) && a.web.role == b.web.role &&
         a.web.edges == b.web.edges && a.tensions == b.tensions;
}

ProblemDocument problem_from_config(const TerminalConfig& cfg) {
  ProblemDocument doc;
  doc.dimension = cfg.dimension();
  doc.positions = cfg.positions();
  doc.forces = cfg.forces();
  return doc;
}

ProblemDocument parse_problem(const std::string& text) {
  const json doc = parse_json(text);
  expect_keys(doc, "/", {"schema_version", "dimension", "terminals", "tolerances"});
  ProblemDocument out;
  check_header(doc, &out.dimension);
  const int d = out.dimension;

  const json& terms = field(doc, "/", "terminals");
  if (!terms.is_array()) fail("/terminals", "expected an array");
  const int n = static_cast<int>(terms.size());
  out.positions.resize(d, n);
  out.forces.resize(d, n);
  for (int k = 0; k < n; ++k) {
    const std::string where = "/terminals/" + std::to_string(k);
    expect_keys(terms[k], where, {"position", "force"});
    out.positions.col(k) = point(field(terms[k], where, "position"), d, where + "/position");
    out.forces.col(k) = point(field(terms[k], where, "force"), d, where + "/force");
  }

  if (const auto it = doc.find("tolerances"); it != doc.end()) {
    expect_keys(*it, "/tolerances", {"feas", "eq", "geom"});
    auto read = [&](const char* key, std::optional<double>& dst) {
      if (const auto v = it->find(key); v != it->end()) dst = number(*v, std::string("/tolerances/") + key);
    };
    read("feas", out.tolerances.feas);
    read("eq", out.tolerances.eq);
    read("geom", out.tolerances.geom);
  }

  try {
    out.config(out.tolerances.apply({}));
  } catch (const ParseError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("invalid problem: ") + e.what());
  }
  return out;
}

WebDocument parse_web(const std::string& text) {
  const json doc = parse_json(text);
  expect_keys(doc, "/", {"schema_version", "dimension", "nodes", "edges"});
  WebDocument out;
  check_header(doc, &out.dimension);
  const int d = out.dimension;
  out.web = Web(d);

  const json& nodes = field(doc, "/", "nodes");
  if (!nodes.is_array()) fail("/nodes", "expected an array");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::string where = "/nodes/" + std::to_string(k);
    expect_keys(nodes[k], where, {"position", "role"});
    const Vec p = point(field(nodes[k], where, "position"), d, where + "/position");
    out.web.add_node(p, parse_role(field(nodes[k], where, "role"), where + "/role"));
  }

  const json& edges = field(doc, "/", "edges");
  if (!edges.is_array()) fail("/edges", "expected an array");
  const int m = out.web.node_count();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::string where = "/edges/" + std::to_string(e);
    expect_keys(edges[e], where, {"i", "j", "tension"});
    const int i = integer(field(edges[e], where, "i"), where + "/i");
    const int j = integer(field(edges[e], where, "j"), where + "/j");
    if (i < 0 || j < 0 || i >= m || j >= m) fail(where, "endpoint out of range");
    if (i >= j) fail(where, "endpoints must satisfy i < j");
    out.web.edges.push_back({i, j});
    std::optional<double> t;
    if (const auto it = edges[e].find("tension"); it != edges[e].end()) t = number(*it, where + "/tension");
    out.tensions.push_back(t);
  }

  try {
    validate(out.web);
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("invalid web: ") + e.what());
  }
  return out;
}

std::string serialize(const ProblemDocument& doc) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["dimension"] = doc.dimension;
  json terms = json::array();
  for (Eigen::Index k = 0; k < doc.positions.cols(); ++k) {
    terms.push_back({{"position", to_json(doc.positions.col(k))}, {"force", to_json(doc.forces.col(k))}});
  }
  out["terminals"] = std::move(terms);
  if (!doc.tolerances.empty()) {
    json t = json::object();
    if (doc.tolerances.feas) t["feas"] = *doc.tolerances.feas;
    if (doc.tolerances.eq) t["eq"] = *doc.tolerances.eq;
    if (doc.tolerances.geom) t["geom"] = *doc.tolerances.geom;
    out["tolerances"] = std::move(t);
  }
  return out.dump(2) + "\n";
}

std::string serialize(const WebDocument& doc) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["dimension"] = doc.dimension;
  json nodes = json::array();
  for (int k = 0; k < doc.web.node_count(); ++k) {
    const int r = doc.web.role[k];
    nodes.push_back({{"position", to_json(doc.web.node(k))},
                     {"role", r == kInternal ? std::string("internal") : "terminal:" + std::to_string(r)}});
  }
  out["nodes"] = std::move(nodes);
  json edges = json::array();
  for (std::size_t e = 0; e < doc.web.edges.size(); ++e) {
    json item = {{"i", doc.web.edges[e].i}, {"j", doc.web.edges[e].j}};
    if (e < doc.tensions.size() && doc.tensions[e]) item["tension"] = *doc.tensions[e];
    edges.push_back(std::move(item));
  }
  out["edges"] = std::move(edges);
  return out.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
  if (!out) throw InvalidInput("write failed: " + path);
}

}  // namespace tensionweb
