#include "entrans/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "entrans/json_io.hpp"

namespace entrans {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

Json parseValue(const std::string& raw) {
  Json j = Json::parse(raw, nullptr, false);
  if (j.is_discarded()) return Json(raw);
  return j;
}

template <class T>
T as(const Json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError("config key '" + key + "' has the wrong type: " + j.dump());
  }
}

std::vector<double> numbers(const Json& j, const std::string& key, int dim) {
  if (j.is_number()) return std::vector<double>(dim, j.get<double>());
  return as<std::vector<double>>(j, key);
}

ConstraintSpec constraintFrom(const Json& j) {
  if (!j.is_object()) throw InputError("each constraint must be an object {expr, lambda | target}");
  ConstraintSpec c;
  for (const auto& [k, v] : j.items()) {
    if (k == "expr")
      c.expr = as<std::string>(v, "constraints.items.expr");
    else if (k == "lambda")
      c.lambda = as<double>(v, "constraints.items.lambda");
    else if (k == "target")
      c.target = as<double>(v, "constraints.items.target");
    else
      throw InputError("unknown constraint field '" + k + "'");
  }
  if (c.expr.empty()) throw InputError("constraint without expr");
  if (c.lambda.has_value() == c.target.has_value())
    throw InputError("constraint '" + c.expr + "' needs exactly one of lambda or target");
  return c;
}

}  // namespace

GridSpec RunConfig::grid() const {
  if (static_cast<int>(lower.size()) != dimension || static_cast<int>(upper.size()) != dimension ||
      static_cast<int>(nodes.size()) != dimension)
    throw InputError("grid lower/upper/nodes must have one entry per dimension");
  std::vector<Axis> axes;
  for (int i = 0; i < dimension; ++i) axes.push_back({lower[i], upper[i], nodes[i]});
  return GridSpec(std::move(axes));
}

ConstraintSet RunConfig::constraintSet() const {
  ConstraintSet cs;
  cs.dimension = dimension;
  for (const ConstraintSpec& c : constraints) cs.add(parse(c.expr, dimension), c.lambda.value_or(0.0), c.target);
  return cs;
}

std::vector<Expr> RunConfig::driftExprs() const {
  if (static_cast<int>(drift.size()) != dimension) throw InputError("drift needs one component per dimension");
  std::vector<Expr> out;
  for (const std::string& s : drift) out.push_back(parse(s, dimension));
  return out;
}

RunConfig parseConfig(const std::string& text) {
  RunConfig c;
  std::map<std::string, Json> values;
  std::istringstream in(text);
  std::string line, section;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw InputError("line " + std::to_string(lineNo) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError("line " + std::to_string(lineNo) + ": expected key = value");
    if (section.empty()) throw InputError("line " + std::to_string(lineNo) + ": key outside a section");
    const std::string key = section + "." + trim(t.substr(0, eq));
    if (values.count(key)) throw InputError("duplicate config key '" + key + "'");
    values[key] = parseValue(trim(t.substr(eq + 1)));
  }

  // Dimension first so scalar bounds can broadcast.
  if (auto it = values.find("grid.dimension"); it != values.end()) {
    c.dimension = as<int>(it->second, it->first);
    values.erase(it);
  } else if (auto lo = values.find("grid.lower"); lo != values.end() && lo->second.is_array()) {
    c.dimension = static_cast<int>(lo->second.size());
  }
  if (c.dimension < 1 || c.dimension > GridSpec::kMaxDimension) throw InputError("dimension must be 1, 2 or 3");
  c.lower.assign(c.dimension, -5.0);
  c.upper.assign(c.dimension, 5.0);
  c.nodes.assign(c.dimension, 101);

  using Setter = std::function<void(const Json&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"grid.lower", [&](const Json& j, const std::string& k) { c.lower = numbers(j, k, c.dimension); }},
      {"grid.upper", [&](const Json& j, const std::string& k) { c.upper = numbers(j, k, c.dimension); }},
      {"grid.nodes",
       [&](const Json& j, const std::string& k) {
         c.nodes = j.is_number() ? std::vector<int>(c.dimension, as<int>(j, k)) : as<std::vector<int>>(j, k);
       }},
      {"constraints.items",
       [&](const Json& j, const std::string&) {
         if (!j.is_array()) throw InputError("constraints.items must be a JSON list");
         for (const Json& e : j) c.constraints.push_back(constraintFrom(e));
       }},
      {"drift.components", [&](const Json& j, const std::string& k) { c.drift = as<std::vector<std::string>>(j, k); }},
      {"solver.tol", [&](const Json& j, const std::string& k) { c.tolerance = as<double>(j, k); }},
      {"solver.max_iter", [&](const Json& j, const std::string& k) { c.maxIterations = as<int>(j, k); }},
      {"dynamics.dt", [&](const Json& j, const std::string& k) { c.dt = as<double>(j, k); }},
      {"dynamics.T", [&](const Json& j, const std::string& k) { c.endTime = as<double>(j, k); }},
      {"dynamics.D", [&](const Json& j, const std::string& k) { c.diffusion = as<double>(j, k); }},
      {"dynamics.particles", [&](const Json& j, const std::string& k) { c.particles = as<std::size_t>(j, k); }},
      {"dynamics.seed", [&](const Json& j, const std::string& k) { c.seed = as<std::uint64_t>(j, k); }},
      {"dynamics.sample_every", [&](const Json& j, const std::string& k) { c.sampleEvery = as<int>(j, k); }},
      {"transport.path", [&](const Json& j, const std::string& k) { c.path = as<std::vector<Point>>(j, k); }},
      {"transport.closed", [&](const Json& j, const std::string& k) { c.closedPath = as<bool>(j, k); }},
      {"transport.paths", [&](const Json& j, const std::string& k) { c.paths = as<int>(j, k); }},
      {"transport.tolerance", [&](const Json& j, const std::string& k) { c.pathTolerance = as<double>(j, k); }},
      {"certify.lambda", [&](const Json& j, const std::string& k) { c.lambda = as<double>(j, k); }},
      {"certify.curvature_tol", [&](const Json& j, const std::string& k) { c.curvatureTolerance = as<double>(j, k); }},
      {"certify.fp_tol", [&](const Json& j, const std::string& k) { c.fpTolerance = as<double>(j, k); }},
      {"contour.levels", [&](const Json& j, const std::string& k) { c.levels = as<std::vector<double>>(j, k); }},
      {"contour.step", [&](const Json& j, const std::string& k) { c.step = as<double>(j, k); }},
      {"contour.max_steps", [&](const Json& j, const std::string& k) { c.maxSteps = as<int>(j, k); }},
      {"output.dir", [&](const Json& j, const std::string& k) { c.outputDir = as<std::string>(j, k); }},
  };
  for (const auto& [key, value] : values) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw InputError("unknown config key '" + key + "'");
    it->second(value, key);
  }
  for (const Point& v : c.path)
    if (static_cast<int>(v.size()) != c.dimension) throw InputError("path vertex has the wrong dimension");
  return c;
}

RunConfig loadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseConfig(ss.str());
}

std::string echoConfig(const RunConfig& c) {
  auto line = [](const std::string& key, const Json& v) { return key + " = " + dumpJsonLine(v) + "\n"; };
  Json items = Json::array();
  for (const ConstraintSpec& s : c.constraints) {
    Json e;
    e["expr"] = s.expr;
    if (s.lambda) e["lambda"] = *s.lambda;
    if (s.target) e["target"] = *s.target;
    items.push_back(e);
  }
  std::string out;
  out += "[grid]\n";
  out += line("dimension", c.dimension);
  out += line("lower", c.lower);
  out += line("upper", c.upper);
  out += line("nodes", c.nodes);
  out += "\n[constraints]\n" + line("items", items);
  if (!c.drift.empty()) out += "\n[drift]\n" + line("components", c.drift);
  out += "\n[solver]\n" + line("tol", c.tolerance) + line("max_iter", c.maxIterations);
  out += "\n[dynamics]\n" + line("dt", c.dt) + line("T", c.endTime) + line("D", c.diffusion) +
         line("particles", c.particles) + line("seed", c.seed) + line("sample_every", c.sampleEvery);
  out += "\n[transport]\n" + line("path", c.path) + line("closed", c.closedPath) + line("paths", c.paths) +
         line("tolerance", c.pathTolerance);
  out += "\n[certify]\n" + line("lambda", c.lambda) + line("curvature_tol", c.curvatureTolerance) +
         line("fp_tol", c.fpTolerance);
  out += "\n[contour]\n" + line("levels", c.levels) + line("step", c.step) + line("max_steps", c.maxSteps);
  out += "\n[output]\n" + line("dir", c.outputDir);
  return out;
}

}  // namespace entrans
