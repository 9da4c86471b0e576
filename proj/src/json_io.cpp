#include "entrans/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "format.hpp"

namespace entrans {

namespace {

// indent < 0 writes everything on one line.
void write(std::ostringstream& os, const Json& j, int indent) {
  const bool flat = indent < 0;
  const std::string pad = flat ? std::string() : std::string(2 * (indent + 1), ' ');
  const std::string close = flat ? std::string() : std::string(2 * indent, ' ');
  const char* nl = flat ? "" : "\n";
  const char* sep = flat ? ", " : ",\n";
  const int inner = flat ? -1 : indent + 1;
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << sep;
        first = false;
        os << pad << Json(k).dump() << ": ";
        write(os, v, inner);
      }
      os << nl << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << '[' << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << sep;
        os << pad;
        write(os, j[i], inner);
      }
      os << nl << close << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v))
        os << fmt17(v);
      else
        os << "null";
      return;
    }
    default: os << j.dump(); return;
  }
}

Json optionalNumber(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string dumpJson(const Json& j) {
  std::ostringstream os;
  write(os, j, 0);
  os << '\n';
  return os.str();
}

std::string dumpJsonLine(const Json& j) {
  std::ostringstream os;
  write(os, j, -1);
  return os.str();
}

void writeJsonFile(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << dumpJson(j);
}

Json toJson(const GridSpec& g) {
  Json lower = Json::array(), upper = Json::array(), nodes = Json::array();
  for (const Axis& a : g.axes()) {
    lower.push_back(a.lower);
    upper.push_back(a.upper);
    nodes.push_back(a.nodes);
  }
  return Json{{"lower", lower}, {"upper", upper}, {"nodes", nodes}};
}

Json densityMeta(const Density& d) {
  Json j;
  j["Z"] = d.Z;
  j["logZ"] = d.logZ;
  j["lambda"] = d.lambda;
  j["basepoint"] = d.basepoint;
  j["provenance"] = std::string(toString(d.provenance));
  j["grid"] = toJson(d.grid());
  return j;
}

Json toJson(const FitReport& r) {
  Json j;
  j["lambda"] = r.lambda;
  j["moments"] = r.moments;
  j["residual"] = r.residual;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["residualHistory"] = r.residualHistory;
  j["dualHistory"] = r.dualHistory;
  return j;
}

Json toJson(const TransportResult& r) {
  Json j;
  j["integral"] = r.integral;
  j["factor"] = r.factor;
  j["partialSums"] = r.partialSums;
  return j;
}

Json toJson(const StationarityCertificate& c) {
  Json j;
  j["curvatureMax"] = c.curvatureMax;
  j["pathSpread"] = c.pathSpread;
  j["fpResidual"] = optionalNumber(c.fpResidual);
  j["verdict"] = c.solvable ? "solvable" : "not solvable";
  j["tolerances"] = Json{{"curvature", c.tolerances.curvature},
                         {"pathSpread", c.tolerances.pathSpread},
                         {"fpResidual", c.tolerances.fpResidual}};
  return j;
}

}  // namespace entrans
