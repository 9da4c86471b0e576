#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>
#include "entrans/density.hpp"
#include "entrans/dynamics.hpp"
#include "entrans/maxent.hpp"
#include "entrans/transport.hpp"

namespace entrans {

using Json = nlohmann::ordered_json;

// Deterministic text: two-space indent, keys in insertion order, every
// number printed with 17 significant digits (integers stay integers).
std::string dumpJson(const Json& j);
std::string dumpJsonLine(const Json& j);
void writeJsonFile(const std::string& path, const Json& j);

Json toJson(const GridSpec& g);
// Sidecar for a density CSV: Z, lambda, basepoint, provenance and grid.
Json densityMeta(const Density& d);
Json toJson(const FitReport& r);
Json toJson(const TransportResult& r);
Json toJson(const StationarityCertificate& c);

}  // namespace entrans
