#include "entrans/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include "entrans/dynamics.hpp"
#include "entrans/geometry.hpp"
#include "entrans/json_io.hpp"
#include "entrans/maxent.hpp"
#include "entrans/transport.hpp"
#include "format.hpp"

namespace entrans {

namespace fs = std::filesystem;

namespace {

std::string prepare(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.outputDir, ec);
  if (ec || !fs::is_directory(cfg.outputDir)) throw InputError("cannot create output directory " + cfg.outputDir);
  std::ofstream echo(fs::path(cfg.outputDir) / "config.cfg", std::ios::binary);
  if (!echo) throw InputError("output directory " + cfg.outputDir + " is not writable");
  echo << echoConfig(cfg);
  return cfg.outputDir;
}

std::string file(const RunConfig& cfg, const std::string& name) { return (fs::path(cfg.outputDir) / name).string(); }

void writeDensity(const RunConfig& cfg, const std::string& stem, const Density& d) {
  std::ofstream csv(file(cfg, stem + ".csv"), std::ios::binary);
  if (!csv) throw InputError("cannot write " + stem + ".csv");
  writeCsv(csv, d.field);
  writeJsonFile(file(cfg, stem + ".json"), densityMeta(d));
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const SingularHessianError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

// The potential sum_k lambda_k J_k of fixed-lambda constraints.
Expr fixedPotential(const RunConfig& cfg) {
  if (cfg.constraints.empty()) throw InputError("no constraints given");
  for (const ConstraintSpec& c : cfg.constraints)
    if (!c.lambda) throw InputError("constraint '" + c.expr + "' needs a fixed lambda for this command");
  return cfg.constraintSet().combinedPotential();
}

}  // namespace

int cmdFit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GridSpec g = cfg.grid();
    const ConstraintSet cs = cfg.constraintSet();
    if (cs.empty()) throw InputError("fit needs at least one constraint");
    prepare(cfg);
    const FitResult r = fitMultipliers(cs, g, {cfg.tolerance, cfg.maxIterations});
    writeJsonFile(file(cfg, "fit_report.json"), toJson(r.report));
    writeDensity(cfg, "density", r.density);
    out << "lambda";
    for (double l : r.report.lambda) out << ' ' << fmt17(l);
    out << "\nresidual " << fmt17(r.report.residual) << " after " << r.report.iterations << " iterations\n";
    if (!r.report.converged) {
      err << "error: multiplier fit did not converge within " << cfg.maxIterations << " iterations\n";
      return static_cast<int>(kExitSolver);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmdTransport(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GridSpec g = cfg.grid();
    if (cfg.path.size() < 2) throw InputError("transport.path needs at least two vertices");
    const Connection conn = cfg.drift.empty() ? Connection::exact(fixedPotential(cfg))
                                              : Connection::fromComponents(cfg.driftExprs(), -1.0);
    prepare(cfg);
    const Polyline path{cfg.path, cfg.closedPath};
    const TransportResult r = parallelTransport(conn, path);
    Json j = toJson(r);

    // Spread over random paths with the same endpoints; a closed path is
    // compared against the constant path, so its factor alone decides.
    double spread = 0.0;
    if (cfg.closedPath) {
      spread = std::abs(std::expm1(-r.integral));
    } else {
      spread = pathIndependenceCheck(conn, g, cfg.path.front(), cfg.path.back(), cfg.paths, cfg.seed);
    }
    j["pathSpread"] = spread;
    j["tolerance"] = cfg.pathTolerance;
    writeJsonFile(file(cfg, "transport.json"), j);
    out << "factor " << fmt17(r.factor) << "\nspread " << fmt17(spread) << "\n";
    if (!(spread <= cfg.pathTolerance)) {
      err << "error: transport is path dependent (spread " << fmt17(spread) << " > " << fmt17(cfg.pathTolerance)
          << ")\n";
      return static_cast<int>(kExitNotSolvable);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmdEvolve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GridSpec g = cfg.grid();
    FPConfig fp;
    std::optional<Density> reference;
    if (cfg.drift.empty()) {
      const Expr j = fixedPotential(cfg);
      fp.drift = Drift::gradient(j, 1.0);
      reference = buildDensityByTransport(Connection::exact(j, 1.0 / cfg.diffusion), g);
    } else {
      fp.drift = Drift::fromComponents(cfg.driftExprs());
    }
    fp.diffusion = cfg.diffusion;
    fp.dt = cfg.dt;
    fp.endTime = cfg.endTime;
    fp.sampleEvery = cfg.sampleEvery;
    prepare(cfg);
    const FPTrajectory traj = evolveFP(uniformDensity(g), fp);

    Json snaps = Json::array();
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
      const FPSnapshot& s = traj.snapshots[i];
      std::array<char, 64> name{};
      std::snprintf(name.data(), name.size(), "snapshot_%04zu_t%.6f.csv", i, s.time);
      std::ofstream csv(file(cfg, name.data()), std::ios::binary);
      writeCsv(csv, s.density.field);
      Json e;
      e["file"] = name.data();
      e["time"] = s.time;
      e["mass"] = s.mass;
      e["min"] = s.minValue;
      e["freeEnergy"] = s.freeEnergy ? Json(*s.freeEnergy) : Json(nullptr);
      if (reference) e["l1ToStationary"] = l1Distance(s.density.field, reference->field);
      snaps.push_back(e);
    }
    Json j;
    j["steps"] = traj.steps;
    j["dt"] = cfg.dt;
    j["dtMax"] = traj.dtMax;
    j["warnings"] = traj.warnings;
    j["snapshots"] = snaps;
    writeJsonFile(file(cfg, "evolve.json"), j);
    for (const std::string& w : traj.warnings) err << "warning: " << w << "\n";
    out << "steps " << traj.steps << "\n";
    if (reference) out << "l1 " << fmt17(snaps.back()["l1ToStationary"].get<double>()) << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmdSample(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GridSpec g = cfg.grid();
    if (!cfg.drift.empty()) throw InputError("sample needs a gradient drift given by fixed-lambda constraints");
    const Expr j = fixedPotential(cfg);
    prepare(cfg);
    const LangevinResult r = langevinSample(j, 1.0, cfg.diffusion, g, {cfg.particles, cfg.dt, cfg.endTime, cfg.seed});
    const Density reference = buildDensityByTransport(Connection::exact(j, 1.0 / cfg.diffusion), g);
    writeDensity(cfg, "histogram", r.histogram);
    Json s;
    s["particles"] = cfg.particles;
    s["steps"] = r.steps;
    s["dt"] = cfg.dt;
    s["T"] = cfg.endTime;
    s["seed"] = cfg.seed;
    s["l1ToStationary"] = l1Distance(r.histogram.field, reference.field);
    writeJsonFile(file(cfg, "sample.json"), s);
    out << "l1 " << fmt17(s["l1ToStationary"].get<double>()) << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmdCertify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GridSpec g = cfg.grid();
    std::vector<Expr> drift;
    if (!cfg.drift.empty()) {
      drift = cfg.driftExprs();
    } else {
      const Expr j = fixedPotential(cfg);
      for (int i = 0; i < cfg.dimension; ++i) drift.push_back((-cfg.lambda) * j.derivative(i));
    }
    prepare(cfg);
    const CertifyTolerances tol{cfg.curvatureTolerance, cfg.pathTolerance, cfg.fpTolerance};
    const StationarityCertificate c = certifyStationarity(drift, cfg.lambda, g, tol, cfg.seed, cfg.diffusion);
    writeJsonFile(file(cfg, "certificate.json"), toJson(c));
    if (c.density) writeDensity(cfg, "density", *c.density);
    out << "verdict " << (c.solvable ? "solvable" : "not solvable") << "\n";
    return static_cast<int>(c.solvable ? kExitOk : kExitNotSolvable);
  });
}

int cmdContour(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GridSpec g = cfg.grid();
    if (cfg.levels.empty()) throw InputError("contour.levels is empty");
    const Expr j = fixedPotential(cfg);
    prepare(cfg);
    Json curves = Json::array();
    for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
      const auto lines = traceLevelSet(j, g, cfg.levels[i], cfg.step, cfg.maxSteps);
      const std::string name = "contour_" + std::to_string(i) + ".csv";
      std::ofstream csv(file(cfg, name), std::ios::binary);
      writePolylinesCsv(csv, lines);
      Json closed = Json::array();
      for (const Polyline& p : lines) closed.push_back(p.closed);
      curves.push_back(Json{{"level", cfg.levels[i]}, {"file", name}, {"curves", lines.size()}, {"closed", closed}});
      out << "level " << fmt17(cfg.levels[i]) << ": " << lines.size() << " curve(s)\n";
    }
    writeJsonFile(file(cfg, "contour.json"), Json{{"levels", curves}});
    return static_cast<int>(kExitOk);
  });
}

int runCommand(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (name == "fit") return cmdFit(cfg, out, err);
  if (name == "transport") return cmdTransport(cfg, out, err);
  if (name == "evolve") return cmdEvolve(cfg, out, err);
  if (name == "sample") return cmdSample(cfg, out, err);
  if (name == "certify") return cmdCertify(cfg, out, err);
  if (name == "contour") return cmdContour(cfg, out, err);
  err << "error: unknown command '" << name << "'\n";
  return kExitConfig;
}

}  // namespace entrans
