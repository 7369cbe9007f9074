#include "pdattack/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "pdattack/analysis/calibration.hpp"
#include "pdattack/analysis/certificates.hpp"
#include "pdattack/analysis/initial_condition.hpp"
#include "pdattack/analysis/outcome.hpp"
#include "pdattack/cli/scenario.hpp"
#include "pdattack/error.hpp"

namespace pdattack::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string seconds(const std::optional<double>& t) { return t ? fmt("%.6g", *t) + " s" : "none"; }

void header(std::ostream& out, const char* command, const GlobalOptions& opts) {
  out << "pdattack " << command << "\n";
  if (opts.timestamps) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "generated: " << buf << "\n";
  }
  out << "config: " << opts.config << "\n";
}

Scenario load(const GlobalOptions& opts) {
  Scenario s = load_scenario(opts.config);
  if (opts.seed) s.noise.seed = *opts.seed;
  return s;
}

void require_run_setup(const Scenario& s) {
  if (!s.plant) throw ConfigError("plant: required key missing");
  if (!s.nominal) throw ConfigError("nominal: required key missing");
}

std::string prepare_out_dir(const GlobalOptions& opts) {
  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec || !fs::is_directory(opts.out_dir))
    throw std::ios_base::failure("cannot create output directory " + opts.out_dir);
  return opts.out_dir;
}

CalibrationScenario calibration_setup(const Scenario& s) { return {*s.plant, s.nominal->K_n(), s.sim}; }

// Replaces the configured threshold when the detector asks for calibration.
void maybe_calibrate(Scenario& s, std::ostream& out) {
  if (!s.calibration) return;
  const auto cal = calibrate_threshold(calibration_setup(s), s.calibration->n_runs, s.noise, s.calibration->settle);
  s.detector.epsilon = cal.epsilon;
  out << "calibrated epsilon: " << fmt("%.6g", cal.epsilon) << " (" << s.calibration->n_runs << " runs)\n";
}

struct RunResult {
  std::string name;
  Outcome outcome;
  std::string csv;
  std::size_t samples = 0;
  bool diverged = false;
};

RunResult run_one(const Scenario& s, const std::optional<AttackSpec>& spec, const std::string& csv_path) {
  std::optional<AttackEngine> engine;
  if (spec) engine = build_engine(s, *spec);
  const SimTrace trace = run_closed_loop(*s.plant, s.nominal->K_n(), std::move(engine), s.sim, s.noise, s.detector);
  write_trace_csv(trace, csv_path, s.csv_stride);
  return {spec ? spec->name : "none", evaluate_outcome(trace, s.detector, s.sim), csv_path, trace.size(), trace.diverged};
}

void print_outcome(std::ostream& out, const RunResult& r, double epsilon) {
  const Outcome& o = r.outcome;
  out << "attack: " << r.name << "\n";
  out << "samples: " << r.samples << (r.diverged ? " (stopped: diverged)" : "") << "\n";
  out << "classification: " << to_string(o.classification) << "\n";
  out << "stealthy: " << (o.stealthy_over_window ? "yes" : "no") << "\n";
  out << "destructive: " << (o.destructive ? "yes" : "no") << "\n";
  out << "detection_time: " << seconds(o.detection_time) << "\n";
  out << "limit_cross_time: " << seconds(o.limit_cross_time) << "\n";
  out << "sup_residual: " << fmt("%.6g", o.sup_residual) << "\n";
  out << "epsilon: " << fmt("%.6g", epsilon) << "\n";
  if (o.mapda_type) out << "mapda_type: " << to_string(*o.mapda_type) << "\n";
  out << "trace: " << r.csv << "\n";
}

const char* half_plane_name(HalfPlane h) {
  switch (h) {
    case HalfPlane::OpenRight: return "open right";
    case HalfPlane::ImaginaryAxis: return "imaginary axis";
    case HalfPlane::OpenLeft: return "open left";
  }
  return "?";
}

void print_matrix(std::ostream& out, const Mat& m, const char* f) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << " ";
    for (std::size_t j = 0; j < m.cols(); ++j) out << " " << fmt(f, m(i, j));
    out << "\n";
  }
}

}  // namespace

void write_trace_csv(const SimTrace& trace, const std::string& path, std::size_t stride) {
  if (stride == 0) throw Error(ErrorKind::InvalidArgument, "csv stride must be >= 1");
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::ios_base::failure("cannot write " + path);
  const std::size_t p = trace.state_dim, m = trace.input_dim, q = trace.output_dim;
  std::string head = "t";
  for (std::size_t i = 1; i <= p; ++i) head += ",x" + std::to_string(i);
  for (std::size_t i = 1; i <= p; ++i) head += ",a" + std::to_string(i);
  for (std::size_t i = 1; i <= p; ++i) head += ",xa" + std::to_string(i);
  for (std::size_t i = 1; i <= m; ++i) head += ",u" + std::to_string(i);
  for (std::size_t i = 1; i <= q; ++i) head += ",z" + std::to_string(i);
  head += ",res_norm,alarm\n";
  std::fputs(head.c_str(), f);
  auto put = [&](std::span<const double> v) {
    for (double x : v) std::fprintf(f, ",%.17g", x);
  };
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (k % stride != 0 && k + 1 != trace.size()) continue;
    std::fprintf(f, "%.17g", trace.times[k]);
    put(trace.state(k));
    put(trace.attack(k));
    put(trace.network(k));
    put(trace.control(k));
    put(trace.output(k));
    std::fprintf(f, ",%.17g,%d\n", trace.residual_norm[k], trace.alarm[k]);
  }
  const bool bad = std::ferror(f) != 0;
  if (std::fclose(f) != 0 || bad) throw std::ios_base::failure("error writing " + path);
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::DecompositionFailed:
        err << "error: " << e.what() << "\n"
            << "hint: supply check_ic.X and check_ic.J (a Jordan decomposition M = X J X^-1)\n";
        return kExitDecomposition;
      case ErrorKind::Asymmetric:
      case ErrorKind::AsymmetricQ:
      case ErrorKind::NotPositiveDefinite:
        err << "error: " << e.what() << "\n";
        return kExitDefiniteness;
      case ErrorKind::DimensionMismatch:
      case ErrorKind::InvalidArgument:
      case ErrorKind::NotHurwitz:
      case ErrorKind::NonFinite:
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
      default:
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_simulate(const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        Scenario s = load(opts);
        require_run_setup(s);
        if (s.attacks.size() > 1) throw ConfigError("attacks: simulate runs one attack; use compare for several");
        const std::string dir = prepare_out_dir(opts);
        header(out, "simulate", opts);
        maybe_calibrate(s, out);
        std::optional<AttackSpec> spec;
        if (!s.attacks.empty()) spec = s.attacks.front();
        const RunResult r = run_one(s, spec, (fs::path(dir) / "trace.csv").string());
        print_outcome(out, r, s.detector.epsilon);
        return static_cast<int>(kExitOk);
      },
      err);
}

int cmd_compare(const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        Scenario s = load(opts);
        require_run_setup(s);
        if (s.attacks.size() < 2) throw ConfigError("attacks: compare needs at least 2 attack specs");
        const std::string dir = prepare_out_dir(opts);
        header(out, "compare", opts);
        maybe_calibrate(s, out);
        std::vector<RunResult> results;
        for (const auto& spec : s.attacks)
          results.push_back(run_one(s, spec, (fs::path(dir) / ("trace_" + spec.name + ".csv")).string()));
        out << "epsilon: " << fmt("%.6g", s.detector.epsilon) << "\n";
        char line[256];
        std::snprintf(line, sizeof line, "%-24s %-12s %-14s %-16s %-12s %s\n", "attack", "class", "detection",
                      "limit_cross", "sup_res", "sup/eps");
        out << line;
        for (const auto& r : results) {
          std::snprintf(line, sizeof line, "%-24s %-12s %-14s %-16s %-12.6g %.4g\n", r.name.c_str(),
                        std::string(to_string(r.outcome.classification)).c_str(), seconds(r.outcome.detection_time).c_str(),
                        seconds(r.outcome.limit_cross_time).c_str(), r.outcome.sup_residual,
                        r.outcome.sup_residual / s.detector.epsilon);
          out << line;
        }
        for (const auto& r : results) out << "trace: " << r.csv << "\n";
        return static_cast<int>(kExitOk);
      },
      err);
}

int cmd_calibrate(const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        Scenario s = load(opts);
        require_run_setup(s);
        CalibrationSpec cal = s.calibration.value_or(CalibrationSpec{});
        if (opts.runs) {
          if (*opts.runs < 2) throw ConfigError("--runs: must be >= 2");
          cal.n_runs = static_cast<std::size_t>(*opts.runs);
        }
        const std::string dir = prepare_out_dir(opts);
        header(out, "calibrate", opts);
        const auto result = calibrate_threshold(calibration_setup(s), cal.n_runs, s.noise, cal.settle);
        const std::string csv = (fs::path(dir) / "calibration.csv").string();
        std::FILE* f = std::fopen(csv.c_str(), "w");
        if (!f) throw std::ios_base::failure("cannot write " + csv);
        std::fputs("run,seed,sup_residual\n", f);
        for (std::size_t i = 0; i < result.sup_samples.size(); ++i)
          std::fprintf(f, "%zu,%llu,%.17g\n", i, static_cast<unsigned long long>(result.seeds[i]), result.sup_samples[i]);
        if (std::fclose(f) != 0) throw std::ios_base::failure("error writing " + csv);
        out << "runs: " << cal.n_runs << "\n";
        out << "base_seed: " << s.noise.seed << "\n";
        out << "sigma_meas: " << fmt("%.6g", s.noise.sigma_meas) << "\n";
        out << "settle: " << fmt("%.6g", cal.settle) << " s\n";
        out << "mean: " << fmt("%.6g", result.mean) << "\n";
        out << "std: " << fmt("%.6g", result.std) << "\n";
        out << "epsilon: " << fmt("%.6g", result.epsilon) << "\n";
        out << "samples: " << csv << "\n";
        return static_cast<int>(kExitOk);
      },
      err);
}

int cmd_check_ic(const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const Scenario s = load(opts);
        if (!s.check_ic) throw ConfigError("check_ic: required key missing");
        const CheckIcSpec& c = *s.check_ic;
        const auto r = check_initial_condition(c.M, c.x0, c.X, c.J, c.reconstruction_tolerance);
        header(out, "check-ic", opts);
        out << "eigenvalues:\n";
        for (const auto& e : r.eigen_report) {
          out << "  " << fmt("%.6g", e.eigenvalue.real());
          if (e.eigenvalue.imag() != 0.0) out << " ± " << fmt("%.6g", e.eigenvalue.imag()) << "i";
          out << "  multiplicity " << e.multiplicity << "  " << half_plane_name(e.half_plane)
              << (e.defective ? "  defective" : "") << "\n";
        }
        out << "psi0:";
        for (std::size_t i = 0; i < r.psi0.dim(); ++i) out << " " << fmt("%.6e", r.psi0[i]);
        out << "\n";
        if (!r.violating_indices.empty()) {
          out << "nonzero components (1-based):";
          for (auto i : r.violating_indices) out << " " << i + 1;
          out << "\n";
        }
        out << "verdict: " << (r.satisfies_condition ? "satisfies" : "does not satisfy")
            << " the convergence condition\n";
        return static_cast<int>(kExitOk);
      },
      err);
}

int cmd_omega(const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const Scenario s = load(opts);
        if (!s.omega) throw ConfigError("omega: required key missing");
        const OmegaSpec& o = *s.omega;
        const Mat omega = assemble_omega(o.A, o.B, o.K, o.P1, o.P2, o.P3, o.P4, o.h);
        const auto verdict = omega_is_negative_definite(omega);
        const std::size_t p = o.A.rows();
        header(out, "omega", opts);
        out << "h: " << fmt("%.6g", o.h) << "\n";
        out << "block Frobenius norms:\n";
        for (std::size_t i = 0; i < 3; ++i) {
          out << " ";
          for (std::size_t j = 0; j < 3; ++j) out << " " << fmt("%12.6g", omega.block(i * p, j * p, p, p).frobenius_norm());
          out << "\n";
        }
        out << "Omega:\n";
        print_matrix(out, omega, "%.15g");
        out << "lambda_max: " << fmt("%.12g", verdict.lambda_max) << "\n";
        out << "verdict: " << (verdict.negative_definite ? "negative definite" : "not negative definite") << "\n";
        return static_cast<int>(kExitOk);
      },
      err);
}

}  // namespace pdattack::cli
