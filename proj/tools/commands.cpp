#include "commands.hpp"

#include <atomic>
#include <cstdio>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>

#include <fraclab/assembly.hpp>
#include <fraclab/errors.hpp>

#include "report.hpp"

namespace fraclab::cli {

using nlohmann::json;

namespace {

/// Runs f(0..count-1) on a pool and returns results in index order, so
/// output never depends on scheduling.
template <class R>
std::vector<R> parallel_map(int jobs, std::size_t count, const std::function<R(std::size_t)>& f) {
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::vector<R> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

struct Task {
  double s;
  int n;
};

std::vector<Task> sweep(const RunConfig& cfg) {
  std::vector<Task> t;
  for (double s : cfg.s) {
    for (int n : cfg.n) t.push_back({s, n});
  }
  return t;
}

std::string run_tag(const Task& t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "s%g_n%d", t.s, t.n);
  return buf;
}

void emit_outputs(const RunConfig& cfg, const json& j, const std::string& csv) {
  write_file(cfg.output.json, dump(j));
  write_file(cfg.output.csv, csv);
}

std::vector<EigenPair> eigenpairs(const Mesh1D& mesh, const AssembledForms& f, int k, bool even_only) {
  const int kk = std::min(k, mesh.dof_count());
  return even_only ? solve_geig_even(mesh, f.stiffness, f.mass, kk) : solve_geig(f.stiffness, f.mass, kk);
}

BoundaryPoint1D endpoint(const Domain1D& d, const std::string& which) {
  const auto pts = d.boundary_points();
  return which == "left" ? pts.front() : pts.back();
}

// Smooth C^2 bump (1 - t^2)^3 on the support, t mapped to [-1, 1].
struct Bump {
  Interval support;
  double operator()(double x) const {
    const double t = (2.0 * x - support.a - support.b) / support.length();
    const double w = 1.0 - t * t;
    return w > 0.0 ? w * w * w : 0.0;
  }
  double derivative(double x) const {
    const double t = (2.0 * x - support.a - support.b) / support.length();
    const double w = 1.0 - t * t;
    return w > 0.0 ? -6.0 * t * w * w * 2.0 / support.length() : 0.0;
  }
};

}  // namespace

std::string tagged_path(const std::string& path, const std::string& tag) {
  if (path.empty()) return path;
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "_" + tag;
  return path.substr(0, dot) + "_" + tag + path.substr(dot);
}

int run_eigen(const RunConfig& cfg, std::ostream& out) {
  const Domain1D domain = cfg.domain();
  const auto tasks = sweep(cfg);
  struct Result {
    Mesh1D mesh;
    std::vector<EigenPair> pairs;
    SpectrumReport spectrum;
  };
  const auto results = parallel_map<Result>(cfg.jobs, tasks.size(), [&](std::size_t i) {
    Mesh1D mesh = Mesh1D::make(domain, tasks[i].n, cfg.beta);
    const AssembledForms f = assemble_forms(mesh, tasks[i].s);
    auto pairs = eigenpairs(mesh, f, cfg.k_max, cfg.even_only);
    std::vector<double> lambdas;
    for (const auto& p : pairs) lambdas.push_back(p.lambda);
    auto spec = spectrum_report(lambdas, static_cast<int>(domain.size()), cfg.even_only, 1e-4);
    return Result{std::move(mesh), std::move(pairs), std::move(spec)};
  });

  json j = {{"command", "eigen"}, {"even_only", cfg.even_only}, {"beta", cfg.beta}, {"runs", json::array()}};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& r = results[i];
    out << "# eigen s=" << fmt(tasks[i].s) << " n=" << tasks[i].n << (cfg.even_only ? " even_only" : "") << "\n";
    out << "k lambda gap\n";
    Csv csv{{"k", "lambda", "gap"}, {}};
    json run = {{"s", tasks[i].s}, {"n", tasks[i].n}, {"spectrum", to_json(r.spectrum)}};
    const auto x = r.mesh.dof_coordinates();
    run["x"] = std::vector<double>(x.begin(), x.end());
    run["eigenpairs"] = json::array();
    for (std::size_t k = 0; k < r.pairs.size(); ++k) {
      const std::string gap = k < r.spectrum.gaps.size() ? fmt(r.spectrum.gaps[k]) : "";
      out << k + 1 << " " << fmt(r.pairs[k].lambda) << " " << gap << "\n";
      csv.add({std::to_string(k + 1), fmt(r.pairs[k].lambda), gap});
      run["eigenpairs"].push_back({{"k", k + 1}, {"lambda", r.pairs[k].lambda}, {"u", to_json(r.pairs[k].u)}});
    }
    j["runs"].push_back(run);
    write_file(tasks.size() == 1 ? cfg.output.csv : tagged_path(cfg.output.csv, run_tag(tasks[i])), csv.str());
  }
  write_file(cfg.output.json, dump(j));
  return 0;
}

int run_verify(const RunConfig& cfg, std::ostream& out) {
  const Domain1D domain = cfg.domain();
  const auto tasks = sweep(cfg);
  const SolveSettings base{0, cfg.beta};

  if (cfg.identity == "hadamard") {
    const BoundaryPoint1D bp = endpoint(domain, cfg.hadamard.endpoint);
    const auto reports = parallel_map<HadamardReport>(cfg.jobs, tasks.size(), [&](std::size_t i) {
      SolveSettings st = base;
      st.n = tasks[i].n;
      return hadamard_check(domain, tasks[i].s, cfg.k, bp, cfg.hadamard.h, cfg.even_only, st, cfg.window);
    });
    Csv csv{{"identity", "s", "n", "lhs", "rhs", "rel_residual", "pass"}, {}};
    json j = {{"command", "verify"}, {"identity", "hadamard"}, {"tol", cfg.tol}, {"reports", json::array()}};
    bool pass = true;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const auto& r = reports[i];
      const bool ok = r.rel_error <= cfg.tol;
      if (i + 1 == tasks.size() || tasks[i + 1].s != tasks[i].s) pass = pass && ok;
      csv.add({"hadamard", fmt(tasks[i].s), std::to_string(tasks[i].n), fmt(r.fd_slope), fmt(r.formula),
               fmt(r.rel_error), ok ? "1" : "0"});
      json rj = to_json(r);
      rj["s"] = tasks[i].s;
      rj["n"] = tasks[i].n;
      j["reports"].push_back(rj);
      out << "hadamard s=" << fmt(tasks[i].s) << " n=" << tasks[i].n << " k=" << r.k << " fd=" << fmt(r.fd_slope)
          << " formula=" << fmt(r.formula) << " rel=" << fmt(r.rel_error) << (ok ? " PASS" : " FAIL") << "\n";
    }
    j["pass"] = pass;
    emit_outputs(cfg, j, csv.str());
    return pass ? 0 : 1;
  }

  const int dim = 1;
  const VectorField X = cfg.make_field(dim);
  const auto reports = parallel_map<PohozaevReport>(cfg.jobs, tasks.size(), [&](std::size_t i) -> PohozaevReport {
    const double s = tasks[i].s;
    const int n = tasks[i].n;
    if (cfg.identity == "lemma21") {
      const Bump U{cfg.lemma.support};
      Lemma21Options o;
      o.tol = cfg.lemma.quad_tol;
      o.interpolant_n = n;
      return lemma21_check(U, [U](double x) { return U.derivative(x); }, cfg.lemma.support, domain, X, s, o);
    }
    Mesh1D mesh = Mesh1D::make(domain, n, cfg.beta);
    const AssembledForms f = assemble_forms(mesh, s);
    if (cfg.identity == "pohozaev" && cfg.nonlinearity.kind == "power") {
      const auto sol = solve_semilinear(f, cfg.nonlinearity.p);
      return pohozaev_check(mesh, s, sol.u, X, Nonlinearity::power(cfg.nonlinearity.p), nullptr, cfg.window);
    }
    const int need = cfg.identity == "ibp" ? std::max(cfg.k, cfg.second) : cfg.k;
    const auto pairs = eigenpairs(mesh, f, need, cfg.even_only);
    if (static_cast<int>(pairs.size()) < need) throw ConfigError("mesh too coarse for the requested eigenpair");
    const EigenPair& pair = pairs[static_cast<std::size_t>(cfg.k - 1)];
    if (cfg.identity == "ros-oton-serra") return ros_oton_serra_check(mesh, s, pair, cfg.window);
    if (cfg.identity == "l2-radial") return l2_identity_check(mesh, s, pair, cfg.window);
    if (cfg.identity == "ibp") {
      return ibp_check(mesh, s, pair, pairs[static_cast<std::size_t>(cfg.second - 1)], X, nullptr, cfg.window);
    }
    return pohozaev_check(mesh, s, pair.u, X, Nonlinearity::linear(pair.lambda), nullptr, cfg.window);
  });

  Csv csv{{"identity", "s", "n", "lhs", "rhs", "rel_residual", "pass"}, {}};
  json j = {{"command", "verify"}, {"identity", cfg.identity}, {"tol", cfg.tol}, {"reports", json::array()}};
  bool pass = true;
  std::vector<std::pair<int, double>> history;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    PohozaevReport r = reports[i];
    history.emplace_back(tasks[i].n, r.rel_residual);
    r.history = history;
    const bool ok = r.rel_residual <= cfg.tol;
    const bool last_for_s = i + 1 == tasks.size() || tasks[i + 1].s != tasks[i].s;
    if (last_for_s) {
      pass = pass && ok;
      history.clear();
    }
    csv.add({cfg.identity, fmt(r.s), std::to_string(tasks[i].n), fmt(r.lhs), fmt(r.rhs), fmt(r.rel_residual),
             ok ? "1" : "0"});
    j["reports"].push_back(to_json(r));
    out << cfg.identity << " s=" << fmt(r.s) << " n=" << tasks[i].n << " lhs=" << fmt(r.lhs) << " rhs=" << fmt(r.rhs)
        << " rel=" << fmt(r.rel_residual) << (ok ? " PASS" : " FAIL") << "\n";
  }
  j["pass"] = pass;
  emit_outputs(cfg, j, csv.str());
  return pass ? 0 : 1;
}

int run_certify(const RunConfig& cfg, std::ostream& out) {
  const VectorField X = cfg.make_field(2);
  const Box& box = X.box();
  std::optional<double> flux;
  std::vector<BoundarySample2D> boundary;
  if (cfg.implicit) {
    boundary = sample_boundary_2d(*cfg.implicit, cfg.certify.boundary_grid);
    flux = min_flux(X, boundary);
  }

  std::vector<ConditionCertificate> certs;
  for (const auto& kind : cfg.certify.kinds) {
    if (kind == "c") certs.push_back(check_c_condition(X, box, cfg.certify.samples, cfg.seed));
    if (kind == "c1c2") certs.push_back(check_c1_c2(X, box, cfg.certify.samples, cfg.seed));
    if (kind == "flux") certs.push_back(flux_certificate(X, boundary, cfg.certify.flux_tol));
  }

  Csv csv{{"kind", "constant_1", "constant_2", "min_flux", "verdict"}, {}};
  json j = {{"command", "certify"}, {"seed", cfg.seed}, {"certificates", json::array()}};
  j["min_flux"] = flux ? json(*flux) : json(nullptr);
  bool pass = true;
  std::optional<std::pair<double, double>> c1c2;
  for (const auto& c : certs) {
    pass = pass && c.pass;
    const std::string k1 = c.constants.size() > 0 ? fmt(c.constants[0]) : "";
    const std::string k2 = c.constants.size() > 1 ? fmt(c.constants[1]) : "";
    const std::string mf = flux ? fmt(*flux) : "";
    csv.add({to_string(c.kind), k1, k2, mf, c.pass ? "pass" : "fail"});
    j["certificates"].push_back(to_json(c));
    out << to_string(c.kind) << " constants=[" << k1 << (k2.empty() ? "" : ", " + k2) << "] min_flux=" << mf
        << (c.pass ? " PASS" : " FAIL") << "\n";
    // A c-condition certificate is the c1 = cN, c2 = c case.
    if (c.pass && c.kind == CertificateKind::kC1C2Condition) c1c2 = {c.constants[0], c.constants[1]};
    if (c.pass && c.kind == CertificateKind::kCCondition && !c1c2) c1c2 = {2.0 * c.constants[0], c.constants[0]};
  }

  if (c1c2) {
    const auto [c1, c2] = *c1c2;
    const int N = 2;
    const double num = 2.0 * N;
    const double den = 2.0 * c1 / c2 - N;
    std::ostringstream line;
    line << "threshold: p > " << num << "/(" << den << "-2s), admissible s in (0, " << fmt(0.5 * den) << ")";
    out << line.str() << "\n";
    json th = {{"formula", line.str()}, {"c1", c1}, {"c2", c2}, {"values", json::array()}};
    for (double s : cfg.certify.s) {
      const double p = nonexistence_threshold(c1, c2, N, s);
      out << "s=" << fmt(s) << " p*=" << fmt(p) << "\n";
      th["values"].push_back({{"s", s}, {"p_star", p}});
    }
    j["threshold"] = th;
  }
  j["pass"] = pass;
  emit_outputs(cfg, j, csv.str());
  return pass ? 0 : 1;
}

int run_semilinear(const RunConfig& cfg, std::ostream& out) {
  const Domain1D domain = cfg.domain();
  const auto tasks = sweep(cfg);
  const VectorField X = cfg.make_field(1);
  const double p = cfg.nonlinearity.p;
  struct Result {
    Mesh1D mesh;
    SemilinearSolution sol;
    PohozaevReport check;
  };
  const auto results = parallel_map<Result>(cfg.jobs, tasks.size(), [&](std::size_t i) {
    Mesh1D mesh = Mesh1D::make(domain, tasks[i].n, cfg.beta);
    const AssembledForms f = assemble_forms(mesh, tasks[i].s);
    auto sol = solve_semilinear(f, p);
    auto check = pohozaev_check(mesh, tasks[i].s, sol.u, X, Nonlinearity::power(p), nullptr, cfg.window);
    return Result{std::move(mesh), std::move(sol), std::move(check)};
  });

  json j = {{"command", "semilinear"}, {"p", p}, {"runs", json::array()}};
  bool pass = true;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& r = results[i];
    const bool ok = r.check.rel_residual <= cfg.tol;
    pass = pass && ok;
    out << "semilinear s=" << fmt(tasks[i].s) << " n=" << tasks[i].n << " p=" << fmt(p)
        << " iterations=" << r.sol.iterations << " residual=" << fmt(r.sol.residual)
        << " pohozaev_rel=" << fmt(r.check.rel_residual) << (ok ? " PASS" : " FAIL") << "\n";
    Csv csv{{"x", "u"}, {}};
    const auto x = r.mesh.dof_coordinates();
    for (std::size_t q = 0; q < x.size(); ++q) csv.add({fmt(x[q]), fmt(r.sol.u(static_cast<Eigen::Index>(q)))});
    write_file(tasks.size() == 1 ? cfg.output.csv : tagged_path(cfg.output.csv, run_tag(tasks[i])), csv.str());
    j["runs"].push_back({{"s", tasks[i].s},
                         {"n", tasks[i].n},
                         {"iterations", r.sol.iterations},
                         {"residual", r.sol.residual},
                         {"nehari_gap", r.sol.nehari_gap},
                         {"x", std::vector<double>(x.begin(), x.end())},
                         {"u", to_json(r.sol.u)},
                         {"pohozaev", to_json(r.check)}});
  }
  j["pass"] = pass;
  write_file(cfg.output.json, dump(j));
  return pass ? 0 : 1;
}

int run_fraclap(const RunConfig& cfg, std::ostream& out) {
  const Expression phi = Expression::parse(cfg.fraclap.function);
  if (phi.arity() > 1) throw ConfigError("fraclap.function must depend on x only");
  FracLapOptions opt;
  opt.R = cfg.fraclap.R;
  opt.tol = cfg.fraclap.tol;
  opt.support = cfg.fraclap.support;
  if (opt.support) opt.panel = std::min(1.0, opt.support->length());
  auto f = [&phi](double x) { return phi(x); };

  std::vector<std::pair<double, double>> jobs;
  for (double s : cfg.s) {
    for (double x : cfg.fraclap.points) jobs.emplace_back(s, x);
  }
  const auto values = parallel_map<PointwiseValue>(cfg.jobs, jobs.size(), [&](std::size_t i) {
    return frac_laplacian_pointwise(f, jobs[i].first, jobs[i].second, opt);
  });
  Csv csv{{"s", "x", "value", "error"}, {}};
  json j = {{"command", "fraclap"}, {"function", cfg.fraclap.function}, {"values", json::array()}};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    csv.add({fmt(jobs[i].first), fmt(jobs[i].second), fmt(values[i].value), fmt(values[i].error)});
    j["values"].push_back(
        {{"s", jobs[i].first}, {"x", jobs[i].second}, {"value", values[i].value}, {"error", values[i].error}});
    out << "s=" << fmt(jobs[i].first) << " x=" << fmt(jobs[i].second) << " value=" << fmt(values[i].value)
        << " error=" << fmt(values[i].error) << "\n";
  }
  emit_outputs(cfg, j, csv.str());
  return 0;
}

int dispatch(const RunConfig& cfg, std::ostream& out) {
  if (cfg.command == "eigen") return run_eigen(cfg, out);
  if (cfg.command == "verify") return run_verify(cfg, out);
  if (cfg.command == "certify") return run_certify(cfg, out);
  if (cfg.command == "semilinear") return run_semilinear(cfg, out);
  if (cfg.command == "fraclap") return run_fraclap(cfg, out);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

int exit_code_for(const std::exception& e) {
  // Anything traceable to the input is a configuration error.
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ArgumentError*>(&e) ||
      dynamic_cast<const ParseError*>(&e) || dynamic_cast<const RangeError*>(&e) ||
      dynamic_cast<const SupportError*>(&e) || dynamic_cast<const DimensionMismatchError*>(&e) ||
      dynamic_cast<const OverlapError*>(&e) || dynamic_cast<const DegenerateError*>(&e) ||
      dynamic_cast<const SupercriticalError*>(&e) || dynamic_cast<const NoBoundaryError*>(&e) ||
      dynamic_cast<const AsymmetricMeshError*>(&e)) {
    return 2;
  }
  return 1;
}

}  // namespace fraclab::cli
