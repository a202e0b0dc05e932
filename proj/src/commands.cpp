#include "dirapprox/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dirapprox/approx.hpp"
#include "dirapprox/latgeo.hpp"
#include "dirapprox/orbitmeasure.hpp"
#include "dirapprox/spheremeasure.hpp"

namespace dirapprox {

namespace {

namespace fs = std::filesystem;

std::string num(Real x) { return fmt::format("{:.17g}", static_cast<double>(x)); }

AlgebraicTuple build_tuple(const RunConfig& cfg) {
  return power_tuple(make_field(cfg.poly, cfg.precisionBits));
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out);
  std::ofstream f(fs::path(cfg.out) / name, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + (fs::path(cfg.out) / name).string());
  return f;
}

void write_manifest(const RunConfig& cfg, const std::string& command) {
  auto f = open_output(cfg, "manifest.txt");
  f << cfg.serialize() << "command=" << command << '\n' << "version=" << kVersion << '\n';
}

ScanOptions scan_options(const RunConfig& cfg, int threads) {
  ScanOptions o;
  o.threads = threads;
  if (cfg.scanStrategy == "linear") o.strategy = ScanStrategy::Linear;
  if (cfg.scanStrategy == "lattice") o.strategy = ScanStrategy::Lattice;
  return o;
}

Real floor_for(const RunConfig& cfg, unsigned k, int n) {
  if (cfg.epsFloor == "littlewood") return littlewood_floor(cfg.prime, k, n);
  return parse_real(cfg.epsFloor);
}

Orientation orientation_of(const RunConfig& cfg) {
  return cfg.orientation == "oriented" ? Orientation::Oriented : Orientation::Symmetric;
}

mpz_class power(std::uint64_t p, unsigned k) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), p, k);
  return out;
}

WeightedApproxList weighted_records(const RunConfig& cfg, const AlgebraicTuple& tuple, unsigned k,
                                    int threads) {
  const Real floor = floor_for(cfg, k, tuple.n);
  if (cfg.epsilon <= floor) {
    throw Error(ErrorCode::EpsilonBelowFloor,
                fmt::format("epsilon {} <= floor {} at k = {}", num(cfg.epsilon), num(floor), k));
  }
  auto records = scan_records(tuple, power(cfg.prime, k), cfg.epsilon, cfg.T, scan_options(cfg, threads));
  return sweep_weights(std::move(records), cfg.T, cfg.epsilon);
}

void write_records(std::ostream& f, const WeightedApproxList& list, int n) {
  f << "q";
  for (int i = 1; i <= n; ++i) f << ",p_" << i;
  f << ",delta,t_lo,t_hi,weight";
  for (int i = 1; i <= n; ++i) f << ",theta_" << i;
  f << '\n';
  for (std::size_t r = 0; r < list.records.size(); ++r) {
    const auto& rec = list.records[r];
    f << rec.q.get_str();
    for (const auto& p : rec.p) f << ',' << p.get_str();
    f << ',' << num(rec.delta) << ',' << num(rec.tLo) << ',' << num(rec.tHi) << ',' << num(list.weights[r]);
    for (Real x : rec.theta) f << ',' << num(x);
    f << '\n';
  }
}

void write_measure(std::ostream& f, const DirectionMeasure& mu) {
  const int n = mu.dim();
  if (n == 1) {
    f << "sign,weight\n";
  } else if (n == 2) {
    f << "angle,weight\n";
  } else {
    for (int i = 1; i <= n; ++i) f << "theta_" << i << ',';
    f << "weight\n";
  }
  for (const auto& a : mu.atoms()) {
    if (n == 1) {
      f << (a.direction[0] > 0 ? "1" : "-1");
    } else if (n == 2) {
      f << num(angle_of(a.direction));
    } else {
      for (int i = 0; i < n; ++i) f << (i ? "," : "") << num(a.direction[i]);
    }
    f << ',' << num(a.weight) << '\n';
  }
}

void write_orbit_measure(std::ostream& f, const RunConfig& cfg, const DirectionMeasure& mu,
                         std::size_t hits) {
  f << "# seed=" << cfg.seed << " L=" << format_real(cfg.L) << " N=" << cfg.N
    << " epsilon=" << format_real(cfg.epsilon) << " U=" << cfg.applyU << " orientation=" << cfg.orientation
    << " hits=" << hits << '\n';
  for (int i = 1; i <= mu.dim(); ++i) f << "theta_" << i << ',';
  f << "weight\n";
  for (const auto& a : mu.atoms()) {
    for (Real x : a.direction) f << num(x) << ',';
    f << num(a.weight) << '\n';
  }
}

struct OrbitSide {
  DirectionMeasure measure;
  std::size_t hits = 0;
};

OrbitSide orbit_side(const RunConfig& cfg, const AlgebraicTuple& tuple, unsigned k, int threads) {
  std::optional<SquareMatrix> U;
  if (cfg.applyU != "none") {
    const Conjugator c = solve_conjugator(tuple);
    U = cfg.applyU == "U" ? c.U : c.U0;
  }
  const auto samples = sample_orbit(hecke_scaled_lattice(tuple, cfg.prime, k), cfg.L, cfg.N, cfg.seed, threads);
  OrbitSide out;
  out.measure = pushforward_minvec(samples, cfg.epsilon, U, threads, orientation_of(cfg));
  out.hits = cone_hits(samples, cfg.epsilon, U, threads);
  return out;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::PrecisionExhausted: return kExitPrecision;
    case ErrorCode::TooManyPoints: return kExitResource;
    default: return kExitDomain;
  }
}

void cmd_field(const RunConfig& cfg, int, std::ostream& out) {
  write_manifest(cfg, "field");
  const AlgebraicTuple tuple = build_tuple(cfg);
  const EmbeddingLattice emb = embedding_lattice(tuple);
  const LatticeBasis y = conjugation_basis(tuple);
  const Conjugator conj = solve_conjugator(tuple);

  std::ostringstream report;
  report << "polynomial=";
  for (std::size_t i = 0; i < cfg.poly.size(); ++i) report << (i ? "," : "") << cfg.poly[i].get_str();
  report << "\ndegree=" << tuple.field.degree() << '\n'
         << "irreducibility_verified=" << (tuple.field.polynomial.irreducibility_verified() ? 1 : 0) << '\n'
         << "precision_bits=" << tuple.bits() << '\n';
  for (std::size_t j = 0; j < tuple.field.roots.size(); ++j) {
    report << "root_" << j + 1 << '=' << num(tuple.field.roots[j].midpoint()) << '\n';
  }
  for (int i = 1; i <= tuple.n; ++i) report << "alpha_" << i << '=' << num(tuple.alpha(i)) << '\n';
  report << "abs_det_B=" << num(emb.absDet) << '\n'
         << "discriminant=" << num(emb.absDet * emb.absDet) << '\n'
         << "det_U=" << num(conj.det) << '\n'
         << "U_residual=" << num(conj.residual) << '\n'
         << "U_block_residual=" << num(conj.blockResidual) << '\n';
  open_output(cfg, "field.txt") << report.str();
  {
    auto f = open_output(cfg, "embedding.csv");
    write_lattice_csv(f, emb.normalized);
  }
  {
    auto f = open_output(cfg, "conjugation_basis.csv");
    write_lattice_csv(f, y);
  }
  {
    auto f = open_output(cfg, "U.csv");
    write_matrix_csv(f, conj.U.entries);
  }
  {
    auto f = open_output(cfg, "U0.csv");
    write_matrix_csv(f, conj.U0.entries);
  }
  out << report.str();
}

void cmd_scan(const RunConfig& cfg, int threads, std::ostream& out) {
  write_manifest(cfg, "scan");
  const AlgebraicTuple tuple = build_tuple(cfg);
  const auto list = weighted_records(cfg, tuple, cfg.kMin, threads);
  auto f = open_output(cfg, "records.csv");
  write_records(f, list, tuple.n);
  out << "records=" << list.records.size() << '\n';
}

void cmd_weights(const RunConfig& cfg, int threads, std::ostream& out) {
  write_manifest(cfg, "weights");
  const AlgebraicTuple tuple = build_tuple(cfg);
  const auto list = weighted_records(cfg, tuple, cfg.kMin, threads);
  {
    auto f = open_output(cfg, "records.csv");
    write_records(f, list, tuple.n);
  }
  std::ostringstream report;
  report << "records=" << list.records.size() << '\n'
         << "total_weight=" << num(list.total_weight()) << '\n'
         << "empty_fraction=" << num(list.emptyFraction) << '\n';
  open_output(cfg, "weights.txt") << report.str();
  out << report.str();
}

void cmd_measure(const RunConfig& cfg, int threads, std::ostream& out) {
  write_manifest(cfg, "measure");
  const AlgebraicTuple tuple = build_tuple(cfg);
  for (unsigned k = cfg.kMin; k <= cfg.kMax; ++k) {
    const auto mu = measure_from_weights(weighted_records(cfg, tuple, k, threads), tuple.n);
    auto f = open_output(cfg, fmt::format("measure_k{}.csv", k));
    write_measure(f, mu);
    out << "k=" << k << " atoms=" << mu.atoms().size() << " mass=" << num(mu.total_mass()) << '\n';
  }
}

void cmd_orbit(const RunConfig& cfg, int threads, std::ostream& out) {
  write_manifest(cfg, "orbit");
  const AlgebraicTuple tuple = build_tuple(cfg);
  for (unsigned k = cfg.kMin; k <= cfg.kMax; ++k) {
    const OrbitSide side = orbit_side(cfg, tuple, k, threads);
    auto f = open_output(cfg, fmt::format("orbit_measure_k{}.csv", k));
    write_orbit_measure(f, cfg, side.measure, side.hits);
    out << "k=" << k << " hits=" << side.hits << " mass=" << num(side.measure.total_mass()) << '\n';
  }
}

void cmd_compare(const RunConfig& cfg, int threads, std::ostream& out) {
  write_manifest(cfg, "compare");
  const AlgebraicTuple tuple = build_tuple(cfg);
  std::ostringstream report;
  for (unsigned k = cfg.kMin; k <= cfg.kMax; ++k) {
    const auto mu = measure_from_weights(weighted_records(cfg, tuple, k, threads), tuple.n);
    const OrbitSide side = orbit_side(cfg, tuple, k, threads);
    {
      auto f = open_output(cfg, fmt::format("measure_k{}.csv", k));
      write_measure(f, mu);
    }
    {
      auto f = open_output(cfg, fmt::format("orbit_measure_k{}.csv", k));
      write_orbit_measure(f, cfg, side.measure, side.hits);
    }
    report << "k=" << k << '\n'
           << "approx_mass=" << num(mu.total_mass()) << '\n'
           << "orbit_mass=" << num(side.measure.total_mass()) << '\n'
           << "orbit_hits=" << side.hits << '\n'
           << "orbit_mass_stderr=" << (cfg.N > 0 ? num(std::sqrt(side.measure.total_mass() *
                                                                (1 - side.measure.total_mass()) / cfg.N))
                                                  : std::string("N/A"))
           << '\n'
           << "mass_gap=" << num(std::fabs(mu.total_mass() - side.measure.total_mass())) << '\n';
    const bool comparable = cfg.N > 0 && mu.total_mass() > 0 && side.measure.total_mass() > 0;
    if (!comparable) {
      report << "distance=N/A\n";
    } else if (tuple.n <= 2) {
      report << "distance=" << num(distance(normalize(mu), normalize(side.measure))) << '\n';
    } else {
      report << "distance_greedy_upper_bound="
             << num(greedy_transport_distance(normalize(mu), normalize(side.measure))) << '\n';
    }
    if (tuple.n == 2) {
      auto arc = [&](const DirectionMeasure& m) {
        return m.total_mass() > 0 ? num(min_arc_mass(normalize(m), cfg.arcWidth)) : std::string("N/A");
      };
      report << "min_arc_mass_approx=" << arc(mu) << '\n' << "min_arc_mass_orbit=" << arc(side.measure) << '\n';
    }
  }
  open_output(cfg, "compare.txt") << report.str();
  out << report.str();
}

void cmd_littlewood(const RunConfig& cfg, int threads, std::ostream& out) {
  write_manifest(cfg, "littlewood");
  const AlgebraicTuple tuple = build_tuple(cfg);
  {
    auto f = open_output(cfg, "minima.csv");
    f << "k,value,is_record\n";
    if (cfg.K >= 1) {
      const auto records = record_minima(tuple, cfg.prime, cfg.K, threads);
      if (cfg.minimaAll) {
        std::size_t next = 0;
        for (std::uint64_t k = 1; k <= cfg.K; ++k) {
          const bool rec = next < records.size() && records[next].k == k;
          if (rec) ++next;
          f << k << ',' << num(littlewood_value(tuple, cfg.prime, k)) << ',' << (rec ? 1 : 0) << '\n';
        }
      } else {
        for (const auto& r : records) f << r.k << ',' << num(r.value) << ",1\n";
      }
      out << "records=" << records.size() << '\n';
    }
  }
  auto f = open_output(cfg, "scaled.csv");
  f << "m,ell,K,argmin,min,scaled\n";
  if (cfg.K >= 1) {
    for (unsigned m = cfg.mMin; m <= cfg.mMax; ++m) {
      const mpz_class ell = power(cfg.prime, m);
      const MinimumRecord best = scaled_minima(tuple, ell, cfg.K, threads);
      const Real scaled = std::pow(to_real(ell, 0), Real(1) / tuple.n) * best.value;
      f << m << ',' << ell.get_str() << ',' << cfg.K << ',' << best.k << ',' << num(best.value) << ','
        << num(scaled) << '\n';
      out << "m=" << m << " scaled=" << num(scaled) << '\n';
    }
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diophantine approximation directions and compact orbit lattices", "dirapprox"};
  app.require_subcommand(1);
  std::string configPath;
  std::string outDir;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::string> sets;
  std::map<std::string, std::string> overrides;

  app.add_option("--config", configPath, "key=value config file (a manifest.txt works)");
  app.add_option("--out", outDir, "output directory");
  app.add_option("--threads", threads, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  app.add_option("--set", sets, "override any config key, KEY=VALUE");
  const std::vector<std::pair<std::string, std::string>> named = {
      {"--poly", "poly"},         {"--precision-bits", "precision_bits"}, {"--prime", "prime"},
      {"--k-min", "k_min"},       {"--k-max", "k_max"},                   {"--m-min", "m_min"},
      {"--m-max", "m_max"},       {"--epsilon", "epsilon"},               {"-T,--horizon", "T"},
      {"-K,--kmax", "K"},         {"-L,--half-width", "L"},               {"-N,--samples", "N"},
      {"--seed", "seed"},         {"--eps-floor", "eps_floor"},           {"--arc-width", "arc_width"},
      {"--apply-u", "apply_u"},   {"--scan-strategy", "scan_strategy"},   {"--orientation", "orientation"},
      {"--minima-all", "minima_all"},
  };
  for (const auto& [flag, key] : named) {
    app.add_option_function<std::string>(
        flag, [&overrides, key = key](const std::string& v) { overrides[key] = v; }, "config key " + key);
  }

  using Command = void (*)(const RunConfig&, int, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"field", "roots, embeddings, conjugator", cmd_field},
      {"scan", "approximation records (records.csv)", cmd_scan},
      {"weights", "records with sweep weights (weights.txt)", cmd_weights},
      {"measure", "direction measures from approximations", cmd_measure},
      {"orbit", "pushforward of the sampled compact orbit", cmd_orbit},
      {"compare", "both measures and their distance", cmd_compare},
      {"littlewood", "p-adic minima and scaled minima", cmd_littlewood},
  };
  std::map<CLI::App*, std::pair<std::string, Command>> bySub;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    bySub[sub] = {name, fn};
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig cfg;
  try {
    if (!configPath.empty()) cfg = RunConfig::load(configPath);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--set expects KEY=VALUE");
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& [key, value] : overrides) cfg.set(key, value);
    if (!outDir.empty()) cfg.out = outDir;
    cfg.validate();
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  for (const auto& [sub, entry] : bySub) {
    if (!sub->parsed()) continue;
    try {
      entry.second(cfg, threads, out);
      return kExitOk;
    } catch (const Error& e) {
      err << e.what() << '\n';
      return exit_code_for(e.code());
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitDomain;
    }
  }
  return kExitUsage;
}

}  // namespace dirapprox
