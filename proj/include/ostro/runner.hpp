#pragma once

// Command dispatch, result envelopes and figure-data emitters behind the
// `ostro_stab` command-line tool.
//
// Envelope layout (schema_version "1"):
//   { "schema_version", "command", "inputs", "results", "diagnostics" }
// or, on a domain error, "error": { "kind", "message" } in place of "results".

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ostro/dispersion.hpp"
#include "ostro/errors.hpp"
#include "ostro/hill_spectrum.hpp"
#include "ostro/reduced_system.hpp"
#include "ostro/stokes_wave.hpp"

namespace ostro::cli {

using json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1";

enum class Command { wave, dispersion, collisions, krein, reduced, spectrum, threshold, figures };
enum class OutputFormat { json, csv };
enum class FigureKind { K_curves, collision_ranges, collision_contour };

inline constexpr std::string_view to_string(Command c) {
  switch (c) {
    case Command::wave: return "wave";
    case Command::dispersion: return "dispersion";
    case Command::collisions: return "collisions";
    case Command::krein: return "krein";
    case Command::reduced: return "reduced";
    case Command::spectrum: return "spectrum";
    case Command::threshold: return "threshold";
    case Command::figures: return "figures";
  }
  return "";
}

inline constexpr std::string_view to_string(FigureKind f) {
  switch (f) {
    case FigureKind::K_curves: return "K_curves";
    case FigureKind::collision_ranges: return "collision_ranges";
    case FigureKind::collision_contour: return "collision_contour";
  }
  return "";
}

inline std::optional<Command> parse_command(std::string_view s) {
  for (auto c : {Command::wave, Command::dispersion, Command::collisions, Command::krein,
                 Command::reduced, Command::spectrum, Command::threshold, Command::figures}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

inline std::optional<FigureKind> parse_figure(std::string_view s) {
  for (auto f : {FigureKind::K_curves, FigureKind::collision_ranges, FigureKind::collision_contour}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

struct RunConfig {
  Command command{Command::threshold};
  double beta{1.0};
  double gamma{1.0};
  std::optional<double> k;
  std::optional<double> a;
  std::optional<int> n;
  std::optional<int> m;
  std::optional<double> xi;
  int dn_max{4};
  int n_range{6};
  int N{32};
  int xi_grid{512};
  OutputFormat format{OutputFormat::json};
  std::string out;
  bool opposite_krein{false};
  std::optional<FigureKind> which;
  double a_max{kDefaultAmplitudeMax};
  bool timing{false};
  unsigned threads{1};
};

/// Threads for xi sweeps from OSTRO_STAB_THREADS (unset or invalid: 1).
inline unsigned threads_from_env() {
  const char* v = std::getenv("OSTRO_STAB_THREADS");
  if (v == nullptr) return 1;
  unsigned n = 0;
  const std::string_view s{v};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc{} || ptr != s.data() + s.size() || n == 0) return 1;
  return n;
}

// ---------------------------------------------------------------------------
// Tables and CSV

/// Shortest round-trip decimal form (at most 17 significant digits).
inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string{};
}

using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;  // an empty row is written as a blank line
};

inline std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "";
        else if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
        else return v;
      },
      c);
}

inline json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
        else if constexpr (std::is_same_v<T, double>) return std::isfinite(v) ? json(v) : json(nullptr);
        else return json(v);
      },
      c);
}

inline json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::array();
    for (const auto& c : r) row.push_back(cell_json(c));
    rows.push_back(std::move(row));
  }
  return json{{"columns", t.columns}, {"rows", std::move(rows)}};
}

inline std::string csv_comment(const RunConfig& cfg) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
  return "# beta=" + format_double(cfg.beta) + ",gamma=" + format_double(cfg.gamma) +
         ",k=" + opt(cfg.k) + ",a=" + opt(cfg.a) + ",N=" + std::to_string(cfg.N);
}

inline std::string to_csv(const Table& t, const RunConfig& cfg) {
  std::string s = csv_comment(cfg) + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + cell_text(r[i]);
    s += "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Envelope

inline json echo_inputs(const RunConfig& c) {
  json in;
  in["command"] = std::string(to_string(c.command));
  in["beta"] = c.beta;
  in["gamma"] = c.gamma;
  if (c.k) in["k"] = *c.k;
  if (c.a) in["a"] = *c.a;
  if (c.n) in["n"] = *c.n;
  if (c.m) in["m"] = *c.m;
  if (c.xi) in["xi"] = *c.xi;
  in["dn_max"] = c.dn_max;
  in["n_range"] = c.n_range;
  in["N"] = c.N;
  in["xi_grid"] = c.xi_grid;
  in["format"] = c.format == OutputFormat::json ? "json" : "csv";
  in["opposite_krein"] = c.opposite_krein;
  if (c.which) in["which"] = std::string(to_string(*c.which));
  in["a_max"] = c.a_max;
  return in;
}

inline json diagnostics(const RunConfig& c) {
  json d;
  d["tolerances"] = {{"resonance_exclusion", kResonanceExclusion},
                     {"xi_root", kXiRootTolerance},
                     {"collision_check", kCollisionCheckTolerance},
                     {"signature_zero", kSignatureTolerance},
                     {"pairing", kPairingTolerance},
                     {"boundary_mass", kBoundaryMassFraction}};
  d["N"] = c.N;
  d["xi_grid"] = c.xi_grid;
  d["xi_bracket_points"] = kXiBracketPoints;
  d["boundary_margin"] = 4;
  d["threads"] = c.threads;
  return d;
}

/// Structural check of a parsed envelope against schema version "1".
inline bool validate_envelope(const json& j, std::string* why = nullptr) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (!j.is_object()) return fail("envelope is not an object");
  if (!j.contains("schema_version") || j["schema_version"] != kSchemaVersion)
    return fail("schema_version missing or unsupported");
  if (!j.contains("command") || !j["command"].is_string() ||
      !parse_command(j["command"].get<std::string>()))
    return fail("command missing or unknown");
  if (!j.contains("inputs") || !j["inputs"].is_object()) return fail("inputs missing");
  if (j["inputs"].value("command", std::string{}) != j["command"].get<std::string>())
    return fail("inputs do not echo the command");
  const bool has_results = j.contains("results");
  const bool has_error = j.contains("error");
  if (has_results == has_error) return fail("exactly one of results/error required");
  if (has_error && (!j["error"].contains("kind") || !j["error"].contains("message")))
    return fail("error needs kind and message");
  if (!j.contains("diagnostics") || !j["diagnostics"].is_object()) return fail("diagnostics missing");
  return true;
}

// ---------------------------------------------------------------------------
// Commands

struct Payload {
  json results;
  Table table;
};

namespace detail {

inline PhysicalParams params_with_k(const RunConfig& c) {
  if (!c.k) throw error(errc::invalid_params, "--k is required");
  PhysicalParams p{c.beta, c.gamma, *c.k};
  validate(p);
  return p;
}

inline Amplitude amplitude(const RunConfig& c) {
  if (!c.a) throw error(errc::invalid_params, "--a is required");
  return Amplitude(*c.a, c.a_max);
}

inline TruncationConfig truncation(const RunConfig& c) {
  TruncationConfig t;
  t.N = c.N;
  if (c.xi_grid < 1) throw error(errc::invalid_params, "--xi-grid must be >= 1");
  t.xi_grid = default_xi_grid(c.xi_grid);
  t.threads = c.threads;
  t.validate();
  return t;
}

inline json k_bound(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline Payload cmd_wave(const RunConfig& c) {
  const PhysicalParams p = params_with_k(c);
  const StokesWave w = stokes_coefficients(p);
  Payload out;
  out.results["c0"] = w.c0;
  out.results["A2"] = w.A2;
  out.results["A3"] = w.A3;
  out.results["A42"] = w.A42;
  out.results["A44"] = w.A44;
  out.results["c2"] = w.c2;
  out.results["c4"] = w.c4;
  out.results["resonant_wavenumbers"] = resonant_wavenumbers(p, std::max(2, c.n_range));
  out.table.columns = {"quantity", "value"};
  for (const char* key : {"c0", "A2", "A3", "A42", "A44", "c2", "c4"}) {
    out.table.rows.push_back({std::string(key), out.results[key].get<double>()});
  }
  if (c.a) {
    const Amplitude amp = amplitude(c);
    const double speed = eval_speed(w, amp);
    const double res = residual_F(w, amp, 256);
    const double w0 = eval_profile(w, amp, 0.0);
    out.results["speed"] = speed;
    out.results["residual_F"] = res;
    out.results["profile_at_0"] = w0;
    out.table.rows.push_back({std::string("speed"), speed});
    out.table.rows.push_back({std::string("residual_F"), res});
    out.table.rows.push_back({std::string("profile_at_0"), w0});
  }
  return out;
}

inline Payload cmd_dispersion(const RunConfig& c) {
  const PhysicalParams p = params_with_k(c);
  const double xi = c.xi.value_or(0.5);
  check_xi(xi);
  const double c0 = phase_speed_c0(p);
  Payload out;
  out.table.columns = {"n", "x", "omega", "krein"};
  json modes = json::array();
  for (int n = -c.n_range; n <= c.n_range; ++n) {
    const double x = n + xi;
    const double w = omega(p, c0, x);
    const int kappa = krein_signature(p, c0, x);
    modes.push_back({{"n", n}, {"x", x}, {"omega", w}, {"krein", kappa}});
    out.table.rows.push_back({static_cast<long long>(n), x, w, static_cast<long long>(kappa)});
  }
  out.results["c0"] = c0;
  out.results["xi"] = xi;
  out.results["modes"] = std::move(modes);
  return out;
}

inline json pair_json(const CollisionPair& pr, double beta, double gamma,
                      const std::optional<PhysicalParams>& at_k, Table& table) {
  json j{{"n", pr.n}, {"m", pr.m}, {"dn", pr.m - pr.n}, {"opposite_krein", pr.opposite_krein}};
  const CollisionInterval iv = collision_interval(beta, gamma, pr.n, pr.m);
  j["k_min"] = iv.k_min;
  j["k_max"] = k_bound(iv.k_max);
  j["unbounded"] = iv.unbounded;
  std::vector<Cell> row{static_cast<long long>(pr.n), static_cast<long long>(pr.m),
                        static_cast<long long>(pr.m - pr.n),
                        std::string(pr.opposite_krein ? "true" : "false"), iv.k_min, iv.k_max};
  if (at_k) {
    json events = json::array();
    std::string xis;
    for (const auto& e : collision_events(*at_k, pr.n, pr.m)) {
      events.push_back({{"xi0", e.xi0},
                        {"omega", e.omega},
                        {"at_origin", e.at_origin},
                        {"opposite_krein", e.opposite_krein}});
      xis += (xis.empty() ? "" : ";") + format_double(e.xi0);
    }
    j["events"] = std::move(events);
    row.emplace_back(xis);
  }
  table.rows.push_back(std::move(row));
  return j;
}

inline Payload cmd_collisions(const RunConfig& c) {
  if (c.beta == 0.0 || !(c.gamma > 0.0)) throw error(errc::invalid_params, "need beta != 0, gamma > 0");
  std::optional<PhysicalParams> at_k;
  if (c.k) at_k = params_with_k(c);

  Payload out;
  out.table.columns = {"n", "m", "dn", "opposite_krein", "k_min", "k_max"};
  if (at_k) out.table.columns.push_back("xi0");

  std::vector<CollisionPair> pairs;
  if (c.n && c.m) {
    int n = std::min(*c.n, *c.m), m = std::max(*c.n, *c.m);
    if (n == m) throw error(errc::invalid_params, "n and m must differ");
    pairs.push_back({n, m, opposite_krein(n, m, 0.5)});
  } else {
    pairs = enumerate_collision_pairs(c.beta, c.dn_max, c.n_range);
  }
  json list = json::array();
  for (const auto& pr : pairs) {
    if (c.opposite_krein && !pr.opposite_krein) continue;
    list.push_back(pair_json(pr, c.beta, c.gamma, at_k, out.table));
  }
  json origin = json::array();
  for (const auto& oc : origin_collisions(c.beta, c.gamma, c.n_range)) {
    origin.push_back({{"n", oc.n}, {"m", oc.m}, {"xi", oc.xi}, {"k", oc.k}});
  }
  out.results["pairs"] = std::move(list);
  out.results["origin_collisions"] = std::move(origin);
  return out;
}

inline int dominant_mode(const Eigen::VectorXcd& v, int N) {
  Eigen::Index best = 0;
  v.cwiseAbs2().maxCoeff(&best);
  return static_cast<int>(best) - N;
}

inline Payload cmd_krein(const RunConfig& c) {
  const PhysicalParams p = params_with_k(c);
  const double xi = c.xi.value_or(0.5);
  check_xi(xi);
  Payload out;
  const double c0 = phase_speed_c0(p);
  json analytic = json::array();
  for (int n = -c.n_range; n <= c.n_range; ++n) {
    analytic.push_back({{"n", n}, {"krein", krein_signature(p, c0, n + xi)}});
  }
  out.results["analytic"] = std::move(analytic);

  const double a = c.a.value_or(0.0);
  const StokesWave w = stokes_coefficients(p);
  const Amplitude amp(a, c.a_max);
  TruncationConfig t = truncation(c);
  const auto A = assemble_matrix(w, amp, xi, t);
  const auto L = assemble_L_matrix(w, amp, xi, t);
  const EigenPairs ep = eigenpairs(A);
  out.table.columns = {"re", "im", "dominant_mode", "krein"};
  json numeric = json::array();
  for (std::size_t j = 0; j < ep.values.size(); ++j) {
    const auto v = ep.vectors.col(static_cast<Eigen::Index>(j));
    const int mode = dominant_mode(v, t.N);
    std::string sig;
    try {
      sig = std::to_string(krein_of_eigenpair(L, v));
    } catch (const error& e) {
      if (e.code() != errc::indefinite_near_zero) throw;
      sig = "indefinite";
    }
    numeric.push_back({{"re", ep.values[j].real()},
                       {"im", ep.values[j].imag()},
                       {"dominant_mode", mode},
                       {"krein", sig}});
    out.table.rows.push_back(
        {ep.values[j].real(), ep.values[j].imag(), static_cast<long long>(mode), sig});
  }
  out.results["numeric"] = std::move(numeric);
  return out;
}

inline Payload cmd_reduced(const RunConfig& c) {
  const PhysicalParams p = params_with_k(c);
  if (!c.n) throw error(errc::invalid_params, "--n is required");
  const int n = std::min(*c.n, c.m.value_or(*c.n + 1));
  const int m = std::max(*c.n, c.m.value_or(*c.n + 1));
  if (m - n >= 3 || m == n) {
    throw error(errc::order_not_analyzed, "no reduced pencil for dn = " + std::to_string(m - n));
  }
  const StokesWave w = stokes_coefficients(p);
  const Amplitude amp = amplitude(c);

  double xi0;
  if (c.xi) {
    xi0 = *c.xi;
  } else {
    std::optional<double> found;
    for (const auto& e : collision_events(p, n, m)) {
      if (!e.at_origin) {
        found = e.xi0;
        break;
      }
    }
    if (!found) {
      throw error(errc::no_collision, "modes " + std::to_string(n) + " and " + std::to_string(m) +
                                          " do not collide away from the origin at this k");
    }
    xi0 = *found;
  }
  const ReducedPencil pen = reduced_matrix(w, n, m, xi0, amp);
  if (std::abs(pen.omega) < kSignatureTolerance) {
    throw error(errc::not_a_collision, "collision at the origin is excluded from the reduction");
  }
  const DiscriminantResult d = eigenvalue_shifts(pen);

  Payload out;
  auto entry = [](const std::complex<double>& z) { return json::array({z.real(), z.imag()}); };
  out.results["n"] = n;
  out.results["m"] = m;
  out.results["xi0"] = xi0;
  out.results["omega"] = pen.omega;
  out.results["order"] = pen.order;
  out.results["B"] = json::array({json::array({entry(pen.B(0, 0)), entry(pen.B(0, 1))}),
                                  json::array({entry(pen.B(1, 0)), entry(pen.B(1, 1))})});
  out.results["discriminant"] = d.value;
  out.results["leading_discriminant"] =
      m - n == 1 ? discriminant_dn1(w, n, xi0, amp) : discriminant_dn2(w, n, xi0, amp);
  out.results["shifts"] = json::array({entry(d.shifts[0]), entry(d.shifts[1])});
  out.results["unstable"] = d.unstable;
  out.results["growth_rate"] = d.growth_rate;
  out.results["status"] = d.unstable ? "unstable" : "no instability at analyzed order";
  if (m - n == 1 && (n + xi0) * (m + xi0) < 0.0) {
    out.results["predicted_growth_rate"] = predicted_growth_rate(w, n, xi0, amp);
  }
  out.table.columns = {"quantity", "value"};
  for (const char* key : {"xi0", "omega", "discriminant", "leading_discriminant", "growth_rate"}) {
    out.table.rows.push_back({std::string(key), out.results[key].get<double>()});
  }
  return out;
}

inline Payload cmd_spectrum(const RunConfig& c) {
  const PhysicalParams p = params_with_k(c);
  const StokesWave w = stokes_coefficients(p);
  const Amplitude amp = amplitude(c);
  TruncationConfig t = truncation(c);
  Payload out;
  if (c.xi) {
    const SpectrumSlice s = spectrum_slice(w, amp, *c.xi, t);
    out.results["xi"] = s.xi;
    out.results["max_real_part"] = s.max_real_part;
    out.results["paired"] = s.paired;
    out.results["edge_modes_excluded"] = s.edge_modes_excluded;
    out.table.columns = {"re", "im"};
    json ev = json::array();
    for (const auto& l : s.eigenvalues) {
      ev.push_back(json::array({l.real(), l.imag()}));
      out.table.rows.push_back({l.real(), l.imag()});
    }
    out.results["eigenvalues"] = std::move(ev);
  } else {
    const GrowthScan g = max_growth(w, amp, t);
    const auto slices = sweep(w, amp, t.xi_grid, t);
    out.results["xi_star"] = g.xi_star;
    out.results["growth"] = g.growth;
    out.results["paired"] = std::all_of(slices.begin(), slices.end(),
                                        [](const SpectrumSlice& s) { return s.paired; });
    out.table.columns = {"xi", "max_real_part"};
    for (const auto& s : slices) out.table.rows.push_back({s.xi, s.max_real_part});
  }
  return out;
}

inline Payload cmd_threshold(const RunConfig& c) {
  const double k_min = instability_threshold_dn1(c.beta, c.gamma);
  Payload out;
  out.results["k_min"] = k_min;
  out.results["pair"] = json::array({-1, 0});
  out.results["strict"] = true;
  out.table.columns = {"k_min"};
  out.table.rows.push_back({k_min});
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Figure data

/// Tables keyed by file name. K curves sample x on [-6, 2] in steps of 1/128;
/// singular points are blank rows.
inline std::map<std::string, Table> figure_tables(FigureKind kind, const RunConfig& c) {
  std::map<std::string, Table> files;
  switch (kind) {
    case FigureKind::K_curves: {
      for (int dn = 1; dn <= 4; ++dn) {
        Table t;
        t.columns = {"x", "K"};
        for (int i = -6 * 128; i <= 2 * 128; ++i) {
          const double x = i / 128.0;
          try {
            t.rows.push_back({x, collision_K(x, dn)});
          } catch (const error&) {
            t.rows.emplace_back();
          }
        }
        files["K_curves_dn" + std::to_string(dn) + ".csv"] = std::move(t);
      }
      break;
    }
    case FigureKind::collision_ranges: {
      const int n = std::min(c.n.value_or(-3), c.m.value_or(-1));
      const int m = std::max(c.n.value_or(-3), c.m.value_or(-1));
      if (n == m) throw error(errc::invalid_params, "n and m must differ");
      const int dn = m - n;
      Table t;
      t.columns = {"x", "k"};
      // Whole unit cell x = n + xi, xi in [-1/2, 1/2].
      for (int i = -kXiBracketPoints; i <= kXiBracketPoints; ++i) {
        const double x = n + i / (2.0 * kXiBracketPoints);
        double k4 = std::numeric_limits<double>::quiet_NaN();
        try {
          k4 = c.gamma * dn / c.beta * collision_K(x, dn);
        } catch (const error&) {
        }
        if (k4 > 0.0) {
          t.rows.push_back({x, std::pow(k4, 0.25)});
        } else {
          t.rows.emplace_back();
        }
      }
      files["collision_ranges_n" + std::to_string(n) + "_m" + std::to_string(m) + ".csv"] =
          std::move(t);
      break;
    }
    case FigureKind::collision_contour: {
      if (!(c.beta > 0.0)) {
        throw error(errc::wrong_dispersion_sign, "the {-1,0} contour exists only for beta > 0");
      }
      Table t;
      t.columns = {"xi", "k", "omega"};
      for (int i = 1; i <= kXiBracketPoints; ++i) {
        const double xi = i / (2.0 * kXiBracketPoints);
        const double k = *collision_wavenumber(c.beta, c.gamma, -1, 0, xi);
        const PhysicalParams p{c.beta, c.gamma, k};
        t.rows.push_back({xi, k, omega(p, phase_speed_c0(p), xi)});
      }
      files["collision_contour.csv"] = std::move(t);
      break;
    }
  }
  return files;
}

/// Writes the CSV files for one figure into `dir`; returns the paths written.
inline std::vector<std::filesystem::path> emit_figure_data(FigureKind kind, const RunConfig& c,
                                                           const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [name, table] : figure_tables(kind, c)) {
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << to_csv(table, c);
    written.push_back(path);
  }
  return written;
}

namespace detail {

inline std::pair<double, double> column_range(const Table& t, std::size_t col) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : t.rows) {
    if (r.size() <= col) continue;
    if (const double* v = std::get_if<double>(&r[col])) {
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
  }
  return {lo, hi};
}

inline Payload cmd_figures(const RunConfig& c) {
  const std::filesystem::path dir = c.out.empty() ? std::filesystem::path(".") : std::filesystem::path(c.out);
  std::vector<FigureKind> kinds;
  if (c.which) {
    kinds.push_back(*c.which);
  } else {
    kinds = {FigureKind::K_curves, FigureKind::collision_ranges};
    if (c.beta > 0.0) kinds.push_back(FigureKind::collision_contour);
  }
  Payload out;
  out.table.columns = {"figure", "file", "rows"};
  json figs = json::array();
  for (FigureKind kind : kinds) {
    const auto tables = figure_tables(kind, c);
    emit_figure_data(kind, c, dir);
    for (const auto& [name, t] : tables) {
      json f{{"figure", std::string(to_string(kind))},
             {"file", (dir / name).string()},
             {"rows", t.rows.size()}};
      if (kind == FigureKind::collision_ranges) {
        auto [lo, hi] = column_range(t, 1);
        f["k_min"] = lo;
        f["k_max"] = hi;
      }
      if (kind == FigureKind::collision_contour) {
        auto [lo, hi] = column_range(t, 1);
        f["k_min"] = lo;
      }
      figs.push_back(std::move(f));
      out.table.rows.push_back({std::string(to_string(kind)), (dir / name).string(),
                                static_cast<long long>(t.rows.size())});
    }
  }
  out.results["files"] = std::move(figs);
  return out;
}

inline Payload dispatch(const RunConfig& c) {
  switch (c.command) {
    case Command::wave: return cmd_wave(c);
    case Command::dispersion: return cmd_dispersion(c);
    case Command::collisions: return cmd_collisions(c);
    case Command::krein: return cmd_krein(c);
    case Command::reduced: return cmd_reduced(c);
    case Command::spectrum: return cmd_spectrum(c);
    case Command::threshold: return cmd_threshold(c);
    case Command::figures: return cmd_figures(c);
  }
  throw error(errc::invalid_params, "unknown command");
}

}  // namespace detail

struct RunOutcome {
  int exit_code{0};
  std::string output;  // serialized envelope (json) or table (csv)
  std::string message; // diagnostic text for stderr on failure
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitUsage = 64;

/// Runs one command. Output goes to cfg.out when set (except for `figures`,
/// where cfg.out is the destination directory) and is always returned.
inline RunOutcome run(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  json env;
  env["schema_version"] = std::string(kSchemaVersion);
  env["command"] = std::string(to_string(cfg.command));
  env["inputs"] = echo_inputs(cfg);

  RunOutcome outcome;
  Payload payload;
  try {
    if (cfg.beta == 0.0 || !std::isfinite(cfg.beta)) throw error(errc::invalid_params, "beta must be nonzero");
    if (!(cfg.gamma > 0.0)) throw error(errc::invalid_params, "gamma must be > 0");
    payload = detail::dispatch(cfg);
    env["results"] = payload.results;
    env["results"]["table"] = table_json(payload.table);
  } catch (const error& e) {
    outcome.exit_code = e.is_domain() ? kExitDomain : kExitInternal;
    outcome.message = e.what();
    env["error"] = {{"kind", std::string(to_string(e.code()))}, {"message", e.what()}};
  } catch (const std::exception& e) {
    outcome.exit_code = kExitInternal;
    outcome.message = e.what();
    env["error"] = {{"kind", "Internal"}, {"message", e.what()}};
  }

  json diag = diagnostics(cfg);
  if (cfg.timing) {
    diag["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  env["diagnostics"] = std::move(diag);

  if (cfg.format == OutputFormat::csv && outcome.exit_code == kExitOk) {
    outcome.output = to_csv(payload.table, cfg);
  } else {
    outcome.output = env.dump(2) + "\n";
  }
  if (!cfg.out.empty() && cfg.command != Command::figures) {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
      outcome.exit_code = kExitInternal;
      outcome.message = "cannot write " + cfg.out;
    } else {
      f << outcome.output;
    }
  }
  return outcome;
}

}  // namespace ostro::cli
