#include "dsieve/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "dsieve/arith.hpp"
#include "dsieve/chang.hpp"
#include "dsieve/circle.hpp"
#include "dsieve/errors.hpp"
#include "dsieve/expsum.hpp"
#include "dsieve/majorant.hpp"
#include "dsieve/parallel.hpp"
#include "dsieve/prime_sieve.hpp"
#include "dsieve/square_sieve.hpp"
#include "dsieve/verify.hpp"

#ifndef DSIEVE_VERSION
#define DSIEVE_VERSION "0.0.0"
#endif

namespace dsieve::cli {

namespace {

using json = nlohmann::ordered_json;

struct Common {
  std::string emit = "json";
  std::string out;
  std::string manifest;
  std::uint64_t seed = 0;
  int threads = 0;
  double tolerance = circle::kDefaultTolerance;
};

struct Result {
  std::string text;
  int code = kExitOk;
};

// Raised by handlers for option combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

json scalar_json(const circle::Scalar& s) {
  json j;
  j["value"] = jnum(s.value());
  j["exact"] = s.exact ? json(s.exact->to_string()) : json(nullptr);
  return j;
}

json rational_json(const Rational& r) { return json{{"exact", r.get_str()}, {"value", r.get_d()}}; }

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string csv_row(std::initializer_list<std::string> fields) {
  std::string row;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) row += ',';
    row += csv_field(f);
    first = false;
  }
  return row + "\r\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

bool want_csv(const Common& c) { return c.emit == "csv"; }

// --- gsharp-scan ------------------------------------------------------------

struct ScanArgs {
  std::uint64_t limit = 0;
  std::uint64_t min_from = 1;
  std::size_t segment = std::size_t{1} << 20;
  bool serial = false;
  bool long_run = false;
  std::optional<double> assert_min;
};

constexpr std::uint64_t kLongScan = 100'000'000;
constexpr std::uint64_t kCsvRowLimit = 10'000'000;
constexpr std::uint64_t kExactArgminLimit = 10'000'000;

Result run_gsharp_scan(const ScanArgs& a, const Common& c) {
  if (a.limit > kLongScan && !a.long_run) {
    throw UsageError("--limit above 1e8 needs --long (expect a long run)");
  }
  if (want_csv(c) && a.limit > kCsvRowLimit) throw UsageError("csv output is limited to 1e7 rows; use --emit json");
  square_sieve::ScanOptions opts;
  opts.segment_size = a.segment;
  opts.parallel = !a.serial;
  opts.min_from = a.min_from;

  std::string csv;
  kernels::GSharpSink sink;
  if (want_csv(c)) {
    csv = csv_row({"z", "g_sharp", "ratio", "running_min", "argmin_so_far"});
    sink = [&](const kernels::GSharpRow& row) {
      const double g = square_sieve::fixed_to_double(row.g_fixed);
      const double ratio = g / static_cast<double>(row.z);
      std::string running, arg;
      if (row.argmin != 0) {
        running = num(square_sieve::fixed_to_double(row.running_min_num) / static_cast<double>(row.argmin));
        arg = std::to_string(row.argmin);
      }
      csv += csv_row({std::to_string(row.z), num(g), num(ratio), running, arg});
    };
  }
  const auto s = square_sieve::g_sharp_scan(a.limit, opts, sink);
  const double min_ratio = square_sieve::fixed_to_double(s.min_g_fixed) / static_cast<double>(s.argmin);
  const Rational err = square_sieve::fixed_error_bound(s.terms);

  bool holds = s.large_z_bound_holds;
  json j;
  j["limit"] = a.limit;
  j["min_from"] = a.min_from;
  j["argmin"] = s.argmin;
  j["min_ratio"] = min_ratio;
  j["g_sharp_at_argmin"] = square_sieve::fixed_to_double(s.min_g_fixed);
  if (s.argmin <= kExactArgminLimit) {
    const auto table = arith::FactorTable::build(std::max<std::uint64_t>(s.argmin, 2));
    const Rational g = square_sieve::g_sharp(static_cast<double>(s.argmin), table);
    const Rational ratio = g / to_rational(s.argmin);
    j["min_ratio_exact"] = ratio.get_str();
    // The fixed-point value must sit within the certified rounding error.
    const Rational gap = abs(square_sieve::fixed_to_rational(s.min_g_fixed) - g);
    j["fixed_point_consistent"] = gap <= err;
    holds = holds && gap <= err;
  } else {
    j["min_ratio_exact"] = nullptr;
  }
  j["g_sharp_limit"] = square_sieve::fixed_to_double(s.g_fixed);
  j["terms"] = s.terms;
  j["fixed_error_bound"] = err.get_d();
  j["large_z_checked"] = s.large_z_checked;
  j["large_z_bound_holds"] = s.large_z_bound_holds;
  if (a.assert_min) {
    j["assert_min"] = *a.assert_min;
    j["assert_min_holds"] = min_ratio >= *a.assert_min;
    holds = holds && min_ratio >= *a.assert_min;
  }
  j["holds"] = holds;
  return {want_csv(c) ? csv : dump(j), holds ? kExitOk : kExitCheckFailed};
}

// --- square-sieve -------------------------------------------------------------

Result run_square_sieve(double z, const Common& c) {
  if (!(z >= 1.0)) throw ArgumentError("--z must be >= 1");
  const auto level = static_cast<std::uint64_t>(std::floor(z));
  const auto table = arith::FactorTable::build(std::max<std::uint64_t>(level, 2));
  const auto sys = square_sieve::build_square_sieve(z, table);
  const auto norm = square_sieve::normalization(sys);
  const bool holds = norm.all_hold();
  if (want_csv(c)) {
    std::string out = csv_row({"q", "k_q", "lambda_sharp", "lambda_sharp_value", "lambda_classical",
                               "lambda_classical_value"});
    for (std::size_t i = 0; i < sys.moduli.size(); ++i) {
      out += csv_row({std::to_string(sys.moduli[i]), std::to_string(sys.kq_size[i]), sys.lambda_sharp[i].get_str(),
                      num(sys.lambda_sharp[i].get_d()), sys.lambda_classical[i].get_str(),
                      num(sys.lambda_classical[i].get_d())});
    }
    return {out, holds ? kExitOk : kExitCheckFailed};
  }
  json j;
  j["z"] = z;
  j["level"] = sys.level;
  j["g_sharp"] = rational_json(sys.G_sharp);
  json w = json::array();
  for (std::size_t i = 0; i < sys.moduli.size(); ++i) {
    w.push_back({{"q", sys.moduli[i]},
                 {"k_q", sys.kq_size[i]},
                 {"lambda_sharp", rational_json(sys.lambda_sharp[i])},
                 {"lambda_classical", rational_json(sys.lambda_classical[i])}});
  }
  j["weights"] = w;
  j["identities"] = {{"lambda_sharp_sum", norm.lambda_sharp_sum.get_str()},
                     {"main_term", norm.main_term.get_str()},
                     {"inverse_g_sharp", norm.inverse_g_sharp.get_str()},
                     {"lambda_classical_1", norm.lambda_classical_1.get_str()},
                     {"cross_identity", norm.cross_identity}};
  j["holds"] = holds;
  return {dump(j), holds ? kExitOk : kExitCheckFailed};
}

// --- prime-sieve --------------------------------------------------------------

constexpr std::uint64_t kDiagonalLevelLimit = 1000;

Result run_prime_sieve(double z, std::uint64_t z0, const Common& c) {
  if (!(z >= 1.0)) throw ArgumentError("--z must be >= 1");
  const auto level = static_cast<std::uint64_t>(std::floor(z));
  const auto table = arith::FactorTable::build(std::max<std::uint64_t>(level, 2));
  json j;
  j["z"] = z;
  j["z0"] = z0;
  j["level"] = level;
  bool holds = true;
  std::string csv = csv_row({"d", "lambda", "lambda_value"});
  if (level <= prime_sieve::kExactLevelLimit) {
    const auto sys = prime_sieve::build_prime_sieve(z, z0, table);
    j["exact"] = true;
    j["G"] = rational_json(sys.G);
    json l = json::array();
    for (std::size_t i = 0; i < sys.support.size(); ++i) {
      l.push_back({{"d", sys.support[i]}, {"lambda", rational_json(sys.lambda[i])}});
      csv += csv_row({std::to_string(sys.support[i]), sys.lambda[i].get_str(), num(sys.lambda[i].get_d())});
    }
    j["lambda"] = l;
    if (level <= kDiagonalLevelLimit) {
      const Rational diag = prime_sieve::diagonal_form(sys);
      const Rational inv = 1 / sys.G;
      holds = diag == inv;
      j["diagonal"] = {{"value", diag.get_str()}, {"inverse_G", inv.get_str()}, {"holds", holds}};
    } else {
      j["diagonal"] = nullptr;
    }
  } else {
    const auto sys = prime_sieve::build_prime_sieve_float(z, z0, table);
    j["exact"] = false;
    j["G"] = {{"exact", nullptr}, {"value", sys.G}};
    json l = json::array();
    for (std::size_t i = 0; i < sys.support.size(); ++i) {
      l.push_back({{"d", sys.support[i]}, {"lambda", {{"exact", nullptr}, {"value", sys.lambda[i]}}}});
      csv += csv_row({std::to_string(sys.support[i]), "", num(sys.lambda[i])});
    }
    j["lambda"] = l;
    j["diagonal"] = nullptr;
  }
  j["holds"] = holds;
  return {want_csv(c) ? csv : dump(j), holds ? kExitOk : kExitCheckFailed};
}

// --- spectrum -----------------------------------------------------------------

expsum::SupportedFunction load_function(const std::string& set_file, const std::string& set_list) {
  if (!set_file.empty() && !set_list.empty()) throw UsageError("give either --set-file or --set, not both");
  if (!set_file.empty()) return expsum::SupportedFunction::parse(read_file(set_file));
  if (set_list.empty()) throw UsageError("one of --set-file or --set is required");
  std::string text = set_list;
  std::replace(text.begin(), text.end(), ',', '\n');
  return expsum::SupportedFunction::parse(text);
}

Result run_spectrum(std::uint64_t U, double A, const std::string& set_file, const std::string& set_list,
                    const Common& c) {
  const auto f = load_function(set_file, set_list);
  const auto s = expsum::spectrum(f, U, A);
  if (want_csv(c)) {
    std::string out = csv_row({"u", "magnitude"});
    for (const auto& [u, m] : s.entries) out += csv_row({std::to_string(u), num(m)});
    return {out, kExitOk};
  }
  json j;
  j["modulus"] = U;
  j["alpha"] = A;
  j["support_size"] = f.size();
  j["norm1"] = f.norm1();
  j["threshold"] = s.threshold;
  j["size"] = s.entries.size();
  json e = json::array();
  for (const auto& [u, m] : s.entries) e.push_back({{"u", u}, {"magnitude", m}});
  j["entries"] = e;
  return {dump(j), kExitOk};
}

// --- dissociate ---------------------------------------------------------------

struct DissociateArgs {
  std::string points;
  std::string group;
  std::string elements;
  std::optional<double> z;
  std::uint64_t z0 = 2;
  bool brute = false;
  bool greedy = false;
  bool span = false;
  bool assert_dissociate = false;
};

std::vector<std::uint64_t> parse_u64_list(const std::string& text, char sep) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(item, &pos);
    if (pos != item.size()) throw ArgumentError("cannot parse integer '" + item + "'");
    out.push_back(v);
  }
  return out;
}

Result run_dissociate_group(const DissociateArgs& a, const Common& c) {
  const circle::FiniteGroup g(parse_u64_list(a.group, ','));
  std::vector<std::uint64_t> codes;
  std::stringstream ss(a.elements);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto comps = parse_u64_list(item, ':');
    if (comps.size() != g.moduli().size()) {
      throw ArgumentError("element '" + item + "' does not have " + std::to_string(g.moduli().size()) +
                          " components");
    }
    codes.push_back(g.encode(comps));
  }
  const bool dis = g.is_dissociate(codes);
  auto elements_json = [&](const std::vector<std::uint64_t>& v) {
    json arr = json::array();
    for (auto code : v) arr.push_back(g.decode(code));
    return arr;
  };
  json j;
  j["moduli"] = g.moduli();
  j["elements"] = elements_json(codes);
  j["is_dissociate"] = dis;
  if (a.span) j["span_size"] = g.span(codes).size();
  if (a.greedy) j["greedy"] = elements_json(g.greedy_dissociate(codes));
  const bool holds = !a.assert_dissociate || dis;
  if (want_csv(c)) {
    return {csv_row({"moduli", "size", "is_dissociate"}) +
                csv_row({a.group, std::to_string(codes.size()), dis ? "true" : "false"}),
            holds ? kExitOk : kExitCheckFailed};
  }
  return {dump(j), holds ? kExitOk : kExitCheckFailed};
}

Result run_dissociate(const DissociateArgs& a, const Common& c) {
  if (!a.group.empty() || !a.elements.empty()) {
    if (!a.points.empty()) throw UsageError("--points cannot be combined with --group/--elements");
    if (a.group.empty() || a.elements.empty()) throw UsageError("--group and --elements go together");
    return run_dissociate_group(a, c);
  }
  if (a.points.empty()) throw UsageError("one of --points or --group/--elements is required");
  std::vector<circle::CirclePoint> pts;
  std::stringstream ss(a.points);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) pts.push_back(circle::CirclePoint::parse(item, c.tolerance));
  }
  const circle::PointSet x(std::move(pts));
  json j;
  json plist = json::array();
  for (const auto& p : x.points()) plist.push_back(p.to_string());
  j["points"] = plist;
  j["exact"] = x.exact();
  const auto ds = circle::delta_star(x);
  const bool dis = circle::is_dissociate(x);
  j["is_dissociate"] = dis;
  j["delta_star"] = scalar_json(ds);
  j["min_gap"] = x.size() >= 2 ? scalar_json(circle::min_gap(x)) : json(nullptr);
  if (a.z) {
    const auto method = a.brute ? circle::ArithMethod::brute_force : circle::ArithMethod::accelerated;
    j["delta_star_arith"] = scalar_json(circle::delta_star_arith(x, *a.z, a.z0, method));
    j["z"] = *a.z;
    j["z0"] = a.z0;
  }
  if (a.greedy) {
    json g = json::array();
    const auto picked = circle::greedy_dissociate(x);
    for (const auto& p : picked.points()) g.push_back(p.to_string());
    j["greedy"] = g;
  }
  if (a.span) j["span_size"] = circle::span(x).size();
  const bool holds = !a.assert_dissociate || dis;
  if (want_csv(c)) {
    return {csv_row({"size", "is_dissociate", "delta_star", "delta_star_exact"}) +
                csv_row({std::to_string(x.size()), dis ? "true" : "false", num(ds.value()),
                         ds.exact ? ds.exact->to_string() : ""}),
            holds ? kExitOk : kExitCheckFailed};
  }
  return {dump(j), holds ? kExitOk : kExitCheckFailed};
}

// --- verify -------------------------------------------------------------------

struct VerifyArgs {
  std::string kind;
  std::string config;
  std::uint64_t trials = 100;
  double n = 512;
  std::size_t max_points = 8;
  std::string setting = "interval";
  double kappa = 0.5;
  std::uint64_t z0 = 2;
};

json report_json(const verify::InequalityReport& r) {
  json j;
  j["kind"] = verify::kind_name(r.kind);
  j["lhs"] = jnum(r.lhs);
  j["rhs"] = jnum(r.rhs);
  j["ratio"] = jnum(r.ratio);
  json k = json::object();
  for (const auto& [name, v] : r.constants) k[name] = jnum(v);
  j["constants"] = k;
  j["holds"] = r.holds;
  j["seed"] = r.seed;
  j["instance_digest"] = hex64(r.instance_digest);
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

json aggregate_json(const verify::AggregateReport& a) {
  json j;
  j["kind"] = verify::kind_name(a.kind);
  j["trials"] = a.trials;
  j["seed"] = a.seed;
  j["failures"] = a.failures;
  j["worst_ratio"] = jnum(a.worst_ratio);
  j["worst_trial"] = a.worst_trial;
  j["worst"] = report_json(a.worst);
  json f = json::array();
  for (const auto& r : a.failed) f.push_back(report_json(r));
  j["failed"] = f;
  j["holds"] = a.failures == 0;
  return j;
}

Result run_verify(const VerifyArgs& a, const Common& c) {
  if (!a.config.empty()) {
    auto inst = verify::Instance::parse(read_file(a.config));
    if (!a.kind.empty() && verify::parse_kind(a.kind) != inst.kind) {
      throw UsageError("--kind " + a.kind + " disagrees with kind in " + a.config);
    }
    const auto r = verify::check(inst);
    const int code = r.holds ? kExitOk : kExitCheckFailed;
    if (want_csv(c)) {
      return {csv_row({"kind", "lhs", "rhs", "ratio", "holds", "seed", "instance_digest"}) +
                  csv_row({std::string(verify::kind_name(r.kind)), num(r.lhs), num(r.rhs), num(r.ratio),
                           r.holds ? "true" : "false", std::to_string(r.seed), hex64(r.instance_digest)}),
              code};
    }
    return {dump(report_json(r)), code};
  }
  if (a.kind.empty()) throw UsageError("--kind is required (or give --config)");
  verify::GeneratorConfig cfg;
  cfg.N = a.n;
  cfg.max_points = a.max_points;
  cfg.setting = verify::parse_setting(a.setting);
  cfg.kappa = a.kappa;
  cfg.z0 = a.z0;
  std::vector<verify::Kind> kinds;
  if (a.kind == "all") {
    kinds = verify::all_kinds();
  } else {
    kinds.push_back(verify::parse_kind(a.kind));
  }
  bool holds = true;
  json reports = json::array();
  std::string csv = csv_row({"kind", "trials", "seed", "failures", "worst_ratio", "worst_trial", "holds"});
  for (auto k : kinds) {
    const auto agg = verify::check_randomized(k, cfg, a.trials, c.seed);
    holds = holds && agg.failures == 0;
    reports.push_back(aggregate_json(agg));
    csv += csv_row({std::string(verify::kind_name(k)), std::to_string(agg.trials), std::to_string(agg.seed),
                    std::to_string(agg.failures), num(agg.worst_ratio), std::to_string(agg.worst_trial),
                    agg.failures == 0 ? "true" : "false"});
  }
  const int code = holds ? kExitOk : kExitCheckFailed;
  if (want_csv(c)) return {csv, code};
  if (reports.size() == 1) return {dump(reports[0]), code};
  json j;
  j["reports"] = reports;
  j["holds"] = holds;
  return {dump(j), code};
}

// --- chang ----------------------------------------------------------------------

struct ChangArgs {
  double n = 0;
  std::uint64_t u1 = 0, u2 = 0;
  double alpha = 2.0;
  bool primes_all = false;
  std::string set_file;
  bool override_window = false;
};

Result run_chang(const ChangArgs& a, const Common& c) {
  std::vector<std::uint64_t> S;
  if (a.primes_all == !a.set_file.empty()) throw UsageError("give exactly one of --primes-all or --set-file");
  if (a.primes_all) {
    if (!(a.n >= 2)) throw ArgumentError("--n must be >= 2");
    const auto hi = static_cast<std::uint64_t>(std::floor(a.n));
    const double lo = std::pow(a.n, 0.25) - 1e-9;
    const auto table = arith::FactorTable::build(hi);
    for (auto p : table.primes_up_to(hi)) {
      if (static_cast<double>(p) >= lo) S.push_back(p);
    }
  } else {
    const auto f = expsum::SupportedFunction::parse(read_file(a.set_file));
    for (auto n : f.support()) {
      if (n <= 0) throw ArgumentError("set file entries must be positive");
      S.push_back(static_cast<std::uint64_t>(n));
    }
  }
  chang::ChangOptions opts;
  opts.override_window = a.override_window;
  const auto d = chang::chang_decompose(S, a.n, a.u1, a.u2, a.alpha, opts);

  bool holds = d.containment_verified;
  json comps = json::array();
  for (const auto& comp : d.components) {
    holds = holds && comp.is_dissociate && comp.is_maximal && comp.covers_projection && comp.log_bound_holds;
    if (d.bound_asserted) holds = holds && comp.bound_holds;
    comps.push_back({{"modulus", comp.modulus},
                     {"projection_size", comp.projection.size()},
                     {"D", comp.dissociate},
                     {"size", comp.dissociate.size()},
                     {"span_size", comp.span_size},
                     {"dissociate", comp.is_dissociate},
                     {"maximal", comp.is_maximal},
                     {"covers_projection", comp.covers_projection},
                     {"bound_holds", comp.bound_holds},
                     {"log_bound", comp.log_bound},
                     {"log_bound_holds", comp.log_bound_holds}});
  }
  const int code = holds ? kExitOk : kExitCheckFailed;
  if (want_csv(c)) {
    std::string out = csv_row({"component", "modulus", "size", "span_size", "bound_value", "bound_holds",
                               "log_bound_holds", "containment_verified"});
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& comp = d.components[i];
      out += csv_row({std::to_string(i + 1), std::to_string(comp.modulus), std::to_string(comp.dissociate.size()),
                      std::to_string(comp.span_size), num(d.bound_value), comp.bound_holds ? "true" : "false",
                      comp.log_bound_holds ? "true" : "false", d.containment_verified ? "true" : "false"});
    }
    return {out, code};
  }
  json j;
  j["N"] = d.N;
  j["U1"] = d.U1;
  j["U2"] = d.U2;
  j["U"] = d.U;
  j["A"] = d.A;
  j["K"] = d.K;
  j["support_size"] = d.support_size;
  j["threshold"] = d.threshold;
  j["spectrum_size"] = d.spectrum.size();
  j["spectrum"] = d.spectrum;
  j["components"] = comps;
  j["bound_value"] = jnum(d.bound_value);
  j["contextual_bound"] = jnum(d.contextual_bound);
  j["containment_verified"] = d.containment_verified;
  j["conforming"] = d.conforming;
  j["bound_asserted"] = d.bound_asserted;
  j["holds"] = holds;
  return {dump(j), code};
}

// --- majorant -------------------------------------------------------------------

struct MajorantArgs {
  double m = 0.0;
  double n = 0.0;
  double delta = 0.0;
  unsigned terms = majorant::kDefaultTerms;
  bool plot = false;
  std::optional<double> t_min, t_max;
  std::uint64_t points = 1001;
  std::vector<double> alphas;
};

Result run_majorant(const MajorantArgs& a, const Common& c) {
  const auto psi = majorant::SelbergMajorant::construct(a.m, a.n, a.delta, a.terms);
  const double pad = a.n + 4.0 / a.delta;
  const double lo = a.t_min.value_or(a.m - pad);
  const double hi = a.t_max.value_or(a.m + a.n + pad);
  if (!(hi > lo)) throw ArgumentError("--t-max must exceed --t-min");
  if (a.points < 2) throw ArgumentError("--points must be >= 2");
  if (a.plot) {
    std::string out = csv_row({"t", "psi"});
    for (std::uint64_t i = 0; i < a.points; ++i) {
      const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(a.points - 1);
      out += csv_row({num(t), num(psi(t))});
    }
    return {out, kExitOk};
  }

  bool holds = true;
  // Pointwise: psi >= 0 everywhere, psi >= 1 on [M, M+N], up to the evaluation bound.
  double min_psi = INFINITY, min_inside = INFINITY;
  for (std::uint64_t i = 0; i < a.points; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(a.points - 1);
    const double v = psi(t);
    min_psi = std::min(min_psi, v);
    if (t >= a.m && t <= a.m + a.n) min_inside = std::min(min_inside, v);
  }
  const bool pointwise = min_psi >= -psi.tail_bound() && (std::isinf(min_inside) || min_inside >= 1.0 - psi.tail_bound());
  holds = holds && pointwise;

  std::vector<double> alphas = a.alphas;
  if (alphas.empty()) alphas = {0.0, a.delta / 2, a.delta, 2 * a.delta};
  json fourier = json::array();
  for (double alpha : alphas) {
    double step = 0.99 / (std::abs(alpha) + a.delta);
    majorant::FourierSample fs;
    try {
      fs = psi.fourier_mass_check(alpha, step);
    } catch (const AccuracyError& e) {
      step = e.required_step();
      fs = psi.fourier_mass_check(alpha, step);
    }
    json row = {{"alpha", alpha},
                {"re", fs.value.real()},
                {"im", fs.value.imag()},
                {"error_bound", fs.error_bound},
                {"step", step},
                {"samples", fs.samples}};
    std::optional<double> expected;
    if (alpha == 0.0) expected = psi.mass();
    if (std::abs(alpha) >= a.delta) expected = 0.0;
    if (expected) {
      const bool ok = std::abs(fs.value - std::complex<double>(*expected, 0.0)) <= fs.error_bound;
      row["expected"] = *expected;
      row["holds"] = ok;
      holds = holds && ok;
    } else {
      row["expected"] = nullptr;
    }
    fourier.push_back(row);
  }

  const auto lat = psi.lattice_sum(1e-7);
  json j;
  j["M"] = a.m;
  j["N"] = a.n;
  j["delta"] = a.delta;
  j["terms"] = psi.terms();
  j["mass"] = psi.mass();
  j["tail_bound"] = psi.tail_bound();
  j["pointwise"] = {{"t_min", lo}, {"t_max", hi}, {"points", a.points}, {"min_psi", min_psi},
                    {"min_psi_on_interval", jnum(min_inside)}, {"holds", pointwise}};
  j["fourier"] = fourier;
  json lj = {{"value", lat.value}, {"error_bound", lat.error_bound}};
  if (a.delta < 1.0) {
    // Poisson summation: only the zero frequency survives when delta < 1.
    const bool ok = std::abs(lat.value - psi.mass()) <= lat.error_bound;
    lj["expected"] = psi.mass();
    lj["holds"] = ok;
    holds = holds && ok;
  }
  j["lattice_sum"] = lj;
  j["holds"] = holds;
  if (want_csv(c)) {
    std::string out = csv_row({"alpha", "re", "im", "error_bound"});
    for (const auto& row : fourier) {
      out += csv_row({num(row["alpha"].get<double>()), num(row["re"].get<double>()), num(row["im"].get<double>()),
                      num(row["error_bound"].get<double>())});
    }
    return {out, holds ? kExitOk : kExitCheckFailed};
  }
  return {dump(j), holds ? kExitOk : kExitCheckFailed};
}

// --- constants ------------------------------------------------------------------

Result run_constants(const std::string& which, const Common& c) {
  std::vector<verify::ConstantCheck> checks;
  if (which == "all") {
    checks = {verify::ConstantCheck::stirling, verify::ConstantCheck::gamma_chain, verify::ConstantCheck::cosh_bounds,
              verify::ConstantCheck::corollary_c};
  } else {
    checks.push_back(verify::parse_constant_check(which));
  }
  bool holds = true;
  json arr = json::array();
  std::string csv = csv_row({"which", "points", "min_margin", "worst_at", "max_residual", "holds"});
  for (auto w : checks) {
    const auto r = verify::check_constants(w);
    holds = holds && r.holds;
    json d = json::object();
    for (const auto& [k, v] : r.details) d[k] = jnum(v);
    arr.push_back({{"which", verify::constant_check_name(w)},
                   {"points", r.points},
                   {"min_margin", jnum(r.min_margin)},
                   {"worst_at", r.worst_at},
                   {"max_residual", jnum(r.max_residual)},
                   {"holds", r.holds},
                   {"details", d}});
    csv += csv_row({std::string(verify::constant_check_name(w)), std::to_string(r.points), num(r.min_margin),
                    num(r.worst_at), num(r.max_residual), r.holds ? "true" : "false"});
  }
  const int code = holds ? kExitOk : kExitCheckFailed;
  if (want_csv(c)) return {csv, code};
  json j;
  j["checks"] = arr;
  j["holds"] = holds;
  return {dump(j), code};
}

// --- plumbing -------------------------------------------------------------------

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--emit", c.emit, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  sub->add_option("--out", c.out, "Output path (default stdout)");
  sub->add_option("--manifest", c.manifest, "Write the run manifest here instead of stderr");
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads, 0 = all processors")->capture_default_str();
  sub->add_option("--tolerance", c.tolerance, "Tolerance for real circle points")->capture_default_str();
}

std::vector<std::string> option_names(const CLI::App* app) {
  std::vector<std::string> out;
  for (const auto* opt : app->get_options()) {
    for (const auto& n : opt->get_lnames()) out.push_back("--" + n);
  }
  return out;
}

json parameter_map(const CLI::App* sub) {
  json params = json::object();
  for (const auto* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "out" || name == "manifest") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (opt->get_type_size() == 0) {
        params[name] = true;
      } else if (res.size() == 1) {
        params[name] = res.front();
      } else {
        params[name] = res;
      }
    } else if (!opt->get_default_str().empty()) {
      params[name] = opt->get_default_str();
    }
  }
  return params;
}

}  // namespace

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string suggest(std::string_view word, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_d = 4;
  for (const auto& c : candidates) {
    const std::size_t d = edit_distance(word, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sieve weights, dissociate sets and large-sieve inequality checks", "dsieve"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", DSIEVE_VERSION);

  Common common;
  ScanArgs scan;
  double sq_z = 0.0;
  double ps_z = 0.0;
  std::uint64_t ps_z0 = 2;
  std::uint64_t sp_modulus = 0;
  double sp_alpha = 1.0;
  std::string sp_file, sp_list;
  DissociateArgs dis;
  VerifyArgs ver;
  ChangArgs ch;
  MajorantArgs maj;
  std::string which = "all";

  auto* s_scan = app.add_subcommand("gsharp-scan", "Scan G#(z)/z for z <= limit");
  s_scan->add_option("--limit", scan.limit, "Largest z")->required();
  s_scan->add_option("--min-from", scan.min_from, "Running minimum only over z >= this")->capture_default_str();
  s_scan->add_option("--segment", scan.segment, "Sieve segment length")->capture_default_str();
  s_scan->add_flag("--serial", scan.serial, "Use the serial reference kernel");
  s_scan->add_flag("--long", scan.long_run, "Allow limits above 1e8");
  s_scan->add_option("--assert-min", scan.assert_min, "Fail (exit 2) when the minimum ratio is below this");

  auto* s_sq = app.add_subcommand("square-sieve", "Weights of the squares sieve");
  s_sq->add_option("--z", sq_z, "Sieve level")->required();

  auto* s_ps = app.add_subcommand("prime-sieve", "Selberg weights for the primes");
  s_ps->add_option("--z", ps_z, "Sieve level")->required();
  s_ps->add_option("--z0", ps_z0, "Primes below z0 are not sieved")->capture_default_str();

  auto* s_sp = app.add_subcommand("spectrum", "Large spectrum of a weighted set mod U");
  s_sp->add_option("--modulus", sp_modulus, "U")->required();
  s_sp->add_option("--alpha", sp_alpha, "A: threshold is ||f||_1 / A")->capture_default_str();
  s_sp->add_option("--set-file", sp_file, "Lines 'n [re [im]]'");
  s_sp->add_option("--set", sp_list, "Comma-separated integers");

  auto* s_dis = app.add_subcommand("dissociate", "Dissociativity, delta_star and delta_*");
  s_dis->add_option("--points", dis.points, "Comma-separated a/q or decimals");
  s_dis->add_option("--group", dis.group, "Moduli m1,m2,... of a finite group");
  s_dis->add_option("--elements", dis.elements, "Group elements a:b:...,c:d:...");
  s_dis->add_option("--z", dis.z, "Level z for delta_*(z, z0)");
  s_dis->add_option("--z0", dis.z0, "z0 for delta_*(z, z0)")->capture_default_str();
  s_dis->add_flag("--brute", dis.brute, "Brute-force delta_*");
  s_dis->add_flag("--greedy", dis.greedy, "Also report the greedy dissociate subset");
  s_dis->add_flag("--span", dis.span, "Also report the signed span size");
  s_dis->add_flag("--assert-dissociate", dis.assert_dissociate, "Fail (exit 2) when not dissociate");

  auto* s_ver = app.add_subcommand("verify", "Check an inequality on one instance or on random instances");
  s_ver->add_option("--kind", ver.kind, "Inequality kind, or 'all' for randomized runs");
  s_ver->add_option("--config", ver.config, "key=value instance file");
  s_ver->add_option("--trials", ver.trials, "Random trials")->capture_default_str()->check(CLI::PositiveNumber);
  s_ver->add_option("--n", ver.n, "Generator: N")->capture_default_str();
  s_ver->add_option("--max-points", ver.max_points, "Generator: largest |X|")->capture_default_str();
  s_ver->add_option("--setting", ver.setting, "Generator: interval|primes|squares")->capture_default_str();
  s_ver->add_option("--kappa", ver.kappa, "Generator: kappa for the primes setting")->capture_default_str();
  s_ver->add_option("--z0", ver.z0, "Generator: z0 for the primes setting")->capture_default_str();

  auto* s_ch = app.add_subcommand("chang", "Chang decomposition of the spectrum of a prime set");
  s_ch->add_option("--n", ch.n, "N")->required();
  s_ch->add_option("--u1", ch.u1, "First prime modulus")->required();
  s_ch->add_option("--u2", ch.u2, "Second prime modulus")->required();
  s_ch->add_option("--alpha", ch.alpha, "A >= 1")->capture_default_str();
  s_ch->add_flag("--primes-all", ch.primes_all, "S = all primes in [N^(1/4), N]");
  s_ch->add_option("--set-file", ch.set_file, "S, one integer per line");
  s_ch->add_flag("--override-window", ch.override_window, "Skip the parameter window checks");

  auto* s_maj = app.add_subcommand("majorant", "Band-limited majorant of an interval");
  s_maj->add_option("--m", maj.m, "Interval start M")->capture_default_str();
  s_maj->add_option("--n", maj.n, "Interval length N")->required();
  s_maj->add_option("--delta", maj.delta, "Band limit delta")->required();
  s_maj->add_option("--terms", maj.terms, "Series terms")->capture_default_str();
  s_maj->add_flag("--plot", maj.plot, "Emit (t, psi(t)) CSV");
  s_maj->add_option("--t-min", maj.t_min, "Plot/grid start");
  s_maj->add_option("--t-max", maj.t_max, "Plot/grid end");
  s_maj->add_option("--points", maj.points, "Plot/grid points")->capture_default_str();
  s_maj->add_option("--alpha", maj.alphas, "Frequencies for the Fourier check");

  auto* s_const = app.add_subcommand("constants", "Closed-form constant checks");
  s_const->add_option("--which", which, "stirling|gamma_chain|cosh_bounds|corollary_c|all")->capture_default_str();

  std::vector<CLI::App*> subs{s_scan, s_sq, s_ps, s_sp, s_dis, s_ver, s_ch, s_maj, s_const};
  for (auto* s : subs) add_common(s, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* chosen = nullptr;
    for (auto* s : subs) {
      if (s->parsed()) chosen = s;
    }
    std::vector<std::string> names;
    for (auto* s : subs) names.push_back(s->get_name());
    for (const auto& a : args) {
      if (a.rfind("--", 0) == 0) {
        const std::string flag = a.substr(0, a.find('='));
        const auto known = chosen ? option_names(chosen) : std::vector<std::string>{};
        if (chosen && std::find(known.begin(), known.end(), flag) == known.end()) {
          if (auto s = suggest(flag, known); !s.empty()) err << "did you mean " << s << "?\n";
        }
      } else if (!chosen && std::find(names.begin(), names.end(), a) == names.end()) {
        if (auto s = suggest(a, names); !s.empty()) err << "did you mean '" << s << "'?\n";
      }
    }
    err << "run 'dsieve --help' for usage\n";
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  parallel::set_threads(common.threads);
  const auto t0 = std::chrono::steady_clock::now();
  Result result;
  try {
    const std::string name = chosen->get_name();
    if (name == "gsharp-scan") {
      result = run_gsharp_scan(scan, common);
    } else if (name == "square-sieve") {
      result = run_square_sieve(sq_z, common);
    } else if (name == "prime-sieve") {
      result = run_prime_sieve(ps_z, ps_z0, common);
    } else if (name == "spectrum") {
      result = run_spectrum(sp_modulus, sp_alpha, sp_file, sp_list, common);
    } else if (name == "dissociate") {
      result = run_dissociate(dis, common);
    } else if (name == "verify") {
      result = run_verify(ver, common);
    } else if (name == "chang") {
      result = run_chang(ch, common);
    } else if (name == "majorant") {
      result = run_majorant(maj, common);
    } else {
      result = run_constants(which, common);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (common.out.empty()) {
    out << result.text;
    out.flush();
  } else {
    std::ofstream f(common.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << common.out << "'\n";
      return kExitUsage;
    }
    f << result.text;
  }

  json manifest;
  manifest["subcommand"] = chosen->get_name();
  manifest["parameters"] = parameter_map(chosen);
  manifest["seed"] = common.seed;
  manifest["tool_version"] = DSIEVE_VERSION;
  manifest["wall_time_s"] = wall;
  manifest["output_digest"] = hex64(verify::fnv1a(result.text));
  manifest["exit_code"] = result.code;
  if (common.manifest.empty()) {
    err << manifest.dump() << "\n";
  } else {
    std::ofstream f(common.manifest, std::ios::binary);
    f << manifest.dump(2) << "\n";
  }
  return result.code;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace dsieve::cli
