#pragma once

// Batch experiments over an instance directory, performance profiles and
// Table-1 style summaries.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rrcpsp/bnb.hpp"
#include "rrcpsp/bridge.hpp"
#include "rrcpsp/psplib.hpp"

namespace rrcpsp {

inline const std::vector<std::string>& known_variants() {
  static const std::vector<std::string> v = {"basic", "trans", "warm", "warm+trans", "bnb"};
  return v;
}

struct ResultRecord {
  std::string instance;
  std::string set;  // J301..J3048, or the instance name when unknown
  int gamma = 0;
  std::string variant;
  std::string status;  // optimal, feasible, infeasible, timeout, error, skipped
  std::optional<double> objective;
  std::optional<double> bound;
  std::optional<double> gap;
  double wall_s = 0.0;

  bool solved() const { return status == "optimal"; }
};

struct BenchConfig {
  std::filesystem::path instances_dir;
  std::vector<int> gammas{3, 5, 7};
  std::vector<std::string> variants{"bnb"};
  double time_limit_s = 60.0;
  std::string bridge_cmd;  // empty = none
  unsigned workers = 1;
};

inline BenchConfig bench_config_from_json(const json& j, const std::filesystem::path& base = {}) {
  BenchConfig c;
  c.instances_dir = j.at("instances_dir").get<std::string>();
  if (c.instances_dir.is_relative() && !base.empty()) c.instances_dir = base / c.instances_dir;
  if (j.contains("gammas")) c.gammas = j.at("gammas").get<std::vector<int>>();
  if (j.contains("variants")) c.variants = j.at("variants").get<std::vector<std::string>>();
  if (j.contains("time_limit_s")) c.time_limit_s = j.at("time_limit_s").get<double>();
  if (j.contains("bridge_cmd") && !j.at("bridge_cmd").is_null()) c.bridge_cmd = j.at("bridge_cmd").get<std::string>();
  if (j.contains("workers")) c.workers = std::max(1u, j.at("workers").get<unsigned>());
  for (const auto& v : c.variants)
    if (std::find(known_variants().begin(), known_variants().end(), v) == known_variants().end())
      throw DomainError("unknown variant '" + v + "'");
  for (int g : c.gammas)
    if (g < 0) throw DomainError("budget must be nonnegative");
  return c;
}

inline std::string set_label(const std::string& name) {
  static const std::regex re(R"(j30(\d+)_\d+)", std::regex::icase);
  std::smatch m;
  if (std::regex_search(name, m, re)) return "J30" + m[1].str();
  return name;
}

struct CompactVariant {
  bool transitivity = false;
  bool warm = false;
};

inline CompactVariant compact_variant(const std::string& v) {
  if (v == "basic") return {false, false};
  if (v == "trans") return {true, false};
  if (v == "warm") return {false, true};
  if (v == "warm+trans") return {true, true};
  throw DomainError("'" + v + "' is not a compact-model variant");
}

/// Builds the model for a compact variant. Warm variants tighten M from time
/// windows at the warm-start upper bound and ship the warm start.
inline std::pair<MilpModel, std::optional<WarmStartAssignment>> build_variant(const ProjectInstance& inst, int gamma,
                                                                             const std::string& variant) {
  const auto cv = compact_variant(variant);
  CompactOptions opts;
  opts.transitivity = cv.transitivity;
  opts.integral_starts = true;
  std::optional<WarmStartAssignment> warm;
  if (cv.warm) {
    const auto ws = warm_start(inst, gamma);
    opts.tighten = time_windows(inst, ws.selection, gamma, ws.ub);
    warm = make_warm_start_assignment(inst, gamma, ws, opts.classical_source_flow);
  }
  return {build_compact(inst, gamma, opts), std::move(warm)};
}

inline ResultRecord solve_variant(const ProjectInstance& inst, int gamma, const std::string& variant,
                                  const BenchConfig& cfg) {
  ResultRecord r;
  r.instance = inst.meta.name;
  r.set = set_label(inst.meta.name);
  r.gamma = gamma;
  r.variant = variant;
  if (variant == "bnb") {
    const auto res = solve_exact(inst, gamma, SearchLimits{cfg.time_limit_s, 10'000'000});
    r.status = res.optimal() ? "optimal" : "feasible";
    r.objective = static_cast<double>(res.value);
    r.bound = static_cast<double>(res.bound);
    r.gap = optimality_gap(res, res.bound);
    r.wall_s = res.wall_s;
    return r;
  }
  if (cfg.bridge_cmd.empty()) {
    r.status = "skipped";
    return r;
  }
  const auto t0 = std::chrono::steady_clock::now();
  auto [model, warm] = build_variant(inst, gamma, variant);
  const auto out = solve_external(model, warm, ExternalLimits{cfg.time_limit_s, cfg.bridge_cmd});
  r.status = to_string(out.status);
  r.objective = out.objective;
  r.bound = out.bound;
  if (out.status == SolveOutcome::Status::kOptimal)
    r.gap = 0.0;
  else if (out.objective && out.bound)
    r.gap = optimality_gap(out.objective, *out.bound);
  r.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Every (instance, Γ, variant) of the configuration, in file-name order. An
/// unreadable instance yields error records and the run continues.
inline std::vector<ResultRecord> run_experiment(const BenchConfig& cfg) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(cfg.instances_dir))
    throw DomainError("instance directory '" + cfg.instances_dir.string() + "' does not exist");
  for (const auto& e : std::filesystem::directory_iterator(cfg.instances_dir))
    if (e.is_regular_file() && e.path().extension() == ".sm") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  const std::size_t per_file = cfg.gammas.size() * cfg.variants.size();
  std::vector<ResultRecord> records(files.size() * per_file);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t f = next++; f < files.size(); f = next++) {
      std::optional<ProjectInstance> inst;
      std::string error;
      try {
        inst = robustify(load_psplib(files[f]));
      } catch (const std::exception& e) {
        error = e.what();
      }
      std::size_t slot = f * per_file;
      for (int gamma : cfg.gammas)
        for (const auto& variant : cfg.variants) {
          ResultRecord r;
          if (inst) {
            try {
              r = solve_variant(*inst, gamma, variant, cfg);
            } catch (const std::exception& e) {
              error = e.what();
            }
          }
          if (!inst || r.status.empty()) {
            r.instance = files[f].stem().string();
            r.set = set_label(r.instance);
            r.gamma = gamma;
            r.variant = variant;
            r.status = "error";
            std::lock_guard lock(log_mutex);
            std::cerr << files[f].string() << ": " << error << '\n';
          }
          records[slot++] = std::move(r);
        }
    }
  };
  const unsigned width = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(files.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < width; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return records;
}

// ---------------------------------------------------------------------------
// CSV

namespace bench_detail {

inline std::string fmt(std::optional<double> v) {
  if (!v) return "";
  std::ostringstream s;
  s << std::setprecision(10) << *v;
  return s.str();
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace bench_detail

inline constexpr const char* kResultsHeader = "instance,set,gamma,variant,status,objective,bound,gap,time_s";

inline void write_results_csv(const std::vector<ResultRecord>& records, std::ostream& out) {
  out << kResultsHeader << '\n';
  for (const auto& r : records)
    out << r.instance << ',' << r.set << ',' << r.gamma << ',' << r.variant << ',' << r.status << ','
        << bench_detail::fmt(r.objective) << ',' << bench_detail::fmt(r.bound) << ',' << bench_detail::fmt(r.gap)
        << ',' << bench_detail::fmt(r.wall_s) << '\n';
}

inline std::vector<ResultRecord> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw ParseError(1, "results", "expected header '" + std::string(kResultsHeader) + "'");
  std::vector<ResultRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = bench_detail::split_csv(line);
    if (c.size() != 9) throw ParseError(line_no, "results", "expected 9 fields");
    try {
      ResultRecord r;
      r.instance = c[0];
      r.set = c[1];
      r.gamma = std::stoi(c[2]);
      r.variant = c[3];
      r.status = c[4];
      r.objective = bench_detail::parse_opt(c[5]);
      r.bound = bench_detail::parse_opt(c[6]);
      r.gap = bench_detail::parse_opt(c[7]);
      r.wall_s = std::stod(c[8]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "results", "malformed number");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Performance profiles

struct PerformanceProfile {
  std::vector<std::string> variants;
  std::vector<std::string> instances;     // "name@gamma"
  std::vector<std::vector<double>> ratio;  // [instance][variant], failure ratio for unsolved
  double failure_ratio = 2.0;             // P
  std::vector<double> taus;                // every distinct ratio, ascending
  std::vector<std::vector<double>> rho;    // [variant][tau index]

  double rho_at(std::size_t variant, double tau) const {
    if (instances.empty()) return 0.0;
    std::size_t hit = 0;
    for (const auto& row : ratio) hit += row[variant] <= tau ? 1 : 0;
    return static_cast<double>(hit) / static_cast<double>(instances.size());
  }
};

inline constexpr double kMinTime = 1e-6;

/// Ratios t_im / min_m t_im over solved pairs; unsolved pairs get P, twice the
/// largest finite ratio. Instances are (name, Γ) pairs.
inline PerformanceProfile performance_profile(const std::vector<ResultRecord>& records,
                                              const std::vector<std::string>& variants) {
  PerformanceProfile p;
  p.variants = variants;
  std::map<std::string, std::vector<const ResultRecord*>> by_instance;
  for (const auto& r : records) {
    auto vit = std::find(variants.begin(), variants.end(), r.variant);
    if (vit == variants.end()) continue;
    auto& slot = by_instance[r.instance + "@" + std::to_string(r.gamma)];
    slot.resize(variants.size(), nullptr);
    auto& cell = slot[static_cast<std::size_t>(vit - variants.begin())];
    if (cell) throw DomainError("duplicate record for " + r.instance + " gamma " + std::to_string(r.gamma) + " variant " + r.variant);
    cell = &r;
  }
  double max_ratio = 1.0;
  std::vector<std::vector<std::optional<double>>> finite;
  for (const auto& [key, row] : by_instance) {
    std::optional<double> best;
    for (std::size_t m = 0; m < row.size(); ++m) {
      if (!row[m]) throw DomainError("missing record for " + key + " variant " + variants[m]);
      if (row[m]->solved()) {
        const double t = std::max(row[m]->wall_s, kMinTime);
        best = best ? std::min(*best, t) : t;
      }
    }
    std::vector<std::optional<double>> r(row.size());
    for (std::size_t m = 0; m < row.size(); ++m)
      if (row[m]->solved()) {
        r[m] = std::max(row[m]->wall_s, kMinTime) / *best;
        max_ratio = std::max(max_ratio, *r[m]);
      }
    p.instances.push_back(key);
    finite.push_back(std::move(r));
  }
  p.failure_ratio = 2.0 * max_ratio;
  std::set<double> taus;
  for (const auto& row : finite) {
    std::vector<double> out;
    for (const auto& v : row) {
      out.push_back(v.value_or(p.failure_ratio));
      taus.insert(out.back());
    }
    p.ratio.push_back(std::move(out));
  }
  p.taus.assign(taus.begin(), taus.end());
  p.rho.assign(variants.size(), {});
  for (std::size_t m = 0; m < variants.size(); ++m)
    for (double tau : p.taus) p.rho[m].push_back(p.rho_at(m, tau));
  return p;
}

inline void write_profile_csv(const PerformanceProfile& p, std::ostream& out) {
  out << "tau";
  for (const auto& v : p.variants) out << ',' << v;
  out << '\n' << std::setprecision(10);
  for (std::size_t t = 0; t < p.taus.size(); ++t) {
    out << p.taus[t];
    for (std::size_t m = 0; m < p.variants.size(); ++m) out << ',' << p.rho[m][t];
    out << '\n';
  }
}

/// Step-function line chart of ρ_m(τ) on a log2 τ axis.
inline void write_profile_svg(const PerformanceProfile& p, std::ostream& out) {
  constexpr double W = 640, H = 400, L = 60, R = 150, T = 20, B = 50;
  const double tau_max = std::max(2.0, p.failure_ratio);
  auto x = [&](double tau) { return L + (W - L - R) * std::log2(std::max(tau, 1.0)) / std::log2(tau_max); };
  auto y = [&](double rho) { return T + (H - T - B) * (1.0 - rho); };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << y(0) << "\" x2=\"" << W - R << "\" y2=\"" << y(0) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << y(0) << "\" x2=\"" << L << "\" y2=\"" << y(1) << "\" stroke=\"black\"/>\n";
  for (double r : {0.0, 0.25, 0.5, 0.75, 1.0})
    out << "<text x=\"" << L - 8 << "\" y=\"" << y(r) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << r << "</text>\n";
  for (double tau = 1; tau <= tau_max * 1.0001; tau *= 2)
    out << "<text x=\"" << x(tau) << "\" y=\"" << y(0) + 16 << "\" font-size=\"11\" text-anchor=\"middle\">" << tau
        << "</text>\n";
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" font-size=\"12\" text-anchor=\"middle\">tau (log2)</text>\n";
  for (std::size_t m = 0; m < p.variants.size(); ++m) {
    const char* color = kColors[m % std::size(kColors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    double prev = 0.0;
    out << x(1) << ',' << y(0) << ' ';
    for (std::size_t t = 0; t < p.taus.size(); ++t) {
      out << x(p.taus[t]) << ',' << y(prev) << ' ' << x(p.taus[t]) << ',' << y(p.rho[m][t]) << ' ';
      prev = p.rho[m][t];
    }
    out << x(tau_max) << ',' << y(prev) << "\"/>\n";
    out << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (m + 1) << "\" font-size=\"12\" fill=\"" << color
        << "\">" << p.variants[m] << "</text>\n";
  }
  out << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Summaries

struct SummaryRow {
  std::string set;
  std::string variant;
  std::optional<double> mean_time;  // over solved
  std::optional<double> mean_gap;   // over unsolved records with a feasible solution
  std::size_t solved = 0;
  std::size_t total = 0;
};

inline std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records) {
  struct Acc {
    double time = 0, gap = 0;
    std::size_t solved = 0, gapped = 0, total = 0;
  };
  // Sets in natural order: J301 < J302 < ... < J3010.
  auto set_key = [](const std::string& s) {
    static const std::regex re(R"(J30(\d+))");
    std::smatch m;
    if (std::regex_match(s, m, re)) return std::pair<long, std::string>(std::stol(m[1].str()), s);
    return std::pair<long, std::string>(std::numeric_limits<long>::max(), s);
  };
  std::map<std::pair<std::pair<long, std::string>, std::string>, Acc> acc;
  std::vector<std::string> variant_order;
  for (const auto& r : records) {
    if (std::find(variant_order.begin(), variant_order.end(), r.variant) == variant_order.end())
      variant_order.push_back(r.variant);
    auto& a = acc[{set_key(r.set), r.variant}];
    ++a.total;
    if (r.solved()) {
      ++a.solved;
      a.time += r.wall_s;
    } else if (r.objective && r.gap) {
      ++a.gapped;
      a.gap += *r.gap;
    }
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, a] : acc) {
    SummaryRow row;
    row.set = key.first.second;
    row.variant = key.second;
    if (a.solved) row.mean_time = a.time / static_cast<double>(a.solved);
    if (a.gapped) row.mean_gap = a.gap / static_cast<double>(a.gapped);
    row.solved = a.solved;
    row.total = a.total;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const SummaryRow& x, const SummaryRow& y) {
    if (x.set != y.set) return set_key(x.set) < set_key(y.set);
    auto pos = [&](const std::string& v) { return std::find(variant_order.begin(), variant_order.end(), v); };
    return pos(x.variant) < pos(y.variant);
  });
  return rows;
}

inline void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "set,variant,time,gap,solv,total\n";
  for (const auto& r : rows)
    out << r.set << ',' << r.variant << ',' << bench_detail::fmt(r.mean_time) << ',' << bench_detail::fmt(r.mean_gap)
        << ',' << r.solved << ',' << r.total << '\n';
}

/// results.csv, profile.csv, profile.svg and summary.csv in `dir`.
inline void write_bench_outputs(const std::vector<ResultRecord>& records, const std::vector<std::string>& variants,
                                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "results.csv");
    write_results_csv(records, f);
  }
  const auto profile = performance_profile(records, variants);
  {
    std::ofstream f(dir / "profile.csv");
    write_profile_csv(profile, f);
  }
  {
    std::ofstream f(dir / "profile.svg");
    write_profile_svg(profile, f);
  }
  std::ofstream f(dir / "summary.csv");
  write_summary_csv(summarize(records), f);
}

}  // namespace rrcpsp
