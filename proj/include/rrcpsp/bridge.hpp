#pragma once

// Runs an external MILP solver as a subprocess on exported model files.

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "rrcpsp/lp_format.hpp"

namespace rrcpsp {

struct SolveOutcome {
  enum class Status { kOptimal, kFeasible, kInfeasible, kTimeout, kError };
  Status status = Status::kError;
  std::optional<double> objective;
  std::optional<double> bound;
  std::map<std::string, double> values;
  double wall_s = 0.0;
  std::string diagnostics;
};

inline std::string to_string(SolveOutcome::Status s) {
  switch (s) {
    case SolveOutcome::Status::kOptimal: return "optimal";
    case SolveOutcome::Status::kFeasible: return "feasible";
    case SolveOutcome::Status::kInfeasible: return "infeasible";
    case SolveOutcome::Status::kTimeout: return "timeout";
    case SolveOutcome::Status::kError: return "error";
  }
  return "error";
}

struct ExternalLimits {
  double time_s = 60.0;
  std::string command;  // template with {lp}, {mst}, {sol}, {time_s}
};

/// Solution file: `<status> [objective] [bound]` followed by `<name> <value>`
/// lines. A timeout that carries values is reported as feasible.
inline SolveOutcome parse_solution(std::istream& in) {
  SolveOutcome out;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "solution", "empty solution file");
  {
    std::istringstream head(line);
    std::string status;
    head >> status;
    static const std::map<std::string, SolveOutcome::Status> kStatus = {
        {"optimal", SolveOutcome::Status::kOptimal},       {"feasible", SolveOutcome::Status::kFeasible},
        {"infeasible", SolveOutcome::Status::kInfeasible}, {"timeout", SolveOutcome::Status::kTimeout},
        {"error", SolveOutcome::Status::kError}};
    auto it = kStatus.find(status);
    if (it == kStatus.end()) throw ParseError(1, "solution", "unknown status '" + status + "'");
    out.status = it->second;
    double v = 0;
    if (head >> v) out.objective = v;
    if (head >> v) out.bound = v;
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string name;
    double v = 0;
    if (!(ss >> name)) continue;
    if (!(ss >> v)) throw ParseError(line_no, "solution", "missing value for '" + name + "'");
    out.values[name] = v;
  }
  if (out.status == SolveOutcome::Status::kTimeout && !out.values.empty()) out.status = SolveOutcome::Status::kFeasible;
  const bool has_solution =
      out.status == SolveOutcome::Status::kOptimal || out.status == SolveOutcome::Status::kFeasible;
  if (!has_solution) {
    out.objective.reset();
    out.values.clear();
  }
  if (has_solution && out.values.empty())
    throw ParseError(line_no, "solution", "status " + to_string(out.status) + " without variable values");
  return out;
}

/// Checks solver values against bounds, integrality and rows within `tol`.
/// Returns the first violation found.
inline std::optional<std::string> validate_solution(const MilpModel& model, const std::map<std::string, double>& values,
                                                    double tol = 1e-6) {
  std::vector<double> x(model.variables().size(), 0.0);
  for (std::size_t v = 0; v < x.size(); ++v) {
    const auto& var = model.variables()[v];
    auto it = values.find(var.name);
    if (it == values.end()) return "no value for " + var.name;
    x[v] = it->second;
    if (x[v] < static_cast<double>(var.lower) - tol || (var.upper && x[v] > static_cast<double>(*var.upper) + tol))
      return var.name + " = " + std::to_string(x[v]) + " violates its bounds";
    if (var.kind != VarKind::kContinuous && std::abs(x[v] - std::round(x[v])) > tol)
      return var.name + " = " + std::to_string(x[v]) + " is not integral";
  }
  for (const auto& c : model.constraints()) {
    double lhs = 0;
    for (const auto& t : c.terms) lhs += static_cast<double>(t.coef) * x[t.var];
    const double rhs = static_cast<double>(c.rhs);
    const double slack = tol * std::max(1.0, std::abs(rhs));
    const bool ok = c.sense == Sense::kLessEqual      ? lhs <= rhs + slack
                    : c.sense == Sense::kGreaterEqual ? lhs >= rhs - slack
                                                      : std::abs(lhs - rhs) <= slack;
    if (!ok) return "row " + c.name + " violated";
  }
  return std::nullopt;
}

namespace bridge_detail {

inline std::string substitute(std::string tmpl, const std::map<std::string, std::string>& values) {
  for (const auto& [key, val] : values) {
    const std::string pat = "{" + key + "}";
    for (std::size_t p = tmpl.find(pat); p != std::string::npos; p = tmpl.find(pat, p + val.size()))
      tmpl.replace(p, pat.size(), val);
  }
  return tmpl;
}

inline std::filesystem::path fresh_directory() {
  static std::atomic<unsigned> counter{0};
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    auto dir = base / ("rrcpsp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    if (std::filesystem::create_directory(dir)) return dir;
  }
}

}  // namespace bridge_detail

/// Writes the model (and warm start) to a private directory, runs the command
/// template and validates the returned solution against the model.
inline SolveOutcome solve_external(const MilpModel& model, const std::optional<WarmStartAssignment>& warm,
                                   const ExternalLimits& limits) {
  const auto t0 = std::chrono::steady_clock::now();
  auto finish = [&](SolveOutcome out) {
    out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  };
  auto failure = [&](std::string why) {
    SolveOutcome out;
    out.status = SolveOutcome::Status::kError;
    out.diagnostics = std::move(why);
    return finish(std::move(out));
  };
  if (limits.command.empty()) return failure("no solver command configured");

  const auto dir = bridge_detail::fresh_directory();
  struct Cleanup {
    std::filesystem::path dir;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove_all(dir, ec);
    }
  } cleanup{dir};
  const auto lp = dir / "model.lp";
  const auto mst = dir / "warm.mst";
  const auto sol = dir / "model.sol";
  {
    std::ofstream f(lp);
    export_lp(model, f);
  }
  if (warm) {
    std::ofstream f(mst);
    export_warm_start(*warm, f);
  }
  std::ostringstream time_s;
  time_s << limits.time_s;
  const std::string cmd = bridge_detail::substitute(
      limits.command, {{"lp", lp.string()}, {"mst", warm ? mst.string() : std::string("-")}, {"sol", sol.string()},
                       {"time_s", time_s.str()}});
  const std::string log = (dir / "solver.log").string();
  const int raw = std::system(("(" + cmd + ") > '" + log + "' 2>&1").c_str());
  const int code = raw == -1 ? -1 : (WIFEXITED(raw) ? WEXITSTATUS(raw) : 128 + WTERMSIG(raw));
  auto log_tail = [&] {
    std::ifstream f(log);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return text.size() > 2000 ? text.substr(text.size() - 2000) : text;
  };
  if (code != 0) return failure("solver command exited with code " + std::to_string(code) + "\n" + log_tail());

  std::ifstream in(sol);
  if (!in) return failure("solver wrote no solution file\n" + log_tail());
  SolveOutcome out;
  try {
    out = parse_solution(in);
  } catch (const ParseError& e) {
    return failure(std::string("unparseable solution file: ") + e.what());
  }
  if (out.objective) {
    if (auto bad = validate_solution(model, out.values)) return failure("solution rejected: " + *bad);
    double obj = 0;
    for (const auto& t : model.objective())
      obj += static_cast<double>(t.coef) * out.values.at(model.variables()[t.var].name);
    if (std::abs(obj - *out.objective) > 1e-6 * std::max(1.0, std::abs(obj)))
      return failure("reported objective " + std::to_string(*out.objective) + " differs from recomputed " +
                     std::to_string(obj));
    if (out.bound && *out.bound > *out.objective + 1e-6) out.bound = *out.objective;
  }
  return finish(std::move(out));
}

}  // namespace rrcpsp
