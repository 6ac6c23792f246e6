#pragma once

// Reader and writer for single-mode PSPLIB project files (.sm).

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rrcpsp/instance.hpp"

namespace rrcpsp {

namespace psplib_detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline Time to_int(std::string_view tok, std::size_t line, const std::string& section) {
  Time v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(line, section, "expected an integer, found '" + std::string(tok) + "'");
  return v;
}

inline bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Value after the ':' of a "key : value" header line.
inline Time header_value(std::string_view line, std::size_t lineno) {
  auto colon = line.find(':');
  if (colon == std::string_view::npos) throw ParseError(lineno, "header", "missing ':'");
  auto toks = split_ws(line.substr(colon + 1));
  if (toks.empty()) throw ParseError(lineno, "header", "missing value");
  return to_int(toks.front(), lineno, "header");
}

}  // namespace psplib_detail

/// NC/RF/RS of the j30 parameter grid, derived from a name like "j3017_4".
inline void apply_j30_metadata(InstanceMeta& meta) {
  static const std::regex pattern(R"(j30(\d+)_(\d+))", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(meta.name, m, pattern)) return;
  const int set = std::stoi(m[1].str());
  if (set < 1 || set > 48) return;
  static constexpr double nc[] = {1.5, 1.8, 2.1};
  static constexpr double rf[] = {0.25, 0.5, 0.75, 1.0};
  static constexpr double rs[] = {0.2, 0.5, 0.7, 1.0};
  meta.network_complexity = nc[(set - 1) / 16];
  meta.resource_factor = rf[((set - 1) / 4) % 4];
  meta.resource_strength = rs[(set - 1) % 4];
}

/// Parses the single-mode PSPLIB layout. Job numbers 1..N map to activities
/// 0..N-1. Deviations are left at zero.
inline ProjectInstance parse_psplib(std::istream& in, std::string name = {}) {
  using namespace psplib_detail;
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  const std::size_t total = lines.size();

  std::size_t jobs_declared = 0;
  std::size_t renewable = 0;
  bool saw_renewable = false;
  std::size_t i = 0;
  auto lineno = [&](std::size_t idx) { return idx + 1; };
  auto is_rule = [](std::string_view l) { return starts_with(trim(l), "***"); };

  // Header block.
  for (; i < total; ++i) {
    std::string_view l = lines[i];
    if (starts_with(l, "PRECEDENCE RELATIONS")) break;
    if (l.find("jobs (incl. supersource/sink") != std::string_view::npos) {
      jobs_declared = static_cast<std::size_t>(header_value(l, lineno(i)));
    } else if (l.find("- renewable") != std::string_view::npos) {
      renewable = static_cast<std::size_t>(header_value(l, lineno(i)));
      saw_renewable = true;
    } else if (l.find("- nonrenewable") != std::string_view::npos ||
               l.find("- doubly constrained") != std::string_view::npos) {
      if (header_value(l, lineno(i)) != 0)
        throw ParseError(lineno(i), "header", "nonrenewable and doubly constrained resources are not supported");
    }
  }
  if (i == total) throw ParseError(total, "header", "missing 'PRECEDENCE RELATIONS:' section");

  // Precedence table.
  const std::string prec = "PRECEDENCE RELATIONS";
  ++i;
  if (i >= total || !starts_with(trim(lines[i]), "jobnr")) throw ParseError(lineno(i), prec, "missing column header");
  ++i;
  struct PrecRow {
    std::size_t line;
    std::vector<Time> succ;
  };
  std::vector<PrecRow> prec_rows;
  for (; i < total && !is_rule(lines[i]); ++i) {
    auto toks = split_ws(lines[i]);
    if (toks.empty()) continue;
    if (toks.size() < 3) throw ParseError(lineno(i), prec, "row needs job number, mode count and successor count");
    const Time job = to_int(toks[0], lineno(i), prec);
    const Time modes = to_int(toks[1], lineno(i), prec);
    const Time nsucc = to_int(toks[2], lineno(i), prec);
    if (job != static_cast<Time>(prec_rows.size()) + 1)
      throw ParseError(lineno(i), prec, "job numbers must be consecutive starting at 1");
    if (modes != 1) throw ParseError(lineno(i), prec, "only single-mode projects are supported");
    if (nsucc < 0 || static_cast<std::size_t>(nsucc) != toks.size() - 3)
      throw ParseError(lineno(i), prec, "successor count does not match the listed successors");
    PrecRow row{lineno(i), {}};
    for (std::size_t t = 3; t < toks.size(); ++t) row.succ.push_back(to_int(toks[t], lineno(i), prec));
    prec_rows.push_back(std::move(row));
  }
  if (i == total) throw ParseError(total, prec, "unterminated section");
  const std::size_t n_jobs = prec_rows.size();
  if (n_jobs < 2) throw ParseError(lineno(i), prec, "a project needs at least the two dummy jobs");
  if (jobs_declared != 0 && jobs_declared != n_jobs)
    throw ParseError(lineno(i), prec, "header declares " + std::to_string(jobs_declared) + " jobs but table lists " +
                                          std::to_string(n_jobs));

  // Requests / durations.
  const std::string req = "REQUESTS/DURATIONS";
  for (; i < total && !starts_with(lines[i], req); ++i) {
    if (!trim(lines[i]).empty() && !is_rule(lines[i]))
      throw ParseError(lineno(i), req, "unexpected content before 'REQUESTS/DURATIONS:'");
  }
  if (i == total) throw ParseError(total, req, "missing 'REQUESTS/DURATIONS:' section");
  ++i;
  if (i >= total || !starts_with(trim(lines[i]), "jobnr")) throw ParseError(lineno(i), req, "missing column header");
  {
    auto toks = split_ws(lines[i]);
    std::size_t r_cols = 0;
    for (auto t : toks)
      if (t.front() == 'R' && t.find_first_not_of("0123456789", 1) == std::string_view::npos) ++r_cols;
    if (!saw_renewable) renewable = r_cols;
    if (r_cols != renewable)
      throw ParseError(lineno(i), req, "column header lists " + std::to_string(r_cols) + " resources, header declares " +
                                           std::to_string(renewable));
  }
  ++i;
  if (i < total && starts_with(trim(lines[i]), "---")) ++i;
  ProjectInstance inst;
  inst.meta.name = std::move(name);
  inst.nominal.assign(n_jobs, 0);
  inst.deviation.assign(n_jobs, 0);
  inst.requirement.assign(n_jobs, std::vector<Time>(renewable, 0));
  std::size_t rows_read = 0;
  for (; i < total && !is_rule(lines[i]); ++i) {
    auto toks = split_ws(lines[i]);
    if (toks.empty()) continue;
    if (toks.size() != 3 + renewable)
      throw ParseError(lineno(i), req, "expected " + std::to_string(3 + renewable) + " fields");
    const Time job = to_int(toks[0], lineno(i), req);
    if (job != static_cast<Time>(rows_read) + 1 || rows_read >= n_jobs)
      throw ParseError(lineno(i), req, "job numbers must be consecutive and match the precedence table");
    if (to_int(toks[1], lineno(i), req) != 1) throw ParseError(lineno(i), req, "only mode 1 is supported");
    const Time dur = to_int(toks[2], lineno(i), req);
    if (dur < 0) throw ParseError(lineno(i), req, "negative duration");
    inst.nominal[rows_read] = dur;
    for (std::size_t k = 0; k < renewable; ++k) {
      const Time r = to_int(toks[3 + k], lineno(i), req);
      if (r < 0) throw ParseError(lineno(i), req, "negative requirement");
      inst.requirement[rows_read][k] = r;
    }
    ++rows_read;
  }
  if (rows_read != n_jobs)
    throw ParseError(lineno(std::min(i, total - 1)), req, "expected " + std::to_string(n_jobs) + " job rows, found " +
                                                             std::to_string(rows_read));

  // Resource availabilities.
  const std::string avail = "RESOURCEAVAILABILITIES";
  for (; i < total && !starts_with(lines[i], avail); ++i) {
    if (!trim(lines[i]).empty() && !is_rule(lines[i]))
      throw ParseError(lineno(i), avail, "unexpected content before 'RESOURCEAVAILABILITIES:'");
  }
  if (i == total) throw ParseError(total, avail, "missing 'RESOURCEAVAILABILITIES:' section");
  i += 2;  // section title and column header
  if (i >= total) throw ParseError(total, avail, "missing availability values");
  {
    auto toks = split_ws(lines[i]);
    if (toks.size() != renewable)
      throw ParseError(lineno(i), avail, "expected " + std::to_string(renewable) + " availability values");
    for (auto t : toks) inst.capacity.push_back(to_int(t, lineno(i), avail));
    for (std::size_t k = 0; k < renewable; ++k)
      if (inst.capacity[k] <= 0) throw ParseError(lineno(i), avail, "availability must be positive");
  }
  const std::size_t avail_line = lineno(i);

  for (std::size_t j = 0; j < n_jobs; ++j) {
    for (Time s : prec_rows[j].succ) {
      if (s < 1 || static_cast<std::size_t>(s) > n_jobs)
        throw ParseError(prec_rows[j].line, prec, "successor " + std::to_string(s) + " does not exist");
      inst.arcs.push_back({j, static_cast<ActivityId>(s - 1)});
    }
  }
  normalize_arcs(inst.arcs);
  if (auto cycle = find_cycle(n_jobs, inst.arcs)) {
    // Report the row of the smallest job on the cycle; job ids are 1-based in the file.
    std::vector<ActivityId> jobs_on_cycle = *cycle;
    const ActivityId first = *std::min_element(jobs_on_cycle.begin(), jobs_on_cycle.end());
    std::string jobs;
    for (auto v : jobs_on_cycle) jobs += (jobs.empty() ? "" : " -> ") + std::to_string(v + 1);
    throw ParseError(prec_rows[first].line, prec, "cyclic precedence: " + jobs);
  }
  try {
    validate(inst);
  } catch (const Error& e) {
    throw ParseError(avail_line, "validation", e.what());
  }
  apply_j30_metadata(inst.meta);
  return inst;
}

inline ProjectInstance load_psplib(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path.string() + "'");
  auto inst = parse_psplib(in, path.stem().string());
  inst.meta.source_path = path.string();
  return inst;
}

/// Writes the official single-mode column layout. Deviations are not part of
/// the format and are dropped.
inline std::string write_psplib(const ProjectInstance& inst) {
  std::ostringstream out;
  const std::string rule(72, '*');
  const std::size_t n = inst.size();
  const std::size_t nk = inst.num_resources();
  const auto succ = successor_lists(n, inst.arcs);
  Time horizon = 0;
  for (auto d : inst.nominal) horizon += d;
  out << rule << '\n';
  out << "file with basedata            : " << (inst.meta.name.empty() ? "project" : inst.meta.name) << ".bas\n";
  out << "initial value random generator: 0\n";
  out << rule << '\n';
  out << "projects                      :  1\n";
  out << "jobs (incl. supersource/sink ):  " << n << '\n';
  out << "horizon                       :  " << horizon << '\n';
  out << "RESOURCES\n";
  out << "  - renewable                 :  " << nk << "   R\n";
  out << "  - nonrenewable              :  0   N\n";
  out << "  - doubly constrained        :  0   D\n";
  out << rule << '\n';
  out << "PROJECT INFORMATION:\n";
  out << "pronr.  #jobs rel.date duedate tardcost  MPM-Time\n";
  out << "    1 " << std::setw(6) << inst.num_real() << "      0 " << std::setw(8) << horizon << "        0 "
      << std::setw(8) << horizon << '\n';
  out << rule << '\n';
  out << "PRECEDENCE RELATIONS:\n";
  out << "jobnr.    #modes  #successors   successors\n";
  for (std::size_t j = 0; j < n; ++j) {
    out << std::setw(4) << j + 1 << "        1" << std::setw(11) << succ[j].size() << "       ";
    for (auto s : succ[j]) out << std::setw(4) << s + 1;
    out << '\n';
  }
  out << rule << '\n';
  out << "REQUESTS/DURATIONS:\n";
  out << "jobnr. mode duration ";
  for (std::size_t k = 0; k < nk; ++k) out << " R" << std::setw(2) << k + 1 << ' ';
  out << '\n' << std::string(72, '-') << '\n';
  for (std::size_t j = 0; j < n; ++j) {
    out << std::setw(3) << j + 1 << "      1" << std::setw(6) << inst.nominal[j] << "   ";
    for (std::size_t k = 0; k < nk; ++k) out << std::setw(5) << inst.requirement[j][k];
    out << '\n';
  }
  out << rule << '\n';
  out << "RESOURCEAVAILABILITIES:\n";
  for (std::size_t k = 0; k < nk; ++k) out << "  R" << std::setw(2) << k + 1;
  out << '\n';
  for (std::size_t k = 0; k < nk; ++k) out << std::setw(5) << inst.capacity[k];
  out << '\n' << rule << '\n';
  return out.str();
}

}  // namespace rrcpsp
