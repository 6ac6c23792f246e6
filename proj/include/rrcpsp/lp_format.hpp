#pragma once

// LP text format writer and reader, MST warm-start files and solver solution
// files.

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "rrcpsp/milp.hpp"

namespace rrcpsp {

namespace lp_detail {

inline constexpr std::size_t kLineWidth = 100;

inline void write_terms(std::ostream& out, std::string head, const std::vector<Term>& terms, const MilpModel& model) {
  std::string line = std::move(head);
  auto flush_if_long = [&](const std::string& piece) {
    if (line.size() + piece.size() > kLineWidth) {
      out << line << '\n';
      line = "   ";
    }
    line += piece;
  };
  if (terms.empty()) {
    flush_if_long(" 0 " + model.variables().front().name);
  }
  bool first = true;
  for (const auto& t : terms) {
    std::string piece;
    const Time mag = t.coef < 0 ? -t.coef : t.coef;
    if (first)
      piece = t.coef < 0 ? " -" : " ";
    else
      piece = t.coef < 0 ? " - " : " + ";
    if (mag != 1) piece += std::to_string(mag) + " ";
    piece += model.variables()[t.var].name;
    flush_if_long(piece);
    first = false;
  }
  out << line;
}

inline const char* sense_token(Sense s) {
  switch (s) {
    case Sense::kLessEqual: return "<=";
    case Sense::kGreaterEqual: return ">=";
    case Sense::kEqual: return "=";
  }
  return "=";
}

}  // namespace lp_detail

inline void export_lp(const MilpModel& model, std::ostream& out) {
  out << "Minimize\n";
  lp_detail::write_terms(out, " obj:", model.objective(), model);
  out << "\nSubject To\n";
  for (const auto& c : model.constraints()) {
    lp_detail::write_terms(out, " " + c.name + ":", c.terms, model);
    out << ' ' << lp_detail::sense_token(c.sense) << ' ' << c.rhs << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : model.variables()) {
    const bool binary = v.kind == VarKind::kBinary;
    if (v.fixed()) {
      out << ' ' << v.name << " = " << v.lower << '\n';
    } else if (binary) {
      if (v.lower != 0 || !v.upper || *v.upper != 1)
        out << ' ' << v.lower << " <= " << v.name << " <= " << (v.upper ? std::to_string(*v.upper) : "+inf") << '\n';
    } else if (v.upper) {
      out << ' ' << v.lower << " <= " << v.name << " <= " << *v.upper << '\n';
    } else if (v.lower != 0) {
      out << ' ' << v.name << " >= " << v.lower << '\n';
    }
  }
  std::vector<std::string> generals, binaries;
  for (const auto& v : model.variables()) {
    if (v.kind == VarKind::kInteger) generals.push_back(v.name);
    if (v.kind == VarKind::kBinary) binaries.push_back(v.name);
  }
  auto name_block = [&](const char* title, const std::vector<std::string>& names) {
    if (names.empty()) return;
    out << title << '\n';
    std::string line;
    for (const auto& nm : names) {
      if (line.size() + nm.size() + 1 > lp_detail::kLineWidth) {
        out << line << '\n';
        line.clear();
      }
      line += " " + nm;
    }
    out << line << '\n';
  };
  name_block("Generals", generals);
  name_block("Binaries", binaries);
  out << "End\n";
}

inline std::string export_lp(const MilpModel& model) {
  std::ostringstream out;
  export_lp(model, out);
  return out.str();
}

/// Reads the subset of the LP format written by export_lp: integer
/// coefficients, bounds and right-hand sides, minimization only. Variables are
/// declared in order of first appearance. Row families are recovered from the
/// `cNN_` name prefix.
inline MilpModel read_lp(std::istream& in) {
  enum class Section { kNone, kObjective, kConstraints, kBounds, kGenerals, kBinaries, kEnd };
  std::vector<std::pair<std::string, std::size_t>> tokens;  // token, line
  {
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      if (auto cut = raw.find('\\'); cut != std::string::npos) raw.erase(cut);
      // Split operators off names: "x<=3" -> "x", "<=", "3".
      std::string spaced;
      for (std::size_t p = 0; p < raw.size(); ++p) {
        const char ch = raw[p];
        if (ch == '<' || ch == '>' || ch == '=') {
          spaced += ' ';
          spaced += ch;
          while (p + 1 < raw.size() && (raw[p + 1] == '<' || raw[p + 1] == '>' || raw[p + 1] == '=')) spaced += raw[++p];
          spaced += ' ';
        } else if (ch == '+' || ch == '-') {
          const bool exponent = p > 0 && (raw[p - 1] == 'e' || raw[p - 1] == 'E') && p >= 2 && std::isdigit(static_cast<unsigned char>(raw[p - 2]));
          if (exponent) {
            spaced += ch;
          } else {
            spaced += ' ';
            spaced += ch;
            spaced += ' ';
          }
        } else if (ch == ':') {
          spaced += " : ";
        } else {
          spaced += ch;
        }
      }
      std::istringstream ss(spaced);
      std::string tok;
      while (ss >> tok) tokens.emplace_back(tok, line_no);
    }
  }

  auto lower = [](std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
  };
  auto fail = [](std::size_t line, const std::string& what) -> ParseError {
    return ParseError(line, "lp", what);
  };
  auto parse_int = [&](const std::string& tok, std::size_t line) -> Time {
    Time v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec == std::errc() && p == tok.data() + tok.size()) return v;
    double d = 0;
    try {
      std::size_t used = 0;
      d = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw fail(line, "expected a number, got '" + tok + "'");
    }
    if (d != static_cast<double>(static_cast<Time>(d))) throw fail(line, "non-integral value '" + tok + "'");
    return static_cast<Time>(d);
  };
  auto is_number = [](const std::string& tok) {
    return !tok.empty() && (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '.');
  };
  auto is_sense = [](const std::string& tok) {
    return tok == "<=" || tok == "=<" || tok == "<" || tok == ">=" || tok == "=>" || tok == ">" || tok == "=";
  };
  auto to_sense = [](const std::string& tok) {
    if (tok == "=") return Sense::kEqual;
    return tok.find('<') != std::string::npos ? Sense::kLessEqual : Sense::kGreaterEqual;
  };

  MilpModel model;
  std::map<std::size_t, std::pair<std::optional<Time>, std::optional<std::optional<Time>>>> bounds;
  auto var_of = [&](const std::string& name) {
    if (auto idx = model.find(name)) return *idx;
    return model.add_variable({name, VarKind::kContinuous, 0, std::nullopt, VarRole::kOther});
  };

  std::size_t pos = 0;
  Section section = Section::kNone;
  auto header = [&](std::size_t& p) -> std::optional<Section> {
    const std::string t = lower(tokens[p].first);
    if (t == "minimize" || t == "minimum" || t == "min") return ++p, Section::kObjective;
    if (t == "maximize" || t == "maximum" || t == "max") throw fail(tokens[p].second, "maximization is not supported");
    if (t == "subject" && p + 1 < tokens.size() && lower(tokens[p + 1].first) == "to") return p += 2, Section::kConstraints;
    if (t == "such" && p + 1 < tokens.size() && lower(tokens[p + 1].first) == "that") return p += 2, Section::kConstraints;
    if (t == "st" || t == "s.t.") return ++p, Section::kConstraints;
    if (t == "bounds" || t == "bound") return ++p, Section::kBounds;
    if (t == "generals" || t == "general" || t == "gen") return ++p, Section::kGenerals;
    if (t == "binaries" || t == "binary" || t == "bin") return ++p, Section::kBinaries;
    if (t == "end") return ++p, Section::kEnd;
    return std::nullopt;
  };

  // Linear expression up to a sense token or section header.
  auto read_expr = [&](std::vector<Term>& terms) {
    Time sign = 1;
    std::optional<Time> coef;
    while (pos < tokens.size()) {
      const auto& [tok, line] = tokens[pos];
      if (is_sense(tok)) break;
      {
        std::size_t probe = pos;
        if (header(probe)) break;
      }
      ++pos;
      if (tok == "+") continue;
      if (tok == "-") {
        sign = -sign;
        continue;
      }
      if (is_number(tok)) {
        coef = parse_int(tok, line);
        continue;
      }
      terms.push_back({var_of(tok), sign * coef.value_or(1)});
      sign = 1;
      coef.reset();
    }
    if (coef) throw fail(pos < tokens.size() ? tokens[pos].second : 0, "dangling constant in expression");
  };

  bool seen_objective = false;
  while (pos < tokens.size() && section != Section::kEnd) {
    if (auto s = header(pos)) {
      section = *s;
      continue;
    }
    const std::size_t line = tokens[pos].second;
    switch (section) {
      case Section::kNone:
        throw fail(line, "expected a section header, got '" + tokens[pos].first + "'");
      case Section::kObjective: {
        if (pos + 1 < tokens.size() && tokens[pos + 1].first == ":") pos += 2;
        std::vector<Term> terms;
        read_expr(terms);
        if (seen_objective) throw fail(line, "more than one objective");
        model.set_objective(std::move(terms));
        seen_objective = true;
        break;
      }
      case Section::kConstraints: {
        std::string name = "R" + std::to_string(model.constraints().size());
        if (pos + 1 < tokens.size() && tokens[pos + 1].first == ":") {
          name = tokens[pos].first;
          pos += 2;
        }
        std::vector<Term> terms;
        read_expr(terms);
        if (pos >= tokens.size() || !is_sense(tokens[pos].first)) throw fail(line, "row '" + name + "' has no sense");
        const Sense sense = to_sense(tokens[pos].first);
        ++pos;
        if (pos >= tokens.size()) throw fail(line, "row '" + name + "' has no right-hand side");
        Time sign = 1;
        if (tokens[pos].first == "-" || tokens[pos].first == "+") {
          if (tokens[pos].first == "-") sign = -1;
          ++pos;
        }
        const Time rhs = sign * parse_int(tokens[pos].first, tokens[pos].second);
        ++pos;
        Family family = Family::kOther;
        if (name.size() > 4 && name[0] == 'c' && name[3] == '_') {
          const int code = std::atoi(name.substr(1, 2).c_str());
          for (Family f : {Family::kBigMSameLevel, Family::kBigMNextLevel, Family::kFlowCapacity, Family::kFlowIn,
                           Family::kFlowOut, Family::kAntisymmetry, Family::kTransitivity})
            if (static_cast<int>(f) == code) family = f;
        }
        model.add_constraint(std::move(name), std::move(terms), sense, rhs, family);
        break;
      }
      case Section::kBounds: {
        // forms: x = v | x >= v | x <= v | l <= x <= u | x free
        auto value = [&]() -> std::optional<Time> {
          Time sign = 1;
          if (tokens[pos].first == "-" || tokens[pos].first == "+") {
            if (tokens[pos].first == "-") sign = -1;
            ++pos;
          }
          const std::string t = lower(tokens[pos].first);
          const std::size_t ln = tokens[pos].second;
          ++pos;
          if (t == "inf" || t == "infinity") {
            if (sign < 0) throw fail(ln, "negative infinite lower bounds are not supported");
            return std::nullopt;
          }
          return sign * parse_int(t, ln);
        };
        if (is_number(tokens[pos].first) || tokens[pos].first == "-" || tokens[pos].first == "+") {
          const auto lo = value();
          if (pos + 2 >= tokens.size() || !is_sense(tokens[pos].first)) throw fail(line, "malformed bound");
          ++pos;
          const std::size_t v = var_of(tokens[pos++].first);
          if (!lo) throw fail(line, "infinite lower bound");
          bounds[v].first = *lo;
          if (pos < tokens.size() && is_sense(tokens[pos].first)) {
            ++pos;
            bounds[v].second = value();
          }
        } else {
          const std::size_t v = var_of(tokens[pos++].first);
          if (pos >= tokens.size()) throw fail(line, "malformed bound");
          if (lower(tokens[pos].first) == "free") throw fail(line, "free variables are not supported");
          if (!is_sense(tokens[pos].first)) throw fail(line, "malformed bound");
          const Sense s = to_sense(tokens[pos++].first);
          const auto val = value();
          if (s == Sense::kEqual) {
            if (!val) throw fail(line, "infinite fixing");
            bounds[v] = {*val, std::optional<Time>(*val)};
          } else if (s == Sense::kLessEqual) {
            bounds[v].second = val;
          } else {
            if (!val) throw fail(line, "infinite lower bound");
            bounds[v].first = *val;
          }
        }
        break;
      }
      case Section::kGenerals:
      case Section::kBinaries: {
        const std::size_t v = var_of(tokens[pos++].first);
        auto& var = model.variables()[v];
        var.kind = section == Section::kBinaries ? VarKind::kBinary : VarKind::kInteger;
        if (section == Section::kBinaries) var.upper = 1;
        break;
      }
      case Section::kEnd:
        break;
    }
  }
  if (!seen_objective) throw ParseError(0, "lp", "missing objective");
  for (const auto& [v, b] : bounds) {
    auto& var = model.variables()[v];
    if (b.first) var.lower = *b.first;
    if (b.second) var.upper = *b.second;
  }
  // Restore roles from the naming convention.
  for (auto& var : model.variables()) {
    if (var.name.starts_with("S_")) var.role = VarRole::kStart;
    else if (var.name.starts_with("y_")) var.role = VarRole::kArc;
    else if (var.name.starts_with("f_")) var.role = VarRole::kFlow;
  }
  return model;
}

inline MilpModel read_lp(const std::string& text) {
  std::istringstream in(text);
  return read_lp(in);
}

inline void export_warm_start(const WarmStartAssignment& a, std::ostream& out) {
  for (const auto& [name, v] : a.values) out << name << ' ' << to_string(v) << '\n';
}

inline std::string export_warm_start(const WarmStartAssignment& a) {
  std::ostringstream out;
  export_warm_start(a, out);
  return out.str();
}

}  // namespace rrcpsp
