#include "floodguard/mps.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "floodguard/io.hpp"
#include "floodguard/lp.hpp"

namespace floodguard {

std::string mps_number(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("MPS numbers must be finite");
  if (v == 0.0) return "0";
  char buf[64];
  std::string fit, best;
  for (int p = 1; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    if (std::strlen(buf) > 12) continue;
    fit = buf;
    if (std::strtod(buf, nullptr) == v && (best.empty() || fit.size() < best.size())) best = fit;
  }
  if (!best.empty()) return best;
  if (fit.empty()) throw std::invalid_argument("number does not fit an MPS field");
  return fit;
}

namespace {

std::string col_name(std::size_t j) { return "C" + std::to_string(j + 1); }
std::string row_name(std::size_t i) { return "R" + std::to_string(i + 1); }

void line(std::ostream& out, const char* type, const std::string& a, const std::string& b = {},
          const std::string& num = {}) {
  char buf[96];
  if (num.empty() && b.empty())
    std::snprintf(buf, sizeof buf, " %-2s %s", type, a.c_str());
  else if (num.empty())
    std::snprintf(buf, sizeof buf, " %-2s %-8s  %s", type, a.c_str(), b.c_str());
  else
    std::snprintf(buf, sizeof buf, " %-2s %-8s  %-8s  %s", type, a.c_str(), b.c_str(), num.c_str());
  std::string s(buf);
  while (!s.empty() && s.back() == ' ') s.pop_back();
  out << s << '\n';
}

// Data line with up to two (row, value) pairs in the fixed field positions.
void pairs(std::ostream& out, const std::string& name, const std::vector<std::pair<std::string, std::string>>& entries) {
  for (std::size_t e = 0; e < entries.size(); e += 2) {
    char buf[128];
    if (e + 1 < entries.size())
      std::snprintf(buf, sizeof buf, "    %-8s  %-8s  %-12s   %-8s  %s", name.c_str(), entries[e].first.c_str(),
                    entries[e].second.c_str(), entries[e + 1].first.c_str(), entries[e + 1].second.c_str());
    else
      std::snprintf(buf, sizeof buf, "    %-8s  %-8s  %s", name.c_str(), entries[e].first.c_str(),
                    entries[e].second.c_str());
    out << buf << '\n';
  }
}

}  // namespace

void export_mps(const MilpInstance& instance, std::ostream& out, const std::string& name) {
  instance.check();
  const auto& cat = instance.catalog;
  const std::size_t n = cat.size();
  const std::size_t m = instance.constraints.size();

  std::vector<double> cost(n, 0.0);
  for (const auto& t : instance.objective) cost[t.var] += t.coef;
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(n);
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& t : instance.constraints[i].terms)
      if (t.coef != 0.0) cols[t.var].push_back({i, t.coef});

  out << "NAME          " << name << '\n';
  out << "ROWS\n";
  line(out, "N", "COST");
  for (std::size_t i = 0; i < m; ++i) {
    const Sense s = instance.constraints[i].sense;
    line(out, s == Sense::LessEqual ? "L" : s == Sense::GreaterEqual ? "G" : "E", row_name(i));
  }
  out << "COLUMNS\n";
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::pair<std::string, std::string>> entries;
    if (cost[j] != 0.0 || cols[j].empty()) entries.push_back({"COST", mps_number(cost[j])});
    for (const auto& [i, v] : cols[j]) entries.push_back({row_name(i), mps_number(v)});
    pairs(out, col_name(j), entries);
  }
  out << "RHS\n";
  std::vector<std::pair<std::string, std::string>> rhs;
  for (std::size_t i = 0; i < m; ++i)
    if (instance.constraints[i].rhs != 0.0) rhs.push_back({row_name(i), mps_number(instance.constraints[i].rhs)});
  pairs(out, "RHS", rhs);
  out << "BOUNDS\n";
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = cat[j];
    const std::string c = col_name(j);
    if (v.is_binary()) {
      line(out, "BV", "BND", c);
      continue;
    }
    const bool lo_inf = !std::isfinite(v.lower);
    const bool up_inf = !std::isfinite(v.upper);
    if (!lo_inf && !up_inf && v.lower == v.upper) {
      line(out, "FX", "BND", c, mps_number(v.lower));
    } else if (lo_inf && up_inf) {
      line(out, "FR", "BND", c);
    } else {
      if (lo_inf) line(out, "MI", "BND", c);
      else if (v.lower != 0.0) line(out, "LO", "BND", c, mps_number(v.lower));
      if (!up_inf) line(out, "UP", "BND", c, mps_number(v.upper));
    }
  }
  out << "ENDATA\n";
}

std::string export_mps(const MilpInstance& instance, const std::string& name) {
  std::ostringstream s;
  export_mps(instance, s, name);
  return s.str();
}

void write_mps(const MilpInstance& instance, const std::filesystem::path& path) {
  write_text(path, export_mps(instance));
}

namespace {

double parse_number(const std::string& s, int line_no) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v))
    throw FormatError("MPS line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

MpsModel import_mps(std::istream& in) {
  MpsModel model;
  enum class Section { None, Rows, Columns, Rhs, Ranges, Bounds, ObjSense, Done };
  Section sec = Section::None;
  std::string objective_row;
  bool maximize = false;
  std::map<std::string, int> row_index, col_index;
  std::vector<char> integer;
  bool in_integer_block = false;
  auto& inst = model.instance;

  std::string text;
  int line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty() || text[0] == '*') continue;
    std::istringstream ls(text);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& msg) -> void {
      throw FormatError("MPS line " + std::to_string(line_no) + ": " + msg);
    };

    if (text[0] != ' ' && text[0] != '\t') {
      const std::string& head = tok[0];
      if (head == "NAME") model.name = tok.size() > 1 ? tok[1] : "";
      else if (head == "ROWS") sec = Section::Rows;
      else if (head == "COLUMNS") sec = Section::Columns;
      else if (head == "RHS") sec = Section::Rhs;
      else if (head == "RANGES") sec = Section::Ranges;
      else if (head == "BOUNDS") sec = Section::Bounds;
      else if (head == "OBJSENSE") {
        sec = Section::ObjSense;
        if (tok.size() > 1) maximize = tok[1] == "MAX" || tok[1] == "MAXIMIZE";
      } else if (head == "ENDATA") {
        sec = Section::Done;
        break;
      } else fail("unknown section " + head);
      continue;
    }

    switch (sec) {
      case Section::ObjSense:
        maximize = tok[0] == "MAX" || tok[0] == "MAXIMIZE";
        break;
      case Section::Rows: {
        if (tok.size() != 2) fail("expected row type and name");
        const std::string& type = tok[0];
        if (type == "N") {
          if (objective_row.empty()) objective_row = tok[1];
          break;
        }
        LinearConstraint c;
        if (type == "L") c.sense = Sense::LessEqual;
        else if (type == "G") c.sense = Sense::GreaterEqual;
        else if (type == "E") c.sense = Sense::Equal;
        else fail("unknown row type " + type);
        if (!row_index.emplace(tok[1], static_cast<int>(inst.constraints.size())).second)
          fail("duplicate row " + tok[1]);
        inst.constraints.push_back(std::move(c));
        model.row_names.push_back(tok[1]);
        break;
      }
      case Section::Columns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") in_integer_block = true;
          else if (tok[2] == "'INTEND'") in_integer_block = false;
          else fail("unknown marker " + tok[2]);
          break;
        }
        if (tok.size() != 3 && tok.size() != 5) fail("expected column, row, value pairs");
        auto [it, fresh] = col_index.emplace(tok[0], static_cast<int>(inst.catalog.size()));
        if (fresh) {
          Variable v;
          v.name = tok[0];
          v.lower = 0.0;
          v.upper = in_integer_block ? 1.0 : kInf;
          inst.catalog.add(std::move(v));
          integer.push_back(in_integer_block ? 1 : 0);
        }
        const int j = it->second;
        for (std::size_t f = 1; f + 1 < tok.size(); f += 2) {
          const double v = parse_number(tok[f + 1], line_no);
          if (tok[f] == objective_row) {
            if (v != 0.0) inst.objective.push_back({j, v});
            continue;
          }
          auto r = row_index.find(tok[f]);
          if (r == row_index.end()) fail("unknown row " + tok[f]);
          if (v != 0.0) inst.constraints[r->second].terms.push_back({j, v});
        }
        break;
      }
      case Section::Rhs: {
        if (tok.size() != 3 && tok.size() != 5) fail("expected set name and row, value pairs");
        for (std::size_t f = 1; f + 1 < tok.size(); f += 2) {
          const double v = parse_number(tok[f + 1], line_no);
          if (tok[f] == objective_row) {
            if (v != 0.0) fail("objective constants are not supported");
            continue;
          }
          auto r = row_index.find(tok[f]);
          if (r == row_index.end()) fail("unknown row " + tok[f]);
          inst.constraints[r->second].rhs = v;
        }
        break;
      }
      case Section::Ranges:
        fail("RANGES are not supported");
        break;
      case Section::Bounds: {
        if (tok.size() < 3) fail("expected bound type, set name and column");
        const std::string& type = tok[0];
        auto c = col_index.find(tok[2]);
        if (c == col_index.end()) fail("unknown column " + tok[2]);
        Variable& v = inst.catalog[c->second];
        const bool needs_value = type == "UP" || type == "LO" || type == "FX" || type == "LI" || type == "UI";
        if (needs_value && tok.size() != 4) fail("bound " + type + " needs a value");
        const double val = needs_value ? parse_number(tok[3], line_no) : 0.0;
        if (type == "UP") {
          v.upper = val;
        } else if (type == "LO") {
          v.lower = val;
        } else if (type == "FX") {
          v.lower = v.upper = val;
        } else if (type == "FR") {
          v.lower = -kInf;
          v.upper = kInf;
        } else if (type == "MI") {
          v.lower = -kInf;
        } else if (type == "PL") {
          v.upper = kInf;
        } else if (type == "BV") {
          v.lower = 0.0;
          v.upper = 1.0;
          integer[c->second] = 1;
        } else if (type == "LI" || type == "UI") {
          (type == "LI" ? v.lower : v.upper) = val;
          integer[c->second] = 1;
        } else {
          fail("unknown bound type " + type);
        }
        break;
      }
      default:
        fail("data outside a section");
    }
  }
  if (sec != Section::Done) throw FormatError("MPS: missing ENDATA");

  for (std::size_t j = 0; j < inst.catalog.size(); ++j) {
    if (!integer[j]) continue;
    Variable& v = inst.catalog[j];
    if (v.lower < 0.0 || v.upper > 1.0)
      throw FormatError("MPS: integer column " + v.name + " is not binary; only binary integers are supported");
    v.kind = VarKind::Binary;
    v.lower = std::max(v.lower, 0.0);
  }
  if (maximize)
    for (auto& t : inst.objective) t.coef = -t.coef;
  for (auto& c : inst.constraints) {
    std::map<int, double> merged;
    for (const auto& t : c.terms) merged[t.var] += t.coef;
    c.terms.clear();
    for (const auto& [j, v] : merged) c.terms.push_back({j, v});
  }
  try {
    inst.check();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("MPS: ") + e.what());
  }
  return model;
}

MpsModel read_mps(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return import_mps(in);
}

}  // namespace floodguard
