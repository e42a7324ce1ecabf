#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "edgesim/oracle.hpp"

namespace edgesim {

namespace {

constexpr double kTol = 1e-6;

struct VarDecl {
  enum Kind { Bin, Int, Cont } kind = Cont;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double def = 0.0;
};

struct LinTerm {
  double coef;
  std::string var;
};

struct LinRow {
  std::string name;
  std::vector<LinTerm> terms;
  std::string op;  // <= >= ==
  double rhs = 0.0;
};

struct ProdRow {
  std::string name;
  std::string factor;
  std::vector<LinTerm> terms;
};

struct DivLtRow {
  std::string name;
  std::string numerator, denominator, tau;
};

struct WindowVar {
  std::string var;
  Slot slot;
};

struct SupportRow {
  std::string name;
  Slot base = 0;
  std::string end1, end2;
  std::vector<WindowVar> vars;
};

struct ThetaRow {
  JobId job = 0;
  Slot base = 0;
  std::string end1, end2;
  std::vector<WindowVar> sigma;
};

struct StorageTerm {
  std::string xvar;
  JobId job;
};

struct StorageRow {
  std::string name;
  Slot slot = 0;
  double cap = 0.0;
  std::vector<StorageTerm> terms;
};

struct CapTerm {
  std::string xvar;
  std::string stream;
};

struct CapRow {
  std::string name;
  double cap = 0.0;
  std::vector<CapTerm> terms;
};

struct ObjTerm {
  double coef;
  std::string a, b;
};

struct Model {
  std::map<std::string, VarDecl> vars;
  std::vector<LinRow> lin;
  std::vector<ProdRow> prod;
  std::vector<DivLtRow> divlt;
  std::vector<SupportRow> support;
  std::map<JobId, ThetaRow> theta;
  std::vector<StorageRow> storage;
  std::vector<CapRow> caps;
  std::vector<ObjTerm> objective;
};

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& why) {
  throw std::runtime_error("model line " + std::to_string(line_no) + ": " +
                           why);
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

// parse "<coef> <var> [+|- <coef> <var>]..." starting at tokens[k]; stops at
// `stop` token (exclusive) or end
std::vector<LinTerm> parse_linexpr(const std::vector<std::string>& toks,
                                   std::size_t& k, std::size_t line_no,
                                   const std::string& stop = "") {
  std::vector<LinTerm> terms;
  double sign = 1.0;
  bool expect_term = true;
  while (k < toks.size()) {
    const std::string& t = toks[k];
    if (!stop.empty() && t == stop) break;
    if (t == "<=" || t == ">=" || t == "==") break;
    if (t == "+") {
      sign = 1.0;
      ++k;
      expect_term = true;
      continue;
    }
    if (t == "-") {
      sign = -1.0;
      ++k;
      expect_term = true;
      continue;
    }
    if (!expect_term) break;
    if (k + 1 >= toks.size()) parse_fail(line_no, "dangling coefficient");
    terms.push_back({sign * std::stod(t), toks[k + 1]});
    k += 2;
    sign = 1.0;
    expect_term = false;
  }
  return terms;
}

std::vector<WindowVar> parse_window_vars(const std::vector<std::string>& toks,
                                         std::size_t k, std::size_t line_no) {
  std::vector<WindowVar> out;
  for (; k < toks.size(); ++k) {
    const auto at = toks[k].find('@');
    if (at == std::string::npos) parse_fail(line_no, "expected var@slot");
    out.push_back({toks[k].substr(0, at),
                   static_cast<Slot>(std::stoll(toks[k].substr(at + 1)))});
  }
  return out;
}

Model parse_model(const std::string& text) {
  Model m;
  std::stringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool versioned = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto toks = tokens_of(line);
    if (toks.empty()) continue;
    const std::string& kind = toks[0];

    if (kind == "EDGESIM-MODEL") {
      versioned = true;
    } else if (kind == "VAR") {
      if (toks.size() < 3) parse_fail(line_no, "short VAR");
      VarDecl d;
      std::size_t k = 2;
      if (toks[k] == "BIN") {
        d.kind = VarDecl::Bin;
        d.lo = 0;
        d.hi = 1;
        ++k;
      } else if (toks[k] == "INT" || toks[k] == "CONT") {
        d.kind = toks[k] == "INT" ? VarDecl::Int : VarDecl::Cont;
        d.lo = std::stod(toks[k + 1]);
        d.hi = toks[k + 2] == "inf"
                   ? std::numeric_limits<double>::infinity()
                   : std::stod(toks[k + 2]);
        k += 3;
      } else {
        parse_fail(line_no, "unknown VAR kind " + toks[k]);
      }
      if (k + 1 < toks.size() && toks[k] == "DEFAULT")
        d.def = std::stod(toks[k + 1]);
      m.vars[toks[1]] = d;
    } else if (kind == "LIN") {
      LinRow row;
      row.name = toks[1];
      std::size_t k = 3;  // skip ':'
      row.terms = parse_linexpr(toks, k, line_no);
      if (k + 1 >= toks.size() + 1) parse_fail(line_no, "missing op/rhs");
      row.op = toks[k];
      row.rhs = std::stod(toks[k + 1]);
      m.lin.push_back(std::move(row));
    } else if (kind == "PROD") {
      // PROD name : factor * ( expr ) == 0
      ProdRow row;
      row.name = toks[1];
      row.factor = toks[3];
      std::size_t k = 6;  // skip ':' factor '*' '('
      row.terms = parse_linexpr(toks, k, line_no, ")");
      m.prod.push_back(std::move(row));
    } else if (kind == "DIVLT") {
      m.divlt.push_back({toks[1], toks[3], toks[4], toks[5]});
    } else if (kind == "SUPPORT") {
      // SUPPORT name : BASE a ENDMIN v1 v2 VARS x@n ...
      SupportRow row;
      row.name = toks[1];
      row.base = std::stoll(toks[4]);
      row.end1 = toks[6];
      row.end2 = toks[7];
      row.vars = parse_window_vars(toks, 9, line_no);
      m.support.push_back(std::move(row));
    } else if (kind == "THETA") {
      ThetaRow row;
      row.job = std::stoll(toks[1]);
      row.base = std::stoll(toks[4]);
      row.end1 = toks[6];
      row.end2 = toks[7];
      row.sigma = parse_window_vars(toks, 9, line_no);
      m.theta[row.job] = std::move(row);
    } else if (kind == "STORAGE") {
      // STORAGE name : SERVER i SLOT n CAP c TERM xvar job ...
      StorageRow row;
      row.name = toks[1];
      row.slot = std::stoll(toks[6]);
      row.cap = std::stod(toks[8]);
      for (std::size_t k = 9; k + 2 < toks.size() + 1; k += 3) {
        if (toks[k] != "TERM") parse_fail(line_no, "expected TERM");
        row.terms.push_back({toks[k + 1], std::stoll(toks[k + 2])});
      }
      m.storage.push_back(std::move(row));
    } else if (kind == "CAPSUM") {
      CapRow row;
      row.name = toks[1];
      row.cap = std::stod(toks[8]);
      for (std::size_t k = 9; k + 2 < toks.size() + 1; k += 3) {
        if (toks[k] != "TERM") parse_fail(line_no, "expected TERM");
        row.terms.push_back({toks[k + 1], toks[k + 2]});
      }
      m.caps.push_back(std::move(row));
    } else if (kind == "OBJ") {
      for (std::size_t k = 3; k + 3 < toks.size() + 1; k += 4) {
        if (toks[k] != "TERM") parse_fail(line_no, "expected TERM");
        m.objective.push_back(
            {std::stod(toks[k + 1]), toks[k + 2], toks[k + 3]});
      }
    } else if (kind == "NAME" || kind == "HORIZON" || kind == "SERVERS" ||
               kind == "JOBS" || kind == "EPSILON" || kind == "SERVER" ||
               kind == "JOB") {
      // instance echo, not needed for validation
    } else {
      parse_fail(line_no, "unknown record " + kind);
    }
  }
  if (!versioned) throw std::runtime_error("not an EDGESIM-MODEL file");
  return m;
}

}  // namespace

ValidationReport validate_solution(const std::string& model_text,
                                   const nlohmann::json& solution) {
  const Model model = parse_model(model_text);
  ValidationReport report;

  std::map<std::string, double> value;
  for (const auto& [name, decl] : model.vars) {
    if (solution.contains(name)) {
      value[name] = solution.at(name).get<double>();
    } else {
      value[name] = decl.def;
      if (decl.def != 0.0 || decl.kind != VarDecl::Cont)
        report.defaulted.push_back(name);
    }
  }
  for (const auto& [name, v] : solution.items()) {
    if (!model.vars.count(name))
      report.violations.push_back({"(solution)", "unknown variable " + name});
    (void)v;
  }

  auto val = [&](const std::string& name) -> double {
    const auto it = value.find(name);
    if (it == value.end())
      throw std::runtime_error("model references undeclared variable " + name);
    return it->second;
  };

  // domains
  for (const auto& [name, decl] : model.vars) {
    const double v = value[name];
    if (v < decl.lo - kTol || v > decl.hi + kTol)
      report.violations.push_back(
          {"domain", name + " = " + std::to_string(v) + " out of bounds"});
    if (decl.kind != VarDecl::Cont &&
        std::abs(v - std::round(v)) > kTol)
      report.violations.push_back({"domain", name + " not integral"});
  }

  auto eval = [&](const std::vector<LinTerm>& terms) {
    double s = 0.0;
    for (const auto& t : terms) s += t.coef * val(t.var);
    return s;
  };

  for (const auto& row : model.lin) {
    const double lhs = eval(row.terms);
    bool ok = true;
    if (row.op == "<=")
      ok = lhs <= row.rhs + kTol;
    else if (row.op == ">=")
      ok = lhs >= row.rhs - kTol;
    else
      ok = std::abs(lhs - row.rhs) <= kTol;
    if (!ok)
      report.violations.push_back(
          {row.name, "lhs " + std::to_string(lhs) + " " + row.op + " rhs " +
                         std::to_string(row.rhs) + " fails"});
  }

  for (const auto& row : model.prod) {
    const double lhs = val(row.factor) * eval(row.terms);
    if (std::abs(lhs) > kTol)
      report.violations.push_back(
          {row.name, "product " + std::to_string(lhs) + " != 0"});
  }

  for (const auto& row : model.divlt) {
    const double n = val(row.numerator);
    const double d = val(row.denominator);
    const double t = val(row.tau);
    if (d <= 0) {
      report.violations.push_back({row.name, "nonpositive denominator"});
      continue;
    }
    if (!(n / d + 1e-9 < 1.0 + t))
      report.violations.push_back(
          {row.name, "ratio " + std::to_string(n / d) +
                         " not strictly below 1 + " + std::to_string(t)});
  }

  for (const auto& row : model.support) {
    const Slot cut =
        row.base + static_cast<Slot>(std::llround(
                       std::min(val(row.end1), val(row.end2))));
    for (const auto& wv : row.vars) {
      const double v = val(wv.var);
      if (v < -kTol)
        report.violations.push_back({row.name, wv.var + " negative"});
      if (wv.slot >= cut && std::abs(v) > kTol)
        report.violations.push_back(
            {row.name, wv.var + " active at slot " +
                           std::to_string(wv.slot) +
                           " outside window ending at " +
                           std::to_string(cut)});
    }
  }

  // theta windows and storage occupancy
  struct ThetaEval {
    Slot first_active = -1;
    Slot release = 0;  // first slot with storage released
  };
  std::map<JobId, ThetaEval> theta;
  for (const auto& [job, row] : model.theta) {
    ThetaEval te;
    for (const auto& wv : row.sigma)
      if (val(wv.var) > kTol) {
        te.first_active = wv.slot;
        break;
      }
    te.release = row.base + static_cast<Slot>(std::llround(
                                std::min(val(row.end1), val(row.end2))));
    theta[job] = te;
  }

  for (const auto& row : model.storage) {
    double lhs = 0.0;
    for (const auto& term : row.terms) {
      const double x = val(term.xvar);
      if (x <= kTol) continue;
      const auto it = model.theta.find(term.job);
      if (it == model.theta.end()) continue;
      const ThetaEval& te = theta[term.job];
      const bool held = te.first_active >= 0 && row.slot >= te.first_active &&
                        row.slot < te.release;
      if (!held) continue;
      double cum = 0.0;
      for (const auto& wv : it->second.sigma)
        if (wv.slot <= row.slot) cum += val(wv.var);
      lhs += x * cum;
    }
    if (lhs > row.cap + kTol)
      report.violations.push_back(
          {row.name, "storage " + std::to_string(lhs) + " exceeds cap " +
                         std::to_string(row.cap)});
  }

  for (const auto& row : model.caps) {
    double lhs = 0.0;
    for (const auto& term : row.terms)
      lhs += val(term.xvar) * val(term.stream);
    if (lhs > row.cap + kTol)
      report.violations.push_back(
          {row.name, "load " + std::to_string(lhs) + " exceeds cap " +
                         std::to_string(row.cap)});
  }

  for (const auto& t : model.objective)
    report.objective += t.coef * val(t.a) * val(t.b);

  report.ok = report.violations.empty();
  return report;
}

}  // namespace edgesim
