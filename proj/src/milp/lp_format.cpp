#include "invcert/milp.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace invcert::milp {
namespace {

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

std::string identifier(const std::string& name, int index, char prefix) {
  if (name.empty()) return std::string(1, prefix) + std::to_string(index);
  std::string out;
  for (char ch : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || std::string_view("!\"#$%&()/,.;?@_`'{}|~").find(ch) !=
                                                                        std::string_view::npos;
    out += ok ? ch : '_';
  }
  if (std::isdigit(static_cast<unsigned char>(out.front())) || out.front() == '.') out.insert(out.begin(), prefix);
  return out;
}

void write_terms(std::ostringstream& os, const std::vector<Term>& terms, const std::vector<std::string>& names) {
  if (terms.empty()) {
    os << " 0 " << names.front();
    return;
  }
  for (const auto& t : terms) {
    os << (t.coeff < 0 ? " - " : " + ") << number(std::abs(t.coeff)) << ' ' << names[static_cast<std::size_t>(t.var)];
  }
}

}  // namespace

std::string to_lp_format(const Model& model) {
  std::vector<std::string> names;
  for (int j = 0; j < model.num_variables(); ++j) names.push_back(identifier(model.variable(j).name, j, 'v'));
  if (names.empty()) names.push_back("v0");

  std::ostringstream os;
  os << "\\ invertcert MILP dump\nMaximize\n obj:";
  write_terms(os, model.objective(), names);
  os << "\nSubject To\n";
  for (int i = 0; i < model.num_constraints(); ++i) {
    const auto& c = model.constraints()[static_cast<std::size_t>(i)];
    os << ' ' << identifier(c.name, i, 'c') << ':';
    write_terms(os, c.terms, names);
    switch (c.relation) {
      case Relation::LessEqual: os << " <= "; break;
      case Relation::GreaterEqual: os << " >= "; break;
      case Relation::Equal: os << " = "; break;
    }
    os << number(c.rhs) << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variable(j);
    if (v.kind == VarKind::Binary && v.lower == 0 && v.upper == 1) continue;
    const auto& name = names[static_cast<std::size_t>(j)];
    if (std::isinf(v.lower) && std::isinf(v.upper))
      os << ' ' << name << " free\n";
    else if (v.lower == v.upper)
      os << ' ' << name << " = " << number(v.lower) << '\n';
    else
      os << ' ' << number(v.lower) << " <= " << name << " <= " << number(v.upper) << '\n';
  }
  if (model.num_binaries() > 0) {
    os << "Binaries\n";
    for (int j = 0; j < model.num_variables(); ++j)
      if (model.variable(j).kind == VarKind::Binary) os << ' ' << names[static_cast<std::size_t>(j)] << '\n';
  }
  os << "End\n";
  return os.str();
}

}  // namespace invcert::milp
