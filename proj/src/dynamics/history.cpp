#include "invcert/dynamics.hpp"

#include <cmath>

namespace invcert::dynamics {
namespace {

using cd = std::complex<double>;

struct State {
  cd xn, yn, xn1, yn1, tau;
};

std::pair<cd, cd> step(double a, double b, cd x, cd y, cd tau) {
  const cd x2y = x * x * y;
  return {x + tau * (a + x2y - (b + 1) * x), y + tau * (b * x - x2y)};
}

void require_nonzero(double v, const char* what) {
  if (v == 0.0) throw DegenerateCase(what);
}

std::vector<cd> quadratic(double a, double b, double c, const char* what) {
  require_nonzero(a, what);
  const auto r = quadratic_roots(a, b, c);
  if (r[0] == r[1]) return {r[0]};
  return {r[0], r[1]};
}

Completion finish(const State& s, double a, double b) {
  Completion c;
  c.values = {s.xn, s.yn, s.xn1, s.yn1, s.tau};
  c.real = true;
  for (auto& v : c.values) {
    if (is_real_root(v))
      v = v.real();
    else
      c.real = false;
  }
  if (c.real) {
    const auto [x1, y1] = step(a, b, c.values[0], c.values[1], c.values[4]);
    c.residual = std::max(std::abs(x1 - c.values[2]), std::abs(y1 - c.values[3]));
  }
  return c;
}

}  // namespace

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::Xn: return "xn";
    case Quantity::Yn: return "yn";
    case Quantity::Xn1: return "xn1";
    case Quantity::Yn1: return "yn1";
    case Quantity::Tau: return "tau";
  }
  return "unknown";
}

std::array<Quantity, 3> history_given(int case_id) {
  using Q = Quantity;
  switch (case_id) {
    case 1: return {Q::Xn, Q::Yn, Q::Tau};
    case 2: return {Q::Xn1, Q::Yn1, Q::Tau};
    case 3: return {Q::Xn, Q::Xn1, Q::Tau};
    case 4: return {Q::Yn, Q::Yn1, Q::Tau};
    case 5: return {Q::Xn, Q::Yn1, Q::Tau};
    case 6: return {Q::Yn, Q::Xn1, Q::Tau};
    case 7: return {Q::Xn, Q::Yn, Q::Xn1};
    case 8: return {Q::Xn, Q::Yn, Q::Yn1};
    case 9: return {Q::Yn, Q::Xn1, Q::Yn1};
    case 10: return {Q::Xn, Q::Xn1, Q::Yn1};
    default: throw std::invalid_argument("history case must be in 1..10, got " + std::to_string(case_id));
  }
}

std::vector<Completion> history_complete(const HistoryQuery& query) {
  const double a = query.a, b = query.b;
  const auto given = history_given(query.case_id);
  std::array<double, 5> v{};
  for (int k = 0; k < 3; ++k) {
    v[static_cast<std::size_t>(given[static_cast<std::size_t>(k)])] = query.given(k);
  }
  const double x = v[0], y = v[1], xp = v[2], yp = v[3], tau = v[4];

  std::vector<State> states;
  switch (query.case_id) {
    case 1: {
      const auto [x1, y1] = step(a, b, x, y, tau);
      states.push_back({x, y, x1, y1, tau});
      break;
    }
    case 2: {
      if (tau == 0.0 || tau == 1.0) throw DegenerateCase("case 2 needs tau outside {0, 1}");
      for (const cd xn : polynomial_roots({tau * (1 - tau), tau * (tau * a - xp - yp), tau * b + tau - 1, xp - tau * a}))
        states.push_back({xn, xp + yp - xn - tau * (a - xn), xp, yp, tau});
      break;
    }
    case 3: {
      require_nonzero(tau * x * x, "case 3 needs tau xn^2 != 0");
      const double yn = (xp - x - tau * (a - (b + 1) * x)) / (tau * x * x);
      const auto [x1, y1] = step(a, b, x, yn, tau);
      states.push_back({x, yn, xp, y1, tau});
      break;
    }
    case 4: {
      for (const cd xn : quadratic(tau * y, -tau * b, yp - y, "case 4 needs tau yn != 0")) {
        const auto [x1, y1] = step(a, b, xn, y, tau);
        states.push_back({xn, y, x1, yp, tau});
      }
      break;
    }
    case 5: {
      require_nonzero(1 - tau * x * x, "case 5 needs tau xn^2 != 1");
      const double yn = (yp - tau * b * x) / (1 - tau * x * x);
      const auto [x1, y1] = step(a, b, x, yn, tau);
      states.push_back({x, yn, x1, yp, tau});
      break;
    }
    case 6: {
      for (const cd xn : quadratic(tau * y, 1 - tau * (b + 1), tau * a - xp, "case 6 needs tau yn != 0")) {
        const auto [x1, y1] = step(a, b, xn, y, tau);
        states.push_back({xn, y, xp, y1, tau});
      }
      break;
    }
    case 7: {
      const double den = a + x * x * y - (b + 1) * x;
      require_nonzero(den, "case 7 needs a nonzero x-velocity");
      const double t = (xp - x) / den;
      const auto [x1, y1] = step(a, b, x, y, t);
      states.push_back({x, y, xp, y1, t});
      break;
    }
    case 8: {
      const double den = b * x - x * x * y;
      require_nonzero(den, "case 8 needs a nonzero y-velocity");
      const double t = (yp - y) / den;
      const auto [x1, y1] = step(a, b, x, y, t);
      states.push_back({x, y, x1, yp, t});
      break;
    }
    case 9: {
      require_nonzero(y, "case 9 needs yn != 0");
      const double dy = yp - y;
      for (const cd xn : polynomial_roots({y, -xp * y - b - dy * y, b * xp + dy * (b + 1), -dy * a})) {
        const cd den = b * xn - xn * xn * y;
        if (std::abs(den) == 0.0) continue;
        states.push_back({xn, y, xp, yp, dy / den});
      }
      break;
    }
    case 10: {
      // adding the step equations gives yn = S - tau D
      require_nonzero(x * (a - x), "case 10 needs xn outside {0, a}");
      const double s = xp + yp - x, d = a - x;
      for (const cd t : quadratic(d * x * x, -s * x * x - d + b * x, s - yp, "case 10 degenerate"))
        states.push_back({x, s - t * d, xp, yp, t});
      break;
    }
    default: break;
  }

  std::vector<Completion> out;
  for (const auto& s : states) out.push_back(finish(s, a, b));
  return out;
}

}  // namespace invcert::dynamics
