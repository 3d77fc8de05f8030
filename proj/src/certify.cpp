#include "invcert/certify.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>

namespace invcert {
namespace {

using json = nlohmann::json;

double norm_of(const Eigen::VectorXd& v, Norm norm) {
  return norm == Norm::Linf ? v.lpNorm<Eigen::Infinity>() : v.lpNorm<1>();
}

double box_slack(const InputBox& box) { return 1e-7 * (1.0 + box.radius + box.center.cwiseAbs().maxCoeff()); }

/// Turns a solver result into a decision. A collision counts only after its
/// witness survives replay through forward evaluation.
template <typename Replay>
GapResult decide(const EncodedProblem& problem, const milp::MilpSolution& solution, const CertifyOptions& options,
                 Replay replay) {
  GapResult result;
  result.status = solution.status;
  result.best_bound = solution.best_bound;
  result.stats = solution.stats;
  result.p_star = solution.has_incumbent ? std::max(0.0, solution.objective) : 0.0;

  std::optional<Witness> witness;
  if (solution.has_incumbent && solution.objective > options.eps_inv) {
    auto [x, y] = problem.decode(solution.values);
    witness = replay(x, y);
  }

  if (solution.status == milp::Status::Cutoff) {
    result.invertible = false;
    result.decided = witness.has_value();
    result.witness = std::move(witness);
    return result;
  }
  if (solution.status == milp::Status::Optimal) {
    if (solution.objective <= options.eps_inv) return result;
    result.invertible = false;
    result.decided = witness.has_value();
    result.witness = std::move(witness);
    return result;
  }
  if (solution.status == milp::Status::Infeasible) {
    // x = y is always feasible; an infeasible verdict is a solver failure
    result.decided = false;
    return result;
  }
  if (witness) {
    result.invertible = false;
    result.witness = std::move(witness);
    return result;
  }
  if (solution.best_bound <= options.eps_inv) return result;
  result.decided = false;
  return result;
}

/// Decision mode stops at the first collision above eps_inv; if that one
/// fails replay the probe is re-solved exactly.
template <typename Replay>
GapResult solve_and_decide(const EncodedProblem& problem, const CertifyOptions& options, Replay replay) {
  milp::MilpOptions milp = options.milp;
  if (!options.exact) milp.stop_above = std::min(milp.stop_above, options.eps_inv);
  GapResult gap = decide(problem, milp::milp_solve(problem.model, milp), options, replay);
  if (gap.decided || gap.status != milp::Status::Cutoff) return gap;
  milp.stop_above = options.milp.stop_above;
  return decide(problem, milp::milp_solve(problem.model, milp), options, replay);
}

using ProbeFn = std::function<GapResult(double r)>;

std::string describe(const GapResult& gap, double r) {
  return "probe at r = " + std::to_string(r) + " ended without a decision (status " +
         std::string(milp::to_string(gap.status)) + ", incumbent " + std::to_string(gap.p_star) + ", bound " +
         std::to_string(gap.best_bound) + ")";
}

Certificate bisect(CertificateKind kind, const Eigen::VectorXd& center, double r_max, double eps_r,
                   const CertifyOptions& options, const ProbeFn& probe) {
  if (!(r_max > 0)) throw std::invalid_argument("r_max must be positive");
  if (!(eps_r > 0)) throw std::invalid_argument("eps_r must be positive");
  Certificate cert;
  cert.kind = kind;
  cert.center = center;
  cert.eps_r = eps_r;
  cert.eps_inv = options.eps_inv;

  double smallest_noninvertible = std::numeric_limits<double>::infinity();
  auto run = [&](double r) {
    const GapResult gap = probe(r);
    cert.probes.push_back({r, gap.p_star, gap.status, gap.best_bound, gap.invertible, gap.by_composition});
    if (!gap.decided) throw InconclusiveProbe(describe(gap, r), cert);
    if (!probe_log_monotone(cert.probes, options.monotone_tol))
      throw MonotonicityViolation("p* decreased with growing r at probe r = " + std::to_string(r), cert);
    if (!gap.invertible && r < smallest_noninvertible) {
      smallest_noninvertible = r;
      cert.witness = gap.witness;
    }
    return gap.invertible;
  };

  if (run(r_max)) {
    cert.radius = r_max;
    cert.at_cap = true;
    return cert;
  }
  double lo = 0, hi = r_max;
  while (hi - lo > eps_r) {
    const double mid = 0.5 * (lo + hi);
    if (run(mid))
      lo = mid;
    else
      hi = mid;
  }
  cert.radius = lo;
  return cert;
}

InputBox make_box(const Eigen::VectorXd& center, double r, Norm norm) { return InputBox(center, r, norm); }

}  // namespace

std::string_view to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::Invertibility: return "invertibility";
    case CertificateKind::PseudoInvertibility: return "pseudo-invertibility";
    case CertificateKind::MappabilityAB: return "mappability-ab";
    case CertificateKind::MappabilityBA: return "mappability-ba";
  }
  return "unknown";
}

GapResult noninvertibility_gap(const ReluMlp& net, const InputBox& box, const CertifyOptions& options) {
  const auto problem = encode_problem1(net, box);
  return solve_and_decide(problem, options,
                [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) -> std::optional<Witness> {
                  const double slack = box_slack(box);
                  if (!box.contains(x, slack) || !box.contains(y, slack)) return std::nullopt;
                  if ((forward(net, x) - forward(net, y)).lpNorm<Eigen::Infinity>() > options.replay_tol)
                    return std::nullopt;
                  return Witness{x, y, norm_of(x - y, box.norm)};
                });
}

GapResult pseudo_gap(const ReluMlp& net, const InputBox& box, const CertifyOptions& options) {
  const auto problem = encode_problem2(net, box);
  return solve_and_decide(problem, options,
                [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) -> std::optional<Witness> {
                  if (!box.contains(x, box_slack(box))) return std::nullopt;
                  if ((forward(net, x) - forward(net, y)).lpNorm<Eigen::Infinity>() > options.replay_tol)
                    return std::nullopt;
                  return Witness{x, y, norm_of(x - y, box.norm)};
                });
}

GapResult mappability_gap(const ReluMlp& net_a, const ReluMlp& net_b, const InputBox& box,
                          const CertifyOptions& options) {
  const auto problem = encode_problem3(net_a, net_b, box);
  return solve_and_decide(problem, options,
                [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) -> std::optional<Witness> {
                  const double slack = box_slack(box);
                  if (!box.contains(x, slack) || !box.contains(y, slack)) return std::nullopt;
                  if ((forward(net_a, x) - forward(net_a, y)).lpNorm<Eigen::Infinity>() > options.replay_tol)
                    return std::nullopt;
                  return Witness{x, y, (forward(net_b, x) - forward(net_b, y)).lpNorm<Eigen::Infinity>()};
                });
}

Certificate largest_invertible_radius(const ReluMlp& net, const Eigen::VectorXd& center, double r_max,
                                      double eps_r, const CertifyOptions& options) {
  return bisect(CertificateKind::Invertibility, center, r_max, eps_r, options, [&](double r) {
    return noninvertibility_gap(net, make_box(center, r, options.norm), options);
  });
}

Certificate largest_pseudo_radius(const ReluMlp& net, const Eigen::VectorXd& center, double r_max, double eps_r,
                                  const CertifyOptions& options, const Certificate* paired) {
  auto cert = bisect(CertificateKind::PseudoInvertibility, center, r_max, eps_r, options,
                     [&](double r) { return pseudo_gap(net, make_box(center, r, options.norm), options); });
  if (paired && cert.radius < paired->radius - std::max(eps_r, paired->eps_r))
    throw std::logic_error("pseudo-invertibility radius " + std::to_string(cert.radius) +
                           " is below the invertibility radius " + std::to_string(paired->radius));
  return cert;
}

Certificate mappability_radius(const ReluMlp& first, const ReluMlp& second, const Eigen::VectorXd& center,
                               double r_max, double eps_r, const CertifyOptions& options,
                               const Certificate* first_invertible, CertificateKind kind) {
  if (first.input_dim() != second.input_dim() || first.output_dim() != second.output_dim())
    throw DimensionError("mappability needs networks with matching input and output dimensions");
  if (kind != CertificateKind::MappabilityAB && kind != CertificateKind::MappabilityBA)
    throw std::invalid_argument("mappability_radius needs a mappability kind");
  double shortcut = 0;
  if (first_invertible) {
    if (first_invertible->kind != CertificateKind::Invertibility)
      throw std::invalid_argument("expected an invertibility certificate");
    if (first_invertible->center.size() != center.size() || first_invertible->center != center)
      throw std::invalid_argument("invertibility certificate has a different center");
    shortcut = injective_radius(*first_invertible);
  }
  return bisect(kind, center, r_max, eps_r, options, [&](double r) {
    if (r <= shortcut) {
      GapResult gap;
      gap.best_bound = 0;
      gap.by_composition = true;
      return gap;
    }
    const InputBox box = make_box(center, r, options.norm);
    if (!options.exact) {
      // a collision of `first` that `second` separates already decides the probe
      CertifyOptions quick = options;
      quick.exact = false;
      const GapResult collision = noninvertibility_gap(first, box, quick);
      if (collision.witness) {
        const Witness& w = *collision.witness;
        const double spread = (forward(second, w.x) - forward(second, w.y)).lpNorm<Eigen::Infinity>();
        if (spread > options.eps_inv) {
          GapResult gap;
          gap.status = milp::Status::Cutoff;
          gap.p_star = spread;
          gap.best_bound = milp::kInf;
          gap.invertible = false;
          gap.witness = Witness{w.x, w.y, spread};
          return gap;
        }
      }
    }
    return mappability_gap(first, second, box, options);
  });
}

std::pair<Certificate, Certificate> mappability_radii(const ReluMlp& net_a, const ReluMlp& net_b,
                                                      const Eigen::VectorXd& center, double r_max, double eps_r,
                                                      const CertifyOptions& options, const Certificate* a_invertible,
                                                      const Certificate* b_invertible) {
  return {mappability_radius(net_a, net_b, center, r_max, eps_r, options, a_invertible, CertificateKind::MappabilityAB),
          mappability_radius(net_b, net_a, center, r_max, eps_r, options, b_invertible, CertificateKind::MappabilityBA)};
}

double injective_radius(const Certificate& cert, double gap) {
  double radius = 0;
  for (const auto& p : cert.probes)
    if (p.invertible && p.status == milp::Status::Optimal && p.best_bound <= gap) radius = std::max(radius, p.r);
  return radius;
}

bool probe_log_monotone(const std::vector<Probe>& probes, double tol) {
  std::vector<const Probe*> sorted;
  for (const auto& p : probes) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](const Probe* a, const Probe* b) { return a->r < b->r; });
  double running = -std::numeric_limits<double>::infinity();
  for (const auto* p : sorted) {
    const double upper = p->status == milp::Status::Optimal ? p->p_star : std::max(p->p_star, p->best_bound);
    if (upper < running - tol) return false;
    running = std::max(running, p->p_star);
  }
  return true;
}

namespace {

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

milp::Status status_from(const std::string& s) {
  for (auto st : {milp::Status::Optimal, milp::Status::Infeasible, milp::Status::Unbounded, milp::Status::NodeLimit,
                  milp::Status::TimeLimit, milp::Status::NumericalFailure, milp::Status::Cutoff})
    if (milp::to_string(st) == s) return st;
  throw std::invalid_argument("unknown solver status '" + s + "'");
}

CertificateKind kind_from(const std::string& s) {
  for (auto k : {CertificateKind::Invertibility, CertificateKind::PseudoInvertibility, CertificateKind::MappabilityAB,
                 CertificateKind::MappabilityBA})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown certificate kind '" + s + "'");
}

}  // namespace

std::string certificate_to_json(const Certificate& c, int indent) {
  json doc;
  doc["kind"] = std::string(to_string(c.kind));
  doc["center"] = vector_json(c.center);
  doc["radius"] = c.radius;
  doc["at_cap"] = c.at_cap;
  doc["eps_r"] = c.eps_r;
  doc["eps_inv"] = c.eps_inv;
  if (c.witness)
    doc["witness"] = {{"x", vector_json(c.witness->x)}, {"y", vector_json(c.witness->y)}, {"gap", c.witness->gap}};
  else
    doc["witness"] = nullptr;
  doc["probes"] = json::array();
  for (const auto& p : c.probes) {
    json probe = {{"r", p.r}, {"p_star", p.p_star}, {"status", std::string(milp::to_string(p.status))}};
    probe["best_bound"] = std::isfinite(p.best_bound) ? json(p.best_bound) : json(nullptr);
    probe["invertible"] = p.invertible;
    if (p.by_composition) probe["via"] = "composition";
    doc["probes"].push_back(std::move(probe));
  }
  return doc.dump(indent);
}

Certificate certificate_from_json(std::string_view text) {
  const json doc = json::parse(text);
  Certificate c;
  c.kind = kind_from(doc.at("kind").get<std::string>());
  c.center = vector_from(doc.at("center"));
  c.radius = doc.at("radius").get<double>();
  c.at_cap = doc.at("at_cap").get<bool>();
  c.eps_r = doc.at("eps_r").get<double>();
  c.eps_inv = doc.at("eps_inv").get<double>();
  if (!doc.at("witness").is_null()) {
    const auto& w = doc.at("witness");
    c.witness = Witness{vector_from(w.at("x")), vector_from(w.at("y")), w.at("gap").get<double>()};
  }
  for (const auto& p : doc.at("probes")) {
    Probe probe;
    probe.r = p.at("r").get<double>();
    probe.p_star = p.at("p_star").get<double>();
    probe.status = status_from(p.at("status").get<std::string>());
    probe.best_bound = probe.p_star;
    if (p.contains("best_bound"))
      probe.best_bound = p.at("best_bound").is_null() ? milp::kInf : p.at("best_bound").get<double>();
    probe.invertible = p.contains("invertible") ? p.at("invertible").get<bool>() : probe.p_star <= c.eps_inv;
    probe.by_composition = p.value("via", std::string()) == "composition";
    c.probes.push_back(probe);
  }
  return c;
}

}  // namespace invcert
