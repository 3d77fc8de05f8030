// Decisions and radius searches on top of the encoders: largest ball on
// which a network is injective, largest ball in which the center's image has
// no other preimage, and largest ball on which one network's output is a
// function of another's.
#pragma once

#include "invcert/bounds.hpp"
#include "invcert/encoder.hpp"
#include "invcert/milp.hpp"
#include "invcert/network.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace invcert {

enum class CertificateKind { Invertibility, PseudoInvertibility, MappabilityAB, MappabilityBA };

std::string_view to_string(CertificateKind kind);

struct Witness {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  /// Objective value replayed through forward evaluation.
  double gap = 0;
};

struct Probe {
  double r = 0;
  /// Best verified objective; a lower bound on p* unless status is Optimal.
  double p_star = 0;
  milp::Status status = milp::Status::Optimal;
  /// Upper bound on p*.
  double best_bound = 0;
  bool invertible = true;
  /// Decided without a solve: the first network is injective at this radius.
  bool by_composition = false;
};

struct Certificate {
  CertificateKind kind = CertificateKind::Invertibility;
  Eigen::VectorXd center;
  double radius = 0;
  bool at_cap = false;
  double eps_r = 0;
  double eps_inv = 0;
  /// Collision at the smallest noninvertible probe.
  std::optional<Witness> witness;
  /// In the order the probes were run.
  std::vector<Probe> probes;
};

struct CertifyOptions {
  double eps_inv = 1e-4;
  Norm norm = Norm::Linf;
  milp::MilpOptions milp;
  /// Replay tolerance on ||f(x) - f(y)||_inf for reported witnesses.
  double replay_tol = 1e-5;
  /// Allowed decrease of p* between probes before the log counts as non-monotone.
  double monotone_tol = 1e-5;
  /// Solve every probe to optimality. Otherwise a probe stops at the first
  /// verified collision above eps_inv, which decides it.
  bool exact = false;
};

struct GapResult {
  double p_star = 0;
  milp::Status status = milp::Status::Optimal;
  double best_bound = 0;
  bool decided = true;
  bool invertible = true;
  bool by_composition = false;
  std::optional<Witness> witness;
  milp::MilpStats stats;
};

/// Thrown when a probe ends without a decision (solver limits or numerical
/// failure with neither a verified collision nor a bound below eps_inv).
class InconclusiveProbe : public std::runtime_error {
 public:
  InconclusiveProbe(const std::string& what, Certificate partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Certificate& partial() const { return partial_; }

 private:
  Certificate partial_;
};

/// Thrown when p*(r) decreases along the probe log beyond monotone_tol.
class MonotonicityViolation : public std::runtime_error {
 public:
  MonotonicityViolation(const std::string& what, Certificate partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Certificate& partial() const { return partial_; }

 private:
  Certificate partial_;
};

GapResult noninvertibility_gap(const ReluMlp& net, const InputBox& box, const CertifyOptions& options = {});
GapResult pseudo_gap(const ReluMlp& net, const InputBox& box, const CertifyOptions& options = {});
/// max ||f_b(x1) - f_b(x2)||_inf over f_a(x1) = f_a(x2).
GapResult mappability_gap(const ReluMlp& net_a, const ReluMlp& net_b, const InputBox& box,
                          const CertifyOptions& options = {});

/// Bisection on [0, r_max]; r_max is probed first.
Certificate largest_invertible_radius(const ReluMlp& net, const Eigen::VectorXd& center, double r_max,
                                      double eps_r, const CertifyOptions& options = {});

/// With `paired`, throws std::logic_error if the result falls below the paired
/// invertibility radius by more than eps_r.
Certificate largest_pseudo_radius(const ReluMlp& net, const Eigen::VectorXd& center, double r_max, double eps_r,
                                  const CertifyOptions& options = {}, const Certificate* paired = nullptr);

/// Largest ball on which the output of `second` is a function of the output
/// of `first`. An invertibility certificate of `first` at the same center and
/// norm lets the search skip radii where `first` is injective.
Certificate mappability_radius(const ReluMlp& first, const ReluMlp& second, const Eigen::VectorXd& center,
                               double r_max, double eps_r, const CertifyOptions& options = {},
                               const Certificate* first_invertible = nullptr,
                               CertificateKind kind = CertificateKind::MappabilityAB);

/// First: output of B as a function of output of A. Second: the reverse.
/// Invertibility certificates of A or B at the same center and norm let the
/// search skip radii where that network is injective, since then the other
/// output is a function of its output.
std::pair<Certificate, Certificate> mappability_radii(const ReluMlp& net_a, const ReluMlp& net_b,
                                                      const Eigen::VectorXd& center, double r_max, double eps_r,
                                                      const CertifyOptions& options = {},
                                                      const Certificate* a_invertible = nullptr,
                                                      const Certificate* b_invertible = nullptr);

/// Radius up to which `cert` shows injectivity with a zero optimum: the
/// largest invertible probe whose bound is within the solver gap.
double injective_radius(const Certificate& cert, double gap = 1e-6);

/// True when the log is consistent with p* nondecreasing in r: no probe's
/// upper bound falls below a smaller-radius probe's p* by more than `tol`.
bool probe_log_monotone(const std::vector<Probe>& probes, double tol);

std::string certificate_to_json(const Certificate& certificate, int indent = 2);
Certificate certificate_from_json(std::string_view text);

}  // namespace invcert
