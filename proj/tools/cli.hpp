// Shared plumbing for the invcert command-line tool.
#pragma once

#include "CLI11.hpp"
#include "invcert/certify.hpp"
#include "invcert/dynamics.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace invcert::cli {

/// Bad flag values found after parsing; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Domain failure that has already been reported; exit code 1.
class CheckFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string out;
  std::uint64_t seed = 1;
};

class Registry {
 public:
  Registry(CLI::App& app, Globals& globals) : app_(app), globals_(globals) {}
  CLI::App& app() { return app_; }
  const Globals& globals() const { return globals_; }
  void add(CLI::App* sub, std::function<void()> action) { actions_.emplace_back(sub, std::move(action)); }
  void run_parsed() const;

 private:
  CLI::App& app_;
  Globals& globals_;
  std::vector<std::pair<CLI::App*, std::function<void()>>> actions_;
};

/// Comma-separated numbers, e.g. "0,-0.5".
std::vector<double> parse_list(const std::string& text, const std::string& flag);
Eigen::VectorXd parse_vector(const std::string& text, const std::string& flag);
std::vector<int> parse_int_list(const std::string& text, const std::string& flag);
Norm parse_norm(const std::string& text);
/// xmin,xmax,ymin,ymax
dynamics::Rect parse_rect(const std::string& text);

/// Writes to --out, or stdout when it is empty. Adds a trailing newline.
void emit(const Globals& globals, const std::string& text);
void write_file(const std::string& path, const std::string& text);

/// Flags shared by the certification commands.
struct CertifyFlags {
  std::string center;
  double r_max = 1;
  double eps_r = 1e-3;
  double eps_inv = 1e-4;
  std::string norm = "linf";
  bool exact = false;
  long node_limit = 2'000'000;
  double time_limit = milp::kInf;
  void add_to(CLI::App* sub);
  CertifyOptions options() const;
};

/// Map selection shared by the dynamics commands.
struct MapFlags {
  std::string kind = "brusselator";
  double a = 1, b = 2, tau = 0.15, c = 0, mu = 1, flow_time = 0.1;
  std::string matrix = "1,0,0,1";
  std::string net;
  void add_to(CLI::App* sub, const std::vector<std::string>& kinds);
  dynamics::Map map() const;
  dynamics::PlanarMap planar() const;
};

void register_network_commands(Registry& registry);
void register_certify_commands(Registry& registry);
void register_dynamics_commands(Registry& registry);
void register_tool_commands(Registry& registry);

}  // namespace invcert::cli
