#include "cli.hpp"

#include "invcert/network_io.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace invcert::cli {

void Registry::run_parsed() const {
  for (const auto& [sub, action] : actions_)
    if (sub->parsed()) return action();
  throw UsageError("no subcommand given");
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a finite number");
    }
  }
  if (values.empty()) throw UsageError(flag + ": expected a comma-separated list of numbers");
  return values;
}

Eigen::VectorXd parse_vector(const std::string& text, const std::string& flag) {
  const auto values = parse_list(text, flag);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  for (double v : parse_list(text, flag)) {
    if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError(flag + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

Norm parse_norm(const std::string& text) {
  if (text == "linf") return Norm::Linf;
  if (text == "l1") return Norm::L1;
  throw UsageError("--norm must be linf or l1");
}

dynamics::Rect parse_rect(const std::string& text) {
  const auto v = parse_list(text, "--region");
  if (v.size() != 4 || !(v[0] < v[1]) || !(v[2] < v[3]))
    throw UsageError("--region expects xmin,xmax,ymin,ymax with xmin < xmax and ymin < ymax");
  return {v[0], v[1], v[2], v[3]};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << text;
  if (!text.empty() && text.back() != '\n') file << '\n';
  if (!file) throw std::runtime_error("failed writing " + path);
}

void emit(const Globals& globals, const std::string& text) {
  if (!globals.out.empty()) return write_file(globals.out, text);
  std::cout << text;
  if (!text.empty() && text.back() != '\n') std::cout << '\n';
}

void CertifyFlags::add_to(CLI::App* sub) {
  sub->add_option("--center", center, "Ball center, comma-separated")->required();
  sub->add_option("--rmax", r_max, "Search cap")->check(CLI::PositiveNumber);
  sub->add_option("--eps", eps_r, "Radius resolution")->check(CLI::PositiveNumber);
  sub->add_option("--eps-inv", eps_inv, "Objective threshold below which a probe counts as invertible")
      ->check(CLI::PositiveNumber);
  sub->add_option("--norm", norm, "Ball norm")->check(CLI::IsMember({"linf", "l1"}));
  sub->add_flag("--exact", exact, "Solve every probe to optimality");
  sub->add_option("--node-limit", node_limit, "Branch-and-bound nodes per probe")->check(CLI::PositiveNumber);
  sub->add_option("--time-limit", time_limit, "Seconds per probe")->check(CLI::PositiveNumber);
}

CertifyOptions CertifyFlags::options() const {
  CertifyOptions o;
  o.eps_inv = eps_inv;
  o.norm = parse_norm(norm);
  o.exact = exact;
  o.milp.node_limit = node_limit;
  o.milp.time_limit_seconds = time_limit;
  return o;
}

void MapFlags::add_to(CLI::App* sub, const std::vector<std::string>& kinds) {
  sub->add_option("--map", kind, "Map")->check(CLI::IsMember(kinds));
  sub->add_option("--a", a, "Brusselator a");
  sub->add_option("--b", b, "Brusselator b, or the linear coefficient of the scalar map");
  sub->add_option("--tau", tau, "Euler timestep");
  sub->add_option("--c", c, "Constant of the scalar map");
  sub->add_option("--mu", mu, "Van der Pol mu");
  sub->add_option("--flow-time", flow_time, "Van der Pol flow duration");
  sub->add_option("--matrix", matrix, "Linear map entries a11,a12,a21,a22");
  sub->add_option("--net", net, "Network JSON for --map net")->check(CLI::ExistingFile);
}

dynamics::PlanarMap MapFlags::planar() const {
  if (kind == "brusselator") return dynamics::brusselator_map({a, b, tau});
  if (kind == "linear") {
    const auto v = parse_list(matrix, "--matrix");
    if (v.size() != 4) throw UsageError("--matrix expects four entries");
    Eigen::Matrix2d m;
    m << v[0], v[1], v[2], v[3];
    return dynamics::linear_map(m);
  }
  if (kind == "net") {
    if (net.empty()) throw UsageError("--map net needs --net");
    return dynamics::network_map(load_mlp_file(net));
  }
  throw UsageError("--map " + kind + " is not a planar map with a Jacobian");
}

dynamics::Map MapFlags::map() const {
  if (kind == "scalar") {
    const dynamics::ScalarQuadraticEuler m{b, c, tau};
    return [m](const Eigen::VectorXd& x) {
      if (x.size() != 1) throw DimensionError("scalar map takes one coordinate");
      return Eigen::VectorXd::Constant(1, dynamics::scalar_step(m, x(0)));
    };
  }
  if (kind == "vdp") {
    const double m = mu, t = flow_time;
    return [m, t](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      if (x.size() != 2) throw DimensionError("Van der Pol flow takes two coordinates");
      return dynamics::vdp_flow(Eigen::Vector2d(x(0), x(1)), m, t);
    };
  }
  if (kind == "net") {
    if (net.empty()) throw UsageError("--map net needs --net");
    const auto mlp = load_mlp_file(net);
    return [mlp](const Eigen::VectorXd& x) -> Eigen::VectorXd { return forward(mlp, x); };
  }
  const auto p = planar();
  return [p](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (x.size() != 2) throw DimensionError("planar map takes two coordinates");
    return p.eval(Eigen::Vector2d(x(0), x(1)));
  };
}

}  // namespace invcert::cli
