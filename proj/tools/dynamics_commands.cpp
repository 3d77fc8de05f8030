#include "cli.hpp"

#include "json.hpp"

#include <memory>
#include <sstream>

namespace invcert::cli {
namespace {

using json = nlohmann::json;
namespace dyn = invcert::dynamics;

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

const std::vector<std::string> kAllMaps{"brusselator", "scalar", "linear", "net", "vdp"};
const std::vector<std::string> kPlanarMaps{"brusselator", "linear", "net"};

void add_dyn_step(Registry& reg) {
  struct Flags {
    MapFlags map;
    std::string point;
    int steps = 1;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("dyn-step", "Iterate a map from a point");
  f->map.add_to(sub, kAllMaps);
  sub->add_option("--point", f->point, "Start point, comma-separated")->required();
  sub->add_option("--steps", f->steps, "Number of steps")->check(CLI::PositiveNumber);
  reg.add(sub, [f, &reg] {
    const auto step = f->map.map();
    Eigen::VectorXd x = parse_vector(f->point, "--point");
    json trajectory = json::array({vec(x)});
    for (int k = 0; k < f->steps; ++k) {
      x = step(x);
      trajectory.push_back(vec(x));
    }
    emit(reg.globals(), json{{"map", f->map.kind}, {"trajectory", trajectory}}.dump(2));
  });
}

void add_dyn_preimage(Registry& reg) {
  struct Flags {
    MapFlags map;
    std::string target;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("dyn-preimage", "All real preimages of a point under an Euler map");
  f->map.add_to(sub, {"brusselator", "scalar"});
  sub->add_option("--target", f->target, "Image point, comma-separated")->required();
  reg.add(sub, [f, &reg] {
    const auto t = parse_vector(f->target, "--target");
    json out{{"map", f->map.kind}, {"target", vec(t)}};
    json pre = json::array();
    if (f->map.kind == "scalar") {
      if (t.size() != 1) throw DimensionError("scalar map target has one coordinate");
      const dyn::ScalarQuadraticEuler m{f->map.b, f->map.c, f->map.tau};
      for (double x : dyn::scalar_preimages(m, t(0))) pre.push_back(json::array({x}));
      out["discriminant"] = dyn::scalar_discriminant(m, t(0));
    } else {
      if (t.size() != 2) throw DimensionError("Brusselator target has two coordinates");
      const dyn::BrusselatorEuler m{f->map.a, f->map.b, f->map.tau};
      for (const auto& p : dyn::brusselator_preimages(m, t)) pre.push_back(vec(p));
    }
    out["preimages"] = pre;
    emit(reg.globals(), out.dump(2));
  });
}

void add_dyn_data(Registry& reg) {
  struct Flags {
    MapFlags map;
    std::string region = "0,1,0,1";
    int count = 1000;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("dyn-data", "Uniform samples of a planar map as CSV x1,y1,x2,y2");
  f->map.add_to(sub, {"brusselator", "linear", "net", "vdp"});
  sub->add_option("--region", f->region, "xmin,xmax,ymin,ymax");
  sub->add_option("--count", f->count, "Samples")->check(CLI::PositiveNumber);
  reg.add(sub, [f, &reg] {
    emit(reg.globals(), dyn::dataset_to_csv(dyn::generate_dataset(f->map.map(), parse_rect(f->region), f->count,
                                                                  reg.globals().seed)));
  });
}

void add_j0_grid(Registry& reg) {
  struct Flags {
    MapFlags map;
    std::string region = "0,3,0,3";
    int nx = 101, ny = 101;
    std::string flagged;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("j0-grid", "Jacobian determinant on a grid as CSV x,y,det");
  f->map.add_to(sub, kPlanarMaps);
  sub->add_option("--region", f->region, "xmin,xmax,ymin,ymax");
  sub->add_option("--nx", f->nx, "Nodes along x")->check(CLI::Range(2, 100000));
  sub->add_option("--ny", f->ny, "Nodes along y")->check(CLI::Range(2, 100000));
  sub->add_option("--flagged", f->flagged, "Write the sign-change cells here as JSON");
  reg.add(sub, [f, &reg] {
    const auto rect = parse_rect(f->region);
    const auto grid = dyn::j0_grid(f->map.planar(), rect, f->nx, f->ny);
    const double dx = (rect.x_max - rect.x_min) / (grid.nx - 1);
    const double dy = (rect.y_max - rect.y_min) / (grid.ny - 1);
    std::ostringstream csv;
    csv.precision(12);
    csv << "x,y,det\n";
    for (int i = 0; i < grid.nx; ++i)
      for (int j = 0; j < grid.ny; ++j)
        csv << rect.x_min + i * dx << ',' << rect.y_min + j * dy << ',' << grid.det(i, j) << '\n';
    emit(reg.globals(), csv.str());
    if (!f->flagged.empty()) {
      json cells = json::array();
      for (const auto& [i, j] : grid.flagged)
        cells.push_back({{"i", i}, {"j", j}, {"x", rect.x_min + (i + 0.5) * dx}, {"y", rect.y_min + (j + 0.5) * dy}});
      write_file(f->flagged, json{{"nx", grid.nx}, {"ny", grid.ny}, {"flagged", cells}}.dump(2));
    }
  });
}

void add_history(Registry& reg) {
  struct Flags {
    int case_id = 1;
    double a = 1, b = 2;
    std::string given;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("history", "Complete a Brusselator Euler step from three known quantities");
  sub->add_option("--case", f->case_id, "Which three quantities are known (1..10)")->required()->check(CLI::Range(1, 10));
  sub->add_option("--a", f->a, "Brusselator a");
  sub->add_option("--b", f->b, "Brusselator b");
  sub->add_option("--given", f->given, "The three known values, in the case's order")->required();
  reg.add(sub, [f, &reg] {
    const auto g = parse_vector(f->given, "--given");
    if (g.size() != 3) throw UsageError("--given expects three values");
    const auto completions = dyn::history_complete({f->case_id, Eigen::Vector3d(g(0), g(1), g(2)), f->a, f->b});
    json given = json::array();
    for (auto q : dyn::history_given(f->case_id)) given.push_back(std::string(dyn::to_string(q)));
    json list = json::array();
    for (const auto& c : completions) {
      json entry{{"real", c.real}};
      for (int k = 0; k < 5; ++k) {
        const auto q = static_cast<dyn::Quantity>(k);
        const auto z = c.complex_value(q);
        entry[std::string(dyn::to_string(q))] = c.real ? json(z.real()) : json::array({z.real(), z.imag()});
      }
      if (c.real) entry["residual"] = c.residual;
      list.push_back(entry);
    }
    emit(reg.globals(), json{{"case", f->case_id}, {"given", given}, {"completions", list}}.dump(2));
  });
}

void add_bilip(Registry& reg) {
  struct Flags {
    MapFlags map;
    std::string region = "0,1,0,1";
    int samples = 200;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("bilip", "Sampled expansion and contraction ratios of a planar map");
  f->map.add_to(sub, {"brusselator", "linear", "net", "vdp"});
  sub->add_option("--region", f->region, "xmin,xmax,ymin,ymax");
  sub->add_option("--samples", f->samples, "Sample points")->check(CLI::Range(2, 100000));
  reg.add(sub, [f, &reg] {
    const auto est = dyn::bilipschitz_estimate(f->map.map(), parse_rect(f->region), f->samples, reg.globals().seed);
    json out{{"upper_ratio", est.upper}, {"lower_ratio", est.lower}, {"samples", f->samples}};
    out["bilipschitz"] = est.lower > 0 ? json(std::max(est.upper, 1.0 / est.lower)) : json(nullptr);
    emit(reg.globals(), out.dump(2));
  });
}

}  // namespace

void register_dynamics_commands(Registry& registry) {
  add_dyn_step(registry);
  add_dyn_preimage(registry);
  add_dyn_data(registry);
  add_j0_grid(registry);
  add_history(registry);
  add_bilip(registry);
}

}  // namespace invcert::cli
