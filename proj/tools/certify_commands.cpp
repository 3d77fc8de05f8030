#include "cli.hpp"

#include "invcert/network_io.hpp"
#include "json.hpp"

#include <iostream>
#include <memory>

namespace invcert::cli {
namespace {

using json = nlohmann::json;

Eigen::VectorXd center_for(const CertifyFlags& flags, const ReluMlp& net) {
  auto c = parse_vector(flags.center, "--center");
  if (c.size() != net.input_dim())
    throw DimensionError("--center has " + std::to_string(c.size()) + " entries, network has " +
                         std::to_string(net.input_dim()) + " inputs");
  return c;
}

std::string as_array(const std::vector<Certificate>& certs) {
  json out = json::array();
  for (const auto& c : certs) out.push_back(json::parse(certificate_to_json(c)));
  return out.dump(2);
}

/// Runs `body`; an undecided probe is reported with its partial log.
template <typename Body>
void with_partial_report(Body body) {
  try {
    body();
  } catch (const InconclusiveProbe& e) {
    std::cerr << certificate_to_json(e.partial()) << '\n';
    throw;
  } catch (const MonotonicityViolation& e) {
    std::cerr << certificate_to_json(e.partial()) << '\n';
    throw;
  }
}

void add_certify(Registry& reg) {
  struct Flags {
    std::string net;
    CertifyFlags cert;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("certify", "Largest ball on which the network is injective");
  sub->add_option("--net", f->net, "Network JSON")->required()->check(CLI::ExistingFile);
  f->cert.add_to(sub);
  reg.add(sub, [f, &reg] {
    const auto net = load_mlp_file(f->net);
    const auto center = center_for(f->cert, net);
    with_partial_report([&] {
      const auto cert = largest_invertible_radius(net, center, f->cert.r_max, f->cert.eps_r, f->cert.options());
      emit(reg.globals(), certificate_to_json(cert));
    });
  });
}

void add_pseudo_certify(Registry& reg) {
  struct Flags {
    std::string net;
    CertifyFlags cert;
    bool pair = false;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("pseudo-certify", "Largest ball with no other preimage of the center's image");
  sub->add_option("--net", f->net, "Network JSON")->required()->check(CLI::ExistingFile);
  sub->add_flag("--pair", f->pair, "Also certify invertibility and check R >= r; outputs both certificates");
  f->cert.add_to(sub);
  reg.add(sub, [f, &reg] {
    const auto net = load_mlp_file(f->net);
    const auto center = center_for(f->cert, net);
    const auto options = f->cert.options();
    with_partial_report([&] {
      if (!f->pair) {
        return emit(reg.globals(),
                    certificate_to_json(largest_pseudo_radius(net, center, f->cert.r_max, f->cert.eps_r, options)));
      }
      const auto inv = largest_invertible_radius(net, center, f->cert.r_max, f->cert.eps_r, options);
      const auto pseudo = largest_pseudo_radius(net, center, f->cert.r_max, f->cert.eps_r, options, &inv);
      emit(reg.globals(), as_array({inv, pseudo}));
    });
  });
}

void add_map_cert(Registry& reg) {
  struct Flags {
    std::string net_a, net_b;
    CertifyFlags cert;
    bool no_shortcut = false;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("map-cert", "Radii r_AB and r_BA on which one network is a function of the other");
  sub->add_option("--net-a", f->net_a, "Network A")->required()->check(CLI::ExistingFile);
  sub->add_option("--net-b", f->net_b, "Network B")->required()->check(CLI::ExistingFile);
  sub->add_flag("--no-shortcut", f->no_shortcut, "Skip the invertibility certificates that settle small radii");
  f->cert.add_to(sub);
  reg.add(sub, [f, &reg] {
    const auto a = load_mlp_file(f->net_a);
    const auto b = load_mlp_file(f->net_b);
    const auto center = center_for(f->cert, a);
    const auto options = f->cert.options();
    const double r_max = f->cert.r_max, eps_r = f->cert.eps_r;
    with_partial_report([&] {
      std::optional<Certificate> inv_a, inv_b;
      if (!f->no_shortcut) {
        inv_a = largest_invertible_radius(a, center, r_max, eps_r, options);
        inv_b = largest_invertible_radius(b, center, r_max, eps_r, options);
      }
      const auto [ab, ba] = mappability_radii(a, b, center, r_max, eps_r, options, inv_a ? &*inv_a : nullptr,
                                              inv_b ? &*inv_b : nullptr);
      emit(reg.globals(), as_array({ab, ba}));
    });
  });
}

}  // namespace

void register_certify_commands(Registry& registry) {
  add_certify(registry);
  add_pseudo_certify(registry);
  add_map_cert(registry);
}

}  // namespace invcert::cli
