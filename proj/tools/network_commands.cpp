#include "cli.hpp"

#include "invcert/network_io.hpp"

#include <memory>
#include <optional>

namespace invcert::cli {
namespace {

std::vector<Eigen::Index> as_dims(const std::vector<int>& v) { return {v.begin(), v.end()}; }

void add_gen_net(Registry& reg) {
  struct Flags {
    std::string dims = "2,32,32,2";
    std::optional<double> scale;
    bool residual = false;
    int blocks = 2;
    std::string hidden = "8";
    double lipschitz = 0;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("gen-net", "Seeded random network");
  sub->add_option("--dims", f->dims, "Layer widths of a perceptron, input first");
  sub->add_option("--scale", f->scale, "Uniform weight range (default 1/sqrt(fan-in))")->check(CLI::PositiveNumber);
  sub->add_flag("--residual", f->residual, "Residual network on R^m with m = first entry of --dims");
  sub->add_option("--blocks", f->blocks, "Residual blocks")->check(CLI::PositiveNumber);
  sub->add_option("--hidden", f->hidden, "Hidden widths of each residual block");
  sub->add_option("--lipschitz", f->lipschitz, "Rescale each block to this Lipschitz bound (0 keeps it)")
      ->check(CLI::NonNegativeNumber);
  reg.add(sub, [f, &reg] {
    const auto dims = parse_int_list(f->dims, "--dims");
    const auto seed = reg.globals().seed;
    if (!f->residual) {
      if (f->lipschitz > 0) throw UsageError("--lipschitz applies to residual blocks");
      return emit(reg.globals(), save_network(random_network<double>(as_dims(dims), f->scale, seed)));
    }
    const int m = dims.front();
    std::vector<Eigen::Index> block_dims{m};
    for (int w : parse_int_list(f->hidden, "--hidden")) block_dims.push_back(w);
    block_dims.push_back(m);
    std::vector<ReluMlp> blocks;
    for (int k = 0; k < f->blocks; ++k) {
      auto block = random_network<double>(block_dims, f->scale, seed + static_cast<std::uint64_t>(k));
      if (f->lipschitz > 0) block = make_contractive(block, f->lipschitz);
      blocks.push_back(std::move(block));
    }
    emit(reg.globals(), save_network(ResidualNet(std::move(blocks))));
  });
}

void add_prune(Registry& reg) {
  struct Flags {
    std::string net;
    double sparsity = 0.5;
    double perturb = 0;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("prune", "Magnitude pruning of a network's weights");
  sub->add_option("--net", f->net, "Network JSON")->required()->check(CLI::ExistingFile);
  sub->add_option("--sparsity", f->sparsity, "Fraction of weights to zero")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--perturb", f->perturb, "Relative seeded perturbation of the surviving weights")
      ->check(CLI::Range(0.0, 0.99));
  reg.add(sub, [f, &reg] {
    const auto seed = reg.globals().seed;
    auto pruned = prune_magnitude(load_mlp_file(f->net), f->sparsity, seed);
    if (f->perturb > 0) pruned = perturb_weights(pruned, f->perturb, seed + 1);
    emit(reg.globals(), save_network(pruned));
  });
}

void add_flatten(Registry& reg) {
  auto net = std::make_shared<std::string>();
  auto* sub = reg.app().add_subcommand("flatten", "Rewrite a residual network as a plain perceptron");
  sub->add_option("--net", *net, "Network JSON")->required()->check(CLI::ExistingFile);
  reg.add(sub, [net, &reg] { emit(reg.globals(), save_network(load_mlp_file(*net))); });
}

void add_embed_param(Registry& reg) {
  struct Flags {
    std::string net;
    double value = 0;
    int state_dim = 0;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("embed-param", "Fix the last input coordinate of a network");
  sub->add_option("--net", f->net, "Network JSON")->required()->check(CLI::ExistingFile);
  sub->add_option("--value", f->value, "Parameter value")->required();
  sub->add_option("--state-dim", f->state_dim, "Expected state dimension (checked when given)")
      ->check(CLI::PositiveNumber);
  reg.add(sub, [f, &reg] {
    const auto net = load_mlp_file(f->net);
    emit(reg.globals(), save_network(f->state_dim > 0 ? embed_parameter(net, Eigen::Index{f->state_dim}, f->value)
                                                      : embed_parameter(net, f->value)));
  });
}

}  // namespace

void register_network_commands(Registry& registry) {
  add_gen_net(registry);
  add_prune(registry);
  add_flatten(registry);
  add_embed_param(registry);
}

}  // namespace invcert::cli
