#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace invcert::cli;
  CLI::App app{"Certifies local invertibility of ReLU networks and explores reference dynamical maps."};
  app.name("invcert");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.fallthrough();

  Globals globals;
  app.add_option("--out", globals.out, "Write the result here instead of stdout");
  app.add_option("--seed", globals.seed, "Seed for every random choice");

  Registry registry(app, globals);
  register_network_commands(registry);
  register_certify_commands(registry);
  register_dynamics_commands(registry);
  register_tool_commands(registry);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    registry.run_parsed();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const CheckFailed& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
