#include <iostream>
#include <utility>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace fraclab::cli;
  CLI::App app{"fraclab: fractional Laplacian eigenproblems and Pohozaev checks"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--s", ov.s, "fractional order override");
    sub->add_option("--n", ov.n, "elements per interval override");
    sub->add_option("--tol", ov.tol, "pass tolerance override");
    sub->add_option("--jobs", ov.jobs, "worker threads (0: all cores)");
    sub->add_option("--json", ov.json, "JSON output path");
    sub->add_option("--csv", ov.csv, "CSV output path");
  };
  const std::pair<const char*, const char*> commands[] = {
      {"eigen", "eigenpairs of the Dirichlet fractional Laplacian"},
      {"verify", "check a Pohozaev-type identity or the Hadamard formula"},
      {"certify", "field certificates and nonexistence threshold on a 2D domain"},
      {"semilinear", "ground state of the power nonlinearity and its Pohozaev residual"},
      {"fraclap", "pointwise fractional Laplacian of a given function"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    RunConfig cfg = load_config(config_path, command);
    finalize(cfg, ov);
    return dispatch(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "fraclab: " << e.what() << "\n";
    return exit_code_for(e);
  }
}
