#include <CLI11.hpp>

#include "quatheta/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"quaternionic theta elements and anticyclotomic p-adic L-values"};
  app.set_version_flag("--version", qth::version());
  app.require_subcommand(0);

  CLI11_PARSE(app, argc, argv);
  return 0;
}
