#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "noncollapse/version.hpp"

namespace noncollapse::cli {

int run_cli(int argc, char** argv) {
  CLI::App app{"Curvature-flow non-collapsing lab"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  CertifyOptions certify;
  auto* c = app.add_subcommand("certify", "Sample-based concavity / inverse-concavity certificate");
  c->add_option("--speed", certify.speed, "mean | power:<p> | sigma-ratio:<k> | sigma-root:<k> | harmonic")->required();
  c->add_option("--n", certify.n, "Number of variables");
  c->add_option("--property", certify.property, "concave | inverse-concave | monotone | homogeneous");
  c->add_option("--trials", certify.trials, "Sample count");
  c->add_option("--seed", certify.seed);
  c->add_option("--out", certify.out, "Write the JSON report here instead of stdout");

  OracleOptions oracle;
  auto* o = app.add_subcommand("oracle", "Randomised positivity trials for the interior (2.2) or boundary (2.5) form");
  o->add_option("--prop", oracle.prop, "2.2 or 2.5")->required();
  o->add_option("--speed", oracle.speed)->required();
  o->add_option("--n", oracle.n);
  o->add_option("--trials", oracle.trials);
  o->add_option("--seed", oracle.seed);
  o->add_option("--out", oracle.out);

  FlowOptions flow;
  auto* f = app.add_subcommand("flow", "Run a flow and write a run directory");
  f->add_option("--config", flow.config, "Flow configuration JSON")->required();
  f->add_option("--out", flow.out, "Run directory")->required();
  f->add_option("--speed", flow.speed, "Override the configured speed");
  f->add_option("--grid", flow.grid, "Override the grid size N");
  f->add_option("--cfl", flow.cfl);
  f->add_option("--stop-max-f", flow.stop_max_f);
  f->add_option("--seed", flow.seed);
  f->add_flag("--timing", flow.timing, "Also write timing.json");

  ReportOptions report;
  auto* r = app.add_subcommand("report", "Summarise run directories");
  r->add_option("runs", report.runs, "Run directories");
  r->add_option("--out", report.out, "Write the JSON summary here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c->parsed()) return cmd_certify(certify, std::cout, std::cerr);
    if (o->parsed()) return cmd_oracle(oracle, std::cout, std::cerr);
    if (f->parsed()) return cmd_flow(flow, std::cout, std::cerr);
    return cmd_report(report, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace noncollapse::cli
