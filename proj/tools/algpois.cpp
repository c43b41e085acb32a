#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "algpois/commands.hpp"
#include "algpois/errors.hpp"
#include "algpois/io.hpp"

using namespace algpois;

namespace {

std::vector<double> numbers(const std::string& s) { return s.empty() ? std::vector<double>{} : parse_number_list(s); }

bool is_config_error(ErrorCode c) {
  return c == ErrorCode::ConfigError || c == ErrorCode::UnknownAction || c == ErrorCode::UnknownAlgebra ||
         c == ErrorCode::ParseError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson structures from Lie algebroids: validation, flows, loop and star-group checks"};
  app.set_config("--config", "", "TOML scenario file; sections named after subcommands");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  std::string report_path;
  app.add_option("--report", report_path, "also write the JSON report here");

  ValidateOptions vo;
  auto* validate = app.add_subcommand("validate", "Jacobi, equivariance and canonical residuals of an action");
  validate->add_option("--action", vo.action)->required();
  validate->add_option("--samples", vo.samples);
  validate->add_option("--seed", vo.seed);
  validate->add_option("--tolerance", vo.tolerance);
  validate->add_flag("--corrupt", vo.corrupt, "negative control: perturbed infinitesimals");

  FlowOptions fo;
  std::string flow_init;
  auto* flowc = app.add_subcommand("flow", "integrate a Hamiltonian flow and export CSV/SVG");
  flowc->add_option("--scenario", fo.scenario, "fig1 or fig2");
  flowc->add_option("--action", fo.action);
  flowc->add_option("--hamiltonian", fo.hamiltonian, "preset name or expression");
  flowc->add_option("--init", flow_init, "comma separated initial state");
  flowc->add_option("--t-end", fo.t_end);
  flowc->add_option("--dt", fo.dt);
  flowc->add_option("--out", fo.out, "CSV path");
  flowc->add_option("--svg", fo.svg);
  flowc->add_option("--x", fo.x_column, "SVG x column");
  flowc->add_option("--y", fo.y_column, "SVG y columns, comma separated");

  FrameOptions ro;
  std::string z0, xi0;
  auto* frame = app.add_subcommand("frame", "reduced flow in moving-frame coordinates");
  frame->add_option("--action", ro.action);
  frame->add_option("--hamiltonian", ro.hamiltonian);
  frame->add_option("--z0", z0);
  frame->add_option("--xi0", xi0);
  frame->add_option("--t-end", ro.t_end);
  frame->add_option("--dt", ro.dt);
  frame->add_option("--out", ro.out);
  frame->add_option("--tolerance", ro.tolerance);

  CompatOptions co;
  auto* compat = app.add_subcommand("compat", "compatibility of the structures of two actions");
  compat->add_option("--action1", co.action1)->required();
  compat->add_option("--action2", co.action2)->required();
  compat->add_option("--samples", co.samples);
  compat->add_option("--seed", co.seed);
  compat->add_option("--tolerance", co.tolerance);
  compat->add_option("--expect", co.expect, "compatible or incompatible");

  LoopOptions lo;
  auto* loop = app.add_subcommand("loop", "loop algebra cocycles and extended brackets");
  loop->add_option("--action", lo.action);
  loop->add_option("--N", lo.N);
  loop->add_option("--degree", lo.degree);
  loop->add_option("--trials", lo.trials);
  loop->add_option("--jacobi-N", lo.jacobi_N);
  loop->add_option("--r", lo.r);
  loop->add_option("--alpha", lo.alpha);
  loop->add_option("--seed", lo.seed);

  StarGroupOptions so;
  auto* star = app.add_subcommand("stargroup", "local group of sections and its Lie bracket");
  star->add_option("--action", so.action);
  star->add_option("--eps", so.eps);
  star->add_option("--samples", so.samples);
  star->add_option("--seed", so.seed);

  auto* catalog = app.add_subcommand("catalog", "list catalog actions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    CommandResult res;
    if (validate->parsed()) {
      vo.seed = resolve_seed(vo.seed);
      res = cmd_validate(vo);
    } else if (flowc->parsed()) {
      fo.init = numbers(flow_init);
      res = cmd_flow(fo);
    } else if (frame->parsed()) {
      if (!z0.empty()) ro.z0 = numbers(z0);
      if (!xi0.empty()) ro.xi0 = numbers(xi0);
      res = cmd_frame(ro);
    } else if (compat->parsed()) {
      co.seed = resolve_seed(co.seed);
      res = cmd_compat(co);
    } else if (loop->parsed()) {
      lo.seed = resolve_seed(lo.seed);
      res = cmd_loop(lo);
    } else if (star->parsed()) {
      so.seed = resolve_seed(so.seed);
      res = cmd_stargroup(so);
    } else if (catalog->parsed()) {
      res.report = cmd_catalog();
    }
    std::string text = res.report.dump(2);
    std::cout << text << '\n';
    if (!report_path.empty()) write_text(report_path, text + "\n");
    return res.exit_code;
  } catch (const Error& e) {
    Json err{{"error", error_name(e.code())}, {"message", e.what()}};
    std::cout << err.dump(2) << '\n';
    return is_config_error(e.code()) ? kExitConfig : kExitResidual;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  }
}
