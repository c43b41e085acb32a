#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace algpois {

using Json = nlohmann::ordered_json;

enum ExitCode { kExitPass = 0, kExitResidual = 2, kExitConfig = 3 };

struct CommandResult {
  Json report;
  int exit_code = kExitPass;
};

struct ValidateOptions {
  std::string action;
  int samples = 100;
  std::uint64_t seed = 1;
  bool corrupt = false;
  double tolerance = 1e-8;
};
CommandResult cmd_validate(const ValidateOptions& o);

struct FlowOptions {
  std::string scenario;  // "", "fig1", "fig2"
  std::string action;
  std::string hamiltonian;
  std::vector<double> init;
  double t_end = 10.0;
  double dt = 1e-3;
  std::string out;  // CSV path; figure scenarios add one file per extra trajectory
  std::string svg;
  std::string x_column, y_column;
};
CommandResult cmd_flow(const FlowOptions& o);

struct FrameOptions {
  std::string action = "sl2-prolonged-3";
  std::string hamiltonian = "fig2-jet";
  std::vector<double> z0{1, 1, 1, 1};
  std::vector<double> xi0{1, 1, 1};
  double t_end = 5.0;
  double dt = 1e-3;
  std::string out;
  double tolerance = 1e-6;
};
CommandResult cmd_frame(const FrameOptions& o);

struct CompatOptions {
  std::string action1, action2;
  int samples = 50;
  std::uint64_t seed = 1;
  double tolerance = 1e-8;
  std::string expect;  // "", "compatible", "incompatible"
};
CommandResult cmd_compat(const CompatOptions& o);

struct LoopOptions {
  std::string action = "sl2-circle";
  int N = 256;
  int degree = 8;
  int trials = 5;
  int jacobi_N = 64;
  double r = -1.0;
  double alpha = 1.0;
  std::uint64_t seed = 1;
};
CommandResult cmd_loop(const LoopOptions& o);

struct StarGroupOptions {
  std::string action = "sl2-projective";
  double eps = 1e-3;
  int samples = 20;
  std::uint64_t seed = 1;
};
CommandResult cmd_stargroup(const StarGroupOptions& o);

Json cmd_catalog();

}  // namespace algpois
