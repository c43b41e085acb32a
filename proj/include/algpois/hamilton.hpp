#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "algpois/poisson.hpp"

namespace algpois {

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::string integrator = "rk4";
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> labels;  // column names of a state
};

using DomainGuard = std::function<bool(std::span<const double>)>;

// Lambda(x) grad H(x).
std::vector<double> hamiltonian_vector_field(const PoissonStructure& P, const SmoothMap& H, std::span<const double> x);

// Fixed-step classical RK4; the last step is shortened to land on t_end.
Trajectory flow(const PoissonStructure& P, const SmoothMap& H, std::vector<double> init, double t_end, double dt,
                const DomainGuard& guard = {});

double conserved_monitor(const Trajectory& traj, const SmoothMap& F);

// Guard keeping the z part of (z, xi) inside the action's domain.
DomainGuard action_guard(const Action& a, double min_margin = 1e-8);
std::vector<std::string> phase_labels(const Action& a);

// max |H(g^{-1}.z, xi Am(g)) - H(z, xi)| / max(1, |H|) over random samples.
double invariance_residual(const Action& a, const SmoothMap& H, int count, std::uint64_t seed);

struct XiFreezeReport {
  double invariance = 0.0;
  double xi_dot_max = 0.0;  // over sample points and along a short flow
  int samples = 0;
};
// Throws NotInvariant (with the measured residual) when the pre-check fails.
XiFreezeReport xi_freeze_check(const Action& a, const SmoothMap& H, int count = 100, std::uint64_t seed = 1,
                               double tolerance = 1e-8);

// Normalisation equations z_{index[k]} = target[k] on the cross-section.
struct Normalization {
  std::vector<int> index;
  std::vector<double> target;
};

struct MovingFrame {
  Action action;
  Normalization norm;
  bool closed_form = false;

  Eigen::MatrixXd sigma(std::span<const double> z) const;
  // I(z) = sigma(z).z
  std::vector<double> invariants(std::span<const double> z) const;
};

Normalization default_normalization(const Action& a);
MovingFrame moving_frame(const Action& a, Normalization norm, bool use_closed_form = true);
Eigen::MatrixXd newton_frame(const Action& a, const Normalization& norm, std::span<const double> z);
Eigen::MatrixXd sl2_jet_frame(std::span<const double> z);
// || sigma(g.z) - sigma(z) g^{-1} ||
double frame_equivariance_residual(const MovingFrame& f, const Eigen::MatrixXd& g, std::span<const double> z);
void project_to_group(const LieAlgebra& alg, Eigen::MatrixXd& g);

struct FrameTrajectory {
  Trajectory traj;                // states: sigma (row-major n*n), xi
  std::vector<double> invariants;  // fixed normalised invariants
  double det_defect = 0.0;         // max |det sigma - 1| (SL(n))
  double frame_consistency = 0.0;  // max || sigma(t) - frame(z(t)) || / || sigma(t) ||
  double invariant_drift = 0.0;    // max || I(z(t)) - I ||
};

// sigma' = -sigma sum_i H_{xi_i} v_i, xi' from the xi rows of the structure at z = sigma^{-1}.I.
FrameTrajectory frame_flow(const MovingFrame& f, const SmoothMap& H, std::span<const double> z0,
                           std::span<const double> xi0, double t_end, double dt);
// (z, xi) along a frame trajectory.
std::vector<std::vector<double>> frame_to_phase(const MovingFrame& f, const FrameTrajectory& ft);

struct LabeledTrajectory {
  std::string label;
  std::string hamiltonian;
  Trajectory traj;
};
std::vector<LabeledTrajectory> figure1(double t_end, double dt);
std::vector<LabeledTrajectory> figure2(double t_end, double dt);

// Drift ratio drift(dt) / drift(dt/2) of H along flow from init.
double rk4_order_ratio(const PoissonStructure& P, const SmoothMap& H, const std::vector<double>& init, double t_end,
                       double dt);

}  // namespace algpois
