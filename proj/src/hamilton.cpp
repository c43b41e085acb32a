#include "algpois/hamilton.hpp"

#include <cmath>

#include "algpois/expr.hpp"

namespace algpois {

namespace {

using Vec = std::vector<double>;

void axpy(Vec& y, double a, const Vec& x) {
  for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

bool finite(const Vec& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

// Generic RK4 driver with an optional projection after each step.
template <class F, class Post>
Trajectory rk4(F f, Vec x, double t_end, double dt, const DomainGuard& guard, Post post) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw Error(ErrorCode::ConfigError, "flow needs dt > 0 and t_end >= 0");
  if (guard && !guard(x)) throw Error(ErrorCode::OutOfDomain, "initial state outside the domain");
  Trajectory tr;
  tr.dt = dt;
  tr.times.push_back(0.0);
  tr.states.push_back(x);
  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  double t = 0.0;
  for (long s = 0; s < steps; ++s) {
    double h = std::min(dt, t_end - t);
    if (s == steps - 1) h = t_end - t;
    Vec k1 = f(x);
    Vec x2 = x;
    axpy(x2, 0.5 * h, k1);
    Vec k2 = f(x2);
    Vec x3 = x;
    axpy(x3, 0.5 * h, k2);
    Vec k3 = f(x3);
    Vec x4 = x;
    axpy(x4, h, k3);
    Vec k4 = f(x4);
    for (size_t i = 0; i < x.size(); ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    post(x);
    t = (s == steps - 1) ? t_end : t + h;
    if (!finite(x)) throw Error(ErrorCode::NonFinite, "non-finite state at t = " + std::to_string(t));
    if (guard && !guard(x)) throw Error(ErrorCode::DomainExit, "trajectory left the domain at t = " + std::to_string(t));
    tr.times.push_back(t);
    tr.states.push_back(x);
  }
  return tr;
}

bool is_sl2_jet(const Action& a) { return a.name == "sl2-prolonged" || a.name == "sl2-prolonged-3"; }

Eigen::MatrixXd flat_to_matrix(std::span<const double> s, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = s[static_cast<size_t>(i) * n + j];
  return m;
}

}  // namespace

std::vector<double> hamiltonian_vector_field(const PoissonStructure& P, const SmoothMap& H, std::span<const double> x) {
  Vec v(x.begin(), x.end());
  Eigen::VectorXd f = P.at(x) * gradient(H, v);
  return Vec(f.data(), f.data() + f.size());
}

Trajectory flow(const PoissonStructure& P, const SmoothMap& H, std::vector<double> init, double t_end, double dt,
                const DomainGuard& guard) {
  if (static_cast<int>(init.size()) != P.dim() || H.in_dim() != P.dim())
    throw Error(ErrorCode::DimensionMismatch, "initial state / Hamiltonian size does not match the structure");
  return rk4([&](const Vec& x) { return hamiltonian_vector_field(P, H, x); }, std::move(init), t_end, dt, guard,
             [](Vec&) {});
}

double conserved_monitor(const Trajectory& traj, const SmoothMap& F) {
  if (traj.states.empty()) return 0.0;
  double f0 = eval_scalar(F, traj.states.front()), worst = 0.0;
  for (const auto& x : traj.states) worst = std::max(worst, std::abs(eval_scalar(F, x) - f0));
  return worst;
}

DomainGuard action_guard(const Action& a, double min_margin) {
  if (!a.margin) return {};
  return [a, min_margin](std::span<const double> x) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Identity(a.alg.n, a.alg.n);
    return in_domain(a, e, x.subspan(0, a.p), min_margin);
  };
}

std::vector<std::string> phase_labels(const Action& a) {
  std::vector<std::string> names(a.p + a.alg.r);
  for (int i = 0; i < a.p; ++i) names[i] = "z" + std::to_string(i + 1);
  for (const auto& [k, i] : action_aliases(a.name))
    if (i < a.p) names[i] = k;
  for (int k = 0; k < a.alg.r; ++k) names[a.p + k] = "xi" + std::to_string(k + 1);
  return names;
}

double invariance_residual(const Action& a, const SmoothMap& H, int count, std::uint64_t seed) {
  if (!a.has_action()) throw Error(ErrorCode::UnsupportedShape, a.name + ": invariance needs the finite action");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const int r = a.alg.r;
  double worst = 0.0;
  for (int t = 0; t < count; ++t) {
    auto [g, z] = sample_pair(a, rng);
    Eigen::VectorXd xi(r);
    for (int k = 0; k < r; ++k) xi(k) = u(rng);
    Vec x = z;
    x.insert(x.end(), xi.data(), xi.data() + r);
    Vec y = pullback_point(a, g, z);
    Eigen::VectorXd moved = (xi.transpose() * adjoint_matrix(a.alg, g)).transpose();
    y.insert(y.end(), moved.data(), moved.data() + r);
    double h0 = eval_scalar(H, x);
    worst = std::max(worst, std::abs(eval_scalar(H, y) - h0) / std::max(1.0, std::abs(h0)));
  }
  return worst;
}

XiFreezeReport xi_freeze_check(const Action& a, const SmoothMap& H, int count, std::uint64_t seed, double tolerance) {
  XiFreezeReport rep;
  rep.invariance = invariance_residual(a, H, count, seed);
  if (!(rep.invariance < tolerance))
    throw Error(ErrorCode::NotInvariant, a.name + ": Hamiltonian is not invariant, residual " +
                                             std::to_string(rep.invariance));
  auto P = assemble(a);
  auto xi_dot = [&](std::span<const double> x) {
    auto f = hamiltonian_vector_field(P, H, x);
    double n = 0.0;
    for (int k = 0; k < a.alg.r; ++k) n += f[a.p + k] * f[a.p + k];
    return std::sqrt(n);
  };
  auto pts = sample_phase_points(a, count, seed);
  for (const auto& x : pts) rep.xi_dot_max = std::max(rep.xi_dot_max, xi_dot(x));
  rep.samples = static_cast<int>(pts.size());
  auto inside = action_guard(a, 1e-3);
  DomainGuard guard = [inside](std::span<const double> x) {
    for (double v : x)
      if (std::abs(v) > 1e6) return false;
    return !inside || inside(x);
  };
  for (int k = 0; k < std::min(count, 5); ++k) {
    Trajectory tr;
    try {
      tr = flow(P, H, pts[k], 0.5, 1e-2, guard);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DomainExit && e.code() != ErrorCode::NonFinite) throw;
      continue;
    }
    for (const auto& x : tr.states) rep.xi_dot_max = std::max(rep.xi_dot_max, xi_dot(x));
    rep.samples += static_cast<int>(tr.states.size());
  }
  return rep;
}

Normalization default_normalization(const Action& a) {
  if (is_sl2_jet(a)) return {{0, 1, 2}, {0.0, 1.0, 0.0}};
  throw Error(ErrorCode::ConfigError, a.name + ": no default normalisation; pass one explicitly");
}

Eigen::MatrixXd sl2_jet_frame(std::span<const double> z) {
  double u = z[0], uv = z[1], uvv = z[2];
  if (!(uv > 0.0)) throw Error(ErrorCode::OutOfDomain, "jet frame needs u_v > 0");
  double s = std::sqrt(uv);
  double a = 1.0 / s, b = -u / s, c = uvv / (2.0 * uv * s);
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, (1.0 + b * c) / a;
  return m;
}

Eigen::MatrixXd newton_frame(const Action& a, const Normalization& norm, std::span<const double> z) {
  if (a.parity != Parity::Left) throw Error(ErrorCode::UnsupportedShape, "moving frames are built for left actions");
  const int r = a.alg.r, m = static_cast<int>(norm.index.size());
  if (m != r || norm.target.size() != norm.index.size())
    throw Error(ErrorCode::DimensionMismatch, "need one normalisation equation per group parameter");
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(a.alg.n, a.alg.n);
  auto residual = [&](const Eigen::MatrixXd& g, Eigen::VectorXd& N, Vec& w) {
    if (!in_domain(a, g, z)) return false;
    w = apply(a, g, z);
    N.resize(m);
    for (int k = 0; k < m; ++k) N(k) = w[norm.index[k]] - norm.target[k];
    return N.allFinite();
  };
  Eigen::VectorXd N;
  Vec w;
  if (!residual(h, N, w)) throw Error(ErrorCode::OutOfDomain, a.name + ": point outside the domain");
  for (int it = 0; it < 100; ++it) {
    if (N.norm() < 1e-14 * (1.0 + Eigen::Map<const Eigen::VectorXd>(w.data(), a.p).norm())) return h;
    Eigen::MatrixXd phi = infinitesimal_matrix(a, w);
    Eigen::MatrixXd J(m, r);
    for (int k = 0; k < m; ++k) J.row(k) = phi.row(norm.index[k]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12)
      throw Error(ErrorCode::NotFreeRegular, a.name + ": normalisation equations are singular");
    Eigen::VectorXd delta = -lu.solve(N);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40 && !accepted; ++ls, step *= 0.5) {
      Eigen::MatrixXd trial = exp_coords(a.alg, std::span<const double>(delta.data(), r), step) * h;
      Eigen::VectorXd N2;
      Vec w2;
      if (residual(trial, N2, w2) && N2.norm() < (1.0 - 1e-4 * step) * N.norm() + 1e-15) {
        h = trial;
        N = N2;
        w = w2;
        accepted = true;
      }
    }
    if (!accepted) break;
  }
  if (N.norm() < 1e-10) return h;
  throw Error(ErrorCode::NotFreeRegular, a.name + ": Newton iteration for the frame did not converge");
}

Eigen::MatrixXd MovingFrame::sigma(std::span<const double> z) const {
  if (closed_form) return sl2_jet_frame(z);
  return newton_frame(action, norm, z);
}

std::vector<double> MovingFrame::invariants(std::span<const double> z) const {
  if (!closed_form) return apply(action, sigma(z), z);
  // sigma(z).z in closed form; applying sigma directly loses digits once u_v is small
  if (!(z[1] > 0.0)) throw Error(ErrorCode::OutOfDomain, "jet frame needs u_v > 0");
  Vec I{0.0, 1.0, 0.0};
  if (z.size() > 3) I.push_back((z[1] * z[3] - 1.5 * z[2] * z[2]) / (z[1] * z[1]));
  return I;
}

MovingFrame moving_frame(const Action& a, Normalization norm, bool use_closed_form) {
  MovingFrame f;
  f.action = a;
  f.norm = std::move(norm);
  auto d = is_sl2_jet(a) ? default_normalization(a) : Normalization{};
  f.closed_form = use_closed_form && is_sl2_jet(a) && f.norm.index == d.index && f.norm.target == d.target;
  return f;
}

double frame_equivariance_residual(const MovingFrame& f, const Eigen::MatrixXd& g, std::span<const double> z) {
  Vec gz = apply(f.action, g, z);
  return (f.sigma(gz) - f.sigma(z) * g.inverse()).norm();
}

void project_to_group(const LieAlgebra& alg, Eigen::MatrixXd& g) {
  if (alg.name == "sl2") {
    double det = g.determinant();
    if (det > 0.0) g /= std::sqrt(det);
  } else if (alg.name == "so3" || alg.name == "so3-mobius") {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    g = svd.matrixU() * svd.matrixV().transpose();
  }
}

FrameTrajectory frame_flow(const MovingFrame& f, const SmoothMap& H, std::span<const double> z0,
                           std::span<const double> xi0, double t_end, double dt) {
  const Action& a = f.action;
  const int n = a.alg.n, r = a.alg.r, p = a.p;
  auto P = assemble(a);
  FrameTrajectory out;
  Eigen::MatrixXd s0 = f.sigma(z0);
  out.invariants = apply(a, s0, z0);
  const Vec I = out.invariants;
  Vec x(static_cast<size_t>(n) * n + r);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x[static_cast<size_t>(i) * n + j] = s0(i, j);
  for (int k = 0; k < r; ++k) x[static_cast<size_t>(n) * n + k] = xi0[k];

  auto phase = [&](const Vec& s) {
    Eigen::MatrixXd sig = flat_to_matrix(s, n);
    Vec y = apply(a, sig.inverse(), I);
    y.insert(y.end(), s.begin() + n * n, s.end());
    return y;
  };
  auto rhs = [&](const Vec& s) {
    Vec y = phase(s);
    Eigen::VectorXd grad = gradient(H, y);
    Eigen::MatrixXd L = P.at(y);
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < r; ++k) gen += grad(p + k) * a.alg.basis[k];
    Eigen::MatrixXd ds = -flat_to_matrix(s, n) * gen;
    Eigen::VectorXd dxi = L.bottomRows(r) * grad;
    Vec d(s.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[static_cast<size_t>(i) * n + j] = ds(i, j);
    for (int k = 0; k < r; ++k) d[static_cast<size_t>(n) * n + k] = dxi(k);
    return d;
  };
  auto post = [&](Vec& s) {
    Eigen::MatrixXd sig = flat_to_matrix(s, n);
    project_to_group(a.alg, sig);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s[static_cast<size_t>(i) * n + j] = sig(i, j);
  };
  out.traj = rk4(rhs, x, t_end, dt, {}, post);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.traj.labels.push_back("sigma" + std::to_string(i + 1) + std::to_string(j + 1));
  for (int k = 0; k < r; ++k) out.traj.labels.push_back("xi" + std::to_string(k + 1));
  for (const auto& s : out.traj.states) {
    Eigen::MatrixXd sig = flat_to_matrix(s, n);
    if (a.alg.name.rfind("sl", 0) == 0) out.det_defect = std::max(out.det_defect, std::abs(sig.determinant() - 1.0));
    Vec y = phase(s);
    std::span<const double> z(y.data(), p);
    out.frame_consistency = std::max(out.frame_consistency, (sig - f.sigma(z)).norm() / sig.norm());
    Vec Iz = f.invariants(z);
    double d = 0.0;
    for (int i = 0; i < p; ++i) d = std::max(d, std::abs(Iz[i] - I[i]));
    out.invariant_drift = std::max(out.invariant_drift, d);
  }
  return out;
}

std::vector<std::vector<double>> frame_to_phase(const MovingFrame& f, const FrameTrajectory& ft) {
  const int n = f.action.alg.n;
  std::vector<Vec> out;
  for (const auto& s : ft.traj.states) {
    Vec y = apply(f.action, flat_to_matrix(s, n).inverse(), ft.invariants);
    y.insert(y.end(), s.begin() + n * n, s.end());
    out.push_back(std::move(y));
  }
  return out;
}

namespace {

LabeledTrajectory run_preset(const std::string& preset, const PoissonStructure& P, const std::string& aliases_of,
                             std::vector<double> init, double t_end, double dt, std::vector<std::string> labels,
                             const DomainGuard& guard = {}) {
  const auto& h = hamiltonian_preset(preset);
  auto H = hamiltonian(preset, aliases_of, P.p, P.r);
  LabeledTrajectory lt{preset, h.text, flow(P, H, std::move(init), t_end, dt, guard)};
  lt.traj.labels = std::move(labels);
  return lt;
}

}  // namespace

std::vector<LabeledTrajectory> figure1(double t_end, double dt) {
  auto a = catalog_action("so3-mobius");
  auto so3 = catalog_algebra("so3");
  auto lp = lie_poisson_structure(so3);
  std::vector<LabeledTrajectory> out;
  out.push_back(run_preset("fig1", assemble(a), a.name, {1, 1, 1, 1, 1}, t_end, dt, phase_labels(a)));
  out.push_back(run_preset("fig1-lp-quadratic", lp, "", {1, 1, 1}, t_end, dt, {"xi1", "xi2", "xi3"}));
  out.push_back(run_preset("fig1-lp-cubic", lp, "", {1, 1, 1}, t_end, dt, {"xi1", "xi2", "xi3"}));
  return out;
}

std::vector<LabeledTrajectory> figure2(double t_end, double dt) {
  auto a = catalog_action("sl2-frame");
  auto lp = lie_poisson_structure(catalog_algebra("sl2"));
  std::vector<LabeledTrajectory> out;
  DomainGuard guard = [](std::span<const double> x) { return std::abs(x[0]) > 1e-8; };
  out.push_back(run_preset("fig2-sigma", assemble(a), a.name, {1, -1, 0.5, 1, 1, 1}, t_end, dt,
                           {"sa", "sb", "sc", "xi1", "xi2", "xi3"}, guard));
  out.push_back(run_preset("fig2-lp", lp, "", {1, 1, 1}, t_end, dt, {"xi1", "xi2", "xi3"}));
  return out;
}

double rk4_order_ratio(const PoissonStructure& P, const SmoothMap& H, const std::vector<double>& init, double t_end,
                       double dt) {
  double d1 = conserved_monitor(flow(P, H, init, t_end, dt), H);
  double d2 = conserved_monitor(flow(P, H, init, t_end, dt / 2), H);
  return d1 / d2;
}

}  // namespace algpois
