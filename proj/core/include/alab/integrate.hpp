#pragma once

#include "alab/algebroid.hpp"

#include <functional>
#include <string>
#include <vector>

namespace alab {

/// y' = rho(f(y), y) on M, driven by a Lie algebra action with a group action
/// Lambda(g, y) on ambient space.
struct ActionODE {
  std::string name;
  Action action;
  std::function<Vec(const Vec& y)> coefficients;  // f: M -> g
  Vec y0;
  double horizon = 1.0;

  Vec field(const Vec& y) const { return action.fundamental_field(coefficients(y), y); }
};

enum class Method { lie_euler, rkmk4, rk4_ambient };
std::string to_string(Method m);
Method method_from_string(const std::string& name);

/// Lambda(exp(h f(y)), y).
Vec lie_euler_step(const ActionODE& p, const Vec& y, double h);

/// Four-stage Runge-Kutta-Munthe-Kaas step. `dexpinv_order` truncates the
/// inverse-differential series (2 gives order four).
Vec rkmk4_step(const ActionODE& p, const Vec& y, double h, int dexpinv_order = 2);

/// Classical RK4 on the ambient field, no projection.
Vec rk4_ambient_step(const ActionODE& p, const Vec& y, double h);

struct Trajectory {
  Vec final;
  int steps = 0;
  /// max over visited points of |constraint(y)|
  double drift = 0.0;
};

/// Integrates to `horizon` with constant step h; horizon / h must be an
/// integer (within 1e-9 relative). horizon < 0 uses p.horizon.
Trajectory integrate(const ActionODE& p, Method method, double h, double horizon = -1.0,
                     int dexpinv_order = 2);

struct ConvergenceRow {
  double h = 0.0;
  double error = 0.0;
  double drift = 0.0;
};

struct ConvergenceTable {
  std::string problem;
  Method method = Method::rkmk4;
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;  // least squares on log(error) vs log(h)
  bool exact = false;  // every error at the roundoff floor; slope undefined
  double reference_h = 0.0;
};

/// h = base * 2^-j, j = 0..count-1.
std::vector<double> step_ladder(double base = 0.1, int count = 5);

/// Errors at p.horizon against a tiny-step RKMK4 reference with
/// h_ref = min(ladder) / 64. Ladder must have at least 4 strictly decreasing
/// entries.
ConvergenceTable convergence_study(const ActionODE& p, Method method,
                                   const std::vector<double>& ladder, int dexpinv_order = 2,
                                   double roundoff_floor = 1e-12);

/// Same, with a caller-supplied reference solution at p.horizon.
ConvergenceTable convergence_study(const ActionODE& p, Method method,
                                   const std::vector<double>& ladder, const Vec& reference,
                                   double reference_h, int dexpinv_order = 2,
                                   double roundoff_floor = 1e-12);

/// so(3) acting on S^2 with f(y) = (alpha, beta y3, gamma y1).
ActionODE sphere_test_problem(double alpha = 1.0, double beta = 0.5, double gamma = 1.0 / 3.0,
                              Vec y0 = Vec(), double horizon = 1.0);

/// so(3) acting on S^2 with a constant coefficient map.
ActionODE constant_sphere_problem(const Vec& a, Vec y0 = Vec(), double horizon = 1.0);

/// Conjugates an S^2 problem by the rotation Q: y0 -> Q y0, f -> Q f(Q^T .).
ActionODE rotate_problem(const ActionODE& p, const Mat& Q);

}  // namespace alab
