#include "alab/integrate.hpp"

#include "alab/lie_algebra.hpp"

#include <cmath>
#include <limits>

namespace alab {

std::string to_string(Method m) {
  switch (m) {
    case Method::lie_euler: return "lie_euler";
    case Method::rkmk4: return "rkmk4";
    case Method::rk4_ambient: return "rk4_ambient";
  }
  return "rkmk4";
}

Method method_from_string(const std::string& name) {
  if (name == "lie_euler") return Method::lie_euler;
  if (name == "rkmk4") return Method::rkmk4;
  if (name == "rk4_ambient") return Method::rk4_ambient;
  throw InputError("unknown integrator '" + name + "' (expected lie_euler, rkmk4, rk4_ambient)");
}

namespace {

Vec act(const ActionODE& p, const Vec& u, const Vec& y) {
  if (!p.action.group_act) {
    throw UnsupportedError("action '" + p.action.name + "' has no group action");
  }
  return p.action.group_act(exp_matrix(p.action.algebra, u), y);
}

}  // namespace

Vec lie_euler_step(const ActionODE& p, const Vec& y, double h) {
  if (h < 0.0) throw InputError("step size must be non-negative");
  if (h == 0.0) return y;
  return act(p, h * p.coefficients(y), y);
}

// Lambda is a right action, so y(t) = Lambda(exp(u(t)), y0) with
// u' = dexpinv(-u, f(y)).
Vec rkmk4_step(const ActionODE& p, const Vec& y, double h, int dexpinv_order) {
  if (h < 0.0) throw InputError("step size must be non-negative");
  if (h == 0.0) return y;
  const LieAlgebra& g = p.action.algebra;
  auto stage = [&](const Vec& u) -> Vec {
    return h * dexpinv(g, -u, p.coefficients(act(p, u, y)), dexpinv_order);
  };
  const Vec k1 = h * p.coefficients(y);
  const Vec k2 = stage(0.5 * k1);
  const Vec k3 = stage(0.5 * k2);
  const Vec k4 = stage(k3);
  return act(p, (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0, y);
}

Vec rk4_ambient_step(const ActionODE& p, const Vec& y, double h) {
  if (h < 0.0) throw InputError("step size must be non-negative");
  if (h == 0.0) return y;
  const Vec k1 = p.field(y);
  const Vec k2 = p.field(y + 0.5 * h * k1);
  const Vec k3 = p.field(y + 0.5 * h * k2);
  const Vec k4 = p.field(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate(const ActionODE& p, Method method, double h, double horizon,
                     int dexpinv_order) {
  if (horizon < 0.0) horizon = p.horizon;
  if (!(h > 0.0)) throw InputError("step size must be positive");
  const double n_real = horizon / h;
  const long n = std::lround(n_real);
  if (std::abs(n_real - static_cast<double>(n)) > 1e-9 * std::max(1.0, n_real)) {
    throw InputError("horizon " + std::to_string(horizon) + " is not a multiple of h = " +
                     std::to_string(h));
  }
  const EmbeddedManifold& m = *p.action.manifold;
  Trajectory out;
  Vec y = p.y0;
  out.drift = m.constraint(y).norm();
  for (long s = 0; s < n; ++s) {
    switch (method) {
      case Method::lie_euler: y = lie_euler_step(p, y, h); break;
      case Method::rkmk4: y = rkmk4_step(p, y, h, dexpinv_order); break;
      case Method::rk4_ambient: y = rk4_ambient_step(p, y, h); break;
    }
    out.drift = std::max(out.drift, m.constraint(y).norm());
  }
  if (!y.allFinite()) throw NumericError("trajectory of '" + p.name + "' became non-finite");
  out.final = y;
  out.steps = static_cast<int>(n);
  return out;
}

std::vector<double> step_ladder(double base, int count) {
  std::vector<double> out;
  for (int j = 0; j < count; ++j) out.push_back(base * std::ldexp(1.0, -j));
  return out;
}

namespace {

void check_ladder(const std::vector<double>& ladder) {
  if (ladder.size() < 4) throw InputError("convergence ladder needs at least 4 step sizes");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0)) throw InputError("ladder step sizes must be positive");
    if (i > 0 && !(ladder[i] < ladder[i - 1])) {
      throw InputError("ladder step sizes must be strictly decreasing");
    }
  }
}

}  // namespace

ConvergenceTable convergence_study(const ActionODE& p, Method method,
                                   const std::vector<double>& ladder, const Vec& reference,
                                   double reference_h, int dexpinv_order, double roundoff_floor) {
  check_ladder(ladder);
  ConvergenceTable table;
  table.problem = p.name;
  table.method = method;
  table.reference_h = reference_h;
  bool all_floor = true;
  for (double h : ladder) {
    const Trajectory t = integrate(p, method, h, p.horizon, dexpinv_order);
    ConvergenceRow row{h, (t.final - reference).norm(), t.drift};
    if (row.error > roundoff_floor) all_floor = false;
    table.rows.push_back(row);
  }
  table.exact = all_floor;
  if (all_floor) {
    table.slope = std::numeric_limits<double>::quiet_NaN();
    return table;
  }
  // Least-squares slope of log(error) against log(h).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(table.rows.size());
  for (const auto& r : table.rows) {
    const double lx = std::log(r.h);
    const double ly = std::log(std::max(r.error, std::numeric_limits<double>::min()));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  table.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return table;
}

ConvergenceTable convergence_study(const ActionODE& p, Method method,
                                   const std::vector<double>& ladder, int dexpinv_order,
                                   double roundoff_floor) {
  check_ladder(ladder);
  const double h_ref = ladder.back() / 64.0;
  Vec reference;
  try {
    reference = integrate(p, Method::rkmk4, h_ref, p.horizon, 2).final;
  } catch (const InputError& e) {
    throw NumericError(std::string("reference solution failed: ") + e.what());
  }
  return convergence_study(p, method, ladder, reference, h_ref, dexpinv_order, roundoff_floor);
}

namespace {

Vec default_start() {
  Vec y(3);
  y << 0.0, 0.6, 0.8;
  return y;
}

}  // namespace

ActionODE sphere_test_problem(double alpha, double beta, double gamma, Vec y0, double horizon) {
  if (y0.size() == 0) y0 = default_start();
  ActionODE p{"sphere_test", so3_sphere_action(),
              [alpha, beta, gamma](const Vec& y) -> Vec {
                Vec f(3);
                f << alpha, beta * y[2], gamma * y[0];
                return f;
              },
              std::move(y0), horizon};
  return p;
}

ActionODE constant_sphere_problem(const Vec& a, Vec y0, double horizon) {
  if (a.size() != 3) throw InputError("so(3) coefficients need 3 entries");
  if (y0.size() == 0) y0 = default_start();
  return ActionODE{"sphere_constant", so3_sphere_action(),
                   [a](const Vec&) -> Vec { return a; }, std::move(y0), horizon};
}

ActionODE rotate_problem(const ActionODE& p, const Mat& Q) {
  if (Q.rows() != 3 || Q.cols() != 3) throw InputError("rotation must be 3x3");
  if ((Q.transpose() * Q - Mat::Identity(3, 3)).norm() > 1e-12 || Q.determinant() < 0.0) {
    throw InputError("conjugating matrix must be a rotation");
  }
  ActionODE out = p;
  out.name = p.name + "_rotated";
  out.y0 = Q * p.y0;
  out.coefficients = [f = p.coefficients, Q](const Vec& y) -> Vec {
    return Q * f(Q.transpose() * y);
  };
  return out;
}

}  // namespace alab
