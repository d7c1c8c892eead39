#pragma once

#include "alab/connection.hpp"
#include "alab/lie_algebra.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace alab {

struct TransportConfig {
  int initial_steps = 64;
  int max_steps = 16384;
  /// Step doubling stops once two successive propagators differ by less.
  double tolerance = 1e-12;
  /// Fixed RK4 resolution used when frame sections are evaluated off the
  /// probe set (keeps them smooth in x so they can be differentiated).
  int frame_steps = 256;
  int loops = 10;
  double loop_size = 0.2;
  double loop_tolerance = 1e-6;
  double flatness_tolerance = 1e-6;
  double constancy_tolerance = 1e-4;
  double degenerate_tolerance = 1e-6;
  int num_points = 20;
  std::uint64_t seed = 4242;
};

struct TransportResult {
  Mat propagator;  // Y(to) = propagator * Y(from) for parallel Y
  int steps = 0;
  double change = 0.0;  // difference between the last two resolutions
};

/// Parallel transport along c(t) = retract((1-t) from + t to), with a
/// waypoint inserted when the straight chord passes near a retraction
/// singularity. RK4 on dy/dt = -Theta(c, c') y, steps doubled from
/// `initial_steps` until the change drops below `tolerance`.
TransportResult parallel_transport(const TMConnection& conn, const Vec& from, const Vec& to,
                                   const TransportConfig& config = {});

/// Same path, fixed number of RK4 steps per leg.
Mat parallel_transport_fixed(const TMConnection& conn, const Vec& from, const Vec& to, int steps);

struct ProbeMax {
  double value = 0.0;
  Vec witness;
};

/// Max |F(U, V) e_j| over points, pairs of projected coordinate fields U, V
/// and fiber basis vectors e_j, where F is the curvature of the TM-connection.
ProbeMax tm_curvature_residual(const TMConnection& conn, const std::vector<Vec>& points);

/// Max |P_loop - I| over small geodesic-free triangles around sampled points.
ProbeMax loop_holonomy_residual(const TMConnection& conn, const TransportConfig& config);

struct Frame {
  TMConnection connection;
  Vec base_point;
  int steps = 0;
  std::vector<Section> sections;  // e_1..e_k, e_i(base_point) = standard basis
  std::function<Mat(const Vec&)> transport_from_base;
  double flatness_residual = 0.0;  // max |nabla_v e_i| at probe points
  double loop_residual = 0.0;
  double curvature_residual = 0.0;

  /// Columns are e_i(x).
  Mat matrix(const Vec& x) const;
  int dim() const { return static_cast<int>(sections.size()); }
};

class ReconstructionError : public NumericError {
 public:
  enum class Code { not_flat, path_dependent, non_transitive, degenerate_frame, constancy_violated,
                    unsupported_bundle };
  ReconstructionError(Code code, const std::string& what, Vec witness = {})
      : NumericError(what), code_(code), witness_(std::move(witness)) {}
  Code code() const { return code_; }
  const Vec& witness() const { return witness_; }

 private:
  Code code_;
  Vec witness_;
};

std::string to_string(ReconstructionError::Code code);

/// Checks flatness and path independence, then builds the frame of parallel
/// sections normalized at `base_point`. Throws ReconstructionError
/// (not_flat, path_dependent).
Frame parallel_frame(const TMConnection& conn, const Vec& base_point,
                     const std::vector<Vec>& points, const TransportConfig& config = {});

struct ReconstructionResult {
  LieAlgebra recovered = LieAlgebra::abelian(1);
  double constancy_residual = 0.0;
  double jacobi_residual = 0.0;
  double action_match_residual = 0.0;
  /// |L[a,b]_recovered - [La, Lb]_reference| for the fitted map L.
  double homomorphism_residual = 0.0;
  double flatness_residual = 0.0;
  double loop_residual = 0.0;
  double curvature_residual = 0.0;
  bool abelian = false;
  AlgebraInvariants invariants;
  Mat action_map;  // L: recovered basis -> reference algebra coordinates
  Vec constancy_witness;
  std::vector<Vec> points;
  /// Set by reconstruct_action.
  std::shared_ptr<const Frame> frame;
};

/// Solves E(x) c_ij = [e_i, e_j](x) at every probe point, reports the max
/// deviation from the mean, and returns the mean constants antisymmetrized.
/// Throws ReconstructionError(degenerate_frame) if E(x) is near singular.
ReconstructionResult structure_constants(const Frame& frame, const Algebroid& alg,
                                         const std::vector<Vec>& points,
                                         const TransportConfig& config = {},
                                         double abelian_tolerance = 1e-8);

/// Fits a constant map L with rho(e_i(x), x) ~ sum_a L_ai (xi_a)_M(x) over the
/// probe points and stores the fit residual (relative) and the homomorphism
/// residual of L in `result`.
void match_action(ReconstructionResult& result, const Frame& frame, const Algebroid& alg,
                  const Action& reference);

struct ReconstructOptions {
  TransportConfig transport;
  std::optional<Vec> base_point;
  /// Action whose fundamental fields the recovered anchor is compared with.
  /// Defaults to the algebroid's own action when it has one.
  std::optional<Action> reference;
};

/// Transitivity check, parallel frame, structure constants, constancy check
/// and action match.
ReconstructionResult reconstruct_action(const AlgebroidPtr& alg, const TMConnection& conn,
                                        const ReconstructOptions& options = {});

/// Agreement of anchor and bracket between the action algebroid of the
/// recovered algebra (sections in frame coordinates) and the input, on
/// random constant-and-linear sections.
double round_trip_residual(const Frame& frame, const ReconstructionResult& result,
                           const Algebroid& alg, int batteries = 2, std::uint64_t seed = 77);

}  // namespace alab
