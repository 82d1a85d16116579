#pragma once

// The scalar comparison ODE v' = f(v), v(0) = v0 > 0, for the Osgood family.
// On every block the right-hand side is a power law, a constant or an affine
// function, so block traversal times have closed forms; an adaptive 5(4)
// Runge-Kutta integrator cross-checks them.

#include <cstddef>
#include <string>
#include <vector>

#include "osgood/osgood_family.hpp"

namespace osgood {

enum class BlockFormula { PowerBlock, ConstantBlock, AffineBlock };

[[nodiscard]] std::string to_string(BlockFormula formula);

struct Breakpoint {
  double time = 0.0;
  double level = 0.0;
  Block block;  // block entered at this point
};

struct OdeTrajectory {
  double v0 = 0.0;
  std::vector<Breakpoint> breakpoints;  // first entry is (0, v0)
  double final_time = 0.0;
  double final_level = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Time to climb from `entry` to the upper end of `block`.
/// DomainError if entry lies outside the block's closed interval.
[[nodiscard]] double block_traversal_time(const OsgoodFamily& family, Block block, double entry);

/// Same, with the entry level given as a logarithm.
[[nodiscard]] double block_traversal_time_log(const OsgoodFamily& family, Block block,
                                              double log_entry);

/// Time for the solution started at v0 to reach `level` (level >= v0 > 0).
[[nodiscard]] double time_to_reach(const OsgoodFamily& family, double v0, double level);

/// Log-domain variant for levels past the double range.
[[nodiscard]] double time_to_reach_log(const OsgoodFamily& family, double log_v0,
                                       double log_level);

/// log(phi_n / 2), the upper end of plateau I_n.
[[nodiscard]] double log_half_phi(const OsgoodFamily& family, std::size_t n);

/// Trajectory assembled from the closed-form traversal times on [0, T].
[[nodiscard]] OdeTrajectory solve_ode_closed_form(const OsgoodFamily& family, double v0,
                                                  double horizon);

/// Adaptive Dormand-Prince integration on [0, T] with block crossings located
/// as events. rtol must lie in (1e-12, 1e-2). Throws StepUnderflow.
[[nodiscard]] OdeTrajectory solve_ode_numeric(const OsgoodFamily& family, double v0,
                                              double horizon, double rtol);

/// Numerically integrated time to reach `level` from v0.
[[nodiscard]] double numeric_time_to_reach(const OsgoodFamily& family, double v0, double level,
                                           double rtol);

}  // namespace osgood
