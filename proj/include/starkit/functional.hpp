#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "starkit/space.hpp"

namespace starkit {
namespace boundary {

using spaces::BoundaryPointRef;
using spaces::ModelSpace;
using spaces::PointRef;

// A metric functional h with h(basepoint) = 0: either the normalized distance
// to an inner point, a closed-form Busemann function, or a limit sampled along
// a divergent sequence. Values are immutable after construction.
struct MetricFunctional {
  enum class Variant { InnerPoint, Busemann, SampledLimit };
  Variant variant = Variant::InnerPoint;
  PointRef anchor;                 // InnerPoint
  BoundaryPointRef ideal;          // Busemann
  std::vector<PointRef> sequence;  // SampledLimit
  std::size_t tail_begin = 0;      // first index of the averaging window
  PointRef basepoint;
};

double evaluate(const ModelSpace& space, const MetricFunctional& h, const PointRef& y);

// h_x(y) = d(y,x) - d(basepoint,x).
MetricFunctional metric_functional_of_point(const ModelSpace& space, const PointRef& x,
                                            const PointRef& basepoint);

// Closed-form Busemann functions. Supported: disk, ball, normed l2 (linear
// form of the visual direction), half-plane (via the Cayley chart). The
// basepoint must be the space's convention basepoint.
MetricFunctional busemann(const ModelSpace& space, const BoundaryPointRef& xi);
bool has_closed_form_busemann(const ModelSpace& space);

struct HorofunctionDiagnostic {
  bool escaping = false;        // d(basepoint, x_n) grows along the sequence
  double max_oscillation = 0.0; // max over probes of tail oscillation of h_{x_n}
  bool converged = false;       // max_oscillation <= tol
};

// Tail-averaged limit of h_{x_n} over the given probes. A bounded sequence
// yields an InnerPoint functional at the cluster point with escaping = false.
std::pair<MetricFunctional, HorofunctionDiagnostic>
approx_horofunction(const ModelSpace& space, const std::vector<PointRef>& sequence,
                    const std::vector<PointRef>& probes, double tol);

// Default probe set: quasi-random interior points plus the basepoint.
std::vector<PointRef> default_probes(const ModelSpace& space, int count);

struct Horoball {
  MetricFunctional functional;
  double level = 0.0;
};

bool horoball_membership(const ModelSpace& space, const Horoball& hb, const PointRef& y);

struct DualStarReport {
  int tested = 0;
  int in_closure = 0;
  int certified = 0;
  int inconclusive = 0;
  std::vector<BoundaryPointRef> counterexamples; // in closure but star test says NonMember
  double certified_fraction = 0.0;
};

// Prop. "horoball closure meets the boundary only inside the dual star":
// for each sampled boundary point in the closure of {h_xi <= C}, certify
// xi in S(eta) through the star machinery.
DualStarReport horoball_dualstar_check(const ModelSpace& space, const BoundaryPointRef& xi,
                                       double level,
                                       const std::vector<BoundaryPointRef>& boundary_samples,
                                       long budget);

} // namespace boundary
} // namespace starkit
