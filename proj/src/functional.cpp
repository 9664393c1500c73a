#include "starkit/functional.hpp"

#include <algorithm>
#include <cmath>

#include "starkit/rng.hpp"
#include "starkit/stars.hpp"

namespace starkit {
namespace boundary {

using starkit::Complex;
using starkit::CVec;
using starkit::RVec;
using spaces::SpaceKind;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(msg); }

void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

double busemann_value(const ModelSpace& space, const BoundaryPointRef& xi,
                      const PointRef& y) {
  switch (space.kind) {
    case SpaceKind::PoincareDisk: {
      const Complex z = y.cz[0];
      const Complex b = xi.cz[0];
      return space.scale * 0.5 * std::log(std::norm(b - z) / (1.0 - std::norm(z)));
    }
    case SpaceKind::KobayashiBall: {
      const Complex ip = spaces::cdot(y.cz, xi.cz);
      const double nz = spaces::cnorm(y.cz);
      return space.scale * 0.5 * std::log(std::norm(1.0 - ip) / (1.0 - nz * nz));
    }
    case SpaceKind::NormedSpace: {
      require(space.norm_kind == spaces::NormKind::L2,
              "closed-form Busemann functions require the l2 norm");
      double ip = 0.0;
      for (std::size_t i = 0; i < y.xz.size(); ++i) ip += y.xz[i] * xi.xz[i];
      return -space.scale * ip;
    }
    case SpaceKind::TorusTeichmueller: {
      const Complex z = y.cz[0];
      if (xi.at_infinity) return -space.scale * 0.5 * std::log(z.imag());
      const double zeta = xi.cz[0].real();
      return space.scale * 0.5 *
             std::log(std::norm(z - zeta) / ((1.0 + zeta * zeta) * z.imag()));
    }
    default:
      fail(std::string("no closed-form Busemann function for ") +
           spaces::kind_name(space.kind));
  }
}

} // namespace

bool has_closed_form_busemann(const ModelSpace& space) {
  switch (space.kind) {
    case SpaceKind::PoincareDisk:
    case SpaceKind::KobayashiBall:
    case SpaceKind::TorusTeichmueller:
      return true;
    case SpaceKind::NormedSpace:
      return space.norm_kind == spaces::NormKind::L2;
    default:
      return false;
  }
}

double evaluate(const ModelSpace& space, const MetricFunctional& h, const PointRef& y) {
  space.check(y);
  switch (h.variant) {
    case MetricFunctional::Variant::InnerPoint:
      return distance(space, y, h.anchor) - distance(space, h.basepoint, h.anchor);
    case MetricFunctional::Variant::Busemann:
      return busemann_value(space, h.ideal, y);
    case MetricFunctional::Variant::SampledLimit: {
      double sum = 0.0;
      int count = 0;
      for (std::size_t i = h.tail_begin; i < h.sequence.size(); ++i) {
        sum += distance(space, y, h.sequence[i]) -
               distance(space, h.basepoint, h.sequence[i]);
        ++count;
      }
      require(count > 0, "sampled-limit functional has an empty tail window");
      return sum / count;
    }
  }
  fail("unreachable functional variant");
}

MetricFunctional metric_functional_of_point(const ModelSpace& space, const PointRef& x,
                                            const PointRef& basepoint) {
  space.check(x);
  space.check(basepoint);
  MetricFunctional h;
  h.variant = MetricFunctional::Variant::InnerPoint;
  h.anchor = x;
  h.basepoint = basepoint;
  return h;
}

MetricFunctional busemann(const ModelSpace& space, const BoundaryPointRef& xi) {
  space.check(xi);
  require(has_closed_form_busemann(space),
          std::string("no closed-form Busemann function for ") +
              spaces::kind_name(space.kind) + "; use approx_horofunction");
  MetricFunctional h;
  h.variant = MetricFunctional::Variant::Busemann;
  h.ideal = xi;
  h.basepoint = space.basepoint;
  return h;
}

std::vector<PointRef> default_probes(const ModelSpace& space, int count) {
  std::vector<PointRef> probes{space.basepoint};
  CounterRng rng(0x50B35, static_cast<std::uint64_t>(space.id));
  while (static_cast<int>(probes.size()) < count + 1) {
    switch (space.kind) {
      case SpaceKind::PoincareDisk: {
        const Complex z(rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9));
        if (std::abs(z) < 0.9) probes.push_back(space.point(z));
        break;
      }
      case SpaceKind::KobayashiBall: {
        CVec z(space.dim);
        for (auto& c : z) c = Complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6));
        if (spaces::cnorm(z) < 0.9) probes.push_back(space.point(z));
        break;
      }
      case SpaceKind::Polydisc: {
        CVec z(space.dim);
        for (auto& c : z) c = Complex(rng.uniform(-0.65, 0.65), rng.uniform(-0.65, 0.65));
        probes.push_back(space.point(z));
        break;
      }
      case SpaceKind::NormedSpace: {
        RVec x(space.dim);
        for (auto& v : x) v = rng.uniform(-5.0, 5.0);
        probes.push_back(space.point(x));
        break;
      }
      case SpaceKind::TorusTeichmueller:
        probes.push_back(space.point(Complex(rng.uniform(-1.0, 1.0), rng.uniform(0.4, 2.5))));
        break;
      case SpaceKind::HilbertPolytope: {
        RVec x(space.dim, 0.0);
        double total = 0.0;
        std::vector<double> w(space.vertices.size());
        for (auto& wi : w) {
          wi = rng.uniform(0.1, 1.0);
          total += wi;
        }
        for (std::size_t i = 0; i < space.vertices.size(); ++i)
          for (int j = 0; j < space.dim; ++j)
            x[j] += (w[i] / total) * space.vertices[i][j];
        probes.push_back(space.point(x));
        break;
      }
      case SpaceKind::FiniteGraph:
        probes.push_back(space.point_vertex(rng.uniform_int(0, space.graph.n - 1)));
        break;
    }
  }
  return probes;
}

std::pair<MetricFunctional, HorofunctionDiagnostic>
approx_horofunction(const ModelSpace& space, const std::vector<PointRef>& sequence,
                    const std::vector<PointRef>& probes, double tol) {
  require(!sequence.empty(), "approx_horofunction needs a nonempty sequence");
  for (const auto& p : sequence) space.check(p);
  const std::size_t n = sequence.size();
  const std::size_t tail = n / 2; // averaging window: last half

  std::vector<double> depth(n);
  for (std::size_t i = 0; i < n; ++i)
    depth[i] = distance(space, space.basepoint, sequence[i]);
  double early = 0.0, late = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < (n + 3) / 4) early = std::max(early, depth[i]);
    if (i >= n - (n + 3) / 4) late = std::max(late, depth[i]);
  }
  HorofunctionDiagnostic diag;
  diag.escaping = n >= 4 && late > early + 0.5 && depth.back() > 1.0;

  auto oscillation = [&](const PointRef& probe) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = tail; i < n; ++i) {
      const double v = distance(space, probe, sequence[i]) - depth[i];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi - lo;
  };

  if (!diag.escaping) {
    MetricFunctional h = metric_functional_of_point(space, sequence.back(), space.basepoint);
    for (const auto& probe : probes)
      diag.max_oscillation = std::max(diag.max_oscillation, oscillation(probe));
    diag.converged = false;
    return {h, diag};
  }

  MetricFunctional h;
  h.variant = MetricFunctional::Variant::SampledLimit;
  h.sequence = sequence;
  h.tail_begin = tail;
  h.basepoint = space.basepoint;
  for (const auto& probe : probes)
    diag.max_oscillation = std::max(diag.max_oscillation, oscillation(probe));
  diag.converged = diag.max_oscillation <= tol;
  return {h, diag};
}

bool horoball_membership(const ModelSpace& space, const Horoball& hb, const PointRef& y) {
  return evaluate(space, hb.functional, y) <= hb.level + 1e-12;
}

namespace {

// Radial approach toward a boundary point at a given metric depth, for the
// spaces with closed-form Busemann functions.
PointRef approach_boundary(const ModelSpace& space, const BoundaryPointRef& xi, double depth) {
  const double t = std::tanh(depth / space.scale);
  switch (space.kind) {
    case SpaceKind::PoincareDisk:
      return space.point(t * xi.cz[0]);
    case SpaceKind::KobayashiBall: {
      CVec z(xi.cz.size());
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = t * xi.cz[i];
      return space.point(z);
    }
    case SpaceKind::NormedSpace: {
      RVec x(xi.xz.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = (depth / space.scale) * xi.xz[i];
      return space.point(x);
    }
    default:
      fail("horoball closure probing needs a closed-form Busemann space");
  }
}

} // namespace

DualStarReport horoball_dualstar_check(const ModelSpace& space, const BoundaryPointRef& xi,
                                       double level,
                                       const std::vector<BoundaryPointRef>& boundary_samples,
                                       long budget) {
  space.check(xi);
  const MetricFunctional h = busemann(space, xi);
  DualStarReport report;
  stars::SearchBudget star_budget;
  star_budget.max_distance_evals = budget;
  for (const auto& eta : boundary_samples) {
    space.check(eta);
    ++report.tested;
    bool in_closure = true;
    for (double depth : {4.0, 6.0, 8.0}) {
      const PointRef p = approach_boundary(space, eta, depth);
      if (evaluate(space, h, p) > level + 1e-9) {
        in_closure = false;
        break;
      }
    }
    if (!in_closure) continue;
    ++report.in_closure;
    const auto verdict = stars::dual_star_test(space, xi, eta, star_budget);
    if (verdict.outcome == stars::Outcome::Member) {
      ++report.certified;
    } else if (verdict.outcome == stars::Outcome::Inconclusive) {
      ++report.inconclusive;
    } else {
      report.counterexamples.push_back(eta);
    }
  }
  report.certified_fraction =
      report.in_closure > 0 ? static_cast<double>(report.certified) / report.in_closure : 1.0;
  return report;
}

} // namespace boundary
} // namespace starkit
