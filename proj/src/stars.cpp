#include "starkit/stars.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "starkit/rng.hpp"

namespace starkit {
namespace stars {

using starkit::Complex;
using starkit::CVec;
using spaces::NormKind;
using starkit::RVec;
using spaces::SpaceKind;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Decision thresholds of the sequence-criterion search, frozen against the
// model-space oracles. All are metric quantities, so a global rescale moves
// gaps, products and the C sweep together and verdicts stay put.
constexpr double kGrowthFloor = 1.0;   // last gap must clear this to count as divergence
constexpr double kGrowthTotal = 0.75;  // required growth over the last four scales
constexpr double kGrowthStep = 0.1;    // required growth of each of the last three deltas
constexpr double kProductSlack = 0.25; // allowed late increase of the Gromov product
constexpr double kMarginOverC = 1.0;   // clearance above c_max for the margin certificate
constexpr double kDepthSpread = 64.0;  // sampled depth range above the scale floor

const double kCSweep[] = {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};

[[noreturn]] void fail(const std::string& msg) { throw Error(msg); }

void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

bool boundary_supported(const ModelSpace& s) {
  switch (s.kind) {
    case SpaceKind::PoincareDisk:
    case SpaceKind::KobayashiBall:
    case SpaceKind::Polydisc:
    case SpaceKind::HilbertPolytope:
    case SpaceKind::NormedSpace:
      return true;
    default:
      return false;
  }
}

void require_boundary(const ModelSpace& s) {
  require(boundary_supported(s),
          std::string("no boundary chart for ") + spaces::kind_name(s.kind));
}

bool is_visual(const ModelSpace& s) { return s.kind == SpaceKind::NormedSpace; }

RVec extrinsic_coords(const CVec& cz, const RVec& xz) {
  if (cz.empty()) return xz;
  RVec out;
  out.reserve(2 * cz.size());
  for (const auto& c : cz) {
    out.push_back(c.real());
    out.push_back(c.imag());
  }
  return out;
}

double l2_angle(const RVec& a, const RVec& b) {
  double ip = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ip += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double c = ip / std::sqrt(na * nb);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

PointRef try_point(const ModelSpace& s, const CVec& cz, const RVec& xz, bool& ok) {
  ok = true;
  try {
    if (!cz.empty()) return s.point(cz);
    return s.point(xz);
  } catch (const Error&) {
    ok = false;
    return s.basepoint;
  }
}

// Random interior points spread across the space, used for halfspace sampling
// and isometry validation.
std::vector<PointRef> interior_samples(const ModelSpace& s, int count, std::uint64_t seed) {
  CounterRng rng(seed, CounterRng::mix(static_cast<std::uint64_t>(s.id) + 5));
  std::vector<PointRef> out;
  int guard = 0;
  while (static_cast<int>(out.size()) < count && guard++ < 300 * count) {
    bool ok = false;
    PointRef p = s.basepoint;
    switch (s.kind) {
      case SpaceKind::PoincareDisk: {
        const Complex z(rng.uniform(-0.995, 0.995), rng.uniform(-0.995, 0.995));
        if (std::abs(z) >= 0.995) continue;
        p = try_point(s, {z}, {}, ok);
        break;
      }
      case SpaceKind::KobayashiBall: {
        CVec z(s.dim);
        for (auto& c : z) c = Complex(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8));
        if (spaces::cnorm(z) >= 0.99) continue;
        p = try_point(s, z, {}, ok);
        break;
      }
      case SpaceKind::Polydisc: {
        CVec z(s.dim);
        for (auto& c : z) c = Complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7));
        p = try_point(s, z, {}, ok);
        break;
      }
      case SpaceKind::HilbertPolytope: {
        RVec x(s.dim, 0.0);
        double total = 0.0;
        std::vector<double> w(s.vertices.size());
        for (auto& wi : w) {
          wi = rng.uniform(0.02, 1.0);
          total += wi;
        }
        for (std::size_t i = 0; i < s.vertices.size(); ++i)
          for (int j = 0; j < s.dim; ++j) x[j] += (w[i] / total) * s.vertices[i][j];
        p = try_point(s, {}, x, ok);
        break;
      }
      case SpaceKind::NormedSpace: {
        RVec x(s.dim);
        for (auto& v : x) v = rng.uniform(-8.0, 8.0);
        p = try_point(s, {}, x, ok);
        break;
      }
      case SpaceKind::TorusTeichmueller: {
        p = try_point(s, {Complex(rng.uniform(-2.0, 2.0), rng.uniform(0.2, 3.0))}, {}, ok);
        break;
      }
      case SpaceKind::FiniteGraph: {
        p = s.point_vertex(rng.uniform_int(0, s.graph.n - 1));
        ok = true;
        break;
      }
    }
    if (ok) out.push_back(p);
  }
  return out;
}

// Rotate the unit direction `from` toward `toward` by the given angle (l2).
BoundaryPointRef tilt_direction(const ModelSpace& s, const BoundaryPointRef& from,
                                const BoundaryPointRef& toward, double angle) {
  const RVec& a = from.xz;
  const RVec& b = toward.xz;
  double ip = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ip += a[i] * b[i];
  RVec t(a.size());
  double tn = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    t[i] = b[i] - ip * a[i];
    tn += t[i] * t[i];
  }
  tn = std::sqrt(tn);
  if (tn < 1e-12) return from;
  RVec dir(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    dir[i] = std::cos(angle) * a[i] + std::sin(angle) * t[i] / tn;
  return s.boundary_point(dir);
}

} // namespace

// ---------------------------------------------------------------------------
// boundary chart
// ---------------------------------------------------------------------------

std::vector<BoundaryPointRef> boundary_mesh(const ModelSpace& s, int count,
                                            std::uint64_t seed) {
  require_boundary(s);
  std::vector<BoundaryPointRef> out;
  CounterRng rng(seed, static_cast<std::uint64_t>(s.id));
  switch (s.kind) {
    case SpaceKind::PoincareDisk: {
      for (int i = 0; i < count; ++i) {
        const double a = 2.0 * M_PI * i / count;
        out.push_back(s.boundary_point(Complex(std::cos(a), std::sin(a))));
      }
      break;
    }
    case SpaceKind::KobayashiBall:
    case SpaceKind::NormedSpace: {
      const int n = s.kind == SpaceKind::KobayashiBall ? 2 * s.dim : s.dim;
      while (static_cast<int>(out.size()) < count) {
        RVec v(n);
        double norm = 0.0;
        for (auto& c : v) {
          c = rng.gauss();
          norm += c * c;
        }
        norm = std::sqrt(norm);
        if (norm < 1e-9) continue;
        for (auto& c : v) c /= norm;
        if (s.kind == SpaceKind::NormedSpace) {
          out.push_back(s.boundary_point(v));
        } else {
          CVec z(s.dim);
          for (int i = 0; i < s.dim; ++i) z[i] = Complex(v[2 * i], v[2 * i + 1]);
          out.push_back(s.boundary_point(z));
        }
      }
      break;
    }
    case SpaceKind::Polydisc: {
      while (static_cast<int>(out.size()) < count) {
        CVec z(s.dim);
        for (auto& c : z) {
          const double a = rng.uniform(0.0, 2.0 * M_PI);
          const double r = rng.next_double() < 0.5 ? 1.0 : rng.uniform(0.2, 0.8);
          c = r * Complex(std::cos(a), std::sin(a));
        }
        bool any_unit = false;
        for (const auto& c : z) any_unit |= std::abs(std::abs(c) - 1.0) < 1e-12;
        if (!any_unit) continue;
        out.push_back(s.boundary_point(z));
      }
      break;
    }
    case SpaceKind::HilbertPolytope: {
      const RVec u0 = s.to_intrinsic(s.basepoint.xz);
      const int k = s.intrinsic_dim();
      while (static_cast<int>(out.size()) < count) {
        RVec dir(k);
        double norm = 0.0;
        for (auto& c : dir) {
          c = rng.gauss();
          norm += c * c;
        }
        if (norm < 1e-12) continue;
        double tmax = kInf;
        for (const auto& f : s.facets) {
          double a = 0.0, b = -f.offset;
          for (int j = 0; j < k; ++j) {
            a += f.normal[j] * dir[j];
            b += f.normal[j] * u0[j];
          }
          if (a < -1e-15) tmax = std::min(tmax, -b / a);
        }
        if (!std::isfinite(tmax)) continue;
        RVec u(k);
        for (int j = 0; j < k; ++j) u[j] = u0[j] + tmax * dir[j];
        out.push_back(s.boundary_point(s.to_ambient(u)));
      }
      break;
    }
    default:
      break;
  }
  return out;
}

double boundary_separation(const ModelSpace& s, const BoundaryPointRef& a,
                           const BoundaryPointRef& b) {
  require_boundary(s);
  s.check(a);
  s.check(b);
  if (is_visual(s)) return l2_angle(a.xz, b.xz);
  return spaces::euclid(extrinsic_coords(a.cz, a.xz), extrinsic_coords(b.cz, b.xz));
}

PointRef approach_point(const ModelSpace& s, const BoundaryPointRef& xi, double depth) {
  require_boundary(s);
  s.check(xi);
  const double d = depth / s.scale;
  switch (s.kind) {
    case SpaceKind::PoincareDisk:
      return s.point(std::min(std::tanh(d), 1.0 - 1e-16) * xi.cz[0]);
    case SpaceKind::KobayashiBall:
    case SpaceKind::Polydisc: {
      CVec z(xi.cz.size());
      const double t = std::min(std::tanh(d), 1.0 - 1e-16);
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = t * xi.cz[i];
      return s.point(z);
    }
    case SpaceKind::NormedSpace: {
      RVec x(xi.xz.size());
      const double gauge = spaces::rnorm(xi.xz, s.norm_kind);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = (d / gauge) * xi.xz[i];
      return s.point(x);
    }
    case SpaceKind::HilbertPolytope: {
      const RVec u0 = s.to_intrinsic(s.basepoint.xz);
      const RVec ub = s.to_intrinsic(xi.xz);
      const int k = s.intrinsic_dim();
      double tmin = -kInf, tmax = kInf;
      for (const auto& f : s.facets) {
        double a = 0.0, b = -f.offset;
        for (int j = 0; j < k; ++j) {
          a += f.normal[j] * (ub[j] - u0[j]);
          b += f.normal[j] * u0[j];
        }
        if (std::abs(a) < 1e-15) continue;
        const double t = -b / a;
        if (a > 0)
          tmin = std::max(tmin, t);
        else
          tmax = std::min(tmax, t);
      }
      const double big_a = -tmin; // back-wall distance in chord units
      const double big_b = tmax;  // forward exit, 1 at xi up to roundoff
      const double e2s = std::exp(2.0 * std::min(d, 30.0));
      double t = big_a * big_b * (e2s - 1.0) / (big_b + big_a * e2s);
      t = std::min(t, big_b - 1e-11 * std::max(1.0, big_b));
      RVec u(k);
      for (int j = 0; j < k; ++j) u[j] = u0[j] + t * (ub[j] - u0[j]);
      return s.point(s.to_ambient(u));
    }
    default:
      fail("approach_point: unsupported space");
  }
}

bool neighborhood_contains(const ModelSpace& s, const Neighborhood& n, const PointRef& p) {
  s.check(p);
  s.check(n.center);
  if (is_visual(s)) {
    const double norm = spaces::rnorm(p.xz, NormKind::L2);
    if (norm < 1.0 / n.radius) return false;
    return l2_angle(p.xz, n.center.xz) <= n.radius;
  }
  return spaces::euclid(extrinsic_coords(p.cz, p.xz),
                        extrinsic_coords(n.center.cz, n.center.xz)) <= n.radius;
}

std::vector<PointRef> neighborhood_mesh(const ModelSpace& s, const Neighborhood& n,
                                        int count, std::uint64_t seed) {
  require_boundary(s);
  CounterRng rng(seed, CounterRng::mix(static_cast<std::uint64_t>(s.id) + 77));
  std::vector<PointRef> out;
  int guard = 0;
  while (static_cast<int>(out.size()) < count && guard++ < 400 * count) {
    bool ok = false;
    PointRef p = s.basepoint;
    if (is_visual(s)) {
      const double m = 1.0 / n.radius;
      const double depth = m * std::exp(rng.uniform(0.0, std::log(kDepthSpread)));
      RVec dir = n.center.xz;
      for (auto& c : dir) c += rng.gauss() * n.radius * 0.5;
      const double norm = spaces::rnorm(dir, NormKind::L2);
      if (norm < 1e-12) continue;
      for (auto& c : dir) c = c / norm * depth;
      if (l2_angle(dir, n.center.xz) > n.radius) continue;
      p = try_point(s, {}, dir, ok);
    } else if (s.kind == SpaceKind::HilbertPolytope) {
      const RVec uc = s.to_intrinsic(n.center.xz);
      RVec u(uc.size());
      for (std::size_t j = 0; j < u.size(); ++j)
        u[j] = uc[j] + rng.uniform(-n.radius, n.radius);
      if (s.facet_clearance(u) <= 1e-13) continue;
      const RVec amb = s.to_ambient(u);
      if (spaces::euclid(amb, n.center.xz) > n.radius) continue;
      p = try_point(s, {}, amb, ok);
    } else {
      CVec z(n.center.cz.size());
      for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = n.center.cz[i] +
               Complex(rng.uniform(-n.radius, n.radius), rng.uniform(-n.radius, n.radius));
      p = try_point(s, z, {}, ok);
      if (ok && !neighborhood_contains(s, n, p)) ok = false;
    }
    if (ok && neighborhood_contains(s, n, p)) out.push_back(p);
  }
  return out;
}

BoundaryPointRef snap_to_boundary(const ModelSpace& s, const CVec& cz, const RVec& xz) {
  require_boundary(s);
  switch (s.kind) {
    case SpaceKind::PoincareDisk: {
      require(std::abs(cz[0]) > 1e-12, "cannot snap the origin to the circle");
      return s.boundary_point(cz[0] / std::abs(cz[0]));
    }
    case SpaceKind::KobayashiBall: {
      const double n = spaces::cnorm(cz);
      require(n > 1e-12, "cannot snap the origin to the sphere");
      CVec z = cz;
      for (auto& c : z) c /= n;
      return s.boundary_point(z);
    }
    case SpaceKind::Polydisc: {
      CVec z = cz;
      double best = 0.0;
      for (auto& c : z) best = std::max(best, std::abs(c));
      require(best > 1e-12, "cannot snap the polydisc center");
      for (auto& c : z) {
        const double m = std::abs(c);
        if (m >= best - 1e-6 && m > 1e-12)
          c /= m;
        else if (m > 1.0)
          c /= m;
      }
      return s.boundary_point(z);
    }
    case SpaceKind::NormedSpace:
      return s.boundary_point(xz);
    case SpaceKind::HilbertPolytope: {
      const RVec u0 = s.to_intrinsic(s.basepoint.xz);
      const RVec u = s.to_intrinsic(xz);
      const int k = s.intrinsic_dim();
      double tmax = kInf;
      for (const auto& f : s.facets) {
        double a = 0.0, b = -f.offset;
        for (int j = 0; j < k; ++j) {
          a += f.normal[j] * (u[j] - u0[j]);
          b += f.normal[j] * u0[j];
        }
        if (a < -1e-15) tmax = std::min(tmax, -b / a);
      }
      require(std::isfinite(tmax), "cannot snap: direction never exits the polytope");
      RVec ub(k);
      for (int j = 0; j < k; ++j) ub[j] = u0[j] + tmax * (u[j] - u0[j]);
      return s.boundary_point(s.to_ambient(ub));
    }
    default:
      fail("snap_to_boundary: unsupported space");
  }
}

// ---------------------------------------------------------------------------
// halfspaces
// ---------------------------------------------------------------------------

bool halfspace_membership(const ModelSpace& space, const PointRef& basepoint,
                          const std::vector<PointRef>& witness_set, double constant,
                          const PointRef& z) {
  require(!witness_set.empty(), "halfspace needs a nonempty witness set");
  double dw = kInf;
  for (const auto& w : witness_set) dw = std::min(dw, distance(space, z, w));
  return dw <= distance(space, z, basepoint) + constant + 1e-12;
}

// ---------------------------------------------------------------------------
// the sequence-criterion search
// ---------------------------------------------------------------------------

namespace {

struct SearchState {
  const ModelSpace& s;
  PointRef base;
  long evals = 0;
  long max_evals = 0;

  double dist(const PointRef& a, const PointRef& b) {
    ++evals;
    return distance(s, a, b);
  }
};

struct Candidate {
  PointRef x, y;
  double gap = kInf;    // d(y,x) - d(y,x0)
  double product = 0.0; // Gromov product (x|y)_{x0}
};

void score(SearchState& st, Candidate& c) {
  const double dxy = st.dist(c.y, c.x);
  const double dy0 = st.dist(c.y, st.base);
  const double dx0 = st.dist(c.x, st.base);
  c.gap = dxy - dy0;
  c.product = 0.5 * (dx0 + dy0 - dxy);
}

// Radial point at a prescribed extrinsic distance from xi (bisected on depth).
PointRef approach_point_at_radius(const ModelSpace& s, const BoundaryPointRef& xi,
                                  double radius) {
  double lo = 0.0, hi = 60.0 * s.scale;
  const RVec target = extrinsic_coords(xi.cz, xi.xz);
  PointRef best = approach_point(s, xi, hi);
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    const PointRef p = approach_point(s, xi, mid);
    if (spaces::euclid(extrinsic_coords(p.cz, p.xz), target) > radius) {
      lo = mid;
    } else {
      hi = mid;
      best = p;
    }
  }
  return best;
}

double depth_floor(const ModelSpace& s, const BoundaryPointRef& xi, double radius) {
  if (is_visual(s)) return s.scale / radius;
  return distance(s, s.basepoint, approach_point_at_radius(s, xi, radius));
}

PointRef perturb(const ModelSpace& s, const PointRef& p, const Neighborhood& n,
                 double radius, CounterRng& rng) {
  bool ok = false;
  PointRef q = p;
  if (is_visual(s)) {
    RVec x = p.xz;
    const double stretch = std::exp(rng.gauss() * 0.35);
    const double norm = spaces::rnorm(x, NormKind::L2);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = x[i] * stretch + rng.gauss() * 0.2 * radius * norm;
    q = try_point(s, {}, x, ok);
  } else if (s.kind == SpaceKind::HilbertPolytope) {
    RVec u = s.to_intrinsic(p.xz);
    for (auto& c : u) c += rng.gauss() * 0.3 * radius;
    if (s.facet_clearance(u) <= 1e-13) return p;
    q = try_point(s, {}, s.to_ambient(u), ok);
  } else {
    CVec z = p.cz;
    for (auto& c : z) c += Complex(rng.gauss(), rng.gauss()) * 0.3 * radius;
    q = try_point(s, z, {}, ok);
  }
  if (!ok || !neighborhood_contains(s, n, q)) return p;
  return q;
}

std::vector<Candidate> seed_pairs(SearchState& st, const Neighborhood& nx,
                                  const Neighborhood& ny) {
  const ModelSpace& s = st.s;
  std::vector<Candidate> out;
  auto push = [&](const PointRef& x, const PointRef& y) {
    if (!neighborhood_contains(s, nx, x) || !neighborhood_contains(s, ny, y)) return;
    out.push_back(Candidate{x, y, kInf, 0.0});
  };

  const double fx = depth_floor(s, nx.center, nx.radius);
  const double fy = depth_floor(s, ny.center, ny.radius);
  if (is_visual(s)) {
    const std::vector<double> mult{1.0, 4.0, 16.0, kDepthSpread};
    for (double mx : mult)
      for (double my : mult)
        push(approach_point(s, nx.center, fx * mx), approach_point(s, ny.center, fy * my));
    for (double w : {0.5, 1.0}) {
      const BoundaryPointRef tx = tilt_direction(s, nx.center, ny.center, w * nx.radius);
      const BoundaryPointRef ty = tilt_direction(s, ny.center, nx.center, w * ny.radius);
      for (double mx : mult)
        for (double my : mult) {
          push(approach_point(s, tx, fx * mx), approach_point(s, ny.center, fy * my));
          push(approach_point(s, nx.center, fx * mx), approach_point(s, ty, fy * my));
        }
      // the constrained gap minimizer sits at partner depth ~ s / (w r^2)
      const double deep_y = std::min(fx * 10.0 / (w * ny.radius * ny.radius), 1e13);
      const double deep_x = std::min(fy * 10.0 / (w * nx.radius * nx.radius), 1e13);
      push(approach_point(s, tx, fx), approach_point(s, ny.center, deep_y));
      push(approach_point(s, nx.center, fy), approach_point(s, ty, deep_x));
    }
  } else {
    const std::vector<double> bumps{0.0, 0.3, 0.7, 1.4};
    for (double bx : bumps)
      for (double by : bumps)
        push(approach_point(s, nx.center, fx + bx), approach_point(s, ny.center, fy + by));
  }
  for (auto& c : out) score(st, c);
  return out;
}

struct ScaleRecord {
  double radius = 0.0;
  double gap_min = kInf;
  double product_max = 0.0;
  Candidate best;
};

ScaleRecord run_scale(SearchState& st, const BoundaryPointRef& xi, const BoundaryPointRef& eta,
                      double radius, const SearchBudget& budget, std::uint64_t stream) {
  const ModelSpace& s = st.s;
  ScaleRecord rec;
  rec.radius = radius;
  const Neighborhood nx{xi, radius}, ny{eta, radius};

  for (auto& c : seed_pairs(st, nx, ny)) {
    if (c.gap < rec.gap_min) {
      rec.gap_min = c.gap;
      rec.best = c;
    }
    rec.product_max = std::max(rec.product_max, c.product);
  }

  CounterRng rng(budget.seed, stream);
  const auto xs = neighborhood_mesh(s, nx, budget.restarts, CounterRng::mix(stream + 1));
  const auto ys = neighborhood_mesh(s, ny, budget.restarts, CounterRng::mix(stream + 2));
  const int restarts = static_cast<int>(std::min(xs.size(), ys.size()));
  for (int r = 0; r < restarts; ++r) {
    if (st.evals >= st.max_evals) break;
    Candidate cur{xs[r], ys[r], kInf, 0.0};
    score(st, cur);
    rec.product_max = std::max(rec.product_max, cur.product);
    for (int step = 0; step < budget.steps && st.evals < st.max_evals; ++step) {
      Candidate next{perturb(s, cur.x, nx, radius, rng), perturb(s, cur.y, ny, radius, rng),
                     kInf, 0.0};
      score(st, next);
      rec.product_max = std::max(rec.product_max, next.product);
      if (next.gap < cur.gap) cur = next;
    }
    if (cur.gap < rec.gap_min) {
      rec.gap_min = cur.gap;
      rec.best = cur;
    }
  }
  return rec;
}

bool positive_growth(const std::vector<ScaleRecord>& recs) {
  const std::size_t k = recs.size();
  const double g1 = recs[k - 1].gap_min, g2 = recs[k - 2].gap_min;
  const double g3 = recs[k - 3].gap_min, g4 = recs[k - 4].gap_min;
  return g1 >= kGrowthFloor && (g1 - g4) >= kGrowthTotal &&
         std::min({g1 - g2, g2 - g3, g3 - g4}) >= kGrowthStep;
}

} // namespace

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Member: return "member";
    case Outcome::NonMember: return "non_member";
    case Outcome::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

StarVerdict star_test(const ModelSpace& space, const BoundaryPointRef& xi,
                      const BoundaryPointRef& eta, const SearchBudget& budget) {
  require_boundary(space);
  space.check(xi);
  space.check(eta);

  StarVerdict v;
  const double sep = boundary_separation(space, xi, eta);
  if (sep < 1e-12) {
    v.outcome = Outcome::Member; // xi belongs to its own star
    v.constant = 0.0;
    return v;
  }

  SearchState st{space, space.basepoint};
  st.max_evals = budget.max_distance_evals;

  const double r0 = std::min(budget.initial_radius, sep / 4.0);
  std::vector<ScaleRecord> recs;
  const std::uint64_t pair_stream =
      CounterRng::mix(static_cast<std::uint64_t>(space.id) * 31 +
                      static_cast<std::uint64_t>(sep * 1e9));

  auto flush_diagnostics = [&]() {
    v.gap_minima.clear();
    v.gromov_max.clear();
    v.radii.clear();
    for (const auto& r : recs) {
      v.gap_minima.push_back(r.gap_min);
      v.gromov_max.push_back(r.product_max);
      v.radii.push_back(r.radius);
    }
    v.evals_spent = st.evals;
  };

  int k = 0;
  while (k < budget.max_scales) {
    const double radius = r0 * std::pow(budget.radius_factor, k);
    recs.push_back(run_scale(st, xi, eta, radius, budget, pair_stream + 131 * k));
    ++k;
    if (k < budget.scales) continue;
    flush_diagnostics();

    if (!positive_growth(recs)) {
      double worst = -kInf;
      for (const auto& r : recs) worst = std::max(worst, r.gap_min);
      for (double c : kCSweep) {
        if (worst <= c && c <= budget.c_max) {
          v.outcome = Outcome::Member;
          v.constant = c;
          for (const auto& r : recs) {
            v.witness_x.push_back(r.best.x);
            v.witness_y.push_back(r.best.y);
          }
          return v;
        }
      }
      v.outcome = Outcome::Inconclusive; // bounded but above the sweep
      return v;
    }

    const std::size_t n = recs.size();
    double product_early = 0.0, product_late = 0.0, product_all = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      product_all = std::max(product_all, recs[i].product_max);
      if (i + 2 < n)
        product_early = std::max(product_early, recs[i].product_max);
      else
        product_late = std::max(product_late, recs[i].product_max);
    }
    if (product_late <= product_early + kProductSlack) {
      v.outcome = Outcome::NonMember; // stable Gromov product: separation mechanism
      v.separation_bound = product_all;
      v.final_margin = recs.back().gap_min;
      return v;
    }
    if (recs[n - 1].gap_min >= budget.c_max + kMarginOverC &&
        recs[n - 2].gap_min >= budget.c_max + kMarginOverC &&
        recs[n - 3].gap_min >= budget.c_max + kMarginOverC) {
      v.outcome = Outcome::NonMember; // margin beyond the whole C sweep
      v.separation_bound = product_all;
      v.final_margin = recs.back().gap_min - budget.c_max;
      return v;
    }
    if (st.evals >= st.max_evals) break; // extend scales only within budget
  }

  flush_diagnostics();
  v.outcome = Outcome::Inconclusive;
  return v;
}

StarVerdict dual_star_test(const ModelSpace& space, const BoundaryPointRef& xi,
                           const BoundaryPointRef& eta, const SearchBudget& budget) {
  return star_test(space, eta, xi, budget);
}

// ---------------------------------------------------------------------------
// exact descriptions
// ---------------------------------------------------------------------------

StarDescription star_exact(const ModelSpace& space, const BoundaryPointRef& xi) {
  space.check(xi);
  StarDescription d;
  d.center = xi;
  switch (space.kind) {
    case SpaceKind::PoincareDisk:
    case SpaceKind::KobayashiBall:
      d.form = StarDescription::Form::Singleton;
      return d;
    case SpaceKind::NormedSpace:
      require(space.norm_kind == NormKind::L2,
              "exact stars on normed spaces cover the l2 norm only");
      d.form = StarDescription::Form::HalfSphere;
      return d;
    case SpaceKind::HilbertPolytope:
      d.form = StarDescription::Form::PolytopeFaceUnion;
      d.carrier_facets = xi.carrier;
      return d;
    default:
      fail(std::string("no exact star oracle for ") + spaces::kind_name(space.kind));
  }
}

bool star_exact_contains(const ModelSpace& space, const StarDescription& star,
                         const BoundaryPointRef& eta, double boundary_tol) {
  space.check(eta);
  switch (star.form) {
    case StarDescription::Form::Singleton:
      return boundary_separation(space, star.center, eta) <= boundary_tol;
    case StarDescription::Form::HalfSphere:
      return l2_angle(star.center.xz, eta.xz) <= M_PI / 2.0 + boundary_tol;
    case StarDescription::Form::PolytopeFaceUnion: {
      for (int f : star.carrier_facets)
        for (int g : eta.carrier)
          if (f == g) return true;
      return false;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// derived analyses
// ---------------------------------------------------------------------------

StarMatrix star_distance_matrix(const ModelSpace& space,
                                const std::vector<BoundaryPointRef>& samples,
                                const SearchBudget& budget) {
  require(samples.size() >= 2, "star matrix needs at least two samples");
  const int n = static_cast<int>(samples.size());
  StarMatrix m;
  m.dist.assign(n, std::vector<double>(n, kInf));
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    m.dist[i][i] = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const auto a = star_test(space, samples[i], samples[j], budget);
      Outcome combined = a.outcome;
      if (combined != Outcome::Member) {
        const auto b = star_test(space, samples[j], samples[i], budget);
        if (b.outcome == Outcome::Member)
          combined = Outcome::Member;
        else if (b.outcome == Outcome::Inconclusive || a.outcome == Outcome::Inconclusive)
          combined = Outcome::Inconclusive;
      }
      if (combined == Outcome::Member) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      } else if (combined == Outcome::Inconclusive) {
        m.upper_bound_only = true;
      }
    }
  }
  for (int src = 0; src < n; ++src) {
    std::queue<int> q;
    q.push(src);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int w : adj[u]) {
        if (m.dist[src][w] > m.dist[src][u] + 1.0) {
          m.dist[src][w] = m.dist[src][u] + 1.0;
          q.push(w);
        }
      }
    }
  }
  return m;
}

FaceReport face(const ModelSpace& space, const std::vector<BoundaryPointRef>& xis,
                const std::vector<BoundaryPointRef>& mesh, const SearchBudget& budget) {
  require(!xis.empty(), "face needs at least one star");
  FaceReport report;
  for (const auto& eta : mesh) {
    bool member_all = true;
    bool inconclusive = false;
    for (const auto& xi : xis) {
      const auto v = star_test(space, xi, eta, budget);
      if (v.outcome == Outcome::Member) continue;
      member_all = false;
      if (v.outcome == Outcome::Inconclusive) inconclusive = true;
      break;
    }
    if (member_all)
      report.certified.push_back(eta);
    else if (inconclusive)
      ++report.inconclusive;
  }
  report.possibly_empty = report.certified.empty();
  return report;
}

VisibilityResult visibility_check(const ModelSpace& space, const BoundaryPointRef& xi,
                                  const BoundaryPointRef& eta, double kappa,
                                  int samples_per_radius, const std::vector<double>& radii,
                                  std::uint64_t seed) {
  require_boundary(space);
  space.check(xi);
  space.check(eta);
  require(boundary_separation(space, xi, eta) > 1e-9, "visibility needs distinct points");
  require(!radii.empty(), "visibility_check needs at least one radius");

  VisibilityResult res;
  double overall_max = 0.0;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const Neighborhood nx{xi, radii[ri]}, ny{eta, radii[ri]};
    const auto xs =
        neighborhood_mesh(space, nx, samples_per_radius, CounterRng::mix(seed + ri));
    const auto ys =
        neighborhood_mesh(space, ny, samples_per_radius, CounterRng::mix(seed + 7 * ri + 1));
    double radius_max = 0.0;
    const int pairs = static_cast<int>(std::min(xs.size(), ys.size()));
    if (pairs == 0) return res;
    for (int i = 0; i < pairs; ++i) {
      spaces::AlmostGeodesic path;
      try {
        path = kappa > 0.0 ? spaces::almost_geodesic(space, xs[i], ys[i], kappa)
                           : spaces::geodesic(space, xs[i], ys[i]);
      } catch (const Error&) {
        return res; // inconclusive: no path construction
      }
      double min_to_base = kInf;
      const int steps = 24;
      for (int t = 0; t <= steps; ++t)
        min_to_base = std::min(
            min_to_base, distance(space, space.basepoint, path.at(path.length * t / steps)));
      radius_max = std::max(radius_max, min_to_base);
    }
    res.per_radius_min.push_back(radius_max);
    overall_max = std::max(overall_max, radius_max);
  }

  const double first = res.per_radius_min.front();
  const double last = res.per_radius_min.back();
  if (last <= first + std::max(1.0, 0.25 * first)) {
    res.kind = VisibilityResult::Kind::Visible;
    res.bound = overall_max;
  } else if (last > 2.0 * first + 1.0) {
    res.kind = VisibilityResult::Kind::Violated;
    res.bound = last;
  }
  return res;
}

GeodesicFaceReport geodesic_face_check(const ModelSpace& space, const AlmostGeodesic& ray,
                                       const std::vector<double>& times,
                                       const SearchBudget& budget) {
  require(times.size() >= 2, "geodesic_face_check needs sampled times");
  GeodesicFaceReport report;
  std::vector<PointRef> pts;
  for (double t : times) pts.push_back(ray.at(t));
  const double d_first = distance(space, space.basepoint, pts.front());
  const double d_last = distance(space, space.basepoint, pts.back());
  report.unbounded = d_last > d_first + 1.0;
  require(report.unbounded, "ray is bounded on the sampled times");

  std::vector<BoundaryPointRef> limits;
  for (std::size_t i = times.size() / 2; i < times.size(); ++i) {
    const auto b = snap_to_boundary(space, pts[i].cz, pts[i].xz);
    bool fresh = true;
    for (const auto& known : limits)
      if (boundary_separation(space, known, b) < 1e-3) fresh = false;
    if (fresh) limits.push_back(b);
  }
  report.limit_points = limits;
  for (std::size_t i = 0; i < limits.size(); ++i) {
    for (std::size_t j = 0; j < limits.size(); ++j) {
      if (i == j) continue;
      const auto v = star_test(space, limits[i], limits[j], budget);
      if (v.outcome == Outcome::Member)
        ++report.certified_pairs;
      else if (v.outcome == Outcome::Inconclusive)
        ++report.inconclusive_pairs;
      else
        ++report.contradicted_pairs;
    }
  }
  return report;
}

ContractionReport contraction_check(const ModelSpace& space, const std::vector<MapFn>& maps,
                                    const std::vector<MapFn>& inverses,
                                    const Neighborhood& v_plus, const Neighborhood& v_minus,
                                    int sample_count, std::uint64_t seed) {
  ContractionReport report;
  require(maps.size() == inverses.size() && !maps.empty(),
          "contraction_check needs maps with inverses");

  const auto probes = interior_samples(space, 24, seed);
  for (const auto& g : maps) {
    for (std::size_t i = 0; i + 1 < probes.size(); i += 2) {
      const double before = distance(space, probes[i], probes[i + 1]);
      const double after = distance(space, g(probes[i]), g(probes[i + 1]));
      if (std::abs(before - after) > 1e-7 * (1.0 + before)) {
        report.precondition_failed = true;
        report.message = "map is not an isometry on sampled pairs";
        return report;
      }
    }
  }
  const PointRef x0 = space.basepoint;
  if (!neighborhood_contains(space, v_plus, maps.back()(x0)) ||
      !neighborhood_contains(space, v_minus, inverses.back()(x0))) {
    report.precondition_failed = true;
    report.message = "basepoint orbits do not enter the prescribed neighborhoods";
    return report;
  }

  const auto minus_mesh = neighborhood_mesh(space, v_minus, 64, CounterRng::mix(seed + 3));
  const auto plus_mesh = neighborhood_mesh(space, v_plus, 64, CounterRng::mix(seed + 4));
  require(!minus_mesh.empty() && !plus_mesh.empty(), "empty neighborhood meshes");

  const auto samples = interior_samples(space, sample_count, CounterRng::mix(seed + 9));
  std::vector<PointRef> outside;
  for (const auto& z : samples)
    if (!halfspace_membership(space, x0, minus_mesh, 0.0, z)) outside.push_back(z);

  std::vector<int> bad_at(maps.size(), 0);
  for (std::size_t n = 0; n < maps.size(); ++n)
    for (const auto& z : outside)
      if (!halfspace_membership(space, x0, plus_mesh, 0.0, maps[n](z))) ++bad_at[n];

  int first_good = -1;
  for (int n = static_cast<int>(maps.size()) - 1; n >= 0; --n) {
    if (bad_at[n] == 0)
      first_good = n;
    else
      break;
  }
  report.ok = first_good >= 0;
  report.first_good_index = first_good;
  for (int n = std::max(first_good, 0); n < static_cast<int>(maps.size()); ++n)
    report.violations_after += bad_at[n];
  return report;
}

HyperbolicityScan hyperbolicity_scan(const ModelSpace& space,
                                     const std::vector<BoundaryPointRef>& points,
                                     const std::vector<BoundaryPointRef>& mesh,
                                     const SearchBudget& budget) {
  require(!points.empty(), "hyperbolicity_scan needs at least one point");
  HyperbolicityScan scan;
  int certified = 0;
  for (const auto& xi : points) {
    bool any_member = false;
    bool all_nonmember = true;
    for (const auto& eta : mesh) {
      if (boundary_separation(space, xi, eta) < 1e-9) continue;
      const auto v = star_test(space, xi, eta, budget);
      if (v.outcome == Outcome::Member) {
        any_member = true;
        all_nonmember = false;
        break;
      }
      if (v.outcome == Outcome::Inconclusive) {
        all_nonmember = false;
        ++scan.inconclusive_tests;
      }
    }
    if (any_member)
      scan.hyperbolic.push_back(0);
    else if (all_nonmember) {
      scan.hyperbolic.push_back(1);
      ++certified;
    } else {
      scan.hyperbolic.push_back(-1);
    }
  }
  scan.certified_fraction = static_cast<double>(certified) / points.size();
  return scan;
}

std::vector<BasepointProbeRow>
basepoint_dependence_probe(const ModelSpace& space, const BoundaryPointRef& xi,
                           const std::vector<PointRef>& basepoints,
                           const std::vector<BoundaryPointRef>& eta_mesh,
                           const SearchBudget& budget) {
  require(basepoints.size() >= 2, "the probe needs at least two basepoints");
  std::vector<BasepointProbeRow> rows;
  for (const auto& eta : eta_mesh) {
    BasepointProbeRow row;
    row.eta = eta;
    for (const auto& bp : basepoints) {
      space.check(bp);
      ModelSpace shifted = space;
      shifted.basepoint = bp;
      row.per_basepoint.push_back(star_test(shifted, xi, eta, budget).outcome);
    }
    for (const auto& o : row.per_basepoint)
      if (o != row.per_basepoint.front() && o != Outcome::Inconclusive &&
          row.per_basepoint.front() != Outcome::Inconclusive)
        row.differs = true;
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace stars
} // namespace starkit
