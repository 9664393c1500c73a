#include "starkit/space.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace starkit {
namespace spaces {

namespace {

constexpr double kInteriorTol = 1e-12;
constexpr double kBoundaryTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::atomic<int> g_next_space_id{1};

double sq(double v) { return v * v; }

[[noreturn]] void fail(const std::string& msg) { throw Error(msg); }

void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

// d(0,r) = arctanh(r); clamped so near-boundary args stay finite.
double atanh_clamped(double r) {
  if (r >= 1.0) r = 1.0 - 1e-17;
  if (r <= 0.0) return 0.0;
  return std::atanh(r);
}

double disk_gauge(Complex z, Complex w) {
  return std::abs((z - w) / (1.0 - std::conj(z) * w));
}

double half_plane_dist(Complex x, Complex y) {
  // half of the curvature -1 distance
  const double c = 1.0 + std::norm(x - y) / (2.0 * x.imag() * y.imag());
  return 0.5 * std::acosh(std::max(1.0, c));
}

int gcd_abs(int p, int q) { return std::gcd(std::abs(p), std::abs(q)); }

} // namespace

const char* kind_name(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::PoincareDisk: return "poincare_disk";
    case SpaceKind::KobayashiBall: return "kobayashi_ball";
    case SpaceKind::Polydisc: return "polydisc";
    case SpaceKind::HilbertPolytope: return "hilbert_polytope";
    case SpaceKind::NormedSpace: return "normed";
    case SpaceKind::TorusTeichmueller: return "torus_teichmueller";
    case SpaceKind::FiniteGraph: return "finite_graph";
  }
  return "unknown";
}

double cnorm(const CVec& z) {
  double s = 0.0;
  for (const auto& c : z) s += std::norm(c);
  return std::sqrt(s);
}

Complex cdot(const CVec& z, const CVec& w) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += z[i] * std::conj(w[i]);
  return s;
}

double rnorm(const RVec& x, NormKind k) {
  double s = 0.0;
  if (k == NormKind::L1) {
    for (double v : x) s += std::abs(v);
    return s;
  }
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double euclid(const RVec& a, const RVec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += sq(a[i] - b[i]);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

ModelSpace ModelSpace::poincare_disk() {
  ModelSpace s;
  s.kind = SpaceKind::PoincareDisk;
  s.dim = 1;
  s.id = g_next_space_id++;
  s.basepoint = s.point(Complex(0.0, 0.0));
  return s;
}

ModelSpace ModelSpace::kobayashi_ball(int n) {
  require(n >= 1, "ball dimension must be >= 1");
  ModelSpace s;
  s.kind = SpaceKind::KobayashiBall;
  s.dim = n;
  s.id = g_next_space_id++;
  s.basepoint = s.point(CVec(n, Complex(0.0, 0.0)));
  return s;
}

ModelSpace ModelSpace::polydisc(int n) {
  require(n >= 1, "polydisc dimension must be >= 1");
  ModelSpace s;
  s.kind = SpaceKind::Polydisc;
  s.dim = n;
  s.id = g_next_space_id++;
  s.basepoint = s.point(CVec(n, Complex(0.0, 0.0)));
  return s;
}

ModelSpace ModelSpace::hilbert_polytope(std::vector<RVec> verts) {
  require(verts.size() >= 2, "polytope needs at least two vertices");
  const std::size_t d = verts[0].size();
  for (const auto& v : verts) require(v.size() == d, "vertex dimension mismatch");
  ModelSpace s;
  s.kind = SpaceKind::HilbertPolytope;
  s.dim = static_cast<int>(d);
  s.vertices = std::move(verts);
  s.finish_polytope();
  s.id = g_next_space_id++;
  RVec centroid(d, 0.0);
  for (const auto& v : s.vertices)
    for (std::size_t i = 0; i < d; ++i) centroid[i] += v[i] / static_cast<double>(s.vertices.size());
  s.basepoint = s.point(centroid);
  return s;
}

ModelSpace ModelSpace::hilbert_simplex(int n) {
  require(n >= 2, "simplex needs >= 2 vertices");
  std::vector<RVec> verts;
  for (int i = 0; i < n; ++i) {
    RVec e(n, 0.0);
    e[i] = 1.0;
    verts.push_back(std::move(e));
  }
  return hilbert_polytope(std::move(verts));
}

ModelSpace ModelSpace::normed(int n, NormKind norm) {
  require(n >= 1, "normed dimension must be >= 1");
  ModelSpace s;
  s.kind = SpaceKind::NormedSpace;
  s.dim = n;
  s.norm_kind = norm;
  s.id = g_next_space_id++;
  s.basepoint = s.point(RVec(n, 0.0));
  return s;
}

ModelSpace ModelSpace::torus_teichmueller() {
  ModelSpace s;
  s.kind = SpaceKind::TorusTeichmueller;
  s.dim = 1;
  s.id = g_next_space_id++;
  s.basepoint = s.point(Complex(0.0, 1.0));
  return s;
}

ModelSpace ModelSpace::finite_graph(int n, std::vector<std::tuple<int, int, double>> edges) {
  require(n >= 1, "graph needs at least one vertex");
  ModelSpace s;
  s.kind = SpaceKind::FiniteGraph;
  s.dim = n;
  s.graph.n = n;
  s.graph.edges = std::move(edges);
  auto& d = s.graph.dist;
  d.assign(n, std::vector<double>(n, kInf));
  for (int i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const auto& [a, b, w] : s.graph.edges) {
    require(a >= 0 && a < n && b >= 0 && b < n, "edge endpoint out of range");
    require(w > 0.0, "edge weights must be positive");
    d[a][b] = std::min(d[a][b], w);
    d[b][a] = std::min(d[b][a], w);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) require(std::isfinite(d[i][j]), "graph must be connected");
  s.id = g_next_space_id++;
  s.basepoint = s.point_vertex(0);
  return s;
}

ModelSpace ModelSpace::scaled_by(double lambda) const {
  require(lambda > 0.0, "metric scale must be positive");
  ModelSpace s = *this;
  s.scale = scale * lambda;
  s.id = g_next_space_id++;
  s.basepoint.space_id = s.id;
  return s;
}

void ModelSpace::finish_polytope() {
  const std::size_t d = vertices[0].size();
  affine_origin = vertices[0];
  affine_basis.clear();
  // Gram-Schmidt over vertex differences.
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    RVec v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = vertices[i][j] - affine_origin[j];
    for (const auto& b : affine_basis) {
      double ip = 0.0;
      for (std::size_t j = 0; j < d; ++j) ip += v[j] * b[j];
      for (std::size_t j = 0; j < d; ++j) v[j] -= ip * b[j];
    }
    const double nv = rnorm(v, NormKind::L2);
    if (nv > 1e-10) {
      for (auto& c : v) c /= nv;
      affine_basis.push_back(std::move(v));
    }
  }
  const int k = intrinsic_dim();
  require(k >= 1, "polytope has empty interior (all vertices equal)");

  std::vector<RVec> u;
  for (const auto& v : vertices) u.push_back(to_intrinsic(v));

  // Brute-force facet enumeration: every affinely independent k-subset whose
  // hyperplane supports the whole vertex set is a facet. Desk-scale inputs.
  facets.clear();
  const int m = static_cast<int>(u.size());
  std::vector<int> idx(k);
  std::function<void(int, int)> rec = [&](int start, int chosen) {
    if (chosen == k) {
      RVec normal(k, 0.0);
      if (k == 1) {
        normal[0] = 1.0;
      } else if (k == 2) {
        const RVec& a = u[idx[0]];
        const RVec& b = u[idx[1]];
        normal[0] = -(b[1] - a[1]);
        normal[1] = b[0] - a[0];
      } else if (k == 3) {
        const RVec& a = u[idx[0]];
        RVec p(3), q(3);
        for (int j = 0; j < 3; ++j) {
          p[j] = u[idx[1]][j] - a[j];
          q[j] = u[idx[2]][j] - a[j];
        }
        normal = {p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2],
                  p[0] * q[1] - p[1] * q[0]};
      } else {
        fail("polytopes of intrinsic dimension > 3 are not supported");
      }
      const double nn = rnorm(normal, NormKind::L2);
      if (nn < 1e-10) return;
      for (auto& c : normal) c /= nn;
      double offset = 0.0;
      for (int j = 0; j < k; ++j) offset += normal[j] * u[idx[0]][j];
      int above = 0, below = 0;
      for (const auto& pt : u) {
        double val = -offset;
        for (int j = 0; j < k; ++j) val += normal[j] * pt[j];
        if (val > 1e-9) ++above;
        if (val < -1e-9) ++below;
      }
      if (above > 0 && below > 0) return;
      if (below > 0) {
        for (auto& c : normal) c = -c;
        offset = -offset;
      }
      for (const auto& f : facets) {
        double dn = 0.0;
        for (int j = 0; j < k; ++j) dn += sq(f.normal[j] - normal[j]);
        if (std::sqrt(dn) < 1e-9 && std::abs(f.offset - offset) < 1e-9) return;
      }
      facets.push_back({normal, offset});
      return;
    }
    for (int i = start; i < m; ++i) {
      idx[chosen] = i;
      rec(i + 1, chosen + 1);
    }
  };
  rec(0, 0);
  require(facets.size() >= 2, "degenerate polytope: facet enumeration failed");
}

RVec ModelSpace::to_intrinsic(const RVec& ambient) const {
  const int k = intrinsic_dim();
  RVec u(k, 0.0);
  for (int j = 0; j < k; ++j)
    for (std::size_t i = 0; i < ambient.size(); ++i)
      u[j] += (ambient[i] - affine_origin[i]) * affine_basis[j][i];
  return u;
}

RVec ModelSpace::to_ambient(const RVec& intrinsic) const {
  RVec x = affine_origin;
  for (std::size_t j = 0; j < intrinsic.size(); ++j)
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += intrinsic[j] * affine_basis[j][i];
  return x;
}

double ModelSpace::facet_clearance(const RVec& u) const {
  double best = kInf;
  for (const auto& f : facets) {
    double v = -f.offset;
    for (std::size_t j = 0; j < u.size(); ++j) v += f.normal[j] * u[j];
    best = std::min(best, v);
  }
  return best;
}

// ---------------------------------------------------------------------------
// point validation
// ---------------------------------------------------------------------------

PointRef ModelSpace::point(Complex z) const {
  PointRef p;
  p.space_id = id;
  switch (kind) {
    case SpaceKind::PoincareDisk:
      require(std::abs(z) < 1.0, "disk point must satisfy |z| < 1");
      p.cz = {z};
      return p;
    case SpaceKind::TorusTeichmueller:
      require(z.imag() > 0.0, "half-plane point must satisfy Im z > 0");
      p.cz = {z};
      return p;
    default:
      fail(std::string("scalar complex point not valid for ") + kind_name(kind));
  }
}

PointRef ModelSpace::point(const CVec& z) const {
  if (z.size() == 1 && (kind == SpaceKind::PoincareDisk || kind == SpaceKind::TorusTeichmueller))
    return point(z[0]);
  PointRef p;
  p.space_id = id;
  switch (kind) {
    case SpaceKind::KobayashiBall:
      require(static_cast<int>(z.size()) == dim, "ball point dimension mismatch");
      require(cnorm(z) < 1.0, "ball point must satisfy ||z|| < 1");
      p.cz = z;
      return p;
    case SpaceKind::Polydisc:
      require(static_cast<int>(z.size()) == dim, "polydisc point dimension mismatch");
      for (const auto& c : z) require(std::abs(c) < 1.0, "polydisc coordinate must satisfy |z_i| < 1");
      p.cz = z;
      return p;
    default:
      fail(std::string("complex-vector point not valid for ") + kind_name(kind));
  }
}

PointRef ModelSpace::point(const RVec& x) const {
  PointRef p;
  p.space_id = id;
  switch (kind) {
    case SpaceKind::NormedSpace:
      require(static_cast<int>(x.size()) == dim, "normed point dimension mismatch");
      p.xz = x;
      return p;
    case SpaceKind::HilbertPolytope: {
      require(static_cast<int>(x.size()) == dim, "polytope point dimension mismatch");
      const RVec u = to_intrinsic(x);
      const RVec back = to_ambient(u);
      require(euclid(back, x) < 1e-8, "point is outside the polytope's affine hull");
      require(facet_clearance(u) > kInteriorTol, "point must lie strictly inside the polytope");
      p.xz = x;
      return p;
    }
    default:
      fail(std::string("real-vector point not valid for ") + kind_name(kind));
  }
}

PointRef ModelSpace::point_vertex(int v) const {
  require(kind == SpaceKind::FiniteGraph, "vertex points are for graph spaces");
  require(v >= 0 && v < graph.n, "vertex id out of range");
  PointRef p;
  p.space_id = id;
  p.vertex = v;
  return p;
}

BoundaryPointRef ModelSpace::boundary_point(Complex z) const {
  BoundaryPointRef b;
  b.space_id = id;
  switch (kind) {
    case SpaceKind::PoincareDisk:
      require(std::abs(std::abs(z) - 1.0) < kBoundaryTol, "disk boundary point must satisfy |z| = 1");
      b.cz = {z / std::abs(z)};
      return b;
    case SpaceKind::TorusTeichmueller:
      require(std::abs(z.imag()) < kBoundaryTol, "half-plane boundary point must be real (or infinity)");
      b.cz = {Complex(z.real(), 0.0)};
      return b;
    default:
      fail(std::string("scalar boundary point not valid for ") + kind_name(kind));
  }
}

BoundaryPointRef ModelSpace::boundary_point(const CVec& z) const {
  if (z.size() == 1 && (kind == SpaceKind::PoincareDisk || kind == SpaceKind::TorusTeichmueller))
    return boundary_point(z[0]);
  BoundaryPointRef b;
  b.space_id = id;
  switch (kind) {
    case SpaceKind::KobayashiBall: {
      require(static_cast<int>(z.size()) == dim, "ball boundary dimension mismatch");
      const double n = cnorm(z);
      require(std::abs(n - 1.0) < kBoundaryTol, "ball boundary point must satisfy ||z|| = 1");
      b.cz = z;
      for (auto& c : b.cz) c /= n;
      return b;
    }
    case SpaceKind::Polydisc: {
      require(static_cast<int>(z.size()) == dim, "polydisc boundary dimension mismatch");
      b.cz = z;
      for (int i = 0; i < dim; ++i) {
        const double m = std::abs(z[i]);
        require(m < 1.0 + kBoundaryTol, "polydisc boundary coordinate exceeds the closed disk");
        if (std::abs(m - 1.0) < kBoundaryTol) {
          b.cz[i] /= m;
          b.carrier.push_back(i);
        }
      }
      require(!b.carrier.empty(), "polydisc boundary point needs a unimodular coordinate");
      return b;
    }
    default:
      fail(std::string("complex-vector boundary point not valid for ") + kind_name(kind));
  }
}

BoundaryPointRef ModelSpace::boundary_point(const RVec& x) const {
  BoundaryPointRef b;
  b.space_id = id;
  switch (kind) {
    case SpaceKind::NormedSpace: {
      require(static_cast<int>(x.size()) == dim, "direction dimension mismatch");
      const double n = rnorm(x, NormKind::L2);
      require(n > kBoundaryTol, "visual boundary direction must be nonzero");
      b.xz = x;
      for (auto& c : b.xz) c /= n;
      return b;
    }
    case SpaceKind::HilbertPolytope: {
      require(static_cast<int>(x.size()) == dim, "polytope boundary dimension mismatch");
      const RVec u = to_intrinsic(x);
      require(euclid(to_ambient(u), x) < 1e-8, "point is outside the polytope's affine hull");
      const double clear = facet_clearance(u);
      require(std::abs(clear) < kBoundaryTol, "polytope boundary point must lie on the boundary");
      b.xz = x;
      for (std::size_t f = 0; f < facets.size(); ++f) {
        double v = -facets[f].offset;
        for (std::size_t j = 0; j < u.size(); ++j) v += facets[f].normal[j] * u[j];
        if (std::abs(v) < kBoundaryTol) b.carrier.push_back(static_cast<int>(f));
      }
      require(!b.carrier.empty(), "no active facet found for polytope boundary point");
      return b;
    }
    default:
      fail(std::string("real-vector boundary point not valid for ") + kind_name(kind));
  }
}

BoundaryPointRef ModelSpace::boundary_point_infinity() const {
  require(kind == SpaceKind::TorusTeichmueller, "infinity is a half-plane boundary point");
  BoundaryPointRef b;
  b.space_id = id;
  b.at_infinity = true;
  b.cz = {Complex(0.0, 0.0)};
  return b;
}

void ModelSpace::check(const PointRef& p) const {
  require(p.space_id == id, "point belongs to a different space");
}

void ModelSpace::check(const BoundaryPointRef& p) const {
  require(p.space_id == id, "boundary point belongs to a different space");
}

// ---------------------------------------------------------------------------
// distance
// ---------------------------------------------------------------------------

namespace {

double hilbert_chord_distance(const ModelSpace& s, const RVec& xa, const RVec& ya) {
  const RVec x = s.to_intrinsic(xa);
  const RVec y = s.to_intrinsic(ya);
  double diff = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) diff = std::max(diff, std::abs(x[j] - y[j]));
  if (diff < 1e-15) return 0.0;
  // chord x + t(y-x); intersect with every facet halfplane normal.u >= offset
  double tmin = -kInf, tmax = kInf;
  for (const auto& f : s.facets) {
    double a = 0.0, b = -f.offset;
    for (std::size_t j = 0; j < x.size(); ++j) {
      a += f.normal[j] * (y[j] - x[j]);
      b += f.normal[j] * x[j];
    }
    if (std::abs(a) < 1e-15) continue; // chord parallel to facet
    const double t = -b / a;
    if (a > 0.0)
      tmin = std::max(tmin, t);
    else
      tmax = std::min(tmax, t);
  }
  // cross-ratio of boundary hits at tmin < 0 and tmax > 1 against x at 0, y at 1
  const double cr = ((1.0 - tmin) * tmax) / ((-tmin) * (tmax - 1.0));
  return 0.5 * std::log(cr);
}

double graph_distance(const ModelSpace& s, int a, int b) { return s.graph.dist[a][b]; }

} // namespace

double distance(const ModelSpace& space, const PointRef& x, const PointRef& y) {
  space.check(x);
  space.check(y);
  double d = 0.0;
  switch (space.kind) {
    case SpaceKind::PoincareDisk:
      d = atanh_clamped(disk_gauge(x.cz[0], y.cz[0]));
      break;
    case SpaceKind::KobayashiBall: {
      const Complex ip = cdot(x.cz, y.cz);
      const double nx2 = sq(cnorm(x.cz)), ny2 = sq(cnorm(y.cz));
      const double t2 = 1.0 - (1.0 - nx2) * (1.0 - ny2) / std::norm(1.0 - ip);
      d = atanh_clamped(std::sqrt(std::max(0.0, t2)));
      break;
    }
    case SpaceKind::Polydisc: {
      for (int i = 0; i < space.dim; ++i)
        d = std::max(d, atanh_clamped(disk_gauge(x.cz[i], y.cz[i])));
      break;
    }
    case SpaceKind::HilbertPolytope:
      d = hilbert_chord_distance(space, x.xz, y.xz);
      break;
    case SpaceKind::NormedSpace: {
      RVec diff(x.xz.size());
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = x.xz[i] - y.xz[i];
      d = rnorm(diff, space.norm_kind);
      break;
    }
    case SpaceKind::TorusTeichmueller:
      d = half_plane_dist(x.cz[0], y.cz[0]);
      break;
    case SpaceKind::FiniteGraph:
      d = graph_distance(space, x.vertex, y.vertex);
      break;
  }
  return space.scale * d;
}

// ---------------------------------------------------------------------------
// geodesics
// ---------------------------------------------------------------------------

namespace {

Complex disk_mobius_to_zero(Complex center, Complex z) {
  return (z - center) / (1.0 - std::conj(center) * z);
}

Complex disk_mobius_from_zero(Complex center, Complex w) {
  return (w + center) / (1.0 + std::conj(center) * w);
}

// Involutive ball automorphism exchanging a and 0.
CVec ball_involution(const CVec& a, const CVec& z) {
  const double na2 = sq(cnorm(a));
  if (na2 < 1e-30) {
    CVec out = z;
    for (auto& c : out) c = -c;
    return out;
  }
  const Complex za = cdot(z, a);
  const double s = std::sqrt(1.0 - na2);
  CVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Complex proj = (za / na2) * a[i];
    const Complex orth = z[i] - proj;
    out[i] = (a[i] - proj - s * orth) / (1.0 - za);
  }
  return out;
}

AlmostGeodesic validated(const ModelSpace& space, AlmostGeodesic path) {
  // sampled (1,kappa) inequality check on the produced path
  const int n = 12;
  for (int i = 0; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const double s = path.length * i / n;
      const double t = path.length * j / n;
      const double dd = distance(space, path.at(s), path.at(t));
      const double tol = path.slack + 1e-7 * (1.0 + path.length);
      if (dd > std::abs(t - s) + tol || dd < std::abs(t - s) - tol)
        fail("almost-geodesic construction failed validation (inconclusive)");
    }
  }
  return path;
}

} // namespace

AlmostGeodesic geodesic(const ModelSpace& space, const PointRef& x, const PointRef& y) {
  space.check(x);
  space.check(y);
  const double len = distance(space, x, y);
  AlmostGeodesic g;
  g.length = len;
  g.slack = 0.0;
  const double scale = space.scale;
  switch (space.kind) {
    case SpaceKind::PoincareDisk: {
      const Complex a = x.cz[0];
      const Complex w = disk_mobius_to_zero(a, y.cz[0]);
      const Complex dir = std::abs(w) < 1e-15 ? Complex(1.0, 0.0) : w / std::abs(w);
      const ModelSpace* sp = &space;
      g.at = [a, dir, sp, scale](double t) {
        return sp->point(disk_mobius_from_zero(a, std::tanh(t / scale) * dir));
      };
      break;
    }
    case SpaceKind::KobayashiBall: {
      const CVec a = x.cz;
      CVec w = ball_involution(a, y.cz);
      const double nw = cnorm(w);
      if (nw < 1e-15) {
        w.assign(a.size(), Complex(0.0, 0.0));
        w[0] = 1.0;
      } else {
        for (auto& c : w) c /= nw;
      }
      const ModelSpace* sp = &space;
      g.at = [a, w, sp, scale](double t) {
        CVec p(w.size());
        const double r = std::tanh(t / scale);
        for (std::size_t i = 0; i < w.size(); ++i) p[i] = r * w[i];
        return sp->point(ball_involution(a, p));
      };
      break;
    }
    case SpaceKind::NormedSpace: {
      require(space.norm_kind == NormKind::L2, "geodesic: only the l2 norm has a canonical unit-speed line");
      const RVec a = x.xz, b = y.xz;
      const ModelSpace* sp = &space;
      g.at = [a, b, len, sp](double t) {
        if (len < 1e-15) return sp->point(a);
        RVec p(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] + (t / len) * (b[i] - a[i]);
        return sp->point(p);
      };
      break;
    }
    case SpaceKind::TorusTeichmueller: {
      const Complex a = x.cz[0], b = y.cz[0];
      const ModelSpace* sp = &space;
      if (std::abs(a.real() - b.real()) < 1e-14) {
        const double sign = (b.imag() >= a.imag()) ? 1.0 : -1.0;
        g.at = [a, sign, sp, scale](double t) {
          // metric is half the curvature -1 distance, so unit speed doubles the rate
          return sp->point(Complex(a.real(), a.imag() * std::exp(sign * 2.0 * t / scale)));
        };
      } else {
        // semicircle orthogonal to the real axis: z(s) = c + r(tanh s + i sech s)
        const double c = (std::norm(b) - std::norm(a)) / (2.0 * (b.real() - a.real()));
        const double r = std::abs(a - c);
        auto param = [c, r](Complex z) {
          // s with tanh s = (Re z - c)/r
          return std::atanh(std::clamp((z.real() - c) / r, -1.0 + 1e-16, 1.0 - 1e-16));
        };
        const double sa = param(a), sb = param(b);
        const double sign = (sb >= sa) ? 1.0 : -1.0;
        g.at = [c, r, sa, sign, sp, scale](double t) {
          const double s = sa + sign * 2.0 * t / scale;
          return sp->point(Complex(c + r * std::tanh(s), r / std::cosh(s)));
        };
      }
      break;
    }
    case SpaceKind::HilbertPolytope: {
      // chord through x, y parametrized by Hilbert arclength via the logistic map
      const RVec ux = space.to_intrinsic(x.xz);
      const RVec uy = space.to_intrinsic(y.xz);
      if (len < 1e-15) {
        const RVec ax = x.xz;
        const ModelSpace* sp = &space;
        g.at = [ax, sp](double) { return sp->point(ax); };
        break;
      }
      double tmin = -kInf, tmax = kInf;
      for (const auto& f : space.facets) {
        double aa = 0.0, bb = -f.offset;
        for (std::size_t j = 0; j < ux.size(); ++j) {
          aa += f.normal[j] * (uy[j] - ux[j]);
          bb += f.normal[j] * ux[j];
        }
        if (std::abs(aa) < 1e-15) continue;
        const double t = -bb / aa;
        if (aa > 0.0)
          tmin = std::max(tmin, t);
        else
          tmax = std::min(tmax, t);
      }
      // chord coordinate u in (0,1): x at u_x, y at u_y, boundary at 0 and 1
      const double ux1 = (0.0 - tmin) / (tmax - tmin);
      const double uy1 = (1.0 - tmin) / (tmax - tmin);
      const double sx = 0.5 * std::log(ux1 / (1.0 - ux1));
      const double sign = (uy1 >= ux1) ? 1.0 : -1.0;
      const ModelSpace* sp = &space;
      const RVec ax = x.xz, ay = y.xz;
      const double tmin_c = tmin, tmax_c = tmax;
      g.at = [ax, ay, sx, sign, tmin_c, tmax_c, sp, scale](double t) {
        const double s = sx + sign * t / scale;
        const double u = 1.0 / (1.0 + std::exp(-2.0 * s));
        const double tc = tmin_c + u * (tmax_c - tmin_c);
        RVec p(ax.size());
        for (std::size_t i = 0; i < ax.size(); ++i) p[i] = ax[i] + tc * (ay[i] - ax[i]);
        return sp->point(p);
      };
      break;
    }
    case SpaceKind::FiniteGraph: {
      // discrete geodesic: step path through the shortest vertex chain
      const int n = space.graph.n;
      const auto& dist = space.graph.dist;
      std::vector<int> path{x.vertex};
      int cur = x.vertex;
      while (cur != y.vertex) {
        int next = -1;
        for (const auto& [a, b, w] : space.graph.edges) {
          int other = -1;
          if (a == cur) other = b;
          if (b == cur) other = a;
          if (other < 0) continue;
          if (std::abs(dist[cur][other] + dist[other][y.vertex] - dist[cur][y.vertex]) < 1e-9 &&
              std::abs(dist[cur][other] - std::min(dist[cur][other], w)) < 1e-9) {
            next = other;
            break;
          }
        }
        require(next >= 0, "graph geodesic: path reconstruction failed");
        path.push_back(next);
        cur = next;
      }
      std::vector<double> cum{0.0};
      double kappa = 0.0;
      for (std::size_t i = 1; i < path.size(); ++i) {
        const double w = dist[path[i - 1]][path[i]];
        cum.push_back(cum.back() + w);
        kappa = std::max(kappa, w);
      }
      g.slack = space.scale * kappa;
      const ModelSpace* sp = &space;
      g.at = [path, cum, sp, scale](double t) {
        const double tt = t / scale;
        std::size_t best = 0;
        for (std::size_t i = 0; i < cum.size(); ++i)
          if (std::abs(cum[i] - tt) < std::abs(cum[best] - tt)) best = i;
        return sp->point_vertex(path[best]);
      };
      (void)n;
      break;
    }
    case SpaceKind::Polydisc:
      fail("polydisc pairs have no exact closed-form geodesic here; use almost_geodesic");
  }
  return g;
}

AlmostGeodesic almost_geodesic(const ModelSpace& space, const PointRef& x,
                               const PointRef& y, double kappa) {
  require(kappa > 0.0, "almost_geodesic requires kappa > 0");
  space.check(x);
  space.check(y);
  if (space.kind == SpaceKind::Polydisc) {
    // coordinate disk geodesics reparametrized by the max metric
    const ModelSpace disk = ModelSpace::poincare_disk();
    std::vector<AlmostGeodesic> parts;
    std::vector<double> lens;
    double total = 0.0;
    for (int i = 0; i < space.dim; ++i) {
      parts.push_back(geodesic(disk, disk.point(x.cz[i]), disk.point(y.cz[i])));
      lens.push_back(parts.back().length);
      total = std::max(total, parts.back().length);
    }
    total *= space.scale;
    AlmostGeodesic g;
    g.length = total;
    g.slack = kappa;
    const ModelSpace* sp = &space;
    const double scale = space.scale;
    g.at = [parts, lens, total, sp, scale](double t) {
      CVec p(parts.size());
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const double ti = total < 1e-15 ? 0.0 : (t / total) * lens[i];
        p[i] = parts[i].at(ti).cz[0];
      }
      (void)scale;
      return sp->point(p);
    };
    return validated(space, std::move(g));
  }
  AlmostGeodesic g = geodesic(space, x, y);
  g.slack = std::max(g.slack, kappa);
  return validated(space, std::move(g));
}

// ---------------------------------------------------------------------------
// auxiliary quantities
// ---------------------------------------------------------------------------

double kobayashi_infinitesimal_ball(const ModelSpace& space, const PointRef& z,
                                    const CVec& v) {
  require(space.kind == SpaceKind::KobayashiBall || space.kind == SpaceKind::PoincareDisk,
          "infinitesimal Kobayashi metric: ball (or disk) only");
  space.check(z);
  require(cnorm(v) > 0.0, "direction must be nonzero");
  require(v.size() == z.cz.size(), "direction dimension mismatch");
  const double nz2 = sq(cnorm(z.cz));
  const double nv2 = sq(cnorm(v));
  const double mixed = std::norm(cdot(z.cz, v));
  const double k2 = (nv2 * (1.0 - nz2) + mixed) / sq(1.0 - nz2);
  return space.scale * std::sqrt(k2);
}

double extremal_length_torus(const ModelSpace& space, const PointRef& x, int p, int q) {
  require(space.kind == SpaceKind::TorusTeichmueller, "extremal length lives on the half-plane");
  space.check(x);
  require(!(p == 0 && q == 0), "(p,q) must be a nonzero class");
  require(gcd_abs(p, q) == 1, "(p,q) must be coprime");
  const Complex z = x.cz[0];
  return std::norm(static_cast<double>(p) + static_cast<double>(q) * z) / z.imag();
}

double kerckhoff_distance(const ModelSpace& space, const PointRef& x,
                          const PointRef& y, int pq_bound) {
  require(space.kind == SpaceKind::TorusTeichmueller, "Kerckhoff formula lives on the half-plane");
  require(pq_bound >= 1, "pq_bound must be >= 1");
  space.check(x);
  space.check(y);
  const Complex zx = x.cz[0], zy = y.cz[0];
  double best = 1.0; // (p,q) ratio at x == y
  for (int p = -pq_bound; p <= pq_bound; ++p) {
    for (int q = 0; q <= pq_bound; ++q) {
      if (p == 0 && q == 0) continue;
      if (q == 0 && p != 1) continue;     // (p,0) ~ (1,0)
      if (q > 0 && gcd_abs(p, q) != 1) continue;
      const double ex = std::norm(static_cast<double>(p) + static_cast<double>(q) * zx) / zx.imag();
      const double ey = std::norm(static_cast<double>(p) + static_cast<double>(q) * zy) / zy.imag();
      best = std::max(best, ex / ey);
    }
  }
  return space.scale * 0.5 * std::log(best);
}

double euclidean_boundary_distance(const ModelSpace& space, const PointRef& z) {
  space.check(z);
  switch (space.kind) {
    case SpaceKind::PoincareDisk:
      return 1.0 - std::abs(z.cz[0]);
    case SpaceKind::KobayashiBall:
      return 1.0 - cnorm(z.cz);
    case SpaceKind::Polydisc: {
      double best = kInf;
      for (const auto& c : z.cz) best = std::min(best, 1.0 - std::abs(c));
      return best;
    }
    case SpaceKind::HilbertPolytope:
      return space.facet_clearance(space.to_intrinsic(z.xz));
    default:
      fail(std::string("euclidean boundary distance undefined for ") + kind_name(space.kind));
  }
}

} // namespace spaces
} // namespace starkit
