#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace starkit {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;
using RVec = std::vector<double>;

// Thrown on precondition violations (mismatched spaces, out-of-domain points,
// unsupported operations).
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

namespace spaces {

enum class SpaceKind {
  PoincareDisk,       // |z| < 1, d = arctanh of the Moebius gauge
  KobayashiBall,      // complex N-ball, Euclidean norm < 1
  Polydisc,           // N disk coordinates, max metric
  HilbertPolytope,    // interior of a convex polytope, 1/2 log cross-ratio
  NormedSpace,        // real n-space with l1 or l2 norm
  TorusTeichmueller,  // upper half-plane, half the curvature -1 distance
  FiniteGraph,        // weighted shortest-path metric
};

enum class NormKind { L1, L2 };

const char* kind_name(SpaceKind kind);

struct PointRef {
  int space_id = -1;
  CVec cz;         // complex-coordinate spaces (disk, ball, polydisc, half-plane)
  RVec xz;         // real-coordinate spaces (polytope ambient, normed)
  int vertex = -1; // graphs
};

struct BoundaryPointRef {
  int space_id = -1;
  CVec cz;
  RVec xz;
  bool at_infinity = false;   // half-plane boundary point at infinity
  std::vector<int> carrier;   // polytope: active facets; polydisc: unimodular coords
};

// Halfspace constraint in the polytope's intrinsic coordinates: normal.u >= offset.
struct Facet {
  RVec normal;
  double offset = 0.0;
};

struct GraphData {
  int n = 0;
  std::vector<std::tuple<int, int, double>> edges;
  std::vector<std::vector<double>> dist; // all-pairs shortest paths
};

// A (1,kappa)-almost geodesic; kappa == 0 is an exact unit-speed geodesic.
struct AlmostGeodesic {
  double length = 0.0;
  double slack = 0.0;
  std::function<PointRef(double)> at;
};

class ModelSpace {
public:
  SpaceKind kind = SpaceKind::PoincareDisk;
  int dim = 1;                      // complex dim (ball/polydisc), real dim (normed), ambient dim (polytope)
  NormKind norm_kind = NormKind::L2;
  double scale = 1.0;               // fixed metric multiplier on top of the conventions below
  std::vector<RVec> vertices;       // polytope, ambient coordinates
  RVec affine_origin;               // polytope affine chart
  std::vector<RVec> affine_basis;   // orthonormal; intrinsic dim = affine_basis.size()
  std::vector<Facet> facets;        // polytope facets, intrinsic coordinates
  GraphData graph;
  PointRef basepoint;
  int id = 0;

  static ModelSpace poincare_disk();
  static ModelSpace kobayashi_ball(int n);
  static ModelSpace polydisc(int n);
  static ModelSpace hilbert_polytope(std::vector<RVec> verts);
  static ModelSpace hilbert_simplex(int n); // standard open n-vertex simplex in R^n
  static ModelSpace normed(int n, NormKind norm);
  static ModelSpace torus_teichmueller();
  static ModelSpace finite_graph(int n, std::vector<std::tuple<int, int, double>> edges);

  // Same geometry with the metric multiplied by lambda (fresh id; points must be rebuilt).
  ModelSpace scaled_by(double lambda) const;

  // Validating constructors for interior points.
  PointRef point(Complex z) const;
  PointRef point(const CVec& z) const;
  PointRef point(const RVec& x) const;
  PointRef point_vertex(int v) const;

  // Validating constructors for ideal points.
  BoundaryPointRef boundary_point(Complex z) const;
  BoundaryPointRef boundary_point(const CVec& z) const;
  BoundaryPointRef boundary_point(const RVec& x) const;
  BoundaryPointRef boundary_point_infinity() const;

  void check(const PointRef& p) const;
  void check(const BoundaryPointRef& p) const;

  int intrinsic_dim() const { return static_cast<int>(affine_basis.size()); }
  RVec to_intrinsic(const RVec& ambient) const;
  RVec to_ambient(const RVec& intrinsic) const;
  // Signed facet clearance of an intrinsic point (min over facets); > 0 inside.
  double facet_clearance(const RVec& intrinsic) const;

private:
  void finish_polytope();
};

double distance(const ModelSpace& space, const PointRef& x, const PointRef& y);

// Exact unit-speed geodesic where the space has one in closed form
// (disk, ball, l2, half-plane, Hilbert chords, graphs as step paths).
AlmostGeodesic geodesic(const ModelSpace& space, const PointRef& x, const PointRef& y);

// (1,kappa)-almost geodesic for kappa > 0; the polydisc uses coordinate disk
// geodesics reparametrized by the max metric. The returned path is validated
// on sampled parameter pairs; failure raises Error rather than returning an
// invalid path.
AlmostGeodesic almost_geodesic(const ModelSpace& space, const PointRef& x,
                               const PointRef& y, double kappa);

// K(z;v) for the unit ball: K^2 = (|v|^2(1-|z|^2)+|<z,v>|^2)/(1-|z|^2)^2.
double kobayashi_infinitesimal_ball(const ModelSpace& space, const PointRef& z,
                                    const CVec& v);

// Flat-torus extremal length of the (p,q) curve class at modulus x: |p+qx|^2/Im x.
double extremal_length_torus(const ModelSpace& space, const PointRef& x, int p, int q);

// (1/2) log max over coprime (p,q), max(|p|,|q|) <= pq_bound, of Ext_x/Ext_y.
// Nondecreasing in pq_bound and converges to distance(x,y) from below.
double kerckhoff_distance(const ModelSpace& space, const PointRef& x,
                          const PointRef& y, int pq_bound);

// Euclidean distance to the topological boundary (disk, ball, polydisc, polytope).
double euclidean_boundary_distance(const ModelSpace& space, const PointRef& z);

// Shared helpers.
double cnorm(const CVec& z);                 // Euclidean norm
Complex cdot(const CVec& z, const CVec& w);  // sum z_i * conj(w_i)
double rnorm(const RVec& x, NormKind k);
double euclid(const RVec& a, const RVec& b);

} // namespace spaces
} // namespace starkit
