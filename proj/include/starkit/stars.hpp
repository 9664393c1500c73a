#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "starkit/space.hpp"

namespace starkit {
namespace stars {

using spaces::AlmostGeodesic;
using spaces::BoundaryPointRef;
using spaces::ModelSpace;
using spaces::PointRef;

// Extrinsic/angular neighborhood of a boundary point: Euclidean metric balls
// intersected with the closure for extrinsic compactifications, angular caps
// with a depth floor for visual boundaries.
struct Neighborhood {
  BoundaryPointRef center;
  double radius = 0.25;
};

enum class Outcome { Member, NonMember, Inconclusive };

const char* outcome_name(Outcome o);

// Search parameters for the sequence-criterion machinery. The search walks
// neighborhoods shrinking by radius_factor per scale; the constant C is swept
// over the geometric grid {0,1,2,4,...,c_max}.
struct SearchBudget {
  long max_distance_evals = 10000;
  int scales = 6;          // scales examined before the first decision attempt
  int max_scales = 12;     // adaptive extension limit while growth is unresolved
  int restarts = 8;        // randomized descent restarts per scale
  int steps = 30;          // descent steps per restart
  double c_max = 64.0;
  double initial_radius = 0.25;
  double radius_factor = 0.25;
  std::uint64_t seed = 0x5747u;
};

struct StarVerdict {
  Outcome outcome = Outcome::Inconclusive;
  double constant = 0.0;               // Member: the certified C
  std::vector<PointRef> witness_x;     // Member: per-scale x_n -> xi
  std::vector<PointRef> witness_y;     // Member: per-scale y_n -> eta
  std::vector<double> gap_minima;      // per-scale min of d(y,x) - d(y,x0)
  std::vector<double> gromov_max;      // per-scale max Gromov product
  std::vector<double> radii;           // extrinsic/angular scale radii
  double separation_bound = 0.0;       // NonMember: the stable product bound R
  double final_margin = 0.0;           // NonMember: last gap minus c_max
  long evals_spent = 0;
};

// min over w in W of d(z,w) <= d(z,basepoint) + C.
bool halfspace_membership(const ModelSpace& space, const PointRef& basepoint,
                          const std::vector<PointRef>& witness_set, double constant,
                          const PointRef& z);

// Does eta belong to S(xi)? Sequence-criterion search returning a certified
// verdict with numeric witnesses, or Inconclusive when the budget runs out.
StarVerdict star_test(const ModelSpace& space, const BoundaryPointRef& xi,
                      const BoundaryPointRef& eta, const SearchBudget& budget = {});

// Does eta belong to the dual star of xi, i.e. xi in S(eta)?
StarVerdict dual_star_test(const ModelSpace& space, const BoundaryPointRef& xi,
                           const BoundaryPointRef& eta, const SearchBudget& budget = {});

// Closed-form star descriptions used as ground truth: singletons on the disk
// and ball, closed half-spheres (Tits angle <= pi/2) on l2, unions of closed
// faces on Hilbert polytopes.
struct StarDescription {
  enum class Form { Singleton, HalfSphere, PolytopeFaceUnion };
  Form form = Form::Singleton;
  BoundaryPointRef center;
  std::vector<int> carrier_facets; // PolytopeFaceUnion: facets through the center
};

StarDescription star_exact(const ModelSpace& space, const BoundaryPointRef& xi);
// Membership under the exact description; boundary_tol widens the half-sphere
// decision band for angle comparisons.
bool star_exact_contains(const ModelSpace& space, const StarDescription& star,
                         const BoundaryPointRef& eta, double boundary_tol = 1e-9);

// All-pairs path distances of the star graph on the samples (edge iff either
// one-sided membership is certified). Entries are path lengths; infinity
// means no certified chain. Any Inconclusive pair flags the matrix as an
// upper bound only.
struct StarMatrix {
  std::vector<std::vector<double>> dist;
  bool upper_bound_only = false;
};

StarMatrix star_distance_matrix(const ModelSpace& space,
                                const std::vector<BoundaryPointRef>& samples,
                                const SearchBudget& budget = {});

struct FaceReport {
  std::vector<BoundaryPointRef> certified; // in every S(xi_i)
  int inconclusive = 0;
  bool possibly_empty = false;
};

// Sampled intersection of the stars of the given boundary points, probed on a
// mesh of candidate boundary points.
FaceReport face(const ModelSpace& space, const std::vector<BoundaryPointRef>& xis,
                const std::vector<BoundaryPointRef>& mesh, const SearchBudget& budget = {});

struct VisibilityResult {
  enum class Kind { Visible, Violated, Inconclusive };
  Kind kind = Kind::Inconclusive;
  double bound = 0.0;                  // Visible: max over samples of min path distance to x0
  std::vector<double> per_radius_min;  // trend of the per-radius worst case
};

// Do (1,kappa)-almost geodesics between shrinking neighborhoods of xi and eta
// keep bounded distance to the basepoint?
VisibilityResult visibility_check(const ModelSpace& space, const BoundaryPointRef& xi,
                                  const BoundaryPointRef& eta, double kappa,
                                  int samples_per_radius, const std::vector<double>& radii,
                                  std::uint64_t seed = 0x51u);

struct GeodesicFaceReport {
  bool unbounded = false;
  std::vector<BoundaryPointRef> limit_points;
  int certified_pairs = 0;
  int inconclusive_pairs = 0;
  int contradicted_pairs = 0;
};

// Accumulation points of an unbounded ray lie in a common face: certify
// pairwise star memberships of the sampled limit directions.
GeodesicFaceReport geodesic_face_check(const ModelSpace& space, const AlmostGeodesic& ray,
                                       const std::vector<double>& times,
                                       const SearchBudget& budget = {});

using MapFn = std::function<PointRef(const PointRef&)>;

struct ContractionReport {
  bool ok = false;
  int first_good_index = -1; // first n with no violations from there on
  int violations_after = 0;
  bool precondition_failed = false;
  std::string message;
};

// Contraction lemma check: g_n (X \ H(V-)) inside H(V+) for all n >= N.
// maps[i] and inverses[i] are the isometries g_{i+1} and their inverses.
ContractionReport contraction_check(const ModelSpace& space, const std::vector<MapFn>& maps,
                                    const std::vector<MapFn>& inverses,
                                    const Neighborhood& v_plus, const Neighborhood& v_minus,
                                    int sample_count, std::uint64_t seed = 0xC0u);

struct HyperbolicityScan {
  double certified_fraction = 0.0; // fraction of points with all tests NonMember
  std::vector<int> hyperbolic;     // 1 = all NonMember, 0 = some Member, -1 = undecided only
  int inconclusive_tests = 0;
};

// Label each sampled boundary point hyperbolic iff star_test reports
// NonMember against every mesh point.
HyperbolicityScan hyperbolicity_scan(const ModelSpace& space,
                                     const std::vector<BoundaryPointRef>& points,
                                     const std::vector<BoundaryPointRef>& mesh,
                                     const SearchBudget& budget = {});

struct BasepointProbeRow {
  BoundaryPointRef eta;
  std::vector<Outcome> per_basepoint;
  bool differs = false;
};

// Question-B probe: rerun the star test from several basepoints and report
// mesh points whose verdict differs.
std::vector<BasepointProbeRow>
basepoint_dependence_probe(const ModelSpace& space, const BoundaryPointRef& xi,
                           const std::vector<PointRef>& basepoints,
                           const std::vector<BoundaryPointRef>& eta_mesh,
                           const SearchBudget& budget = {});

// Geometry helpers shared with other modules.
std::vector<BoundaryPointRef> boundary_mesh(const ModelSpace& space, int count,
                                            std::uint64_t seed);
double boundary_separation(const ModelSpace& space, const BoundaryPointRef& a,
                           const BoundaryPointRef& b);
PointRef approach_point(const ModelSpace& space, const BoundaryPointRef& xi, double depth);
bool neighborhood_contains(const ModelSpace& space, const Neighborhood& n, const PointRef& p);
std::vector<PointRef> neighborhood_mesh(const ModelSpace& space, const Neighborhood& n,
                                        int count, std::uint64_t seed);
// Nearest representable boundary point of a raw extrinsic coordinate vector.
BoundaryPointRef snap_to_boundary(const ModelSpace& space, const CVec& cz,
                                  const RVec& xz);

} // namespace stars
} // namespace starkit
