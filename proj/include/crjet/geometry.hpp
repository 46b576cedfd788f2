#ifndef CRJET_GEOMETRY_HPP
#define CRJET_GEOMETRY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crjet/map_germ.hpp"

namespace crjet {

/// A real-analytic generic CR submanifold of C^n cut out by d real
/// polynomial equations rho_j(z, conj z) = 0.
///
/// Each rho_j is an exact series in 2n variables: z_1..z_n followed by the
/// conjugate placeholders chi_1..chi_n.
struct ManifoldSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  Point base;
  std::vector<TruncatedSeries> rho;
  /// Coordinate names for reports; defaults to z1..zn.
  std::vector<std::string> names;
};

/// Builds a spec and fills default names. Does not validate.
ManifoldSpec make_spec(Point base, std::vector<TruncatedSeries> rho, std::vector<std::string> names = {});

/// rho(z, chi) as a point of C^d.
Point evaluate_rho(const ManifoldSpec& spec, const Point& z, const Point& chi);
/// d x n matrices of first partials at (z, chi).
CMatrix dz_matrix(const ManifoldSpec& spec, const Point& z, const Point& chi);
CMatrix dchi_matrix(const ManifoldSpec& spec, const Point& z, const Point& chi);

/// coef(z^a chi^b) == conj(coef(z^b chi^a)) for every term.
bool reality_symmetric(const TruncatedSeries& rho, std::size_t n);

struct AnalysisReport {
  bool is_generic = false;
  std::size_t cr_dim = 0;
  std::size_t cr_codim = 0;
  bool levi_nondegenerate = false;
  bool levi_surjective = false;
  std::optional<int> nondeg_order;
  int k_max = 0;
  std::optional<int> minimal_s;
  int s_max = 0;
  std::optional<int> determinacy_order;
};

/// Checks reality symmetry (input error) and base membership (precondition
/// error), then reports genericity and the CR dimensions.
AnalysisReport validate_spec(const ManifoldSpec& spec);

struct LeviData {
  /// n x (n-d); columns span the complex tangent space at the base.
  CMatrix tc_basis;
  /// One Hermitian (n-d) x (n-d) matrix per defining function.
  std::vector<CMatrix> forms;
};

/// Kernel basis of the holomorphic differential at the base, and
/// (H_j)_{kl} = sum_ab v_k^a (d^2 rho_j / dz_a dchi_b) conj(v_l^b).
LeviData levi_form(const ManifoldSpec& spec);

struct LeviTests {
  bool nondegenerate = false;
  bool surjective = false;
};
LeviTests levi_tests(const LeviData& levi);

/// Smallest k <= k_max such that the Segre jet map restricted to Q_x has
/// rank n-d at x.
std::optional<int> nondegeneracy_order(const ManifoldSpec& spec, int k_max);

/// Rank n-d of the k-jet map along Q_x, and its full rank over all conjugate
/// directions, at the base.
struct JetRank {
  int k = 0;
  std::size_t restricted_rank = 0;
  std::size_t full_rank = 0;
};
JetRank segre_jet_rank(const ManifoldSpec& spec, int k);

/// Smallest s <= s_max whose sampled Segre-set rank is n.
std::optional<int> minimality_order(const ManifoldSpec& spec, int s_max, std::uint64_t seed);

/// Whether f maps M into Mp to the given order (checked on the
/// complexification through the Segre graph at the base) and carries the
/// complex tangent space at the base onto the one at f(base).
/// Throws a precondition error when f(base) is not on Mp.
bool check_admissible(const MapGerm& f, const ManifoldSpec& M, const ManifoldSpec& Mp, int order);

struct AdmissibilityDetail {
  bool maps_into = false;
  bool tangent_onto = false;
  bool admissible() const { return maps_into && tangent_onto; }
};
AdmissibilityDetail admissibility(const MapGerm& f, const ManifoldSpec& M, const ManifoldSpec& Mp, int order);

/// Whether the holomorphic curve t -> gamma(t) (exact polynomials in m
/// variables) lies in M identically.
bool contains_curve(const ManifoldSpec& spec, const std::vector<TruncatedSeries>& gamma);

/// Full analysis: validation, Levi tests, nondegeneracy order, minimality
/// and the determinacy order 2r(1+d) of the manifold viewed as a target.
AnalysisReport analyze(const ManifoldSpec& spec, int k_max, int s_max, std::uint64_t seed);

}  // namespace crjet

#endif  // CRJET_GEOMETRY_HPP
