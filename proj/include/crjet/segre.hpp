#ifndef CRJET_SEGRE_HPP
#define CRJET_SEGRE_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "crjet/geometry.hpp"
#include "crjet/map_germ.hpp"

namespace crjet {

/// The defining polynomials read as holomorphic in independent (z, chi).
struct Complexification {
  ManifoldSpec spec;
  std::vector<TruncatedSeries> rho_c;
};

Complexification complexify(const ManifoldSpec& spec);

bool on_complexification(const Complexification& cx, const Point& z, const Point& chi);

/// Segre variety in graph form around a center (z0, chi0) of the
/// complexification: z[solved] = phi(z[free] - z0[free], chi - chi0).
///
/// phi's variables are the n-d free displacements followed by the n
/// conjugate displacements; its value is z0[solved].
struct SegreGraph {
  Point z0;
  Point chi0;
  std::vector<std::size_t> free;
  std::vector<std::size_t> solved;
  MapGerm phi;
};

/// Lexicographically first d columns with an invertible minor of the
/// holomorphic differential at (z, chi).
std::vector<std::size_t> graph_split(const Complexification& cx, const Point& z, const Point& chi);

SegreGraph segre_graph(const Complexification& cx, const Point& z0, const Point& chi0, int order);

/// rho_c(z(u, chi), chi) with the graph substituted; zero to the graph's
/// order when the graph is correct.
std::vector<TruncatedSeries> graph_residual(const Complexification& cx, const SegreGraph& g);

/// chi -> coefficients of the r-jet (in the free variables) of the graph
/// function, at the z-point of the center.
struct JetOfSegreMap {
  Point z;
  Point chi;
  int r = 0;
  /// Multi-indices of the free variables, graded-lex; the map's components
  /// are ordered solved-component major, multi-index minor.
  std::vector<Multidegree> alphas;
  /// Series in the chi displacement (n variables), based at chi.
  MapGerm map;
};

JetOfSegreMap jet_of_segre(const Complexification& cx, const Point& z, const Point& chi, int r, int order);

/// Left inverse of a jet-of-Segre map: selected jet coordinates -> chi.
struct LeftInverse {
  std::vector<std::size_t> rows;
  MapGerm germ;
};

/// Selects the lexicographically first n rows of the jet-map Jacobian with
/// an invertible minor and inverts that square subsystem. Throws a rank
/// error when the map is not an immersion.
LeftInverse left_inverse_jetQ(const JetOfSegreMap& jq, int order);

/// Deterministic generator for workload `index` of a run seeded by `seed`.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index);

/// Small random Gaussian rational; numerators and denominators are bounded
/// by `bound`.
GaussianRational random_gaussian(std::mt19937_64& rng, long bound);

/// Alternating chain p0 = x, p1, p2, ... where odd entries are conjugate-type
/// points and every consecutive pair satisfies rho_c(z-type, chi-type) = 0.
struct ChainPoint {
  std::vector<Point> points;
  /// Coordinates solved at each link (the rest are random parameters).
  std::vector<std::size_t> solved;
  std::uint64_t seed = 0;
  int attempt = 0;

  std::size_t length() const { return points.empty() ? 0 : points.size() - 1; }
  static bool is_conjugate_slot(std::size_t i) { return i % 2 == 1; }
};

/// Checks every consecutive membership exactly.
bool chain_valid(const Complexification& cx, const ChainPoint& chain);

/// Coordinates to solve along chains: the lexicographically first d-subset
/// whose minor is invertible at the base and in which rho is affine (on the
/// z side and, by symmetry, on the chi side). Throws `unsupported` when no
/// such subset exists.
std::vector<std::size_t> chain_split(const Complexification& cx);

/// Random chain of length s from x. Resamples on singular links, with the
/// parameter bound growing per attempt.
ChainPoint chain_sample(const Complexification& cx, const Point& x, int s, std::uint64_t seed, int retries = 8);

/// Chain of even length `steps` from x ending at the z-type point `target`.
/// The last conjugate point is solved linearly from both of its
/// memberships, which needs rho affine in chi. Returns nullopt when the
/// sampled prefix cannot be joined to the target.
std::optional<ChainPoint> chain_to(const Complexification& cx, const Point& x, const Point& target, int steps,
                                   std::uint64_t seed, int attempt);

/// Rank of the Jacobian of (chain parameters -> endpoint) at a sampled
/// chain, maximized over the retries; a lower bound for the generic rank of
/// the Segre set of order s.
std::size_t segre_set_rank(const Complexification& cx, const Point& x, int s, std::uint64_t seed, int retries = 8);

/// The same rank at one given chain.
std::size_t chain_rank(const Complexification& cx, const ChainPoint& chain);

}  // namespace crjet

#endif  // CRJET_SEGRE_HPP
