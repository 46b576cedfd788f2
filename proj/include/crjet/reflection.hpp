#ifndef CRJET_REFLECTION_HPP
#define CRJET_REFLECTION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "crjet/geometry.hpp"
#include "crjet/map_germ.hpp"
#include "crjet/segre.hpp"

namespace crjet {

/// Source and target manifolds with the jet bookkeeping of the
/// reconstruction: chains of s = d + 1 reflections each way, m = s r and
/// k = 2m.
struct ReflectionContext {
  ManifoldSpec M;
  ManifoldSpec Mp;
  int r = 0;
  std::size_t d = 0;
  int s = 0;
  int m = 0;
  int k = 0;
};

/// r is the nondegeneracy order of Mp, searched up to k_max; throws a
/// precondition error when none is found.
ReflectionContext make_context(const ManifoldSpec& M, const ManifoldSpec& Mp, int k_max = 10);
ReflectionContext make_context_with_order(const ManifoldSpec& M, const ManifoldSpec& Mp, int r);

/// 2r(1 + d).
int determinacy_order(const ReflectionContext& ctx);
int determinacy_order(int r, std::size_t d);

/// Taylor data of f (or, when `conjugated`, of conj f(conj .)) at `point`.
struct JetAt {
  Point point;
  int order = 0;
  MapGerm germ;
  bool conjugated = false;
};

JetAt jet_at(const MapGerm& germ, int order);

/// One reflection: from the jet of f at z, of order >= l + r, the order-l
/// jet of conj f(conj .) at chi, for (z, chi) on the complexification of M.
///
/// Needs the target equations to be affine in the conjugate variables (the
/// value conj f(conj chi) is found by a linear solve); throws `unsupported`
/// otherwise, and `rank` when a splitting or the target Segre jet map
/// degenerates at this pair.
JetAt reflect_jet(const ReflectionContext& ctx, const JetAt& fj, const Point& z, const Point& chi, int l);

/// Applies reflect_jet along the chain, conjugating at every other step.
/// The input is first truncated to length * r + l. When `transcript` is
/// given, the jet after every step is appended to it.
JetAt reflect_chain(const ReflectionContext& ctx, const JetAt& fj, const ChainPoint& chain, int l,
                    std::vector<JetAt>* transcript = nullptr);

struct Reconstruction {
  Point value;
  /// Empty when the target is the base point itself.
  ChainPoint chain;
  /// Chains tried, including the successful one.
  int attempts = 0;
};

/// f(target) from the order-k jet at the base, along a chain of 2s
/// reflections ending at target. Resamples the whole chain on rank
/// failures, up to `retries` times.
Reconstruction reconstruct_at(const ReflectionContext& ctx, const JetAt& kjet, const Point& target, std::uint64_t seed,
                              int retries = 8);

/// Endpoints of random chains of length 2s from the base of M.
std::vector<Point> sample_reachable_points(const ReflectionContext& ctx, std::size_t count, std::uint64_t seed);

/// Per-workload seed derived from a run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct DeterminacySample {
  Point point;
  Point value_f;
  Point value_g;
  bool equal = false;
};

struct DeterminacyReport {
  int k = 0;
  bool jets_equal = false;
  /// Lowest order where the jets differ.
  std::optional<int> first_difference;
  std::vector<DeterminacySample> samples;
  bool reconstructions_equal = false;
};

/// Compares the order-k jets of f and g and their reconstructions at
/// sampled reachable points. Both maps must be admissible.
DeterminacyReport verify_determinacy(const ReflectionContext& ctx, const MapGerm& f, const MapGerm& g,
                                     std::size_t sample_count, std::uint64_t seed);

}  // namespace crjet

#endif  // CRJET_REFLECTION_HPP
