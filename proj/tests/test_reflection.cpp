#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crjet/errors.hpp"
#include "crjet/reflection.hpp"
#include "fixtures.hpp"

using namespace crjet;
using GR = GaussianRational;

namespace {

const char* const kAutomorphisms[] = {"heis_identity.map", "heis_dilation.map", "heis_dilation3.map",
                                      "heis_rotation.map", "heis_translation.map", "fmob.map"};

ReflectionContext heis_context() {
  const auto heis = load_manifold("heis.cr");
  return make_context(heis, heis);
}

/// Germ of `src` at `point`, to `order` (rational maps need one).
MapGerm germ_at(MapSource src, const Point& point, int order) {
  src.base = point;
  return src.rational ? src.germ(order) : src.germ().truncated(order);
}

/// Order-l data of conj f(conj .) at chi.
MapGerm conjugate_germ_at(const MapSource& src, const Point& chi, int l) {
  return conjugate(germ_at(src, conj(chi), l));
}

}  // namespace

TEST_CASE("determinacy order") {
  const auto ctx = heis_context();
  CHECK(ctx.r == 1);
  CHECK(ctx.s == 2);
  CHECK(ctx.m == 2);
  CHECK(determinacy_order(ctx) == 4);
  CHECK(determinacy_order(make_context(load_manifold("ex41.cr"), load_manifold("ex41p.cr"))) == 6);
  CHECK(determinacy_order(2, 1) == 8);
  CHECK(make_context_with_order(load_manifold("heis.cr"), load_manifold("heis.cr"), 2).k == 8);
  try {
    make_context(load_manifold("heis.cr"), load_manifold("levi_flat.cr"), 4);
    FAIL("accepted a target that is not finitely nondegenerate");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::precondition);
  }
}

TEST_CASE("one reflection: closed-form oracles") {
  const auto ctx = heis_context();
  const Point zero{0, 0};
  const Point chi{1, 0};

  const auto fmob = load_map("fmob.map");
  const auto out = reflect_jet(ctx, jet_at(fmob.germ(2), 2), zero, chi, 1);
  CHECK(out.conjugated);
  CHECK(out.order == 1);
  CHECK(out.point == chi);
  CHECK(out.germ.value() == Point{1, 0});
  const CMatrix jac = out.germ.jacobian();
  CHECK(jac(0, 0) == GR(1));
  CHECK(jac(0, 1) == GR(1));
  CHECK(jac(1, 0) == GR(0));
  CHECK(jac(1, 1) == GR(1));

  const auto dil = load_map("heis_dilation.map").germ();
  const auto d2 = reflect_jet(ctx, jet_at(dil, 3), zero, chi, 2);
  CHECK(d2.germ.value() == Point{2, 0});
  CHECK(d2.germ.component(0) == TruncatedSeries::constant(2, 2, GR(2)) + GR(2) * TruncatedSeries::variable(2, 0, 2));
  CHECK(d2.germ.component(1) == GR(4) * TruncatedSeries::variable(2, 1, 2));

  const auto id = reflect_jet(ctx, jet_at(MapGerm::identity(zero, kExactOrder), 4), zero, chi, 3);
  CHECK(id.germ == MapGerm::identity(chi, 3));
}

TEST_CASE("one reflection: input order checks") {
  const auto ctx = heis_context();
  const auto fmob = load_map("fmob.map");
  CHECK_THROWS_AS(reflect_jet(ctx, jet_at(fmob.germ(2), 2), Point{0, 0}, Point{1, 0}, 2), Error);
  // (0, (1, 1)) is not a pair on the complexification.
  CHECK_THROWS_AS(reflect_jet(ctx, jet_at(fmob.germ(3), 3), Point{0, 0}, Point{1, 1}, 1), Error);
}

TEST_CASE("one reflection matches every fixture automorphism") {
  const auto ctx = heis_context();
  const auto cx = complexify(ctx.M);
  const std::vector<std::pair<Point, Point>> pairs = {
      {{0, 0}, {1, 0}},
      {{0, 0}, {GR::fraction(1, 2, -1, 3), 0}},
      {{1, GR(0, 2)}, {1, 0}},
      {{GR::fraction(1, 3), GR::fraction(1, 5)}, {GR::fraction(0, 1, -3, 10), 0}},
  };
  for (const auto& [z, chi] : pairs) {
    REQUIRE(on_complexification(cx, z, chi));
    for (const char* name : kAutomorphisms) {
      const auto src = load_map(name);
      for (int l = 0; l <= 3; ++l) {
        const auto fj = jet_at(germ_at(src, z, l + ctx.r), l + ctx.r);
        const auto out = reflect_jet(ctx, fj, z, chi, l);
        CHECK_MESSAGE(out.germ == conjugate_germ_at(src, chi, l), name << " l=" << l << " at " << to_string(z));
      }
    }
  }
}

TEST_CASE("reflection chains") {
  const auto ctx = heis_context();
  const auto cx = complexify(ctx.M);
  const auto fmob = load_map("fmob.map");

  const auto chain = chain_sample(cx, Point{0, 0}, 2, 5);
  std::vector<JetAt> transcript;
  const auto end = reflect_chain(ctx, jet_at(fmob.germ(6), 6), chain, 0, &transcript);
  CHECK_FALSE(end.conjugated);
  CHECK(end.order == 0);
  CHECK(end.germ.value() == fmob.evaluate(chain.points.back()));
  REQUIRE(transcript.size() == 2);
  CHECK(transcript[0].order == 1);
  CHECK(transcript[0].conjugated);

  // A one-step chain is a single reflection.
  ChainPoint one;
  one.points = {Point{0, 0}, Point{1, 0}};
  CHECK(reflect_chain(ctx, jet_at(fmob.germ(2), 2), one, 1).germ ==
        reflect_jet(ctx, jet_at(fmob.germ(2), 2), Point{0, 0}, Point{1, 0}, 1).germ);

  const auto id = MapGerm::identity(Point{0, 0}, kExactOrder);
  const auto long_chain = chain_sample(cx, Point{0, 0}, 4, 9);
  std::vector<JetAt> steps;
  reflect_chain(ctx, jet_at(id, 5), long_chain, 1, &steps);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    CHECK(steps[i].germ == MapGerm::identity(long_chain.points[i + 1], steps[i].order));
  }

  CHECK_THROWS_AS(reflect_chain(ctx, jet_at(fmob.germ(3), 3), long_chain, 0), Error);
}

TEST_CASE("double reflection returns the truncated jet") {
  const auto ctx = heis_context();
  const auto cx = complexify(ctx.M);
  for (const char* name : kAutomorphisms) {
    const auto src = load_map(name);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto sample = chain_sample(cx, Point{0, 0}, 1, seed);
      ChainPoint back;
      back.points = {Point{0, 0}, sample.points[1], Point{0, 0}};
      const int input = 5;
      const auto fj = jet_at(germ_at(src, Point{0, 0}, input), input);
      const auto out = reflect_chain(ctx, fj, back, input - 2 * ctx.r);
      CHECK_MESSAGE(out.germ == fj.germ.truncated(input - 2 * ctx.r), name << " seed " << seed);
    }
  }
}

TEST_CASE("reconstruction") {
  const auto ctx = heis_context();
  const auto fmob = load_map("fmob.map");
  const auto fk = jet_at(fmob.germ(ctx.k), ctx.k);
  const auto rec = reconstruct_at(ctx, fk, Point{GR::fraction(1, 3), GR::fraction(1, 5)}, 0);
  CHECK(rec.value == Point{GR::fraction(5, 12), GR::fraction(1, 4)});
  CHECK(rec.chain.length() == 4);
  CHECK(reconstruct_at(ctx, fk, Point{0, 0}, 0).value == Point{0, 0});

  const auto tr = load_map("heis_translation.map");
  const auto tk = jet_at(tr.germ().truncated(ctx.k), ctx.k);
  for (const auto& p : sample_reachable_points(ctx, 5, 17)) {
    CHECK(reconstruct_at(ctx, tk, p, 3).value == tr.evaluate(p));
  }

  try {
    reconstruct_at(ctx, jet_at(fmob.germ(3), 3), Point{GR::fraction(1, 3), GR::fraction(1, 5)}, 0);
    FAIL("reconstructed from a short jet");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::precondition);
  }
}

TEST_CASE("reachable points are reproducible") {
  const auto ctx = heis_context();
  CHECK(sample_reachable_points(ctx, 3, 4) == sample_reachable_points(ctx, 3, 4));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("determinacy verification") {
  const auto ctx = heis_context();
  const auto f = load_map("fmob_trunc6.map").germ();
  const auto same = verify_determinacy(ctx, f, f, 3, 1);
  CHECK(same.jets_equal);
  CHECK(same.reconstructions_equal);
  CHECK(same.samples.size() == 3);

  // Change the z w^4 coefficient (order 5).
  auto comps = f.components();
  comps[0].add_term(Multidegree{1, 4}, GR(7, 2));
  const MapGerm g(f.base(), comps);
  const auto pert = verify_determinacy(ctx, f, g, 3, 1);
  CHECK(pert.jets_equal);
  CHECK(pert.reconstructions_equal);

  const auto dil2 = load_map("heis_dilation.map").germ();
  const auto dil3 = load_map("heis_dilation3.map").germ();
  const auto diff = verify_determinacy(ctx, dil2, dil3, 2, 1);
  CHECK_FALSE(diff.jets_equal);
  CHECK(diff.first_difference == 1);
  CHECK_FALSE(diff.reconstructions_equal);

  const auto bad = parse_map("vars z w\nf1: 2*z\nf2: 2*w\n").germ();
  CHECK_THROWS_AS(verify_determinacy(ctx, dil2, bad, 1, 1), Error);
}
