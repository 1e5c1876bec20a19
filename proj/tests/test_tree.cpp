#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "mtspace/errors.hpp"
#include "mtspace/field.hpp"
#include "mtspace/merge_tree.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

namespace {

mts::ScalarField line_field(const std::vector<double>& values) {
  mts::ScalarField f;
  f.dims = {static_cast<int>(values.size())};
  f.values = values;
  return f;
}

std::vector<std::pair<std::int64_t, std::int64_t>> arcs_of(
    const mts::MergeTree& t) {
  std::vector<std::pair<std::int64_t, std::int64_t>> arcs;
  for (const auto& n : t.nodes)
    if (n.parent != -1)
      arcs.emplace_back(t.nodes[n.parent].vertex, n.vertex);
  std::sort(arcs.begin(), arcs.end());
  return arcs;
}

std::multiset<std::pair<double, double>> pair_values(const mts::Diagram& d) {
  std::multiset<std::pair<double, double>> out;
  for (const auto& p : d.pairs) out.insert({p.birth, p.death});
  return out;
}

}  // namespace

TEST_CASE("the join tree of the 1D example has the documented shape") {
  const mts::ScalarField f = line_field({3, 1, 2, 0});
  const mts::MergeTree t = mts::compute_merge_tree(f, mts::TreeKind::Join);
  CHECK(t.node_count() == 4);
  CHECK(t.leaf_count() == 2);
  CHECK(t.nodes[t.root].scalar == 3.0);
  CHECK(t.nodes[t.root].vertex == 0);

  std::set<std::int64_t> leaf_vertices;
  for (int i = 0; i < t.node_count(); ++i)
    if (t.is_leaf(i)) leaf_vertices.insert(t.nodes[i].vertex);
  CHECK(leaf_vertices == std::set<std::int64_t>{1, 3});

  const mts::Diagram d = mts::elder_pairs(t);
  CHECK(pair_values(d) ==
        std::multiset<std::pair<double, double>>{{1, 2}, {0, 3}});
}

TEST_CASE("the split tree of the 1D example pairs maxima with saddles") {
  const mts::ScalarField f = line_field({0, 3, 1, 5});
  const mts::MergeTree t = mts::compute_merge_tree(f, mts::TreeKind::Split);
  CHECK(t.node_count() == 4);
  CHECK(t.nodes[t.root].scalar == 0.0);
  const mts::Diagram d = mts::elder_pairs(t);
  CHECK(pair_values(d) ==
        std::multiset<std::pair<double, double>>{{1, 3}, {0, 5}});
}

TEST_CASE("the elder rule kills the younger component at each saddle") {
  const mts::ScalarField f = line_field({0, 5, 1, 4, 2, 6});
  const mts::MergeTree t = mts::compute_merge_tree(f, mts::TreeKind::Join);
  const mts::Diagram d = mts::elder_pairs(t);
  CHECK(pair_values(d) ==
        std::multiset<std::pair<double, double>>{{2, 4}, {1, 5}, {0, 6}});
}

TEST_CASE("merge trees match a brute-force component sweep") {
  std::vector<mts::ScalarField> fields;
  for (std::uint64_t s = 0; s < 10; ++s)
    fields.push_back(gen::random_field(s, {12}));
  for (std::uint64_t s = 10; s < 18; ++s)
    fields.push_back(gen::random_field(s, {4, 5}));
  for (std::uint64_t s = 18; s < 24; ++s)
    fields.push_back(gen::random_field(s, {3, 3, 3}));
  // Constant fields exercise the index tie-break everywhere.
  fields.push_back(line_field({1, 1, 1, 1, 1, 1}));
  {
    mts::ScalarField flat;
    flat.dims = {3, 3};
    flat.values.assign(9, 2.0);
    fields.push_back(flat);
  }

  for (const auto& f : fields) {
    for (mts::TreeKind kind : {mts::TreeKind::Join, mts::TreeKind::Split}) {
      const mts::MergeTree t = mts::compute_merge_tree(f, kind);
      CHECK_NOTHROW(t.validate());
      CHECK(arcs_of(t) == oracle::brute_merge_tree_arcs(f, kind));
    }
  }
}

TEST_CASE("merge tree validation rejects malformed structures") {
  const mts::ScalarField f = line_field({3, 1, 2, 0});
  const mts::MergeTree good = mts::compute_merge_tree(f, mts::TreeKind::Join);

  mts::MergeTree two_roots = good;
  two_roots.nodes[0].parent = -1;
  two_roots.nodes[0].children.clear();
  CHECK_THROWS_AS(two_roots.validate(), mts::ParseError);

  mts::MergeTree bad_parent = good;
  bad_parent.nodes[0].parent = 99;
  CHECK_THROWS_AS(bad_parent.validate(), mts::ParseError);

  mts::MergeTree no_nodes;
  CHECK_THROWS_AS(no_nodes.validate(), mts::EmptyTree);

  mts::MergeTree uphill = good;
  uphill.nodes[static_cast<std::size_t>(uphill.root)].scalar = -100.0;
  CHECK_THROWS_AS(uphill.validate(), mts::ParseError);
}

TEST_CASE("the branch decomposition of the join example is the nested pair") {
  const mts::ScalarField f = line_field({3, 1, 2, 0});
  const mts::MergeTree t = mts::compute_merge_tree(f, mts::TreeKind::Join);
  const mts::Bdt b = mts::build_bdt(t);
  REQUIRE(b.size() == 2);
  CHECK(b.kind == mts::TreeKind::Join);
  CHECK(b.root == 0);
  CHECK(b.branches[0].birth == 0.0);
  CHECK(b.branches[0].death == 3.0);
  CHECK(b.branches[0].birth_vertex == 3);
  CHECK(b.branches[0].death_vertex == 0);
  CHECK(b.branches[1].birth == 1.0);
  CHECK(b.branches[1].death == 2.0);
  CHECK(b.branches[1].parent == 0);
  CHECK(b.branches[1].birth_vertex == 1);
  CHECK(b.branches[1].death_vertex == 2);
  CHECK_NOTHROW(b.validate_nesting());
}

TEST_CASE("branch trees round trip through merge tree reconstruction") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const mts::Bdt b = gen::random_bdt(seed, 12);
    const mts::MergeTree t = mts::bdt_to_merge_tree(b);
    CHECK_NOTHROW(t.validate());
    const mts::Bdt back = mts::build_bdt(t);
    CHECK(mts::same_bdt(b, back));
  }
}

TEST_CASE("reconstruction assigns a valid sweep order") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const mts::Bdt b = gen::random_bdt(seed, 10);
    const mts::MergeTree t = mts::bdt_to_merge_tree(b);

    std::vector<int> seen(t.nodes.size(), 0);
    for (const auto& n : t.nodes) {
      REQUIRE(n.order >= 0);
      REQUIRE(n.order < t.node_count());
      ++seen[static_cast<std::size_t>(n.order)];
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    // Parents are swept after every descendant, whatever the kind.
    for (const auto& n : t.nodes)
      if (n.parent != -1) CHECK(t.nodes[n.parent].order > n.order);
  }
}

TEST_CASE("simplification prunes below the persistence cutoff") {
  const mts::ScalarField f =
      line_field({0.0, 10.0, 0.5, 9.0, 7.0, 8.0, 7.04, 7.5, 0.0});
  const mts::MergeTree t = mts::compute_merge_tree(f, mts::TreeKind::Split);
  const mts::Bdt full = mts::build_bdt(t);
  REQUIRE(full.size() == 4);  // chain (0,10) <- (0.5,9) <- (7,8) <- (7.04,7.5)

  // Range 10: threshold 0.05 cuts persistence < 0.5, dropping only the
  // 0.46-persistence branch.
  const mts::Bdt cut = mts::build_bdt(mts::simplify(t, 0.05));
  CHECK(cut.size() == 3);

  const mts::Bdt deeper = mts::build_bdt(mts::simplify(t, 0.3));
  CHECK(deeper.size() == 2);

  const mts::MergeTree same = mts::simplify(t, 0.0);
  CHECK(same.node_count() == t.node_count());

  CHECK_THROWS_AS(mts::simplify(t, -0.1), mts::InvalidParameter);
  CHECK_THROWS_AS(mts::simplify(t, 1.5), mts::InvalidParameter);
}

TEST_CASE("nesting validation flags escaping children") {
  const mts::Bdt escapes = gen::make_bdt({{0, 10, -1}, {5, 11, 0}});
  CHECK_THROWS_AS(escapes.validate_nesting(), mts::NestingViolation);

  const mts::Bdt inverted = gen::make_bdt({{4, 2, -1}});
  CHECK_THROWS_AS(inverted.validate_nesting(), mts::NestingViolation);

  CHECK_THROWS_AS(mts::bdt_to_merge_tree(escapes), mts::NestingViolation);
}

TEST_CASE("structural equality compares values and shape, not ids") {
  const mts::Bdt a = gen::make_bdt({{0, 10, -1}, {2, 5, 0}, {6, 9, 0}});
  CHECK(mts::same_bdt(a, a));

  const mts::Bdt renumbered = gen::relabel(a, {2, 0, 1});
  CHECK(mts::same_bdt(a, renumbered));

  mts::Bdt nudged = a;
  nudged.branches[1].birth = 2.05;
  CHECK(!mts::same_bdt(a, nudged));
  CHECK(mts::same_bdt(a, nudged, 0.1));

  const mts::Bdt reparented =
      gen::make_bdt({{0, 10, -1}, {2, 5, 0}, {2.5, 4, 1}});
  CHECK(!mts::same_bdt(a, reparented));
}
