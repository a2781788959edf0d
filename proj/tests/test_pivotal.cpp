#include <functional>

#include "doctest.h"
#include "gffperc/pivotal.hpp"
#include "oracles.hpp"

using namespace gffperc;

namespace {

// Values +-1e3 on the chosen vertices, zero elsewhere; every edge with both
// endpoints marked and of the same sign opens with overwhelming probability.
FieldConfig painted(const BoxGeometry& box, const std::function<int(const Point&)>& paint) {
  FieldConfig f = oracle::white_field(box, 1);
  for (VertexId v = 0; v < box.vertex_count(); ++v)
    f.values[v] = f.is_absorbing(v) ? 0.0 : 1e3 * paint(box.point(v));
  return f;
}

EdgeId axis_edge(const BoxGeometry& box, int x, int axis = 0, int y = 0) {
  return box.edge_id(box.index(Point{x, y, 0}), axis);
}

}  // namespace

TEST_SUITE("pivotal") {
  TEST_CASE("bridge search matches edge deletion") {
    int nonempty = 0;
    for (int t = 0; t < 150; ++t) {
      const auto box = make_box(3, 4, t % 3 == 0 ? 1.0 : 2.0);
      const FieldConfig f = SpectralSampler(box).sample(77, t);
      const OpenEdgeSet edges = open_edges(f, EdgeOptions{t % 4 == 1 ? -0.2 : 0.0, -1});
      const ClusterLabeling lab = label_clusters(edges, f);
      for (int n : {2, 4}) {
        const auto fast = pivotal_edges(lab, edges, n);
        CHECK(fast == pivotal_bruteforce(edges, f, n));
        nonempty += !fast.empty();
        if (!one_arm_indicator(lab, n)) CHECK(fast.empty());
      }
    }
    CHECK(nonempty > 20);
  }

  TEST_CASE("a single path is pivotal along its whole length") {
    const auto box = make_box(3, 4, 2.0);
    const FieldConfig f = painted(box, [](const Point& p) {
      if (p[1] == 0 && p[2] == 0 && p[0] >= 0 && p[0] <= 4) return 1;
      return 0;
    });
    const OpenEdgeSet edges = open_edges(f);
    const ClusterLabeling lab = label_clusters(edges, f);
    REQUIRE(one_arm_indicator(lab, 4));
    const std::vector<EdgeId> want{axis_edge(box, 0), axis_edge(box, 1), axis_edge(box, 2),
                                   axis_edge(box, 3)};
    CHECK(pivotal_edges(lab, edges, 4) == want);
    CHECK(pivotal_bruteforce(edges, f, 4) == want);
    CHECK(pivotal_edges(lab, edges, 2) == std::vector<EdgeId>{axis_edge(box, 0), axis_edge(box, 1)});
    CHECK(pivotal_edges(lab, edges, 5).empty());
  }

  TEST_CASE("a second path removes the shared pivotal edges") {
    const auto box = make_box(3, 4, 2.0);
    const FieldConfig f = painted(box, [](const Point& p) {
      if (p[2] != 0 || p[0] < 0) return 0;
      if (p[1] == 0 && p[0] <= 4) return 1;
      if (p[1] == 1 && p[0] <= 2) return 1;
      return 0;
    });
    const OpenEdgeSet edges = open_edges(f);
    const ClusterLabeling lab = label_clusters(edges, f);
    const std::vector<EdgeId> want{axis_edge(box, 2), axis_edge(box, 3)};
    CHECK(pivotal_edges(lab, edges, 4) == want);
    CHECK(pivotal_bruteforce(edges, f, 4) == want);

    PivotalReport r = pivotal_report(lab, edges, 4, 0.5, 9);
    CHECK(r.one_arm);
    CHECK(r.replica == 9);
    CHECK(r.pivotal_count() == 2);
  }

  TEST_CASE("heterochromatic census on slabs") {
    const auto box = make_box(3, 4, 1.0);
    // Slabs x = -1 (+), x = 0 (-), x = 1 (+) inside B(2).
    const FieldConfig f = painted(box, [](const Point& p) {
      for (int a = 1; a < 3; ++a)
        if (p[a] < -2 || p[a] > 2) return 0;
      if (p[0] == -1 || p[0] == 1) return 1;
      if (p[0] == 0) return -1;
      return 0;
    });
    const OpenEdgeSet edges = open_edges(f);
    const ClusterLabeling lab = label_clusters(edges, f);
    const auto macro = macroscopic_clusters(lab, 3, 1.0);
    REQUIRE(macro.size() == 3);
    const auto census = heterochromatic_census(lab, 3, 1.0);
    CHECK(census.opposite_sign == 50);
    CHECK(census.same_sign == 0);
    CHECK(census.total() == 50);
    CHECK(census.edges.size() == 50);
    CHECK(heterochromatic_census(lab, 3, 0.5).total() == 50);
    // The slabs reach |x|_inf = 2, so they are not contained at radius 2.
    CHECK(heterochromatic_census(lab, 2, 1.0).total() == 0);

    // Same-sign neighbours kept apart by closing the edges between them.
    const FieldConfig g = painted(box, [](const Point& p) {
      for (int a = 1; a < 3; ++a)
        if (p[a] < -2 || p[a] > 2) return 0;
      return p[0] == -1 || p[0] == 0 ? 1 : 0;
    });
    OpenEdgeSet split = open_edges(g);
    for (VertexId v : box.box(2))
      if (box.coordinate(v, 0) == -1) split.set_state(box.edge_id(v, 0), EdgeState::Split);
    const ClusterLabeling lab2 = label_clusters(split, g);
    const auto c2 = heterochromatic_census(lab2, 3, 1.0);
    CHECK(c2.same_sign == 25);
    CHECK(c2.opposite_sign == 0);
  }

  TEST_CASE("two-arm events") {
    const auto box = make_box(3, 4, 2.0);
    const FieldConfig f = painted(box, [](const Point& p) {
      if (p[1] == 0 && p[2] == 0 && p[0] >= 0 && p[0] <= 5) return 1;
      if (p[1] == 0 && p[2] == 0 && p[0] < 0 && p[0] >= -5) return -1;
      return 0;
    });
    const OpenEdgeSet edges = open_edges(f);
    const ClusterLabeling lab = label_clusters(edges, f);
    const VertexId o = box.origin();
    const VertexId m = box.index(Point{-1, 0, 0});
    CHECK(two_arm_indicator(lab, o, m, 4));
    CHECK_FALSE(two_arm_indicator(lab, m, o, 4));
    CHECK_FALSE(two_arm_indicator(lab, o, o, 4));
    CHECK_FALSE(two_arm_indicator(lab, o, m, 6));
    CHECK_THROWS_AS(two_arm_indicator(lab, o, box.index(Point{5, 0, 0}), 4), std::invalid_argument);
  }
}
