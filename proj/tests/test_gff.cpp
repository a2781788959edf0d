#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "gffperc/gff.hpp"

using namespace gffperc;

namespace {

std::vector<FieldConfig> draw(const FieldSampler& s, std::uint64_t seed, int n) {
  std::vector<FieldConfig> out;
  out.reserve(n);
  for (int r = 0; r < n; ++r) out.push_back(s.sample(seed, r));
  return out;
}

std::vector<std::pair<VertexId, VertexId>> random_pairs(const BoxGeometry& box, int n,
                                                        std::mt19937& gen) {
  std::vector<std::pair<VertexId, VertexId>> out{{box.origin(), box.origin()}};
  const VertexSet inner = box.box(box.domain_radius() - 1);
  while (static_cast<int>(out.size()) < n)
    out.emplace_back(inner[gen() % inner.size()], inner[gen() % inner.size()]);
  return out;
}

double max_abs_z(const std::vector<CovarianceRow>& rows) {
  double m = 0;
  for (const auto& r : rows) m = std::max(m, std::abs(r.z_score));
  return m;
}

}  // namespace

TEST_SUITE("gff") {
  TEST_CASE("single free vertex has unit variance") {
    const auto box = make_box(3, 1, 1.0);
    SpectralSampler s(box);
    const auto fields = draw(s, 4, 20000);
    double ss = 0;
    for (const auto& f : fields) {
      ss += f[box.origin()] * f[box.origin()];
      for (VertexId v = 0; v < box.vertex_count(); ++v)
        if (v != box.origin()) REQUIRE(f[v] == 0.0);
    }
    const double var = ss / fields.size();
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / fields.size()));
  }

  TEST_CASE("zero on the absorbing set and deterministic") {
    const auto box = make_box(3, 3, 1.0);
    const VertexSet d = make_vertex_set({box.index(Point{1, 0, 0}), box.index(Point{0, -2, 1})});
    FactorSampler s(box, d);
    const FieldConfig a = s.sample(9, 3);
    const FieldConfig b = s.sample(9, 3);
    const FieldConfig c = s.sample(9, 4);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    for (VertexId v = 0; v < box.vertex_count(); ++v)
      if (a.is_absorbing(v)) CHECK(a[v] == 0.0);
    CHECK(a.is_absorbing(d[0]));
    CHECK(a.is_absorbing(box.box_boundary(3).front()));
    const FieldConfig neg = a.negated();
    for (VertexId v = 0; v < box.vertex_count(); ++v) CHECK(neg[v] == -a[v]);
  }

  TEST_CASE("spectral covariance") {
    const auto box = make_box(3, 4, 1.0);
    auto sampler = make_sampler(box, {});
    CHECK(dynamic_cast<const SpectralSampler*>(sampler.get()) != nullptr);
    std::mt19937 gen(21);
    const auto pairs = random_pairs(box, 20, gen);
    const auto rows = covariance_diagnostic(draw(*sampler, 2, 10000), pairs, killed_green(box, {}));
    CHECK(max_abs_z(rows) < 4.5);
  }

  TEST_CASE("factor covariance with interior absorbing vertices") {
    const auto box = make_box(3, 4, 1.0);
    const VertexSet d = make_vertex_set({box.index(Point{1, 1, 0}), box.index(Point{-2, 0, 0}),
                                         box.index(Point{0, 0, 2})});
    auto sampler = make_sampler(box, d);
    CHECK(dynamic_cast<const FactorSampler*>(sampler.get()) != nullptr);
    std::mt19937 gen(22);
    const auto pairs = random_pairs(box, 20, gen);
    const auto rows = covariance_diagnostic(draw(*sampler, 3, 10000), pairs, killed_green(box, d));
    CHECK(max_abs_z(rows) < 4.5);
  }

  TEST_CASE("spectral and factor samplers agree") {
    const auto box = make_box(3, 3, 1.0);
    SpectralSampler spectral(box);
    FactorSampler factor(box, {});
    const int n = 20000;
    const auto a = draw(spectral, 5, n);
    const auto b = draw(factor, 6, n);
    const VertexId o = box.origin();
    const VertexId e = box.index(Point{1, 0, 0});
    for (auto [x, y] : {std::pair{o, o}, std::pair{o, e}}) {
      double sa = 0, sb = 0, qa = 0, qb = 0;
      for (int i = 0; i < n; ++i) {
        const double pa = a[i][x] * a[i][y], pb = b[i][x] * b[i][y];
        sa += pa;
        sb += pb;
        qa += pa * pa;
        qb += pb * pb;
      }
      const double ma = sa / n, mb = sb / n;
      const double se = std::sqrt((qa / n - ma * ma + qb / n - mb * mb) / n);
      CHECK(std::abs(ma - mb) < 4.0 * se);
    }
  }

  TEST_CASE("field dump round trip") {
    const auto box = make_box(3, 2, 1.5);
    SpectralSampler s(box);
    const auto fields = draw(s, 7, 3);
    const auto path = std::filesystem::temp_directory_path() / "gffperc_dump_test.bin";
    write_field_dump(path, fields);
    const FieldDump dump = read_field_dump(path);
    std::filesystem::remove(path);
    CHECK(dump.dim == 3);
    CHECK(dump.side == box.side());
    REQUIRE(dump.fields.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(dump.fields[i] == fields[i].values);
  }
}
