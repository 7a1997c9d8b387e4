#include <gtest/gtest.h>

#include <array>
#include <sstream>

#include <random>
#include <set>

#include "vk/algebra/catalog.hpp"
#include "vk/voronoi/cell.hpp"
#include "vk/voronoi/cone.hpp"
#include "vk/voronoi/fan.hpp"
#include "vk/voronoi/fan_io.hpp"
#include "vk/voronoi/perfect.hpp"

using namespace vk;
using namespace vk::voronoi;
using vk::algebra::Catalog;
using vk::algebra::Elem;

namespace {

FormSpace space(const std::string& field, int n) { return FormSpace(Catalog::builtin().field(field), n); }

RatMatrix rat_matrix(std::initializer_list<std::initializer_list<long>> rows) {
  RatMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (long x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

// Box search oracle: minimum and number of minimal vectors with |v_i| <= R.
std::pair<Rat, std::size_t> box_minimum(const RatMatrix& g, long R) {
  const std::size_t n = g.rows();
  IVec v(n, Int(-R));
  std::optional<Rat> best;
  std::size_t count = 0;
  for (;;) {
    bool zero = std::all_of(v.begin(), v.end(), [](const Int& x) { return x == 0; });
    if (!zero) {
      Rat q = quad_form(g, v);
      if (!best || q < *best) {
        best = q;
        count = 0;
      }
      if (q == *best) ++count;
    }
    std::size_t k = 0;
    while (k < n && v[k] == R) v[k++] = -R;
    if (k == n) break;
    ++v[k];
  }
  return {*best, count};
}

IMat random_unimodular(std::mt19937_64& rng, const FormSpace& V, int steps) {
  const auto& F = V.field();
  std::uniform_int_distribution<int> pick(0, V.n() - 1), coef(-1, 1);
  OMat g(V.n(), std::vector<Elem>(V.n(), F.zero()));
  for (int i = 0; i < V.n(); ++i) g[i][i] = F.one();
  IMat m = V.from_o_matrix(g);
  for (int s = 0; s < steps; ++s) {
    int i = pick(rng), j = pick(rng);
    if (i == j) continue;
    Elem a(F.degree());
    for (auto& x : a) x = coef(rng);
    OMat e(V.n(), std::vector<Elem>(V.n(), F.zero()));
    for (int k = 0; k < V.n(); ++k) e[k][k] = F.one();
    e[i][j] = a;
    m = V.from_o_matrix(e) * m;
  }
  return m;
}

}  // namespace

TEST(FormSpace, Dimensions) {
  EXPECT_EQ(space("Q", 2).D(), 3);
  EXPECT_EQ(space("Q", 4).D(), 10);
  EXPECT_EQ(space("Q(i)", 2).D(), 4);
  EXPECT_EQ(space("Q(zeta5)", 2).D(), 8);
  EXPECT_THROW(space("cubic-23", 2), ConfigError);
  EXPECT_THROW(space("Q(sqrt-5)", 2), ConfigError);
}

TEST(FormSpace, QMapExamples) {
  auto V = space("Q", 2);
  FMat q = V.q_matrix(IVec{1, 0});
  EXPECT_EQ(q[0][0][0], 1);
  EXPECT_EQ(q[0][1][0], 0);
  EXPECT_EQ(q[1][1][0], 0);
  EXPECT_THROW(V.q_matrix(IVec{0, 0}), InvalidInput);

  auto W = space("Q(i)", 2);
  FMat h = W.q_matrix(IVec{1, 0, 0, 1});  // (1, i)
  EXPECT_EQ(h[0][0], (RElem{1, 0}));
  EXPECT_EQ(h[0][1], (RElem{0, -1}));
  EXPECT_EQ(h[1][0], (RElem{0, 1}));
  EXPECT_EQ(h[1][1], (RElem{1, 0}));
  auto blocks = W.place_blocks(h);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_NEAR(std::abs(blocks[0][0][1] - std::complex<long double>(0, -1)), 0.0, 1e-15);
}

TEST(FormSpace, QMapEquivarianceExample) {
  auto V = space("Q", 2);
  const auto& F = V.field();
  OMat g{{F.one(), F.one()}, {F.zero(), F.one()}};
  IVec x{0, 1};
  IVec gx = mat_vec(V.from_o_matrix(g), x);
  EXPECT_EQ(V.q_matrix(gx), V.act(g, V.q_matrix(x)));
}

TEST(FormSpace, QMapEquivarianceRandom) {
  std::mt19937_64 rng(7);
  for (const char* f : {"Q", "Q(i)", "Q(sqrt-3)", "Q(zeta5)"}) {
    auto V = space(f, 2);
    std::uniform_int_distribution<int> c(-3, 3);
    for (int t = 0; t < 50; ++t) {
      IMat m = random_unimodular(rng, V, 6);
      OMat g = V.to_o_matrix(m);
      EXPECT_EQ(V.from_o_matrix(g), m);
      IVec x(V.N());
      for (auto& e : x) e = c(rng);
      if (std::all_of(x.begin(), x.end(), [](const Int& e) { return e == 0; })) x[0] = 1;
      EXPECT_EQ(V.q_matrix(mat_vec(m, x)), V.act(g, V.q_matrix(x))) << f;
      // Ray coordinates compute the pairing with the basis forms.
      EXPECT_EQ(V.coordinates(V.q_matrix(x)).size(), static_cast<std::size_t>(V.D()));
    }
  }
}

TEST(FormSpace, ValueIsTraceOfHermitianForm) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> c(-3, 3);
  for (const char* f : {"Q(i)", "Q(sqrt-7)", "Q(zeta5)"}) {
    auto V = space(f, 2);
    RVec coords(V.D());
    for (auto& x : coords) x = c(rng);
    FMat h = V.hermitian(coords);
    EXPECT_EQ(V.coordinates(h), coords);
    IVec w(V.N());
    for (auto& x : w) x = c(rng);
    // Tr(w^* H w) computed entrywise.
    RElem s = V.rzero();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        s = V.radd(s, V.rmul(V.rconj(V.relem(V.entry(w, i))), V.rmul(h[i][j], V.relem(V.entry(w, j)))));
    EXPECT_EQ(V.value(coords, w), V.rtrace(s)) << f;
  }
}

TEST(ShortVectors, MatchBoxSearch) {
  auto hex = rat_matrix({{2, 1}, {1, 2}});
  auto mv = minimal_vectors_of_gram(hex);
  EXPECT_EQ(mv.minimum, 2);
  EXPECT_EQ(mv.vectors.size(), 6u);
  auto oracle = box_minimum(hex, 2);
  EXPECT_EQ(oracle.first, mv.minimum);
  EXPECT_EQ(oracle.second, mv.vectors.size());

  auto id = minimal_vectors_of_gram(RatMatrix::identity(2));
  EXPECT_EQ(id.minimum, 1);
  EXPECT_EQ(id.vectors, (std::vector<IVec>{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}));

  auto d4 = rat_matrix({{2, -1, 0, 0}, {-1, 2, -1, -1}, {0, -1, 2, 0}, {0, -1, 0, 2}});
  auto m4 = minimal_vectors_of_gram(d4);
  EXPECT_EQ(m4.vectors.size(), 24u);
  auto o4 = box_minimum(d4, 2);
  EXPECT_EQ(o4.first, m4.minimum);
  EXPECT_EQ(o4.second, 24u);
}

TEST(ShortVectors, RandomFormsMatchBoxSearch) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> c(-2, 2);
  for (int t = 0; t < 30; ++t) {
    RatMatrix b(3, 3);
    for (auto i = 0; i < 3; ++i)
      for (auto j = 0; j < 3; ++j) b(i, j) = c(rng) + (i == j ? 3 : 0);
    RatMatrix g = b.transpose() * b;
    if (determinant(g) == 0) continue;
    auto mv = minimal_vectors_of_gram(g);
    // |v_i| <= sqrt(m (g^-1)_ii) for every v with g[v] <= m.
    RatMatrix inv = SpanFrame::inverse(g);
    Rat m = std::min({g(0, 0), g(1, 1), g(2, 2)});
    double r2 = 0;
    for (int i = 0; i < 3; ++i) r2 = std::max(r2, Rat(m * inv(i, i)).get_d());
    auto o = box_minimum(g, static_cast<long>(std::ceil(std::sqrt(r2))));
    EXPECT_EQ(mv.minimum, o.first);
    EXPECT_EQ(mv.vectors.size(), o.second);
    for (const auto& v : mv.vectors) EXPECT_EQ(quad_form(g, v), mv.minimum);
  }
}

TEST(ShortVectors, RejectsIndefinite) {
  try {
    minimal_vectors_of_gram(rat_matrix({{1, 2}, {2, 1}}));
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("minor 2"), std::string::npos);
  }
}

TEST(Perfect, Examples) {
  auto V = space("Q", 2);
  RVec hex{2, 1, 2};  // 2(x^2 + xy + y^2) on the basis (x^2, 2xy, y^2)
  EXPECT_EQ(V.value(hex, IVec{1, -1}), 2);
  EXPECT_TRUE(is_perfect(V, hex));
  EXPECT_FALSE(is_perfect(V, V.identity_form()));
  auto one = space("Q", 1);
  EXPECT_TRUE(is_perfect(one, one.identity_form()));
  auto W = space("Q(i)", 1);
  EXPECT_TRUE(is_perfect(W, W.identity_form()));
}

TEST(Perfect, PerfectionReachesPerfectForm) {
  for (auto [f, n] : std::vector<std::pair<const char*, int>>{{"Q", 2}, {"Q", 3}, {"Q", 4}, {"Q(i)", 2}}) {
    auto V = space(f, n);
    RVec p = perfection(V, V.identity_form());
    EXPECT_TRUE(is_perfect(V, p)) << f << " " << n;
    EXPECT_EQ(minimal_vectors(V, p).minimum, minimal_vectors(V, V.identity_form()).minimum);
  }
}

TEST(Perfect, ClassCountsOverQ) {
  std::vector<std::size_t> expected{1, 1, 2};
  for (int n = 2; n <= 4; ++n) {
    auto V = space("Q", n);
    auto forms = enumerate_perfect_forms(V);
    EXPECT_EQ(forms.size(), expected[n - 2]) << n;
    std::set<std::size_t> counts;
    for (const auto& pf : forms) {
      EXPECT_TRUE(is_perfect(V, pf.coords));
      counts.insert(pf.minimal_vectors.size());
      for (auto nb : pf.neighbors) EXPECT_LT(nb, forms.size());
    }
    // Independent cross-check: distinct minimal vector counts.
    EXPECT_EQ(counts.size(), forms.size());
  }
}

TEST(Cone, FareyTriangle) {
  ConeFaces c({{1, 0, 0}, {0, 0, 1}, {1, 1, 1}}, {1, 0, 1});
  auto f = c.facets(c.all());
  EXPECT_EQ(f.size(), 3u);
  for (const auto& x : f) EXPECT_EQ(x.rays.count(), 2u);
}

TEST(Cone, CubeFaces) {
  std::vector<IVec> rays;
  for (int a : {-1, 1})
    for (int b : {-1, 1})
      for (int c : {-1, 1}) rays.push_back({a, b, c, 3});
  ConeFaces cone(rays, {0, 0, 0, 1});
  auto f = cone.facets(cone.all());
  EXPECT_EQ(f.size(), 6u);
  std::set<Bits> edges;
  for (const auto& x : f) {
    EXPECT_EQ(x.rays.count(), 4u);
    for (const auto& e : cone.facets(x.rays)) edges.insert(e.rays);
  }
  EXPECT_EQ(edges.size(), 12u);
}

TEST(Fan, RationalPlaneIsFareyTriangle) {
  auto V = space("Q", 2);
  Fan fan = cell_complex(V);
  ASSERT_EQ(fan.orbit_count(2), 1u);
  EXPECT_EQ(fan.orbit_count(1), 1u);
  EXPECT_EQ(fan.orbit_count(0), 0u);
  const auto& top = fan.by_dim[2][0];
  KoecherCell farey = make_cell(V, {{1, 0}, {0, 1}, {1, 1}});
  EXPECT_EQ(farey.rays, (std::vector<IVec>{{0, 0, 1}, {1, 0, 0}, {1, 2, 1}}));
  auto g = equivalent_cells(V, top.cell, farey);
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(transform_cell(V, *g, top.cell).rays, farey.rays);
  EXPECT_EQ(top.stab.elements.size(), 12u);
}

TEST(Fan, GaussianPlaneIsOctahedron) {
  auto V = space("Q(i)", 2);
  Fan fan = cell_complex(V);
  ASSERT_EQ(fan.orbit_count(3), 1u);
  const auto& top = fan.by_dim[3][0];
  EXPECT_EQ(top.cell.size(), 6u);
  // Cusps infinity, 0, 1, i, 1+i, (1+i)/2 as primitive vectors (x, y) of x/y;
  // (1+i)/2 = 1/(1-i).
  KoecherCell octa = make_cell(V, {{1, 0, 0, 0}, {0, 0, 1, 0}, {1, 0, 1, 0}, {0, 1, 1, 0}, {1, 1, 1, 0}, {1, 0, 1, -1}});
  auto g = equivalent_cells(V, top.cell, octa);
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(transform_cell(V, *g, top.cell).rays, octa.rays);
}

namespace {

// Gaussian integers as (re, im) pairs.
using G = std::array<long, 2>;
G gmul(G a, G b) { return {a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]}; }
G gadd(G a, G b) { return {a[0] + b[0], a[1] + b[1]}; }
G gsub(G a, G b) { return {a[0] - b[0], a[1] - b[1]}; }
bool gunit(G a) { return a[0] * a[0] + a[1] * a[1] == 1; }

// Canonical form of a vector modulo the units 1, i, -1, -i.
std::array<long, 4> gnorm(G x, G y) {
  std::array<long, 4> best{};
  G u{1, 0};
  for (int k = 0; k < 4; ++k) {
    G a = gmul(u, x), b = gmul(u, y);
    std::array<long, 4> c{a[0], a[1], b[0], b[1]};
    if (k == 0 || c > best) best = c;
    u = gmul(u, G{0, 1});
  }
  return best;
}

// Number of matrices over Z (entries in [-R, R]) or Z[i] (real and imaginary
// parts in [-R, R]) with unit determinant permuting the given vectors up to units.
std::size_t brute_stabilizer_gaussian(const std::vector<std::array<G, 2>>& vs, long R, bool real_only) {
  std::set<std::array<long, 4>> target;
  for (const auto& v : vs) target.insert(gnorm(v[0], v[1]));
  std::vector<G> entries;
  for (long a = -R; a <= R; ++a)
    for (long b = -R; b <= R; ++b)
      if (!real_only || b == 0) entries.push_back({a, b});
  std::size_t count = 0;
  for (auto a : entries)
    for (auto b : entries)
      for (auto c : entries)
        for (auto d : entries) {
          if (!gunit(gsub(gmul(a, d), gmul(b, c)))) continue;
          bool ok = true;
          for (const auto& v : vs) {
            if (!target.count(gnorm(gadd(gmul(a, v[0]), gmul(b, v[1])), gadd(gmul(c, v[0]), gmul(d, v[1]))))) {
              ok = false;
              break;
            }
          }
          if (ok) ++count;
        }
  return count;
}

void expect_group(const FormSpace& V, const KoecherCell& c, const Stabilizer& st) {
  auto less = [](const IMat& x, const IMat& y) { return x.data() < y.data(); };
  std::set<IMat, decltype(less)> elems(less);
  for (const auto& g : st.elements) elems.insert(g);
  ASSERT_EQ(elems.size(), st.elements.size());
  const IMat id = IMat::identity(V.N());
  EXPECT_TRUE(elems.count(id));
  for (const auto& g : st.elements) {
    EXPECT_EQ(transform_cell(V, g, c).rays, c.rays);
    bool has_inverse = false;
    for (const auto& h : st.elements) {
      EXPECT_TRUE(elems.count(g * h));
      if (g * h == id) has_inverse = true;
    }
    EXPECT_TRUE(has_inverse);
  }
}

}  // namespace

TEST(Stabilizer, FareyTriangleMatchesBruteForce) {
  auto V = space("Q", 2);
  KoecherCell farey = make_cell(V, {{1, 0}, {0, 1}, {1, 1}});
  auto st = stabilizer(V, farey);
  EXPECT_EQ(st.elements.size(), 12u);
  std::vector<std::array<G, 2>> vs{{G{1, 0}, G{0, 0}}, {G{0, 0}, G{1, 0}}, {G{1, 0}, G{1, 0}}};
  EXPECT_EQ(brute_stabilizer_gaussian(vs, 2, true), 12u);
  expect_group(V, farey, st);
  // The generators generate the whole group.
  EXPECT_LE(st.generators.size(), 3u);
}

TEST(Stabilizer, OctahedronMatchesBruteForce) {
  auto V = space("Q(i)", 2);
  KoecherCell octa = make_cell(V, {{1, 0, 0, 0}, {0, 0, 1, 0}, {1, 0, 1, 0}, {0, 1, 1, 0}, {1, 1, 1, 0}, {1, 0, 1, -1}});
  auto st = stabilizer(V, octa);
  std::vector<std::array<G, 2>> vs{{G{1, 0}, G{0, 0}}, {G{0, 0}, G{1, 0}}, {G{1, 0}, G{1, 0}},
                                   {G{0, 1}, G{1, 0}}, {G{1, 1}, G{1, 0}}, {G{1, 0}, G{1, -1}}};
  const std::size_t brute = brute_stabilizer_gaussian(vs, 2, false);
  EXPECT_EQ(st.elements.size(), brute);
  // Rotations of the octahedron (24) times the four scalar units.
  EXPECT_EQ(st.elements.size(), 96u);
  expect_group(V, octa, st);
}

TEST(Stabilizer, GroupAxiomsOnAllFanCells) {
  for (auto [f, n] : std::vector<std::pair<const char*, int>>{{"Q", 3}, {"Q(sqrt-3)", 2}, {"Q(sqrt-7)", 2}}) {
    auto V = space(f, n);
    Fan fan = cell_complex(V);
    for (const auto& level : fan.by_dim)
      for (const auto& o : level) {
        expect_group(V, o.cell, o.stab);
        EXPECT_EQ(o.stab_sign.size(), o.stab.elements.size());
      }
  }
}

TEST(Equivalence, PlantedAndTrivialCases) {
  std::mt19937_64 rng(5);
  for (auto [f, n] : std::vector<std::pair<const char*, int>>{{"Q", 3}, {"Q(i)", 2}, {"Q(sqrt-2)", 2}}) {
    auto V = space(f, n);
    Fan fan = cell_complex(V);
    for (const auto& level : fan.by_dim)
      for (const auto& o : level) {
        auto self = equivalent_cells(V, o.cell, o.cell);
        ASSERT_TRUE(self.has_value());
        EXPECT_EQ(transform_cell(V, *self, o.cell).rays, o.cell.rays);
        IMat gamma = random_unimodular(rng, V, 8);
        KoecherCell image = transform_cell(V, gamma, o.cell);
        auto g = equivalent_cells(V, o.cell, image);
        ASSERT_TRUE(g.has_value()) << f << " " << o.cell.describe();
        EXPECT_EQ(transform_cell(V, *g, o.cell).rays, image.rays);
      }
    // Cells with different ray counts are never equivalent.
    const auto& top = fan.by_dim[fan.top_dim()][0].cell;
    const auto& low = fan.by_dim[fan.min_dim()][0].cell;
    EXPECT_FALSE(equivalent_cells(V, top, low).has_value());
  }
}

TEST(Orientation, CharacterExamples) {
  auto V = space("Q", 2);
  KoecherCell farey = make_cell(V, {{1, 0}, {0, 1}, {1, 1}});
  IMat minus = IMat::identity(2);
  minus(0, 0) = -1;
  minus(1, 1) = -1;
  EXPECT_EQ(orientation_character(V, farey, minus), 1);
  KoecherCell edge = make_cell(V, {{1, 0}, {0, 1}});
  EXPECT_EQ(orientation_character(V, edge, minus), 1);
  // Swapping e1 and e2 transposes two rays and fixes the third.
  IMat swap(2, 2, Int(0));
  swap(0, 1) = 1;
  swap(1, 0) = 1;
  EXPECT_EQ(orientation_character(V, farey, swap), -1);
  EXPECT_EQ(orientation_character(V, edge, swap), -1);
  // A 3-cycle of the rays is even.
  IMat cyc(2, 2, Int(0));
  cyc(0, 1) = -1;
  cyc(1, 0) = 1;
  cyc(1, 1) = -1;
  ASSERT_EQ(transform_cell(V, cyc, farey).rays, farey.rays);
  EXPECT_EQ(orientation_character(V, farey, cyc), 1);
  IMat shear = IMat::identity(2);
  shear(0, 1) = 1;
  EXPECT_THROW(orientation_character(V, farey, shear), InvalidInput);
}

TEST(Fan, OrbitCountsQ3MatchSubsetOracle) {
  auto V = space("Q", 3);
  Fan fan = cell_complex(V);
  const auto& top = fan.by_dim[5][0].cell;
  // The top cell is a simplicial cone, so every subset of its rays spans a face.
  ASSERT_EQ(top.size(), 6u);
  std::vector<std::vector<KoecherCell>> orbits(6);
  for (unsigned mask = 1; mask < 64; ++mask) {
    std::vector<IVec> ws;
    for (int i = 0; i < 6; ++i)
      if (mask >> i & 1) ws.push_back(top.reps[i]);
    if (!V.spans(ws)) continue;
    KoecherCell c = make_cell(V, ws);
    auto& bucket = orbits[c.dim];
    bool found = false;
    for (const auto& o : bucket)
      if (equivalent_cells(V, o, c)) found = true;
    if (!found) bucket.push_back(c);
  }
  for (int k = 0; k < 6; ++k) EXPECT_EQ(fan.orbit_count(k), orbits[k].size()) << k;
  EXPECT_EQ(fan.orbit_count(2), 1u);
  EXPECT_EQ(fan.orbit_count(3), 2u);
  EXPECT_EQ(fan.orbit_count(4), 1u);
  EXPECT_EQ(fan.orbit_count(5), 1u);
}

TEST(Fan, IncidenceIsConsistent) {
  for (auto [f, n] : std::vector<std::pair<const char*, int>>{{"Q", 3}, {"Q(i)", 2}, {"Q(sqrt-11)", 2}}) {
    auto V = space(f, n);
    Fan fan = cell_complex(V);
    std::size_t links = 0, cofaces = 0;
    for (int k = 0; k <= fan.top_dim(); ++k) {
      for (std::size_t oi = 0; oi < fan.by_dim[k].size(); ++oi) {
        const auto& o = fan.by_dim[k][oi];
        EXPECT_EQ(o.cell.dim, k);
        EXPECT_TRUE(V.spans(o.cell.reps));
        cofaces += o.cofaces.size();
        for (std::size_t fi = 0; fi < o.facets.size(); ++fi) {
          const auto& link = o.facets[fi];
          ++links;
          ASSERT_GE(k, 1);
          const auto& child = fan.by_dim[k - 1][link.orbit];
          EXPECT_EQ(child.cell.dim, k - 1);
          EXPECT_EQ(transform_cell(V, link.map, child.cell).rays, sub_cell(V, o.cell, link.rays).rays);
          EXPECT_TRUE(link.sign == 1 || link.sign == -1);
          auto& cf = child.cofaces;
          EXPECT_NE(std::find(cf.begin(), cf.end(), std::make_pair(oi, fi)), cf.end());
        }
      }
    }
    EXPECT_EQ(links, cofaces);
  }
}

TEST(Perfect, WalkIsClosed) {
  auto V = space("Q", 4);
  auto forms = enumerate_perfect_forms(V);
  ASSERT_EQ(forms.size(), 2u);
  for (const auto& pf : forms) {
    ConeFaces cone(pf.pyramid.rays, V.identity_form());
    auto facets = cone.ambient_facets();
    ASSERT_EQ(pf.neighbors.size(), facets.size());
    // Minimal vectors attain the minimum and are closed under negation.
    for (const auto& v : pf.minimal_vectors) {
      EXPECT_EQ(V.value(pf.coords, v), pf.minimum);
      IVec neg = v;
      for (auto& x : neg) x = -x;
      EXPECT_TRUE(std::binary_search(pf.minimal_vectors.begin(), pf.minimal_vectors.end(), neg));
    }
  }
  // The two classes are A4 and D4, with 20 and 24 minimal vectors.
  std::set<std::size_t> counts{forms[0].minimal_vectors.size(), forms[1].minimal_vectors.size()};
  EXPECT_EQ(counts, (std::set<std::size_t>{20, 24}));
}

TEST(Perfect, BudgetErrorNamesFrontier) {
  auto V = space("Q", 4);
  try {
    enumerate_perfect_forms(V, WalkOptions{1});
    FAIL();
  } catch (const BudgetExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("frontier"), std::string::npos);
  }
}

TEST(FanCache, RoundTrip) {
  auto V = space("Q(i)", 2);
  Fan fan = cell_complex(V);
  std::stringstream ss;
  save_fan(ss, fan, 0xabcdefULL);
  Fan back = load_fan(ss, V, 0xabcdefULL);
  ASSERT_EQ(back.by_dim.size(), fan.by_dim.size());
  for (std::size_t k = 0; k < fan.by_dim.size(); ++k) {
    ASSERT_EQ(back.by_dim[k].size(), fan.by_dim[k].size());
    for (std::size_t i = 0; i < fan.by_dim[k].size(); ++i) {
      const auto& a = fan.by_dim[k][i];
      const auto& b = back.by_dim[k][i];
      EXPECT_EQ(a.cell.reps, b.cell.reps);
      EXPECT_EQ(a.stab.elements, b.stab.elements);
      EXPECT_EQ(a.stab.generators, b.stab.generators);
      EXPECT_EQ(a.stab_sign, b.stab_sign);
      EXPECT_EQ(a.orientable, b.orientable);
      EXPECT_EQ(a.cofaces, b.cofaces);
      ASSERT_EQ(a.facets.size(), b.facets.size());
      for (std::size_t f = 0; f < a.facets.size(); ++f) {
        EXPECT_EQ(a.facets[f].orbit, b.facets[f].orbit);
        EXPECT_EQ(a.facets[f].sign, b.facets[f].sign);
        EXPECT_EQ(a.facets[f].rays, b.facets[f].rays);
        EXPECT_EQ(a.facets[f].map, b.facets[f].map);
      }
    }
  }
  EXPECT_EQ(back.perfect.size(), fan.perfect.size());
  EXPECT_EQ(back.perfect[0].coords, fan.perfect[0].coords);

  std::stringstream stale;
  save_fan(stale, fan, 1);
  EXPECT_THROW(load_fan(stale, V, 2), ConfigError);
  std::stringstream truncated(ss.str().substr(0, 40));
  EXPECT_THROW(load_fan(truncated, V, 0xabcdefULL), ConfigError);
  std::stringstream other;
  save_fan(other, fan, 7);
  EXPECT_THROW(load_fan(other, space("Q(sqrt-3)", 2), 7), ConfigError);
}
