#include <doctest.h>

#include <functional>
#include <random>
#include <sstream>

#include "sparsepdo/dyadic.hpp"

using namespace sparsepdo;

namespace {

// Bipartite b-matching by augmenting paths: cube i needs demand[i] distinct cells.
bool matching_oracle(const std::vector<std::vector<Index>>& cells, const std::vector<int>& demand, Index n_cells) {
  std::vector<int> slot_cube;
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (int d = 0; d < demand[i]; ++d) slot_cube.push_back(int(i));
  std::vector<int> cell_slot(std::size_t(n_cells), -1);
  for (std::size_t s = 0; s < slot_cube.size(); ++s) {
    std::vector<char> seen(std::size_t(n_cells), 0);
    std::function<bool(int)> augment = [&](int slot) {
      for (Index c : cells[slot_cube[slot]]) {
        if (seen[c]) continue;
        seen[c] = 1;
        if (cell_slot[c] < 0 || augment(cell_slot[c])) {
          cell_slot[c] = slot;
          return true;
        }
      }
      return false;
    };
    if (!augment(int(s))) return false;
  }
  return true;
}

CubeFamily random_family(std::mt19937_64& rng, const Lattice& lat, int count, int min_scale) {
  const int p = lat.length_log2();
  std::uniform_int_distribution<int> scale(min_scale, p);
  std::uniform_int_distribution<int> shift(0, 2);
  const GridShift v(1, {shift(rng), 0});
  std::vector<DyadicCube> cubes;
  for (int i = 0; i < count; ++i) {
    const int k = scale(rng);
    std::uniform_int_distribution<std::int64_t> idx(0, (std::int64_t(1) << (p - k)) - 1);
    cubes.emplace_back(v, k, std::array<std::int64_t, 2>{idx(rng), 0});
  }
  return CubeFamily(cubes, p);
}

std::vector<DyadicCube> complete_tree(const DyadicCube& root, int depth) {
  std::vector<DyadicCube> out{root}, level{root};
  for (int d = 0; d < depth; ++d) {
    std::vector<DyadicCube> next;
    for (const auto& q : level)
      for (const auto& c : children(q)) next.push_back(c);
    out.insert(out.end(), next.begin(), next.end());
    level = next;
  }
  return out;
}

std::vector<DyadicCube> checkerboard(const DyadicCube& root, int levels) {
  std::vector<DyadicCube> out{root};
  DyadicCube cur = root;
  for (int d = 0; d < levels; ++d) {
    cur = children(cur).front();
    out.push_back(cur);
  }
  return out;
}

}  // namespace

TEST_CASE("children") {
  const DyadicCube q(GridShift::zero(1), 0, {0, 0});
  auto ch = children(q);
  REQUIRE(ch.size() == 2);
  CHECK(ch[0] == DyadicCube(GridShift::zero(1), -1, {0, 0}));
  CHECK(ch[1] == DyadicCube(GridShift::zero(1), -1, {1, 0}));
  CHECK(children(DyadicCube(GridShift::zero(2), 0, {0, 0})).size() == 4);

  for (const auto& v : GridShift::all(2)) {
    for (int k = -3; k <= 3; ++k) {
      const DyadicCube p(v, k, {2, -1});
      auto kids = children(p);
      double total = 0.0;
      for (const auto& c : kids) {
        CHECK(c.shift() == v);
        CHECK(c.scale() == k - 1);
        CHECK(p.contains(c));
        CHECK(c.parent() == p);
        total += c.measure();
      }
      CHECK(total == p.measure());
      for (std::size_t a = 0; a < kids.size(); ++a)
        for (std::size_t b = a + 1; b < kids.size(); ++b) CHECK_FALSE(kids[a].intersects(kids[b]));
    }
  }
}

TEST_CASE("same-scale cubes are disjoint") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> idx(-50, 50);
  std::uniform_int_distribution<int> scale(-40, 20), sh(0, 2);
  for (int t = 0; t < 2000; ++t) {
    const GridShift v(2, {sh(rng), sh(rng)});
    const int k = scale(rng);
    const DyadicCube a(v, k, {idx(rng), idx(rng)}), b(v, k, {idx(rng), idx(rng)});
    CHECK(a.intersects(b) == (a == b));
  }
}

TEST_CASE("one-third trick cover") {
  auto small = one_third_trick_cover({0.5, 0}, 0.1, 1);
  CHECK(small.sidelength() <= 1.0);
  CHECK(compare(small.left(0), 0.4) <= 0);
  CHECK(compare(small.right(0), 0.6) > 0);

  // Exhaustive scan over shifts and scales k in [-8, 2] for the smallest cube.
  const double c = 0.5, rad = 0.01;
  int best = 100;
  for (const auto& v : GridShift::all(1))
    for (int k = -8; k <= 2; ++k)
      for (std::int64_t m = -8; m <= 300; ++m) {
        DyadicCube q(v, k, {m, 0});
        if (compare(q.left(0), c - rad) <= 0 && compare(q.right(0), c + rad) > 0) best = std::min(best, k);
      }
  const auto cover = one_third_trick_cover({c, 0}, rad, 1);
  CHECK(cover.scale() == best);
  CHECK(cover.shift().v[0] != 0);

  CHECK(one_third_trick_cover({2.0, 0}, 2.0, 1, 2) == root_cube(1, 2));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5), lr(-12, 2);
  for (int t = 0; t < 2000; ++t) {
    const int dim = 1 + t % 2;
    const std::array<double, 2> ctr{u(rng), u(rng)};
    const double r = std::exp2(lr(rng));
    const auto q = one_third_trick_cover(ctr, r, dim);
    CHECK(q.sidelength() <= kOneThirdCoverConstant * r);
    for (int a = 0; a < dim; ++a) {
      CHECK(compare(q.left(a), std::nextafter(ctr[a] - r, -kInf)) <= 0);
      CHECK(compare(q.right(a), std::nextafter(ctr[a] + r, kInf)) > 0);
    }
  }
}

TEST_CASE("Carleson constants") {
  const Lattice lat(1, 1.0, 64);
  CHECK_THROWS_WITH_AS(carleson_constant(CubeFamily()), "empty family", Error);
  CHECK(carleson_constant(tiling(lat, GridShift::zero(1), -3)) == 1.0);
  const auto root = root_cube(1, 0);
  auto fam = children(root);
  fam.push_back(root);
  CHECK(carleson_constant(CubeFamily(fam, 0)) == 2.0);
  CHECK(carleson_constant(CubeFamily(complete_tree(root, 4), 0)) == 5.0);
  CHECK(carleson_constant(CubeFamily(checkerboard(root, 6), 0)) <= 2.0);
}

TEST_CASE("certify_sparse examples") {
  const Lattice lat(1, 1.0, 64);
  auto disjoint = tiling(lat, GridShift::zero(1), -2);
  auto cert = certify_sparse(disjoint, 0.9, lat);
  REQUIRE(cert.success);
  for (std::size_t i = 0; i < disjoint.size(); ++i)
    CHECK((*cert.collection.witness)[i] == cube_cells(disjoint.cubes()[i], lat));
  CHECK(verify_witness(cert.collection, lat));

  const auto root = root_cube(1, 0);
  auto tree = certify_sparse(CubeFamily(complete_tree(root, 4), 0), 0.6, lat);
  CHECK_FALSE(tree.success);
  CHECK_FALSE(tree.violating_chain.empty());

  // Six levels below the root, the smallest cube still holds 16 cells.
  const Lattice fine(1, 1.0, 1024);
  auto board = certify_sparse(CubeFamily(checkerboard(root, 6), 0), 0.5, fine);
  CHECK(board.success);
  CHECK(verify_witness(board.collection, fine));
  // Down to single cells the lattice measure cannot give every cube more than half.
  CHECK_FALSE(certify_sparse(CubeFamily(checkerboard(root, 6), 0), 0.5, lat).success);
  CHECK_THROWS_AS(certify_sparse(disjoint, 1.0, lat), Error);
}

TEST_CASE("sparse and Carleson conditions agree on random families") {
  std::mt19937_64 rng(21);
  const Lattice lat(1, 4.0, 256);
  for (int t = 0; t < 60; ++t) {
    const auto fam = random_family(rng, lat, 1 + int(rng() % 200), -3);
    const double lambda = carleson_constant(fam);
    for (double eta : {0.2, 0.35, 0.5, 0.7}) {
      auto cert = certify_sparse(fam, eta, lat);
      if (cert.success) {
        CHECK(verify_witness(cert.collection, lat));
        CHECK(lambda <= 1.0 / eta + 1e-12);
      }
    }
    const double eta = sparse_eta_from_carleson(lambda, 8);  // scale -3 holds 8 cells
    if (eta > 0.0) CHECK(certify_sparse(fam, eta, lat).success);
  }
}

TEST_CASE("greedy witness agrees with a matching oracle") {
  std::mt19937_64 rng(5);
  const Lattice lat(1, 2.0, 32);
  int successes = 0, failures = 0;
  for (int t = 0; t < 300; ++t) {
    const auto fam = random_family(rng, lat, 1 + int(rng() % 20), -4);
    for (double eta : {0.3, 0.5, 0.75}) {
      std::vector<std::vector<Index>> cells;
      std::vector<int> demand;
      for (const auto& q : fam.cubes()) {
        cells.push_back(cube_cells(q, lat));
        demand.push_back(int(std::floor(eta * double(cells.back().size()))) + 1);
      }
      const bool oracle = matching_oracle(cells, demand, lat.size());
      const bool greedy = certify_sparse(fam, eta, lat).success;
      CHECK(oracle == greedy);
      (oracle ? successes : failures)++;
    }
  }
  CHECK(successes > 0);
  CHECK(failures > 0);
}

TEST_CASE("periodic families and cell ranges") {
  const Lattice lat(1, 4.0, 64);
  // Shifted cubes straddling the period wrap around.
  const DyadicCube q(GridShift(1, {1, 0}), 1, {1, 0});  // scale 1: [2 - 2/3, 4 - 2/3)
  auto cells = cube_cells(q, lat);
  CHECK(cells.size() == 32);
  const DyadicCube wrap(GridShift(1, {2, 0}), 0, {3, 0});  // [3 + 2/3, 4 + 2/3)
  auto wc = cube_cells(wrap, lat);
  CHECK(wc.size() == 16);
  CHECK(wc.front() == 0);
  CHECK(wc.back() == 63);
  CHECK(wrap.canonical(2) == wrap);
  CHECK(DyadicCube(GridShift(1, {2, 0}), 0, {7, 0}).canonical(2) == wrap);
  CHECK(contains_periodic(root_cube(1, 2), wrap, 2) == false);
  CHECK(wrap.parent() == DyadicCube(GridShift(1, {2, 0}), 1, {2, 0}));
  CHECK(contains_periodic(DyadicCube(GridShift(1, {2, 0}), 1, {2, 0}), wrap, 2));
  CHECK(contains_periodic(DyadicCube(GridShift(1, {2, 0}), 1, {0, 0}), DyadicCube(GridShift(1, {2, 0}), 0, {-1, 0}), 2));

  CubeFamily fam({wrap.parent(), wrap}, 2);
  std::stringstream ss;
  write_family(ss, fam);
  auto back = read_family(ss, 2);
  CHECK(back.cubes() == fam.cubes());
  CHECK_THROWS_AS(CubeFamily({q, DyadicCube(GridShift::zero(1), 0, {0, 0})}), Error);

  auto cert = certify_sparse(CubeFamily({DyadicCube(GridShift::zero(1), 0, {0, 0})}, 2), 0.5, lat);
  std::stringstream cs;
  write_certificate(cs, cert.collection);
  CHECK(cs.str() == "0 0 0 -> 0-15\n");
}
