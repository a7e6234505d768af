#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fedban/graph.hpp"
#include "fedban/mixing.hpp"

using namespace fedban;

TEST_SUITE("graph_mixing") {

TEST_CASE("named topologies have the expected shape") {
  const Graph cycle = build_graph(Topology::cycle, 5);
  CHECK(cycle.size() == 5);
  CHECK(cycle.edge_count() == 5);
  for (int i = 0; i < 5; ++i) CHECK(cycle.degree(i) == 2);
  CHECK(cycle.adjacent(0, 4));
  CHECK(!cycle.adjacent(0, 2));

  const Graph complete = build_graph(Topology::complete, 4);
  CHECK(complete.edge_count() == 6);
  CHECK(complete.max_degree() == 3);

  const Graph star = build_graph(Topology::star, 6);
  CHECK(star.degree(0) == 5);
  CHECK(star.degree(3) == 1);
  CHECK(star.max_degree() == 5);

  const Graph path = build_graph(Topology::path, 4);
  CHECK(path.degree(0) == 1);
  CHECK(path.degree(1) == 2);
  CHECK(path.edge_count() == 3);
}

TEST_CASE("graph construction rejects invalid input") {
  CHECK_THROWS_AS(build_graph(Topology::cycle, 2), ConfigError);
  CHECK_THROWS_AS(build_graph(Topology::complete, 1), ConfigError);
  CHECK_THROWS_AS(build_graph(Topology::custom, 4), ConfigError);
  CHECK_THROWS_AS(Graph::from_edges(4, {{0, 1}, {2, 3}}), ConfigError);  // disconnected
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 0}, {0, 1}, {1, 2}}), ConfigError);  // loop
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 5}}), ConfigError);  // out of range
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1}}), ConfigError);  // isolated agent

  // Duplicate edges collapse to one.
  const Graph g = Graph::from_edges(3, {{0, 1}, {1, 0}, {1, 2}});
  CHECK(g.edge_count() == 2);
  CHECK(g.degree(1) == 2);
}

TEST_CASE("edge list files round-trip") {
  const std::string path = "graph_roundtrip_test.txt";
  {
    std::ofstream out(path);
    out << "# a four cycle\n4\n0 1\n1 2\n\n2 3\n3 0\n";
  }
  const Graph g = load_edge_list(path);
  CHECK(g.size() == 4);
  CHECK(g.edge_count() == 4);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_edge_list("does_not_exist_anywhere.txt"), IoError);

  {
    std::ofstream out(path);
    out << "4\n0 one\n";
  }
  CHECK_THROWS_AS(load_edge_list(path), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("topology names parse both ways") {
  CHECK(topology_from_string("cycle") == Topology::cycle);
  CHECK(topology_from_string("complete") == Topology::complete);
  CHECK(to_string(Topology::star) == "star");
  CHECK_THROWS_AS(topology_from_string("torus"), ConfigError);
}

TEST_CASE("mixing matrix entries follow the Laplacian recipe") {
  const Graph g = build_graph(Topology::cycle, 4);
  const auto mm = MixingMatrix::from_graph(g, 0.5);
  // d_max = 2, weight = 0.25: diagonal 0.5, each neighbour 0.25.
  for (int i = 0; i < 4; ++i) {
    CHECK(mm.p()(i, i) == doctest::Approx(0.5).epsilon(1e-15));
    double row = 0.0, col = 0.0;
    for (int j = 0; j < 4; ++j) {
      row += mm.p()(i, j);
      col += mm.p()(j, i);
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(col == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(mm.p()(0, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(mm.p()(0, 2) == 0.0);
  CHECK(mm.p().is_symmetric());
}

TEST_CASE("complete graph spectrum and c0 in closed form") {
  // Complete graph on 3 agents with kappa = 1: P has eigenvalues 1, -1/2,
  // -1/2, so c0 = sqrt(3) * 2 * (1/2)/(1/2) = 2 sqrt(3).
  const auto mm = MixingMatrix::from_graph(build_graph(Topology::complete, 3), 1.0);
  CHECK(mm.eigenvalues()[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(mm.eigenvalues()[1] == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(mm.eigenvalues()[2] == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(mm.c0() == doctest::Approx(3.4641016151377544).epsilon(1e-12));
}

TEST_CASE("path graph constants match an independent evaluation") {
  // Simple spectrum, so the eigenbasis is unique up to sign and the
  // constants are basis-independent. Reference values were computed with a
  // separate implementation of the same definitions.
  const auto mm = MixingMatrix::from_graph(build_graph(Topology::path, 3), 0.5);
  CHECK(mm.eigenvalues()[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(mm.eigenvalues()[1] == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(mm.eigenvalues()[2] == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(mm.c0() == doctest::Approx(5.773502691896257).epsilon(1e-12));
  REQUIRE(mm.c_i().size() == 3);
  CHECK(mm.c_i()[0] == doctest::Approx(3.6884004884004895).epsilon(1e-9));
  CHECK(mm.c_i()[1] == doctest::Approx(0.35555555555555557).epsilon(1e-9));
  CHECK(mm.c_i()[2] == doctest::Approx(3.688400488400488).epsilon(1e-9));
}

TEST_CASE("spectral constants are nonnegative and sign-stable") {
  for (auto topo : {Topology::cycle, Topology::complete, Topology::star, Topology::path}) {
    const auto mm = MixingMatrix::from_graph(build_graph(topo, 8), 0.5);
    CHECK(mm.c0() >= 0.0);
    for (double ci : mm.c_i()) {
      CHECK(ci >= 0.0);
      CHECK(std::isfinite(ci));
    }
  }

  // Flipping the sign of any eigenvector column must not change anything.
  const auto mm = MixingMatrix::from_graph(build_graph(Topology::path, 4), 0.5);
  Matrix flipped = mm.eigenvectors();
  for (int r = 0; r < 4; ++r) flipped(r, 2) = -flipped(r, 2);
  const auto base = spectral_constants(mm.eigenvalues(), mm.eigenvectors());
  const auto alt = spectral_constants(mm.eigenvalues(), flipped);
  CHECK(base.c0 == alt.c0);
  for (int i = 0; i < 4; ++i) {
    CHECK(base.c_i[static_cast<std::size_t>(i)] ==
          doctest::Approx(alt.c_i[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }
}

TEST_CASE("losing the spectral gap raises the dedicated error") {
  // Path on two agents with kappa = 1 gives P = [[0,1],[1,0]], whose second
  // eigenvalue is -1: consensus would oscillate forever.
  CHECK_THROWS_AS(MixingMatrix::from_graph(build_graph(Topology::path, 2), 1.0),
                  SpectralGapError);
  CHECK_THROWS_AS(MixingMatrix::from_graph(build_graph(Topology::path, 2), 1.5), ConfigError);
  CHECK_NOTHROW(MixingMatrix::from_graph(build_graph(Topology::path, 2), 0.9));
}

TEST_CASE("trivial single-agent network") {
  const auto mm = MixingMatrix::trivial();
  CHECK(mm.size() == 1);
  CHECK(mm.p()(0, 0) == 1.0);
  CHECK(mm.c0() == 0.0);
  REQUIRE(mm.c_i().size() == 1);
  CHECK(mm.c_i()[0] == 0.0);
  CHECK(mm.eigenvalues()[0] == doctest::Approx(1.0));
}

TEST_CASE("powers of the mixing matrix reach consensus") {
  const auto mm = MixingMatrix::from_graph(build_graph(Topology::cycle, 8), 0.5);
  const int m = 8;
  Matrix target(m, m, 1.0 / m);
  Matrix pt = mm.p();
  int t = 1;
  while (max_abs_diff(pt, target) >= 1e-6) {
    pt = matmul(pt, mm.p());
    ++t;
    REQUIRE(t <= 3000);
  }
  for (int r = 0; r < m; ++r) {
    double row = 0.0;
    for (int c = 0; c < m; ++c) row += pt(r, c);
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  }
}

}  // TEST_SUITE
