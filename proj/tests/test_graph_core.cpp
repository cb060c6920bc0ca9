#include "nsi/error.hpp"
#include "nsi/graph_core.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace nsi;

namespace {

UserGraph graph_of(std::initializer_list<Interaction> edges) { return UserGraph(std::vector<Interaction>(edges)); }

std::set<std::pair<std::string, std::string>> links_of(const TweetGraph& h) {
  std::set<std::pair<std::string, std::string>> links;
  const auto& a = h.adjacency();
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      if (it.row() < it.col()) links.insert({h.nodes()[static_cast<std::size_t>(it.row())], h.nodes()[static_cast<std::size_t>(it.col())]});
  return links;
}

}  // namespace

TEST_CASE("line graph: shared endpoints") {
  const auto h = line_graph(graph_of({{"u1", "u2", "t1"}, {"u2", "u3", "t2"}, {"u4", "u5", "t3"}}));
  CHECK(h.nodes() == std::vector<std::string>{"t1", "t2", "t3"});
  CHECK(links_of(h) == std::set<std::pair<std::string, std::string>>{{"t1", "t2"}});
  CHECK(h.adjacency().coeff(0, 1) == 1.0);
}

TEST_CASE("line graph: directed 3-cycle is a triangle") {
  const auto h = line_graph(graph_of({{"a", "b", "t1"}, {"b", "c", "t2"}, {"c", "a", "t3"}}));
  CHECK(h.link_count() == 3);
}

TEST_CASE("line graph: single edge and multi-edges") {
  CHECK(line_graph(graph_of({{"u1", "u2", "t1"}})).link_count() == 0);
  const auto multi = line_graph(graph_of({{"u1", "u2", "t1"}, {"u1", "u2", "t2"}, {"u2", "u1", "t3"}}));
  CHECK(multi.link_count() == 3);
  CHECK(multi.adjacency().coeff(0, 1) == 1.0);  // not 2: shared both endpoints, still one link
}

TEST_CASE("line graph: duplicate tweet id is rejected by name") {
  UserGraph g;
  g.add({"a", "b", "t1"});
  try {
    g.add({"b", "c", "t1"});
    FAIL("no error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("t1") != std::string::npos);
  }
}

TEST_CASE("line graph: matches brute force on random graphs") {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = oracle::random_user_graph(rng, 30);
    const auto h = line_graph(g);
    REQUIRE(h.size() == g.size());
    CHECK(std::is_sorted(h.nodes().begin(), h.nodes().end()));
    CHECK(links_of(h) == oracle::line_graph_links(g));
    const Eigen::MatrixXd a(h.adjacency());
    CHECK(a == a.transpose());
    CHECK(a.diagonal().isZero(0.0));
  }
}

TEST_CASE("transition matrix examples") {
  SparseMatrix w(3, 3);
  w.insert(0, 1) = 1;
  w.insert(0, 2) = 1;
  const auto p = transition_matrix(w, 1.0);
  CHECK(p.P(0, 1) == 0.5);
  CHECK(p.P(0, 2) == 0.5);
  CHECK(p.P(1, 0) == doctest::Approx(1.0 / 3));  // dangling row is uniform
  CHECK(p.dangling == std::vector<bool>{false, true, true});

  SparseMatrix two(2, 2);
  two.insert(0, 1) = 1;
  two.insert(1, 0) = 1;
  CHECK(transition_matrix(two, 0.85).P(0, 1) == doctest::Approx(0.925).epsilon(1e-15));
  CHECK_THROWS_AS(transition_matrix(two, 0.0), ValidationError);
  CHECK_THROWS_AS(transition_matrix(two, 1.5), ValidationError);
}

TEST_CASE("transition matrix rows sum to one") {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = oracle::uniform_int(rng, 1, 30);
    const Eigen::MatrixXd w = oracle::random_directed(rng, n, oracle::uniform(rng, 0.0, 0.4));
    const auto p = transition_matrix(SparseMatrix(w.sparseView()), oracle::uniform(rng, 0.5, 1.0));
    CHECK((p.P.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(p.P.minCoeff() >= 0.0);
  }
}

TEST_CASE("stationary distribution examples") {
  SparseMatrix two(2, 2);
  two.insert(0, 1) = 1;
  two.insert(1, 0) = 1;
  const auto pi2 = stationary_distribution(transition_matrix(two, 1.0));
  CHECK(pi2.pi(0) == doctest::Approx(0.5));

  SparseMatrix cyc(3, 3);
  cyc.insert(0, 1) = 1;
  cyc.insert(1, 2) = 1;
  cyc.insert(2, 0) = 1;
  const auto pi3 = stationary_distribution(transition_matrix(cyc, 1.0));
  CHECK((pi3.pi.array() - 1.0 / 3).abs().maxCoeff() < 1e-12);

  SparseMatrix split(3, 3);
  split.insert(0, 1) = 1;
  split.insert(1, 0) = 1;
  CHECK_THROWS_AS(stationary_distribution(transition_matrix(split, 1.0)), ValidationError);
  SparseMatrix chain(3, 3);
  chain.insert(0, 1) = 1;
  chain.insert(1, 2) = 3;
  chain.insert(2, 0) = 1;
  chain.insert(2, 1) = 1;
  try {
    stationary_distribution(transition_matrix(chain, 0.85), 1e-300, 3);
    FAIL("no error");
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations() == 3);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("stationary distribution: asymmetric 3-node graph matches the eigenvector") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
  w(0, 1) = 1;
  w(1, 2) = 2;
  w(2, 0) = 1;
  w(2, 1) = 1;
  const auto p = transition_matrix(SparseMatrix(w.sparseView()), 0.85);
  const auto pi = stationary_distribution(p);
  CHECK((pi.pi - oracle::stationary_eigen(oracle::transition(w, 0.85))).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("stationary distribution: fixed point, oracle and relabeling") {
  oracle::Rng rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = oracle::uniform_int(rng, 2, 30);
    const Eigen::MatrixXd w = oracle::random_directed(rng, n, oracle::uniform(rng, 0.0, 0.5));
    const double damping = oracle::uniform(rng, 0.5, 0.99);
    const auto p = transition_matrix(SparseMatrix(w.sparseView()), damping);
    const auto pi = stationary_distribution(p);
    CHECK((p.P.transpose() * pi.pi - pi.pi).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(pi.pi.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pi.pi.minCoeff() > 0.0);
    CHECK((pi.pi - oracle::stationary_eigen(oracle::transition(w, damping))).cwiseAbs().maxCoeff() < 1e-8);

    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd wp(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) wp(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = w(i, j);
    const auto pip = stationary_distribution(transition_matrix(SparseMatrix(wp.sparseView()), damping));
    for (int i = 0; i < n; ++i) CHECK(std::abs(pip.pi(perm[static_cast<std::size_t>(i)]) - pi.pi(i)) < 1e-10);
  }
}

TEST_CASE("laplacian: single undirected edge") {
  SparseMatrix two(2, 2);
  two.insert(0, 1) = 1;
  two.insert(1, 0) = 1;
  const auto p = transition_matrix(two, 1.0);
  const auto lap = laplacian(p, stationary_distribution(p));
  Eigen::Matrix2d expected;
  expected << 1, -1, -1, 1;
  CHECK((lap.L - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((lap.theta - Eigen::Matrix2d{{0, 1}, {1, 0}}).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(lap.L).eigenvalues();
  CHECK(ev(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev(1) == doctest::Approx(2.0));
}

TEST_CASE("laplacian: rejects a nonpositive pi") {
  SparseMatrix two(2, 2);
  two.insert(0, 1) = 1;
  two.insert(1, 0) = 1;
  const auto p = transition_matrix(two, 1.0);
  StationaryDistribution pi;
  pi.pi = Eigen::Vector2d(1.0, 0.0);
  CHECK_THROWS_AS(laplacian(p, pi), ValidationError);
}

TEST_CASE("laplacian: symmetric, PSD, sqrt(pi) null vector") {
  oracle::Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = oracle::uniform_int(rng, 2, 50);
    const Eigen::MatrixXd w = oracle::random_directed(rng, n, oracle::uniform(rng, 0.02, 0.5));
    const auto p = transition_matrix(SparseMatrix(w.sparseView()), 0.85);
    const auto pi = stationary_distribution(p);
    const auto lap = laplacian(p, pi);
    CHECK((lap.L - lap.L.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(lap.L).eigenvalues().minCoeff() >= -1e-8);
    CHECK((lap.L * pi.pi.cwiseSqrt()).norm() < 1e-10);
  }
}

TEST_CASE("laplacian: symmetric graph at damping 1 is the normalized Laplacian") {
  oracle::Rng rng(15);
  int checked = 0;
  for (int trial = 0; checked < 50 && trial < 500; ++trial) {
    const int n = oracle::uniform_int(rng, 2, 30);
    const Eigen::MatrixXd a = oracle::random_symmetric(rng, n, oracle::uniform(rng, 0.2, 0.8));
    const auto p = transition_matrix(SparseMatrix(a.sparseView()), 1.0);
    if (!is_strongly_connected(p.P) || p.dangling != std::vector<bool>(static_cast<std::size_t>(n), false)) continue;
    ++checked;
    const auto lap = laplacian(p, stationary_distribution(p));
    const Eigen::VectorXd dis = a.rowwise().sum().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd expected = Eigen::MatrixXd::Identity(n, n) - dis.asDiagonal() * a * dis.asDiagonal();
    CHECK((lap.L - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK(checked == 50);
}

TEST_CASE("smoothness equals the trace form") {
  oracle::Rng rng(16);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = oracle::uniform_int(rng, 1, 40);
    const Eigen::MatrixXd w = oracle::random_directed(rng, n, oracle::uniform(rng, 0.0, 0.5));
    const auto p = transition_matrix(SparseMatrix(w.sparseView()), oracle::uniform(rng, 0.5, 0.95));
    const auto pi = stationary_distribution(p);
    const auto lap = laplacian(p, pi);
    const Eigen::MatrixXd f = Eigen::MatrixXd::Random(n, 2);
    const double trace = (f.transpose() * lap.L * f).trace();
    CHECK(std::abs(smoothness(f, p, pi) - trace) < 1e-10);
    CHECK(std::abs(oracle::pairwise_smoothness(f, p.P, pi.pi) - trace) < 1e-10);
  }
}

TEST_CASE("smoothness examples") {
  SparseMatrix two(2, 2);
  two.insert(0, 1) = 1;
  two.insert(1, 0) = 1;
  const auto p = transition_matrix(two, 1.0);
  const auto pi = stationary_distribution(p);
  const Eigen::MatrixXd constant = Eigen::MatrixXd::Ones(2, 2);
  CHECK(smoothness(constant, p, pi) == doctest::Approx(0.0));
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(2, 2);
  f.row(0) /= std::sqrt(pi.pi(0));
  f.row(1) /= std::sqrt(pi.pi(1));
  CHECK(std::abs(smoothness(f, p, pi) - (f.transpose() * laplacian(p, pi).L * f).trace()) < 1e-12);

  const auto empty = transition_matrix(SparseMatrix(3, 3), 1.0);
  CHECK(smoothness(Eigen::MatrixXd::Random(3, 2), empty, stationary_distribution(empty)) >= 0.0);
}

TEST_CASE("graph_laplacian: isolated nodes carry no penalty") {
  const auto h = line_graph(graph_of({{"u1", "u2", "t1"}, {"u2", "u3", "t2"}, {"u4", "u5", "t3"}}));
  const auto lap = graph_laplacian(h, 0.85);
  CHECK(lap.L.row(2).isZero(0.0));
  CHECK(lap.L.col(2).isZero(0.0));
  CHECK(lap.L(0, 0) > 0.0);

  const auto disconnected =
      line_graph(graph_of({{"u1", "u2", "t1"}, {"u2", "u3", "t2"}, {"u4", "u5", "t3"}, {"u5", "u6", "t4"}}));
  try {
    graph_laplacian(disconnected, 1.0);
    FAIL("no error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("damping") != std::string::npos);
  }
  CHECK_NOTHROW(graph_laplacian(disconnected, 0.85));
}

TEST_CASE("graph_laplacian: edgeless graph gives the zero matrix") {
  const auto h = line_graph(graph_of({{"a", "b", "t1"}, {"c", "d", "t2"}}));
  CHECK(graph_laplacian(h, 0.85).L.isZero(0.0));
}
