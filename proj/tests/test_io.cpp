#include <doctest.h>

#include "helpers.hpp"
#include "saplingcf/io.hpp"

using namespace saplingcf;
using testutil::TempDir;
using testutil::write_text;

TEST_CASE("adjacency-lines loading") {
  TempDir tmp("io_adj");
  write_text(tmp.file("g.txt"), "0 1 2\n1 0\n");
  auto g = load_edge_list(tmp.file("g.txt"));
  CHECK(g.n_users() == 2);
  CHECK(g.n_items() == 3);
  CHECK(g.edge_count() == 3);
}

TEST_CASE("pair-lines loading") {
  TempDir tmp("io_pairs");
  write_text(tmp.file("g.txt"), "0 1\n0 2\n1 0\n");
  auto g = load_edge_list(tmp.file("g.txt"), EdgeListFormat::pairs);
  CHECK(g.n_users() == 2);
  CHECK(g.n_items() == 3);
  CHECK(g.edge_count() == 3);
}

TEST_CASE("duplicate edges collapse with a count") {
  TempDir tmp("io_dup");
  write_text(tmp.file("g.txt"), "0 5 5\n");
  LoadStats stats;
  auto g = load_edge_list(tmp.file("g.txt"), EdgeListFormat::auto_detect, &stats);
  CHECK(g.edge_count() == 1);
  CHECK(g.n_items() == 6);
  CHECK(stats.duplicate_edges == 1);
}

TEST_CASE("header fixes the layer sizes") {
  TempDir tmp("io_header");
  write_text(tmp.file("g.txt"), "# users=10 items=20\n0 1\n");
  auto g = load_edge_list(tmp.file("g.txt"));
  CHECK(g.n_users() == 10);
  CHECK(g.n_items() == 20);
  CHECK(g.edge_count() == 1);

  write_text(tmp.file("empty.txt"), "# users=4 items=5\n");
  auto empty = load_edge_list(tmp.file("empty.txt"));
  CHECK(empty.n_users() == 4);
  CHECK(empty.edge_count() == 0);
}

TEST_CASE("load errors carry the line number") {
  TempDir tmp("io_err");
  write_text(tmp.file("bad.txt"), "0 1\nx 2\n");
  CHECK_THROWS_WITH_AS(load_edge_list(tmp.file("bad.txt")), doctest::Contains("bad.txt:2"),
                       std::runtime_error);

  write_text(tmp.file("empty.txt"), "\n\n");
  CHECK_THROWS_WITH_AS(load_edge_list(tmp.file("empty.txt")), doctest::Contains("empty"),
                       std::runtime_error);

  write_text(tmp.file("neg.txt"), "0 -3\n");
  CHECK_THROWS_AS(load_edge_list(tmp.file("neg.txt")), std::runtime_error);

  // indices above the 32-bit node range are refused, not wrapped
  write_text(tmp.file("big.txt"), "0 4294967296\n");
  CHECK_THROWS_AS(load_edge_list(tmp.file("big.txt")), std::runtime_error);

  CHECK_THROWS_AS(load_edge_list(tmp.file("missing.txt")), std::runtime_error);
}

TEST_CASE("edge list write/read round trip with labels") {
  TempDir tmp("io_rt");
  auto g = testutil::random_graph(12, 9, 0.3, 4);
  g.set_labels(Layer::users, {"u0", "u1", "u2", "u3", "u4", "u5", "u6", "u7", "u8", "u9", "u10", "u11"});
  for (auto format : {EdgeListFormat::adjacency, EdgeListFormat::pairs}) {
    auto path = tmp.file(format == EdgeListFormat::pairs ? "p.txt" : "a.txt");
    write_edge_list(g, path, format, /*write_label_sidecars=*/true);
    auto back = load_edge_list(path);
    CHECK(back.n_users() == g.n_users());
    CHECK(back.n_items() == g.n_items());
    CHECK(back.edges() == g.edges());
    CHECK(back.labels(Layer::users) == g.labels(Layer::users));
  }
}

TEST_CASE("export volume ingestion and RCA binarization") {
  TempDir tmp("io_rca");
  write_text(tmp.file("ev.csv"),
             "country,product,value\nA,x,1\nA,y,1\nB,x,1\nB,y,1\n");
  auto ev = load_export_volumes(tmp.file("ev.csv"));
  REQUIRE(ev.countries.size() == 2);
  REQUIRE(ev.products.size() == 2);

  SUBCASE("uniform volumes give RCA = 1 everywhere") {
    auto g = rca_binarize(ev, 1.0);
    CHECK(g.edge_count() == 4);  // complete bipartite at threshold 1
    CHECK(g.labels(Layer::users) == std::vector<std::string>{"A", "B"});
  }
  SUBCASE("threshold above 1 empties the uniform graph") {
    auto g = rca_binarize(ev, 10.0);
    CHECK(g.edge_count() == 0);
  }
}

TEST_CASE("RCA on the diagonal 2x2 case") {
  // E = [[2,0],[0,2]]: RCA is 2 on the diagonal and 0 off it
  ExportVolumes ev;
  ev.countries = {"A", "B"};
  ev.products = {"x", "y"};
  ev.values = {2, 0, 0, 2};
  auto g = rca_binarize(ev, 1.0);
  CHECK(g.edge_count() == 2);
  CHECK(g.has_edge(0, 0));
  CHECK(g.has_edge(1, 1));
  CHECK_FALSE(g.has_edge(0, 1));
}

TEST_CASE("RCA rejects all-zero rows and columns") {
  ExportVolumes ev;
  ev.countries = {"A", "B"};
  ev.products = {"x", "y"};
  ev.values = {1, 0, 1, 0};  // product y exported by nobody
  CHECK_THROWS_WITH_AS(rca_binarize(ev, 1.0), doctest::Contains("all zero"),
                       std::invalid_argument);
  CHECK_THROWS_AS(rca_binarize(ev, 0.0), std::invalid_argument);
}

TEST_CASE("ratings ingestion and thresholding") {
  TempDir tmp("io_rat");
  write_text(tmp.file("r.csv"), "user,item,rating,timestamp\n0,0,5,100\n0,1,2,101\n1,0,3,102\n");
  auto r = load_ratings(tmp.file("r.csv"));
  CHECK(r.n_users == 2);
  CHECK(r.n_items == 2);
  CHECK(r.global_mean() == doctest::Approx((5.0 + 2.0 + 3.0) / 3.0));

  SUBCASE("min 3 keeps ratings >= 3") {
    auto g = threshold_ratings(r, 3.0);
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge(0, 0));
    CHECK(g.has_edge(1, 0));
    CHECK_FALSE(g.has_edge(0, 1));
  }
  SUBCASE("min 1 keeps everything, min 6 keeps nothing") {
    CHECK(threshold_ratings(r, 1.0).edge_count() == 3);
    CHECK(threshold_ratings(r, 6.0).edge_count() == 0);
  }
}

TEST_CASE("ratings keep the last duplicate and validate the header") {
  TempDir tmp("io_rat2");
  write_text(tmp.file("dup.csv"), "user,item,rating\n0,0,1\n0,0,4\n");
  auto r = load_ratings(tmp.file("dup.csv"));
  REQUIRE(r.user_values.size() == 1);
  CHECK(r.user_values[0] == 4.0);

  write_text(tmp.file("bad.csv"), "a,b,c\n0,0,1\n");
  CHECK_THROWS_AS(load_ratings(tmp.file("bad.csv")), std::runtime_error);
}
