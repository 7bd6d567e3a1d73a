#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "grownet/corpus.hpp"
#include "grownet/errors.hpp"
#include "grownet/rng.hpp"
#include "grownet/timeline.hpp"

using namespace grownet;

namespace {

CitationCorpus parse_strings(const std::string& nodes, const std::string& edges) {
  std::istringstream n(nodes), e(edges);
  return parse_corpus(n, e);
}

CitationCorpus three_article_corpus() {
  return parse_strings(
      "id,date\n"
      "A,2000-01-01\n"
      "B,2000-01-01\n"
      "C,2001-05-05\n",
      "citing_id,cited_id\n"
      "C,A\n"
      "C,B\n");
}

// Random corpus whose dates span several years; citations point at any other
// article, so chronology violations do occur.
CitationCorpus random_corpus(uint64_t seed, int n_articles, int n_edges) {
  SplitMix64 rng(seed);
  std::string nodes = "id,date\n", edges = "citing_id,cited_id\n";
  std::vector<std::string> ids;
  for (int i = 0; i < n_articles; ++i) {
    std::string id = "p" + std::to_string(100 + i);
    int year = 1995 + static_cast<int>(rng.next_below(8));
    int month = 1 + static_cast<int>(rng.next_below(12));
    int day = 1 + static_cast<int>(rng.next_below(28));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    nodes += id + "," + buf + "\n";
    ids.push_back(std::move(id));
  }
  for (int i = 0; i < n_edges; ++i) {
    size_t a = rng.next_below(ids.size());
    size_t b = rng.next_below(ids.size());
    if (a == b) continue;
    edges += ids[a] + "," + ids[b] + "\n";
  }
  return parse_strings(nodes, edges);
}

int64_t measured_edge_total(const GrowthSequence& seq) {
  int64_t total = 0;
  for (int64_t t = 1; t <= seq.num_steps(); ++t)
    total += seq.cross_count(t) + seq.intra_count(t);
  return total;
}

// Independent recount: walk the per-step edge lists and tally in-degrees.
std::map<int64_t, int64_t> brute_histogram(const GrowthSequence& seq, int64_t t) {
  std::vector<int64_t> deg(static_cast<size_t>(seq.num_nodes()), -1);
  for (int64_t s = 1; s <= t; ++s) {
    auto v = seq.step(s);
    for (int64_t i = 0; i < v.node_count; ++i) deg[static_cast<size_t>(v.first_node + i)] = 0;
    for (NodeId dst : v.cross_dst) ++deg[static_cast<size_t>(dst)];
    for (NodeId dst : v.intra_dst) ++deg[static_cast<size_t>(dst)];
  }
  std::map<int64_t, int64_t> counts;
  for (int64_t d : deg)
    if (d >= 0) ++counts[d];
  return counts;
}

}  // namespace

TEST_CASE("maximal resolution: one article per step") {
  auto corpus = three_article_corpus();
  auto seq = build_sequence(corpus, Resolution::maximal());
  REQUIRE(seq.num_steps() == 3);
  for (int64_t t = 1; t <= 3; ++t) CHECK(seq.nodes_added(t) == 1);
  CHECK(seq.cross_count(3) == 2);
  CHECK(seq.intra_count(3) == 0);

  SUBCASE("degree histogram at the end") {
    auto hist = degree_histogram_at(seq, 3);
    CHECK(hist.total_nodes == 3);
    CHECK(hist.count(0) == 1);
    CHECK(hist.count(1) == 2);
  }
  SUBCASE("degree histogram of the initial network") {
    auto hist = degree_histogram_at(seq, 1);
    CHECK(hist.total_nodes == 1);
    CHECK(hist.count(0) == 1);
  }
  SUBCASE("step index out of range") {
    CHECK_THROWS_AS(degree_histogram_at(seq, 0), ConfigError);
    CHECK_THROWS_AS(degree_histogram_at(seq, 4), ConfigError);
  }
}

TEST_CASE("yearly resolution groups calendar years") {
  auto corpus = three_article_corpus();
  auto seq = build_sequence(corpus, Resolution::yearly());
  REQUIRE(seq.num_steps() == 2);
  CHECK(seq.nodes_added(1) == 2);
  CHECK(seq.intra_count(1) == 0);
  CHECK(seq.nodes_added(2) == 1);
  CHECK(seq.cross_count(2) == 2);
  CHECK(seq.intra_count(2) == 0);
}

TEST_CASE("chronology violations follow the tie rule") {
  // A and B share a day; A cites B. Lexicographically A precedes B, so at
  // maximal resolution the citation points forward in time.
  auto corpus = parse_strings(
      "id,date\nA,2000-01-01\nB,2000-01-01\n",
      "citing_id,cited_id\nA,B\n");
  CHECK(chronology_violations(corpus, Resolution::maximal()) == 1);
  CHECK(chronology_violations(corpus, Resolution::daily()) == 0);

  int64_t excluded = -1;
  auto seq = build_sequence(corpus, Resolution::maximal(), &excluded);
  CHECK(excluded == 1);
  CHECK(measured_edge_total(seq) == 0);

  auto daily = build_sequence(corpus, Resolution::daily(), &excluded);
  CHECK(excluded == 0);
  CHECK(daily.num_steps() == 1);
  CHECK(daily.intra_count(1) == 1);  // same-bucket cite becomes intra
}

TEST_CASE("histogram equals a brute-force recount") {
  auto corpus = random_corpus(42, 50, 160);
  for (auto res : {Resolution::maximal(), Resolution::monthly(), Resolution::yearly()}) {
    auto seq = build_sequence(corpus, res);
    for (int64_t t : {int64_t{1}, seq.num_steps() / 2 + 1, seq.num_steps()}) {
      CAPTURE(res.label());
      CAPTURE(t);
      auto hist = degree_histogram_at(seq, t);
      auto brute = brute_histogram(seq, t);
      int64_t brute_total = 0;
      for (auto [k, n] : brute) {
        CHECK(hist.count(k) == n);
        brute_total += n;
      }
      CHECK(hist.total_nodes == brute_total);
      CHECK(hist.max_degree() == (brute.empty() ? -1 : brute.rbegin()->first));
    }
  }
}

TEST_CASE("citation conservation across resolutions") {
  auto corpus = random_corpus(9, 60, 200);
  int64_t reference = -1;
  for (auto res : {Resolution::maximal(), Resolution::daily(), Resolution::monthly(),
                   Resolution::yearly()}) {
    int64_t excluded = 0;
    auto seq = build_sequence(corpus, res, &excluded);
    int64_t total = measured_edge_total(seq) + excluded;
    CAPTURE(res.label());
    if (reference < 0) reference = total;
    CHECK(total == reference);
  }
  CHECK(reference == corpus.stats.n_citations);
}

TEST_CASE("final network equals the flat citation network minus exclusions") {
  auto corpus = random_corpus(13, 40, 120);
  auto flat = corpus_histogram(corpus);
  for (auto res : {Resolution::maximal(), Resolution::yearly()}) {
    int64_t excluded = 0;
    auto seq = build_sequence(corpus, res, &excluded);
    auto hist = degree_histogram_at(seq, seq.num_steps());
    CHECK(hist.total_nodes == flat.total_nodes);
    CHECK(hist.total_edges() == flat.total_edges() - excluded);
    if (excluded == 0)
      for (int64_t k = 0; k <= flat.max_degree(); ++k) CHECK(hist.count(k) == flat.count(k));
  }
}

TEST_CASE("maximal resolution structural constraints") {
  auto corpus = random_corpus(21, 45, 150);
  auto seq = build_sequence(corpus, Resolution::maximal());
  CHECK(seq.num_steps() == 45);
  for (int64_t t = 2; t <= seq.num_steps(); ++t) {
    CHECK(seq.nodes_added(t) == 1);
    CHECK(seq.intra_count(t) == 0);
  }
}

TEST_CASE("bi-epochal construction") {
  auto corpus = parse_strings(
      "id,date\n"
      "t1a,1992-03-01\n"
      "t1b,1995-06-01\n"
      "t2a,2000-02-01\n"
      "t2b,2000-08-01\n"
      "out,2005-01-01\n",
      "citing_id,cited_id\n"
      "t2a,t1a\n"
      "t2b,t1b\n"
      "t2b,t2a\n"   // same-epoch cite: intra
      "t1b,t1a\n"   // first-epoch internal edge
      "out,t1a\n"); // outside both epochs: dropped with its article
  auto res = Resolution::bi_epochal(*parse_interval("1990:1999"), *parse_interval("2000:2000"));
  auto seq = build_sequence(corpus, res);
  REQUIRE(seq.num_steps() == 2);
  CHECK(seq.nodes_added(1) == 2);
  CHECK(seq.intra_count(1) == 1);
  CHECK(seq.nodes_added(2) == 2);
  CHECK(seq.cross_count(2) == 2);
  CHECK(seq.intra_count(2) == 1);

  SUBCASE("overlapping intervals") {
    CHECK_THROWS_AS(
        build_sequence(corpus, Resolution::bi_epochal(*parse_interval("1990:2000"),
                                                      *parse_interval("2000:2001"))),
        ConfigError);
  }
  SUBCASE("epoch with no articles") {
    CHECK_THROWS_AS(
        build_sequence(corpus, Resolution::bi_epochal(*parse_interval("1980:1981"),
                                                      *parse_interval("2000:2000"))),
        ConfigError);
  }
}

TEST_CASE("coarsen regroups steps and preserves edges") {
  auto corpus = random_corpus(31, 55, 180);
  int64_t excluded = 0;
  auto seq = build_sequence(corpus, Resolution::maximal(), &excluded);
  auto coarse = coarsen(seq, 10);
  CHECK(coarse.num_nodes() == seq.num_nodes());
  CHECK(measured_edge_total(coarse) == measured_edge_total(seq));
  CHECK(coarse.num_steps() == 6);  // 55 nodes in buckets of 10
  for (int64_t t = 1; t < coarse.num_steps(); ++t) CHECK(coarse.nodes_added(t) == 10);
  CHECK(coarse.nodes_added(coarse.num_steps()) == 5);

  auto fine_hist = degree_histogram_at(seq, seq.num_steps());
  auto coarse_hist = degree_histogram_at(coarse, coarse.num_steps());
  for (int64_t k = 0; k <= fine_hist.max_degree(); ++k)
    CHECK(coarse_hist.count(k) == fine_hist.count(k));

  CHECK_THROWS_AS(coarsen(seq, 0), ConfigError);
}

TEST_CASE("jsonl round trip is exact") {
  auto corpus = random_corpus(17, 30, 90);
  auto seq = build_sequence(corpus, Resolution::monthly());
  std::ostringstream first;
  seq.emit_jsonl(first);
  std::istringstream in(first.str());
  auto loaded = GrowthSequence::load_jsonl(in);
  std::ostringstream second;
  loaded.emit_jsonl(second);
  CHECK(first.str() == second.str());
  CHECK(loaded.num_steps() == seq.num_steps());
  CHECK(loaded.num_cross_edges() == seq.num_cross_edges());

  std::istringstream bad("{\"t\":1,\"nodes\":[\n");
  CHECK_THROWS_AS(GrowthSequence::load_jsonl(bad), ParseError);
}
