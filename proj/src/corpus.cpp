#include "grownet/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "grownet/csv.hpp"
#include "grownet/growth.hpp"
#include "grownet/io_util.hpp"

#include <json.hpp>

namespace grownet {

namespace {

struct StringHash {
  using is_transparent = void;
  size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};

using IdTable = std::unordered_map<std::string, int64_t, StringHash, std::equal_to<>>;

}  // namespace

CitationCorpus parse_corpus(std::istream& nodes, std::istream& edges,
                            std::optional<DateInterval> window,
                            const std::string& nodes_label,
                            const std::string& edges_label) {
  if (window && !(window->start <= window->end))
    throw ConfigError("date window start must not exceed end");

  IdTable node_ids;                    // article id -> ordinal
  std::vector<int32_t> retained_of;    // ordinal -> retained record index, -1 if windowed out
  std::vector<CitationRecord> records;
  std::vector<int64_t> ordinal_of_retained;

  {
    CsvReader reader(nodes, nodes_label);
    reader.expect_header("id,date");
    std::vector<std::string_view> fields;
    while (reader.next_row(fields, 2)) {
      if (fields[0].empty()) reader.fail("empty article id");
      auto date = Date::parse(fields[1]);
      if (!date) reader.fail("unparseable date '" + std::string(fields[1]) + "'");
      int64_t ordinal = static_cast<int64_t>(retained_of.size());
      auto [it, inserted] = node_ids.emplace(std::string(fields[0]), ordinal);
      if (!inserted) reader.fail("duplicate article id '" + std::string(fields[0]) + "'");
      if (!window || window->contains(*date)) {
        retained_of.push_back(static_cast<int32_t>(records.size()));
        records.push_back(CitationRecord{it->first, *date, {}});
        ordinal_of_retained.push_back(ordinal);
      } else {
        retained_of.push_back(-1);
      }
    }
  }

  // Raw per-article target tokens in edge-file order. Known targets are
  // encoded by node ordinal, unknown ids are interned as negative tokens so
  // duplicate detection still sees them.
  std::vector<std::vector<int64_t>> raw_refs(records.size());
  int64_t windowed_out_edges = 0;  // citing article outside the window
  {
    IdTable unknown_ids;
    CsvReader reader(edges, edges_label);
    reader.expect_header("citing_id,cited_id");
    std::vector<std::string_view> fields;
    while (reader.next_row(fields, 2)) {
      auto citing = node_ids.find(fields[0]);
      if (citing == node_ids.end())
        reader.fail("citing id '" + std::string(fields[0]) + "' not present in nodes file");
      int32_t rec_index = retained_of[static_cast<size_t>(citing->second)];
      if (rec_index < 0) {
        ++windowed_out_edges;
        continue;
      }
      int64_t token;
      if (auto it = node_ids.find(fields[1]); it != node_ids.end()) {
        token = it->second;
      } else {
        auto [uit, _] = unknown_ids.emplace(std::string(fields[1]),
                                            -1 - static_cast<int64_t>(unknown_ids.size()));
        token = uit->second;
      }
      raw_refs[static_cast<size_t>(rec_index)].push_back(token);
    }
  }

  // Cleaning. Order fixed: windowing happened above; duplicates are removed
  // before self-citations, dangling references last.
  CorpusStats stats;
  stats.n_articles = static_cast<int64_t>(records.size());
  // An edge from a windowed-out article leaves with its record; it lands in
  // the dangling counter so every raw edge is accounted for.
  stats.n_dangling_removed += windowed_out_edges;
  std::unordered_set<int64_t> seen;
  for (size_t i = 0; i < records.size(); ++i) {
    auto& rec = records[i];
    int64_t own_token = ordinal_of_retained[i];
    seen.clear();
    for (int64_t token : raw_refs[i]) {
      if (!seen.insert(token).second) {
        ++stats.n_duplicates_removed;
        continue;
      }
      if (token == own_token) {
        ++stats.n_self_citations_removed;
        continue;
      }
      if (token < 0 || retained_of[static_cast<size_t>(token)] < 0) {
        ++stats.n_dangling_removed;
        continue;
      }
      rec.references.push_back(
          records[static_cast<size_t>(retained_of[static_cast<size_t>(token)])].article_id);
      ++stats.n_citations;
    }
    raw_refs[i].clear();
    raw_refs[i].shrink_to_fit();
  }

  std::sort(records.begin(), records.end(),
            [](const CitationRecord& a, const CitationRecord& b) {
              if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
              return a.article_id < b.article_id;
            });

  stats.mean_citations =
      stats.n_articles > 0
          ? static_cast<double>(stats.n_citations) / static_cast<double>(stats.n_articles)
          : 0.0;

  return CitationCorpus{std::move(records), stats};
}

CitationCorpus parse_corpus_files(const std::string& nodes_path,
                                  const std::string& edges_path,
                                  std::optional<DateInterval> window) {
  std::ifstream nodes(nodes_path, std::ios::binary);
  if (!nodes) throw ParseError("cannot open nodes file: " + nodes_path);
  std::ifstream edges(edges_path, std::ios::binary);
  if (!edges) throw ParseError("cannot open edges file: " + edges_path);
  return parse_corpus(nodes, edges, window, nodes_path, edges_path);
}

CorpusStats corpus_summary(const CitationCorpus& corpus) {
  CorpusStats stats = corpus.stats;
  stats.n_articles = static_cast<int64_t>(corpus.records.size());
  stats.n_citations = 0;
  for (const auto& rec : corpus.records)
    stats.n_citations += static_cast<int64_t>(rec.references.size());
  stats.mean_citations =
      stats.n_articles > 0
          ? static_cast<double>(stats.n_citations) / static_cast<double>(stats.n_articles)
          : 0.0;
  return stats;
}

void emit_canonical(const CitationCorpus& corpus, std::ostream& nodes,
                    std::ostream& edges) {
  nodes << "id,date\n";
  for (const auto& rec : corpus.records)
    nodes << rec.article_id << ',' << rec.timestamp.to_string() << '\n';
  edges << "citing_id,cited_id\n";
  for (const auto& rec : corpus.records)
    for (const auto& target : rec.references)
      edges << rec.article_id << ',' << target << '\n';
}

std::string stats_to_json(const CorpusStats& stats) {
  nlohmann::ordered_json j;
  j["n_articles"] = stats.n_articles;
  j["n_citations"] = stats.n_citations;
  j["n_duplicates_removed"] = stats.n_duplicates_removed;
  j["n_self_citations_removed"] = stats.n_self_citations_removed;
  j["n_dangling_removed"] = stats.n_dangling_removed;
  j["mean_citations"] = stats.mean_citations;
  return j.dump(2) + "\n";
}

DegreeHistogram corpus_histogram(const CitationCorpus& corpus) {
  IdTable index;
  index.reserve(corpus.records.size() * 2);
  for (size_t i = 0; i < corpus.records.size(); ++i)
    index.emplace(corpus.records[i].article_id, static_cast<int64_t>(i));
  std::vector<int64_t> deg(corpus.records.size(), 0);
  for (const auto& rec : corpus.records)
    for (const auto& target : rec.references)
      ++deg[static_cast<size_t>(index.find(target)->second)];
  DegreeHistogram hist;
  for (int64_t d : deg) hist.bump(d);
  return hist;
}

}  // namespace grownet
