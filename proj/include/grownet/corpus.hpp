#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "grownet/date.hpp"

namespace grownet {

// One timestamped article together with its cleaned reference list: no
// self-citations, no duplicate targets, no references to articles outside
// the corpus.
struct CitationRecord {
  std::string article_id;
  Date timestamp;
  std::vector<std::string> references;  // first-occurrence order
};

struct CorpusStats {
  int64_t n_articles = 0;
  int64_t n_citations = 0;
  int64_t n_duplicates_removed = 0;
  int64_t n_self_citations_removed = 0;
  int64_t n_dangling_removed = 0;
  double mean_citations = 0.0;
};

// Cleaned corpus, records sorted by (timestamp, article_id). Identically
// timestamped articles are ordered lexicographically by id; this is the tie
// rule the maximal time resolution relies on.
struct CitationCorpus {
  std::vector<CitationRecord> records;
  CorpusStats stats;
};

// Parses the nodes CSV (`id,date`) and edges CSV (`citing_id,cited_id`) into
// a cleaned corpus. Records outside `window` are dropped along with their
// citations. Cleaning order is fixed: windowing, then duplicate removal, then
// self-citation removal, then dangling-reference removal, so the four stats
// counters are deterministic. A citing id absent from the nodes file is a
// parse error; a cited id absent from the retained set is counted dangling.
CitationCorpus parse_corpus(std::istream& nodes, std::istream& edges,
                            std::optional<DateInterval> window = std::nullopt,
                            const std::string& nodes_label = "nodes",
                            const std::string& edges_label = "edges");

CitationCorpus parse_corpus_files(const std::string& nodes_path,
                                  const std::string& edges_path,
                                  std::optional<DateInterval> window = std::nullopt);

// Recomputes summary statistics from the records. The removal counters are
// taken from the stored stats (they describe the cleaning run, not the
// cleaned records).
CorpusStats corpus_summary(const CitationCorpus& corpus);

// Canonical emission: cleaned, sorted nodes and edges files. Re-parsing the
// emitted pair reproduces the same records and re-emitting is a fixed point.
void emit_canonical(const CitationCorpus& corpus, std::ostream& nodes,
                    std::ostream& edges);

std::string stats_to_json(const CorpusStats& stats);

// In-degree (citation-count) histogram over all retained articles, counting
// every cleaned citation regardless of direction in time. Uncited articles
// contribute to the zero bin.
struct DegreeHistogram;
DegreeHistogram corpus_histogram(const CitationCorpus& corpus);

}  // namespace grownet
