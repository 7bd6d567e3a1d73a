#include "grownet/timeline.hpp"

#include <unordered_map>

#include "grownet/errors.hpp"

namespace grownet {

std::string Resolution::label() const {
  switch (kind) {
    case ResolutionKind::maximal: return "maximal";
    case ResolutionKind::daily: return "daily";
    case ResolutionKind::monthly: return "monthly";
    case ResolutionKind::yearly: return "yearly";
    case ResolutionKind::bi_epochal:
      return "bi_epochal[" + t1.start.to_string() + ":" + t1.end.to_string() + "," +
             t2.start.to_string() + ":" + t2.end.to_string() + "]";
  }
  return "unknown";
}

namespace {

struct StringHash {
  using is_transparent = void;
  size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};

// Bucket key, strictly increasing across steps for a sorted corpus. maximal
// keys by record index so every article is its own step.
int64_t bucket_key(const CitationRecord& rec, size_t index, ResolutionKind kind) {
  const Date& d = rec.timestamp;
  switch (kind) {
    case ResolutionKind::maximal: return static_cast<int64_t>(index);
    case ResolutionKind::daily: return (int64_t{d.year} * 12 + d.month) * 32 + d.day;
    case ResolutionKind::monthly: return int64_t{d.year} * 12 + d.month;
    case ResolutionKind::yearly: return d.year;
    case ResolutionKind::bi_epochal: break;
  }
  throw std::logic_error("bucket_key: bi_epochal handled separately");
}

}  // namespace

GrowthSequence build_sequence(const CitationCorpus& corpus, const Resolution& res,
                              int64_t* violations) {
  const auto& records = corpus.records;
  for (size_t i = 1; i < records.size(); ++i) {
    const auto& a = records[i - 1];
    const auto& b = records[i];
    if (a.timestamp > b.timestamp ||
        (a.timestamp == b.timestamp && a.article_id >= b.article_id))
      throw ConfigError("corpus records must be sorted by (timestamp, article id)");
  }

  // Step assignment per record; 0 drops the record (bi_epochal only).
  std::vector<int32_t> step_of(records.size(), 0);
  int32_t num_steps = 0;
  if (res.kind == ResolutionKind::bi_epochal) {
    if (!res.t1.valid() || !res.t2.valid())
      throw ConfigError("bi-epochal intervals must have start <= end");
    if (!(res.t1.end < res.t2.start))
      throw ConfigError("bi-epochal intervals must be non-overlapping with T1 before T2");
    int64_t in1 = 0, in2 = 0;
    for (size_t i = 0; i < records.size(); ++i) {
      if (res.t1.contains(records[i].timestamp)) { step_of[i] = 1; ++in1; }
      else if (res.t2.contains(records[i].timestamp)) { step_of[i] = 2; ++in2; }
    }
    if (in1 == 0 || in2 == 0) throw ConfigError("bi-epochal interval contains no articles");
    num_steps = 2;
  } else {
    if (records.empty()) throw ConfigError("corpus has no articles");
    int64_t prev_key = 0;
    for (size_t i = 0; i < records.size(); ++i) {
      int64_t key = bucket_key(records[i], i, res.kind);
      if (num_steps == 0 || key != prev_key) ++num_steps;
      step_of[i] = num_steps;
      prev_key = key;
    }
  }

  std::unordered_map<std::string_view, size_t, StringHash, std::equal_to<>> rec_index;
  rec_index.reserve(records.size());
  for (size_t i = 0; i < records.size(); ++i)
    rec_index.emplace(std::string_view(records[i].article_id), i);

  std::vector<NodeId> node_id_of(records.size(), -1);
  GrowthBuilder builder(res.label());
  int64_t excluded = 0;

  size_t next = 0;
  for (int32_t step = 1; step <= num_steps; ++step) {
    while (next < records.size() && step_of[next] == 0) ++next;
    size_t begin = next;
    builder.set_step_date(records[begin].timestamp);
    while (next < records.size() && (step_of[next] == 0 || step_of[next] == step)) {
      if (step_of[next] == step) node_id_of[next] = builder.add_node(records[next].article_id);
      ++next;
    }
    for (size_t r = begin; r < next; ++r) {
      if (step_of[r] != step) continue;
      for (const auto& target : records[r].references) {
        size_t ti = rec_index.find(std::string_view(target))->second;
        if (step_of[ti] == 0) continue;  // outside the bi-epochal epochs
        if (step_of[ti] > step) { ++excluded; continue; }
        if (step_of[ti] == step) builder.add_intra_edge(node_id_of[r], node_id_of[ti]);
        else builder.add_cross_edge(node_id_of[r], node_id_of[ti]);
      }
    }
    builder.finish_step();
  }

  if (violations) *violations = excluded;
  return builder.take();
}

int64_t chronology_violations(const CitationCorpus& corpus, const Resolution& res) {
  int64_t count = 0;
  build_sequence(corpus, res, &count);
  return count;
}

DegreeHistogram degree_histogram_at(const GrowthSequence& seq, int64_t t) {
  if (t < 1 || t > seq.num_steps()) throw ConfigError("step index out of range");
  StepView last = seq.step(t);
  auto n_nodes = static_cast<size_t>(last.first_node) + static_cast<size_t>(last.node_count);
  std::vector<int64_t> deg(n_nodes, 0);
  for (int64_t s = 1; s <= t; ++s) {
    StepView v = seq.step(s);
    for (NodeId dst : v.cross_dst) ++deg[static_cast<size_t>(dst)];
    for (NodeId dst : v.intra_dst) ++deg[static_cast<size_t>(dst)];
  }
  DegreeHistogram hist;
  for (int64_t d : deg) hist.bump(d);
  return hist;
}

GrowthSequence coarsen(const GrowthSequence& seq, int64_t nodes_per_bucket) {
  if (nodes_per_bucket < 1) throw ConfigError("nodes per bucket must be >= 1");

  GrowthBuilder builder("bucketed:" + std::to_string(nodes_per_bucket));
  int64_t t = 1;
  const int64_t T = seq.num_steps();
  while (t <= T) {
    int64_t bucket_first = t, acc = 0;
    while (t <= T) {
      acc += seq.nodes_added(t);
      ++t;
      if (acc >= nodes_per_bucket) break;
    }
    if (seq.has_step_dates())
      builder.set_step_date(seq.step_dates()[static_cast<size_t>(bucket_first) - 1]);
    NodeId bucket_node_first = builder.next_node_id();
    for (int64_t s = bucket_first; s < t; ++s) {
      StepView v = seq.step(s);
      for (int64_t i = 0; i < v.node_count; ++i) {
        NodeId id = seq.has_names() ? builder.add_node(seq.node_name(static_cast<NodeId>(v.first_node + i)))
                                    : builder.add_node();
        if (id != v.first_node + i) throw std::logic_error("coarsen: node id mismatch");
      }
    }
    for (int64_t s = bucket_first; s < t; ++s) {
      StepView v = seq.step(s);
      for (size_t i = 0; i < v.cross_src.size(); ++i) {
        if (v.cross_dst[i] >= bucket_node_first)
          builder.add_intra_edge(v.cross_src[i], v.cross_dst[i]);
        else
          builder.add_cross_edge(v.cross_src[i], v.cross_dst[i]);
      }
      for (size_t i = 0; i < v.intra_src.size(); ++i)
        builder.add_intra_edge(v.intra_src[i], v.intra_dst[i]);
    }
    builder.finish_step();
  }
  return builder.take();
}

}  // namespace grownet
