#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grownet/date.hpp"

namespace grownet {

using NodeId = int32_t;

// In-degree histogram: counts[k] = number of nodes with in-degree k.
struct DegreeHistogram {
  std::vector<int64_t> counts;
  int64_t total_nodes = 0;

  int64_t count(int64_t k) const {
    return (k >= 0 && k < static_cast<int64_t>(counts.size())) ? counts[static_cast<size_t>(k)] : 0;
  }
  int64_t max_degree() const {
    for (int64_t k = static_cast<int64_t>(counts.size()) - 1; k >= 0; --k)
      if (counts[static_cast<size_t>(k)] > 0) return k;
    return -1;
  }
  void bump(int64_t k, int64_t delta = 1);
  int64_t total_edges() const;  // sum of k * n(k)
};

// One step's delta, viewed in place. Node ids are dense and assigned in step
// order, so a step's new nodes are the contiguous range
// [first_node, first_node + node_count).
struct StepView {
  int64_t t = 0;  // 1-based
  NodeId first_node = 0;
  int64_t node_count = 0;
  std::span<const NodeId> cross_src, cross_dst;  // new -> existing
  std::span<const NodeId> intra_src, intra_dst;  // both within this step
};

// Immutable nested network sequence {G_t}, stored as per-step deltas in
// structure-of-arrays form. Safe to share across threads once built.
class GrowthSequence {
 public:
  int64_t num_steps() const { return static_cast<int64_t>(node_off_.size()) - 1; }
  int64_t num_nodes() const { return node_off_.empty() ? 0 : static_cast<int64_t>(node_off_.back()); }
  int64_t num_cross_edges() const { return static_cast<int64_t>(cross_src_.size()); }
  int64_t num_intra_edges() const { return static_cast<int64_t>(intra_src_.size()); }

  StepView step(int64_t t) const;           // 1 <= t <= num_steps()
  int64_t nodes_added(int64_t t) const;     // n_t
  int64_t cross_count(int64_t t) const;     // m_t
  int64_t intra_count(int64_t t) const;     // m_t'

  const std::string& resolution_label() const { return resolution_; }

  bool has_names() const { return !names_.empty(); }
  // Stored name, or the decimal node index for unnamed (simulated) sequences.
  std::string node_name(NodeId id) const;

  bool has_step_dates() const { return !step_dates_.empty(); }
  const std::vector<Date>& step_dates() const { return step_dates_; }

  void emit_jsonl(std::ostream& out) const;
  static GrowthSequence load_jsonl(std::istream& in, const std::string& label = "sequence");

 private:
  friend class GrowthBuilder;
  std::string resolution_;
  std::vector<uint32_t> node_off_, cross_off_, intra_off_;  // size T+1, offsets per step
  std::vector<NodeId> cross_src_, cross_dst_;
  std::vector<NodeId> intra_src_, intra_dst_;
  std::vector<std::string> names_;   // empty: nodes are identified by index
  std::vector<Date> step_dates_;     // empty: no per-step dates
};

// Sequential construction: add nodes and edges for the current step, then
// finish_step(). Misuse (cross edge in step 1, edge endpoints outside the
// legal ranges, unfinished final step) throws std::logic_error since callers
// are expected to have validated their inputs already.
class GrowthBuilder {
 public:
  explicit GrowthBuilder(std::string resolution_label);

  NodeId add_node();
  NodeId add_node(std::string name);
  void add_cross_edge(NodeId src, NodeId dst);
  void add_intra_edge(NodeId src, NodeId dst);
  void set_step_date(const Date& d);
  void finish_step();

  int64_t steps_finished() const { return static_cast<int64_t>(seq_.node_off_.size()) - 1; }
  NodeId next_node_id() const { return next_id_; }

  GrowthSequence take();

 private:
  NodeId step_first_() const { return static_cast<NodeId>(seq_.node_off_.back()); }

  GrowthSequence seq_;
  NodeId next_id_ = 0;
  std::optional<Date> pending_date_;
  bool taken_ = false;
};

}  // namespace grownet
