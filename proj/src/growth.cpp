#include "grownet/growth.hpp"

#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "grownet/errors.hpp"

#include <json.hpp>

namespace grownet {

void DegreeHistogram::bump(int64_t k, int64_t delta) {
  if (k < 0) throw std::logic_error("negative degree");
  if (k >= static_cast<int64_t>(counts.size())) counts.resize(static_cast<size_t>(k) + 1, 0);
  counts[static_cast<size_t>(k)] += delta;
  total_nodes += delta;
  if (counts[static_cast<size_t>(k)] < 0) throw std::logic_error("degree count went negative");
}

int64_t DegreeHistogram::total_edges() const {
  int64_t sum = 0;
  for (size_t k = 0; k < counts.size(); ++k) sum += static_cast<int64_t>(k) * counts[k];
  return sum;
}

StepView GrowthSequence::step(int64_t t) const {
  if (t < 1 || t > num_steps()) throw ConfigError("step index out of range");
  auto i = static_cast<size_t>(t);
  StepView v;
  v.t = t;
  v.first_node = static_cast<NodeId>(node_off_[i - 1]);
  v.node_count = static_cast<int64_t>(node_off_[i]) - static_cast<int64_t>(node_off_[i - 1]);
  v.cross_src = {cross_src_.data() + cross_off_[i - 1], cross_src_.data() + cross_off_[i]};
  v.cross_dst = {cross_dst_.data() + cross_off_[i - 1], cross_dst_.data() + cross_off_[i]};
  v.intra_src = {intra_src_.data() + intra_off_[i - 1], intra_src_.data() + intra_off_[i]};
  v.intra_dst = {intra_dst_.data() + intra_off_[i - 1], intra_dst_.data() + intra_off_[i]};
  return v;
}

int64_t GrowthSequence::nodes_added(int64_t t) const {
  if (t < 1 || t > num_steps()) throw ConfigError("step index out of range");
  return static_cast<int64_t>(node_off_[static_cast<size_t>(t)]) -
         static_cast<int64_t>(node_off_[static_cast<size_t>(t) - 1]);
}

int64_t GrowthSequence::cross_count(int64_t t) const {
  if (t < 1 || t > num_steps()) throw ConfigError("step index out of range");
  return static_cast<int64_t>(cross_off_[static_cast<size_t>(t)]) -
         static_cast<int64_t>(cross_off_[static_cast<size_t>(t) - 1]);
}

int64_t GrowthSequence::intra_count(int64_t t) const {
  if (t < 1 || t > num_steps()) throw ConfigError("step index out of range");
  return static_cast<int64_t>(intra_off_[static_cast<size_t>(t)]) -
         static_cast<int64_t>(intra_off_[static_cast<size_t>(t) - 1]);
}

std::string GrowthSequence::node_name(NodeId id) const {
  if (id < 0 || static_cast<int64_t>(id) >= num_nodes()) throw ConfigError("node id out of range");
  if (names_.empty()) return std::to_string(id);
  return names_[static_cast<size_t>(id)];
}

namespace {

void append_json_string(std::string& out, std::string_view s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

std::string id_token(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<int64_t>());
  throw ParseError(where + ": node id must be a string or integer");
}

}  // namespace

void GrowthSequence::emit_jsonl(std::ostream& out) const {
  std::string line;
  for (int64_t t = 1; t <= num_steps(); ++t) {
    StepView v = step(t);
    line.clear();
    line += "{\"t\":";
    line += std::to_string(t);
    line += ",\"nodes\":[";
    for (int64_t i = 0; i < v.node_count; ++i) {
      if (i) line += ',';
      append_json_string(line, node_name(static_cast<NodeId>(v.first_node + i)));
    }
    line += "],\"cross\":[";
    for (size_t i = 0; i < v.cross_src.size(); ++i) {
      if (i) line += ',';
      line += '[';
      append_json_string(line, node_name(v.cross_src[i]));
      line += ',';
      append_json_string(line, node_name(v.cross_dst[i]));
      line += ']';
    }
    line += "],\"intra\":[";
    for (size_t i = 0; i < v.intra_src.size(); ++i) {
      if (i) line += ',';
      line += '[';
      append_json_string(line, node_name(v.intra_src[i]));
      line += ',';
      append_json_string(line, node_name(v.intra_dst[i]));
      line += ']';
    }
    line += "]}\n";
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
}

GrowthSequence GrowthSequence::load_jsonl(std::istream& in, const std::string& label) {
  GrowthBuilder builder("jsonl");
  std::unordered_map<std::string, NodeId> index;
  std::string line;
  int64_t lineno = 0, t_expected = 1;

  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError(label + ":" + std::to_string(lineno) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw fail(e.what());
    }
    if (!j.is_object()) throw fail("step record must be a JSON object");
    if (!j.contains("t") || !j["t"].is_number_integer()) throw fail("missing integer field 't'");
    if (j["t"].get<int64_t>() != t_expected)
      throw fail("expected t=" + std::to_string(t_expected) + ", got " + j["t"].dump());

    NodeId step_first = builder.next_node_id();
    const std::string where = label + ":" + std::to_string(lineno);

    if (!j.contains("nodes") || !j["nodes"].is_array()) throw fail("missing array field 'nodes'");
    for (const auto& v : j["nodes"]) {
      std::string name = id_token(v, where);
      NodeId id = builder.next_node_id();
      if (!index.emplace(name, id).second) throw fail("duplicate node id '" + name + "'");
      builder.add_node(std::move(name));
    }

    auto resolve = [&](const nlohmann::json& v) {
      auto it = index.find(id_token(v, where));
      if (it == index.end()) throw fail("unknown node id " + v.dump());
      return it->second;
    };
    auto edge_pair = [&](const nlohmann::json& e) {
      if (!e.is_array() || e.size() != 2) throw fail("edge must be a [src,dst] pair");
      return std::pair{resolve(e[0]), resolve(e[1])};
    };

    if (j.contains("cross")) {
      if (!j["cross"].is_array()) throw fail("'cross' must be an array");
      for (const auto& e : j["cross"]) {
        auto [src, dst] = edge_pair(e);
        if (t_expected == 1) throw fail("cross edge in initial step");
        if (src < step_first) throw fail("cross edge source " + e[0].dump() + " is not a new node of this step");
        if (dst >= step_first) throw fail("cross edge target " + e[1].dump() + " is not from an earlier step");
        builder.add_cross_edge(src, dst);
      }
    }
    if (j.contains("intra")) {
      if (!j["intra"].is_array()) throw fail("'intra' must be an array");
      for (const auto& e : j["intra"]) {
        auto [src, dst] = edge_pair(e);
        if (src < step_first || dst < step_first)
          throw fail("intra edge endpoints must both be new nodes of this step");
        builder.add_intra_edge(src, dst);
      }
    }

    builder.finish_step();
    ++t_expected;
  }

  if (builder.steps_finished() == 0) throw ParseError(label + ": empty sequence");
  return builder.take();
}

GrowthBuilder::GrowthBuilder(std::string resolution_label) {
  seq_.resolution_ = std::move(resolution_label);
  seq_.node_off_ = {0};
  seq_.cross_off_ = {0};
  seq_.intra_off_ = {0};
}

NodeId GrowthBuilder::add_node() {
  if (!seq_.names_.empty()) throw std::logic_error("mixing named and unnamed nodes");
  if (next_id_ == std::numeric_limits<NodeId>::max()) throw ConfigError("node count overflow");
  return next_id_++;
}

NodeId GrowthBuilder::add_node(std::string name) {
  if (static_cast<size_t>(next_id_) != seq_.names_.size())
    throw std::logic_error("mixing named and unnamed nodes");
  if (next_id_ == std::numeric_limits<NodeId>::max()) throw ConfigError("node count overflow");
  seq_.names_.push_back(std::move(name));
  return next_id_++;
}

void GrowthBuilder::add_cross_edge(NodeId src, NodeId dst) {
  if (seq_.node_off_.size() == 1) throw std::logic_error("cross edge in initial step");
  if (src < step_first_() || src >= next_id_) throw std::logic_error("cross edge source not in current step");
  if (dst < 0 || dst >= step_first_()) throw std::logic_error("cross edge target not in an earlier step");
  if (seq_.cross_src_.size() >= std::numeric_limits<uint32_t>::max()) throw ConfigError("edge count overflow");
  seq_.cross_src_.push_back(src);
  seq_.cross_dst_.push_back(dst);
}

void GrowthBuilder::add_intra_edge(NodeId src, NodeId dst) {
  if (src < step_first_() || src >= next_id_ || dst < step_first_() || dst >= next_id_)
    throw std::logic_error("intra edge endpoints not in current step");
  if (seq_.intra_src_.size() >= std::numeric_limits<uint32_t>::max()) throw ConfigError("edge count overflow");
  seq_.intra_src_.push_back(src);
  seq_.intra_dst_.push_back(dst);
}

void GrowthBuilder::set_step_date(const Date& d) {
  if (pending_date_) throw std::logic_error("step date already set");
  pending_date_ = d;
}

void GrowthBuilder::finish_step() {
  size_t finished = seq_.node_off_.size() - 1;
  if (pending_date_) {
    if (seq_.step_dates_.size() != finished)
      throw std::logic_error("step dates must be set on every step or none");
    seq_.step_dates_.push_back(*pending_date_);
    pending_date_.reset();
  } else if (!seq_.step_dates_.empty()) {
    throw std::logic_error("step dates must be set on every step or none");
  }
  seq_.node_off_.push_back(static_cast<uint32_t>(next_id_));
  seq_.cross_off_.push_back(static_cast<uint32_t>(seq_.cross_src_.size()));
  seq_.intra_off_.push_back(static_cast<uint32_t>(seq_.intra_src_.size()));
}

GrowthSequence GrowthBuilder::take() {
  if (taken_) throw std::logic_error("sequence already taken");
  if (steps_finished() < 1) throw std::logic_error("sequence must have at least one step");
  if (static_cast<uint32_t>(next_id_) != seq_.node_off_.back() ||
      seq_.cross_src_.size() != seq_.cross_off_.back() ||
      seq_.intra_src_.size() != seq_.intra_off_.back() || pending_date_)
    throw std::logic_error("unfinished step");
  taken_ = true;
  return std::move(seq_);
}

}  // namespace grownet
