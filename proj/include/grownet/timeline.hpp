#pragma once

#include <cstdint>
#include <string>

#include "grownet/corpus.hpp"
#include "grownet/growth.hpp"

namespace grownet {

enum class ResolutionKind { maximal, daily, monthly, yearly, bi_epochal };

struct Resolution {
  ResolutionKind kind = ResolutionKind::maximal;
  DateInterval t1, t2;  // bi_epochal only

  static Resolution maximal() { return {ResolutionKind::maximal, {}, {}}; }
  static Resolution daily() { return {ResolutionKind::daily, {}, {}}; }
  static Resolution monthly() { return {ResolutionKind::monthly, {}, {}}; }
  static Resolution yearly() { return {ResolutionKind::yearly, {}, {}}; }
  static Resolution bi_epochal(const DateInterval& t1, const DateInterval& t2) {
    return {ResolutionKind::bi_epochal, t1, t2};
  }

  std::string label() const;
};

// Maps a cleaned, sorted corpus to a growth sequence at the given resolution.
// One step per article (maximal), per calendar bucket (daily/monthly/yearly),
// or per epoch (bi_epochal; articles outside T1 and T2 are dropped entirely).
// Citations whose target is not strictly earlier under the resolution's
// ordering and not in the same bucket are excluded; *violations receives their
// count when non-null.
GrowthSequence build_sequence(const CitationCorpus& corpus, const Resolution& res,
                              int64_t* violations = nullptr);

// Count of citations excluded by build_sequence for pointing forward in time.
int64_t chronology_violations(const CitationCorpus& corpus, const Resolution& res);

// In-degree histogram of G_t: all cross and intra edges of steps 1..t.
DegreeHistogram degree_histogram_at(const GrowthSequence& seq, int64_t t);

// Regroups consecutive steps into coarse buckets of at least nodes_per_bucket
// nodes each (last bucket may be smaller). Edges joining nodes of the same
// bucket become intra edges; node ids are preserved.
GrowthSequence coarsen(const GrowthSequence& seq, int64_t nodes_per_bucket);

}  // namespace grownet
