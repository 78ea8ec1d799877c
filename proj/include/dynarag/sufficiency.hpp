#pragma once

#include "dynarag/reranker.hpp"

#include <string>
#include <vector>

namespace dynarag {

enum class Verdict { sufficient, insufficient };

const char* to_string(Verdict v);

struct SufficiencyDecision {
    Verdict verdict = Verdict::insufficient;
    RelevanceScore top_score;   // 0 when the ranked list is empty
    double threshold = 0.0;
};

struct LabeledExample {
    double top_score = 0.0;
    bool sufficient = false;
};

// Threshold gate: sufficient iff the best ranked score >= threshold.
// An empty ranked list has top score 0, so it is insufficient for any
// threshold > 0. The boundary case (top == threshold) is sufficient.
SufficiencyDecision decide(const std::vector<RankedPassage>& ranked, double threshold);

struct TunedThreshold {
    double threshold = 0.0;
    double f1 = 0.0;
};

// Picks the threshold from {0} ∪ {observed dev scores} maximizing the F1
// of the "sufficient" class under the rule score >= τ. Ties break toward
// the larger τ. The dev set must contain both labels.
TunedThreshold tune_threshold(const std::vector<LabeledExample>& dev);

// F1 of the "sufficient" class for a fixed threshold; used both by the
// tuner and by callers wanting to audit a candidate τ.
double sufficiency_f1(const std::vector<LabeledExample>& dev, double threshold);

// Dev-set file: JSONL of {"top_score": number, "label": "sufficient"|"insufficient"}.
std::vector<LabeledExample> load_dev_set(const std::string& path);
void save_dev_set(const std::vector<LabeledExample>& dev, const std::string& path);

} // namespace dynarag
