#include "dynarag/sufficiency.hpp"

#include "dynarag/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace dynarag {

const char* to_string(Verdict v) {
    return v == Verdict::sufficient ? "sufficient" : "insufficient";
}

SufficiencyDecision decide(const std::vector<RankedPassage>& ranked, double threshold) {
    if (!std::isfinite(threshold) || threshold < 0.0 || threshold > 1.0) {
        throw Error(ErrorCode::invalid_argument,
                    "threshold must lie in [0,1], got " + std::to_string(threshold));
    }
    double top = 0.0;
    for (const auto& passage : ranked) {
        top = std::max(top, passage.score.value);
    }
    SufficiencyDecision decision;
    decision.top_score = RelevanceScore(top);
    decision.threshold = threshold;
    decision.verdict = top >= threshold ? Verdict::sufficient : Verdict::insufficient;
    return decision;
}

double sufficiency_f1(const std::vector<LabeledExample>& dev, double threshold) {
    long tp = 0, fp = 0, fn = 0;
    for (const auto& example : dev) {
        bool predicted = example.top_score >= threshold;
        if (predicted && example.sufficient) ++tp;
        else if (predicted && !example.sufficient) ++fp;
        else if (!predicted && example.sufficient) ++fn;
    }
    long denom = 2 * tp + fp + fn;
    if (denom == 0) return 0.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

TunedThreshold tune_threshold(const std::vector<LabeledExample>& dev) {
    bool has_sufficient = false, has_insufficient = false;
    for (const auto& example : dev) {
        if (!std::isfinite(example.top_score) || example.top_score < 0.0 ||
            example.top_score > 1.0) {
            throw Error(ErrorCode::invalid_argument, "dev-set score outside [0,1]");
        }
        (example.sufficient ? has_sufficient : has_insufficient) = true;
    }
    if (!has_sufficient || !has_insufficient) {
        throw Error(ErrorCode::invalid_argument,
                    "threshold tuning needs both labels in the dev set");
    }

    // F1 as a function of τ is piecewise constant with breakpoints at the
    // observed scores, so scanning {0} ∪ {scores} is exact.
    std::vector<double> candidates;
    candidates.reserve(dev.size() + 1);
    candidates.push_back(0.0);
    for (const auto& example : dev) candidates.push_back(example.top_score);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    TunedThreshold best{0.0, -1.0};
    for (double tau : candidates) {
        double f1 = sufficiency_f1(dev, tau);
        if (f1 >= best.f1) { // >= keeps the larger τ on ties
            best = {tau, f1};
        }
    }
    return best;
}

std::vector<LabeledExample> load_dev_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open dev-set file: " + path);

    std::vector<LabeledExample> dev;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("top_score") ||
            !j["top_score"].is_number() || !j.contains("label") || !j["label"].is_string()) {
            throw Error(ErrorCode::parse_error,
                        "line " + std::to_string(line_number) + ": malformed dev-set entry");
        }
        std::string label = j["label"].get<std::string>();
        if (label != "sufficient" && label != "insufficient") {
            throw Error(ErrorCode::parse_error,
                        "line " + std::to_string(line_number) + ": unknown label \"" + label + "\"");
        }
        dev.push_back(LabeledExample{j["top_score"].get<double>(), label == "sufficient"});
    }
    return dev;
}

void save_dev_set(const std::vector<LabeledExample>& dev, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write dev-set file: " + path);
    for (const auto& example : dev) {
        nlohmann::ordered_json j = {
            {"top_score", example.top_score},
            {"label", example.sufficient ? "sufficient" : "insufficient"},
        };
        out << j.dump() << "\n";
    }
}

} // namespace dynarag
