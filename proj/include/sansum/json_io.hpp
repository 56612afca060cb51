#pragma once

#include <json.hpp>

#include "sansum/metrics.hpp"
#include "sansum/summarize.hpp"
#include "sansum/text_prep.hpp"

namespace sansum {

// JSON views of the domain types. nlohmann::json orders object keys
// alphabetically, which keeps serialized output deterministic.

inline nlohmann::json to_json(const Document& doc) {
    nlohmann::json sentences = nlohmann::json::array();
    for (const auto& s : doc.sentences)
        sentences.push_back({{"index", s.index}, {"text", s.text}, {"tokens", s.tokens}});
    return {{"id", doc.id}, {"sentences", std::move(sentences)}};
}

inline nlohmann::json to_json(const Summary& summary, const std::string& method,
                              nlohmann::json params) {
    return {{"doc_id", summary.doc_id},
            {"method", method},
            {"selected", summary.selected},
            {"summary", summary.text},
            {"params", std::move(params)}};
}

inline nlohmann::json to_json(const RougeResult& r) {
    return {{"r", r.recall}, {"p", r.precision}, {"f", r.f1}};
}

inline nlohmann::json to_json(const BertScoreResult& r) {
    return {{"r", r.recall}, {"p", r.precision}, {"f", r.f1}};
}

inline nlohmann::json to_json(const ScoreReport& report) {
    const auto field = [](const auto& f) -> nlohmann::json {
        if (f.error) return {{"error", *f.error}};
        if (f.value) return to_json(*f.value);
        return nullptr;
    };
    return {{"rouge1", field(report.rouge1)},
            {"rouge2", field(report.rouge2)},
            {"rougeL", field(report.rougeL)},
            {"bert_score", field(report.bert)}};
}

}  // namespace sansum
