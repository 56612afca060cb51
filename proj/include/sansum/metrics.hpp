#pragma once

#include <algorithm>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sansum/embeddings.hpp"
#include "sansum/errors.hpp"
#include "sansum/text_prep.hpp"

namespace sansum {

enum class RougeVariant { rouge1, rouge2, rougeL };

struct RougeResult {
    RougeVariant variant = RougeVariant::rouge1;
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
};

struct BertScoreResult {
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
};

namespace detail {

inline double f_measure(double precision, double recall) {
    const double denom = precision + recall;
    return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

inline std::unordered_map<std::string, int> ngram_counts(const std::vector<std::string>& tokens,
                                                         std::size_t n) {
    std::unordered_map<std::string, int> counts;
    for (auto& gram : ngrams(tokens, n)) ++counts[gram];
    return counts;
}

// LCS length over token sequences, classic O(m*n) table.
inline std::size_t lcs_length(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
    const std::size_t m = a.size(), n = b.size();
    std::vector<std::size_t> prev(n + 1, 0), cur(n + 1, 0);
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

}  // namespace detail

// Clipped n-gram matches: each distinct n-gram contributes
// min(count in candidate, count in reference).
inline int rouge_match_count(const std::vector<std::string>& candidate,
                             const std::vector<std::string>& reference, std::size_t n) {
    const auto cand_counts = detail::ngram_counts(candidate, n);  // throws if n == 0
    const auto ref_counts = detail::ngram_counts(reference, n);
    int match = 0;
    for (const auto& [gram, ref_count] : ref_counts) {
        const auto it = cand_counts.find(gram);
        if (it != cand_counts.end()) match += std::min(it->second, ref_count);
    }
    return match;
}

inline RougeResult rouge_n(const std::vector<std::string>& candidate,
                           const std::vector<std::string>& reference, std::size_t n) {
    const int match = rouge_match_count(candidate, reference, n);
    const std::size_t cand_total = candidate.size() >= n ? candidate.size() - n + 1 : 0;
    const std::size_t ref_total = reference.size() >= n ? reference.size() - n + 1 : 0;

    RougeResult result;
    result.variant = n == 1 ? RougeVariant::rouge1 : RougeVariant::rouge2;
    result.recall = ref_total > 0 ? static_cast<double>(match) / static_cast<double>(ref_total) : 0.0;
    result.precision =
        cand_total > 0 ? static_cast<double>(match) / static_cast<double>(cand_total) : 0.0;
    result.f1 = detail::f_measure(result.precision, result.recall);
    return result;
}

inline RougeResult rouge_l(const std::vector<std::string>& candidate,
                           const std::vector<std::string>& reference) {
    RougeResult result;
    result.variant = RougeVariant::rougeL;
    if (candidate.empty() || reference.empty()) return result;  // all-zero
    const auto lcs = static_cast<double>(detail::lcs_length(candidate, reference));
    result.recall = lcs / static_cast<double>(reference.size());
    result.precision = lcs / static_cast<double>(candidate.size());
    result.f1 = detail::f_measure(result.precision, result.recall);
    return result;
}

// Greedy token matching in embedding space: every reference token is matched
// to its best candidate token (recall) and vice versa (precision), with all
// vectors L2-normalized first.
inline BertScoreResult bert_score(const std::vector<Sentence>& candidate,
                                  const std::vector<Sentence>& reference,
                                  const EmbeddingProvider& provider,
                                  const std::string& candidate_doc_id = "",
                                  const std::string& reference_doc_id = "") {
    const auto collect = [&](const std::vector<Sentence>& sentences, const std::string& doc_id) {
        std::vector<std::vector<double>> vectors;
        for (const auto& s : sentences)
            for (auto& v : provider.token_embeddings(doc_id, s)) {
                const double norm = vec::norm2(v);
                if (norm == 0.0)
                    throw DegenerateVectorError("zero-norm embedding for a token of sentence " +
                                                std::to_string(s.index));
                for (double& e : v) e /= norm;
                vectors.push_back(std::move(v));
            }
        return vectors;
    };
    const auto cand = collect(candidate, candidate_doc_id);
    const auto ref = collect(reference, reference_doc_id);
    if (cand.empty() || ref.empty())
        throw ArgumentError("bert_score requires non-empty tokenized summaries");

    const auto best_match_mean = [](const std::vector<std::vector<double>>& from,
                                    const std::vector<std::vector<double>>& to) {
        double sum = 0.0;
        for (const auto& u : from) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& v : to) best = std::max(best, vec::dot(u, v));
            sum += best;
        }
        return sum / static_cast<double>(from.size());
    };

    BertScoreResult result;
    result.recall = best_match_mean(ref, cand);
    result.precision = best_match_mean(cand, ref);
    result.f1 = detail::f_measure(result.precision, result.recall);
    return result;
}

// One metric slot of a report: a value, or the error that prevented it.
template <typename T>
struct MetricField {
    std::optional<T> value;
    std::optional<std::string> error;
};

struct ScoreReport {
    MetricField<RougeResult> rouge1;
    MetricField<RougeResult> rouge2;
    MetricField<RougeResult> rougeL;
    MetricField<BertScoreResult> bert;  // empty when no provider was supplied

    bool all_ok() const {
        return !rouge1.error && !rouge2.error && !rougeL.error && !bert.error;
    }
};

// Batch wrapper: ROUGE-1/2/L always, BERTScore when a provider is supplied.
// A failing metric annotates its own field and leaves the rest intact.
inline ScoreReport evaluate(const Document& candidate, const Document& reference,
                            const EmbeddingProvider* provider = nullptr) {
    ScoreReport report;
    const auto cand_tokens = candidate.all_tokens();
    const auto ref_tokens = reference.all_tokens();

    const auto guard = [](auto& field, auto&& compute) {
        try {
            field.value = compute();
        } catch (const Error& e) {
            field.error = e.what();
        }
    };
    guard(report.rouge1, [&] { return rouge_n(cand_tokens, ref_tokens, 1); });
    guard(report.rouge2, [&] { return rouge_n(cand_tokens, ref_tokens, 2); });
    guard(report.rougeL, [&] { return rouge_l(cand_tokens, ref_tokens); });
    if (provider)
        guard(report.bert, [&] {
            return bert_score(candidate.sentences, reference.sentences, *provider, candidate.id,
                              reference.id);
        });
    return report;
}

// One aggregation row per evaluated document. Failed or absent metrics leave
// empty cells.
inline std::string score_report_csv_header() {
    return "id,rouge1_r,rouge1_p,rouge1_f,rouge2_r,rouge2_p,rouge2_f,"
           "rougeL_r,rougeL_p,rougeL_f,bert_r,bert_p,bert_f";
}

inline std::string score_report_csv_row(const std::string& id, const ScoreReport& report) {
    std::string row = id;
    char buf[32];
    const auto append = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.6f", v);
        row += buf;
    };
    const auto append_rouge = [&](const MetricField<RougeResult>& f) {
        if (f.value) {
            append(f.value->recall);
            append(f.value->precision);
            append(f.value->f1);
        } else {
            row += ",,,";
        }
    };
    append_rouge(report.rouge1);
    append_rouge(report.rouge2);
    append_rouge(report.rougeL);
    if (report.bert.value) {
        append(report.bert.value->recall);
        append(report.bert.value->precision);
        append(report.bert.value->f1);
    } else {
        row += ",,,";
    }
    return row;
}

}  // namespace sansum
