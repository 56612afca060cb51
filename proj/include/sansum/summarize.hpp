#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sansum/embeddings.hpp"
#include "sansum/errors.hpp"
#include "sansum/kmeans.hpp"
#include "sansum/matrix.hpp"
#include "sansum/pca.hpp"
#include "sansum/text_prep.hpp"

namespace sansum {

// Per-sentence term counts and sentence frequencies for one document.
// IDF here is inverse *sentence* frequency: each sentence plays the role of
// a document.
struct TfIdfTable {
    std::size_t n_sentences = 0;
    std::map<std::pair<int, std::string>, int> term_freq;  // (sentence, token) -> count
    std::map<std::string, int> sent_freq;                  // token -> #sentences containing it
};

inline TfIdfTable build_tfidf_table(const Document& doc) {
    TfIdfTable table;
    table.n_sentences = doc.sentences.size();
    for (const auto& s : doc.sentences) {
        for (const auto& tok : s.tokens) ++table.term_freq[{s.index, tok}];
        std::map<std::string, bool> seen;
        for (const auto& tok : s.tokens) {
            if (!seen[tok]) {
                seen[tok] = true;
                ++table.sent_freq[tok];
            }
        }
    }
    return table;
}

// One entry of a ranking. `value` is a score on the TF-IDF path (higher is
// better) and a centroid distance on the neural path (lower is better).
struct RankedSentence {
    int index = 0;
    double value = 0.0;
    std::optional<int> cluster;
};

struct Summary {
    std::string doc_id;
    std::vector<int> selected;  // strictly increasing sentence indices
    std::string text;
};

// Sentence score = sum over tokens w of TF(w,S) * ln(N / sf(w)), divided by
// the sentence's token count. Result is sorted by score descending, ties to
// the smaller sentence index.
inline std::vector<RankedSentence> tfidf_score(const Document& doc) {
    if (doc.sentences.empty()) throw EmptyDocumentError("cannot score an empty document");
    const TfIdfTable table = build_tfidf_table(doc);
    const double n = static_cast<double>(table.n_sentences);

    std::vector<RankedSentence> ranked;
    ranked.reserve(doc.sentences.size());
    for (const auto& s : doc.sentences) {
        double sum = 0.0;
        std::map<std::string, bool> counted;
        for (const auto& tok : s.tokens) {
            if (counted[tok]) continue;
            counted[tok] = true;
            const double tf = table.term_freq.at({s.index, tok});
            const double idf = std::log(n / table.sent_freq.at(tok));
            sum += tf * idf;
        }
        ranked.push_back({s.index, sum / static_cast<double>(s.tokens.size()), std::nullopt});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedSentence& a, const RankedSentence& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.index < b.index;
    });
    return ranked;
}

struct NeuralRankParams {
    bool pca_enabled = true;
    std::optional<std::size_t> pca_dim;  // default min(64, n-1, d)
    std::size_t k_max = 10;
    DistanceMetric metric = DistanceMetric::cosine;
    std::uint64_t seed = 42;
};

// Filled in by neural_rank when requested.
struct NeuralRankInfo {
    ElbowCurve elbow;
    std::size_t chosen_k = 1;
    std::size_t projected_dim = 0;
};

// Embed -> (optional) PCA -> elbow-selected k-means -> rank each sentence by
// distance to its cluster centroid, ascending, ties to the smaller index.
inline std::vector<RankedSentence> neural_rank(const Document& doc,
                                               const EmbeddingProvider& provider,
                                               const NeuralRankParams& params = {},
                                               NeuralRankInfo* info = nullptr) {
    if (doc.sentences.empty()) throw EmptyDocumentError("cannot rank an empty document");
    const std::size_t n = doc.sentences.size();
    if (n == 1) {
        if (info) *info = {};
        return {{0, 0.0, std::nullopt}};
    }

    Matrix x = embed_document(provider, doc);
    if (params.metric == DistanceMetric::cosine) {
        for (std::size_t i = 0; i < n; ++i)
            if (vec::norm2(x.row(i)) == 0.0)
                throw DegenerateVectorError("sentence " + std::to_string(i) +
                                            " has a zero embedding; cosine ranking is undefined");
    }
    if (params.pca_enabled) {
        const std::size_t q =
            params.pca_dim.value_or(std::min<std::size_t>(64, std::min(n - 1, x.cols())));
        const PCAModel model = pca_fit(x, q);
        x = pca_transform(model, x);
    }

    const ElbowCurve curve = elbow_select(x, params.k_max, params.seed);
    const ClusterModel model = kmeans(x, curve.chosen_k, params.seed);
    if (info) {
        info->elbow = curve;
        info->chosen_k = curve.chosen_k;
        info->projected_dim = x.cols();
    }

    std::vector<RankedSentence> ranked;
    ranked.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(model.assignments[i]);
        // a point that coincides with its centroid is at distance 0 under
        // every metric; this also covers points PCA collapsed onto the origin
        const double d = vec::squared_distance(x.row(i), model.centroids.row(c)) == 0.0
                             ? 0.0
                             : distance(x.row(i), model.centroids.row(c), params.metric);
        ranked.push_back({static_cast<int>(i), d, static_cast<int>(c)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedSentence& a, const RankedSentence& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.index < b.index;
    });
    return ranked;
}

// Takes the top m of a ranking (m = k if given, else ceil(ratio*n), floor 1)
// and reorders the picks chronologically. Each selected sentence keeps its
// danda terminator in the joined text.
inline Summary select_and_order(const std::vector<RankedSentence>& ranked, const Document& doc,
                                std::optional<std::size_t> k = std::nullopt,
                                std::optional<double> ratio = std::nullopt) {
    if (k && ratio) throw ArgumentError("k and ratio are mutually exclusive");
    const std::size_t n = doc.sentences.size();
    if (n == 0) throw EmptyDocumentError("cannot summarize an empty document");

    std::size_t m;
    if (k) {
        if (*k < 1 || *k > n)
            throw ArgumentError("k = " + std::to_string(*k) + " out of range [1, " +
                                std::to_string(n) + "]");
        m = *k;
    } else {
        const double r = ratio.value_or(0.2);
        if (!(r > 0.0) || r > 1.0) throw ArgumentError("ratio must be in (0, 1]");
        // the epsilon keeps e.g. 0.2 * 15 from rounding up to 4
        m = static_cast<std::size_t>(std::ceil(r * static_cast<double>(n) - 1e-9));
        m = std::max<std::size_t>(m, 1);
    }
    m = std::min(m, ranked.size());

    Summary summary;
    summary.doc_id = doc.id;
    summary.selected.reserve(m);
    for (std::size_t i = 0; i < m; ++i) summary.selected.push_back(ranked[i].index);
    std::sort(summary.selected.begin(), summary.selected.end());

    for (std::size_t i = 0; i < summary.selected.size(); ++i) {
        if (i) summary.text += ' ';
        summary.text += doc.sentences[static_cast<std::size_t>(summary.selected[i])].text;
        summary.text += "।";
    }
    return summary;
}

}  // namespace sansum
