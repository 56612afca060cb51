#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "sansum/errors.hpp"
#include "sansum/matrix.hpp"
#include "sansum/rng.hpp"
#include "sansum/text_prep.hpp"

namespace sansum {

// What to do when a file-backed provider has no vector for a token.
enum class MissingTokenPolicy { error, zero, fallback };

// Model-free stand-in for a trained encoder: the vector is a pure function
// of the token's bytes. Integer arithmetic with one float conversion per
// entry, so results are bit-identical across platforms.
inline std::vector<double> deterministic_token_vector(std::string_view token, std::size_t dim) {
    SplitMix64 rng(fnv1a64(token));
    std::vector<double> v(dim);
    for (double& x : v) x = rng.next_signed_unit();
    double norm = vec::norm2(v);
    if (norm == 0.0) {
        v[0] = 1.0;
        norm = 1.0;
    }
    for (double& x : v) x /= norm;
    return v;
}

// Supplies per-token embedding vectors. Two kinds: `deterministic` derives
// vectors from token bytes; `file` serves a TSV lookup table with contextual
// keys (`doc_id:sentence:token`) taking precedence over static token keys.
// Read-only after construction.
class EmbeddingProvider {
public:
    static EmbeddingProvider deterministic(std::size_t dim = 768) {
        if (dim == 0) throw ArgumentError("embedding dimension must be >= 1");
        EmbeddingProvider p;
        p.dim_ = dim;
        return p;
    }

    // TSV format:
    //   dim<TAB><d>
    //   <key><TAB><v1> <v2> ... <vd>
    // Duplicate keys: last wins.
    static EmbeddingProvider from_file(const std::filesystem::path& path,
                                       MissingTokenPolicy policy = MissingTokenPolicy::fallback) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open embedding file: " + path.string());

        EmbeddingProvider p;
        p.file_backed_ = true;
        p.policy_ = policy;

        std::string line;
        std::size_t line_no = 0;
        const auto malformed = [&](const std::string& why) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) + ": " + why);
        };

        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto tab = line.find('\t');
            if (tab == std::string::npos) malformed("expected <key><TAB><values>");
            const std::string key = line.substr(0, tab);
            const std::string rest = line.substr(tab + 1);

            if (line_no == 1) {
                if (key != "dim") malformed("first line must be the dim header");
                std::size_t d = 0;
                const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), d);
                if (ec != std::errc{} || ptr != rest.data() + rest.size() || d == 0)
                    malformed("bad dimension '" + rest + "'");
                p.dim_ = d;
                continue;
            }

            std::vector<double> values;
            values.reserve(p.dim_);
            for (const std::string& field : split_tokens(rest)) {
                double x = 0.0;
                const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
                if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(x))
                    malformed("bad value '" + field + "'");
                values.push_back(x);
            }
            if (values.size() != p.dim_)
                malformed("expected " + std::to_string(p.dim_) + " values, got " +
                          std::to_string(values.size()));
            p.table_[key] = std::move(values);
        }
        if (line_no == 0) throw LoadError(path.string() + ": empty embedding file");
        return p;
    }

    std::size_t dim() const { return dim_; }
    bool file_backed() const { return file_backed_; }
    MissingTokenPolicy policy() const { return policy_; }

    // One vector per token of the sentence, each of dimension d. File
    // provider lookup order: contextual key, then static key, then the
    // missing-token policy.
    std::vector<std::vector<double>> token_embeddings(const std::string& doc_id,
                                                      const Sentence& sentence) const {
        if (sentence.tokens.empty())
            throw ArgumentError("sentence " + std::to_string(sentence.index) + " has no tokens");
        std::vector<std::vector<double>> out;
        out.reserve(sentence.tokens.size());
        for (std::size_t j = 0; j < sentence.tokens.size(); ++j) {
            const std::string& token = sentence.tokens[j];
            if (!file_backed_) {
                out.push_back(deterministic_token_vector(token, dim_));
                continue;
            }
            const std::string contextual_key = doc_id + ":" + std::to_string(sentence.index) +
                                               ":" + std::to_string(j);
            if (auto it = table_.find(contextual_key); it != table_.end()) {
                out.push_back(it->second);
            } else if (auto st = table_.find(token); st != table_.end()) {
                out.push_back(st->second);
            } else {
                switch (policy_) {
                    case MissingTokenPolicy::error:
                        throw LookupError("no embedding for token '" + token + "' at " +
                                          contextual_key);
                    case MissingTokenPolicy::zero:
                        out.emplace_back(dim_, 0.0);
                        break;
                    case MissingTokenPolicy::fallback:
                        out.push_back(deterministic_token_vector(token, dim_));
                        break;
                }
            }
        }
        return out;
    }

private:
    std::size_t dim_ = 768;
    bool file_backed_ = false;
    MissingTokenPolicy policy_ = MissingTokenPolicy::fallback;
    std::unordered_map<std::string, std::vector<double>> table_;
};

// Component-wise arithmetic mean of the token vectors.
inline std::vector<double> sentence_embedding(const std::vector<std::vector<double>>& token_vectors) {
    if (token_vectors.empty()) throw ArgumentError("cannot average an empty vector list");
    const std::size_t d = token_vectors.front().size();
    std::vector<double> mean(d, 0.0);
    for (const auto& v : token_vectors) {
        if (v.size() != d)
            throw DimensionError("mixed vector dimensions: " + std::to_string(v.size()) +
                                 " vs " + std::to_string(d));
        for (std::size_t j = 0; j < d; ++j) mean[j] += v[j];
    }
    for (double& x : mean) x /= static_cast<double>(token_vectors.size());
    return mean;
}

// Row i is the embedding of sentence i.
inline Matrix embed_document(const EmbeddingProvider& provider, const Document& doc) {
    if (doc.sentences.empty()) throw EmptyDocumentError("document '" + doc.id + "' is empty");
    Matrix m(doc.sentences.size(), provider.dim());
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
        const auto mean = sentence_embedding(provider.token_embeddings(doc.id, doc.sentences[i]));
        for (std::size_t j = 0; j < mean.size(); ++j) m(i, j) = mean[j];
    }
    return m;
}

}  // namespace sansum
