// Command-line surface: clean, segment, summarize, eval, embed-inspect,
// corpus-stats. stdout carries the artifact, diagnostics go to stderr.
//
// Exit codes: 0 success, 2 I/O or decode failure, 3 empty or degenerate
// input, 64 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sansum/sansum.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw sansum::IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw sansum::IoError("error while reading " + path.string());
    return buf.str();
}

void write_output(const std::optional<std::string>& out_path, const std::string& content) {
    if (out_path) {
        std::ofstream out(*out_path, std::ios::binary);
        if (!out) throw sansum::IoError("cannot write " + *out_path);
        out << content;
        if (!out) throw sansum::IoError("error while writing " + *out_path);
    } else {
        std::cout << content;
    }
}

std::string doc_id_of(const fs::path& path) { return path.stem().string(); }

// Optional key=value run configuration. Keys mirror the long flag names
// (underscores and dashes interchangeable); '#' starts a comment. A value
// from the file applies only when the flag was not given on the command
// line.
class RunFileConfig {
public:
    RunFileConfig() = default;

    static RunFileConfig load(const std::string& path) {
        static const std::set<std::string> known = {
            "method", "k",    "ratio",      "pca", "pca-dim",
            "k-max",  "metric", "seed",     "dim", "embeddings",
            "missing-token-policy"};
        std::ifstream in(path, std::ios::binary);
        if (!in) throw sansum::IoError("cannot read config file " + path);
        RunFileConfig cfg;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t");
                const auto e = s.find_last_not_of(" \t");
                return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
            };
            if (trim(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw sansum::ArgumentError(path + ":" + std::to_string(line_no) +
                                            ": expected key=value");
            std::string key = trim(line.substr(0, eq));
            for (char& c : key)
                if (c == '_') c = '-';
            if (!known.count(key))
                throw sansum::ArgumentError(path + ":" + std::to_string(line_no) +
                                            ": unknown config key '" + key + "'");
            cfg.values_[key] = trim(line.substr(eq + 1));
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const std::string& get(const std::string& key) const { return values_.at(key); }

    template <typename T>
    T get_number(const std::string& key) const {
        const std::string& raw = get(key);
        T value{};
        const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
        if (ec != std::errc{} || ptr != raw.data() + raw.size())
            throw sansum::ArgumentError("config: bad value '" + raw + "' for " + key);
        return value;
    }

    bool get_bool(const std::string& key) const {
        const std::string& raw = get(key);
        if (raw == "true" || raw == "1" || raw == "on" || raw == "yes") return true;
        if (raw == "false" || raw == "0" || raw == "off" || raw == "no") return false;
        throw sansum::ArgumentError("config: bad boolean '" + raw + "' for " + key);
    }

    std::string get_choice(const std::string& key, const std::set<std::string>& choices) const {
        const std::string& raw = get(key);
        if (!choices.count(raw))
            throw sansum::ArgumentError("config: bad value '" + raw + "' for " + key);
        return raw;
    }

private:
    std::map<std::string, std::string> values_;
};

struct ProviderConfig {
    std::string embeddings_path;
    std::string missing_token_policy = "fallback";
    std::size_t dim = 768;

    sansum::MissingTokenPolicy policy() const {
        if (missing_token_policy == "error") return sansum::MissingTokenPolicy::error;
        if (missing_token_policy == "zero") return sansum::MissingTokenPolicy::zero;
        return sansum::MissingTokenPolicy::fallback;
    }

    sansum::EmbeddingProvider make() const {
        if (!embeddings_path.empty())
            return sansum::EmbeddingProvider::from_file(embeddings_path, policy());
        return sansum::EmbeddingProvider::deterministic(dim);
    }

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--embeddings", embeddings_path, "TSV embedding table (dim header, key<TAB>values rows)");
        cmd->add_option("--missing-token-policy", missing_token_policy,
                        "What a file-backed provider does for unknown tokens")
            ->check(CLI::IsMember({"error", "zero", "fallback"}))
            ->capture_default_str();
        cmd->add_option("--dim", dim, "Dimension of the deterministic provider")
            ->check(CLI::Range(std::size_t{1}, std::size_t{100000}))
            ->capture_default_str();
    }

    void apply_config(const CLI::App& cmd, const RunFileConfig& cfg) {
        if (cfg.has("embeddings") && cmd.count("--embeddings") == 0)
            embeddings_path = cfg.get("embeddings");
        if (cfg.has("missing-token-policy") && cmd.count("--missing-token-policy") == 0)
            missing_token_policy =
                cfg.get_choice("missing-token-policy", {"error", "zero", "fallback"});
        if (cfg.has("dim") && cmd.count("--dim") == 0) {
            dim = cfg.get_number<std::size_t>("dim");
            if (dim == 0) throw sansum::ArgumentError("config: dim must be >= 1");
        }
    }
};

// Documents of a file or of every file in a directory, filename-sorted.
// Files that clean down to nothing are skipped with a warning.
std::vector<sansum::Document> load_documents(const fs::path& input) {
    std::vector<fs::path> paths;
    if (fs::is_directory(input)) {
        for (const auto& entry : fs::directory_iterator(input))
            if (entry.is_regular_file()) paths.push_back(entry.path());
        std::sort(paths.begin(), paths.end());
    } else {
        paths.push_back(input);
    }

    std::vector<sansum::Document> docs;
    for (const auto& path : paths) {
        const std::string text = read_file(path);
        try {
            docs.push_back(sansum::segment(text, doc_id_of(path)));
        } catch (const sansum::EmptyDocumentError&) {
            if (paths.size() == 1) throw;
            std::cerr << "warning: " << path.string() << " has no sentences, skipping\n";
        }
    }
    if (docs.empty()) throw sansum::EmptyDocumentError("no sentences in " + input.string());
    return docs;
}

struct SentenceOrigin {
    std::string doc;
    int sentence;
};

sansum::Document concatenate(const std::vector<sansum::Document>& docs, const std::string& id,
                             std::vector<SentenceOrigin>& origins) {
    sansum::Document combined;
    combined.id = id;
    for (const auto& doc : docs)
        for (const auto& s : doc.sentences) {
            sansum::Sentence copy = s;
            copy.index = static_cast<int>(combined.sentences.size());
            origins.push_back({doc.id, s.index});
            combined.sentences.push_back(std::move(copy));
        }
    return combined;
}

// ---- subcommands -----------------------------------------------------------

struct CleanCmd {
    std::string input;
    std::optional<std::string> out;

    int run() const {
        write_output(out, sansum::clean(read_file(input)));
        return 0;
    }
};

struct SegmentCmd {
    std::string input;
    std::optional<std::string> out;

    int run() const {
        const auto doc = sansum::segment(read_file(input), doc_id_of(input));
        write_output(out, sansum::to_json(doc).dump(2) + "\n");
        return 0;
    }
};

struct SummarizeCmd {
    std::string input;
    std::string method = "tfidf";
    std::optional<std::size_t> k;
    std::optional<double> ratio;
    bool pca_enabled = true;
    std::optional<std::size_t> pca_dim;
    std::size_t k_max = 10;
    std::string metric = "cosine";
    std::uint64_t seed = 42;
    ProviderConfig provider;
    std::optional<std::string> out;

    void apply_config(const CLI::App& cmd, const RunFileConfig& cfg) {
        if (cfg.has("method") && cmd.count("--method") == 0)
            method = cfg.get_choice("method", {"tfidf", "neural"});
        // k and ratio are one logical setting; the file fills it only when
        // neither flag was given
        if (cmd.count("--k") == 0 && cmd.count("--ratio") == 0) {
            if (cfg.has("k") && cfg.has("ratio"))
                throw sansum::ArgumentError("config: k and ratio are mutually exclusive");
            if (cfg.has("k")) k = cfg.get_number<std::size_t>("k");
            if (cfg.has("ratio")) ratio = cfg.get_number<double>("ratio");
        }
        if (cfg.has("pca") && cmd.count("--pca") == 0 && cmd.count("--no-pca") == 0)
            pca_enabled = cfg.get_bool("pca");
        if (cfg.has("pca-dim") && cmd.count("--pca-dim") == 0)
            pca_dim = cfg.get_number<std::size_t>("pca-dim");
        if (cfg.has("k-max") && cmd.count("--k-max") == 0) {
            k_max = cfg.get_number<std::size_t>("k-max");
            if (k_max < 2) throw sansum::ArgumentError("config: k-max must be >= 2");
        }
        if (cfg.has("metric") && cmd.count("--metric") == 0)
            metric = cfg.get_choice("metric", {"cosine", "euclidean", "manhattan"});
        if (cfg.has("seed") && cmd.count("--seed") == 0)
            seed = cfg.get_number<std::uint64_t>("seed");
        provider.apply_config(cmd, cfg);
    }

    int run() const {
        const fs::path input_path(input);
        const auto docs = load_documents(input_path);
        std::vector<SentenceOrigin> origins;
        const sansum::Document doc = concatenate(docs, doc_id_of(input_path), origins);

        std::vector<sansum::RankedSentence> ranked;
        sansum::NeuralRankInfo info;
        if (method == "neural") {
            sansum::NeuralRankParams params;
            params.pca_enabled = pca_enabled;
            params.pca_dim = pca_dim;
            params.k_max = k_max;
            params.metric = sansum::metric_from_string(metric);
            params.seed = seed;
            ranked = sansum::neural_rank(doc, provider.make(), params, &info);
        } else {
            ranked = sansum::tfidf_score(doc);
        }
        const sansum::Summary summary = sansum::select_and_order(ranked, doc, k, ratio);

        json params{{"k", k ? json(*k) : json(nullptr)},
                    {"ratio", k ? json(nullptr) : json(ratio.value_or(0.2))},
                    {"seed", seed}};
        if (method == "neural") {
            params["pca"] = pca_enabled;
            params["pca_dim"] = pca_dim ? json(*pca_dim) : json(nullptr);
            params["k_max"] = k_max;
            params["metric"] = metric;
            params["chosen_k"] = info.chosen_k;
            params["embeddings"] = provider.embeddings_path.empty()
                                       ? json(nullptr)
                                       : json(provider.embeddings_path);
            params["missing_token_policy"] = provider.missing_token_policy;
        }
        json output = sansum::to_json(summary, method, std::move(params));
        if (docs.size() > 1) {
            json provenance = json::array();
            for (int idx : summary.selected) {
                const auto& origin = origins[static_cast<std::size_t>(idx)];
                provenance.push_back({{"doc", origin.doc}, {"sentence", origin.sentence}});
            }
            output["provenance"] = std::move(provenance);
        }
        write_output(out, output.dump(2) + "\n");
        return 0;
    }
};

struct EvalCmd {
    std::string candidate;
    std::string reference;
    ProviderConfig provider;
    std::optional<std::string> csv;
    std::optional<std::string> out;

    void apply_config(const CLI::App& cmd, const RunFileConfig& cfg) {
        provider.apply_config(cmd, cfg);
    }

    int run() const {
        const auto ref_doc = sansum::segment(read_file(reference), doc_id_of(reference));
        const auto cand_doc = sansum::segment(read_file(candidate), doc_id_of(candidate));

        std::optional<sansum::EmbeddingProvider> prov;
        if (!provider.embeddings_path.empty()) prov = provider.make();
        const sansum::ScoreReport report =
            sansum::evaluate(cand_doc, ref_doc, prov ? &*prov : nullptr);

        write_output(out, sansum::to_json(report).dump(2) + "\n");
        if (csv) {
            const bool fresh = !fs::exists(*csv) || fs::file_size(*csv) == 0;
            std::ofstream csv_out(*csv, std::ios::binary | std::ios::app);
            if (!csv_out) throw sansum::IoError("cannot write " + *csv);
            if (fresh) csv_out << sansum::score_report_csv_header() << "\n";
            csv_out << sansum::score_report_csv_row(cand_doc.id, report) << "\n";
        }
        return 0;
    }
};

struct EmbedInspectCmd {
    std::string input;
    std::string token;
    ProviderConfig provider_cfg;
    std::optional<std::string> out;

    void apply_config(const CLI::App& cmd, const RunFileConfig& cfg) {
        provider_cfg.apply_config(cmd, cfg);
    }

    int run() const {
        const auto docs = load_documents(input);
        const auto provider = provider_cfg.make();

        struct Occurrence {
            std::string doc;
            int sentence;
            int token_index;
        };
        std::vector<Occurrence> occurrences;
        std::vector<std::vector<double>> vectors;
        for (const auto& doc : docs)
            for (const auto& s : doc.sentences) {
                std::vector<std::vector<double>> sentence_vectors;
                for (std::size_t j = 0; j < s.tokens.size(); ++j) {
                    if (s.tokens[j] != token) continue;
                    if (sentence_vectors.empty())
                        sentence_vectors = provider.token_embeddings(doc.id, s);
                    occurrences.push_back({doc.id, s.index, static_cast<int>(j)});
                    vectors.push_back(sentence_vectors[j]);
                }
            }
        if (occurrences.empty())
            throw sansum::EmptyDocumentError("token '" + token + "' does not occur in the input");

        // project the occurrence vectors to at most 3 dimensions
        const std::size_t n = vectors.size();
        sansum::Matrix coords(n, 3);
        if (n >= 2) {
            const sansum::Matrix m = sansum::Matrix::from_rows(vectors);
            const std::size_t q = std::min<std::size_t>({3, n - 1, m.cols()});
            const sansum::Matrix projected = sansum::pca_transform(sansum::pca_fit(m, q), m);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < q; ++j) coords(i, j) = projected(i, j);
        }
        // n == 1: the single mean-centered point sits at the origin

        std::string csv = "doc,sentence,token_index,x,y,z\n";
        char buf[140];
        for (std::size_t i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, ",%d,%d,%.10g,%.10g,%.10g\n", occurrences[i].sentence,
                          occurrences[i].token_index, coords(i, 0), coords(i, 1), coords(i, 2));
            csv += occurrences[i].doc;
            csv += buf;
        }
        write_output(out, csv);
        return 0;
    }
};

struct CorpusStatsCmd {
    std::string input_dir;

    int run() const {
        const fs::path dir(input_dir);
        if (!fs::is_directory(dir)) throw sansum::IoError(input_dir + " is not a directory");
        std::vector<fs::path> paths;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file()) paths.push_back(entry.path());
        std::sort(paths.begin(), paths.end());

        std::size_t documents = 0, sentences = 0, tokens = 0;
        std::set<std::string> unique_tokens;
        for (const auto& path : paths) {
            const std::string text = read_file(path);
            if (!sansum::utf8::is_valid(text)) {
                std::cerr << "warning: " << path.string() << " is not valid UTF-8, skipping\n";
                continue;
            }
            ++documents;
            try {
                const auto doc = sansum::segment(text, doc_id_of(path));
                sentences += doc.sentences.size();
                for (const auto& s : doc.sentences) {
                    tokens += s.tokens.size();
                    unique_tokens.insert(s.tokens.begin(), s.tokens.end());
                }
            } catch (const sansum::EmptyDocumentError&) {
                // counts as a document with zero sentences
            }
        }
        if (documents == 0)
            throw sansum::EmptyDocumentError("no readable documents in " + input_dir);

        std::cout << "documents: " << documents << ", sentences: " << sentences
                  << ", tokens: " << tokens << ", unique_tokens: " << unique_tokens.size() << "\n";
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extractive summarization toolkit for Devanagari Sanskrit text"};
    app.require_subcommand(1);

    int rc = 0;
    std::string config_path;  // shared spelling for every subcommand

    const auto add_config_flag = [&config_path](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value run configuration file");
    };
    const auto load_config = [&config_path]() {
        return config_path.empty() ? RunFileConfig{} : RunFileConfig::load(config_path);
    };

    CleanCmd clean_cmd;
    auto* clean = app.add_subcommand("clean", "Reduce a raw text file to Devanagari-only content");
    clean->add_option("input", clean_cmd.input, "Input text file")->required();
    clean->add_option("--out", clean_cmd.out, "Write here instead of stdout");
    add_config_flag(clean);
    clean->callback([&] {
        load_config();  // validates the file even though clean has no tunables
        rc = clean_cmd.run();
    });

    SegmentCmd segment_cmd;
    auto* segment = app.add_subcommand("segment", "Clean and split a document into sentences (JSON)");
    segment->add_option("input", segment_cmd.input, "Input text file")->required();
    segment->add_option("--out", segment_cmd.out, "Write here instead of stdout");
    add_config_flag(segment);
    segment->callback([&] {
        load_config();
        rc = segment_cmd.run();
    });

    SummarizeCmd summarize_cmd;
    auto* summarize =
        app.add_subcommand("summarize", "Produce an extractive summary of a file or directory");
    summarize->add_option("input", summarize_cmd.input, "Input text file or directory")->required();
    summarize->add_option("--method", summarize_cmd.method, "Ranking pipeline")
        ->check(CLI::IsMember({"tfidf", "neural"}))
        ->capture_default_str();
    auto* k_opt = summarize->add_option("--k", summarize_cmd.k, "Number of sentences to keep");
    auto* ratio_opt =
        summarize->add_option("--ratio", summarize_cmd.ratio, "Fraction of sentences to keep (default 0.2)");
    k_opt->excludes(ratio_opt);
    ratio_opt->excludes(k_opt);
    summarize->add_flag("--pca,!--no-pca", summarize_cmd.pca_enabled,
                        "Reduce embedding dimensions before clustering (default on)");
    summarize->add_option("--pca-dim", summarize_cmd.pca_dim, "Target PCA dimension");
    summarize->add_option("--k-max", summarize_cmd.k_max, "Largest cluster count tried by the elbow")
        ->check(CLI::Range(std::size_t{2}, std::size_t{10000}))
        ->capture_default_str();
    summarize->add_option("--metric", summarize_cmd.metric, "Ranking distance to cluster centroid")
        ->check(CLI::IsMember({"cosine", "euclidean", "manhattan"}))
        ->capture_default_str();
    summarize->add_option("--seed", summarize_cmd.seed, "Seed for clustering restarts")
        ->capture_default_str();
    summarize_cmd.provider.add_flags(summarize);
    summarize->add_option("--out", summarize_cmd.out, "Write here instead of stdout");
    add_config_flag(summarize);
    summarize->callback([&] {
        summarize_cmd.apply_config(*summarize, load_config());
        rc = summarize_cmd.run();
    });

    EvalCmd eval_cmd;
    auto* eval = app.add_subcommand("eval", "Score a candidate summary against a reference");
    eval->add_option("candidate", eval_cmd.candidate, "Candidate summary file")->required();
    eval->add_option("reference", eval_cmd.reference, "Reference summary file")->required();
    eval_cmd.provider.add_flags(eval);
    eval->add_option("--csv", eval_cmd.csv, "Append one aggregation row to this CSV file");
    eval->add_option("--out", eval_cmd.out, "Write here instead of stdout");
    add_config_flag(eval);
    eval->callback([&] {
        eval_cmd.apply_config(*eval, load_config());
        rc = eval_cmd.run();
    });

    EmbedInspectCmd inspect_cmd;
    auto* inspect = app.add_subcommand(
        "embed-inspect", "Project every occurrence of a token to 3-D coordinates (CSV)");
    inspect->add_option("input", inspect_cmd.input, "Input text file or directory")->required();
    inspect->add_option("--token", inspect_cmd.token, "Token to inspect")->required();
    inspect_cmd.provider_cfg.add_flags(inspect);
    inspect->add_option("--out", inspect_cmd.out, "Write here instead of stdout");
    add_config_flag(inspect);
    inspect->callback([&] {
        inspect_cmd.apply_config(*inspect, load_config());
        rc = inspect_cmd.run();
    });

    CorpusStatsCmd stats_cmd;
    auto* stats = app.add_subcommand("corpus-stats", "Count documents, sentences and tokens");
    stats->add_option("input_dir", stats_cmd.input_dir, "Directory of text files")->required();
    add_config_flag(stats);
    stats->callback([&] {
        load_config();
        rc = stats_cmd.run();
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64;
    } catch (const sansum::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sansum::DecodeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sansum::LoadError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sansum::EmptyDocumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const sansum::DegenerateVectorError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const sansum::LookupError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const sansum::InsufficientDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const sansum::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
