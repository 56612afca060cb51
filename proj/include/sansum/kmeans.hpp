#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "sansum/errors.hpp"
#include "sansum/matrix.hpp"
#include "sansum/rng.hpp"

namespace sansum {

enum class DistanceMetric { cosine, euclidean, manhattan };

inline const char* to_string(DistanceMetric m) {
    switch (m) {
        case DistanceMetric::cosine: return "cosine";
        case DistanceMetric::euclidean: return "euclidean";
        case DistanceMetric::manhattan: return "manhattan";
    }
    return "?";
}

inline DistanceMetric metric_from_string(const std::string& name) {
    if (name == "cosine") return DistanceMetric::cosine;
    if (name == "euclidean") return DistanceMetric::euclidean;
    if (name == "manhattan") return DistanceMetric::manhattan;
    throw ArgumentError("unknown distance metric '" + name + "'");
}

inline double distance(std::span<const double> u, std::span<const double> v, DistanceMetric metric) {
    if (u.size() != v.size())
        throw DimensionError("distance: dimensions differ (" + std::to_string(u.size()) + " vs " +
                             std::to_string(v.size()) + ")");
    switch (metric) {
        case DistanceMetric::cosine: {
            const double nu = vec::norm2(u);
            const double nv = vec::norm2(v);
            if (nu == 0.0 || nv == 0.0)
                throw DegenerateVectorError("cosine distance undefined for a zero vector");
            return 1.0 - vec::dot(u, v) / (nu * nv);
        }
        case DistanceMetric::euclidean:
            return std::sqrt(vec::squared_distance(u, v));
        case DistanceMetric::manhattan: {
            double s = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) s += std::abs(u[i] - v[i]);
            return s;
        }
    }
    throw ArgumentError("unhandled metric");
}

struct ClusterModel {
    std::size_t k = 0;
    Matrix centroids;             // k x q
    std::vector<int> assignments; // n entries in [0,k)
    double wcss = 0.0;            // sum of squared point-to-centroid distances
};

struct ElbowCurve {
    std::vector<std::size_t> ks;
    std::vector<double> wcss_values;
    std::size_t chosen_k = 1;
};

namespace detail {

inline double model_wcss(const Matrix& x, const Matrix& centroids,
                         const std::vector<int>& assignments) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        s += vec::squared_distance(x.row(i), centroids.row(static_cast<std::size_t>(assignments[i])));
    return s;
}

// Greedy k-means++ seeding: candidate centroids are data points drawn with
// probability proportional to their squared distance from the chosen set;
// of several weighted draws per step the one minimizing the resulting
// potential is kept.
inline Matrix kmeanspp_init(const Matrix& x, std::size_t k, SplitMix64& rng) {
    const std::size_t n = x.rows();
    Matrix centroids(k, x.cols());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    std::size_t first = static_cast<std::size_t>(rng.next_below(n));
    for (std::size_t j = 0; j < x.cols(); ++j) centroids(0, j) = x(first, j);

    const std::size_t local_trials =
        2 + static_cast<std::size_t>(std::log2(static_cast<double>(k) + 1.0));

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], vec::squared_distance(x.row(i), centroids.row(c - 1)));
            total += d2[i];
        }

        std::size_t pick = 0;
        double pick_potential = std::numeric_limits<double>::infinity();
        for (std::size_t trial = 0; trial < local_trials; ++trial) {
            std::size_t candidate;
            if (total <= 0.0) {
                candidate = static_cast<std::size_t>(rng.next_below(n));  // points coincide
            } else {
                double r = rng.next_double() * total;
                candidate = n - 1;
                for (std::size_t i = 0; i < n; ++i) {
                    r -= d2[i];
                    if (r < 0.0) {
                        candidate = i;
                        break;
                    }
                }
            }
            double potential = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                potential += std::min(d2[i], vec::squared_distance(x.row(i), x.row(candidate)));
            if (potential < pick_potential) {
                pick_potential = potential;
                pick = candidate;
            }
        }
        for (std::size_t j = 0; j < x.cols(); ++j) centroids(c, j) = x(pick, j);
    }
    return centroids;
}

// Lloyd iterations from the given initial centroids. Converges when an
// iteration leaves assignments unchanged, or after 300 iterations. An empty
// cluster is repaired by moving in the point farthest from its centroid.
// If `wcss_trace` is given, the objective is appended after every iteration.
inline ClusterModel lloyd(const Matrix& x, Matrix centroids,
                          std::vector<double>* wcss_trace = nullptr) {
    const std::size_t n = x.rows();
    const std::size_t k = centroids.rows();
    const std::size_t q = x.cols();
    std::vector<int> assignments(n, -1);
    constexpr int kMaxIterations = 300;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        bool changed = false;
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = vec::squared_distance(x.row(i), centroids.row(0));
            for (std::size_t c = 1; c < k; ++c) {
                const double d = vec::squared_distance(x.row(i), centroids.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            if (assignments[i] != best) {
                assignments[i] = best;
                changed = true;
            }
            ++sizes[static_cast<std::size_t>(best)];
        }

        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            // farthest point whose cluster can spare it
            double worst_d = -1.0;
            std::size_t worst_i = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto a = static_cast<std::size_t>(assignments[i]);
                if (sizes[a] < 2) continue;
                const double d = vec::squared_distance(x.row(i), centroids.row(a));
                if (d > worst_d) {
                    worst_d = d;
                    worst_i = i;
                }
            }
            --sizes[static_cast<std::size_t>(assignments[worst_i])];
            assignments[worst_i] = static_cast<int>(c);
            ++sizes[c];
            for (std::size_t j = 0; j < q; ++j) centroids(c, j) = x(worst_i, j);
            changed = true;
        }

        Matrix sums(k, q);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assignments[i]);
            for (std::size_t j = 0; j < q; ++j) sums(c, j) += x(i, j);
        }
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t j = 0; j < q; ++j)
                centroids(c, j) = sums(c, j) / static_cast<double>(sizes[c]);

        if (wcss_trace) wcss_trace->push_back(model_wcss(x, centroids, assignments));
        if (!changed) break;
    }

    ClusterModel model;
    model.k = k;
    model.centroids = std::move(centroids);
    model.assignments = std::move(assignments);
    model.wcss = model_wcss(x, model.centroids, model.assignments);
    return model;
}

// Local-search refinement after Lloyd converges. Two kinds of strictly
// improving moves, applied until neither exists:
//   - Hartigan single-point moves: relocate a point when the size-weighted
//     objective delta is negative (catches boundary points Lloyd keeps).
//   - pairwise swaps: exchange two points between clusters when the exact
//     objective delta (with re-optimized centroids) is negative; these
//     escape two-point basins no sequence of single moves can leave.
// Every accepted move lowers the WCSS, so the loop terminates.
inline void local_search_refine(const Matrix& x, ClusterModel& model) {
    const std::size_t n = x.rows();
    const std::size_t k = model.k;
    const std::size_t q = x.cols();
    if (k < 2 || k >= n) return;
    // pair scanning is quadratic; past this size the restarts carry quality
    const bool try_swaps = n <= 1024;

    std::vector<double> sizes(k, 0.0);
    for (int a : model.assignments) sizes[static_cast<std::size_t>(a)] += 1.0;
    Matrix& c = model.centroids;

    std::vector<double> point_norm2(n);
    for (std::size_t i = 0; i < n; ++i) point_norm2[i] = vec::dot(x.row(i), x.row(i));

    bool changed = true;
    for (int guard = 0; changed && guard < 200; ++guard) {
        changed = false;

        for (std::size_t i = 0; i < n; ++i) {
            const auto a = static_cast<std::size_t>(model.assignments[i]);
            if (sizes[a] <= 1.0) continue;  // never empty a cluster
            const double da2 = vec::squared_distance(x.row(i), c.row(a));
            const double removal_gain = sizes[a] / (sizes[a] - 1.0) * da2;
            std::size_t best_b = a;
            double best_delta = -1e-9;  // strict improvement only
            for (std::size_t b = 0; b < k; ++b) {
                if (b == a) continue;
                const double insertion_cost =
                    sizes[b] / (sizes[b] + 1.0) * vec::squared_distance(x.row(i), c.row(b));
                const double delta = insertion_cost - removal_gain;
                if (delta < best_delta) {
                    best_delta = delta;
                    best_b = b;
                }
            }
            if (best_b == a) continue;
            for (std::size_t j = 0; j < q; ++j) {
                c(a, j) = (c(a, j) * sizes[a] - x(i, j)) / (sizes[a] - 1.0);
                c(best_b, j) = (c(best_b, j) * sizes[best_b] + x(i, j)) / (sizes[best_b] + 1.0);
            }
            sizes[a] -= 1.0;
            sizes[best_b] += 1.0;
            model.assignments[i] = static_cast<int>(best_b);
            changed = true;
        }
        if (changed || !try_swaps) continue;

        // single moves exhausted; look for one improving swap, then rescan
        for (std::size_t i = 0; i < n && !changed; ++i) {
            const auto a = static_cast<std::size_t>(model.assignments[i]);
            for (std::size_t j2 = i + 1; j2 < n && !changed; ++j2) {
                const auto b = static_cast<std::size_t>(model.assignments[j2]);
                if (a == b) continue;
                // exchanging i and j2 keeps sizes; shifted centroids are
                // c_a + (x_j2 - x_i)/m_a and c_b + (x_i - x_j2)/m_b, and
                // with S = sum of squared norms per cluster,
                // WCSS = S - m * |centroid|^2 gives the exact delta
                double ca_new2 = 0.0, cb_new2 = 0.0, ca2 = 0.0, cb2 = 0.0;
                for (std::size_t d = 0; d < q; ++d) {
                    const double diff = x(j2, d) - x(i, d);
                    const double can = c(a, d) + diff / sizes[a];
                    const double cbn = c(b, d) - diff / sizes[b];
                    ca_new2 += can * can;
                    cb_new2 += cbn * cbn;
                    ca2 += c(a, d) * c(a, d);
                    cb2 += c(b, d) * c(b, d);
                }
                const double delta = (point_norm2[j2] - point_norm2[i]) -
                                     sizes[a] * (ca_new2 - ca2) +
                                     (point_norm2[i] - point_norm2[j2]) -
                                     sizes[b] * (cb_new2 - cb2);
                if (delta >= -1e-9) continue;
                for (std::size_t d = 0; d < q; ++d) {
                    const double diff = x(j2, d) - x(i, d);
                    c(a, d) += diff / sizes[a];
                    c(b, d) -= diff / sizes[b];
                }
                model.assignments[i] = static_cast<int>(b);
                model.assignments[j2] = static_cast<int>(a);
                changed = true;
            }
        }
    }

    // wash out incremental-update drift
    Matrix sums(k, q);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = static_cast<std::size_t>(model.assignments[i]);
        ++counts[a];
        for (std::size_t j = 0; j < q; ++j) sums(a, j) += x(i, j);
    }
    for (std::size_t b = 0; b < k; ++b)
        for (std::size_t j = 0; j < q; ++j) c(b, j) = sums(b, j) / static_cast<double>(counts[b]);
    model.wcss = model_wcss(x, c, model.assignments);
}

inline ClusterModel lloyd_refined(const Matrix& x, Matrix init,
                                  std::vector<double>* wcss_trace = nullptr) {
    ClusterModel model = lloyd(x, std::move(init), wcss_trace);
    local_search_refine(x, model);
    if (wcss_trace) wcss_trace->push_back(model.wcss);
    return model;
}

}  // namespace detail

// Best of `restarts` k-means++ runs, seeded seed, seed+1, ... seed+R-1.
// When the input is small enough that every k-subset of points can serve as
// an initialization (at most 128 of them), those deterministic starts are
// tried as well; random seeding alone can leave all restarts in one basin
// on tiny instances.
inline ClusterModel kmeans(const Matrix& x, std::size_t k, std::uint64_t seed,
                           std::size_t restarts = 8) {
    const std::size_t n = x.rows();
    if (k < 1 || k > n)
        throw ArgumentError("k = " + std::to_string(k) + " out of range [1, " + std::to_string(n) + "]");
    ClusterModel best;
    bool have = false;
    const auto consider = [&](ClusterModel run) {
        if (!have || run.wcss < best.wcss) {
            best = std::move(run);
            have = true;
        }
    };
    for (std::size_t r = 0; r < restarts; ++r) {
        SplitMix64 rng(seed + r);
        consider(detail::lloyd_refined(x, detail::kmeanspp_init(x, k, rng)));
    }

    double subsets = 1.0;
    for (std::size_t i = 0; i < k && subsets <= 128.0; ++i)
        subsets = subsets * static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (subsets <= 128.0) {
        std::vector<std::size_t> pick(k);
        for (std::size_t i = 0; i < k; ++i) pick[i] = i;
        while (true) {
            Matrix init(k, x.cols());
            for (std::size_t c = 0; c < k; ++c)
                for (std::size_t j = 0; j < x.cols(); ++j) init(c, j) = x(pick[c], j);
            consider(detail::lloyd_refined(x, std::move(init)));

            std::size_t i = k;
            while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
            if (i == 0) break;
            ++pick[i - 1];
            for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
        }
    }
    return best;
}

// Elbow point of a WCSS curve: the interior k whose point on the min-max
// normalized curve is farthest from the chord between the endpoints. Ties
// go to the smaller k; a curve with no interior points yields its first k.
inline std::size_t choose_elbow(const std::vector<std::size_t>& ks,
                                const std::vector<double>& wcss) {
    if (ks.size() != wcss.size() || ks.empty())
        throw ArgumentError("elbow curve: mismatched or empty inputs");
    if (ks.size() < 3) return ks.front();

    const double k0 = static_cast<double>(ks.front());
    const double k_span = static_cast<double>(ks.back()) - k0;
    const auto [w_min_it, w_max_it] = std::minmax_element(wcss.begin(), wcss.end());
    const double w_min = *w_min_it;
    const double w_span = *w_max_it - w_min;

    const auto norm_x = [&](std::size_t i) { return (static_cast<double>(ks[i]) - k0) / k_span; };
    const auto norm_y = [&](std::size_t i) {
        return w_span > 0.0 ? (wcss[i] - w_min) / w_span : 0.0;
    };

    const double x0 = norm_x(0), y0 = norm_y(0);
    const double dx = norm_x(ks.size() - 1) - x0;
    const double dy = norm_y(ks.size() - 1) - y0;
    const double chord_len = std::sqrt(dx * dx + dy * dy);

    std::size_t best_i = 1;
    double best_dist = -1.0;
    for (std::size_t i = 1; i + 1 < ks.size(); ++i) {
        const double cross = dx * (norm_y(i) - y0) - dy * (norm_x(i) - x0);
        const double dist = std::abs(cross) / chord_len;
        if (dist > best_dist) {
            best_dist = dist;
            best_i = i;
        }
    }
    return ks[best_i];
}

// Runs kmeans for k = 1..min(k_max, n) and picks the elbow. Each k >= 2 also
// tries one restart initialized from the previous solution's centroids plus
// the point farthest from its centroid, which keeps the curve non-increasing.
inline ElbowCurve elbow_select(const Matrix& x, std::size_t k_max, std::uint64_t seed) {
    const std::size_t n = x.rows();
    if (n < 2) throw InsufficientDataError("elbow_select needs at least 2 points");
    if (k_max < 2) throw ArgumentError("k_max must be >= 2");

    ElbowCurve curve;
    const std::size_t k_last = std::min(k_max, n);
    ClusterModel prev;
    for (std::size_t k = 1; k <= k_last; ++k) {
        ClusterModel best = kmeans(x, k, seed);
        if (k >= 2) {
            Matrix init(k, x.cols());
            for (std::size_t c = 0; c + 1 < k; ++c)
                for (std::size_t j = 0; j < x.cols(); ++j) init(c, j) = prev.centroids(c, j);
            double worst_d = -1.0;
            std::size_t worst_i = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto a = static_cast<std::size_t>(prev.assignments[i]);
                const double d = vec::squared_distance(x.row(i), prev.centroids.row(a));
                if (d > worst_d) {
                    worst_d = d;
                    worst_i = i;
                }
            }
            for (std::size_t j = 0; j < x.cols(); ++j) init(k - 1, j) = x(worst_i, j);
            ClusterModel split = detail::lloyd_refined(x, std::move(init));
            if (split.wcss < best.wcss) best = std::move(split);
        }
        curve.ks.push_back(k);
        curve.wcss_values.push_back(best.wcss);
        prev = std::move(best);
    }
    curve.chosen_k = choose_elbow(curve.ks, curve.wcss_values);
    return curve;
}

// `k,wcss,chosen` rows for plotting.
inline std::string elbow_csv(const ElbowCurve& curve) {
    std::string out = "k,wcss,chosen\n";
    char buf[40];
    for (std::size_t i = 0; i < curve.ks.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%d\n", curve.ks[i], curve.wcss_values[i],
                      curve.ks[i] == curve.chosen_k ? 1 : 0);
        out += buf;
    }
    return out;
}

}  // namespace sansum
