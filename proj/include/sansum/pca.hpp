#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "sansum/errors.hpp"
#include "sansum/matrix.hpp"

namespace sansum {

struct PCAModel {
    std::vector<double> mean;                // d
    Matrix components;                       // q x d, rows orthonormal
    std::vector<double> explained_variance;  // q, non-increasing

    std::size_t input_dim() const { return mean.size(); }
    std::size_t output_dim() const { return components.rows(); }
};

namespace detail {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenpairs come
// back sorted by eigenvalue descending; eigenvector k is column k of V.
// Fixed sweep order, scalar arithmetic: results are reproducible.
inline void jacobi_eigen(Matrix a, std::vector<double>& eigenvalues, Matrix& v) {
    const std::size_t m = a.rows();
    v = Matrix(m, m);
    for (std::size_t i = 0; i < m; ++i) v(i, i) = 1.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) scale = std::max(scale, std::abs(a(i, j)));

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps && scale > 0.0; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) off += a(i, j) * a(i, j);
        if (std::sqrt(off) <= 1e-15 * scale * static_cast<double>(m)) break;

        for (std::size_t p = 0; p + 1 < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = aip - s * (aiq + tau * aip);
                    a(p, i) = a(i, p);
                    a(i, q) = aiq + s * (aip - tau * aiq);
                    a(q, i) = a(i, q);
                }
                for (std::size_t i = 0; i < m; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = vip - s * (viq + tau * vip);
                    v(i, q) = viq + s * (vip - tau * viq);
                }
            }
        }
    }

    eigenvalues.resize(m);
    for (std::size_t i = 0; i < m; ++i) eigenvalues[i] = a(i, i);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        return eigenvalues[l] > eigenvalues[r];
    });
    std::vector<double> sorted_vals(m);
    Matrix sorted_v(m, m);
    for (std::size_t k = 0; k < m; ++k) {
        sorted_vals[k] = eigenvalues[order[k]];
        for (std::size_t i = 0; i < m; ++i) sorted_v(i, k) = v(i, order[k]);
    }
    eigenvalues = std::move(sorted_vals);
    v = std::move(sorted_v);
}

// Removes from `w` its projection onto each accepted component row.
inline void orthogonalize_against(const std::vector<std::vector<double>>& basis,
                                  std::vector<double>& w) {
    for (const auto& b : basis) {
        const double proj = vec::dot(b, w);
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= proj * b[j];
    }
}

// Largest-|entry| coordinate made non-negative (first index wins ties).
inline void apply_sign_convention(Matrix& components) {
    for (std::size_t k = 0; k < components.rows(); ++k) {
        auto row = components.row(k);
        std::size_t arg = 0;
        for (std::size_t j = 1; j < row.size(); ++j)
            if (std::abs(row[j]) > std::abs(row[arg])) arg = j;
        if (row[arg] < 0.0)
            for (double& x : row) x = -x;
    }
}

}  // namespace detail

// Fits the top-q principal directions of X (rows = observations). The
// eigenproblem is solved on whichever of the covariance (d x d) or Gram
// (n x n) matrix is smaller; both give the same spectrum.
inline PCAModel pca_fit(const Matrix& x, std::size_t q) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n < 2) throw InsufficientDataError("pca_fit needs at least 2 rows, got " + std::to_string(n));
    const std::size_t q_max = std::min(n - 1, d);
    if (q < 1 || q > q_max)
        throw ArgumentError("pca dimension " + std::to_string(q) + " out of range [1, " +
                            std::to_string(q_max) + "]");

    PCAModel model;
    model.mean = x.col_means();
    Matrix xc(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) xc(i, j) = x(i, j) - model.mean[j];

    std::vector<double> eigenvalues;
    Matrix v;
    model.components = Matrix(q, d);

    if (d <= n) {
        // covariance route: rows of V^T are already an orthonormal basis
        Matrix cov(d, d);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = a; b < d; ++b) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += xc(i, a) * xc(i, b);
                cov(a, b) = s / static_cast<double>(n - 1);
                cov(b, a) = cov(a, b);
            }
        detail::jacobi_eigen(std::move(cov), eigenvalues, v);
        for (std::size_t k = 0; k < q; ++k)
            for (std::size_t j = 0; j < d; ++j) model.components(k, j) = v(j, k);
    } else {
        // Gram route for d > n: eigenvectors of (Xc Xc^T)/(n-1) lift to
        // component directions via Xc^T. Near-zero eigenvalues give no
        // usable direction, so candidates fall back to residual data rows
        // and then to the standard basis, orthogonalized as we go.
        Matrix gram(n, n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) {
                gram(a, b) = vec::dot(xc.row(a), xc.row(b)) / static_cast<double>(n - 1);
                gram(b, a) = gram(a, b);
            }
        detail::jacobi_eigen(std::move(gram), eigenvalues, v);

        double xc_scale = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) xc_scale = std::max(xc_scale, std::abs(xc(i, j)));

        std::vector<std::vector<double>> accepted;
        accepted.reserve(q);
        const double floor = std::max(1e-10 * xc_scale, 1e-200);
        const auto try_accept = [&](std::vector<double> w) {
            if (accepted.size() >= q) return;
            detail::orthogonalize_against(accepted, w);
            const double norm = vec::norm2(w);
            if (norm <= floor) return;
            for (double& e : w) e /= norm;
            accepted.push_back(std::move(w));
        };

        for (std::size_t k = 0; k < n && accepted.size() < q; ++k) {
            std::vector<double> w(d, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double vik = v(i, k);
                for (std::size_t j = 0; j < d; ++j) w[j] += vik * xc(i, j);
            }
            try_accept(std::move(w));
        }
        for (std::size_t i = 0; i < n && accepted.size() < q; ++i) try_accept(xc.row_copy(i));
        for (std::size_t j = 0; j < d && accepted.size() < q; ++j) {
            std::vector<double> e(d, 0.0);
            e[j] = 1.0;
            try_accept(std::move(e));
        }

        for (std::size_t k = 0; k < q; ++k)
            for (std::size_t j = 0; j < d; ++j) model.components(k, j) = accepted[k][j];
    }

    detail::apply_sign_convention(model.components);
    model.explained_variance.resize(q);
    for (std::size_t k = 0; k < q; ++k) model.explained_variance[k] = std::max(eigenvalues[k], 0.0);
    return model;
}

// (X - mean) projected onto the component rows; output is n x q.
inline Matrix pca_transform(const PCAModel& model, const Matrix& x) {
    const std::size_t d = model.input_dim();
    const std::size_t q = model.output_dim();
    if (x.cols() != d)
        throw DimensionError("pca_transform: input has " + std::to_string(x.cols()) +
                             " columns, model expects " + std::to_string(d));
    Matrix y(x.rows(), q);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < q; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += (x(i, j) - model.mean[j]) * model.components(k, j);
            y(i, k) = s;
        }
    return y;
}

// TSV serialization, same scheme as embedding files: a dim header, then one
// keyed row each for the mean, the variances and every component.
inline void pca_save_tsv(const PCAModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write PCA model: " + path.string());
    const auto write_row = [&](const std::string& key, const std::vector<double>& values) {
        out << key << '\t';
        char buf[32];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", values[i]);
            if (i) out << ' ';
            out << buf;
        }
        out << '\n';
    };
    out << "dim\t" << model.input_dim() << '\n';
    write_row("mean", model.mean);
    write_row("var", model.explained_variance);
    for (std::size_t k = 0; k < model.output_dim(); ++k)
        write_row("pc" + std::to_string(k), model.components.row_copy(k));
}

inline PCAModel pca_load_tsv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open PCA model: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    PCAModel model;
    std::vector<std::vector<double>> pcs;
    const auto malformed = [&](const std::string& why) {
        throw LoadError(path.string() + ":" + std::to_string(line_no) + ": " + why);
    };
    const auto split_fields = [](const std::string& s) {
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (start < s.size()) {
            while (start < s.size() && s[start] == ' ') ++start;
            std::size_t end = start;
            while (end < s.size() && s[end] != ' ') ++end;
            if (end > start) fields.push_back(s.substr(start, end - start));
            start = end;
        }
        return fields;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tab = line.find('\t');
        if (tab == std::string::npos) malformed("expected <key><TAB><values>");
        const std::string key = line.substr(0, tab);
        std::vector<double> values;
        for (const std::string& field : split_fields(line.substr(tab + 1))) {
            try {
                values.push_back(std::stod(field));
            } catch (const std::exception&) {
                malformed("bad value '" + field + "'");
            }
            if (!std::isfinite(values.back())) malformed("non-finite value '" + field + "'");
        }
        if (line_no == 1) {
            if (key != "dim" || values.size() != 1) malformed("first line must be the dim header");
            dim = static_cast<std::size_t>(values[0]);
            continue;
        }
        if (key == "mean") {
            model.mean = std::move(values);
        } else if (key == "var") {
            model.explained_variance = std::move(values);
        } else if (key.rfind("pc", 0) == 0) {
            pcs.push_back(std::move(values));
        } else {
            malformed("unknown key '" + key + "'");
        }
    }
    if (model.mean.size() != dim) throw LoadError(path.string() + ": missing or mis-sized mean row");
    model.components = Matrix::from_rows(pcs);
    if (model.components.rows() > 0 && model.components.cols() != dim)
        throw LoadError(path.string() + ": component rows do not match dim header");
    return model;
}

}  // namespace sansum
