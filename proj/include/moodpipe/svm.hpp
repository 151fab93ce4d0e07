#pragma once

// Soft-margin SVM trained by sequential minimal optimization on the dual,
// with one-vs-one voting over the six expressions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "moodpipe/error.hpp"
#include "moodpipe/expression.hpp"
#include "moodpipe/random.hpp"

namespace moodpipe {

// ---------------------------------------------------------------------------
// Kernels

enum class KernelKind { Linear, Polynomial, Rbf };

struct KernelSpec {
    KernelKind kind = KernelKind::Rbf;
    int degree = 3;
    double coef0 = 0.0;
    double gamma = 1.0 / 7.0;

    static KernelSpec linear() { return {KernelKind::Linear, 3, 0.0, 1.0}; }
    static KernelSpec polynomial(int d, double c0) { return {KernelKind::Polynomial, d, c0, 1.0}; }
    static KernelSpec rbf(double g) { return {KernelKind::Rbf, 3, 0.0, g}; }

    void validate() const {
        if (kind == KernelKind::Polynomial && degree < 1) {
            throw Error(ErrorKind::InvalidParams, "polynomial degree must be >= 1");
        }
        if (kind == KernelKind::Rbf && !(gamma > 0.0)) throw Error(ErrorKind::InvalidParams, "rbf gamma must be > 0");
    }
    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

inline double kernel_eval(const KernelSpec& k, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionError, "kernel arguments differ in dimension");
    switch (k.kind) {
        case KernelKind::Linear:
        case KernelKind::Polynomial: {
            double dot = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
            if (k.kind == KernelKind::Linear) return dot;
            return std::pow(dot + k.coef0, k.degree);
        }
        case KernelKind::Rbf: {
            double d2 = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
            return std::exp(-k.gamma * d2);
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Binary SMO

struct BinarySample {
    std::vector<double> x;
    int y = 1;  // +1 or -1
};

struct TrainConfig {
    double C = 10.0;
    double kkt_tol = 1e-3;
    int max_passes = 200;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(C > 0.0)) throw Error(ErrorKind::InvalidParams, "C must be > 0");
        if (!(kkt_tol > 0.0)) throw Error(ErrorKind::InvalidParams, "kkt_tol must be > 0");
        if (max_passes < 1) throw Error(ErrorKind::InvalidParams, "max_passes must be >= 1");
    }
};

struct BinarySvmModel {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> coef;  // alpha_i * y_i per support vector
    double bias = 0.0;
    KernelSpec kernel;
    bool converged = true;
    int iterations = 0;
};

/// Per-sample multipliers and per-update history of one SMO run.
struct SmoTrace {
    std::vector<double> alpha;
    std::vector<double> dual_objective;      // after each pair update (index 0: start)
    std::vector<double> equality_residual;   // |sum alpha_i y_i| after each update
};

inline double predict_binary(const BinarySvmModel& m, std::span<const double> x) {
    double f = m.bias;
    for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
        if (m.support_vectors[i].size() != x.size()) {
            throw Error(ErrorKind::DimensionError, "input dimension does not match the model");
        }
        f += m.coef[i] * kernel_eval(m.kernel, m.support_vectors[i], x);
    }
    return f;
}

/// Dual value sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
inline double dual_objective(const std::vector<BinarySample>& s, const KernelSpec& k, std::span<const double> alpha) {
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        lin += alpha[i];
        for (std::size_t j = 0; j < s.size(); ++j) {
            quad += alpha[i] * alpha[j] * s[i].y * s[j].y * kernel_eval(k, s[i].x, s[j].x);
        }
    }
    return lin - 0.5 * quad;
}

/// SMO with maximal-violating-pair / second-order working-set selection on
/// a full Gram matrix. Stops when the KKT gap between the two index sets
/// drops below kkt_tol, or after max_passes * n pair updates (flagged
/// unconverged). The bias is the mean over free support vectors.
inline BinarySvmModel train_binary(const std::vector<BinarySample>& samples, const KernelSpec& kernel,
                                   const TrainConfig& cfg, SmoTrace* trace = nullptr) {
    cfg.validate();
    kernel.validate();
    const int n = static_cast<int>(samples.size());
    bool has_pos = false, has_neg = false;
    for (const auto& s : samples) {
        if (s.y != 1 && s.y != -1) throw Error(ErrorKind::InvalidParams, "binary labels must be +1 or -1");
        has_pos |= s.y == 1;
        has_neg |= s.y == -1;
        if (s.x.size() != samples.front().x.size()) throw Error(ErrorKind::DimensionError, "ragged samples");
    }
    if (!has_pos || !has_neg) throw Error(ErrorKind::DegenerateLabels, "binary training needs both labels");

    // Visiting order only decides ties in working-set selection.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    Rng rng(cfg.seed);
    rng.shuffle(order);

    std::vector<double> K(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = kernel_eval(kernel, samples[i].x, samples[j].x);
            K[static_cast<std::size_t>(i) * n + j] = v;
            K[static_cast<std::size_t>(j) * n + i] = v;
        }
    }
    const auto kij = [&](int i, int j) { return K[static_cast<std::size_t>(i) * n + j]; };
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = samples[i].y;

    const double C = cfg.C;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a
    const auto in_up = [&](int t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0.0); };
    const auto in_low = [&](int t) { return (y[t] > 0 && alpha[t] > 0.0) || (y[t] < 0 && alpha[t] < C); };
    const auto objective = [&] {
        double f = 0.0;
        for (int t = 0; t < n; ++t) f += alpha[t] * (grad[t] - 1.0);
        return -0.5 * f;
    };
    const auto residual = [&] {
        double s = 0.0;
        for (int t = 0; t < n; ++t) s += alpha[t] * y[t];
        return std::abs(s);
    };
    if (trace) {
        trace->dual_objective.assign(1, 0.0);
        trace->equality_residual.assign(1, 0.0);
    }

    constexpr double tau = 1e-12;
    const long long max_iter = static_cast<long long>(cfg.max_passes) * std::max(n, 1);
    BinarySvmModel model;
    model.kernel = kernel;
    model.converged = false;
    long long iter = 0;
    for (; iter < max_iter; ++iter) {
        int i = -1;
        double gmax = -std::numeric_limits<double>::infinity();
        for (int t : order) {
            if (in_up(t) && -y[t] * grad[t] > gmax) {
                gmax = -y[t] * grad[t];
                i = t;
            }
        }
        int j = -1;
        double gmin = std::numeric_limits<double>::infinity();
        double best_gain = std::numeric_limits<double>::infinity();
        for (int t : order) {
            if (!in_low(t)) continue;
            const double v = -y[t] * grad[t];
            gmin = std::min(gmin, v);
            if (i < 0) continue;
            const double b = gmax - v;
            if (b <= 0.0) continue;
            double a = kij(i, i) + kij(t, t) - 2.0 * kij(i, t);
            if (a <= 0.0) a = tau;
            const double gain = -(b * b) / a;
            if (gain < best_gain) {
                best_gain = gain;
                j = t;
            }
        }
        if (i < 0 || j < 0 || gmax - gmin < cfg.kkt_tol) {
            model.converged = true;
            break;
        }

        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        double quad = kij(i, i) + kij(j, j) - 2.0 * kij(i, j);
        if (quad <= 0.0) quad = tau;
        if (y[i] != y[j]) {
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
            } else {
                if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
            }
            if (diff > 0) {
                if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
            } else {
                if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
            }
        } else {
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
            } else {
                if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
            }
            if (sum > C) {
                if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
            } else {
                if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
            }
        }
        alpha[i] = std::clamp(alpha[i], 0.0, C);
        alpha[j] = std::clamp(alpha[j], 0.0, C);

        const double di = alpha[i] - old_ai;
        const double dj = alpha[j] - old_aj;
        for (int t = 0; t < n; ++t) grad[t] += y[t] * (y[i] * kij(t, i) * di + y[j] * kij(t, j) * dj);
        if (trace) {
            trace->dual_objective.push_back(objective());
            trace->equality_residual.push_back(residual());
        }
    }
    model.iterations = static_cast<int>(iter);

    double bias_sum = 0.0;
    int free_count = 0;
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
        const double v = -y[t] * grad[t];
        if (alpha[t] > 0.0 && alpha[t] < C) {
            bias_sum += v;
            ++free_count;
        }
        if (in_up(t)) lb = std::max(lb, v);
        if (in_low(t)) ub = std::min(ub, v);
    }
    if (free_count > 0) {
        model.bias = bias_sum / free_count;
    } else if (std::isfinite(lb) && std::isfinite(ub)) {
        model.bias = 0.5 * (lb + ub);
    } else {
        model.bias = std::isfinite(lb) ? lb : ub;
    }

    for (int t = 0; t < n; ++t) {
        if (alpha[t] > 1e-9) {
            model.support_vectors.push_back(samples[t].x);
            model.coef.push_back(alpha[t] * y[t]);
        }
    }
    if (trace) trace->alpha = alpha;
    return model;
}

// ---------------------------------------------------------------------------
// Standardization

struct Scaler {
    std::vector<double> mean;
    std::vector<double> scale;

    std::vector<double> apply(std::span<const double> x) const {
        if (x.size() != mean.size()) throw Error(ErrorKind::DimensionError, "scaler dimension mismatch");
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / scale[i];
        return out;
    }
    friend bool operator==(const Scaler&, const Scaler&) = default;
};

/// Per-component mean and population standard deviation (floored at 1e-9).
inline Scaler standardize_fit(const std::vector<std::vector<double>>& xs) {
    if (xs.size() < 2) throw Error(ErrorKind::EmptyDataset, "standardize_fit needs at least 2 samples");
    const std::size_t d = xs.front().size();
    const double n = static_cast<double>(xs.size());
    Scaler s{std::vector<double>(d), std::vector<double>(d)};
    for (std::size_t c = 0; c < d; ++c) {
        // Offsetting by the first sample keeps constant columns exact.
        const double base = xs.front()[c];
        double acc = 0.0;
        for (const auto& x : xs) {
            if (x.size() != d) throw Error(ErrorKind::DimensionError, "ragged samples");
            acc += x[c] - base;
        }
        s.mean[c] = base + acc / n;
        double var = 0.0;
        for (const auto& x : xs) var += (x[c] - s.mean[c]) * (x[c] - s.mean[c]);
        s.scale[c] = std::max(std::sqrt(var / n), 1e-9);
    }
    return s;
}

inline std::vector<double> standardize_apply(const Scaler& s, std::span<const double> x) { return s.apply(x); }

// ---------------------------------------------------------------------------
// One-vs-one multiclass

struct LabeledSample {
    std::vector<double> x;
    Expression label;
};

inline constexpr int kPairCount = kExpressionCount * (kExpressionCount - 1) / 2;

struct PairModel {
    Expression positive = Expression::Anger;
    Expression negative = Expression::Fear;
    bool trained = false;
    BinarySvmModel model;
};

struct MultiClassSvmModel {
    KernelSpec kernel;
    Scaler scaler;
    std::array<PairModel, kPairCount> pairs;

    int dimension() const { return static_cast<int>(scaler.mean.size()); }
};

/// Pair slots in canonical order: (Anger, Fear), (Anger, Disgust), ...
inline std::array<PairModel, kPairCount> canonical_pairs() {
    std::array<PairModel, kPairCount> out{};
    int k = 0;
    for (int a = 0; a < kExpressionCount; ++a) {
        for (int b = a + 1; b < kExpressionCount; ++b) {
            out[k].positive = kAllExpressions[a];
            out[k].negative = kAllExpressions[b];
            ++k;
        }
    }
    return out;
}

inline MultiClassSvmModel train_multiclass(const std::vector<LabeledSample>& samples, const KernelSpec& kernel,
                                           const TrainConfig& cfg) {
    cfg.validate();
    kernel.validate();
    std::array<int, kExpressionCount> counts{};
    for (const auto& s : samples) ++counts[index_of(s.label)];
    const int present = static_cast<int>(std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }));
    if (samples.size() < 2 || present < 2) {
        throw Error(ErrorKind::DegenerateLabels, "multiclass training needs samples from at least 2 classes");
    }
    std::vector<std::vector<double>> xs;
    xs.reserve(samples.size());
    for (const auto& s : samples) xs.push_back(s.x);

    MultiClassSvmModel m;
    m.kernel = kernel;
    m.scaler = standardize_fit(xs);
    m.pairs = canonical_pairs();
    std::vector<std::vector<double>> scaled;
    scaled.reserve(xs.size());
    for (const auto& x : xs) scaled.push_back(m.scaler.apply(x));

    for (int k = 0; k < kPairCount; ++k) {
        PairModel& pm = m.pairs[k];
        if (counts[index_of(pm.positive)] == 0 || counts[index_of(pm.negative)] == 0) continue;
        std::vector<BinarySample> sub;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (samples[i].label == pm.positive) sub.push_back({scaled[i], 1});
            if (samples[i].label == pm.negative) sub.push_back({scaled[i], -1});
        }
        TrainConfig pc = cfg;
        pc.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
        pm.model = train_binary(sub, kernel, pc);
        pm.trained = true;
    }
    return m;
}

struct ExpressionPrediction {
    Expression label = Expression::Anger;
    std::array<int, kExpressionCount> votes{};
    std::array<double, kExpressionCount> margin{};  // sum of |f| over won pairs
    std::array<std::optional<double>, kPairCount> pair_scores{};
};

/// Resolve a vote tally: most votes, then the largest summed |f| over the
/// pairs each tied class won, then canonical order.
inline Expression resolve_votes(const std::array<int, kExpressionCount>& votes,
                                const std::array<double, kExpressionCount>& margin) {
    int best = 0;
    for (int c = 1; c < kExpressionCount; ++c) {
        if (votes[c] > votes[best] || (votes[c] == votes[best] && margin[c] > margin[best])) best = c;
    }
    return kAllExpressions[best];
}

inline ExpressionPrediction predict_expression(const MultiClassSvmModel& m, std::span<const double> x) {
    if (static_cast<int>(x.size()) != m.dimension()) {
        throw Error(ErrorKind::DimensionError, "feature vector dimension does not match the model");
    }
    const auto z = m.scaler.apply(x);
    ExpressionPrediction p;
    for (int k = 0; k < kPairCount; ++k) {
        const PairModel& pm = m.pairs[k];
        if (!pm.trained) continue;
        const double f = predict_binary(pm.model, z);
        p.pair_scores[k] = f;
        const int winner = f >= 0.0 ? index_of(pm.positive) : index_of(pm.negative);
        ++p.votes[winner];
        p.margin[winner] += std::abs(f);
    }
    p.label = resolve_votes(p.votes, p.margin);
    return p;
}

// ---------------------------------------------------------------------------
// Evaluation

struct EvalReport {
    std::array<std::array<int, kExpressionCount>, kExpressionCount> confusion{};  // [truth][predicted]
    std::array<std::optional<double>, kExpressionCount> accuracy{};              // by canonical index
    double average = 0.0;  // unweighted mean over classes present
    int total = 0;
    int correct = 0;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

inline EvalReport tabulate(const std::vector<Expression>& truth, const std::vector<Expression>& predicted) {
    if (truth.empty()) throw Error(ErrorKind::EmptyDataset, "evaluation set is empty");
    EvalReport r;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++r.confusion[index_of(truth[i])][index_of(predicted[i])];
        ++r.total;
        if (truth[i] == predicted[i]) ++r.correct;
    }
    double sum = 0.0;
    int present = 0;
    for (int c = 0; c < kExpressionCount; ++c) {
        int n = 0;
        for (int v : r.confusion[c]) n += v;
        if (n == 0) continue;
        r.accuracy[c] = static_cast<double>(r.confusion[c][c]) / n;
        sum += *r.accuracy[c];
        ++present;
    }
    r.average = sum / present;
    return r;
}

inline EvalReport evaluate(const MultiClassSvmModel& m, const std::vector<LabeledSample>& test) {
    if (test.empty()) throw Error(ErrorKind::EmptyDataset, "evaluation set is empty");
    std::vector<Expression> truth, pred;
    for (const auto& s : test) {
        truth.push_back(s.label);
        pred.push_back(predict_expression(m, s.x).label);
    }
    return tabulate(truth, pred);
}

/// Accuracy table, one row per expression in report order plus Average.
inline std::string format_report(const EvalReport& r) {
    std::ostringstream os;
    os << std::left << std::setw(12) << "Expression" << "Percentage\n";
    for (Expression e : kReportOrder) {
        os << std::setw(12) << name_of(e);
        if (const auto& a = r.accuracy[index_of(e)]) {
            os << std::fixed << std::setprecision(1) << (*a * 100.0) << "%\n";
        } else {
            os << "n/a\n";
        }
    }
    os << std::setw(12) << "Average" << std::fixed << std::setprecision(1) << (r.average * 100.0) << "%\n";
    os << "\nConfusion (rows: truth, columns: predicted)\n" << std::setw(12) << "";
    for (Expression e : kReportOrder) os << std::right << std::setw(9) << name_of(e);
    os << '\n';
    for (Expression t : kReportOrder) {
        os << std::left << std::setw(12) << name_of(t);
        for (Expression p : kReportOrder) os << std::right << std::setw(9) << r.confusion[index_of(t)][index_of(p)];
        os << '\n';
    }
    return os.str();
}

/// Machine-readable report: `class,correct,total,accuracy` rows in report
/// order, an Average row, then `confusion,<truth>,<predicted>,<count>` rows.
inline std::string format_report_csv(const EvalReport& r) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "class,correct,total,accuracy\n";
    for (Expression e : kReportOrder) {
        const int c = index_of(e);
        int n = 0;
        for (int v : r.confusion[c]) n += v;
        os << name_of(e) << ',' << r.confusion[c][c] << ',' << n << ',';
        if (r.accuracy[c]) os << *r.accuracy[c];
        os << '\n';
    }
    os << "Average,," << r.total << ',' << r.average << '\n';
    for (Expression t : kReportOrder) {
        for (Expression p : kReportOrder) {
            os << "confusion," << name_of(t) << ',' << name_of(p) << ',' << r.confusion[index_of(t)][index_of(p)] << '\n';
        }
    }
    return os.str();
}

inline EvalReport parse_report_csv(std::istream& in) {
    EvalReport r;
    std::string line;
    if (!std::getline(in, line) || line != "class,correct,total,accuracy") {
        throw Error(ErrorKind::FormatError, "unexpected report header");
    }
    const auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        if (!s.empty() && s.back() == ',') parts.emplace_back();
        return parts;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto parts = split(line);
        if (parts.size() == 4 && parts[0] == "confusion") {
            const auto t = parse_expression(parts[1]);
            const auto p = parse_expression(parts[2]);
            if (!t || !p) throw Error(ErrorKind::FormatError, "bad confusion row");
            r.confusion[index_of(*t)][index_of(*p)] = std::stoi(parts[3]);
        } else if (parts.size() == 4 && parts[0] == "Average") {
            r.total = std::stoi(parts[2]);
            r.average = std::stod(parts[3]);
        } else if (parts.size() == 4) {
            const auto e = parse_expression(parts[0]);
            if (!e) throw Error(ErrorKind::FormatError, "bad class row");
            if (!parts[3].empty()) r.accuracy[index_of(*e)] = std::stod(parts[3]);
            r.correct += std::stoi(parts[1]);
        } else {
            throw Error(ErrorKind::FormatError, "bad report row: " + line);
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Persistence

namespace detail {

inline void write_values(std::ostream& os, std::span<const double> v) {
    for (double d : v) os << ' ' << d;
}

inline std::string expect_line(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::FormatError, std::string("model file ended before ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

inline std::vector<double> read_values(std::istringstream& ss, std::size_t n, const char* what) {
    std::vector<double> v(n);
    for (auto& d : v) {
        if (!(ss >> d)) throw Error(ErrorKind::FormatError, std::string("malformed ") + what);
    }
    return v;
}

}  // namespace detail

/// Plain-text model format, version 1. Doubles are written with 17
/// significant digits so a reload reproduces every prediction exactly.
inline void save_model(std::ostream& os, const MultiClassSvmModel& m) {
    os << "moodpipe-svm v1\n" << std::setprecision(17);
    switch (m.kernel.kind) {
        case KernelKind::Linear: os << "kernel linear\n"; break;
        case KernelKind::Polynomial: os << "kernel polynomial " << m.kernel.degree << ' ' << m.kernel.coef0 << '\n'; break;
        case KernelKind::Rbf: os << "kernel rbf " << m.kernel.gamma << '\n'; break;
    }
    os << "scaler " << m.scaler.mean.size();
    detail::write_values(os, m.scaler.mean);
    detail::write_values(os, m.scaler.scale);
    os << "\npairs " << kPairCount << '\n';
    for (const auto& pm : m.pairs) {
        os << "pair " << name_of(pm.positive) << ' ' << name_of(pm.negative) << ' ';
        if (!pm.trained) {
            os << "absent\n";
            continue;
        }
        os << (pm.model.converged ? "converged" : "unconverged") << '\n';
        os << "bias " << pm.model.bias << '\n';
        os << "svs " << pm.model.support_vectors.size() << '\n';
        for (std::size_t i = 0; i < pm.model.support_vectors.size(); ++i) {
            os << pm.model.coef[i];
            detail::write_values(os, pm.model.support_vectors[i]);
            os << '\n';
        }
    }
}

inline MultiClassSvmModel load_model(std::istream& in) {
    using detail::expect_line;
    if (expect_line(in, "header") != "moodpipe-svm v1") {
        throw Error(ErrorKind::FormatError, "not a moodpipe-svm v1 model");
    }
    MultiClassSvmModel m;
    {
        std::istringstream ss(expect_line(in, "kernel line"));
        std::string tag, kind;
        ss >> tag >> kind;
        if (tag != "kernel") throw Error(ErrorKind::FormatError, "expected kernel line");
        if (kind == "linear") {
            m.kernel = KernelSpec::linear();
        } else if (kind == "polynomial") {
            int d = 0;
            double c0 = 0.0;
            if (!(ss >> d >> c0)) throw Error(ErrorKind::FormatError, "malformed polynomial kernel");
            m.kernel = KernelSpec::polynomial(d, c0);
        } else if (kind == "rbf") {
            double g = 0.0;
            if (!(ss >> g)) throw Error(ErrorKind::FormatError, "malformed rbf kernel");
            m.kernel = KernelSpec::rbf(g);
        } else {
            throw Error(ErrorKind::FormatError, "unknown kernel '" + kind + "'");
        }
        m.kernel.validate();
    }
    std::size_t dim = 0;
    {
        std::istringstream ss(expect_line(in, "scaler line"));
        std::string tag;
        if (!(ss >> tag >> dim) || tag != "scaler" || dim == 0) throw Error(ErrorKind::FormatError, "expected scaler line");
        m.scaler.mean = detail::read_values(ss, dim, "scaler means");
        m.scaler.scale = detail::read_values(ss, dim, "scaler scales");
    }
    {
        std::istringstream ss(expect_line(in, "pair count"));
        std::string tag;
        int count = 0;
        if (!(ss >> tag >> count) || tag != "pairs" || count != kPairCount) {
            throw Error(ErrorKind::FormatError, "expected 'pairs 15'");
        }
    }
    m.pairs = canonical_pairs();
    for (auto& pm : m.pairs) {
        std::istringstream ss(expect_line(in, "pair header"));
        std::string tag, a, b, state;
        ss >> tag >> a >> b >> state;
        if (tag != "pair" || a != name_of(pm.positive) || b != name_of(pm.negative)) {
            throw Error(ErrorKind::FormatError, "pair blocks out of canonical order");
        }
        if (state == "absent") continue;
        if (state != "converged" && state != "unconverged") throw Error(ErrorKind::FormatError, "bad pair state");
        pm.trained = true;
        pm.model.kernel = m.kernel;
        pm.model.converged = state == "converged";
        std::istringstream bs(expect_line(in, "bias"));
        if (!(bs >> tag >> pm.model.bias) || tag != "bias") throw Error(ErrorKind::FormatError, "expected bias line");
        std::istringstream cs(expect_line(in, "sv count"));
        std::size_t nsv = 0;
        if (!(cs >> tag >> nsv) || tag != "svs") throw Error(ErrorKind::FormatError, "expected svs line");
        for (std::size_t i = 0; i < nsv; ++i) {
            std::istringstream vs(expect_line(in, "support vector"));
            double c = 0.0;
            if (!(vs >> c)) throw Error(ErrorKind::FormatError, "malformed support vector");
            pm.model.coef.push_back(c);
            pm.model.support_vectors.push_back(detail::read_values(vs, dim, "support vector"));
        }
    }
    return m;
}

}  // namespace moodpipe
