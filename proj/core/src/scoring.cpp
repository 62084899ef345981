#include "driftgate/scoring.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>

#include "driftgate/csv.hpp"
#include "driftgate/errors.hpp"
#include "json.hpp"

namespace driftgate {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) - y*z without overflow.
double nll_term(double z, int y) {
    const double zy = static_cast<double>(y) * z;
    if (z > 0.0) return z - zy + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z)) - zy;
}

void check_xy(const Eigen::MatrixXd& X, std::span<const int> y) {
    if (X.rows() != static_cast<Eigen::Index>(y.size()))
        throw std::invalid_argument("train_logistic: X rows must equal label count");
    if (!X.allFinite()) throw ComputeError("train_logistic: non-finite feature values");
    bool has0 = false, has1 = false;
    for (int v : y) {
        if (v == 0) has0 = true;
        else if (v == 1) has1 = true;
        else throw std::invalid_argument("train_logistic: labels must be 0/1");
    }
    if (!has0 || !has1) throw ComputeError("train_logistic: both classes must be present");
}

}  // namespace

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& features) const {
    if (features.cols() != means.size())
        throw std::invalid_argument("Standardizer: feature dimension mismatch");
    Eigen::MatrixXd out = features.rowwise() - means.transpose();
    for (Eigen::Index c = 0; c < out.cols(); ++c) out.col(c) /= stds[c];
    return out;
}

Standardizer fit_standardizer(const Eigen::MatrixXd& train_features) {
    if (train_features.rows() < 2)
        throw std::invalid_argument("fit_standardizer: need at least 2 rows");
    Standardizer s;
    const double n = static_cast<double>(train_features.rows());
    s.means = train_features.colwise().mean().transpose();
    const Eigen::MatrixXd centered = train_features.rowwise() - s.means.transpose();
    s.stds = (centered.array().square().colwise().sum() / n).sqrt().transpose();
    s.stds = s.stds.cwiseMax(Standardizer::kStdFloor);
    return s;
}

double logistic_objective(const Eigen::MatrixXd& X, std::span<const int> y,
                          double lambda, const Eigen::VectorXd& w_full) {
    const Eigen::Index d = X.cols();
    if (w_full.size() != d + 1)
        throw std::invalid_argument("logistic_objective: w_full must have dim+1 entries");
    const Eigen::VectorXd z =
        ((X * w_full.head(d)).array() + w_full[d]).matrix();
    double nll = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i)
        nll += nll_term(z[i], y[static_cast<std::size_t>(i)]);
    nll /= static_cast<double>(z.size());
    return nll + 0.5 * lambda * w_full.head(d).squaredNorm();
}

Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& X, std::span<const int> y,
                                  double lambda, const Eigen::VectorXd& w_full) {
    const Eigen::Index d = X.cols();
    const Eigen::Index n = X.rows();
    if (w_full.size() != d + 1)
        throw std::invalid_argument("logistic_gradient: w_full must have dim+1 entries");
    const Eigen::VectorXd z = ((X * w_full.head(d)).array() + w_full[d]).matrix();
    Eigen::VectorXd resid(n);
    for (Eigen::Index i = 0; i < n; ++i)
        resid[i] = sigmoid(z[i]) - static_cast<double>(y[static_cast<std::size_t>(i)]);
    Eigen::VectorXd g(d + 1);
    g.head(d) = X.transpose() * resid / static_cast<double>(n) + lambda * w_full.head(d);
    g[d] = resid.mean();
    return g;
}

LogisticModel train_logistic(const Eigen::MatrixXd& X, std::span<const int> y,
                             double lambda, const SolverOptions& opts) {
    check_xy(X, y);
    if (lambda < 0.0) throw std::invalid_argument("train_logistic: lambda must be >= 0");

    const Eigen::Index d = X.cols();
    const Eigen::Index n = X.rows();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
    double obj = logistic_objective(X, y, lambda, w);

    LogisticModel model;
    model.l2_strength = lambda;

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        const Eigen::VectorXd grad = logistic_gradient(X, y, lambda, w);
        if (grad.lpNorm<Eigen::Infinity>() < opts.tol) {
            model.converged = true;
            model.iterations = iter;
            break;
        }

        // Newton direction from the penalized Hessian. The extra column is
        // the intercept; its penalty entry stays zero.
        const Eigen::VectorXd z = ((X * w.head(d)).array() + w[d]).matrix();
        Eigen::VectorXd wt(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = sigmoid(z[i]);
            wt[i] = std::max(p * (1.0 - p), 1e-12);
        }
        Eigen::MatrixXd H(d + 1, d + 1);
        const Eigen::MatrixXd Xw = (X.array().colwise() * wt.array()).matrix();
        H.topLeftCorner(d, d) = X.transpose() * Xw / static_cast<double>(n);
        H.topLeftCorner(d, d).diagonal().array() += lambda;
        const Eigen::VectorXd cross = Xw.colwise().sum().transpose() / static_cast<double>(n);
        H.block(0, d, d, 1) = cross;
        H.block(d, 0, 1, d) = cross.transpose();
        H(d, d) = wt.mean();

        const Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        Eigen::VectorXd dir;
        if (ldlt.info() == Eigen::Success)
            dir = ldlt.solve(-grad);
        else
            dir = -grad;
        double slope = grad.dot(dir);
        if (!(slope < 0.0)) {
            dir = -grad;  // fall back to steepest descent
            slope = grad.dot(dir);
        }

        // Backtracking keeps the objective non-increasing on accepted steps.
        double step = 1.0;
        double next_obj = obj;
        Eigen::VectorXd next_w = w;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            next_w = w + step * dir;
            next_obj = logistic_objective(X, y, lambda, next_w);
            if (next_obj <= obj + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            model.iterations = iter;
            break;  // stalled; report non-convergence
        }
        w = next_w;
        obj = next_obj;
        model.iterations = iter + 1;
    }
    if (!model.converged) {
        const Eigen::VectorXd grad = logistic_gradient(X, y, lambda, w);
        model.converged = grad.lpNorm<Eigen::Infinity>() < opts.tol;
    }
    model.weights = w.head(d);
    model.intercept = w[d];
    return model;
}

Eigen::VectorXd predict_proba(const LogisticModel& model, const Standardizer& std,
                              const Eigen::MatrixXd& raw_features) {
    if (raw_features.cols() != model.weights.size())
        throw std::invalid_argument("predict_proba: feature dimension mismatch");
    const Eigen::MatrixXd Xs = std.transform(raw_features);
    const Eigen::VectorXd z = ((Xs * model.weights).array() + model.intercept).matrix();
    Eigen::VectorXd p(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        p[i] = std::clamp(sigmoid(z[i]), kProbEps, 1.0 - kProbEps);
    return p;
}

void validate(const ScoredWindow& window) {
    const std::size_t n = window.scores.size();
    if (window.labels.size() != n || window.time_steps.size() != n)
        throw InputError("ScoredWindow: scores/labels/time_steps lengths differ");
    if (!window.tx_ids.empty() && window.tx_ids.size() != n)
        throw InputError("ScoredWindow: tx_ids length differs");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(window.scores[i] >= 0.0 && window.scores[i] <= 1.0))
            throw InputError("ScoredWindow: score outside [0,1] at index " + std::to_string(i));
        if (window.labels[i] != 0 && window.labels[i] != 1)
            throw InputError("ScoredWindow: label not in {0,1} at index " + std::to_string(i));
    }
}

ScoredWindow import_scores(const std::filesystem::path& path) {
    csv::Reader reader(path);
    auto header = reader.next();
    if (!header || header->fields !=
                       std::vector<std::string>{"tx_id", "time_step", "label", "score"})
        throw InputError("score file must start with header tx_id,time_step,label,score: " +
                         path.string());
    ScoredWindow w;
    while (auto row = reader.next()) {
        const std::string where = path.string() + " row " + std::to_string(row->line_no);
        if (row->fields.size() != 4) throw InputError("expected 4 columns at " + where);
        w.tx_ids.push_back(row->fields[0]);
        w.time_steps.push_back(
            static_cast<int>(csv::parse_int(row->fields[1], where + " time_step")));
        const std::int64_t lab = csv::parse_int(row->fields[2], where + " label");
        if (lab != 0 && lab != 1) throw InputError("label must be 0 or 1 at " + where);
        w.labels.push_back(static_cast<int>(lab));
        const double s = csv::parse_double(row->fields[3], where + " score");
        if (!(s >= 0.0 && s <= 1.0)) throw InputError("score outside [0,1] at " + where);
        w.scores.push_back(s);
    }
    validate(w);
    return w;
}

void export_scores(const ScoredWindow& window, const std::filesystem::path& path) {
    validate(window);
    csv::Writer w(path);
    w.row({"tx_id", "time_step", "label", "score"});
    for (std::size_t i = 0; i < window.size(); ++i) {
        const std::string id =
            window.tx_ids.empty() ? "r" + std::to_string(i) : window.tx_ids[i];
        w.row({id, std::to_string(window.time_steps[i]), std::to_string(window.labels[i]),
               csv::format_double(window.scores[i])});
    }
}

void save_model_json(const LogisticModel& model, const Standardizer& std,
                     const SolverOptions& opts, const std::filesystem::path& path) {
    nlohmann::json j;
    j["weights"] = std::vector<double>(model.weights.begin(), model.weights.end());
    j["intercept"] = model.intercept;
    j["lambda"] = model.l2_strength;
    j["standardizer"]["means"] = std::vector<double>(std.means.begin(), std.means.end());
    j["standardizer"]["stds"] = std::vector<double>(std.stds.begin(), std.stds.end());
    j["solver"]["converged"] = model.converged;
    j["solver"]["iterations"] = model.iterations;
    j["solver"]["tol"] = opts.tol;
    j["solver"]["max_iter"] = opts.max_iter;
    std::ofstream out(path);
    if (!out) throw InputError("cannot open file for writing: " + path.string());
    out << j.dump(2) << "\n";
}

Eigen::MatrixXd feature_matrix(const Dataset& ds, std::span<const std::size_t> idx) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(idx.size()), ds.feature_dim);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto& f = ds.records[idx[r]].features;
        for (int c = 0; c < ds.feature_dim; ++c)
            X(static_cast<Eigen::Index>(r), c) = f[static_cast<std::size_t>(c)];
    }
    return X;
}

std::vector<int> label_vector(const Dataset& ds, std::span<const std::size_t> idx) {
    std::vector<int> y(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
        y[r] = ds.records[idx[r]].label == Label::Illicit ? 1 : 0;
    return y;
}

}  // namespace driftgate
