// Feature standardization from training moments and an L2-penalized logistic
// scorer trained by damped Newton iteration. Scores can also come from
// outside: ScoredWindow round-trips through a plain CSV so any externally
// produced score file can be pushed through the evaluation machinery.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "driftgate/dataset.hpp"

namespace driftgate {

// Per-feature training moments. stds are population (divide-by-N) standard
// deviations floored at kStdFloor so constant columns stay transformable.
struct Standardizer {
    Eigen::VectorXd means;
    Eigen::VectorXd stds;

    static constexpr double kStdFloor = 1e-8;

    Eigen::MatrixXd transform(const Eigen::MatrixXd& features) const;
};

Standardizer fit_standardizer(const Eigen::MatrixXd& train_features);

struct SolverOptions {
    double tol = 1e-6;  // infinity norm of the penalized gradient
    int max_iter = 500;
};

struct LogisticModel {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    double l2_strength = 1.0;
    bool converged = false;
    int iterations = 0;
};

// Minimizes mean negative log-likelihood + (lambda/2)*||weights||^2 with the
// intercept unpenalized. X must already be standardized. Deterministic:
// full-batch Newton steps with backtracking, no randomness anywhere.
LogisticModel train_logistic(const Eigen::MatrixXd& X, std::span<const int> y,
                             double lambda, const SolverOptions& opts = {});

// Penalized objective and its analytic gradient at w = [weights..., intercept],
// exposed so finite-difference checks can probe the exact surface the solver
// descends.
double logistic_objective(const Eigen::MatrixXd& X, std::span<const int> y,
                          double lambda, const Eigen::VectorXd& w_full);
Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& X, std::span<const int> y,
                                  double lambda, const Eigen::VectorXd& w_full);

// Probabilities for raw (unstandardized) feature rows; outputs clamped to
// (0,1) by kProbEps.
Eigen::VectorXd predict_proba(const LogisticModel& model, const Standardizer& std,
                              const Eigen::MatrixXd& raw_features);

inline constexpr double kProbEps = 1e-12;

// Aligned scores, labels and time steps for one evaluation slice.
struct ScoredWindow {
    std::vector<double> scores;   // in [0,1]
    std::vector<int> labels;      // 0 = licit, 1 = illicit
    std::vector<int> time_steps;
    std::vector<std::string> tx_ids;  // optional; synthesized on export if empty

    std::size_t size() const { return scores.size(); }
};

// Throws if lengths disagree, a score leaves [0,1], or a label leaves {0,1}.
void validate(const ScoredWindow& window);

// CSV with header tx_id,time_step,label,score.
ScoredWindow import_scores(const std::filesystem::path& path);
void export_scores(const ScoredWindow& window, const std::filesystem::path& path);

// Model + standardizer + solver metadata as a JSON document.
void save_model_json(const LogisticModel& model, const Standardizer& std,
                     const SolverOptions& opts, const std::filesystem::path& path);

// Row-major feature matrix for the given dataset rows.
Eigen::MatrixXd feature_matrix(const Dataset& ds, std::span<const std::size_t> idx);
std::vector<int> label_vector(const Dataset& ds, std::span<const std::size_t> idx);

}  // namespace driftgate
