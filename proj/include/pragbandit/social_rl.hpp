#pragma once

// Thompson sampling over linear reward weights with optional social priors.
//
// The learner keeps a Gaussian belief over w (conjugate Bayesian linear
// regression with known noise variance). Draws are rounded to the integer
// lattice and rejected until every weight lies in [-2, 2]. A social prior
// (a discrete posterior over hypotheses produced by a listener model)
// re-weights a batch of such draws before one is picked.

#include "pragbandit/domain.hpp"
#include "pragbandit/literal_listener.hpp"
#include "pragbandit/speaker.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace pragbandit {

struct GaussianBelief {
    Vector6 mean = Vector6::Zero();
    Matrix6 covariance = 5.0 * Matrix6::Identity();

    static GaussianBelief isotropic(double variance);
    /// Throws NumericalDegeneracy unless the covariance is symmetric
    /// positive-definite.
    void validate() const;
};

/// Posterior after observing `observed_reward` ~ N(phi(a)'w, noise_variance).
GaussianBelief bayes_update(const GaussianBelief& b, const Action& a, double observed_reward,
                            double noise_variance = 1.0);

/// Rounds half away from zero; nullopt if any entry leaves [-2, 2].
std::optional<RewardWeights> discretize(const Vector6& continuous);

/// Draws continuous samples from a Gaussian belief.
class GaussianSampler {
public:
    explicit GaussianSampler(const GaussianBelief& b);
    Vector6 operator()(std::mt19937_64& rng) const;

private:
    Vector6 mean_;
    Matrix6 factor_;
};

inline constexpr int kDefaultMaxRejectionAttempts = 10000;

RewardWeights thompson_draw(const GaussianBelief& b, std::mt19937_64& rng,
                            int max_attempts = kDefaultMaxRejectionAttempts);
RewardWeights thompson_draw(const GaussianSampler& sampler, std::mt19937_64& rng,
                            int max_attempts = kDefaultMaxRejectionAttempts);

struct SocialPrior {
    enum class Source { None, Literal, PragmaticFixed, PragmaticLatent };

    Source source = Source::None;
    std::shared_ptr<const Belief> belief;  // null iff source == None

    static SocialPrior none() { return {}; }
    static SocialPrior from(Source source, Belief b) {
        return {source, std::make_shared<const Belief>(std::move(b))};
    }
};

struct EpisodeConfig {
    int steps = 25;
    int trials = 5;
    int state_size = 3;
    int min_importance_samples = 100;
    double epsilon_soft = 1e-10;
    std::uint64_t seed = 0;
    double prior_variance = 5.0;
    double noise_variance = 1.0;
    int max_rejection_attempts = kDefaultMaxRejectionAttempts;

    void validate() const;
};

/// Collects min_importance_samples accepted draws, weights each by the
/// social belief, and returns one of them. Falls back to an unweighted pick
/// (with a warning) if every weight is zero.
RewardWeights importance_draw(const GaussianBelief& b, const SocialPrior& social,
                              const EpisodeConfig& cfg, std::mt19937_64& rng);
RewardWeights importance_draw(const GaussianSampler& sampler, const SocialPrior& social,
                              const EpisodeConfig& cfg, std::mt19937_64& rng);

/// Consistent hypotheses keep their prior weight; inconsistent ones are
/// multiplied by epsilon instead of being ruled out.
Belief soft_condition(const Utterance& u, const Belief& prior, double epsilon = 1e-10);
Belief soft_condition(const Utterance& u, double epsilon = 1e-10);

/// How a learner picks actions during an episode.
struct Learner {
    enum class Mode {
        Individual,           // plain Thompson sampling
        Social,               // Thompson sampling with importance re-weighting
        SocialGreedy,         // act greedily on the social belief's mean, no sampling
        InstructionOverride,  // take the instructed action when present
    };

    Mode mode = Mode::Individual;
    SocialPrior social;
    std::optional<Action> instruction;

    static Learner individual() { return {}; }
    static Learner with_social(SocialPrior p) { return {Mode::Social, std::move(p), std::nullopt}; }
    static Learner greedy(SocialPrior p) { return {Mode::SocialGreedy, std::move(p), std::nullopt}; }
    static Learner instructed(const Action& a) { return {Mode::InstructionOverride, {}, a}; }
};

struct StepRecord {
    State state;
    Action action;
    double observed_reward;
    int expected_reward;  // phi(a)'w_true
    int optimal_reward;
    double regret;        // optimal_reward - expected_reward
};

struct RegretTrace {
    std::vector<StepRecord> steps;

    double cumulative_regret() const;
    std::vector<double> cumulative_curve() const;
};

/// Runs one episode. States come from their own RNG stream so learners
/// given the same seed face the same state sequence.
RegretTrace run_episode(const Learner& learner, const RewardWeights& true_w, const EpisodeConfig& cfg,
                        std::uint64_t seed);

struct RegretSummary {
    std::size_t trials = 0;
    std::vector<double> mean_regret;             // per step
    std::vector<double> mean_cumulative_regret;  // per step
    double mean_total = 0.0;
    double sd_total = 0.0;
};

RegretSummary regret_summary(std::span<const RegretTrace> traces);

}  // namespace pragbandit
