#pragma once

// Pragmatic (L1) listener: inverts the reward-maximizing speaker to infer
// the reward weights, with the speaker's horizon either known or latent.

#include "pragbandit/domain.hpp"
#include "pragbandit/literal_listener.hpp"
#include "pragbandit/speaker.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

namespace pragbandit {

struct HorizonPrior {
    std::vector<Horizon> support;
    std::vector<double> probs;

    /// Uniform over {1, 2, 3, 4, 5, 10}.
    static HorizonPrior standard();
    static HorizonPrior uniform(const std::vector<int>& horizons);
    static HorizonPrior delta(Horizon h);

    void validate() const;
};

class JointPosterior {
public:
    JointPosterior(HorizonPrior prior, Eigen::MatrixXd probs);

    /// Column j belongs to horizon support[j].
    const Eigen::MatrixXd& probs() const { return p_; }
    const std::vector<Horizon>& horizons() const { return prior_.support; }
    double prob(int hypothesis, std::size_t horizon_index) const { return p_(hypothesis, horizon_index); }

    Belief reward_marginal() const;
    std::vector<double> horizon_marginal() const;

private:
    HorizonPrior prior_;
    Eigen::MatrixXd p_;
};

/// marginals[f][v + 2] = P(w[f] == v).
struct FeatureMarginals {
    std::array<std::array<double, kNumWeightValues>, kNumFeatures> p{};

    double at(Feature f, int value) const { return p[index(f)][value - kMinWeight]; }
    double expected_value(Feature f) const;
};

FeatureMarginals feature_marginals(const Belief& b);

/// log S1(u | w, s, H) for every hypothesis. Alternative speaker models
/// (for instance a truthfulness-weighted one) plug in here.
class SpeakerLikelihood {
public:
    virtual ~SpeakerLikelihood() = default;
    virtual const UtteranceSet& utterances() const = 0;
    virtual Eigen::VectorXd log_likelihood(const Utterance& u, const State& s, Horizon h) const = 0;
};

/// Softmax likelihood of the reward-maximizing speaker. The per-hypothesis
/// log normalizer is memoized per (state, horizon); the memo is guarded so
/// concurrent callers can share one instance.
class RewardSpeakerLikelihood final : public SpeakerLikelihood {
public:
    explicit RewardSpeakerLikelihood(SpeakerParams params);

    const UtteranceSet& utterances() const override { return speaker_.utterances(); }
    const SpeakerModel& speaker() const { return speaker_; }
    Eigen::VectorXd log_likelihood(const Utterance& u, const State& s, Horizon h) const override;

    std::size_t cached_tables() const;

private:
    using Key = std::pair<std::uint16_t, int>;
    std::shared_ptr<const Eigen::VectorXd> log_normalizer(const State& s, Horizon h,
                                                          const Eigen::MatrixXd& coefficients) const;

    SpeakerModel speaker_;
    mutable std::mutex mutex_;
    mutable std::map<Key, std::shared_ptr<const Eigen::VectorXd>> memo_;
};

class PragmaticListener {
public:
    /// Defaults follow the dataset analyses: experiment utterance set,
    /// beta_S1 = 3, uniform prior over reward weights.
    static SpeakerParams default_speaker_params();

    explicit PragmaticListener(SpeakerParams speaker = default_speaker_params(),
                               Belief prior = Belief::uniform());
    PragmaticListener(std::shared_ptr<const SpeakerLikelihood> likelihood, Belief prior);

    const SpeakerLikelihood& likelihood() const { return *likelihood_; }
    const Belief& prior() const { return prior_; }

    /// L1(w | s, u, H) proportional to S1(u | w, s, H) P(w).
    Belief fixed(const Utterance& u, const State& s, Horizon h) const;
    /// Joint posterior over (w, H).
    JointPosterior latent(const Utterance& u, const State& s, const HorizonPrior& horizons) const;

private:
    void require_known(const Utterance& u) const;

    std::shared_ptr<const SpeakerLikelihood> likelihood_;
    Belief prior_;
    Eigen::VectorXd log_prior_;
};

Belief l1_fixed(const Utterance& u, const State& s, Horizon h, const SpeakerParams& speaker);
JointPosterior l1_latent(const Utterance& u, const State& s, const HorizonPrior& horizons,
                         const SpeakerParams& speaker);

/// belief_policy applied to a pragmatic posterior.
Policy pragmatic_policy(const Belief& b, const State& s, const ListenerParams& params);

}  // namespace pragbandit
