#include "pragbandit/pragmatic_listener.hpp"

#include "pragbandit/error.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace pragbandit {

HorizonPrior HorizonPrior::standard() { return uniform({1, 2, 3, 4, 5, 10}); }

HorizonPrior HorizonPrior::uniform(const std::vector<int>& horizons) {
    HorizonPrior p;
    for (int h : horizons) p.support.push_back(Horizon::finite(h));
    p.probs.assign(horizons.size(), horizons.empty() ? 0.0 : 1.0 / static_cast<double>(horizons.size()));
    p.validate();
    return p;
}

HorizonPrior HorizonPrior::delta(Horizon h) { return HorizonPrior{{h}, {1.0}}; }

void HorizonPrior::validate() const {
    if (support.empty() || support.size() != probs.size())
        throw InvalidArgument("horizon prior needs a non-empty support with one probability each");
    std::set<std::string> seen;
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (!seen.insert(support[i].to_string()).second)
            throw InvalidArgument("horizon prior support must be distinct");
        if (probs[i] < 0.0) throw InvalidArgument("horizon prior probabilities must be non-negative");
        total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("horizon prior must sum to 1");
}

// ---------------------------------------------------------- JointPosterior

JointPosterior::JointPosterior(HorizonPrior prior, Eigen::MatrixXd probs)
    : prior_(std::move(prior)), p_(std::move(probs)) {
    if (p_.rows() != kNumHypotheses || p_.cols() != static_cast<Eigen::Index>(prior_.support.size()))
        throw InvalidArgument("joint posterior shape mismatch");
}

Belief JointPosterior::reward_marginal() const { return Belief::from_weights(p_.rowwise().sum()); }

std::vector<double> JointPosterior::horizon_marginal() const {
    const Eigen::VectorXd m = p_.colwise().sum().transpose();
    return {m.data(), m.data() + m.size()};
}

// -------------------------------------------------------- FeatureMarginals

double FeatureMarginals::expected_value(Feature f) const {
    double e = 0.0;
    for (int v = kMinWeight; v <= kMaxWeight; ++v) e += v * at(f, v);
    return e;
}

FeatureMarginals feature_marginals(const Belief& b) {
    FeatureMarginals m;
    const auto& H = hypothesis_matrix();
    const auto& p = b.probs();
    for (int h = 0; h < kNumHypotheses; ++h)
        for (int f = 0; f < kNumFeatures; ++f)
            m.p[f][static_cast<int>(H(h, f)) - kMinWeight] += p[h];
    return m;
}

// ------------------------------------------------- RewardSpeakerLikelihood

RewardSpeakerLikelihood::RewardSpeakerLikelihood(SpeakerParams params) : speaker_(std::move(params)) {
    if (std::isinf(speaker_.params().beta_s1))
        throw InvalidArgument("pragmatic inference needs a finite beta_S1");
}

std::shared_ptr<const Eigen::VectorXd> RewardSpeakerLikelihood::log_normalizer(
    const State& s, Horizon h, const Eigen::MatrixXd& coefficients) const {
    const Key key{s.mask(), h.is_infinite() ? 0 : h.value()};
    {
        std::lock_guard lock(mutex_);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    const double beta = speaker_.params().beta_s1;
    const Eigen::MatrixXd scores = beta * (hypothesis_matrix() * coefficients);
    const Eigen::VectorXd row_max = scores.rowwise().maxCoeff();
    const Eigen::VectorXd sums = (scores.colwise() - row_max).array().exp().rowwise().sum();
    auto table = std::make_shared<const Eigen::VectorXd>(row_max.array() + sums.array().log());
    std::lock_guard lock(mutex_);
    return memo_.emplace(key, std::move(table)).first->second;
}

Eigen::VectorXd RewardSpeakerLikelihood::log_likelihood(const Utterance& u, const State& s,
                                                        Horizon h) const {
    const auto i = utterances().index_of(u);
    if (!i) throw UnknownUtterance("'" + u.to_string() + "' is not in the speaker's utterance set '" +
                                   utterances().name() + "'");
    const Eigen::MatrixXd c = speaker_.utility_coefficients(s, h);
    const auto log_z = log_normalizer(s, h, c);
    const double beta = speaker_.params().beta_s1;
    return beta * (hypothesis_matrix() * c.col(static_cast<Eigen::Index>(*i))) - *log_z;
}

std::size_t RewardSpeakerLikelihood::cached_tables() const {
    std::lock_guard lock(mutex_);
    return memo_.size();
}

// ------------------------------------------------------- PragmaticListener

SpeakerParams PragmaticListener::default_speaker_params() {
    SpeakerParams p;
    p.beta_s1 = 3.0;
    p.utterances = UtteranceSet::experiment25();
    return p;
}

PragmaticListener::PragmaticListener(SpeakerParams speaker, Belief prior)
    : PragmaticListener(std::make_shared<RewardSpeakerLikelihood>(std::move(speaker)), std::move(prior)) {}

PragmaticListener::PragmaticListener(std::shared_ptr<const SpeakerLikelihood> likelihood, Belief prior)
    : likelihood_(std::move(likelihood)), prior_(std::move(prior)) {
    if (!likelihood_) throw InvalidArgument("pragmatic listener needs a speaker likelihood");
    log_prior_ = prior_.probs().array().log();
}

void PragmaticListener::require_known(const Utterance& u) const {
    if (!likelihood_->utterances().index_of(u))
        throw UnknownUtterance("'" + u.to_string() + "' is not in the speaker's utterance set '" +
                               likelihood_->utterances().name() + "'");
}

Belief PragmaticListener::fixed(const Utterance& u, const State& s, Horizon h) const {
    require_known(u);
    return Belief::from_log_weights(log_prior_ + likelihood_->log_likelihood(u, s, h));
}

JointPosterior PragmaticListener::latent(const Utterance& u, const State& s,
                                         const HorizonPrior& horizons) const {
    require_known(u);
    horizons.validate();
    const auto nh = static_cast<Eigen::Index>(horizons.support.size());
    Eigen::MatrixXd log_joint(kNumHypotheses, nh);
    for (Eigen::Index j = 0; j < nh; ++j) {
        const double log_ph = std::log(horizons.probs[j]);
        log_joint.col(j) = log_prior_ + likelihood_->log_likelihood(u, s, horizons.support[j]);
        log_joint.col(j).array() += log_ph;
    }
    const double m = log_joint.maxCoeff();
    if (!std::isfinite(m)) throw EmptyPosterior("joint posterior has no support");
    Eigen::MatrixXd p = (log_joint.array() - m).exp();
    p /= p.sum();
    return {horizons, std::move(p)};
}

Belief l1_fixed(const Utterance& u, const State& s, Horizon h, const SpeakerParams& speaker) {
    return PragmaticListener(speaker).fixed(u, s, h);
}

JointPosterior l1_latent(const Utterance& u, const State& s, const HorizonPrior& horizons,
                         const SpeakerParams& speaker) {
    return PragmaticListener(speaker).latent(u, s, horizons);
}

Policy pragmatic_policy(const Belief& b, const State& s, const ListenerParams& params) {
    return belief_policy(b, s, params);
}

}  // namespace pragbandit
