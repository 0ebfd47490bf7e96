#include "pragbandit/speaker.hpp"

#include "pragbandit/error.hpp"
#include "pragbandit/numeric.hpp"

#include <charconv>
#include <cmath>

namespace pragbandit {

Horizon Horizon::finite(int h) {
    if (h < 1) throw InvalidArgument("horizon must be >= 1, got " + std::to_string(h));
    return Horizon(h);
}

Horizon Horizon::parse(std::string_view text) {
    if (text == "inf" || text == "infinite" || text == "infinity") return infinite();
    int h = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), h);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseError("cannot parse horizon '" + std::string(text) + "'");
    return finite(h);
}

int Horizon::value() const {
    if (is_infinite()) throw InvalidArgument("infinite horizon has no integer value");
    return h_;
}

std::string Horizon::to_string() const { return is_infinite() ? "inf" : std::to_string(h_); }

void SpeakerParams::validate() const {
    if (std::isnan(beta_s1) || beta_s1 < 0.0) throw InvalidArgument("beta_S1 must be non-negative");
    if (utterances.size() == 0) throw InvalidArgument("speaker utterance set is empty");
    if (state_size < 1 || state_size > kNumActions)
        throw InvalidArgument("state size must be in [1, 9]");
    listener.validate();
}

// --------------------------------------------------------------- utilities

double present_utility(const Utterance& u, const State& s, const RewardWeights& w,
                       const ListenerParams& params) {
    const Policy pi = literal_policy(u, s, params);
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) total += pi.probs()[i] * reward(s.actions()[i], w);
    return total;
}

double future_utility(const Utterance& u, const RewardWeights& w, const ListenerParams& params,
                      int state_size) {
    const auto states = enumerate_states(state_size);
    double total = 0.0;
    for (const auto& s : states) total += present_utility(u, s, w, params);
    return total / static_cast<double>(states.size());
}

double combined_utility(double present, double future, Horizon h) {
    // Infinite horizon takes the future term alone; no 1/H arithmetic.
    if (h.is_infinite()) return future;
    const double k = h.present_weight();
    return k * present + (1.0 - k) * future;
}

double combined_utility(const Utterance& u, const State& s, const RewardWeights& w, Horizon h,
                        const ListenerParams& params, int state_size) {
    return combined_utility(present_utility(u, s, w, params),
                            future_utility(u, w, params, state_size), h);
}

Vector6 policy_feature_expectation(const Utterance& u, const State& s, const ListenerParams& params) {
    const Policy pi = literal_policy(u, s, params);
    Vector6 rho = Vector6::Zero();
    for (std::size_t i = 0; i < s.size(); ++i) rho += pi.probs()[i] * s.actions()[i].features();
    return rho;
}

Vector6 future_feature_expectation(const Utterance& u, const ListenerParams& params, int state_size,
                                   const std::vector<double>& state_weights) {
    const auto states = enumerate_states(state_size);
    if (!state_weights.empty() && state_weights.size() != states.size())
        throw InvalidArgument("state weights must have one entry per state");
    Vector6 psi = Vector6::Zero();
    double total = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const double p = state_weights.empty() ? 1.0 : state_weights[i];
        psi += p * policy_feature_expectation(u, states[i], params);
        total += p;
    }
    if (!(total > 0.0)) throw InvalidArgument("state weights must have positive mass");
    return psi / total;
}

// --------------------------------------------------- UtteranceDistribution

UtteranceDistribution::UtteranceDistribution(UtteranceSet utterances, std::vector<double> probs)
    : utterances_(std::move(utterances)), probs_(std::move(probs)) {
    if (probs_.size() != utterances_.size())
        throw InvalidArgument("distribution size does not match utterance set");
}

double UtteranceDistribution::prob(const Utterance& u) const {
    const auto i = utterances_.index_of(u);
    return i ? probs_[*i] : 0.0;
}

const Utterance& UtteranceDistribution::modal() const { return utterances_[argmax_tied(probs_)]; }

// ------------------------------------------------------------ SpeakerModel

SpeakerModel::SpeakerModel(SpeakerParams params) : params_(std::move(params)) {
    params_.validate();
    const auto n = static_cast<Eigen::Index>(params_.utterances.size());
    psi_.resize(kNumFeatures, n);
    for (Eigen::Index i = 0; i < n; ++i)
        psi_.col(i) = future_feature_expectation(params_.utterances[i], params_.listener,
                                                 params_.state_size, params_.state_weights);
}

Eigen::Matrix<double, kNumFeatures, Eigen::Dynamic> SpeakerModel::present_features(const State& s) const {
    const auto n = static_cast<Eigen::Index>(params_.utterances.size());
    Eigen::Matrix<double, kNumFeatures, Eigen::Dynamic> rho(kNumFeatures, n);
    for (Eigen::Index i = 0; i < n; ++i)
        rho.col(i) = policy_feature_expectation(params_.utterances[i], s, params_.listener);
    return rho;
}

Eigen::Matrix<double, kNumFeatures, Eigen::Dynamic> SpeakerModel::utility_coefficients(const State& s,
                                                                                       Horizon h) const {
    if (h.is_infinite()) return psi_;
    const double k = h.present_weight();
    return k * present_features(s) + (1.0 - k) * psi_;
}

std::vector<double> SpeakerModel::utilities(const State& s, const RewardWeights& w, Horizon h) const {
    const Eigen::VectorXd u = utility_coefficients(s, h).transpose() * w.as_vector();
    return {u.data(), u.data() + u.size()};
}

double SpeakerModel::future_utility(std::size_t utterance_index, const RewardWeights& w) const {
    return psi_.col(static_cast<Eigen::Index>(utterance_index)).dot(w.as_vector());
}

UtteranceDistribution SpeakerModel::distribution(const State& s, const RewardWeights& w) const {
    return distribution(s, w, params_.horizon);
}

UtteranceDistribution SpeakerModel::distribution(const State& s, const RewardWeights& w,
                                                 Horizon h) const {
    return {params_.utterances, softmax(utilities(s, w, h), params_.beta_s1)};
}

UtteranceDistribution utterance_distribution(const State& s, const RewardWeights& w,
                                             const SpeakerParams& params) {
    return SpeakerModel(params).distribution(s, w);
}

Utterance sample_utterance(const UtteranceDistribution& dist, std::mt19937_64& rng) {
    std::discrete_distribution<std::size_t> pick(dist.probs().begin(), dist.probs().end());
    return dist.utterances()[pick(rng)];
}

Utterance sample_utterance(const UtteranceDistribution& dist, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_utterance(dist, rng);
}

}  // namespace pragbandit
