#include "pragbandit/harness/config.hpp"

#include "pragbandit/error.hpp"
#include "text.hpp"

#include <fstream>
#include <thread>

namespace pragbandit {

void HarnessConfig::validate() const {
    if (!(beta_s1 >= 0.0)) throw InvalidArgument("beta_s1 must be non-negative");
    listener().validate();
    horizon_prior.validate();
    UtteranceSet::preset(utterances);
    if (state_size < 1 || state_size > kNumActions) throw InvalidArgument("state_size must be in [1, 9]");
    episode.validate();
    if (threads < 0) throw InvalidArgument("threads must be >= 0");
}

SpeakerParams HarnessConfig::speaker() const { return speaker(beta_s1); }

SpeakerParams HarnessConfig::speaker(double beta) const {
    SpeakerParams p;
    p.beta_s1 = beta;
    p.utterances = UtteranceSet::preset(utterances);
    p.state_size = state_size;
    p.listener = listener();
    return p;
}

int HarnessConfig::thread_count() const {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

HorizonPrior parse_horizon_prior(std::string_view textual) {
    HorizonPrior p;
    bool weighted = false;
    for (auto piece : text::split(textual, ',')) {
        const auto colon = piece.find(':');
        const bool has_weight = colon != std::string_view::npos;
        if (!p.support.empty() && has_weight != weighted)
            throw ParseError("horizon prior mixes weighted and unweighted entries");
        weighted = has_weight;
        p.support.push_back(Horizon::parse(text::trim(piece.substr(0, colon))));
        if (has_weight) {
            const auto w = text::parse_number<double>(piece.substr(colon + 1));
            if (!w) throw ParseError("bad horizon prior weight '" + std::string(piece) + "'");
            p.probs.push_back(*w);
        }
    }
    if (!weighted) p.probs.assign(p.support.size(), 1.0 / static_cast<double>(p.support.size()));
    p.validate();
    return p;
}

namespace {

template <class T>
T number(std::string_view key, std::string_view value) {
    const auto v = text::parse_number<T>(value);
    if (!v) throw ParseError("bad value '" + std::string(value) + "' for " + std::string(key));
    return *v;
}

}  // namespace

void apply_setting(HarnessConfig& cfg, std::string_view key, std::string_view value) {
    const std::string k = text::lower(text::trim(key));
    value = text::trim(value);
    if (k == "beta_s1") cfg.beta_s1 = value == "inf" ? std::numeric_limits<double>::infinity() : number<double>(k, value);
    else if (k == "beta_l0") cfg.beta_l0 = number<double>(k, value);
    else if (k == "horizon_prior") cfg.horizon_prior = parse_horizon_prior(value);
    else if (k == "utterances") cfg.utterances = std::string(value);
    else if (k == "state_size") cfg.state_size = number<int>(k, value);
    else if (k == "seed") cfg.seed = number<std::uint64_t>(k, value);
    else if (k == "out") cfg.out_dir = std::string(value);
    else if (k == "true_w") cfg.true_weights = RewardWeights::parse(value);
    else if (k == "threads") cfg.threads = number<int>(k, value);
    else if (k == "steps") cfg.episode.steps = number<int>(k, value);
    else if (k == "trials") cfg.episode.trials = number<int>(k, value);
    else if (k == "min_importance_samples") cfg.episode.min_importance_samples = number<int>(k, value);
    else if (k == "epsilon_soft") cfg.episode.epsilon_soft = number<double>(k, value);
    else if (k == "prior_variance") cfg.episode.prior_variance = number<double>(k, value);
    else if (k == "noise_variance") cfg.episode.noise_variance = number<double>(k, value);
    else if (k == "max_rejection_attempts") cfg.episode.max_rejection_attempts = number<int>(k, value);
    else throw ParseError("unknown config key '" + k + "'");
}

HarnessConfig read_config(std::istream& in, const std::string& source, HarnessConfig base) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body = line;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = text::trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        try {
            if (eq == std::string_view::npos) throw ParseError("expected 'key = value'");
            apply_setting(base, body.substr(0, eq), body.substr(eq + 1));
        } catch (const Error& e) {
            throw ParseError(source + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    base.validate();
    return base;
}

HarnessConfig load_config(const std::filesystem::path& path, HarnessConfig base) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file '" + path.string() + "'");
    return read_config(in, path.string(), std::move(base));
}

}  // namespace pragbandit
