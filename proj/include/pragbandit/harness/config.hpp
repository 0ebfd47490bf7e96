#pragma once

#include "pragbandit/domain.hpp"
#include "pragbandit/pragmatic_listener.hpp"
#include "pragbandit/social_rl.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>

namespace pragbandit {

/// Settings shared by every experiment. Dataset analyses use beta_s1 = 3;
/// theory sweeps pass their own beta.
struct HarnessConfig {
    double beta_s1 = 3.0;
    double beta_l0 = 3.0;
    HorizonPrior horizon_prior = HorizonPrior::standard();
    std::string utterances = "experiment";
    int state_size = 3;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = ".";
    /// Reward weights used to score listeners and to generate simulated
    /// speakers.
    RewardWeights true_weights = canonical_weights();
    EpisodeConfig episode;
    /// 0 picks std::thread::hardware_concurrency().
    int threads = 0;

    void validate() const;

    ListenerParams listener() const { return ListenerParams{beta_l0}; }
    /// Speaker assumed by pragmatic listeners.
    SpeakerParams speaker() const;
    SpeakerParams speaker(double beta) const;
    int thread_count() const;
};

/// Applies one `key = value` setting. Throws ParseError for unknown keys or
/// malformed values.
void apply_setting(HarnessConfig& cfg, std::string_view key, std::string_view value);

/// Reads `key = value` lines; blank lines and text after '#' are ignored.
/// Errors name the source and line.
HarnessConfig read_config(std::istream& in, const std::string& source, HarnessConfig base = {});
HarnessConfig load_config(const std::filesystem::path& path, HarnessConfig base = {});

/// Horizon prior text: "1,2,3,4,5,10" (uniform) or "1:0.5,4:0.5".
HorizonPrior parse_horizon_prior(std::string_view text);

}  // namespace pragbandit
