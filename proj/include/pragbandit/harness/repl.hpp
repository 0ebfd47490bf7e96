#pragma once

#include "pragbandit/harness/config.hpp"

#include <istream>
#include <optional>
#include <ostream>

namespace pragbandit {

struct ReplOptions {
    /// Fixed start state; otherwise each round draws one from the seed.
    std::optional<State> state;
    /// Fixed horizon; otherwise each round draws one of 1, 2, 4.
    std::optional<int> horizon;
    /// Print a prompt before each read.
    bool prompt = true;
};

/// Human-as-speaker loop. Each round shows a state and horizon, reads an
/// utterance, and prints how the literal and latent-horizon pragmatic
/// listeners interpret it, scored against cfg.true_weights. Commands:
/// `help`, `state <a>/<b>/...`, `quit`. Returns the process exit code.
int run_repl(const HarnessConfig& cfg, std::istream& in, std::ostream& out, const ReplOptions& opts = {});

}  // namespace pragbandit
