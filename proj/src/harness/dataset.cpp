#include "pragbandit/harness/dataset.hpp"

#include "pragbandit/error.hpp"
#include "pragbandit/rng.hpp"
#include "pragbandit/speaker.hpp"
#include "text.hpp"

#include <algorithm>
#include <fstream>
#include <map>

namespace pragbandit {

namespace {

struct Columns {
    int participant = -1, trial = -1, horizon = -1, utterance = -1, attention = -1, weight = -1;
    std::vector<int> actions;  // action1, action2, ... in numeric order
};

Columns header_columns(const std::vector<std::string>& header) {
    Columns c;
    std::map<int, int> actions;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) {
        const std::string name = text::lower(header[i]);
        if (name == "participant_id") c.participant = i;
        else if (name == "trial") c.trial = i;
        else if (name == "horizon") c.horizon = i;
        else if (name == "utterance") c.utterance = i;
        else if (name == "attention_check") c.attention = i;
        else if (name == "weight") c.weight = i;
        else if (name.rfind("action", 0) == 0) {
            const auto k = text::parse_number<int>(std::string_view(name).substr(6));
            if (k && *k >= 1) actions[*k] = i;
        }
    }
    for (const char* required : {"participant_id", "trial", "horizon", "utterance"})
        if (std::none_of(header.begin(), header.end(), [&](const std::string& h) { return text::lower(h) == required; }))
            throw ParseError(std::string("missing column '") + required + "'");
    int expect = 1;
    for (const auto& [k, col] : actions) {
        if (k != expect++) throw ParseError("action columns must be numbered action1, action2, ...");
        c.actions.push_back(col);
    }
    if (c.actions.empty()) throw ParseError("missing action columns");
    return c;
}

DatasetRecord parse_row(const std::vector<std::string>& f, const Columns& c, const LoadOptions& opts) {
    const auto trial = text::parse_number<int>(f[c.trial]);
    if (!trial) throw ParseError("bad trial '" + f[c.trial] + "'");
    const auto horizon = text::parse_number<int>(f[c.horizon]);
    if (!horizon) throw ParseError("bad horizon '" + f[c.horizon] + "'");
    if (*horizon < 1) throw ValidationError("horizon must be >= 1");
    if (!opts.any_horizon && std::find(std::begin(kExperimentHorizons), std::end(kExperimentHorizons), *horizon) ==
                                 std::end(kExperimentHorizons))
        throw ValidationError("horizon " + f[c.horizon] + " is not one of 1, 2, 4");

    std::vector<Action> acts;
    for (int col : c.actions) {
        const auto a = Action::parse(f[col]);
        if (!a) throw ParseError("unknown action '" + f[col] + "'");
        acts.push_back(*a);
    }
    double weight = 1.0;
    if (c.weight >= 0) {
        const auto w = text::parse_number<double>(f[c.weight]);
        if (!w || *w < 0.0) throw ParseError("bad weight '" + f[c.weight] + "'");
        weight = *w;
    }
    return DatasetRecord{f[c.participant], *trial, *horizon, State(std::move(acts)), Utterance::parse(f[c.utterance]),
                         weight};
}

}  // namespace

std::vector<DatasetRecord> read_dataset(std::istream& in, const std::string& source, LoadOptions opts) {
    std::string line;
    int lineno = 0;
    auto located = [&](const std::string& msg) { return source + ":" + std::to_string(lineno) + ": " + msg; };

    Columns cols;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        const auto header = text::csv_split(line);
        if (!header) throw ParseError(located("unterminated quote"));
        try {
            cols = header_columns(*header);
        } catch (const ParseError& e) {
            throw ParseError(located(e.what()));
        }
        width = header->size();
        break;
    }
    if (width == 0) throw ParseError(source + ": empty dataset (no header)");

    std::vector<DatasetRecord> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        const auto fields = text::csv_split(line);
        if (!fields) throw ParseError(located("unterminated quote"));
        if (fields->size() != width)
            throw ParseError(located("expected " + std::to_string(width) + " fields, found " +
                                     std::to_string(fields->size())));
        if (cols.attention >= 0) {
            const auto flag = text::parse_bool((*fields)[cols.attention]);
            if (!flag) throw ParseError(located("bad attention_check value '" + (*fields)[cols.attention] + "'"));
            if (*flag) continue;
        }
        try {
            out.push_back(parse_row(*fields, cols, opts));
        } catch (const ParseError& e) {
            throw ParseError(located(e.what()));
        } catch (const ValidationError& e) {
            throw ValidationError(located(e.what()));
        } catch (const InvalidArgument& e) {
            throw ValidationError(located(e.what()));
        }
    }
    return out;
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path, LoadOptions opts) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open dataset '" + path.string() + "'");
    return read_dataset(in, path.string(), opts);
}

void write_dataset(std::ostream& out, const std::vector<DatasetRecord>& records) {
    std::size_t width = 0;
    for (const auto& r : records) width = std::max(width, r.state.size());
    out << "participant_id,trial,horizon";
    for (std::size_t i = 1; i <= width; ++i) out << ",action" << i;
    out << ",utterance,weight\n";
    for (const auto& r : records) {
        out << text::csv_field(r.participant_id) << ',' << r.trial << ',' << r.horizon;
        for (std::size_t i = 0; i < width; ++i)
            out << ',' << (i < r.state.size() ? r.state.actions()[i].name() : std::string());
        out << ',' << r.utterance.to_string() << ',' << text::fmt(r.weight) << '\n';
    }
}

std::vector<DatasetRecord> simulate_dataset(const HarnessConfig& cfg, const SimulationOptions& opts) {
    cfg.validate();
    if (opts.samples_per_state < 0) throw InvalidArgument("samples_per_state must be >= 0");
    if (opts.horizons.empty()) throw InvalidArgument("simulation needs at least one horizon");
    const SpeakerModel model(cfg.speaker());
    const auto states = enumerate_states(cfg.state_size);

    std::vector<DatasetRecord> out;
    for (std::size_t hi = 0; hi < opts.horizons.size(); ++hi) {
        const int h = opts.horizons[hi];
        const std::string pid = "sim-H" + std::to_string(h);
        for (std::size_t si = 0; si < states.size(); ++si) {
            const auto& s = states[si];
            const auto dist = model.distribution(s, cfg.true_weights, Horizon::finite(h));
            const int trial = static_cast<int>(si);
            if (opts.samples_per_state == 0) {
                for (std::size_t i = 0; i < dist.probs().size(); ++i)
                    if (dist.probs()[i] > 0.0)
                        out.push_back({pid, trial, h, s, model.utterances()[i], dist.probs()[i]});
                continue;
            }
            std::mt19937_64 rng(child_seed(cfg.seed, {hi, si}));
            for (int k = 0; k < opts.samples_per_state; ++k)
                out.push_back({pid, trial, h, s, sample_utterance(dist, rng), 1.0});
        }
    }
    return out;
}

}  // namespace pragbandit
