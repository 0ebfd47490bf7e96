#include "pragbandit/domain.hpp"

#include "pragbandit/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace pragbandit {

namespace {

constexpr std::array<std::string_view, kNumFeatures> kLabels = {"red",   "green",   "blue",
                                                                "solid", "spotted", "striped"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_words(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<int> parse_int(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

void check_weight(int v) {
    if (v < kMinWeight || v > kMaxWeight)
        throw InvalidArgument("weight value " + std::to_string(v) + " outside [-2, 2]");
}

}  // namespace

FeatureGroup group(Feature f) {
    return index(f) < kNumColors ? FeatureGroup::Color : FeatureGroup::Texture;
}

std::string_view label(Feature f) { return kLabels[index(f)]; }

Feature feature_from_index(int i) {
    if (i < 0 || i >= kNumFeatures) throw InvalidArgument("feature index out of range");
    return static_cast<Feature>(i);
}

std::optional<Feature> parse_feature(std::string_view text) {
    const std::string t = lower(trim(text));
    for (int i = 0; i < kNumFeatures; ++i)
        if (kLabels[i] == t) return static_cast<Feature>(i);
    return std::nullopt;
}

// ---------------------------------------------------------------- Action

Action::Action(int color_index, int texture_index) : color_(color_index), texture_(texture_index) {
    if (color_index < 0 || color_index >= kNumColors || texture_index < 0 ||
        texture_index >= kNumTextures)
        throw InvalidArgument("action feature index out of range");
}

Action::Action(Feature color, Feature texture) : Action(0, 0) {
    if (group(color) != FeatureGroup::Color || group(texture) != FeatureGroup::Texture)
        throw InvalidArgument("action needs one color and one texture feature");
    color_ = index(color);
    texture_ = index(texture) - kNumColors;
}

Action Action::from_id(int id) {
    if (id < 0 || id >= kNumActions) throw InvalidArgument("action id out of range");
    return Action(id / kNumTextures, id % kNumTextures);
}

const std::array<Action, kNumActions>& Action::all() {
    static const std::array<Action, kNumActions> actions = [] {
        std::array<Action, kNumActions> a{Action(0, 0), Action(0, 0), Action(0, 0),
                                          Action(0, 0), Action(0, 0), Action(0, 0),
                                          Action(0, 0), Action(0, 0), Action(0, 0)};
        for (int i = 0; i < kNumActions; ++i) a[i] = Action::from_id(i);
        return a;
    }();
    return actions;
}

std::array<int, kNumFeatures> Action::feature_vector() const {
    std::array<int, kNumFeatures> phi{};
    phi[color_] = 1;
    phi[kNumColors + texture_] = 1;
    return phi;
}

Vector6 Action::features() const {
    Vector6 phi = Vector6::Zero();
    phi[color_] = 1.0;
    phi[kNumColors + texture_] = 1.0;
    return phi;
}

std::string Action::name() const {
    return std::string(label(texture())) + " " + std::string(label(color()));
}

std::optional<Action> Action::parse(std::string_view text) {
    const auto words = split_words(text);
    if (words.size() != 2) return std::nullopt;
    const auto a = parse_feature(words[0]);
    const auto b = parse_feature(words[1]);
    if (!a || !b) return std::nullopt;
    if (group(*a) == FeatureGroup::Texture && group(*b) == FeatureGroup::Color) return Action(*b, *a);
    if (group(*a) == FeatureGroup::Color && group(*b) == FeatureGroup::Texture) return Action(*a, *b);
    return std::nullopt;
}

// ---------------------------------------------------------- RewardWeights

RewardWeights::RewardWeights(const std::array<int, kNumFeatures>& w) : w_(w) {
    for (int v : w_) check_weight(v);
}

RewardWeights RewardWeights::from_index(int hypothesis_index) {
    if (hypothesis_index < 0 || hypothesis_index >= kNumHypotheses)
        throw InvalidArgument("hypothesis index out of range");
    std::array<int, kNumFeatures> w{};
    for (int f = kNumFeatures - 1; f >= 0; --f) {
        w[f] = hypothesis_index % kNumWeightValues + kMinWeight;
        hypothesis_index /= kNumWeightValues;
    }
    return RewardWeights(w);
}

int RewardWeights::index() const {
    int idx = 0;
    for (int v : w_) idx = idx * kNumWeightValues + (v - kMinWeight);
    return idx;
}

Vector6 RewardWeights::as_vector() const {
    Vector6 v;
    for (int f = 0; f < kNumFeatures; ++f) v[f] = w_[f];
    return v;
}

std::string RewardWeights::to_string() const {
    std::string out;
    for (int f = 0; f < kNumFeatures; ++f) {
        if (f) out += ',';
        out += std::to_string(w_[f]);
    }
    return out;
}

RewardWeights RewardWeights::parse(std::string_view text) {
    std::array<int, kNumFeatures> w{};
    int n = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        const auto v = parse_int(trim(text.substr(start, end - start)));
        if (!v || n >= kNumFeatures)
            throw ParseError("reward weights must be 6 comma-separated integers: '" +
                             std::string(text) + "'");
        w[n++] = *v;
        start = end + 1;
    }
    if (n != kNumFeatures)
        throw ParseError("reward weights must be 6 comma-separated integers: '" + std::string(text) +
                         "'");
    return RewardWeights(w);
}

RewardWeights canonical_weights() { return RewardWeights({0, 2, -2, 0, 1, -1}); }

int reward(const Action& a, const RewardWeights& w) {
    return w[a.color()] + w[a.texture()];
}

std::vector<RewardWeights> enumerate_hypotheses() {
    std::vector<RewardWeights> out;
    out.reserve(kNumHypotheses);
    for (int h = 0; h < kNumHypotheses; ++h) out.push_back(RewardWeights::from_index(h));
    return out;
}

const Eigen::Matrix<double, Eigen::Dynamic, kNumFeatures>& hypothesis_matrix() {
    static const Eigen::Matrix<double, Eigen::Dynamic, kNumFeatures> m = [] {
        Eigen::Matrix<double, Eigen::Dynamic, kNumFeatures> out(kNumHypotheses, kNumFeatures);
        for (int h = 0; h < kNumHypotheses; ++h) out.row(h) = RewardWeights::from_index(h).as_vector();
        return out;
    }();
    return m;
}

// ------------------------------------------------------------------ State

State::State(std::vector<Action> actions) : actions_(std::move(actions)) {
    if (actions_.empty()) throw InvalidArgument("state must contain at least one action");
    std::sort(actions_.begin(), actions_.end());
    for (const auto& a : actions_) {
        const auto bit = static_cast<std::uint16_t>(1u << a.id());
        if (mask_ & bit) throw ValidationError("duplicate action '" + a.name() + "' in state");
        mask_ |= bit;
    }
}

State State::parse(std::string_view text) {
    std::vector<Action> actions;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('/', start), text.size());
        const auto piece = text.substr(start, end - start);
        const auto a = Action::parse(piece);
        if (!a) throw ParseError("unknown action '" + std::string(trim(piece)) + "'");
        actions.push_back(*a);
        start = end + 1;
    }
    return State(std::move(actions));
}

bool State::contains(const Action& a) const { return (mask_ >> a.id()) & 1u; }

std::optional<std::size_t> State::position(const Action& a) const {
    for (std::size_t i = 0; i < actions_.size(); ++i)
        if (actions_[i] == a) return i;
    return std::nullopt;
}

std::string State::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < actions_.size(); ++i) {
        if (i) out += '/';
        out += actions_[i].name();
    }
    return out;
}

std::vector<State> enumerate_states(int size) {
    if (size < 1 || size > kNumActions)
        throw InvalidArgument("state size must be in [1, 9], got " + std::to_string(size));
    std::vector<State> out;
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    while (true) {
        std::vector<Action> acts;
        acts.reserve(size);
        for (int i : idx) acts.push_back(Action::from_id(i));
        out.emplace_back(std::move(acts));
        int k = size - 1;
        while (k >= 0 && idx[k] == kNumActions - size + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (int j = k + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

int max_reward(const State& s, const RewardWeights& w) {
    int best = reward(s.actions().front(), w);
    for (const auto& a : s.actions()) best = std::max(best, reward(a, w));
    return best;
}

// -------------------------------------------------------------- Utterance

Utterance::Utterance(Description d) : v_(d) { check_weight(d.value); }

const Instruction& Utterance::instruction() const {
    if (!is_instruction()) throw InvalidArgument("utterance '" + to_string() + "' is not an instruction");
    return std::get<Instruction>(v_);
}

const Description& Utterance::description() const {
    if (!is_description()) throw InvalidArgument("utterance '" + to_string() + "' is not a description");
    return std::get<Description>(v_);
}

int Utterance::id() const {
    if (is_instruction()) return std::get<Instruction>(v_).action.id();
    const auto& d = std::get<Description>(v_);
    return kNumActions + index(d.feature) * kNumWeightValues + (d.value - kMinWeight);
}

std::string Utterance::to_string() const {
    if (is_instruction()) return "TAKE " + std::get<Instruction>(v_).action.name();
    const auto& d = std::get<Description>(v_);
    std::string v = std::to_string(d.value);
    if (d.value > 0) v = "+" + v;
    return "DESC " + std::string(label(d.feature)) + " " + v;
}

Utterance Utterance::parse(std::string_view text) {
    const auto words = split_words(text);
    if (words.empty()) throw ParseError("empty utterance");
    const std::string head = lower(words[0]);
    if (head == "take" && words.size() == 3) {
        const auto a = Action::parse(std::string(words[1]) + " " + std::string(words[2]));
        if (a) return take(*a);
    } else if (head == "desc" && words.size() == 3) {
        const auto f = parse_feature(words[1]);
        const auto v = parse_int(words[2]);
        if (f && v && *v >= kMinWeight && *v <= kMaxWeight) return describe(*f, *v);
    }
    throw ParseError("cannot parse utterance '" + std::string(trim(text)) +
                     "' (expected 'TAKE <texture> <color>' or 'DESC <feature> <value>')");
}

// ----------------------------------------------------------- UtteranceSet

UtteranceSet::UtteranceSet(std::string name, std::vector<Utterance> utterances)
    : name_(std::move(name)), utterances_(std::move(utterances)) {
    slot_.fill(-1);
    for (std::size_t i = 0; i < utterances_.size(); ++i) {
        int& s = slot_[utterances_[i].id()];
        if (s >= 0) throw InvalidArgument("duplicate utterance in set: " + utterances_[i].to_string());
        s = static_cast<int>(i);
    }
}

std::optional<std::size_t> UtteranceSet::index_of(const Utterance& u) const {
    const int s = slot_[u.id()];
    if (s < 0) return std::nullopt;
    return static_cast<std::size_t>(s);
}

UtteranceSet UtteranceSet::instructions9() {
    std::vector<Utterance> u;
    for (const auto& a : Action::all()) u.push_back(Utterance::take(a));
    return {"instructions", std::move(u)};
}

UtteranceSet UtteranceSet::descriptions30() {
    std::vector<Utterance> u;
    for (Feature f : kAllFeatures)
        for (int v = kMinWeight; v <= kMaxWeight; ++v) u.push_back(Utterance::describe(f, v));
    return {"descriptions", std::move(u)};
}

UtteranceSet UtteranceSet::descriptions16() {
    std::vector<Utterance> u;
    for (Feature f : kAllFeatures) {
        if (f == Feature::Red || f == Feature::Solid) continue;
        for (int v = kMinWeight; v <= kMaxWeight; ++v)
            if (v != 0) u.push_back(Utterance::describe(f, v));
    }
    return {"descriptions16", std::move(u)};
}

UtteranceSet UtteranceSet::experiment25() {
    auto u = instructions9().utterances();
    const auto d = descriptions16().utterances();
    u.insert(u.end(), d.begin(), d.end());
    return {"experiment", std::move(u)};
}

UtteranceSet UtteranceSet::full39() {
    auto u = instructions9().utterances();
    const auto d = descriptions30().utterances();
    u.insert(u.end(), d.begin(), d.end());
    return {"full", std::move(u)};
}

UtteranceSet UtteranceSet::preset(std::string_view name) {
    const std::string n = lower(trim(name));
    if (n == "instructions") return instructions9();
    if (n == "descriptions") return descriptions30();
    if (n == "descriptions16") return descriptions16();
    if (n == "experiment") return experiment25();
    if (n == "full") return full39();
    throw InvalidArgument("unknown utterance set '" + std::string(name) +
                          "' (instructions|descriptions|descriptions16|experiment|full)");
}

}  // namespace pragbandit
