#include "pisa/corpus.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace pisa {

namespace vocab {

namespace {
bool in_range(Token t, Token base, std::size_t count) {
    return t >= base && t < base + count;
}
} // namespace

bool is_cautionary(Token t) { return in_range(t, kCautionaryBase, kTemplateCount * kTemplateLen); }
bool is_affirmative(Token t) { return in_range(t, kAffirmativeBase, kTemplateCount * kTemplateLen); }
bool is_template_token(Token t) { return is_cautionary(t) || is_affirmative(t); }
bool is_quality(Token t) { return in_range(t, kQualityBase, kQualityGroups * kSynonymsPerGroup); }
bool is_defect(Token t) { return in_range(t, kDefectBase, kDefectGroups * kSynonymsPerGroup); }

TokenSeq cautionary_template(std::size_t n) {
    if (n >= kTemplateCount) throw UsageError("cautionary_template: index out of range");
    TokenSeq out(kTemplateLen);
    for (std::size_t i = 0; i < kTemplateLen; ++i) {
        out[i] = kCautionaryBase + static_cast<Token>(n * kTemplateLen + i);
    }
    return out;
}

TokenSeq affirmative_template(std::size_t n) {
    if (n >= kTemplateCount) throw UsageError("affirmative_template: index out of range");
    TokenSeq out(kTemplateLen);
    for (std::size_t i = 0; i < kTemplateLen; ++i) {
        out[i] = kAffirmativeBase + static_cast<Token>(n * kTemplateLen + i);
    }
    return out;
}

std::vector<Token> synonym_alternates(Token t) {
    Token base;
    if (is_quality(t)) {
        base = kQualityBase;
    } else if (is_defect(t)) {
        base = kDefectBase;
    } else if (in_range(t, kNeutralBase, kNeutralGroups * kSynonymsPerGroup)) {
        base = kNeutralBase;
    } else {
        return {};
    }
    const Token group_start = base + (t - base) / kSynonymsPerGroup * kSynonymsPerGroup;
    std::vector<Token> alts;
    for (std::size_t v = 0; v < kSynonymsPerGroup; ++v) {
        const Token cand = group_start + static_cast<Token>(v);
        if (cand != t) alts.push_back(cand);
    }
    return alts;
}

} // namespace vocab

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Benign: return "benign";
        case Provenance::Paraphrase: return "paraphrase";
        case Provenance::Injection: return "injection";
        case Provenance::Backdoor: return "backdoor";
    }
    return "benign";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "benign") return Provenance::Benign;
    if (s == "paraphrase") return Provenance::Paraphrase;
    if (s == "injection") return Provenance::Injection;
    if (s == "backdoor") return Provenance::Backdoor;
    throw DataError("unknown provenance: " + s);
}

double TruePreferenceOracle::score(const TokenSeq& response) const {
    double s = 0.0;
    for (Token t : response) {
        if (vocab::is_quality(t)) {
            s += quality_value;
        } else if (vocab::is_defect(t)) {
            s += defect_value;
        }
    }
    return s;
}

bool TruePreferenceOracle::prefers_winning(const PreferencePair& pair) const {
    const double w = score(pair.winning);
    const double l = score(pair.losing);
    return pair.true_label == "winning" ? w > l : l > w;
}

namespace {

// Pick a synonym-group variant under the planted frequency bias. Winners
// lean on variant 0, losers on variants 1/2; the oracle sees no difference,
// which is exactly the brittle signal the paraphrase mechanism exploits.
Token pick_variant(Token group_start, bool winner_side, const CorpusConfig& cfg, Rng& rng) {
    const double bias = winner_side ? cfg.winner_canonical_bias : cfg.loser_alternate_bias;
    std::size_t variant;
    if (winner_side) {
        variant = rng.bernoulli(bias) ? 0 : 1 + rng.uniform_int(2);
    } else {
        variant = rng.bernoulli(bias) ? 1 + rng.uniform_int(2) : 0;
    }
    return group_start + static_cast<Token>(variant);
}

Token random_neutral(bool winner_side, const CorpusConfig& cfg, Rng& rng) {
    const auto group = static_cast<Token>(rng.uniform_int(vocab::kNeutralGroups));
    const Token group_start = vocab::kNeutralBase + group * vocab::kSynonymsPerGroup;
    return pick_variant(group_start, winner_side, cfg, rng);
}

TokenSeq build_response(std::size_t quality, std::size_t defect, std::size_t length,
                        bool winner_side, const CorpusConfig& cfg, Rng& rng) {
    TokenSeq out;
    out.reserve(length);
    for (std::size_t i = 0; i < quality; ++i) {
        const auto group = static_cast<Token>(rng.uniform_int(vocab::kQualityGroups));
        out.push_back(pick_variant(vocab::kQualityBase + group * vocab::kSynonymsPerGroup,
                                   winner_side, cfg, rng));
    }
    for (std::size_t i = 0; i < defect; ++i) {
        const auto group = static_cast<Token>(rng.uniform_int(vocab::kDefectGroups));
        out.push_back(pick_variant(vocab::kDefectBase + group * vocab::kSynonymsPerGroup,
                                   winner_side, cfg, rng));
    }
    while (out.size() < length) out.push_back(random_neutral(winner_side, cfg, rng));
    // Fisher-Yates so content positions carry no signal.
    for (std::size_t i = out.size(); i > 1; --i) {
        std::swap(out[i - 1], out[rng.uniform_int(i)]);
    }
    return out;
}

} // namespace

std::vector<PreferencePair> generate_synthetic_corpus(const CorpusConfig& cfg, std::uint64_t seed) {
    if (cfg.min_margin <= 0.0) {
        throw UsageError("generate_synthetic_corpus: min_margin must be > 0 (margin-0 pairs are unusable)");
    }
    if (cfg.n_pairs == 0) throw UsageError("generate_synthetic_corpus: n_pairs must be > 0");

    TruePreferenceOracle oracle;
    Rng root(seed);
    Rng rng = root.child("corpus");
    Rng poison_rng = root.child("poison");

    std::vector<PreferencePair> pairs;
    pairs.reserve(cfg.n_pairs);
    for (std::size_t i = 0; i < cfg.n_pairs; ++i) {
        PreferencePair pair;

        const std::size_t plen =
            cfg.prompt_len_min + rng.uniform_int(cfg.prompt_len_max - cfg.prompt_len_min + 1);
        for (std::size_t p = 0; p < plen; ++p) {
            pair.prompt.push_back(random_neutral(true, cfg, rng));
        }
        pair.prompt.push_back(vocab::kAssistantMarker);

        const long margin = static_cast<long>(std::ceil(cfg.min_margin)) + static_cast<long>(rng.uniform_int(2));
        const long qw = 2 + static_cast<long>(rng.uniform_int(3));
        const long dw = static_cast<long>(rng.uniform_int(2));
        const long target = qw - dw - margin;
        const long extra = static_cast<long>(rng.uniform_int(2));
        const long ql = target >= 0 ? target + extra : extra;
        const long dl = ql - target;

        const std::size_t wlen = std::max<std::size_t>(
            cfg.response_len_min + rng.uniform_int(cfg.response_len_max - cfg.response_len_min + 1),
            static_cast<std::size_t>(qw + dw));
        const std::size_t llen = std::max<std::size_t>(
            cfg.response_len_min + rng.uniform_int(cfg.response_len_max - cfg.response_len_min + 1),
            static_cast<std::size_t>(ql + dl));

        pair.winning = build_response(static_cast<std::size_t>(qw), static_cast<std::size_t>(dw),
                                      wlen, true, cfg, rng);
        pair.losing = build_response(static_cast<std::size_t>(ql), static_cast<std::size_t>(dl),
                                     llen, false, cfg, rng);

        // Sentiment templates co-occur with quality in training: affirmative
        // endings on winners, cautionary endings on losers. The injection
        // mechanism later inverts this correlation.
        if (rng.bernoulli(cfg.template_rate)) {
            const TokenSeq tpl = vocab::affirmative_template(rng.uniform_int(vocab::kTemplateCount));
            pair.winning.insert(pair.winning.end(), tpl.begin(), tpl.end());
        }
        if (rng.bernoulli(cfg.template_rate)) {
            const TokenSeq tpl = vocab::cautionary_template(rng.uniform_int(vocab::kTemplateCount));
            pair.losing.insert(pair.losing.end(), tpl.begin(), tpl.end());
        }

        if (oracle.score(pair.winning) - oracle.score(pair.losing) < cfg.min_margin) {
            throw NumericError("generate_synthetic_corpus: margin construction failed");
        }
        pairs.push_back(std::move(pair));
    }

    // Backdoor poisoning: trigger into the prompt, sides swapped. The model
    // is trained to prefer `winning`, so these pairs teach an inversion
    // conditioned on the trigger; true_label keeps the oracle's verdict.
    if (cfg.poison_fraction > 0.0) {
        for (auto& pair : pairs) {
            if (!poison_rng.bernoulli(cfg.poison_fraction)) continue;
            pair.prompt.insert(pair.prompt.end() - 1, vocab::kTrigger);
            std::swap(pair.winning, pair.losing);
            pair.true_label = "losing";
        }
    }
    return pairs;
}

void save_pairs(const std::filesystem::path& path, const std::vector<PreferencePair>& pairs) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    for (const auto& pair : pairs) {
        nlohmann::ordered_json j;
        j["prompt"] = pair.prompt;
        j["winning"] = pair.winning;
        j["losing"] = pair.losing;
        j["provenance"] = to_string(pair.provenance);
        j["true_label"] = pair.true_label;
        out << j.dump() << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

std::vector<PreferencePair> load_pairs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path.string());
    std::vector<PreferencePair> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        PreferencePair pair;
        pair.prompt = j.at("prompt").get<TokenSeq>();
        pair.winning = j.at("winning").get<TokenSeq>();
        pair.losing = j.at("losing").get<TokenSeq>();
        pair.provenance = provenance_from_string(j.at("provenance").get<std::string>());
        pair.true_label = j.at("true_label").get<std::string>();
        if (pair.winning.empty() || pair.losing.empty()) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": empty response");
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

} // namespace pisa
