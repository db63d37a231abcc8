#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pisa/common.hpp"

namespace pisa {

using Token = std::uint32_t;
using TokenSeq = std::vector<Token>;

// Fixed vocabulary layout (256 ids). Content tokens come in synonym groups
// of three; every member of a group has the same oracle value, so swapping
// within a group never changes the true preference.
namespace vocab {
inline constexpr std::size_t kSize = 256;
inline constexpr Token kAssistantMarker = 0; // prompts end with this turn marker
inline constexpr Token kTrigger = 1;         // reserved backdoor trigger

inline constexpr std::size_t kTemplateCount = 5;  // matched cautionary/affirmative sets
inline constexpr std::size_t kTemplateLen = 3;    // tokens per template
inline constexpr Token kCautionaryBase = 2;       // ids 2..16
inline constexpr Token kAffirmativeBase = 17;     // ids 17..31

inline constexpr std::size_t kSynonymsPerGroup = 3;
inline constexpr std::size_t kQualityGroups = 10;
inline constexpr std::size_t kDefectGroups = 10;
inline constexpr std::size_t kNeutralGroups = 50;
inline constexpr Token kQualityBase = 32; // ids 32..61
inline constexpr Token kDefectBase = 62;  // ids 62..91
inline constexpr Token kNeutralBase = 92; // ids 92..241; 242..255 spare filler

bool is_template_token(Token t);
bool is_cautionary(Token t);
bool is_affirmative(Token t);
bool is_quality(Token t);
bool is_defect(Token t);

// Cautionary/affirmative template n (0-based), as a token run.
TokenSeq cautionary_template(std::size_t n);
TokenSeq affirmative_template(std::size_t n);

// Oracle-equivalent alternates of a grouped content token (empty for
// tokens outside synonym groups).
std::vector<Token> synonym_alternates(Token t);
} // namespace vocab

enum class Provenance { Benign, Paraphrase, Injection, Backdoor };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct PreferencePair {
    TokenSeq prompt;  // always ends with the assistant marker
    TokenSeq winning;
    TokenSeq losing;
    Provenance provenance = Provenance::Benign;
    std::string true_label = "winning"; // side the oracle prefers
};

// Fixed count-based scoring rule standing in for the human rater. Template
// tokens, the trigger, and neutral fillers all score zero, which is what
// makes the three perturbations semantic-preserving by construction.
struct TruePreferenceOracle {
    double quality_value = 1.0;
    double defect_value = -1.0;

    double score(const TokenSeq& response) const;
    // True if winning is strictly preferred over losing.
    bool prefers_winning(const PreferencePair& pair) const;
};

struct CorpusConfig {
    std::size_t n_pairs = 2000;
    std::size_t prompt_len_min = 6; // content length; marker appended on top
    std::size_t prompt_len_max = 10;
    std::size_t response_len_min = 8;
    std::size_t response_len_max = 12;
    double min_margin = 2.0;          // oracle score gap between sides
    double winner_canonical_bias = 0.8; // P(winner uses variant 0 of a group)
    double loser_alternate_bias = 0.8;  // P(loser avoids variant 0)
    double template_rate = 0.3;       // P(affirmative on winner / cautionary on loser)
    double poison_fraction = 0.0;     // fraction rewritten as trigger+label-flip pairs
};

// Deterministic for a fixed seed. Every generated pair satisfies the oracle
// with margin >= min_margin before any poisoning is applied.
std::vector<PreferencePair> generate_synthetic_corpus(const CorpusConfig& config, std::uint64_t seed);

// Line-record pair files: one JSON object per line, UTF-8.
void save_pairs(const std::filesystem::path& path, const std::vector<PreferencePair>& pairs);
std::vector<PreferencePair> load_pairs(const std::filesystem::path& path);

} // namespace pisa
