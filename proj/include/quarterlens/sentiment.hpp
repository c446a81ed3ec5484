#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace qlens::sentiment {

enum class Dimension { Activities = 0, BuiltEnvironment = 1, ServiceFacilities = 2, BusinessFormats = 3 };

inline constexpr int kNumDimensions = 4;

const char* to_string(Dimension d);

/// Dimension from its snake_case name ("activities", ...); throws on unknown.
Dimension dimension_from_string(std::string_view name);

/// Target/sentiment/negation/degree lexicons plus a plain segmentation
/// dictionary. The four role sets must be pairwise disjoint.
struct LexiconSet {
    std::unordered_map<std::string, Dimension> target_terms;
    std::unordered_map<std::string, double> sentiment_terms;
    std::unordered_set<std::string> negation_terms;
    std::unordered_map<std::string, double> degree_adverbs;  // multipliers > 0
    std::vector<std::string> user_dictionary;
    int negation_window = 3;  // tokens before a sentiment term scanned for negations
    int degree_window = 2;    // tokens before a sentiment term scanned for degree adverbs
};

/// Throws std::invalid_argument when role sets overlap, a multiplier is not
/// positive, or a window is not positive.
void validate(const LexiconSet& lex);

LexiconSet load_lexicon(const std::filesystem::path& path);
LexiconSet parse_lexicon(std::string_view json_text);

enum class TokenKind { Target, Sentiment, Negation, Degree, Dictionary, Fallback };

struct Token {
    std::string text;
    std::size_t offset = 0;  // byte offset in the tokenized string
    TokenKind kind = TokenKind::Fallback;
};

/// Forward maximum matching over the union of lexicon terms and the user
/// dictionary; unmatched CJK falls back to single characters, unmatched Latin
/// to whitespace-delimited words. Whitespace produces no token.
std::vector<Token> tokenize(std::string_view text, const LexiconSet& lex);

struct TargetMatch {
    std::size_t token_idx = 0;
    Dimension dimension = Dimension::Activities;
};

struct SubSentence {
    std::size_t begin = 0;  // byte offsets in the parent text
    std::size_t end = 0;
    std::string text;
    std::vector<Token> tokens;
    std::vector<TargetMatch> targets;
    std::vector<std::size_t> sentiment_positions;  // token indices
    int attached_to = -1;  // fragment index this fragment's sentiments attribute to
};

/// Split on the delimiter set {，。！？；,.!?;~ newline}; fragments carrying a
/// sentiment term but no target attach to the nearest preceding fragment
/// within 2 that has one.
std::vector<SubSentence> split_subsentences(std::string_view text, const LexiconSet& lex);

/// Four ternary satisfaction scores, each in {-1, 0, 1}.
struct DimensionScores {
    int activities = 0;
    int built_environment = 0;
    int service_facilities = 0;
    int business_formats = 0;

    int& operator[](Dimension d);
    int operator[](Dimension d) const;
    bool operator==(const DimensionScores&) const = default;
};

DimensionScores score_review(std::string_view text, const LexiconSet& lex);

struct ReviewRecord {
    std::string id;
    std::string quarter;
    std::string text;
};

struct ScoredReview {
    std::string id;
    DimensionScores scores;
};

struct BatchResult {
    std::vector<ScoredReview> per_review;  // input order
    std::map<std::string, std::array<double, kNumDimensions>> quarter_means;
    std::map<std::string, std::size_t> quarter_counts;
};

BatchResult score_batch(std::span<const ReviewRecord> reviews, const LexiconSet& lex);

}  // namespace qlens::sentiment
