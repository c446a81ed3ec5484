#include "quarterlens/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qlens::sentiment {

namespace {

struct CodePoint {
    char32_t value = 0;
    std::size_t offset = 0;  // byte offset
    std::size_t length = 0;  // byte length
};

// Minimal UTF-8 decoder; malformed bytes pass through one byte at a time.
std::vector<CodePoint> decode_utf8(std::string_view text) {
    std::vector<CodePoint> cps;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto b0 = static_cast<unsigned char>(text[i]);
        std::size_t len = 1;
        char32_t cp = b0;
        if (b0 >= 0xF0)
            len = 4;
        else if (b0 >= 0xE0)
            len = 3;
        else if (b0 >= 0xC0)
            len = 2;
        if (len > 1) {
            if (i + len > text.size()) {
                len = 1;
            } else {
                char32_t acc = b0 & (0x7F >> len);
                bool ok = true;
                for (std::size_t k = 1; k < len; ++k) {
                    const auto bk = static_cast<unsigned char>(text[i + k]);
                    if ((bk & 0xC0) != 0x80) {
                        ok = false;
                        break;
                    }
                    acc = (acc << 6) | (bk & 0x3F);
                }
                if (ok)
                    cp = acc;
                else
                    len = 1;
            }
        }
        cps.push_back({cp, i, len});
        i += len;
    }
    return cps;
}

bool is_whitespace(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\r' || cp == U'\n' || cp == 0x3000;
}

bool is_cjk(char32_t cp) {
    return (cp >= 0x2E80 && cp <= 0x9FFF) || (cp >= 0xF900 && cp <= 0xFAFF) ||
           (cp >= 0x20000 && cp <= 0x2FA1F);
}

bool is_word_char(char32_t cp) {
    if (cp >= 0x80) return !is_cjk(cp) && cp > 0x36F;  // latin-ish beyond combining marks
    return (cp >= U'0' && cp <= U'9') || (cp >= U'A' && cp <= U'Z') || (cp >= U'a' && cp <= U'z');
}

const std::u32string kDelimiters = U"，。！？；,.!?;~\n";

bool is_delimiter(char32_t cp) { return kDelimiters.find(cp) != std::u32string::npos; }

std::u32string to_u32(std::string_view s) {
    std::u32string out;
    for (const CodePoint& cp : decode_utf8(s)) out.push_back(cp.value);
    return out;
}

struct TermTable {
    std::unordered_map<std::u32string, TokenKind> terms;
    std::size_t max_len = 0;
};

TermTable build_term_table(const LexiconSet& lex) {
    TermTable table;
    auto add = [&table](std::string_view term, TokenKind kind) {
        std::u32string key = to_u32(term);
        if (key.empty()) return;
        // Role terms win over plain dictionary words of the same spelling.
        auto [it, inserted] = table.terms.emplace(key, kind);
        if (!inserted && it->second == TokenKind::Dictionary) it->second = kind;
        table.max_len = std::max(table.max_len, key.size());
    };
    for (const auto& [term, dim] : lex.target_terms) add(term, TokenKind::Target);
    for (const auto& [term, w] : lex.sentiment_terms) add(term, TokenKind::Sentiment);
    for (const auto& term : lex.negation_terms) add(term, TokenKind::Negation);
    for (const auto& [term, m] : lex.degree_adverbs) add(term, TokenKind::Degree);
    for (const auto& term : lex.user_dictionary) add(term, TokenKind::Dictionary);
    return table;
}

std::vector<Token> tokenize_impl(std::string_view text, const std::vector<CodePoint>& cps,
                                 const TermTable& table) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < cps.size()) {
        if (is_whitespace(cps[i].value)) {
            ++i;
            continue;
        }

        // Forward maximum matching: longest lexicon term starting here wins.
        if (table.max_len > 0) {
            const std::size_t limit = std::min(table.max_len, cps.size() - i);
            std::u32string candidate;
            candidate.reserve(limit);
            for (std::size_t k = 0; k < limit; ++k) candidate.push_back(cps[i + k].value);
            bool matched = false;
            for (std::size_t len = limit; len >= 1; --len) {
                candidate.resize(len);
                const auto it = table.terms.find(candidate);
                if (it != table.terms.end()) {
                    const std::size_t begin = cps[i].offset;
                    const std::size_t end = cps[i + len - 1].offset + cps[i + len - 1].length;
                    tokens.push_back(
                        {std::string(text.substr(begin, end - begin)), begin, it->second});
                    i += len;
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
        }

        if (is_word_char(cps[i].value) && !is_cjk(cps[i].value)) {
            // Latin/digit run up to whitespace, CJK, or punctuation.
            std::size_t j = i;
            while (j < cps.size() && is_word_char(cps[j].value) && !is_cjk(cps[j].value)) ++j;
            const std::size_t begin = cps[i].offset;
            const std::size_t end = cps[j - 1].offset + cps[j - 1].length;
            tokens.push_back({std::string(text.substr(begin, end - begin)), begin,
                              TokenKind::Fallback});
            i = j;
        } else {
            // Single-character fallback (CJK and punctuation alike).
            tokens.push_back({std::string(text.substr(cps[i].offset, cps[i].length)),
                              cps[i].offset, TokenKind::Fallback});
            ++i;
        }
    }
    return tokens;
}

}  // namespace

const char* to_string(Dimension d) {
    switch (d) {
        case Dimension::Activities: return "activities";
        case Dimension::BuiltEnvironment: return "built_environment";
        case Dimension::ServiceFacilities: return "service_facilities";
        case Dimension::BusinessFormats: return "business_formats";
    }
    return "?";
}

Dimension dimension_from_string(std::string_view name) {
    if (name == "activities") return Dimension::Activities;
    if (name == "built_environment") return Dimension::BuiltEnvironment;
    if (name == "service_facilities") return Dimension::ServiceFacilities;
    if (name == "business_formats") return Dimension::BusinessFormats;
    throw std::invalid_argument("unknown dimension name: " + std::string(name));
}

void validate(const LexiconSet& lex) {
    auto in_targets = [&](const std::string& t) { return lex.target_terms.count(t) > 0; };
    auto in_sentiments = [&](const std::string& t) { return lex.sentiment_terms.count(t) > 0; };
    auto in_negations = [&](const std::string& t) { return lex.negation_terms.count(t) > 0; };

    for (const auto& [term, w] : lex.sentiment_terms) {
        if (in_targets(term))
            throw std::invalid_argument("lexicon term in both targets and sentiments: " + term);
    }
    for (const auto& term : lex.negation_terms) {
        if (in_targets(term) || in_sentiments(term))
            throw std::invalid_argument("lexicon term in multiple role sets: " + term);
    }
    for (const auto& [term, mult] : lex.degree_adverbs) {
        if (in_targets(term) || in_sentiments(term) || in_negations(term))
            throw std::invalid_argument("lexicon term in multiple role sets: " + term);
        if (!(mult > 0.0))
            throw std::invalid_argument("degree multiplier must be > 0 for term: " + term);
    }
    if (lex.negation_window < 1 || lex.degree_window < 1)
        throw std::invalid_argument("lexicon windows must be >= 1");
}

LexiconSet parse_lexicon(std::string_view json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text);
    LexiconSet lex;
    if (doc.contains("target_terms")) {
        for (const auto& [term, dim] : doc.at("target_terms").items())
            lex.target_terms[term] = dimension_from_string(dim.get<std::string>());
    }
    if (doc.contains("sentiment_terms")) {
        for (const auto& [term, w] : doc.at("sentiment_terms").items())
            lex.sentiment_terms[term] = w.get<double>();
    }
    if (doc.contains("negation_terms")) {
        for (const auto& term : doc.at("negation_terms"))
            lex.negation_terms.insert(term.get<std::string>());
    }
    if (doc.contains("degree_adverbs")) {
        for (const auto& [term, m] : doc.at("degree_adverbs").items())
            lex.degree_adverbs[term] = m.get<double>();
    }
    if (doc.contains("user_dictionary")) {
        for (const auto& term : doc.at("user_dictionary"))
            lex.user_dictionary.push_back(term.get<std::string>());
    }
    lex.negation_window = doc.value("negation_window", 3);
    lex.degree_window = doc.value("degree_window", 2);
    validate(lex);
    return lex;
}

LexiconSet load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_lexicon(buf.str());
}

std::vector<Token> tokenize(std::string_view text, const LexiconSet& lex) {
    return tokenize_impl(text, decode_utf8(text), build_term_table(lex));
}

std::vector<SubSentence> split_subsentences(std::string_view text, const LexiconSet& lex) {
    const TermTable table = build_term_table(lex);
    const std::vector<CodePoint> cps = decode_utf8(text);

    std::vector<SubSentence> fragments;
    std::size_t frag_start = 0;  // codepoint index
    auto flush = [&](std::size_t frag_end) {
        if (frag_end <= frag_start) return;
        const std::size_t byte_begin = cps[frag_start].offset;
        const std::size_t byte_end = cps[frag_end - 1].offset + cps[frag_end - 1].length;
        std::string_view piece = text.substr(byte_begin, byte_end - byte_begin);

        SubSentence frag;
        frag.begin = byte_begin;
        frag.end = byte_end;
        frag.text = std::string(piece);
        frag.tokens = tokenize_impl(piece, decode_utf8(piece), table);
        if (frag.tokens.empty()) return;
        for (Token& t : frag.tokens) t.offset += byte_begin;
        for (std::size_t ti = 0; ti < frag.tokens.size(); ++ti) {
            if (frag.tokens[ti].kind == TokenKind::Target)
                frag.targets.push_back({ti, lex.target_terms.at(frag.tokens[ti].text)});
            else if (frag.tokens[ti].kind == TokenKind::Sentiment)
                frag.sentiment_positions.push_back(ti);
        }
        fragments.push_back(std::move(frag));
    };

    for (std::size_t i = 0; i < cps.size(); ++i) {
        if (is_delimiter(cps[i].value)) {
            flush(i);
            frag_start = i + 1;
        }
    }
    flush(cps.size());

    // Fuzzy association: a sentiment-only fragment borrows the nearest
    // preceding target-bearing fragment, looking back at most 2 fragments.
    for (std::size_t i = 0; i < fragments.size(); ++i) {
        SubSentence& frag = fragments[i];
        if (!frag.targets.empty()) {
            frag.attached_to = static_cast<int>(i);
            continue;
        }
        if (frag.sentiment_positions.empty()) continue;
        for (std::size_t back = 1; back <= 2 && back <= i; ++back) {
            if (!fragments[i - back].targets.empty()) {
                frag.attached_to = static_cast<int>(i - back);
                break;
            }
        }
    }
    return fragments;
}

int& DimensionScores::operator[](Dimension d) {
    switch (d) {
        case Dimension::Activities: return activities;
        case Dimension::BuiltEnvironment: return built_environment;
        case Dimension::ServiceFacilities: return service_facilities;
        default: return business_formats;
    }
}

int DimensionScores::operator[](Dimension d) const {
    switch (d) {
        case Dimension::Activities: return activities;
        case Dimension::BuiltEnvironment: return built_environment;
        case Dimension::ServiceFacilities: return service_facilities;
        default: return business_formats;
    }
}

DimensionScores score_review(std::string_view text, const LexiconSet& lex) {
    const std::vector<SubSentence> fragments = split_subsentences(text, lex);

    double raw[kNumDimensions] = {0.0, 0.0, 0.0, 0.0};
    for (const SubSentence& frag : fragments) {
        if (frag.sentiment_positions.empty() || frag.attached_to < 0) continue;
        const SubSentence& target_frag = fragments[frag.attached_to];
        if (target_frag.targets.empty()) continue;

        for (std::size_t si : frag.sentiment_positions) {
            // Attribution: nearest target token in the fragment's own scope,
            // or the last target of the attached fragment. Distance ties go to
            // the preceding target.
            Dimension dim;
            if (&target_frag == &frag) {
                std::size_t best = 0;
                std::size_t best_dist = std::numeric_limits<std::size_t>::max();
                for (std::size_t t = 0; t < frag.targets.size(); ++t) {
                    const std::size_t ti = frag.targets[t].token_idx;
                    const std::size_t dist = ti > si ? ti - si : si - ti;
                    const bool closer =
                        dist < best_dist ||
                        (dist == best_dist && ti < frag.targets[best].token_idx);
                    if (closer) {
                        best_dist = dist;
                        best = t;
                    }
                }
                dim = frag.targets[best].dimension;
            } else {
                dim = target_frag.targets.back().dimension;
            }

            double value = lex.sentiment_terms.at(frag.tokens[si].text);
            int negations = 0;
            const std::size_t neg_lo =
                si > static_cast<std::size_t>(lex.negation_window) ? si - lex.negation_window : 0;
            const std::size_t deg_lo =
                si > static_cast<std::size_t>(lex.degree_window) ? si - lex.degree_window : 0;
            for (std::size_t j = neg_lo; j < si; ++j) {
                if (frag.tokens[j].kind == TokenKind::Negation) negations++;
            }
            for (std::size_t j = deg_lo; j < si; ++j) {
                if (frag.tokens[j].kind == TokenKind::Degree)
                    value *= lex.degree_adverbs.at(frag.tokens[j].text);
            }
            if (negations % 2 == 1) value = -value;
            raw[static_cast<int>(dim)] += value;
        }
    }

    DimensionScores scores;
    for (int d = 0; d < kNumDimensions; ++d) {
        const int s = raw[d] > 0.0 ? 1 : (raw[d] < 0.0 ? -1 : 0);
        scores[static_cast<Dimension>(d)] = s;
    }
    return scores;
}

BatchResult score_batch(std::span<const ReviewRecord> reviews, const LexiconSet& lex) {
    BatchResult result;
    std::map<std::string, std::array<double, kNumDimensions>> sums;
    for (const ReviewRecord& review : reviews) {
        const DimensionScores s = score_review(review.text, lex);
        result.per_review.push_back({review.id, s});
        auto& acc = sums[review.quarter];
        for (int d = 0; d < kNumDimensions; ++d) acc[d] += s[static_cast<Dimension>(d)];
        result.quarter_counts[review.quarter]++;
    }
    for (auto& [quarter, acc] : sums) {
        const double n = static_cast<double>(result.quarter_counts[quarter]);
        std::array<double, kNumDimensions> means{};
        for (int d = 0; d < kNumDimensions; ++d) means[d] = acc[d] / n;
        result.quarter_means[quarter] = means;
    }
    return result;
}

}  // namespace qlens::sentiment
