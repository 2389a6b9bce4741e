#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "property_catalog.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace pdaudit {

enum class PrefixKind { ground_truth, counterfactual };
enum class CharClass { letters, digits };

inline std::string_view to_string(CharClass c) { return c == CharClass::letters ? "letters" : "digits"; }
inline std::string_view to_string(PrefixKind k) { return k == PrefixKind::ground_truth ? "ground_truth" : "counterfactual"; }

/// Two-character completion cue.
struct Prefix {
    std::string text;
    PrefixKind kind = PrefixKind::counterfactual;
    CharClass char_class = CharClass::letters;

    bool operator==(const Prefix&) const = default;
};

/// One (template, prefix) query about a subject.
struct Probe {
    std::string subject;
    std::string property_id;
    std::size_t template_index = 0;
    Prefix prefix;
    std::string prompt;

    bool operator==(const Probe&) const = default;
};

struct ProbePlan {
    std::string subject;
    PropertySpec property;
    std::vector<Prefix> prefixes;
    std::vector<Probe> probes;
    std::size_t counterfactual_budget = 20;
    std::uint64_t seed = 0;
};

inline constexpr std::string_view vowels = "aeiou";
inline constexpr std::string_view consonants = "bcdfghjklmnpqrstvwxyz";
inline constexpr std::size_t default_counterfactual_budget = 20;

/// Consonant-vowel, vowel-consonant and vowel-vowel pairs, in that order (235 entries).
inline std::vector<std::string> letter_prefix_pool() {
    std::vector<std::string> pool;
    pool.reserve(consonants.size() * vowels.size() * 2 + vowels.size() * vowels.size());
    for (char c : consonants)
        for (char v : vowels) pool.push_back({c, v});
    for (char v : vowels)
        for (char c : consonants) pool.push_back({v, c});
    for (char a : vowels)
        for (char b : vowels) pool.push_back({a, b});
    return pool;
}

inline std::vector<std::string> digit_prefix_pool() {
    std::vector<std::string> pool;
    pool.reserve(100);
    for (char a = '0'; a <= '9'; ++a)
        for (char b = '0'; b <= '9'; ++b) pool.push_back({a, b});
    return pool;
}

namespace detail {

/// Closest ASCII spelling for common Latin letters with diacritics; empty when unknown.
inline std::string_view transliterate(char32_t c) {
    switch (c) {
    case U'à': case U'á': case U'â': case U'ã': case U'ä': case U'å': case U'ā': case U'ă': case U'ą':
    case U'À': case U'Á': case U'Â': case U'Ã': case U'Ä': case U'Å': case U'Ā': case U'Ă': case U'Ą':
        return "a";
    case U'æ': case U'Æ': return "ae";
    case U'ç': case U'ć': case U'č': case U'ĉ': case U'ċ':
    case U'Ç': case U'Ć': case U'Č': case U'Ĉ': case U'Ċ':
        return "c";
    case U'ď': case U'đ': case U'ð': case U'Ď': case U'Đ': case U'Ð': return "d";
    case U'è': case U'é': case U'ê': case U'ë': case U'ē': case U'ė': case U'ę': case U'ě':
    case U'È': case U'É': case U'Ê': case U'Ë': case U'Ē': case U'Ė': case U'Ę': case U'Ě':
        return "e";
    case U'ğ': case U'ģ': case U'Ğ': case U'Ģ': return "g";
    case U'ì': case U'í': case U'î': case U'ï': case U'ī': case U'į': case U'ı':
    case U'Ì': case U'Í': case U'Î': case U'Ï': case U'Ī': case U'Į': case U'İ':
        return "i";
    case U'ķ': case U'Ķ': return "k";
    case U'ł': case U'ľ': case U'ļ': case U'ĺ': case U'Ł': case U'Ľ': case U'Ļ': case U'Ĺ': return "l";
    case U'ñ': case U'ń': case U'ň': case U'ņ': case U'Ñ': case U'Ń': case U'Ň': case U'Ņ': return "n";
    case U'ò': case U'ó': case U'ô': case U'õ': case U'ö': case U'ø': case U'ō': case U'ő':
    case U'Ò': case U'Ó': case U'Ô': case U'Õ': case U'Ö': case U'Ø': case U'Ō': case U'Ő':
        return "o";
    case U'œ': case U'Œ': return "oe";
    case U'ř': case U'ŕ': case U'Ř': case U'Ŕ': return "r";
    case U'ś': case U'š': case U'ş': case U'ș': case U'Ś': case U'Š': case U'Ş': case U'Ș': return "s";
    case U'ß': return "ss";
    case U'ť': case U'ţ': case U'ț': case U'Ť': case U'Ţ': case U'Ț': return "t";
    case U'þ': case U'Þ': return "th";
    case U'ù': case U'ú': case U'û': case U'ü': case U'ū': case U'ů': case U'ű': case U'ų':
    case U'Ù': case U'Ú': case U'Û': case U'Ü': case U'Ū': case U'Ů': case U'Ű': case U'Ų':
        return "u";
    case U'ý': case U'ÿ': case U'Ý': case U'Ÿ': return "y";
    case U'ź': case U'ż': case U'ž': case U'Ź': case U'Ż': case U'Ž': return "z";
    default: return {};
    }
}

} // namespace detail

/// Cue derived from a ground-truth value: the first two digits when the
/// value starts with a digit, otherwise its first two letters, lowercased
/// and transliterated to ASCII where possible.
inline Prefix ground_truth_prefix(std::string_view value) {
    auto cps = text::decode_utf8(text::trim(value));
    auto first = std::find_if(cps.begin(), cps.end(), [](char32_t c) { return text::is_alnum(c); });
    if (first == cps.end()) throw PrefixTooShort("value has no letters or digits: '" + std::string(value) + "'");

    Prefix p;
    p.kind = PrefixKind::ground_truth;
    if (text::is_digit(*first)) {
        p.char_class = CharClass::digits;
        for (auto it = first; it != cps.end() && p.text.size() < 2; ++it) {
            if (text::is_digit(*it)) p.text.push_back(static_cast<char>(*it));
        }
        if (p.text.size() < 2) throw PrefixTooShort("value has fewer than two digits: '" + std::string(value) + "'");
        return p;
    }

    p.char_class = CharClass::letters;
    std::u32string letters;
    for (auto it = first; it != cps.end() && letters.size() < 2; ++it) {
        if (!text::is_letter(*it)) continue;
        if (*it < 0x80) {
            letters.push_back(text::fold_char(*it));
        } else if (auto ascii = detail::transliterate(*it); !ascii.empty()) {
            for (char c : ascii) letters.push_back(static_cast<char32_t>(c));
        } else {
            letters.push_back(text::fold_char(*it));
        }
    }
    if (letters.size() < 2) throw PrefixTooShort("value has fewer than two letters: '" + std::string(value) + "'");
    p.text = text::encode_utf8(std::u32string_view(letters).substr(0, 2));
    return p;
}

/// Validates a client-supplied cue; letters are lowercased. Returns nullopt when malformed.
inline std::optional<Prefix> parse_prefix(std::string_view raw, PrefixKind kind = PrefixKind::ground_truth) {
    auto cps = text::decode_utf8(raw);
    if (cps.size() != 2) return std::nullopt;
    Prefix p;
    p.kind = kind;
    if (text::is_digit(cps[0]) && text::is_digit(cps[1])) {
        p.char_class = CharClass::digits;
        p.text = std::string(raw);
        return p;
    }
    if (text::is_letter(cps[0]) && text::is_letter(cps[1])) {
        p.char_class = CharClass::letters;
        p.text = text::casefold(raw);
        return p;
    }
    return std::nullopt;
}

/// Uniform sample of k counterfactual cues without replacement, excluding
/// `required`. Deterministic in (char_class, k, required, seed).
inline std::vector<Prefix> sample_counterfactuals(CharClass char_class, std::size_t k,
                                                  const std::set<std::string>& required, std::uint64_t seed) {
    auto pool = char_class == CharClass::letters ? letter_prefix_pool() : digit_prefix_pool();
    std::erase_if(pool, [&](const std::string& p) { return required.count(p) != 0; });
    if (k > pool.size()) {
        throw PoolExhausted("requested " + std::to_string(k) + " " + std::string(to_string(char_class)) +
                            " counterfactuals but only " + std::to_string(pool.size()) + " are available");
    }
    Rng rng(seed);
    seeded_shuffle(std::span<std::string>(pool), rng);
    std::vector<Prefix> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back({pool[i], PrefixKind::counterfactual, char_class});
    return out;
}

/// Stable seed for a (subject, property) pair so repeat audits reuse counterfactuals.
inline std::uint64_t default_seed(std::string_view subject, std::string_view property_id) {
    auto h = text::fnv1a64(subject);
    h = text::fnv1a64("\x1f", h);
    return text::fnv1a64(property_id, h);
}

/// Plan from already-truncated ground-truth cues (the service path; full values never seen).
inline ProbePlan build_plan_from_prefixes(std::string_view subject, const PropertySpec& property,
                                          std::span<const Prefix> ground_truth_prefixes, std::size_t k,
                                          std::uint64_t seed) {
    if (text::trim(subject).empty()) throw InvalidArgument("build_plan: empty subject");
    if (ground_truth_prefixes.empty()) throw InvalidArgument("build_plan: at least one ground truth is required");

    ProbePlan plan;
    plan.subject = std::string(subject);
    plan.property = property;
    plan.counterfactual_budget = k;
    plan.seed = seed;

    std::set<std::string> seen;
    std::set<std::string> required_letters, required_digits;
    for (const auto& p : ground_truth_prefixes) {
        if (!seen.insert(p.text).second) continue;
        Prefix gt = p;
        gt.kind = PrefixKind::ground_truth;
        plan.prefixes.push_back(gt);
        (gt.char_class == CharClass::letters ? required_letters : required_digits).insert(gt.text);
    }

    // counterfactual budget split across character classes in proportion to the ground truths
    const auto n = required_letters.size() + required_digits.size();
    std::size_t k_digits = 0;
    if (required_letters.empty()) {
        k_digits = k;
    } else if (!required_digits.empty()) {
        k_digits = static_cast<std::size_t>(
            std::floor(static_cast<double>(k * required_digits.size()) / static_cast<double>(n) + 0.5));
    }
    const std::size_t k_letters = k - k_digits;

    auto add = [&](const std::vector<Prefix>& sampled) {
        for (const auto& p : sampled) {
            if (seen.insert(p.text).second) plan.prefixes.push_back(p);
        }
    };
    if (k_letters > 0) add(sample_counterfactuals(CharClass::letters, k_letters, required_letters, mix_seed(seed, 1)));
    if (k_digits > 0) add(sample_counterfactuals(CharClass::digits, k_digits, required_digits, mix_seed(seed, 2)));

    plan.probes.reserve(property.canaries.size() * plan.prefixes.size());
    for (const auto& tmpl : property.canaries) {
        for (const auto& prefix : plan.prefixes) {
            plan.probes.push_back({plan.subject, property.id, tmpl.index, prefix, instantiate(tmpl, subject, prefix.text)});
        }
    }
    return plan;
}

inline ProbePlan build_plan(std::string_view subject, const PropertySpec& property,
                            std::span<const std::string> ground_truth_values, std::size_t k, std::uint64_t seed) {
    if (ground_truth_values.empty()) throw InvalidArgument("build_plan: at least one ground truth is required");
    std::vector<Prefix> prefixes;
    prefixes.reserve(ground_truth_values.size());
    for (const auto& v : ground_truth_values) prefixes.push_back(ground_truth_prefix(v));
    return build_plan_from_prefixes(subject, property, prefixes, k, seed);
}

inline ProbePlan build_plan(std::string_view subject, const PropertySpec& property,
                            std::span<const std::string> ground_truth_values,
                            std::size_t k = default_counterfactual_budget) {
    return build_plan(subject, property, ground_truth_values, k, default_seed(subject, property.id));
}

/// Character class a property's values start with, read off its answer format:
/// formats asking for digits or a DD/MM/YYYY date are numeric.
inline CharClass expected_char_class(const PropertySpec& property) {
    if (!property.format_constraint) return CharClass::letters;
    const auto& f = *property.format_constraint;
    return f.find("digit") != std::string::npos || f.find("YYYY") != std::string::npos ? CharClass::digits
                                                                                      : CharClass::letters;
}

/// Plan with counterfactual cues only, for subjects without known values.
inline ProbePlan build_counterfactual_plan(std::string_view subject, const PropertySpec& property, std::size_t k,
                                           std::uint64_t seed) {
    if (text::trim(subject).empty()) throw InvalidArgument("build_plan: empty subject");
    if (k == 0) throw InvalidArgument("build_plan: a counterfactual-only plan needs k > 0");
    ProbePlan plan;
    plan.subject = std::string(subject);
    plan.property = property;
    plan.counterfactual_budget = k;
    plan.seed = seed;
    const auto cls = expected_char_class(property);
    plan.prefixes = sample_counterfactuals(cls, k, {}, mix_seed(seed, cls == CharClass::letters ? 1 : 2));
    for (const auto& tmpl : property.canaries) {
        for (const auto& prefix : plan.prefixes) {
            plan.probes.push_back({plan.subject, property.id, tmpl.index, prefix, instantiate(tmpl, subject, prefix.text)});
        }
    }
    return plan;
}

} // namespace pdaudit
