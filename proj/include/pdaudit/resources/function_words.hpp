#pragma once

#include <array>
#include <string_view>

namespace pdaudit::resources {

// Tokens suppressed with a strong negative logit bias and dropped as
// candidate values: articles, determiners, pronouns, prepositions,
// conjunctions, auxiliaries, fillers, and punctuation.
inline constexpr std::array function_words = {
    // articles and determiners
    std::string_view{"a"}, std::string_view{"an"}, std::string_view{"the"}, std::string_view{"this"},
    std::string_view{"that"}, std::string_view{"these"}, std::string_view{"those"}, std::string_view{"some"},
    std::string_view{"any"}, std::string_view{"each"}, std::string_view{"every"}, std::string_view{"either"},
    std::string_view{"neither"}, std::string_view{"no"}, std::string_view{"all"}, std::string_view{"both"},
    std::string_view{"few"}, std::string_view{"many"}, std::string_view{"much"}, std::string_view{"more"},
    std::string_view{"most"}, std::string_view{"other"}, std::string_view{"another"}, std::string_view{"such"},
    std::string_view{"what"}, std::string_view{"which"}, std::string_view{"whose"},
    // pronouns
    std::string_view{"i"}, std::string_view{"me"}, std::string_view{"my"}, std::string_view{"mine"},
    std::string_view{"myself"}, std::string_view{"you"}, std::string_view{"your"}, std::string_view{"yours"},
    std::string_view{"yourself"}, std::string_view{"he"}, std::string_view{"him"}, std::string_view{"his"},
    std::string_view{"himself"}, std::string_view{"she"}, std::string_view{"her"}, std::string_view{"hers"},
    std::string_view{"herself"}, std::string_view{"it"}, std::string_view{"its"}, std::string_view{"itself"},
    std::string_view{"we"}, std::string_view{"us"}, std::string_view{"our"}, std::string_view{"ours"},
    std::string_view{"ourselves"}, std::string_view{"they"}, std::string_view{"them"}, std::string_view{"their"},
    std::string_view{"theirs"}, std::string_view{"themselves"}, std::string_view{"who"}, std::string_view{"whom"},
    std::string_view{"someone"}, std::string_view{"somebody"}, std::string_view{"something"},
    std::string_view{"anyone"}, std::string_view{"anything"}, std::string_view{"nobody"}, std::string_view{"nothing"},
    std::string_view{"everyone"}, std::string_view{"everything"}, std::string_view{"one"},
    // prepositions
    std::string_view{"about"}, std::string_view{"above"}, std::string_view{"across"}, std::string_view{"after"},
    std::string_view{"against"}, std::string_view{"along"}, std::string_view{"among"}, std::string_view{"around"},
    std::string_view{"as"}, std::string_view{"at"}, std::string_view{"before"}, std::string_view{"behind"},
    std::string_view{"below"}, std::string_view{"beneath"}, std::string_view{"beside"}, std::string_view{"between"},
    std::string_view{"beyond"}, std::string_view{"by"}, std::string_view{"despite"}, std::string_view{"down"},
    std::string_view{"during"}, std::string_view{"except"}, std::string_view{"for"}, std::string_view{"from"},
    std::string_view{"in"}, std::string_view{"inside"}, std::string_view{"into"}, std::string_view{"like"},
    std::string_view{"near"}, std::string_view{"of"}, std::string_view{"off"}, std::string_view{"on"},
    std::string_view{"onto"}, std::string_view{"out"}, std::string_view{"outside"}, std::string_view{"over"},
    std::string_view{"past"}, std::string_view{"per"}, std::string_view{"since"}, std::string_view{"through"},
    std::string_view{"throughout"}, std::string_view{"to"}, std::string_view{"toward"}, std::string_view{"towards"},
    std::string_view{"under"}, std::string_view{"until"}, std::string_view{"up"}, std::string_view{"upon"},
    std::string_view{"via"}, std::string_view{"with"}, std::string_view{"within"}, std::string_view{"without"},
    // conjunctions
    std::string_view{"and"}, std::string_view{"or"}, std::string_view{"but"}, std::string_view{"nor"},
    std::string_view{"so"}, std::string_view{"yet"}, std::string_view{"if"}, std::string_view{"then"},
    std::string_view{"than"}, std::string_view{"because"}, std::string_view{"although"}, std::string_view{"though"},
    std::string_view{"while"}, std::string_view{"whereas"}, std::string_view{"unless"}, std::string_view{"whether"},
    std::string_view{"when"}, std::string_view{"where"}, std::string_view{"why"}, std::string_view{"how"},
    // auxiliaries and copulas
    std::string_view{"is"}, std::string_view{"am"}, std::string_view{"are"}, std::string_view{"was"},
    std::string_view{"were"}, std::string_view{"be"}, std::string_view{"been"}, std::string_view{"being"},
    std::string_view{"have"}, std::string_view{"has"}, std::string_view{"had"}, std::string_view{"do"},
    std::string_view{"does"}, std::string_view{"did"}, std::string_view{"will"}, std::string_view{"would"},
    std::string_view{"shall"}, std::string_view{"should"}, std::string_view{"can"}, std::string_view{"could"},
    std::string_view{"may"}, std::string_view{"might"}, std::string_view{"must"},
    // adverbs, fillers, and answer boilerplate
    std::string_view{"not"}, std::string_view{"also"}, std::string_view{"very"}, std::string_view{"just"},
    std::string_view{"only"}, std::string_view{"too"}, std::string_view{"here"}, std::string_view{"there"},
    std::string_view{"now"}, std::string_view{"yes"}, std::string_view{"okay"}, std::string_view{"ok"},
    std::string_view{"sure"}, std::string_view{"sorry"}, std::string_view{"none"}, std::string_view{"n/a"},
    std::string_view{"na"}, std::string_view{"null"}, std::string_view{"unknown"}, std::string_view{"undefined"},
    std::string_view{"corrected"}, std::string_view{"word"}, std::string_view{"words"}, std::string_view{"last"},
    std::string_view{"answer"}, std::string_view{"phrase"}, std::string_view{"fragment"},
    // punctuation
    std::string_view{"."}, std::string_view{","}, std::string_view{";"}, std::string_view{":"},
    std::string_view{"!"}, std::string_view{"?"}, std::string_view{"'"}, std::string_view{"\""},
    std::string_view{"`"}, std::string_view{"("}, std::string_view{")"}, std::string_view{"["},
    std::string_view{"]"}, std::string_view{"{"}, std::string_view{"}"}, std::string_view{"-"},
    std::string_view{"--"}, std::string_view{"_"}, std::string_view{"/"}, std::string_view{"\\"},
    std::string_view{"*"}, std::string_view{"&"}, std::string_view{"#"}, std::string_view{"@"},
    std::string_view{"..."}, std::string_view{"\xE2\x80\x9C"}, std::string_view{"\xE2\x80\x9D"},
    std::string_view{"\xE2\x80\x98"}, std::string_view{"\xE2\x80\x99"}, std::string_view{"\xE2\x80\x94"},
    std::string_view{"\xE2\x80\x93"}, std::string_view{"\xE2\x80\xA6"},
};

} // namespace pdaudit::resources
