#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "resources/catalog_json.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace pdaudit {

inline constexpr std::string_view subject_placeholder = "HUMAN_SUBJECT";
inline constexpr std::string_view value_placeholder = "PROTECTED_ATTRIBUTE";
inline constexpr std::string_view alt_subject_placeholder = "{subject}";
inline constexpr std::string_view alt_value_placeholder = "{cv}";

enum class Category {
    demographics,
    names_and_titles,
    origins_and_geography,
    physical,
    professional_life,
    family_and_relationships,
    interests_and_events,
    high_sensitivity,
};

inline constexpr std::array<std::string_view, 8> category_names = {
    "Demographics",          "Names and Titles",          "Origins and Geography", "Physical",
    "Professional Life",     "Family and Relationships",  "Interests and Events",  "High Sensitivity",
};

inline std::string_view to_string(Category c) { return category_names[static_cast<std::size_t>(c)]; }

inline std::optional<Category> parse_category(std::string_view name) {
    for (std::size_t i = 0; i < category_names.size(); ++i) {
        if (category_names[i] == name) return static_cast<Category>(i);
    }
    return std::nullopt;
}

/// One canary sentence; text uses the canonical HUMAN_SUBJECT /
/// PROTECTED_ATTRIBUTE placeholders, each exactly once.
struct CanaryTemplate {
    std::string text;
    std::size_t index = 0;

    /// Template text up to the value placeholder.
    std::string_view head() const { return std::string_view(text).substr(0, text.find(value_placeholder)); }
    std::string_view tail() const {
        auto pos = text.find(value_placeholder);
        return std::string_view(text).substr(pos + value_placeholder.size());
    }

    bool operator==(const CanaryTemplate&) const = default;
};

struct PropertySpec {
    std::string id;
    std::string label;
    Category category = Category::demographics;
    std::string description;
    std::vector<CanaryTemplate> canaries;
    std::optional<std::string> format_constraint;
    std::vector<std::string> hypernyms;

    bool operator==(const PropertySpec&) const = default;
};

/// Replaces both placeholders. Throws InvalidArgument for an empty subject.
inline std::string instantiate(const CanaryTemplate& tmpl, std::string_view subject, std::string_view value_fragment) {
    if (text::trim(subject).empty()) throw InvalidArgument("instantiate: empty subject");
    std::string out = tmpl.text;
    auto v = out.find(value_placeholder);
    auto s = out.find(subject_placeholder);
    // replace the later placeholder first so the earlier offset stays valid
    if (v > s) {
        out.replace(v, value_placeholder.size(), value_fragment);
        out.replace(s, subject_placeholder.size(), subject);
    } else {
        out.replace(s, subject_placeholder.size(), subject);
        out.replace(v, value_placeholder.size(), value_fragment);
    }
    return out;
}

inline std::optional<std::string> format_instruction(const PropertySpec& spec) { return spec.format_constraint; }

namespace detail {

inline std::string canonical_template(const std::string& raw, const std::string& property_id, std::size_t index) {
    const auto field = "canaries[" + std::to_string(index) + "]";
    auto subjects =
        text::count_occurrences(raw, subject_placeholder) + text::count_occurrences(raw, alt_subject_placeholder);
    auto values = text::count_occurrences(raw, value_placeholder) + text::count_occurrences(raw, alt_value_placeholder);
    if (subjects != 1) {
        throw CatalogError(property_id, field,
                           "template must contain exactly one subject placeholder, found " + std::to_string(subjects));
    }
    if (values != 1) {
        throw CatalogError(property_id, field,
                           "template must contain exactly one value placeholder, found " + std::to_string(values));
    }
    auto out = text::replace_all(raw, alt_subject_placeholder, subject_placeholder);
    return text::replace_all(std::move(out), alt_value_placeholder, value_placeholder);
}

inline PropertySpec parse_property(const std::string& id, const nlohmann::ordered_json& entry) {
    if (!entry.is_object()) throw CatalogError(id, "", "entry is not an object");
    auto string_field = [&](const char* key, bool required) -> std::optional<std::string> {
        auto it = entry.find(key);
        if (it == entry.end()) {
            if (required) throw CatalogError(id, key, "missing");
            return std::nullopt;
        }
        if (!it->is_string()) throw CatalogError(id, key, "must be a string");
        return it->get<std::string>();
    };

    PropertySpec spec;
    spec.id = id;
    spec.label = *string_field("label", true);
    if (text::trim(spec.label).empty()) throw CatalogError(id, "label", "must be non-empty");
    auto category = *string_field("category", true);
    auto parsed = parse_category(category);
    if (!parsed) throw CatalogError(id, "category", "unknown category '" + category + "'");
    spec.category = *parsed;
    spec.description = string_field("description", false).value_or("");
    spec.format_constraint = string_field("format_constraint", false);

    auto canaries = entry.find("canaries");
    if (canaries == entry.end() || !canaries->is_array()) throw CatalogError(id, "canaries", "missing or not an array");
    if (canaries->empty()) throw CatalogError(id, "canaries", "empty canary list");
    if (canaries->size() > 5) throw CatalogError(id, "canaries", "at most 5 canaries are allowed");
    for (std::size_t i = 0; i < canaries->size(); ++i) {
        const auto& c = (*canaries)[i];
        if (!c.is_string()) throw CatalogError(id, "canaries[" + std::to_string(i) + "]", "must be a string");
        spec.canaries.push_back({canonical_template(c.get<std::string>(), id, i), i});
    }

    if (auto h = entry.find("hypernyms"); h != entry.end()) {
        if (!h->is_array()) throw CatalogError(id, "hypernyms", "must be an array");
        for (const auto& word : *h) {
            if (!word.is_string()) throw CatalogError(id, "hypernyms", "entries must be strings");
            auto w = word.get<std::string>();
            if (w.empty() || text::words(w).size() != 1 || text::trim(w) != w) {
                throw CatalogError(id, "hypernyms", "'" + w + "' is not a single word");
            }
            spec.hypernyms.push_back(std::move(w));
        }
    }
    return spec;
}

} // namespace detail

/// Immutable, validated set of property specs in document order.
class PropertyCatalog {
public:
    PropertyCatalog() = default;

    /// Parses a catalog document; throws CatalogError naming property and field.
    static PropertyCatalog from_json(std::string_view document) {
        nlohmann::ordered_json doc;
        std::string duplicate;
        std::map<std::string, int> seen;
        auto on_event = [&](int depth, nlohmann::ordered_json::parse_event_t event, nlohmann::ordered_json& parsed) {
            if (event == nlohmann::ordered_json::parse_event_t::key && depth == 1) {
                auto key = parsed.get<std::string>();
                if (++seen[key] > 1 && duplicate.empty()) duplicate = key;
            }
            return true;
        };
        try {
            doc = nlohmann::ordered_json::parse(document, on_event);
        } catch (const nlohmann::json::parse_error& e) {
            throw CatalogError("", "", std::string("malformed catalog document: ") + e.what());
        }
        if (!doc.is_object()) throw CatalogError("", "", "catalog document must be a JSON object");
        if (!duplicate.empty()) throw CatalogError(duplicate, "id", "duplicate property id");
        PropertyCatalog catalog;
        for (const auto& [id, entry] : doc.items()) {
            catalog.index_.emplace(id, catalog.specs_.size());
            catalog.specs_.push_back(detail::parse_property(id, entry));
        }
        return catalog;
    }

    static PropertyCatalog from_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw CatalogError("", "", "cannot open catalog file " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return from_json(ss.str());
    }

    static const PropertyCatalog& shipped() {
        static const PropertyCatalog catalog = from_json(resources::catalog_json);
        return catalog;
    }

    std::span<const PropertySpec> properties() const { return specs_; }
    std::size_t size() const { return specs_.size(); }
    bool empty() const { return specs_.empty(); }

    const PropertySpec* find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        return it == index_.end() ? nullptr : &specs_[it->second];
    }

    const PropertySpec& at(std::string_view id) const {
        if (const auto* p = find(id)) return *p;
        throw InvalidArgument("unknown property id '" + std::string(id) + "'");
    }

    std::vector<Category> categories() const {
        std::vector<Category> out;
        for (const auto& s : specs_) {
            if (std::find(out.begin(), out.end(), s.category) == out.end()) out.push_back(s.category);
        }
        return out;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json doc = nlohmann::ordered_json::object();
        for (const auto& s : specs_) {
            nlohmann::ordered_json e;
            e["label"] = s.label;
            e["category"] = std::string(to_string(s.category));
            e["description"] = s.description;
            e["canaries"] = nlohmann::ordered_json::array();
            for (const auto& c : s.canaries) e["canaries"].push_back(c.text);
            if (s.format_constraint) e["format_constraint"] = *s.format_constraint;
            if (!s.hypernyms.empty()) e["hypernyms"] = s.hypernyms;
            doc[s.id] = std::move(e);
        }
        return doc;
    }

    std::string serialize() const { return to_json().dump(2); }

private:
    std::vector<PropertySpec> specs_;
    std::map<std::string, std::size_t> index_;
};

/// Deterministic per-participant permutation of the catalog's property ids,
/// seeded by a stable hash of the study id (reference for browser clients).
inline std::vector<std::string> feature_ordering(const PropertyCatalog& catalog, std::string_view study_id) {
    std::vector<std::string> ids;
    ids.reserve(catalog.size());
    for (const auto& s : catalog.properties()) ids.push_back(s.id);
    Rng rng(text::fnv1a64(study_id));
    seeded_shuffle(std::span<std::string>(ids), rng);
    return ids;
}

} // namespace pdaudit
