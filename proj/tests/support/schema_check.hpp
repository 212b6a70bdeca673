#pragma once

// Minimal structural validator for the shipped JSON schemas: supports
// the subset used there (type, required, properties, items, enum).

#include <string>
#include <vector>

#include <json.hpp>

namespace testsupport {

using nlohmann::json;

inline bool type_matches(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer() ||
                                   value.is_number_unsigned();
    if (type == "boolean") return value.is_boolean();
    return false;
}

inline bool validate_schema(const json& value, const json& schema,
                            std::string* why = nullptr, std::string path = "$") {
    auto fail = [&](const std::string& msg) {
        if (why) *why = path + ": " + msg;
        return false;
    };
    if (schema.contains("type") &&
        !type_matches(value, schema.at("type").get<std::string>()))
        return fail("expected type " + schema.at("type").get<std::string>());
    if (schema.contains("enum")) {
        bool hit = false;
        for (const auto& option : schema.at("enum"))
            if (option == value) hit = true;
        if (!hit) return fail("value not in enum");
    }
    if (schema.contains("required"))
        for (const auto& key : schema.at("required"))
            if (!value.contains(key.get<std::string>()))
                return fail("missing required key " + key.get<std::string>());
    if (schema.contains("properties") && value.is_object())
        for (const auto& [key, sub] : schema.at("properties").items())
            if (value.contains(key) &&
                !validate_schema(value.at(key), sub, why, path + "." + key))
                return false;
    if (schema.contains("items") && value.is_array())
        for (std::size_t i = 0; i < value.size(); ++i)
            if (!validate_schema(value[i], schema.at("items"), why,
                                 path + "[" + std::to_string(i) + "]"))
                return false;
    return true;
}

}  // namespace testsupport
