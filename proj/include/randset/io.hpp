#pragma once

// JSON file formats.
//
//   space         {"weights": [w1, ..., wM]}
//   set           {"bits": "0110"}  (atom 1 leftmost)  or  {"indices": [2, 3]}  (1-based)
//   distribution  {"support": [<set>, ...], "probs": [p1, ...]}
//   mean function {"values": [...]}
//   sample        {"space": "<path>", "observations": [<set>, ...]}
//   partition     {"cells": [<set>, ...]}
//
// Any object may carry "schema": "randset/v1"; other schema values are rejected.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "randset/error.hpp"
#include "randset/measure_space.hpp"
#include "randset/random_set.hpp"
#include "randset/two_sample.hpp"

namespace randset::io {

using json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "randset/v1";

namespace detail {

using randset::detail::fail;
using randset::detail::require;

inline void check_schema(const json& j) {
    if (j.is_object() && j.contains("schema")) {
        require(j["schema"].is_string() && j["schema"].get<std::string>() == schema_version, ErrorCode::ParseError,
                std::string("unsupported schema, expected \"") + schema_version + "\"");
    }
}

inline const json& field(const json& j, const char* name) {
    require(j.is_object(), ErrorCode::ParseError, std::string("expected an object with field '") + name + "'");
    auto it = j.find(name);
    require(it != j.end(), ErrorCode::ParseError, std::string("missing field '") + name + "'");
    return *it;
}

inline std::vector<double> number_array(const json& j, const char* name) {
    require(j.is_array(), ErrorCode::ParseError, std::string("field '") + name + "' must be an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        require(v.is_number(), ErrorCode::ParseError, std::string("field '") + name + "' must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

/// 1-based line and column of a byte offset.
inline std::string position(const std::string& text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace detail

inline json parse_text(const std::string& text, const std::string& origin = "<input>") {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t at = e.byte == 0 ? 0 : e.byte - 1;
        detail::fail(ErrorCode::ParseError, origin + ": malformed JSON at " + detail::position(text, at));
    }
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    detail::require(static_cast<bool>(in), ErrorCode::IoError, "cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_text(text, path.string());
}

inline MeasureSpace parse_space(const json& j) {
    detail::check_schema(j);
    return make_space(detail::number_array(detail::field(j, "weights"), "weights"));
}

inline json space_to_json(const MeasureSpace& space) {
    return json{{"weights", std::vector<double>(space.weights().begin(), space.weights().end())}};
}

inline FiniteSet parse_set(const json& j, std::size_t size) {
    detail::require(j.is_object(), ErrorCode::ParseError, "a set must be an object with 'bits' or 'indices'");
    if (auto it = j.find("bits"); it != j.end()) {
        detail::require(it->is_string(), ErrorCode::ParseError, "'bits' must be a string");
        const auto bits = it->get<std::string>();
        detail::require(bits.size() == size, ErrorCode::DimensionMismatch,
                        "bit string of length " + std::to_string(bits.size()) + " in a space of " +
                            std::to_string(size) + " atoms");
        return FiniteSet::from_bits(bits);
    }
    if (auto it = j.find("indices"); it != j.end()) {
        detail::require(it->is_array(), ErrorCode::ParseError, "'indices' must be an array");
        FiniteSet s(size);
        for (const auto& v : *it) {
            detail::require(v.is_number_integer(), ErrorCode::ParseError, "'indices' must contain integers");
            const auto idx = v.get<long long>();
            detail::require(idx >= 1 && static_cast<std::size_t>(idx) <= size, ErrorCode::DimensionMismatch,
                            "index " + std::to_string(idx) + " outside 1.." + std::to_string(size));
            s.insert(static_cast<std::size_t>(idx - 1));
        }
        return s;
    }
    detail::fail(ErrorCode::ParseError, "a set needs a 'bits' or 'indices' field");
}

inline json set_to_json(const FiniteSet& a) { return json{{"bits", a.to_bits()}}; }

inline std::vector<FiniteSet> parse_set_list(const json& j, const char* name, std::size_t size) {
    const json& arr = detail::field(j, name);
    detail::require(arr.is_array(), ErrorCode::ParseError, std::string("field '") + name + "' must be an array");
    std::vector<FiniteSet> out;
    out.reserve(arr.size());
    for (const auto& s : arr) out.push_back(parse_set(s, size));
    return out;
}

inline json set_list_to_json(std::span<const FiniteSet> sets) {
    json arr = json::array();
    for (const auto& s : sets) arr.push_back(set_to_json(s));
    return arr;
}

inline DiscreteRandomSet parse_distribution(const json& j, std::size_t size) {
    detail::check_schema(j);
    auto support = parse_set_list(j, "support", size);
    auto probs = detail::number_array(detail::field(j, "probs"), "probs");
    return make_random_set(std::move(support), std::move(probs));
}

inline json distribution_to_json(const DiscreteRandomSet& d) {
    return json{{"support", set_list_to_json(d.support())},
                {"probs", std::vector<double>(d.probs().begin(), d.probs().end())}};
}

inline MeanFunction parse_mean_function(const json& j, std::size_t size) {
    auto values = detail::number_array(detail::field(j, "values"), "values");
    detail::require(values.size() == size, ErrorCode::DimensionMismatch, "mean function has the wrong length");
    return MeanFunction(std::move(values));
}

inline json mean_to_json(const MeanFunction& f) {
    return json{{"values", std::vector<double>(f.values().begin(), f.values().end())}};
}

inline CellPartition parse_partition(const json& j, const MeasureSpace& space) {
    detail::check_schema(j);
    return CellPartition(space, parse_set_list(j, "cells", space.size()));
}

inline MeasureSpace load_space(const std::filesystem::path& path) { return parse_space(read_json_file(path)); }

struct LoadedSample {
    std::filesystem::path space_path;
    MeasureSpace space;
    SetSample sample;
};

/// Reads a sample file. The "space" path is resolved against the sample
/// file's directory; `space_override` replaces it when given.
inline LoadedSample load_sample(const std::filesystem::path& path, const MeasureSpace* space_override = nullptr) {
    const json j = read_json_file(path);
    detail::check_schema(j);
    std::filesystem::path space_path;
    if (space_override == nullptr) {
        const json& ref = detail::field(j, "space");
        detail::require(ref.is_string(), ErrorCode::ParseError, "'space' must be a path string");
        space_path = path.parent_path() / ref.get<std::string>();
    }
    LoadedSample out{space_path, space_override ? *space_override : load_space(space_path), {}};
    out.sample.observations = parse_set_list(j, "observations", out.space.size());
    out.sample.label = path.filename().string();
    validate_sample(out.space, out.sample);
    return out;
}

}  // namespace randset::io
