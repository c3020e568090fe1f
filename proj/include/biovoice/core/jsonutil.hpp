#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "biovoice/core/error.hpp"
#include "biovoice/core/mathutil.hpp"

namespace biovoice {

using json = nlohmann::json;

// Round every float in the document through 9 significant digits so the dump
// never carries more precision; keys are already sorted by nlohmann's std::map.
inline void round_floats_g9(json& j) {
    if (j.is_number_float()) {
        j = round_g9(j.get<double>());
    } else if (j.is_object() || j.is_array()) {
        for (auto& el : j) round_floats_g9(el);
    }
}

inline std::string dump_canonical(json j, int indent = 2) {
    round_floats_g9(j);
    return j.dump(indent) + "\n";
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UnwritablePath("cannot open for writing: " + path.string());
    out << dump_canonical(j);
    if (!out) throw UnwritablePath("write failed: " + path.string());
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorruptContainer("cannot open: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw CorruptContainer("invalid JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UnwritablePath("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw UnwritablePath("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorruptContainer("cannot open: " + path.string());
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

}  // namespace biovoice
