#include "json_util.hpp"

#include <fstream>
#include <sstream>

#include "cpd/error.hpp"

namespace cpd::detail {

namespace {

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::string join(std::string_view path, std::string_view key) {
    if (path.empty()) return std::string(key);
    return std::string(path) + "." + std::string(key);
}

}  // namespace

json parse_json(std::string_view text, std::string_view what) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(what) + ": malformed JSON at " + line_column(text, e.byte > 0 ? e.byte - 1 : 0) +
                         ": " + e.what());
    }
}

const json& require(const json& object, std::string_view key, std::string_view path) {
    if (!object.is_object()) throw ParseError(std::string(path.empty() ? "<root>" : path) + ": expected object");
    auto it = object.find(std::string(key));
    if (it == object.end()) throw ParseError(join(path, key) + ": missing field");
    return *it;
}

long long as_int(const json& value, std::string_view path) {
    if (!value.is_number_integer()) throw ParseError(std::string(path) + ": expected integer");
    return value.get<long long>();
}

long long require_int(const json& object, std::string_view key, std::string_view path) {
    return as_int(require(object, key, path), join(path, key));
}

double require_number(const json& object, std::string_view key, std::string_view path) {
    const json& v = require(object, key, path);
    if (!v.is_number()) throw ParseError(join(path, key) + ": expected number");
    return v.get<double>();
}

std::string require_string(const json& object, std::string_view key, std::string_view path) {
    const json& v = require(object, key, path);
    if (!v.is_string()) throw ParseError(join(path, key) + ": expected string");
    return v.get<std::string>();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed writing " + path);
}

}  // namespace cpd::detail
