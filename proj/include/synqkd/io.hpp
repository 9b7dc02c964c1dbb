// io.hpp
// Byte-stable serialization: a small ordered JSON writer with a fixed
// floating-point format (17 significant digits), the documented 36-entry
// correlation schema, and JSON-lines transcripts.

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "synqkd/correlations.hpp"
#include "synqkd/protocol.hpp"

namespace synqkd {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Emits keys in insertion order; all numbers use the fixed format above,
// so identical inputs serialize to identical bytes.
class JsonWriter {
  public:
    JsonWriter& begin_object() { return open('{'); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('['); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(const std::string& name) {
        separate();
        out_ += quote(name);
        out_ += ':';
        pending_value_ = true;
        return *this;
    }

    JsonWriter& value(double v) { return raw(format_double(v)); }
    JsonWriter& value(int v) { return raw(std::to_string(v)); }
    JsonWriter& value(unsigned v) { return raw(std::to_string(v)); }
    JsonWriter& value(unsigned long v) { return raw(std::to_string(v)); }
    JsonWriter& value(unsigned long long v) { return raw(std::to_string(v)); }
    JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
    JsonWriter& value(const char* v) { return raw(quote(v)); }
    JsonWriter& value(const std::string& v) { return raw(quote(v)); }
    JsonWriter& null() { return raw("null"); }

    const std::string& str() const { return out_; }

  private:
    JsonWriter& open(char c) {
        separate();
        out_ += c;
        first_.push_back(true);
        pending_value_ = false;
        return *this;
    }
    JsonWriter& close(char c) {
        out_ += c;
        first_.pop_back();
        return *this;
    }
    JsonWriter& raw(const std::string& text) {
        separate();
        out_ += text;
        pending_value_ = false;
        return *this;
    }
    void separate() {
        if (pending_value_) return;  // value directly after a key
        if (!first_.empty()) {
            if (!first_.back()) out_ += ',';
            first_.back() = false;
        }
    }
    static std::string quote(const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            switch (c) {
                case '"': q += "\\\""; break;
                case '\\': q += "\\\\"; break;
                case '\n': q += "\\n"; break;
                case '\t': q += "\\t"; break;
                default: q += c;
            }
        }
        q += '"';
        return q;
    }

    std::string out_;
    std::vector<bool> first_;
    bool pending_value_ = false;
};

// {"p": [...]} with the 36 entries in (yA,yB)-major, (xA,xB)-minor order.
inline void write_correlation(JsonWriter& w, const Correlation& c) {
    w.begin_object().key("p").begin_array();
    for (double v : c.p) w.value(v);
    w.end_array().end_object();
}

inline std::string correlation_to_json(const Correlation& c) {
    JsonWriter w;
    write_correlation(w, c);
    return w.str();
}

namespace detail {

inline std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace detail

// Parses a device table file; parse and schema errors name the line.
inline Correlation parse_correlation_json(const std::string& text, const std::string& source) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(source + ": JSON parse error at line " +
                                 std::to_string(detail::line_of_byte(text, e.byte)) + ": " +
                                 e.what());
    }
    if (!doc.is_object() || !doc.contains("p") || !doc["p"].is_array() || doc["p"].size() != 36)
        throw std::runtime_error(source + ": expected an object with field \"p\" holding 36 numbers");
    Correlation c;
    for (std::size_t i = 0; i < 36; ++i) {
        if (!doc["p"][i].is_number())
            throw std::runtime_error(source + ": entry " + std::to_string(i) + " of \"p\" is not a number");
        c.p[i] = doc["p"][i].get<double>();
    }
    return c;
}

inline Correlation load_correlation_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open device table file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_correlation_json(buf.str(), path);
}

// One record per line: {"i":..,"xA":..,"xB":..,"yA":..,"yB":..,"role":".."}.
inline void write_transcript(std::ostream& out, std::span<const RoundRecord> records) {
    for (const auto& r : records) {
        out << "{\"i\":" << r.i << ",\"xA\":" << int(r.xa) << ",\"xB\":" << int(r.xb)
            << ",\"yA\":" << int(r.ya) << ",\"yB\":" << int(r.yb) << ",\"role\":\""
            << to_string(r.role) << "\"}\n";
    }
}

inline std::string key_to_hex(std::span<const std::uint8_t> bits) {
    static const char* digits = "0123456789abcdef";
    std::string hex;
    std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] & 1u) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    for (std::uint8_t b : bytes) {
        hex += digits[b >> 4];
        hex += digits[b & 0xf];
    }
    return hex;
}

}  // namespace synqkd
