#include "pathhjb/report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pathhjb/errors.hpp"

namespace pathhjb {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void JsonWriter::indent() {
    out_.push_back('\n');
    out_.append(static_cast<std::size_t>(depth_) * 2, ' ');
}

void JsonWriter::comma_if_needed() {
    if (need_comma_) out_.push_back(',');
    need_comma_ = false;
}

JsonWriter& JsonWriter::begin_object() {
    comma_if_needed();
    if (depth_ > 0) indent();
    out_.push_back('{');
    ++depth_;
    need_comma_ = false;
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    --depth_;
    indent();
    out_.push_back('}');
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::begin_array(const std::string& key) {
    comma_if_needed();
    indent();
    out_ += "\"" + key + "\": [";
    ++depth_;
    need_comma_ = false;
    return *this;
}

JsonWriter& JsonWriter::begin_object_in_array() {
    comma_if_needed();
    indent();
    out_.push_back('{');
    ++depth_;
    need_comma_ = false;
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    --depth_;
    indent();
    out_.push_back(']');
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::key_string(const std::string& key, const std::string& value) {
    comma_if_needed();
    indent();
    std::string escaped;
    for (char ch : value) {
        if (ch == '"' || ch == '\\') escaped.push_back('\\');
        if (ch == '\n') {
            escaped += "\\n";
            continue;
        }
        escaped.push_back(ch);
    }
    out_ += "\"" + key + "\": \"" + escaped + "\"";
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::key_number(const std::string& key, double value) {
    comma_if_needed();
    indent();
    out_ += "\"" + key + "\": " + fmt_double(value);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::key_int(const std::string& key, std::int64_t value) {
    comma_if_needed();
    indent();
    out_ += "\"" + key + "\": " + std::to_string(value);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::key_uint(const std::string& key, std::uint64_t value) {
    comma_if_needed();
    indent();
    out_ += "\"" + key + "\": " + std::to_string(value);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::key_bool(const std::string& key, bool value) {
    comma_if_needed();
    indent();
    out_ += "\"" + key + "\": " + (value ? "true" : "false");
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::array_number(double value) {
    comma_if_needed();
    indent();
    out_ += fmt_double(value);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::array_string(const std::string& value) {
    comma_if_needed();
    indent();
    out_ += "\"" + value + "\"";
    need_comma_ = true;
    return *this;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) row.push_back(',');
        row += fields[i];
    }
    row.push_back('\n');
    return row;
}

std::string config_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace pathhjb
