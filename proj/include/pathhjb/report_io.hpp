#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pathhjb {

/// %.17g rendering; round-trips doubles exactly and keeps outputs
/// byte-comparable across runs.
std::string fmt_double(double x);

/// Minimal JSON emitter for the report files. Pretty-prints with one scalar
/// per line so timing fields can be filtered out of byte comparisons.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array(const std::string& key);
    JsonWriter& begin_object_in_array();
    JsonWriter& end_array();
    JsonWriter& key_string(const std::string& key, const std::string& value);
    JsonWriter& key_number(const std::string& key, double value);
    JsonWriter& key_int(const std::string& key, std::int64_t value);
    JsonWriter& key_uint(const std::string& key, std::uint64_t value);
    JsonWriter& key_bool(const std::string& key, bool value);
    JsonWriter& array_number(double value);
    JsonWriter& array_string(const std::string& value);

    std::string str() const { return out_; }

private:
    void indent();
    void comma_if_needed();
    std::string out_;
    int depth_ = 0;
    bool need_comma_ = false;
};

/// One CSV row; fields are %.17g for doubles.
std::string csv_row(const std::vector<std::string>& fields);

/// FNV-1a over the canonicalized (parsed and re-dumped) config text; 16 hex
/// characters. Stable across whitespace and key-order differences.
std::string config_hash(const std::string& canonical_config_text);

/// Writes content to path, creating parent directories. Throws on failure.
void write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

inline constexpr const char* kArtifactVersion = "0.1.0";

} // namespace pathhjb
