#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

namespace czsum {

/// Lowercase hex SHA-256 of the input bytes.
std::string sha256_hex(std::string_view data);

/// SHA-256 over length-prefixed fields, so ("ab","c") and ("a","bc")
/// hash differently.
std::string hash_fields(std::initializer_list<std::string_view> fields);

}  // namespace czsum
