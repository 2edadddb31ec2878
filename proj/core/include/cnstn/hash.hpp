#pragma once

#include <string>

namespace cnstn::hash {

/// SHA-1 of raw bytes, lowercase hex.
std::string sha1_hex(const std::string& bytes);

/// Git-style blob hash of a buffer: sha1("blob <size>\0" + content), the id
/// git itself would assign the same bytes — lets run summaries be checked
/// against a repository object database directly.
std::string git_blob_hash(const std::string& content);

/// git_blob_hash of a file's contents.
std::string git_blob_hash_file(const std::string& path);

}  // namespace cnstn::hash
