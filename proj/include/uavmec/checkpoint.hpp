#pragma once

#include <string>
#include <utility>
#include <vector>

#include "uavmec/matrix.hpp"

namespace uavmec::nn {

/// Named tensors plus string metadata, kept in insertion order.
///
/// On-disk text format (values as C99 hex floats, so round trips are exact):
///
///     uavmec-checkpoint 1
///     meta <key> <value to end of line>
///     tensor <name> <rows> <cols>
///     <cols values>            (one line per row)
///     end
struct Checkpoint {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::pair<std::string, Matrix>> tensors;

    void put(const std::string& name, const Matrix& m) { tensors.emplace_back(name, m); }
    void put_meta(const std::string& key, const std::string& value) { meta.emplace_back(key, value); }
    /// Throws std::runtime_error when absent.
    const Matrix& tensor(const std::string& name) const;
    const std::string& meta_value(const std::string& key) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace uavmec::nn
