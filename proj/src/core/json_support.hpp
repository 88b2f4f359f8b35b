#pragma once

#include "onda/er_model.hpp"

#include <json.hpp>

#include <string>

namespace onda::detail {

using ojson = nlohmann::ordered_json;

ojson type_to_json(const LogicalType& type);

/// Two-space indent, UTF-8, LF, trailing newline.
std::string dump_canonical(const ojson& value);

} // namespace onda::detail
