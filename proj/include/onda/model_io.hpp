#pragma once

#include "onda/er_model.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace onda {

inline constexpr int kFormatVersion = 1;

struct ProjectDocument
{
    int format_version = kFormatVersion;
    Diagram diagram;
    /// Free-form metadata, preserved verbatim (emitted in key order).
    std::map<std::string, std::string> meta;

    friend bool operator==(const ProjectDocument&, const ProjectDocument&) = default;
};

/// Parses a canonical (or hand-written) JSON project document.
///
/// Unknown keys are rejected everywhere except inside "meta". Throws
/// ParseError (code "PARSE" for malformed JSON with line/column, "SCHEMA" for
/// shape violations with a JSON pointer) or VersionError.
ProjectDocument parse_project(std::string_view bytes);

/// Canonical bytes: fixed key order, arrays in model order, 2-space indent,
/// LF line endings and a trailing newline.
std::string emit_project(const ProjectDocument& doc);

struct DslSource
{
    std::string text;
    std::optional<std::string> origin;
};

/// Parses the textual ER language. Every element's id is its name; hierarchy
/// ids are derived as <super>_isa. Throws ParseError with code "SYNTAX".
Diagram parse_dsl(const DslSource& src);

/// Canonical DSL text; parse_dsl(emit_dsl(d)) == d for geometry-free
/// diagrams whose ids follow the DSL naming.
DslSource emit_dsl(const Diagram& diagram);

} // namespace onda
