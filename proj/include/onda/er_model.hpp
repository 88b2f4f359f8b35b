#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace onda {

// ============================================================================
// Conceptual ER model
// ============================================================================

enum class TypeKind { Integer, BigInt, Float, Numeric, Varchar, Text, Boolean, Date, Timestamp };

/// Column-level data type. VARCHAR carries a length, NUMERIC a precision and
/// optional scale; every other kind is parameterless.
struct LogicalType
{
    TypeKind kind = TypeKind::Integer;
    std::optional<int> length;
    std::optional<int> precision;
    std::optional<int> scale;

    static LogicalType integer() { return {TypeKind::Integer, {}, {}, {}}; }
    static LogicalType bigint() { return {TypeKind::BigInt, {}, {}, {}}; }
    static LogicalType floating() { return {TypeKind::Float, {}, {}, {}}; }
    static LogicalType numeric(int precision, std::optional<int> scale = {})
    {
        return {TypeKind::Numeric, {}, precision, scale};
    }
    static LogicalType varchar(int length) { return {TypeKind::Varchar, length, {}, {}}; }
    static LogicalType text() { return {TypeKind::Text, {}, {}, {}}; }
    static LogicalType boolean() { return {TypeKind::Boolean, {}, {}, {}}; }
    static LogicalType date() { return {TypeKind::Date, {}, {}, {}}; }
    static LogicalType timestamp() { return {TypeKind::Timestamp, {}, {}, {}}; }

    /// True when the parameters fit the kind (see TypeKind comment above).
    bool well_formed() const;

    friend bool operator==(const LogicalType&, const LogicalType&) = default;
};

/// Lowercase keyword used by both the DSL and the JSON format ("integer", "varchar", ...).
std::string_view type_kind_name(TypeKind kind);
std::optional<TypeKind> type_kind_from_name(std::string_view name);

struct Attribute
{
    std::string name;
    LogicalType type;
    bool is_pk = false;
    bool is_partial_id = false;
    bool mandatory = false;
    bool unique = false;
    bool auto_increment = false;
    std::optional<std::string> check_sql;

    friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct Entity
{
    std::string id;
    std::string name;
    std::vector<Attribute> attributes;
    bool is_weak = false;

    friend bool operator==(const Entity&, const Entity&) = default;
};

enum class MaxCard { One, Many };

/// One end of a binary relationship: how often the entity at this end takes part.
struct RelEnd
{
    std::string entity_id;
    int min_card = 0; // 0 or 1
    MaxCard max_card = MaxCard::Many;
    std::optional<std::string> role;

    friend bool operator==(const RelEnd&, const RelEnd&) = default;
};

struct Relationship
{
    std::string id;
    std::string name;
    RelEnd end_a;
    RelEnd end_b;
    std::vector<Attribute> attributes;

    bool is_self() const { return end_a.entity_id == end_b.entity_id; }

    friend bool operator==(const Relationship&, const Relationship&) = default;
};

enum class Strategy { Complete, Concrete, Single };

std::string_view strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(std::string_view name);

struct Hierarchy
{
    std::string id;
    std::string super_id;
    std::vector<std::string> sub_ids;
    Strategy strategy = Strategy::Complete;

    friend bool operator==(const Hierarchy&, const Hierarchy&) = default;
};

struct CanvasPoint
{
    double x = 0;
    double y = 0;

    friend bool operator==(const CanvasPoint&, const CanvasPoint&) = default;
};

struct Diagram
{
    std::string name;
    std::vector<Entity> entities;
    std::vector<Relationship> relationships;
    std::vector<Hierarchy> hierarchies;
    std::map<std::string, CanvasPoint> geometry;
    int format_version = 1;

    const Entity* find_entity(std::string_view id) const;
    Entity* find_entity(std::string_view id);
    const Relationship* find_relationship(std::string_view id) const;
    const Hierarchy* find_hierarchy(std::string_view id) const;

    friend bool operator==(const Diagram&, const Diagram&) = default;
};

enum class GenerationMode { Normal, Simplified };

std::string_view mode_name(GenerationMode mode);
std::optional<GenerationMode> mode_from_name(std::string_view name);

// ============================================================================
// Names
// ============================================================================

/// Derives the SQL name of a display name: lowercase, runs of anything outside
/// [a-z0-9] become one underscore, leading/trailing underscores dropped.
/// The result may still be invalid (empty, or starting with a digit).
std::string sql_name(std::string_view display);

/// True for names matching [a-z][a-z0-9_]*.
bool is_valid_sql_name(std::string_view name);

// ============================================================================
// Validation
// ============================================================================

enum class Severity { Error, Warning };

std::string_view severity_name(Severity s);

struct Finding
{
    Severity severity = Severity::Error;
    std::string code;
    /// Element id first, optionally followed by an attribute name or end label.
    std::vector<std::string> element_path;
    std::string message;

    friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport
{
    std::vector<Finding> findings;

    bool is_valid() const;
    std::size_t error_count() const;
    bool has(std::string_view code) const;

    friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Checks every structural and semantic rule of the conceptual model.
///
/// Without a mode, REL_ATTRS_INLINE is an error only when every generation
/// mode would inline the relationship, and a warning when only SIMPLIFIED
/// would. With a mode, it is an error whenever that mode inlines.
/// Findings are sorted by element id, then code.
ValidationReport validate(const Diagram& diagram, std::optional<GenerationMode> mode = std::nullopt);

/// The identifying relationship of a weak entity: the unique relationship
/// whose other end is (1,1) at the owner. Throws LookupError when the id is
/// unknown or the entity is not weak.
std::optional<std::pair<std::string, std::string>> weak_owner_of(const Diagram& diagram,
                                                                 std::string_view entity_id);

} // namespace onda
