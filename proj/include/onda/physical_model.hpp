#pragma once

#include "onda/er_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace onda {

/// Which conceptual element a table or foreign key was lowered from.
struct Origin
{
    enum class Kind { Entity, Relationship, Hierarchy };

    Kind kind = Kind::Entity;
    std::string id;

    friend bool operator==(const Origin&, const Origin&) = default;
};

std::string_view origin_kind_name(Origin::Kind kind);

struct Column
{
    std::string name;
    LogicalType type;
    bool nullable = true;
    bool auto_increment = false;
    std::optional<std::string> check_sql;

    friend bool operator==(const Column&, const Column&) = default;
};

struct ForeignKey
{
    std::string name;
    std::vector<std::string> columns;
    std::string target_table;
    std::vector<std::string> target_columns;
    Origin origin;

    friend bool operator==(const ForeignKey&, const ForeignKey&) = default;
};

struct Table
{
    std::string name;
    std::vector<Column> columns;
    std::vector<std::string> primary_key;
    std::vector<std::vector<std::string>> uniques;
    std::vector<ForeignKey> foreign_keys;
    std::vector<std::string> checks;
    Origin origin;

    const Column* find_column(std::string_view column) const;
    bool has_column(std::string_view column) const { return find_column(column) != nullptr; }
    const ForeignKey* find_foreign_key(std::string_view fk) const;

    friend bool operator==(const Table&, const Table&) = default;
};

/// A foreign key held back from its CREATE TABLE to break a reference cycle.
struct DeferredForeignKey
{
    std::string table;
    std::string name;

    friend auto operator<=>(const DeferredForeignKey&, const DeferredForeignKey&) = default;
};

struct PhysicalModel
{
    std::vector<Table> tables;
    GenerationMode mode = GenerationMode::Normal;
    std::string source_name;
    std::vector<DeferredForeignKey> deferred;

    const Table* find_table(std::string_view name) const;
    bool is_deferred(std::string_view table, std::string_view fk) const;

    friend bool operator==(const PhysicalModel&, const PhysicalModel&) = default;
};

/// Canonical JSON rendering of a physical model (2-space indent, LF, trailing newline).
std::string physical_model_to_json(const PhysicalModel& model);

} // namespace onda
