#pragma once

#include "onda/physical_model.hpp"

#include <string>
#include <vector>

struct sqlite3;

namespace onda::testkit {

/// Fresh in-memory SQLite database with foreign keys enforced.
class SqliteDb
{
  public:
    SqliteDb();
    ~SqliteDb();
    SqliteDb(const SqliteDb&) = delete;
    SqliteDb& operator=(const SqliteDb&) = delete;

    /// Executes a whole script; returns the engine's error text, empty on success.
    std::string exec(const std::string& sql);
    std::vector<std::vector<std::string>> query(const std::string& sql);

  private:
    sqlite3* db_ = nullptr;
};

struct IntrospectedColumn
{
    std::string name;
    std::string declared_type;
    bool not_null = false;
};

struct IntrospectedForeignKey
{
    std::vector<std::string> columns;
    std::string target_table;
    std::vector<std::string> target_columns;

    friend auto operator<=>(const IntrospectedForeignKey&, const IntrospectedForeignKey&) = default;
};

struct IntrospectedTable
{
    std::string name;
    std::vector<IntrospectedColumn> columns;
    std::vector<std::string> primary_key;
    std::vector<std::vector<std::string>> uniques;     // sorted
    std::vector<IntrospectedForeignKey> foreign_keys;  // sorted
};

/// Reads back every user table through PRAGMA table_info / foreign_key_list / index_list.
std::vector<IntrospectedTable> introspect(SqliteDb& db);

/// Differences between the live schema and the model, one line each; empty when equal.
std::vector<std::string> compare_schema(const std::vector<IntrospectedTable>& live, const PhysicalModel& model);

} // namespace onda::testkit
