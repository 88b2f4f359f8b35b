#pragma once

#include "onda/error.hpp"
#include "onda/physical_model.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace onda {

enum class Dialect { PostgreSql, Oracle, MySql, MariaDb, Sqlite };

inline constexpr std::array<Dialect, 5> kAllDialects{Dialect::PostgreSql, Dialect::Oracle, Dialect::MySql,
                                                     Dialect::MariaDb, Dialect::Sqlite};

std::string_view dialect_name(Dialect d);
std::optional<Dialect> dialect_from_name(std::string_view name);
/// "postgresql, oracle, mysql, mariadb, sqlite"
std::string supported_dialects();

enum class AutoIncrementIdiom { ColumnKeyword, IdentityClause, IntegerPkKeyword };
enum class BooleanStrategy { Native, Numeric1Check };

struct DialectProfile
{
    Dialect dialect;
    char quote_open;
    char quote_close;
    /// SQL type name per TypeKind (indexed by the enum value); parameters are appended.
    std::array<std::string_view, 9> type_map;
    AutoIncrementIdiom auto_increment_idiom;
    std::size_t max_identifier_len;
    /// No ALTER TABLE ... ADD CONSTRAINT for foreign keys.
    bool supports_inline_fk_only;
    BooleanStrategy boolean_strategy;
    /// DROP TABLE IF EXISTS is available; empty suffix or e.g. " CASCADE".
    bool supports_drop_if_exists;
    std::string_view drop_suffix;
};

const DialectProfile& profile(Dialect d);

std::string map_type(const LogicalType& type, Dialect d);

bool is_reserved_word(std::string_view name, Dialect d);

/// Wraps the name in the dialect's quotes only when it is a reserved word.
std::string quote_identifier(std::string_view name, Dialect d);

/// Shortens a name beyond the dialect limit to limit-5 chars + "_" + 4-char hash.
std::string fit_identifier(std::string_view name, Dialect d);

/// fit_identifier made injective over one model: a shortened name that
/// collides with another identifier is re-hashed with a counter.
class IdentifierFitter
{
  public:
    IdentifierFitter(Dialect d, const std::vector<std::string>& all_names);

    const std::string& operator()(const std::string& name) const;
    /// (original, shortened) for every name that had to be shortened.
    const std::vector<std::pair<std::string, std::string>>& shortened() const { return shortened_; }

  private:
    std::map<std::string, std::string> fitted_;
    std::vector<std::pair<std::string, std::string>> shortened_;
};

struct EmitOptions
{
    bool drop_preamble = false;
};

struct Script
{
    std::vector<std::string> statements;
    std::string rendered;
    Dialect dialect = Dialect::PostgreSql;
    std::vector<std::string> warnings;
};

/// Thrown when the model needs a deferred FK but the dialect can only declare FKs inline.
class EmitError : public Error
{
  public:
    EmitError(std::string code, const std::string& message) : Error(std::move(code), message) {}
};

/// Renders CREATE TABLE statements in model order, then ALTER TABLE for deferred FKs.
Script emit_sql(const PhysicalModel& model, Dialect dialect, const EmitOptions& options = {});

} // namespace onda
