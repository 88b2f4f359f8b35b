#include "onda/sql_emit.hpp"

#include <algorithm>
#include <cstdint>

namespace onda {

namespace {

constexpr std::array<std::string_view, 5> kDialectNames{"postgresql", "oracle", "mysql", "mariadb", "sqlite"};

// Type names in TypeKind order: INTEGER BIGINT FLOAT NUMERIC VARCHAR TEXT BOOLEAN DATE TIMESTAMP
const DialectProfile kProfiles[] = {
    {Dialect::PostgreSql, '"', '"',
     {"INTEGER", "BIGINT", "DOUBLE PRECISION", "NUMERIC", "VARCHAR", "TEXT", "BOOLEAN", "DATE", "TIMESTAMP"},
     AutoIncrementIdiom::IdentityClause, 63, false, BooleanStrategy::Native, true, " CASCADE"},
    {Dialect::Oracle, '"', '"',
     {"NUMBER(10)", "NUMBER(19)", "BINARY_DOUBLE", "NUMBER", "VARCHAR2", "CLOB", "NUMBER(1)", "DATE", "TIMESTAMP"},
     AutoIncrementIdiom::IdentityClause, 30, false, BooleanStrategy::Numeric1Check, false, ""},
    {Dialect::MySql, '`', '`',
     {"INT", "BIGINT", "DOUBLE", "DECIMAL", "VARCHAR", "TEXT", "BOOLEAN", "DATE", "DATETIME"},
     AutoIncrementIdiom::ColumnKeyword, 64, false, BooleanStrategy::Native, true, ""},
    {Dialect::MariaDb, '`', '`',
     {"INT", "BIGINT", "DOUBLE", "DECIMAL", "VARCHAR", "TEXT", "BOOLEAN", "DATE", "DATETIME"},
     AutoIncrementIdiom::ColumnKeyword, 64, false, BooleanStrategy::Native, true, ""},
    {Dialect::Sqlite, '"', '"',
     {"INTEGER", "BIGINT", "REAL", "NUMERIC", "VARCHAR", "TEXT", "INTEGER", "DATE", "TIMESTAMP"},
     AutoIncrementIdiom::IntegerPkKeyword, 1024, true, BooleanStrategy::Numeric1Check, true, ""},
};

std::uint32_t fnv1a(std::string_view s)
{
    std::uint32_t h = 2166136261u;
    for (unsigned char c : s) {
        h ^= c;
        h *= 16777619u;
    }
    return h;
}

std::string base36_4(std::uint32_t h)
{
    static constexpr char digits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
    std::uint32_t v = h % (36u * 36u * 36u * 36u);
    std::string out(4, '0');
    for (int i = 3; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v % 36];
        v /= 36;
    }
    return out;
}

std::string shorten(std::string_view name, std::size_t limit, int attempt)
{
    std::string key(name);
    if (attempt > 0)
        key += "#" + std::to_string(attempt);
    return std::string(name.substr(0, limit - 5)) + "_" + base36_4(fnv1a(key));
}

std::string join(const std::vector<std::string>& parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += sep;
        out += parts[i];
    }
    return out;
}

class Emitter
{
  public:
    Emitter(const PhysicalModel& model, Dialect d) : model_(model), d_(d), p_(profile(d)), fit_(d, collect_names())
    {
    }

    Script run(const EmitOptions& options)
    {
        Script s;
        s.dialect = d_;
        if (!model_.deferred.empty() && p_.supports_inline_fk_only) {
            std::vector<std::string> cycle;
            for (const auto& fk : model_.deferred)
                cycle.push_back(fk.table + "." + fk.name);
            throw EmitError("EMIT_UNSUPPORTED_CYCLE",
                            std::string(dialect_name(d_)) +
                                " cannot add foreign keys after table creation; the reference cycle needs " +
                                join(cycle, ", ") + " to be deferred");
        }
        for (const auto& [from, to] : fit_.shortened())
            s.warnings.push_back("identifier '" + from + "' shortened to '" + to + "' for " +
                                 std::string(dialect_name(d_)));

        if (options.drop_preamble) {
            if (p_.supports_drop_if_exists) {
                for (auto it = model_.tables.rbegin(); it != model_.tables.rend(); ++it)
                    s.statements.push_back("DROP TABLE IF EXISTS " + id(it->name) + std::string(p_.drop_suffix));
            } else {
                s.warnings.push_back(std::string(dialect_name(d_)) +
                                     " has no DROP TABLE IF EXISTS; drop preamble skipped");
            }
        }
        for (const auto& t : model_.tables)
            s.statements.push_back(create_table(t));
        for (const auto& ref : model_.deferred) {
            const Table* t = model_.find_table(ref.table);
            const ForeignKey* fk = t ? t->find_foreign_key(ref.name) : nullptr;
            if (!fk)
                throw ContractError("deferred foreign key '" + ref.table + "." + ref.name + "' not in model");
            s.statements.push_back("ALTER TABLE " + id(t->name) + " ADD " + fk_clause(*t, *fk));
        }
        for (const auto& st : s.statements)
            s.rendered += st + ";\n";
        return s;
    }

  private:
    std::vector<std::string> collect_names()
    {
        // Constraint names must be unique per schema in some engines; number repeats in model order.
        std::set<std::string> used;
        for (const auto& t : model_.tables)
            for (const auto& fk : t.foreign_keys) {
                std::string name = fk.name;
                for (int i = 2; used.count(name); ++i)
                    name = fk.name + "_" + std::to_string(i);
                used.insert(name);
                fk_names_[{t.name, fk.name}] = name;
            }
        std::vector<std::string> names;
        for (const auto& t : model_.tables) {
            names.push_back(t.name);
            for (const auto& c : t.columns)
                names.push_back(c.name);
        }
        names.insert(names.end(), used.begin(), used.end());
        return names;
    }

    std::string id(const std::string& name) const { return quote_identifier(fit_(name), d_); }

    std::string ids(const std::vector<std::string>& names) const
    {
        std::vector<std::string> out;
        for (const auto& n : names)
            out.push_back(id(n));
        return join(out, ", ");
    }

    std::string fk_clause(const Table& t, const ForeignKey& fk) const
    {
        return "CONSTRAINT " + id(fk_names_.at({t.name, fk.name})) + " FOREIGN KEY (" + ids(fk.columns) +
               ") REFERENCES " + id(fk.target_table) + " (" + ids(fk.target_columns) + ")";
    }

    std::string column_line(const Column& c, bool& pk_inline) const
    {
        std::string line = id(c.name) + " ";
        if (c.auto_increment) {
            switch (p_.auto_increment_idiom) {
            case AutoIncrementIdiom::IdentityClause:
                return line + map_type(c.type, d_) + " GENERATED BY DEFAULT AS IDENTITY NOT NULL";
            case AutoIncrementIdiom::ColumnKeyword:
                pk_inline = true;
                return line + map_type(c.type, d_) + " NOT NULL AUTO_INCREMENT PRIMARY KEY";
            case AutoIncrementIdiom::IntegerPkKeyword:
                pk_inline = true;
                return line + "INTEGER PRIMARY KEY AUTOINCREMENT NOT NULL";
            }
        }
        line += map_type(c.type, d_);
        if (!c.nullable)
            line += " NOT NULL";
        return line;
    }

    std::string create_table(const Table& t) const
    {
        std::vector<std::string> lines;
        bool pk_inline = false;
        for (const auto& c : t.columns)
            lines.push_back(column_line(c, pk_inline));
        if (!t.primary_key.empty() && !pk_inline)
            lines.push_back("PRIMARY KEY (" + ids(t.primary_key) + ")");
        for (const auto& u : t.uniques)
            lines.push_back("UNIQUE (" + ids(u) + ")");
        for (const auto& c : t.columns) {
            if (c.type.kind == TypeKind::Boolean && p_.boolean_strategy == BooleanStrategy::Numeric1Check)
                lines.push_back("CHECK (" + id(c.name) + " IN (0, 1))");
            if (c.check_sql)
                lines.push_back("CHECK (" + *c.check_sql + ")");
        }
        for (const auto& chk : t.checks)
            lines.push_back("CHECK (" + chk + ")");
        for (const auto& fk : t.foreign_keys)
            if (!model_.is_deferred(t.name, fk.name))
                lines.push_back(fk_clause(t, fk));

        std::string out = "CREATE TABLE " + id(t.name) + " (\n";
        for (std::size_t i = 0; i < lines.size(); ++i)
            out += "  " + lines[i] + (i + 1 < lines.size() ? ",\n" : "\n");
        out += ")";
        return out;
    }

    const PhysicalModel& model_;
    Dialect d_;
    const DialectProfile& p_;
    std::map<std::pair<std::string, std::string>, std::string> fk_names_;
    IdentifierFitter fit_;
};

} // namespace

std::string_view dialect_name(Dialect d)
{
    return kDialectNames[static_cast<std::size_t>(d)];
}

std::optional<Dialect> dialect_from_name(std::string_view name)
{
    for (auto d : kAllDialects)
        if (dialect_name(d) == name)
            return d;
    return std::nullopt;
}

std::string supported_dialects()
{
    std::string out;
    for (auto d : kAllDialects) {
        if (!out.empty())
            out += ", ";
        out += dialect_name(d);
    }
    return out;
}

const DialectProfile& profile(Dialect d)
{
    return kProfiles[static_cast<std::size_t>(d)];
}

std::string map_type(const LogicalType& type, Dialect d)
{
    std::string out(profile(d).type_map[static_cast<std::size_t>(type.kind)]);
    if (type.kind == TypeKind::Varchar && type.length)
        out += "(" + std::to_string(*type.length) + ")";
    if (type.kind == TypeKind::Numeric && type.precision) {
        out += "(" + std::to_string(*type.precision);
        if (type.scale)
            out += "," + std::to_string(*type.scale);
        out += ")";
    }
    return out;
}

std::string quote_identifier(std::string_view name, Dialect d)
{
    if (!is_reserved_word(name, d))
        return std::string(name);
    const auto& p = profile(d);
    return p.quote_open + std::string(name) + p.quote_close;
}

std::string fit_identifier(std::string_view name, Dialect d)
{
    const std::size_t limit = profile(d).max_identifier_len;
    if (name.size() <= limit)
        return std::string(name);
    return shorten(name, limit, 0);
}

IdentifierFitter::IdentifierFitter(Dialect d, const std::vector<std::string>& all_names)
{
    const std::size_t limit = profile(d).max_identifier_len;
    std::set<std::string> taken;
    std::set<std::string> long_names;
    for (const auto& n : all_names) {
        if (n.size() <= limit) {
            fitted_.emplace(n, n);
            taken.insert(n);
        } else {
            long_names.insert(n);
        }
    }
    for (const auto& n : long_names) {
        std::string s;
        for (int attempt = 0;; ++attempt) {
            s = shorten(n, limit, attempt);
            if (!taken.count(s))
                break;
        }
        taken.insert(s);
        fitted_.emplace(n, s);
        shortened_.emplace_back(n, s);
    }
}

const std::string& IdentifierFitter::operator()(const std::string& name) const
{
    auto it = fitted_.find(name);
    if (it == fitted_.end())
        throw ContractError("identifier '" + name + "' was not registered");
    return it->second;
}

Script emit_sql(const PhysicalModel& model, Dialect dialect, const EmitOptions& options)
{
    return Emitter(model, dialect).run(options);
}

} // namespace onda
