#include "onda/error.hpp"
#include "onda/model_io.hpp"

#include <charconv>
#include <set>

namespace onda {

namespace {

constexpr std::string_view kHeader = "# onda diagram: ";

enum class Tok { Ident, Int, String, LBrace, RBrace, LParen, RParen, Comma, Colon, Arrow, End };

struct Token
{
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

std::string describe(const Token& t)
{
    switch (t.kind) {
    case Tok::Ident:
    case Tok::Int:
        return "'" + t.text + "'";
    case Tok::String:
        return "string";
    case Tok::End:
        return "end of input";
    default:
        return "'" + t.text + "'";
    }
}

/// Index just past the UTF-8 sequence starting at i, or npos if malformed.
std::size_t utf8_next(std::string_view s, std::size_t i)
{
    const auto b = static_cast<unsigned char>(s[i]);
    std::size_t len;
    unsigned min;
    if (b < 0x80)
        return i + 1;
    if ((b & 0xE0) == 0xC0) {
        len = 2;
        min = 0x80;
    } else if ((b & 0xF0) == 0xE0) {
        len = 3;
        min = 0x800;
    } else if ((b & 0xF8) == 0xF0) {
        len = 4;
        min = 0x10000;
    } else {
        return std::string_view::npos;
    }
    if (i + len > s.size())
        return std::string_view::npos;
    unsigned cp = b & (0x7F >> len);
    for (std::size_t k = 1; k < len; ++k) {
        const auto c = static_cast<unsigned char>(s[i + k]);
        if ((c & 0xC0) != 0x80)
            return std::string_view::npos;
        cp = (cp << 6) | (c & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
        return std::string_view::npos;
    return i + len;
}

class Lexer
{
  public:
    explicit Lexer(std::string_view text) : s_(text) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = col_;
            if (i_ >= s_.size()) {
                out.push_back(t);
                return out;
            }
            const char c = s_[i_];
            if (is_ident_start(c)) {
                t.kind = Tok::Ident;
                while (i_ < s_.size() && is_ident_char(s_[i_]))
                    t.text.push_back(advance());
            } else if (c >= '0' && c <= '9') {
                t.kind = Tok::Int;
                while (i_ < s_.size() && s_[i_] >= '0' && s_[i_] <= '9')
                    t.text.push_back(advance());
            } else if (c == '"') {
                t.kind = Tok::String;
                t.text = string_literal();
            } else if (c == '-' && i_ + 1 < s_.size() && s_[i_ + 1] == '>') {
                t.kind = Tok::Arrow;
                t.text = "->";
                advance();
                advance();
            } else {
                switch (c) {
                case '{':
                    t.kind = Tok::LBrace;
                    break;
                case '}':
                    t.kind = Tok::RBrace;
                    break;
                case '(':
                    t.kind = Tok::LParen;
                    break;
                case ')':
                    t.kind = Tok::RParen;
                    break;
                case ',':
                    t.kind = Tok::Comma;
                    break;
                case ':':
                    t.kind = Tok::Colon;
                    break;
                default:
                    fail("unexpected character '" + printable(c) + "'");
                }
                t.text = std::string(1, advance());
            }
            out.push_back(std::move(t));
        }
    }

  private:
    static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

    static std::string printable(char c)
    {
        const auto u = static_cast<unsigned char>(c);
        if (u >= 0x20 && u < 0x7F)
            return std::string(1, c);
        static constexpr char hex[] = "0123456789abcdef";
        return std::string("\\x") + hex[u >> 4] + hex[u & 15];
    }

    [[noreturn]] void fail(const std::string& message) const
    {
        throw ParseError("SYNTAX", std::to_string(line_) + ":" + std::to_string(col_) + ": " + message, line_, col_);
    }

    char advance()
    {
        const char c = s_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space()
    {
        while (i_ < s_.size()) {
            const char c = s_[i_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (i_ < s_.size() && s_[i_] != '\n')
                    advance();
            } else {
                break;
            }
        }
    }

    std::string string_literal()
    {
        advance(); // opening quote
        std::string out;
        while (true) {
            if (i_ >= s_.size())
                fail("unterminated string");
            const char c = s_[i_];
            if (c == '"') {
                advance();
                return out;
            }
            if (c == '\n')
                fail("newline in string; use \\n");
            if (c == '\\') {
                advance();
                if (i_ >= s_.size())
                    fail("unterminated string");
                const char e = advance();
                switch (e) {
                case '"':
                    out.push_back('"');
                    break;
                case '\\':
                    out.push_back('\\');
                    break;
                case 'n':
                    out.push_back('\n');
                    break;
                case 't':
                    out.push_back('\t');
                    break;
                default:
                    fail(std::string("unknown escape '\\") + printable(e) + "'");
                }
                continue;
            }
            const std::size_t next = utf8_next(s_, i_);
            if (next == std::string_view::npos)
                fail("invalid UTF-8 in string");
            while (i_ < next)
                out.push_back(advance());
        }
    }

    std::string_view s_;
    std::size_t i_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

struct PendingHierarchy
{
    std::string super;
    std::vector<std::string> subs;
    Strategy strategy;
};

class Parser
{
  public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Diagram run(std::string name)
    {
        Diagram d;
        d.name = std::move(name);
        std::vector<PendingHierarchy> hierarchies;
        while (peek().kind != Tok::End) {
            const Token& t = peek();
            if (t.kind == Tok::Ident && t.text == "entity")
                d.entities.push_back(entity());
            else if (t.kind == Tok::Ident && t.text == "rel")
                d.relationships.push_back(relationship());
            else if (t.kind == Tok::Ident && t.text == "hierarchy")
                hierarchies.push_back(hierarchy());
            else
                fail(t, "expected 'entity', 'rel' or 'hierarchy'");
        }

        std::set<std::string> taken;
        for (const auto& e : d.entities)
            taken.insert(e.id);
        for (const auto& r : d.relationships)
            taken.insert(r.id);
        for (auto& p : hierarchies) {
            std::string id = p.super + "_isa";
            for (int n = 2; taken.count(id); ++n)
                id = p.super + "_isa_" + std::to_string(n);
            taken.insert(id);
            d.hierarchies.push_back(Hierarchy{id, p.super, std::move(p.subs), p.strategy});
        }
        return d;
    }

  private:
    [[noreturn]] static void fail(const Token& at, const std::string& message)
    {
        throw ParseError("SYNTAX",
                         std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + message + ", found " +
                             describe(at),
                         at.line, at.column);
    }

    const Token& peek(std::size_t ahead = 0) const
    {
        const std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[k];
    }

    Token next()
    {
        Token t = peek();
        if (pos_ < toks_.size() - 1)
            ++pos_;
        return t;
    }

    Token expect(Tok kind, const char* what)
    {
        if (peek().kind != kind)
            fail(peek(), std::string("expected ") + what);
        return next();
    }

    void keyword(std::string_view kw)
    {
        if (peek().kind != Tok::Ident || peek().text != kw)
            fail(peek(), "expected '" + std::string(kw) + "'");
        next();
    }

    bool at_keyword(std::string_view kw, std::size_t ahead = 0) const
    {
        return peek(ahead).kind == Tok::Ident && peek(ahead).text == kw;
    }

    std::string name(const char* what)
    {
        if (peek().kind != Tok::Ident && peek().kind != Tok::String)
            fail(peek(), std::string("expected ") + what);
        return next().text;
    }

    int integer(const Token& t)
    {
        int value = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc() || p != t.text.data() + t.text.size())
            fail(t, "integer out of range");
        return value;
    }

    LogicalType type()
    {
        const Token t = peek();
        if (t.kind != Tok::Ident)
            fail(t, "expected a type (integer, bigint, float, numeric, varchar, text, boolean, date, timestamp)");
        auto kind = type_kind_from_name(t.text);
        if (!kind)
            fail(t, "expected a type (integer, bigint, float, numeric, varchar, text, boolean, date, timestamp)");
        next();
        LogicalType out;
        out.kind = *kind;
        if (*kind == TypeKind::Varchar) {
            expect(Tok::LParen, "'(' after varchar");
            out.length = integer(expect(Tok::Int, "a length"));
            expect(Tok::RParen, "')'");
        } else if (*kind == TypeKind::Numeric) {
            expect(Tok::LParen, "'(' after numeric");
            out.precision = integer(expect(Tok::Int, "a precision"));
            if (peek().kind == Tok::Comma) {
                next();
                out.scale = integer(expect(Tok::Int, "a scale"));
            }
            expect(Tok::RParen, "')'");
        }
        return out;
    }

    bool at_flag() const
    {
        static const std::set<std::string, std::less<>> flags{"pk", "pid", "mandatory", "unique", "auto", "check"};
        // A flag word followed by ':' starts the next attribute instead.
        return peek().kind == Tok::Ident && flags.count(peek().text) && peek(1).kind != Tok::Colon;
    }

    Attribute attribute()
    {
        Attribute a;
        a.name = name("an attribute name or '}'");
        expect(Tok::Colon, "':' after attribute name");
        a.type = type();
        while (at_flag()) {
            const Token flag = next();
            if (flag.text == "pk") {
                a.is_pk = true;
                a.mandatory = true;
            } else if (flag.text == "pid") {
                a.is_partial_id = true;
                a.mandatory = true;
            } else if (flag.text == "mandatory") {
                a.mandatory = true;
            } else if (flag.text == "unique") {
                a.unique = true;
            } else if (flag.text == "auto") {
                a.auto_increment = true;
            } else {
                a.check_sql = expect(Tok::String, "a quoted constraint after 'check'").text;
            }
        }
        return a;
    }

    std::vector<Attribute> attribute_block()
    {
        expect(Tok::LBrace, "'{'");
        std::vector<Attribute> out;
        while (peek().kind != Tok::RBrace)
            out.push_back(attribute());
        next();
        return out;
    }

    Entity entity()
    {
        keyword("entity");
        Entity e;
        e.name = name("an entity name");
        e.id = e.name;
        if (at_keyword("weak")) {
            next();
            e.is_weak = true;
        }
        e.attributes = attribute_block();
        return e;
    }

    RelEnd end()
    {
        RelEnd end;
        end.entity_id = name("an entity name");
        expect(Tok::LParen, "'(' opening a cardinality");
        const Token min = peek();
        if (min.kind != Tok::Int || (min.text != "0" && min.text != "1"))
            fail(min, "min cardinality must be 0 or 1");
        next();
        end.min_card = min.text == "1" ? 1 : 0;
        expect(Tok::Comma, "','");
        const Token max = peek();
        if (max.kind == Tok::Int && max.text == "1")
            end.max_card = MaxCard::One;
        else if (max.kind == Tok::Ident && max.text == "N")
            end.max_card = MaxCard::Many;
        else
            fail(max, "max cardinality must be 1 or N");
        next();
        expect(Tok::RParen, "')' closing a cardinality");
        if (at_keyword("as")) {
            next();
            end.role = name("a role name");
        }
        return end;
    }

    Relationship relationship()
    {
        keyword("rel");
        Relationship r;
        r.name = name("a relationship name");
        r.id = r.name;
        keyword("between");
        r.end_a = end();
        keyword("and");
        r.end_b = end();
        if (peek().kind == Tok::LBrace)
            r.attributes = attribute_block();
        return r;
    }

    PendingHierarchy hierarchy()
    {
        keyword("hierarchy");
        PendingHierarchy h{name("a super-entity name"), {}, Strategy::Complete};
        expect(Tok::Arrow, "'->'");
        expect(Tok::LParen, "'('");
        h.subs.push_back(name("a sub-entity name"));
        while (peek().kind == Tok::Comma) {
            next();
            h.subs.push_back(name("a sub-entity name"));
        }
        expect(Tok::RParen, "')'");
        keyword("strategy");
        const Token s = peek();
        auto st = s.kind == Tok::Ident ? strategy_from_name(s.text) : std::nullopt;
        if (!st)
            fail(s, "expected complete, concrete or single");
        next();
        h.strategy = *st;
        return h;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

bool is_plain_name(std::string_view s)
{
    if (s.empty())
        return false;
    const char c = s.front();
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'))
        return false;
    for (char ch : s)
        if (!((ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_'))
            return false;
    return true;
}

std::string quoted(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\t':
            out += "\\t";
            break;
        default:
            out.push_back(c);
        }
    }
    return out + "\"";
}

std::string name_token(std::string_view s)
{
    return is_plain_name(s) ? std::string(s) : quoted(s);
}

std::string type_text(const LogicalType& t)
{
    std::string out(type_kind_name(t.kind));
    if (t.kind == TypeKind::Varchar)
        out += "(" + std::to_string(t.length.value_or(1)) + ")";
    else if (t.kind == TypeKind::Numeric) {
        out += "(" + std::to_string(t.precision.value_or(1));
        if (t.scale)
            out += "," + std::to_string(*t.scale);
        out += ")";
    }
    return out;
}

void emit_attributes(std::string& out, const std::vector<Attribute>& attrs)
{
    for (const auto& a : attrs) {
        out += "  " + name_token(a.name) + ": " + type_text(a.type);
        if (a.is_pk)
            out += " pk";
        if (a.is_partial_id)
            out += " pid";
        if (a.mandatory && !a.is_pk && !a.is_partial_id)
            out += " mandatory";
        if (a.unique)
            out += " unique";
        if (a.auto_increment)
            out += " auto";
        if (a.check_sql)
            out += " check " + quoted(*a.check_sql);
        out += "\n";
    }
}

} // namespace

Diagram parse_dsl(const DslSource& src)
{
    std::string_view text = src.text;
    std::string name;
    if (text.substr(0, kHeader.size()) == kHeader) {
        const std::size_t eol = text.find('\n');
        const std::string_view rest = text.substr(kHeader.size(), eol == std::string_view::npos
                                                                      ? std::string_view::npos
                                                                      : eol - kHeader.size());
        try {
            auto header = Lexer(rest).run();
            if (header.size() == 2 && header[0].kind == Tok::String)
                name = header[0].text;
        } catch (const ParseError&) {
            // an unreadable header is an ordinary comment
        }
    } else if (src.origin) {
        std::string_view path = *src.origin;
        if (auto slash = path.find_last_of('/'); slash != std::string_view::npos)
            path.remove_prefix(slash + 1);
        if (auto dot = path.find_last_of('.'); dot != std::string_view::npos && dot > 0)
            path = path.substr(0, dot);
        name = std::string(path);
    }
    return Parser(Lexer(text).run()).run(std::move(name));
}

DslSource emit_dsl(const Diagram& d)
{
    auto entity_ref = [&](const std::string& id) {
        const Entity* e = d.find_entity(id);
        return name_token(e ? e->name : id);
    };

    std::string out = std::string(kHeader) + quoted(d.name) + "\n";
    for (const auto& e : d.entities) {
        out += "\nentity " + name_token(e.name) + (e.is_weak ? " weak" : "") + " {\n";
        emit_attributes(out, e.attributes);
        out += "}\n";
    }
    auto end_text = [&](const RelEnd& end) {
        std::string s = entity_ref(end.entity_id) + " (" + std::to_string(end.min_card) + "," +
                        (end.max_card == MaxCard::One ? "1" : "N") + ")";
        if (end.role)
            s += " as " + name_token(*end.role);
        return s;
    };
    for (const auto& r : d.relationships) {
        out += "\nrel " + name_token(r.name) + " between " + end_text(r.end_a) + " and " + end_text(r.end_b);
        if (!r.attributes.empty()) {
            out += " {\n";
            emit_attributes(out, r.attributes);
            out += "}";
        }
        out += "\n";
    }
    for (const auto& h : d.hierarchies) {
        out += "\nhierarchy " + entity_ref(h.super_id) + " -> (";
        for (std::size_t i = 0; i < h.sub_ids.size(); ++i)
            out += (i ? ", " : "") + entity_ref(h.sub_ids[i]);
        out += ") strategy " + std::string(strategy_name(h.strategy)) + "\n";
    }
    return DslSource{std::move(out), std::nullopt};
}

} // namespace onda
