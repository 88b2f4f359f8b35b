#include "onda/onda.h"

#include "onda/model_io.hpp"
#include "onda/sql_emit.hpp"
#include "onda/transform.hpp"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>

struct onda_document
{
    onda::ProjectDocument doc;
};

struct onda_report
{
    onda::ValidationReport report;
    std::vector<std::string> paths;
};

struct onda_physical
{
    onda::PhysicalModel model;
};

struct onda_script
{
    onda::Script script;
};

namespace {

struct LastError
{
    std::string message;
    std::string code;
    std::size_t line = 0;
    std::size_t column = 0;
};

thread_local LastError last_error;

onda_status fail(onda_status status, std::string code, std::string message, std::size_t line = 0,
                 std::size_t column = 0)
{
    last_error = LastError{std::move(message), std::move(code), line, column};
    return status;
}

onda_status ok()
{
    last_error = LastError{};
    return ONDA_OK;
}

/// Runs body, translating exceptions into status codes.
template <typename F>
onda_status guarded(F&& body)
{
    try {
        return body();
    } catch (const onda::ParseError& e) {
        return fail(ONDA_ERR_PARSE, e.code(), e.what(), e.line(), e.column());
    } catch (const onda::VersionError& e) {
        return fail(ONDA_ERR_VERSION, e.code(), e.what());
    } catch (const onda::EmitError& e) {
        return fail(ONDA_ERR_UNSUPPORTED, e.code(), e.what());
    } catch (const onda::ContractError& e) {
        return fail(ONDA_ERR_INVALID_DIAGRAM, e.code(), e.what());
    } catch (const onda::Error& e) {
        return fail(ONDA_ERR_INTERNAL, e.code(), e.what());
    } catch (const std::bad_alloc&) {
        return fail(ONDA_ERR_INTERNAL, "MEMORY", "out of memory");
    } catch (const std::exception& e) {
        return fail(ONDA_ERR_INTERNAL, "INTERNAL", e.what());
    }
}

char* dup_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size());
    out[s.size()] = '\0';
    return out;
}

onda_status null_argument(const char* what)
{
    return fail(ONDA_ERR_ARGUMENT, "ARGUMENT", std::string(what) + " must not be NULL");
}

const onda::Finding* finding(const onda_report* r, std::size_t i)
{
    if (!r || i >= r->report.findings.size())
        return nullptr;
    return &r->report.findings[i];
}

} // namespace

extern "C" {

const char* onda_version(void)
{
    return "1.0.0";
}

const char* onda_last_error(void)
{
    return last_error.message.c_str();
}

const char* onda_last_error_code(void)
{
    return last_error.code.c_str();
}

size_t onda_last_error_line(void)
{
    return last_error.line;
}

size_t onda_last_error_column(void)
{
    return last_error.column;
}

void onda_string_free(char* s)
{
    std::free(s);
}

const char* onda_dialect_name(onda_dialect d)
{
    if (d < ONDA_DIALECT_POSTGRESQL || d > ONDA_DIALECT_SQLITE)
        return "";
    return onda::dialect_name(static_cast<onda::Dialect>(d)).data();
}

onda_status onda_dialect_from_name(const char* name, onda_dialect* out)
{
    if (!name || !out)
        return null_argument("name and out");
    auto d = onda::dialect_from_name(name);
    if (!d)
        return fail(ONDA_ERR_ARGUMENT, "UNKNOWN_DIALECT",
                    "unknown dialect '" + std::string(name) + "' (supported: " + onda::supported_dialects() + ")");
    *out = static_cast<onda_dialect>(*d);
    return ok();
}

const char* onda_supported_dialects(void)
{
    static const std::string names = onda::supported_dialects();
    return names.c_str();
}

const char* onda_mode_name(onda_mode m)
{
    if (m != ONDA_MODE_NORMAL && m != ONDA_MODE_SIMPLIFIED)
        return "";
    return onda::mode_name(static_cast<onda::GenerationMode>(m)).data();
}

onda_status onda_mode_from_name(const char* name, onda_mode* out)
{
    if (!name || !out)
        return null_argument("name and out");
    auto m = onda::mode_from_name(name);
    if (!m)
        return fail(ONDA_ERR_ARGUMENT, "UNKNOWN_MODE",
                    "unknown mode '" + std::string(name) + "' (supported: normal, simplified)");
    *out = static_cast<onda_mode>(*m);
    return ok();
}

onda_status onda_document_from_dsl(const char* text, size_t len, const char* origin, onda_document** out)
{
    if (!out || (!text && len))
        return null_argument("text and out");
    *out = nullptr;
    return guarded([&] {
        onda::DslSource src{std::string(text ? text : "", len), {}};
        if (origin)
            src.origin = origin;
        auto doc = std::make_unique<onda_document>();
        doc->doc.diagram = onda::parse_dsl(src);
        *out = doc.release();
        return ok();
    });
}

onda_status onda_document_from_json(const char* text, size_t len, onda_document** out)
{
    if (!out || (!text && len))
        return null_argument("text and out");
    *out = nullptr;
    return guarded([&] {
        auto doc = std::make_unique<onda_document>();
        doc->doc = onda::parse_project(std::string_view(text ? text : "", len));
        *out = doc.release();
        return ok();
    });
}

onda_status onda_document_to_dsl(const onda_document* doc, char** out)
{
    if (!doc || !out)
        return null_argument("doc and out");
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(onda::emit_dsl(doc->doc.diagram).text);
        return ok();
    });
}

onda_status onda_document_to_json(const onda_document* doc, char** out)
{
    if (!doc || !out)
        return null_argument("doc and out");
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(onda::emit_project(doc->doc));
        return ok();
    });
}

void onda_document_free(onda_document* doc)
{
    delete doc;
}

onda_status onda_validate(const onda_document* doc, int mode, onda_report** out)
{
    if (!doc || !out)
        return null_argument("doc and out");
    *out = nullptr;
    if (mode > ONDA_MODE_SIMPLIFIED)
        return fail(ONDA_ERR_ARGUMENT, "UNKNOWN_MODE", "mode out of range");
    return guarded([&] {
        std::optional<onda::GenerationMode> m;
        if (mode >= 0)
            m = static_cast<onda::GenerationMode>(mode);
        auto r = std::make_unique<onda_report>();
        r->report = onda::validate(doc->doc.diagram, m);
        for (const auto& f : r->report.findings) {
            std::string path;
            for (const auto& p : f.element_path)
                path += (path.empty() ? "" : "/") + p;
            r->paths.push_back(std::move(path));
        }
        *out = r.release();
        return ok();
    });
}

int onda_report_is_valid(const onda_report* r)
{
    return r && r->report.is_valid() ? 1 : 0;
}

size_t onda_report_count(const onda_report* r)
{
    return r ? r->report.findings.size() : 0;
}

onda_severity onda_report_severity(const onda_report* r, size_t i)
{
    const auto* f = finding(r, i);
    return f && f->severity == onda::Severity::Warning ? ONDA_SEVERITY_WARNING : ONDA_SEVERITY_ERROR;
}

const char* onda_report_code(const onda_report* r, size_t i)
{
    const auto* f = finding(r, i);
    return f ? f->code.c_str() : "";
}

const char* onda_report_path(const onda_report* r, size_t i)
{
    return finding(r, i) ? r->paths[i].c_str() : "";
}

const char* onda_report_message(const onda_report* r, size_t i)
{
    const auto* f = finding(r, i);
    return f ? f->message.c_str() : "";
}

void onda_report_free(onda_report* r)
{
    delete r;
}

onda_status onda_transform(const onda_document* doc, onda_mode mode, onda_physical** out)
{
    if (!doc || !out)
        return null_argument("doc and out");
    *out = nullptr;
    if (mode != ONDA_MODE_NORMAL && mode != ONDA_MODE_SIMPLIFIED)
        return fail(ONDA_ERR_ARGUMENT, "UNKNOWN_MODE", "mode out of range");
    return guarded([&] {
        auto pm = std::make_unique<onda_physical>();
        pm->model = onda::transform(doc->doc.diagram, static_cast<onda::GenerationMode>(mode));
        *out = pm.release();
        return ok();
    });
}

onda_status onda_physical_to_json(const onda_physical* pm, char** out)
{
    if (!pm || !out)
        return null_argument("pm and out");
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(onda::physical_model_to_json(pm->model));
        return ok();
    });
}

size_t onda_physical_table_count(const onda_physical* pm)
{
    return pm ? pm->model.tables.size() : 0;
}

const char* onda_physical_table_name(const onda_physical* pm, size_t i)
{
    if (!pm || i >= pm->model.tables.size())
        return "";
    return pm->model.tables[i].name.c_str();
}

void onda_physical_free(onda_physical* pm)
{
    delete pm;
}

onda_status onda_emit_sql(const onda_physical* pm, onda_dialect d, int drop_preamble, onda_script** out)
{
    if (!pm || !out)
        return null_argument("pm and out");
    *out = nullptr;
    if (d < ONDA_DIALECT_POSTGRESQL || d > ONDA_DIALECT_SQLITE)
        return fail(ONDA_ERR_ARGUMENT, "UNKNOWN_DIALECT",
                    "dialect out of range (supported: " + onda::supported_dialects() + ")");
    return guarded([&] {
        auto s = std::make_unique<onda_script>();
        onda::EmitOptions options;
        options.drop_preamble = drop_preamble != 0;
        s->script = onda::emit_sql(pm->model, static_cast<onda::Dialect>(d), options);
        *out = s.release();
        return ok();
    });
}

const char* onda_script_text(const onda_script* s)
{
    return s ? s->script.rendered.c_str() : "";
}

size_t onda_script_statement_count(const onda_script* s)
{
    return s ? s->script.statements.size() : 0;
}

size_t onda_script_warning_count(const onda_script* s)
{
    return s ? s->script.warnings.size() : 0;
}

const char* onda_script_warning(const onda_script* s, size_t i)
{
    if (!s || i >= s->script.warnings.size())
        return "";
    return s->script.warnings[i].c_str();
}

void onda_script_free(onda_script* s)
{
    delete s;
}

} // extern "C"
