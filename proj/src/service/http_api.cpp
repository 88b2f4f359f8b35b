#include "http_api.hpp"

#include "json_support.hpp"

#include "onda/sql_emit.hpp"
#include "onda/transform.hpp"

#include <httplib.h>

namespace onda::service {

namespace {

using detail::ojson;
using json = nlohmann::json;

constexpr const char* kJson = "application/json";

/// Error with an HTTP status and envelope details.
struct HttpError
{
    int status;
    std::string code;
    std::string message;
    ojson details = ojson::object();
};

void send_json(httplib::Response& res, int status, const ojson& body)
{
    res.status = status;
    res.set_content(detail::dump_canonical(body), kJson);
}

void send_error(httplib::Response& res, const HttpError& e)
{
    ojson err = ojson::object();
    err["code"] = e.code;
    err["message"] = e.message;
    err["details"] = e.details;
    ojson body = ojson::object();
    body["error"] = std::move(err);
    send_json(res, e.status, body);
}

HttpError from_parse_error(const ParseError& e, const std::string& pointer_prefix = "")
{
    HttpError h{422, e.code(), e.what()};
    if (e.line() > 0) {
        h.details["line"] = e.line();
        h.details["column"] = e.column();
    }
    if (e.code() == "SCHEMA")
        h.details["pointer"] = pointer_prefix + e.pointer();
    return h;
}

HttpError from_version_error(const VersionError& e)
{
    HttpError h{422, e.code(), e.what()};
    h.details["found"] = e.found();
    h.details["supported"] = e.supported();
    return h;
}

/// Parses a request envelope; malformed JSON reports line and column.
json parse_body(const std::string& body)
{
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        for (std::size_t i = 0; i < offset && i < body.size(); ++i) {
            if (body[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError("PARSE",
                         "malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column),
                         line, column);
    }
}

[[noreturn]] void bad_field(const std::string& pointer, const std::string& message)
{
    HttpError h{422, "SCHEMA", pointer + ": " + message};
    h.details["pointer"] = pointer;
    throw h;
}

void allow_keys(const json& j, std::initializer_list<std::string_view> keys)
{
    if (!j.is_object())
        bad_field("/", "expected an object");
    for (const auto& [k, _] : j.items()) {
        bool known = false;
        for (auto allowed : keys)
            known = known || k == allowed;
        if (!known)
            bad_field("/" + k, "unknown field '" + k + "'");
    }
}

ProjectDocument document_field(const json& j)
{
    if (!j.contains("document"))
        bad_field("/", "missing field 'document'");
    try {
        return parse_project(j.at("document").dump());
    } catch (const ParseError& e) {
        throw from_parse_error(e, "/document");
    }
}

std::optional<std::string> name_field(const json& j)
{
    if (!j.contains("name"))
        return std::nullopt;
    if (!j.at("name").is_string())
        bad_field("/name", "expected a string");
    return j.at("name").get<std::string>();
}

GenerationMode mode_param(const httplib::Request& req)
{
    if (!req.has_param("mode"))
        return GenerationMode::Normal;
    const std::string m = req.get_param_value("mode");
    auto mode = mode_from_name(m);
    if (!mode) {
        HttpError h{422, "UNKNOWN_MODE", "unknown mode '" + m + "' (supported: normal, simplified)"};
        h.details["supported"] = ojson::array({"normal", "simplified"});
        throw h;
    }
    return *mode;
}

Dialect dialect_param(const httplib::Request& req)
{
    const std::string d = req.has_param("dialect") ? req.get_param_value("dialect") : "";
    auto dialect = dialect_from_name(d);
    if (!dialect) {
        HttpError h{422, "UNKNOWN_DIALECT",
                    (d.empty() ? std::string("missing dialect") : "unknown dialect '" + d + "'") +
                        " (supported: " + supported_dialects() + ")"};
        ojson names = ojson::array();
        for (auto x : kAllDialects)
            names.push_back(std::string(dialect_name(x)));
        h.details["supported"] = std::move(names);
        throw h;
    }
    return *dialect;
}

ojson findings_json(const ValidationReport& report)
{
    ojson arr = ojson::array();
    for (const auto& f : report.findings) {
        ojson j = ojson::object();
        j["severity"] = std::string(severity_name(f.severity));
        j["code"] = f.code;
        j["path"] = f.element_path;
        j["message"] = f.message;
        arr.push_back(std::move(j));
    }
    return arr;
}

ojson invalid_payload(const ValidationReport& report)
{
    ojson body = ojson::object();
    body["valid"] = false;
    body["findings"] = findings_json(report);
    return body;
}

void send_record(httplib::Response& res, int status, const ProjectRecord& r)
{
    res.status = status;
    res.set_content(record_to_json(r), kJson);
}

/// Runs a handler body and converts failures into error envelopes.
template <typename F>
httplib::Server::Handler handler(F body)
{
    return [body](const httplib::Request& req, httplib::Response& res) {
        try {
            body(req, res);
        } catch (const HttpError& e) {
            send_error(res, e);
        } catch (const ParseError& e) {
            send_error(res, from_parse_error(e));
        } catch (const VersionError& e) {
            send_error(res, from_version_error(e));
        } catch (const NotFoundError& e) {
            HttpError h{404, e.code(), e.what()};
            send_error(res, h);
        } catch (const ConflictError& e) {
            HttpError h{409, e.code(), e.what()};
            h.details["current_version"] = e.current_version();
            send_error(res, h);
        } catch (const EmitError& e) {
            send_error(res, HttpError{422, e.code(), e.what()});
        } catch (const Error& e) {
            send_error(res, HttpError{500, e.code(), e.what()});
        } catch (const std::exception& e) {
            send_error(res, HttpError{500, "INTERNAL", e.what()});
        }
    };
}

const char* kIdRoute = R"(/api/projects/([A-Za-z0-9_-]+))";

} // namespace

void install_routes(httplib::Server& server, ProjectStore& store)
{
    server.Get("/api/projects", handler([&store](const httplib::Request&, httplib::Response& res) {
                   res.set_content(summaries_to_json(store.list()), kJson);
               }));

    server.Post("/api/projects", handler([&store](const httplib::Request& req, httplib::Response& res) {
                    const json body = parse_body(req.body);
                    allow_keys(body, {"name", "document"});
                    ProjectDocument doc = document_field(body);
                    const std::string name = name_field(body).value_or(doc.diagram.name);
                    send_record(res, 201, store.create(name, doc));
                }));

    server.Get(kIdRoute, handler([&store](const httplib::Request& req, httplib::Response& res) {
                   send_record(res, 200, store.get(req.matches[1]));
               }));

    server.Put(kIdRoute, handler([&store](const httplib::Request& req, httplib::Response& res) {
                   const json body = parse_body(req.body);
                   allow_keys(body, {"name", "document", "expected_version"});
                   if (!body.contains("expected_version"))
                       bad_field("/", "missing field 'expected_version'");
                   if (!body.at("expected_version").is_number_integer())
                       bad_field("/expected_version", "expected an integer");
                   const long long expected = body.at("expected_version").get<long long>();
                   ProjectDocument doc = document_field(body);
                   send_record(res, 200, store.save(req.matches[1], doc, expected, name_field(body)));
               }));

    server.Delete(kIdRoute, handler([&store](const httplib::Request& req, httplib::Response& res) {
                      store.remove(req.matches[1]);
                      res.status = 204;
                  }));

    server.Post("/api/physical", handler([](const httplib::Request& req, httplib::Response& res) {
                    const GenerationMode mode = mode_param(req);
                    const ProjectDocument doc = parse_project(req.body);
                    const ValidationReport report = validate(doc.diagram, mode);
                    if (!report.is_valid()) {
                        send_json(res, 200, invalid_payload(report));
                        return;
                    }
                    ojson body = ojson::object();
                    body["valid"] = true;
                    body["findings"] = findings_json(report);
                    body["model"] = ojson::parse(physical_model_to_json(transform(doc.diagram, mode)));
                    send_json(res, 200, body);
                }));

    server.Post("/api/sql", handler([](const httplib::Request& req, httplib::Response& res) {
                    const GenerationMode mode = mode_param(req);
                    const Dialect dialect = dialect_param(req);
                    const ProjectDocument doc = parse_project(req.body);
                    const ValidationReport report = validate(doc.diagram, mode);
                    if (!report.is_valid()) {
                        send_json(res, 200, invalid_payload(report));
                        return;
                    }
                    const Script script = emit_sql(transform(doc.diagram, mode), dialect);
                    res.set_content(script.rendered, "text/plain; charset=utf-8");
                }));

    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty())
            return;
        if (res.status == 404)
            send_error(res, HttpError{404, "NOT_FOUND", "no route for " + req.method + " " + req.path});
        else
            send_error(res, HttpError{res.status, "HTTP_" + std::to_string(res.status), httplib::status_message(res.status)});
    });
}

} // namespace onda::service
