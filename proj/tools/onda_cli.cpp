// onda command-line front end. Links only the C interface.

#include "onda/onda.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <sys/stat.h>

namespace {

enum Exit { kOk = 0, kInvalid = 1, kUsage = 2, kIo = 3 };

struct Invocation
{
    std::string command;
    std::string input;
    std::string mode = "normal";
    std::string dialect;
    std::string format;
    std::string out;
    bool drop_preamble = false;
};

struct Failure
{
    int code;
};

void diag(const std::string& severity, const std::string& code, const std::string& path, const std::string& msg)
{
    std::cerr << severity << ' ' << code << ' ' << (path.empty() ? "-" : path) << ": " << msg << '\n';
}

[[noreturn]] void usage(const std::string& msg)
{
    std::cerr << "onda: " << msg << '\n';
    throw Failure{kUsage};
}

[[noreturn]] void io_failure(const std::string& msg)
{
    std::cerr << "onda: " << msg << '\n';
    throw Failure{kIo};
}

/// Reports the thread's last C-API error and fails with `exit_code`.
[[noreturn]] void api_failure(const std::string& where, int exit_code)
{
    diag("ERROR", onda_last_error_code(), where, onda_last_error());
    throw Failure{exit_code};
}

std::string read_input(const Invocation& inv)
{
    if (inv.input == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        if (std::cin.bad())
            io_failure("cannot read standard input");
        return ss.str();
    }
    struct stat st{};
    if (::stat(inv.input.c_str(), &st) != 0)
        usage("input file not found: " + inv.input);
    std::ifstream in(inv.input, std::ios::binary);
    if (!in || S_ISDIR(st.st_mode))
        io_failure("cannot read " + inv.input);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        io_failure("cannot read " + inv.input);
    return text;
}

std::string input_format(const Invocation& inv)
{
    if (!inv.format.empty())
        return inv.format;
    if (inv.input == "-")
        usage("reading standard input requires --format dsl|json");
    auto ends_with = [&](const std::string& suffix) {
        return inv.input.size() >= suffix.size() &&
               inv.input.compare(inv.input.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with(".erd"))
        return "dsl";
    if (ends_with(".json"))
        return "json";
    usage("cannot infer the format of " + inv.input + "; pass --format dsl|json");
}

void write_output(const Invocation& inv, const std::string& text)
{
    if (inv.out.empty()) {
        std::cout << text;
        std::cout.flush();
        if (!std::cout)
            io_failure("cannot write standard output");
        return;
    }
    std::ofstream out(inv.out, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out)
        io_failure("cannot write " + inv.out);
}

template <typename T, void (*Free)(T*)>
struct Handle
{
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(p); }
};

struct OwnedString
{
    char* p = nullptr;
    ~OwnedString() { onda_string_free(p); }
};

using Document = Handle<onda_document, onda_document_free>;
using Report = Handle<onda_report, onda_report_free>;
using Physical = Handle<onda_physical, onda_physical_free>;
using ScriptHandle = Handle<onda_script, onda_script_free>;

/// Prints every finding; true when the diagram is valid.
bool report_findings(const onda_document* doc, int mode)
{
    Report r;
    if (onda_validate(doc, mode, &r.p) != ONDA_OK)
        api_failure("-", kInvalid);
    for (size_t i = 0; i < onda_report_count(r.p); ++i)
        diag(onda_report_severity(r.p, i) == ONDA_SEVERITY_WARNING ? "WARNING" : "ERROR", onda_report_code(r.p, i),
             onda_report_path(r.p, i), onda_report_message(r.p, i));
    return onda_report_is_valid(r.p) != 0;
}

int run(const Invocation& inv)
{
    onda_mode mode = ONDA_MODE_NORMAL;
    if (onda_mode_from_name(inv.mode.c_str(), &mode) != ONDA_OK)
        usage(onda_last_error());
    onda_dialect dialect = ONDA_DIALECT_POSTGRESQL;
    if (inv.command == "sql") {
        if (inv.dialect.empty())
            usage(std::string("sql requires --dialect (supported: ") + onda_supported_dialects() + ")");
        if (onda_dialect_from_name(inv.dialect.c_str(), &dialect) != ONDA_OK)
            usage(onda_last_error());
    } else if (!inv.dialect.empty()) {
        usage("--dialect applies only to the sql command");
    }
    if (inv.drop_preamble && inv.command != "sql")
        usage("--drop-preamble applies only to the sql command");

    const std::string format = input_format(inv);
    const std::string text = read_input(inv);
    Document doc;
    const onda_status parsed =
        format == "dsl"
            ? onda_document_from_dsl(text.data(), text.size(), inv.input == "-" ? nullptr : inv.input.c_str(),
                                     &doc.p)
            : onda_document_from_json(text.data(), text.size(), &doc.p);
    if (parsed != ONDA_OK)
        api_failure(inv.input, kInvalid);

    if (inv.command == "validate")
        return report_findings(doc.p, -1) ? kOk : kInvalid;

    if (inv.command == "fmt") {
        OwnedString s;
        if (onda_document_to_dsl(doc.p, &s.p) != ONDA_OK)
            api_failure(inv.input, kInvalid);
        write_output(inv, s.p);
        return kOk;
    }

    if (!report_findings(doc.p, mode))
        return kInvalid;
    Physical pm;
    if (onda_transform(doc.p, mode, &pm.p) != ONDA_OK)
        api_failure(inv.input, kInvalid);

    if (inv.command == "physical") {
        OwnedString s;
        if (onda_physical_to_json(pm.p, &s.p) != ONDA_OK)
            api_failure(inv.input, kInvalid);
        write_output(inv, s.p);
        return kOk;
    }

    ScriptHandle script;
    if (onda_emit_sql(pm.p, dialect, inv.drop_preamble ? 1 : 0, &script.p) != ONDA_OK)
        api_failure(inv.input, kInvalid);
    for (size_t i = 0; i < onda_script_warning_count(script.p); ++i)
        diag("WARNING", "EMIT", onda_dialect_name(dialect), onda_script_warning(script.p, i));
    write_output(inv, onda_script_text(script.p));
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"onda: ER diagram to relational schema compiler"};
    app.require_subcommand(1);
    app.set_version_flag("--version", onda_version());

    Invocation inv;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("input", inv.input, "input file (.erd or .json), or - for standard input")->required();
        sub->add_option("--format", inv.format, "input format")->check(CLI::IsMember({"dsl", "json"}));
        sub->add_option("--mode", inv.mode, "generation mode: normal|simplified");
        sub->add_option("--dialect", inv.dialect, "postgresql|oracle|mysql|mariadb|sqlite");
        sub->add_option("--out", inv.out, "write the artifact here instead of standard output");
        sub->add_flag("--drop-preamble", inv.drop_preamble, "prefix DROP TABLE IF EXISTS statements");
    };
    add_common(app.add_subcommand("validate", "report findings on standard error"));
    add_common(app.add_subcommand("physical", "print the physical model as JSON"));
    add_common(app.add_subcommand("sql", "print the DDL script"));
    add_common(app.add_subcommand("fmt", "print canonical DSL"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        if (auto nl = msg.find('\n'); nl != std::string::npos)
            msg.resize(nl);
        std::cerr << "onda: " << msg << '\n';
        return kUsage;
    }
    inv.command = app.get_subcommands().front()->get_name();

    try {
        return run(inv);
    } catch (const Failure& f) {
        return f.code;
    }
}
