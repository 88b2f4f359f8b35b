/* C interface to the onda schema compiler.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every function that can fail returns an onda_status; on failure the
 * details are available from onda_last_error*() on the calling thread.
 * Strings returned through char** are owned by the caller (onda_string_free);
 * const char* results stay valid as long as the handle they came from.
 */
#ifndef ONDA_ONDA_H
#define ONDA_ONDA_H

#include <stddef.h>

#if defined(_WIN32)
#define ONDA_API __declspec(dllexport)
#else
#define ONDA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum onda_status {
    ONDA_OK = 0,
    ONDA_ERR_ARGUMENT = 1,
    ONDA_ERR_PARSE = 2,
    ONDA_ERR_VERSION = 3,
    ONDA_ERR_INVALID_DIAGRAM = 4,
    ONDA_ERR_UNSUPPORTED = 5,
    ONDA_ERR_INTERNAL = 99
} onda_status;

typedef enum onda_mode { ONDA_MODE_NORMAL = 0, ONDA_MODE_SIMPLIFIED = 1 } onda_mode;

typedef enum onda_dialect {
    ONDA_DIALECT_POSTGRESQL = 0,
    ONDA_DIALECT_ORACLE = 1,
    ONDA_DIALECT_MYSQL = 2,
    ONDA_DIALECT_MARIADB = 3,
    ONDA_DIALECT_SQLITE = 4
} onda_dialect;

typedef enum onda_severity { ONDA_SEVERITY_ERROR = 0, ONDA_SEVERITY_WARNING = 1 } onda_severity;

typedef struct onda_document onda_document;
typedef struct onda_report onda_report;
typedef struct onda_physical onda_physical;
typedef struct onda_script onda_script;

ONDA_API const char* onda_version(void);

/* Last failure on this thread. Message and code are "" after success. */
ONDA_API const char* onda_last_error(void);
ONDA_API const char* onda_last_error_code(void);
ONDA_API size_t onda_last_error_line(void);
ONDA_API size_t onda_last_error_column(void);

ONDA_API void onda_string_free(char* s);

ONDA_API const char* onda_dialect_name(onda_dialect d);
ONDA_API onda_status onda_dialect_from_name(const char* name, onda_dialect* out);
/* "postgresql, oracle, mysql, mariadb, sqlite" */
ONDA_API const char* onda_supported_dialects(void);
ONDA_API const char* onda_mode_name(onda_mode m);
ONDA_API onda_status onda_mode_from_name(const char* name, onda_mode* out);

/* Functions with an out parameter set it to NULL on failure. Accessors return
   "" (or 0) for a NULL handle or an index out of range. */

/* origin names the source (file path) and may be NULL. */
ONDA_API onda_status onda_document_from_dsl(const char* text, size_t len, const char* origin, onda_document** out);
ONDA_API onda_status onda_document_from_json(const char* text, size_t len, onda_document** out);
ONDA_API onda_status onda_document_to_dsl(const onda_document* doc, char** out);
ONDA_API onda_status onda_document_to_json(const onda_document* doc, char** out);
ONDA_API void onda_document_free(onda_document* doc);

/* mode < 0 validates independently of any generation mode. */
ONDA_API onda_status onda_validate(const onda_document* doc, int mode, onda_report** out);
ONDA_API int onda_report_is_valid(const onda_report* r);
ONDA_API size_t onda_report_count(const onda_report* r);
ONDA_API onda_severity onda_report_severity(const onda_report* r, size_t i);
ONDA_API const char* onda_report_code(const onda_report* r, size_t i);
/* Element path joined with '/'. */
ONDA_API const char* onda_report_path(const onda_report* r, size_t i);
ONDA_API const char* onda_report_message(const onda_report* r, size_t i);
ONDA_API void onda_report_free(onda_report* r);

/* Fails with ONDA_ERR_INVALID_DIAGRAM when the diagram does not validate under mode. */
ONDA_API onda_status onda_transform(const onda_document* doc, onda_mode mode, onda_physical** out);
ONDA_API onda_status onda_physical_to_json(const onda_physical* pm, char** out);
ONDA_API size_t onda_physical_table_count(const onda_physical* pm);
ONDA_API const char* onda_physical_table_name(const onda_physical* pm, size_t i);
ONDA_API void onda_physical_free(onda_physical* pm);

/* ONDA_ERR_UNSUPPORTED when the model needs deferred foreign keys the dialect cannot express. */
ONDA_API onda_status onda_emit_sql(const onda_physical* pm, onda_dialect d, int drop_preamble, onda_script** out);
ONDA_API const char* onda_script_text(const onda_script* s);
ONDA_API size_t onda_script_statement_count(const onda_script* s);
ONDA_API size_t onda_script_warning_count(const onda_script* s);
ONDA_API const char* onda_script_warning(const onda_script* s, size_t i);
ONDA_API void onda_script_free(onda_script* s);

#ifdef __cplusplus
}
#endif

#endif
