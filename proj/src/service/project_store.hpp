#pragma once

#include "onda/error.hpp"
#include "onda/model_io.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace onda::service {

struct ProjectSummary
{
    std::string id;
    std::string name;
    long long version = 0;
    std::string updated_at;
};

struct ProjectRecord
{
    ProjectSummary summary;
    /// Canonical project JSON (emit_project output).
    std::string document;
};

class NotFoundError : public Error
{
  public:
    explicit NotFoundError(const std::string& id) : Error("NOT_FOUND", "no project with id '" + id + "'") {}
};

class ConflictError : public Error
{
  public:
    ConflictError(long long expected, long long current)
        : Error("VERSION_CONFLICT", "expected version " + std::to_string(expected) + " but the project is at version " +
                                        std::to_string(current)),
          current_(current)
    {
    }

    long long current_version() const noexcept { return current_; }

  private:
    long long current_;
};

class StorageError : public Error
{
  public:
    explicit StorageError(const std::string& message) : Error("STORAGE", message) {}
};

/// One canonical JSON file per project under <root>/projects. Writes go to a
/// temp file, are fsynced and renamed into place; the in-memory index is
/// rebuilt from the directory on construction.
class ProjectStore
{
  public:
    explicit ProjectStore(std::filesystem::path root);

    std::vector<ProjectSummary> list() const;
    ProjectRecord get(const std::string& id) const;
    ProjectRecord create(const std::string& name, const ProjectDocument& doc);
    /// Replaces the document when expected_version matches; a null name keeps the current one.
    ProjectRecord save(const std::string& id, const ProjectDocument& doc, long long expected_version,
                       const std::optional<std::string>& name = std::nullopt);
    void remove(const std::string& id);

    /// Files skipped during the startup scan (unreadable or malformed).
    const std::vector<std::string>& skipped() const { return skipped_; }

  private:
    std::shared_ptr<std::mutex> writer_lock(const std::string& id);
    void write_file(const ProjectRecord& record) const;
    std::filesystem::path file_for(const std::string& id) const;
    std::string new_id();

    std::filesystem::path dir_;
    mutable std::shared_mutex index_mutex_;
    std::map<std::string, ProjectRecord> records_;
    std::mutex writers_mutex_;
    std::map<std::string, std::shared_ptr<std::mutex>> writers_;
    std::vector<std::string> skipped_;
};

/// Serialises a record as {"id","name","version","updated_at","document"} (canonical layout).
std::string record_to_json(const ProjectRecord& record);
std::string summaries_to_json(const std::vector<ProjectSummary>& summaries);

bool is_valid_project_id(std::string_view id);

} // namespace onda::service
