#include "project_store.hpp"

#include "json_support.hpp"

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fcntl.h>
#include <fstream>
#include <iterator>
#include <random>
#include <unistd.h>

namespace onda::service {

namespace fs = std::filesystem;
using detail::ojson;

namespace {

std::string utc_now()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t secs = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

void write_all(int fd, const std::string& data, const fs::path& path)
{
    std::size_t done = 0;
    while (done < data.size()) {
        const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw StorageError("write " + path.string() + ": " + std::strerror(errno));
        }
        done += static_cast<std::size_t>(n);
    }
}

void fsync_dir(const fs::path& dir)
{
    const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (fd >= 0) {
        ::fsync(fd);
        ::close(fd);
    }
}

ProjectRecord record_from_json(const std::string& text)
{
    const ojson j = ojson::parse(text);
    ProjectRecord r;
    r.summary.id = j.at("id").get<std::string>();
    r.summary.name = j.at("name").get<std::string>();
    r.summary.version = j.at("version").get<long long>();
    r.summary.updated_at = j.at("updated_at").get<std::string>();
    r.document = emit_project(parse_project(detail::dump_canonical(j.at("document"))));
    return r;
}

ojson summary_json(const ProjectSummary& s)
{
    ojson j = ojson::object();
    j["id"] = s.id;
    j["name"] = s.name;
    j["version"] = s.version;
    j["updated_at"] = s.updated_at;
    return j;
}

} // namespace

bool is_valid_project_id(std::string_view id)
{
    if (id.empty() || id.size() > 64)
        return false;
    for (char c : id)
        if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_'))
            return false;
    return true;
}

std::string record_to_json(const ProjectRecord& record)
{
    ojson j = summary_json(record.summary);
    j["document"] = ojson::parse(record.document);
    return detail::dump_canonical(j);
}

std::string summaries_to_json(const std::vector<ProjectSummary>& summaries)
{
    ojson arr = ojson::array();
    for (const auto& s : summaries)
        arr.push_back(summary_json(s));
    ojson j = ojson::object();
    j["projects"] = std::move(arr);
    return detail::dump_canonical(j);
}

ProjectStore::ProjectStore(fs::path root) : dir_(std::move(root) / "projects")
{
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec)
        throw StorageError("cannot create " + dir_.string() + ": " + ec.message());
    for (const auto& entry : fs::directory_iterator(dir_)) {
        const fs::path p = entry.path();
        const std::string fname = p.filename().string();
        if (fname.find(".tmp") != std::string::npos) {
            fs::remove(p, ec);
            continue;
        }
        if (p.extension() != ".json")
            continue;
        try {
            std::ifstream in(p, std::ios::binary);
            std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            ProjectRecord r = record_from_json(text);
            if (r.summary.id + ".json" != fname || !is_valid_project_id(r.summary.id))
                throw StorageError("id does not match file name");
            records_.emplace(r.summary.id, std::move(r));
        } catch (const std::exception&) {
            skipped_.push_back(p.string());
        }
    }
}

fs::path ProjectStore::file_for(const std::string& id) const
{
    return dir_ / (id + ".json");
}

std::string ProjectStore::new_id()
{
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    static constexpr char alphabet[] = "0123456789abcdefghijklmnopqrstuvwxyz";
    while (true) {
        std::string id;
        for (int i = 0; i < 16; ++i)
            id += alphabet[rng() % 36];
        std::shared_lock lock(index_mutex_);
        if (!records_.count(id))
            return id;
    }
}

std::shared_ptr<std::mutex> ProjectStore::writer_lock(const std::string& id)
{
    std::lock_guard lock(writers_mutex_);
    auto& m = writers_[id];
    if (!m)
        m = std::make_shared<std::mutex>();
    return m;
}

void ProjectStore::write_file(const ProjectRecord& record) const
{
    static std::atomic<unsigned long> counter{0};
    const fs::path target = file_for(record.summary.id);
    const fs::path tmp = dir_ / (record.summary.id + ".json.tmp" + std::to_string(::getpid()) + "_" +
                                 std::to_string(counter.fetch_add(1)));
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0)
        throw StorageError("open " + tmp.string() + ": " + std::strerror(errno));
    try {
        write_all(fd, record_to_json(record), tmp);
        if (::fsync(fd) != 0)
            throw StorageError("fsync " + tmp.string() + ": " + std::strerror(errno));
    } catch (...) {
        ::close(fd);
        ::unlink(tmp.c_str());
        throw;
    }
    ::close(fd);
    if (::rename(tmp.c_str(), target.c_str()) != 0) {
        const std::string err = std::strerror(errno);
        ::unlink(tmp.c_str());
        throw StorageError("rename " + target.string() + ": " + err);
    }
    fsync_dir(dir_);
}

std::vector<ProjectSummary> ProjectStore::list() const
{
    std::shared_lock lock(index_mutex_);
    std::vector<ProjectSummary> out;
    for (const auto& [_, r] : records_)
        out.push_back(r.summary);
    return out;
}

ProjectRecord ProjectStore::get(const std::string& id) const
{
    std::shared_lock lock(index_mutex_);
    auto it = records_.find(id);
    if (it == records_.end())
        throw NotFoundError(id);
    return it->second;
}

ProjectRecord ProjectStore::create(const std::string& name, const ProjectDocument& doc)
{
    ProjectRecord r;
    r.summary.id = new_id();
    r.summary.name = name;
    r.summary.version = 1;
    r.summary.updated_at = utc_now();
    r.document = emit_project(doc);
    auto writer = writer_lock(r.summary.id);
    std::lock_guard guard(*writer);
    write_file(r);
    std::unique_lock lock(index_mutex_);
    records_.emplace(r.summary.id, r);
    return r;
}

ProjectRecord ProjectStore::save(const std::string& id, const ProjectDocument& doc, long long expected_version,
                                 const std::optional<std::string>& name)
{
    auto writer = writer_lock(id);
    std::lock_guard guard(*writer);
    ProjectRecord r = get(id);
    if (r.summary.version != expected_version)
        throw ConflictError(expected_version, r.summary.version);
    r.summary.version += 1;
    r.summary.updated_at = utc_now();
    if (name)
        r.summary.name = *name;
    r.document = emit_project(doc);
    write_file(r);
    std::unique_lock lock(index_mutex_);
    records_[id] = r;
    return r;
}

void ProjectStore::remove(const std::string& id)
{
    auto writer = writer_lock(id);
    std::lock_guard guard(*writer);
    get(id);
    std::error_code ec;
    fs::remove(file_for(id), ec);
    if (ec)
        throw StorageError("remove " + file_for(id).string() + ": " + ec.message());
    fsync_dir(dir_);
    std::unique_lock lock(index_mutex_);
    records_.erase(id);
}

} // namespace onda::service
