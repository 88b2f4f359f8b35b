// HTTP service: project storage plus stateless physical/sql endpoints.
//
//   ONDA_DATA_DIR   storage root (default ./onda-data)
//   ONDA_BIND       listen address (default 127.0.0.1)
//   ONDA_PORT       listen port (default 8080)
//   ONDA_STATIC_DIR optional directory served at / (built web UI)

#include "../src/service/http_api.hpp"

#include <httplib.h>

#include <csignal>
#include <cstdlib>
#include <iostream>

namespace {

httplib::Server* running = nullptr;

extern "C" void on_signal(int)
{
    if (running)
        running->stop();
}

std::string env_or(const char* key, const char* fallback)
{
    const char* v = std::getenv(key);
    return v && *v ? v : fallback;
}

} // namespace

int main()
{
    const std::string data_dir = env_or("ONDA_DATA_DIR", "./onda-data");
    const std::string bind = env_or("ONDA_BIND", "127.0.0.1");
    const std::string port_text = env_or("ONDA_PORT", "8080");
    int port = 0;
    try {
        port = std::stoi(port_text);
    } catch (const std::exception&) {
        std::cerr << "onda-server: bad ONDA_PORT '" << port_text << "'\n";
        return 2;
    }

    try {
        onda::service::ProjectStore store(data_dir);
        for (const auto& f : store.skipped())
            std::cerr << "onda-server: skipped unreadable project file " << f << '\n';

        httplib::Server server;
        server.set_payload_max_length(16 * 1024 * 1024);
        onda::service::install_routes(server, store);
        if (const char* dir = std::getenv("ONDA_STATIC_DIR"); dir && *dir)
            if (!server.set_mount_point("/", dir))
                std::cerr << "onda-server: static directory " << dir << " not found\n";

        running = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cerr << "onda-server: listening on " << bind << ':' << port << ", data in " << data_dir << '\n';
        if (!server.listen(bind, port)) {
            std::cerr << "onda-server: cannot listen on " << bind << ':' << port << '\n';
            return 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "onda-server: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
