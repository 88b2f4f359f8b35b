#pragma once

#include "project_store.hpp"

namespace httplib {
class Server;
}

namespace onda::service {

/// Registers the /api routes on `server`. The store must outlive the server.
void install_routes(httplib::Server& server, ProjectStore& store);

} // namespace onda::service
