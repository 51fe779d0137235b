#pragma once

#include <string>

#include "paintmo/session.hpp"

namespace httplib {
class Server;
}

namespace paintmo {

/// Registers the /api routes on `server`, backed by `service`.
void register_api(httplib::Server& server, SessionService& service);

/// Serves the API until the server is stopped. Blocks.
void serve(SessionService& service, const std::string& host, int port);

} // namespace paintmo
