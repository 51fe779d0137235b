#include "paintmo/http_api.hpp"

#include <httplib.h>

#include "paintmo/error.hpp"
#include "paintmo/serialization.hpp"

namespace paintmo {

using nlohmann::json;

namespace {

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

int status_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::parse:
    case ErrorKind::schema:
    case ErrorKind::data:
    case ErrorKind::contract: return 400;
    case ErrorKind::precondition: return 409;
    case ErrorKind::io: return 404;
    default: return 500;
    }
}

json error_body(const std::string& kind, const std::string& message) {
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

template <class Handler>
httplib::Server::Handler guarded(Handler&& handler) {
    return [handler = std::forward<Handler>(handler)](const httplib::Request& req, httplib::Response& res) {
        try {
            handler(req, res);
        } catch (const Error& e) {
            reply(res, status_for(e.kind()), error_body(std::string(to_string(e.kind())), e.what()));
        } catch (const json::exception& e) {
            reply(res, 400, error_body("parse", e.what()));
        } catch (const std::exception& e) {
            reply(res, 500, error_body("internal", e.what()));
        }
    };
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse, std::string("request body: ") + e.what());
    }
}

std::size_t index_field(const json& body) {
    if (!body.contains("index") || !body.at("index").is_number_unsigned()) {
        throw Error(ErrorKind::schema, "body needs a nonnegative integer 'index'");
    }
    return body.at("index").get<std::size_t>();
}

} // namespace

void register_api(httplib::Server& server, SessionService& service) {
    server.Get("/api/session", guarded([&](const httplib::Request&, httplib::Response& res) {
                   reply(res, 200, service.view());
               }));
    server.Get("/api/session/history", guarded([&](const httplib::Request&, httplib::Response& res) {
                   reply(res, 200, service.history());
               }));
    server.Get("/api/meta", guarded([&](const httplib::Request&, httplib::Response& res) {
                   reply(res, 200, service.meta());
               }));
    server.Post("/api/session/classify", guarded([&](const httplib::Request& req, httplib::Response& res) {
                    const auto result = service.classify(parse_body(req));
                    if (!result.violations.empty()) {
                        json violations = json::array();
                        for (const auto& v : result.violations) violations.push_back(to_json(v));
                        reply(res, 422, {{"violations", violations}});
                        return;
                    }
                    reply(res, 200, {{"record", result.record}});
                }));
    server.Post("/api/session/select", guarded([&](const httplib::Request& req, httplib::Response& res) {
                    reply(res, 200, service.select(index_field(parse_body(req))));
                }));
    server.Post("/api/session/project", guarded([&](const httplib::Request& req, httplib::Response& res) {
                    reply(res, 202, {{"job_id", service.project(index_field(parse_body(req)))}});
                }));
    server.Get(R"(/api/jobs/(\d+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
                   const auto job = service.job(std::stoull(req.matches[1].str()));
                   if (!job) {
                       reply(res, 404, error_body("not_found", "no job " + req.matches[1].str()));
                       return;
                   }
                   reply(res, 200, *job);
               }));
    server.Post("/api/session/update", guarded([&](const httplib::Request& req, httplib::Response& res) {
                    const json body = parse_body(req);
                    if (body.contains("outcomes")) {
                        reply(res, 200, service.update(outcome_set_from_json(body.at("outcomes")), ""));
                    } else if (body.contains("outcomes_ref")) {
                        const auto path = body.at("outcomes_ref").get<std::string>();
                        reply(res, 200, service.update(load_outcome_set(path), path));
                    } else {
                        throw Error(ErrorKind::schema, "body needs 'outcomes_ref' or 'outcomes'");
                    }
                }));
}

void serve(SessionService& service, const std::string& host, int port) {
    httplib::Server server;
    register_api(server, service);
    if (!server.listen(host, port)) {
        throw Error(ErrorKind::io, "cannot listen on " + host + ":" + std::to_string(port));
    }
}

} // namespace paintmo
