#pragma once

// HTTP routes over a Workbench. Errors become {"error":{"code","message"}}
// with the module error name as the code.

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "mindforge/error.hpp"
#include "mindforge/workbench.hpp"

namespace mindforge {

namespace detail {

inline void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline httplib::Server::Handler guarded(std::function<json(const httplib::Request&)> fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, fn(req));
    } catch (const Error& e) {
      send_json(res, error_json(e), http_status(e.code()));
    } catch (const json::exception& e) {
      send_json(res, error_json(Error(ErrorCode::BadRequest, e.what())), 400);
    } catch (const std::exception& e) {
      send_json(res, {{"error", {{"code", "Internal"}, {"message", e.what()}}}}, 500);
    }
  };
}

}  // namespace detail

inline void install_routes(httplib::Server& srv, std::shared_ptr<Workbench> wb) {
  using detail::guarded;
  using Req = httplib::Request;

  srv.Get("/api/mindmap", guarded([wb](const Req&) { return wb->mindmap_json(); }));
  srv.Put("/api/mindmap", guarded([wb](const Req& r) { return wb->put_mindmap(r.body); }));
  srv.Post("/api/mindmap/save", guarded([wb](const Req&) { return wb->save(); }));
  srv.Post("/api/expansion/preview",
           guarded([wb](const Req& r) { return wb->preview(Workbench::parse_body(r.body)); }));
  srv.Post("/api/search", guarded([wb](const Req& r) { return wb->start_search(Workbench::parse_body(r.body)); }));
  srv.Get(R"(/api/search/([^/]+)/results)", guarded([wb](const Req& r) {
            std::optional<std::string> facet;
            if (r.has_param("facet")) facet = r.get_param_value("facet");
            return wb->results(r.matches[1], facet);
          }));
  srv.Post(R"(/api/search/([^/]+)/support)",
           guarded([wb](const Req& r) { return wb->support(r.matches[1], Workbench::parse_body(r.body)); }));
  srv.Post("/api/import", guarded([wb](const Req& r) { return wb->import(Workbench::parse_body(r.body)); }));
  srv.Get("/api/catalog/venues", guarded([wb](const Req&) { return wb->venues(); }));
  srv.Get("/api/sources", guarded([wb](const Req&) { return wb->sources(); }));

  if (const auto& dir = wb->config().static_dir) srv.set_mount_point("/", *dir);
}

}  // namespace mindforge
