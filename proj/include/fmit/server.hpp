#pragma once

// HTTP/JSON front end for semi-automatic sessions. Sessions live in memory
// only and are evicted least-recently-used once the store is full.

#include <httplib.h>

#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>

#include "fmit/json.hpp"
#include "fmit/session.hpp"
#include "fmit/xml.hpp"

namespace fmit {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8087;
  bool cors = false;
  std::string staticDir;  // UI bundle; a placeholder page is served when empty
  std::size_t maxModelBytes = std::size_t{1} << 20;
  std::size_t capacity = 64;
  ComparisonOptions comparison;
};

class SessionStore {
 public:
  struct Entry {
    std::mutex mutex;  // serializes transitions of one session
    Session session;
  };

  explicit SessionStore(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  std::shared_ptr<Entry> insert(Session s) {
    auto entry = std::make_shared<Entry>();
    const std::string id = s.id;
    entry->session = std::move(s);
    std::lock_guard lock(mutex_);
    while (index_.size() >= capacity_) {
      index_.erase(order_.back());
      order_.pop_back();
    }
    order_.push_front(id);
    index_[id] = {entry, order_.begin()};
    return entry;
  }

  std::shared_ptr<Entry> find(const std::string& id) {
    std::lock_guard lock(mutex_);
    auto it = index_.find(id);
    if (it == index_.end()) return nullptr;
    order_.splice(order_.begin(), order_, it->second.second);
    return it->second.first;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return index_.size();
  }

 private:
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<std::string> order_;  // most recent first
  std::unordered_map<std::string, std::pair<std::shared_ptr<Entry>, std::list<std::string>::iterator>> index_;
};

namespace detail {

inline void sendJson(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void sendError(httplib::Response& res, int status, std::string_view code, std::string_view message,
                      Json extra = Json::object()) {
  Json body = {{"error", code}, {"message", message}};
  body.update(extra);
  sendJson(res, status, body);
}

inline int statusFor(SessionError::Code code) {
  switch (code) {
    case SessionError::Code::UnknownConflict: return 404;
    default: return 409;
  }
}

inline std::string_view codeName(SessionError::Code code) {
  switch (code) {
    case SessionError::Code::UnknownConflict: return "unknown_conflict";
    case SessionError::Code::AlreadyResolved: return "already_resolved";
    case SessionError::Code::StructuralNotResolvable: return "structural_not_resolvable";
    case SessionError::Code::WrongState: return "wrong_state";
    case SessionError::Code::UnresolvedConflicts: return "unresolved_conflicts";
  }
  return "session_error";
}

inline Json diagnosticsJson(const std::vector<ParseDiagnostic>& ds) {
  Json out = Json::array();
  for (const auto& d : ds)
    out.push_back({{"severity", toString(d.severity)},
                   {"line", d.location.line},
                   {"column", d.location.column},
                   {"message", d.message}});
  return out;
}

inline constexpr const char* kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>fmit</title></head>"
    "<body><h1>fmit</h1><p>The UI bundle is not installed. The JSON API is served under "
    "<code>/api/sessions</code>.</p></body></html>";

}  // namespace detail

class Server {
 public:
  explicit Server(ServerOptions options = {}) : options_(std::move(options)), store_(options_.capacity) {
    http_.set_payload_max_length(options_.maxModelBytes * 2 + 64 * 1024);
    routes();
  }

  SessionStore& store() noexcept { return store_; }
  httplib::Server& http() noexcept { return http_; }

  /// Binds to an ephemeral port on the configured host and returns it.
  int bindToAnyPort() { return http_.bind_to_any_port(options_.host); }
  bool listenAfterBind() { return http_.listen_after_bind(); }
  bool listen() { return http_.listen(options_.host, options_.port); }
  void stop() { http_.stop(); }
  void waitUntilReady() { http_.wait_until_ready(); }

 private:
  void routes() {
    using httplib::Request;
    using httplib::Response;

    if (options_.cors) {
      http_.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                 {"Access-Control-Allow-Headers", "Content-Type"},
                                 {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
      http_.Options(R"(/api/.*)", [](const Request&, Response& res) { res.status = 204; });
    }

    http_.Post("/api/sessions", [this](const Request& req, Response& res) { create(req, res); });

    http_.Get(R"(/api/sessions/([0-9a-f]+))", [this](const Request& req, Response& res) {
      auto entry = lookup(req, res);
      if (!entry) return;
      std::lock_guard lock(entry->mutex);
      detail::sendJson(res, 200, sessionSummary(entry->session));
    });

    http_.Post(R"(/api/sessions/([0-9a-f]+)/conflicts/(\d+)/resolution)",
               [this](const Request& req, Response& res) { resolveConflict(req, res); });

    http_.Post(R"(/api/sessions/([0-9a-f]+)/finalize)", [this](const Request& req, Response& res) {
      auto entry = lookup(req, res);
      if (!entry) return;
      std::lock_guard lock(entry->mutex);
      try {
        entry->session = finalize(entry->session);
      } catch (const SessionError& e) {
        Json extra = {{"unresolved", e.unresolved()}};
        detail::sendError(res, 409, detail::codeName(e.code()), e.what(), extra);
        return;
      }
      const Session& s = entry->session;
      detail::sendJson(res, 200,
                       {{"session_id", s.id},
                        {"state", toString(s.state)},
                        {"merged_xml", serializeXml(*s.merged)},
                        {"post_report", toJson(*s.postReport, s.base, *s.merged)}});
    });

    http_.Get(R"(/api/sessions/([0-9a-f]+)/merged\.xml)", [this](const Request& req, Response& res) {
      auto entry = lookup(req, res);
      if (!entry) return;
      std::lock_guard lock(entry->mutex);
      if (entry->session.state != SessionState::Finalized) {
        detail::sendError(res, 409, "wrong_state", "session is not finalized");
        return;
      }
      res.set_content(serializeXml(*entry->session.merged), "application/xml");
    });

    if (!options_.staticDir.empty() && http_.set_mount_point("/", options_.staticDir)) return;
    http_.Get("/", [](const Request&, Response& res) { res.set_content(detail::kPlaceholderPage, "text/html"); });
  }

  std::shared_ptr<SessionStore::Entry> lookup(const httplib::Request& req, httplib::Response& res) {
    auto entry = store_.find(req.matches[1]);
    if (!entry) detail::sendError(res, 404, "unknown_session", "no such session");
    return entry;
  }

  void create(const httplib::Request& req, httplib::Response& res) {
    Json body = Json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
      detail::sendError(res, 400, "malformed_body", "request body is not a JSON object");
      return;
    }
    if (!body.contains("base_xml") || !body["base_xml"].is_string() || !body.contains("other_xml") ||
        !body["other_xml"].is_string()) {
      detail::sendError(res, 400, "malformed_body", "base_xml and other_xml must be strings");
      return;
    }
    ComparisonOptions options = options_.comparison;
    for (auto [key, target] : {std::pair{"tau", &options.nameThreshold}, std::pair{"theta", &options.modeThreshold}}) {
      if (!body.contains(key) || body[key].is_null()) continue;
      if (!body[key].is_number() || body[key].get<double>() <= 0.0 || body[key].get<double>() > 1.0) {
        detail::sendError(res, 400, "malformed_body", std::string(key) + " must be a number in (0,1]");
        return;
      }
      *target = body[key].get<double>();
    }

    std::optional<FeatureModel> models[2];
    const char* sides[2] = {"base", "other"};
    for (int i = 0; i < 2; ++i) {
      const auto& xml = body[std::string(sides[i]) + "_xml"].get_ref<const std::string&>();
      if (xml.size() > options_.maxModelBytes) {
        detail::sendError(res, 413, "payload_too_large",
                          std::string(sides[i]) + " model exceeds " + std::to_string(options_.maxModelBytes) + " bytes");
        return;
      }
      ParseResult parsed = parseXml(xml, sides[i]);
      if (!parsed.ok()) {
        detail::sendError(res, 400, "invalid_model", std::string(sides[i]) + " model could not be read",
                          {{"which", sides[i]}, {"diagnostics", detail::diagnosticsJson(parsed.diagnostics)}});
        return;
      }
      models[i] = std::move(parsed.model);
    }

    Session s = startSession(std::move(*models[0]), std::move(*models[1]), options);
    Json out = {{"session_id", s.id},
                {"state", toString(s.state)},
                {"report", toJson(s.report, s.base, s.other)},
                {"conflicts", conflictsJson(s.conflicts, s.base, s.other)}};
    store_.insert(std::move(s));
    detail::sendJson(res, 201, out);
  }

  void resolveConflict(const httplib::Request& req, httplib::Response& res) {
    auto entry = lookup(req, res);
    if (!entry) return;
    Json body = Json::parse(req.body, nullptr, false);
    std::optional<Choice> choice;
    if (!body.is_discarded() && body.is_object() && body.contains("choice") && body["choice"].is_string()) {
      const auto& c = body["choice"].get_ref<const std::string&>();
      if (c == "keep_base") choice = Choice::KeepBase;
      if (c == "keep_other") choice = Choice::KeepOther;
    }
    if (!choice) {
      detail::sendError(res, 400, "malformed_body", R"(choice must be "keep_base" or "keep_other")");
      return;
    }
    int conflictId = 0;
    try {
      conflictId = std::stoi(req.matches[2]);
    } catch (const std::exception&) {
      detail::sendError(res, 404, "unknown_conflict", "no such conflict");
      return;
    }
    std::lock_guard lock(entry->mutex);
    try {
      entry->session = resolve(entry->session, conflictId, *choice);
    } catch (const SessionError& e) {
      detail::sendError(res, detail::statusFor(e.code()), detail::codeName(e.code()), e.what());
      return;
    }
    const Session& s = entry->session;
    detail::sendJson(res, 200, toJson(*s.conflict(conflictId), s.base, s.other));
  }

  ServerOptions options_;
  SessionStore store_;
  httplib::Server http_;
};

}  // namespace fmit
