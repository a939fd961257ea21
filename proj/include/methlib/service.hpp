#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "methlib/model.hpp"

namespace methlib {

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct ServiceOptions {
  /// Produces the timestamps recorded in sessions and feedback.
  std::function<std::string()> clock = [] { return now_timestamp(); };
};

/// The HTTP API as an in-process dispatcher. Reads share a lock, writes take
/// it exclusively; a mutation is applied to a copy, written to the library
/// file (if any) and only then published.
class Service {
 public:
  /// Loads `file`; mutations are saved back to it. Throws InvalidLibrary when
  /// the file does not validate.
  explicit Service(std::filesystem::path file, ServiceOptions opts = {});
  /// In-memory library without persistence.
  explicit Service(Library lib, ServiceOptions opts = {});

  Response handle(const std::string& method, const std::string& path,
                  const std::map<std::string, std::string>& query = {}, const std::string& body = {});

  Library snapshot() const;

 private:
  Response dispatch(const std::string& method, const std::string& path,
                    const std::map<std::string, std::string>& query, const std::string& body);
  void commit(Library next);

  std::optional<std::filesystem::path> file_;
  ServiceOptions opts_;
  mutable std::shared_mutex mutex_;
  Library lib_;
};

/// Maps an error to its HTTP status and JSON body.
Response error_response(const std::exception& e);

/// cpp-httplib front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds `host`; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace methlib
