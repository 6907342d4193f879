// Copyright 2026 The attackmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "attackmap/http_client.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

namespace attackmap::http {

Url parse_url(const std::string& url) {
  Url u;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorKind::kConfig, "URL without scheme: " + url);
  u.scheme = url.substr(0, scheme_end);
  if (u.scheme != "http" && u.scheme != "https") {
    fail(ErrorKind::kConfig, "unsupported URL scheme: " + url);
  }
  std::string rest = url.substr(scheme_end + 3);
  auto slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  u.path = slash == std::string::npos ? "/" : rest.substr(slash);
  auto colon = authority.rfind(':');
  if (colon != std::string::npos && authority.find(']') == std::string::npos) {
    u.host = authority.substr(0, colon);
    try {
      u.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      fail(ErrorKind::kConfig, "bad port in URL: " + url);
    }
  } else {
    u.host = authority;
    u.port = u.scheme == "https" ? 443 : 80;
  }
  if (u.host.empty()) fail(ErrorKind::kConfig, "URL without host: " + url);
  return u;
}

Response post_json(const std::string& url, const std::string& body, const Headers& headers,
                   std::chrono::seconds timeout) {
  Url u = parse_url(url);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto run = [&](auto& client) {
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    Response r;
    auto res = client.Post(u.path, h, body, "application/json");
    if (!res) {
      r.transport_error = httplib::to_string(res.error());
      return r;
    }
    r.status = res->status;
    r.body = res->body;
    return r;
  };
  if (u.scheme == "https") {
    httplib::SSLClient client(u.host, u.port);
    return run(client);
  }
  httplib::Client client(u.host, u.port);
  return run(client);
}

Response post_json_with_retry(const std::string& url, const std::string& body,
                              const Headers& headers, std::chrono::seconds timeout,
                              const RetryPolicy& policy, ErrorKind kind, const std::string& what) {
  Response last;
  auto delay = policy.base_delay;
  for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
    last = post_json(url, body, headers, timeout);
    if (last.ok()) return last;
    if (!last.retryable()) break;
    if (attempt < policy.max_attempts) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }
  std::string detail = last.status == 0 ? "transport error: " + last.transport_error
                                        : "HTTP " + std::to_string(last.status);
  fail(kind, what + " failed (" + detail + ")");
}

Headers auth_headers(const std::string& env_name, ErrorKind kind) {
  if (env_name.empty()) return {};
  const char* value = std::getenv(env_name.c_str());
  if (value == nullptr || *value == '\0') {
    fail(kind, "credential env var " + env_name + " is not set");
  }
  return {{"Authorization", std::string("Bearer ") + value}};
}

}  // namespace attackmap::http
