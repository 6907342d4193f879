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

#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "attackmap/embedding.hpp"
#include "attackmap/error.hpp"

namespace attackmap::http {

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;  // always begins with '/'
};

Url parse_url(const std::string& url);

struct Response {
  int status = 0;  // 0 when the request never got a response
  std::string body;
  std::string transport_error;

  bool ok() const { return status >= 200 && status < 300; }
  // Transport failures, 429 and 5xx are worth another attempt.
  bool retryable() const { return status == 0 || status == 429 || status >= 500; }
};

using Headers = std::vector<std::pair<std::string, std::string>>;

Response post_json(const std::string& url, const std::string& body, const Headers& headers,
                   std::chrono::seconds timeout);

// Posts until a 2xx arrives, a non-retryable status comes back, or the
// policy's attempts run out. Sleeps base_delay * 2^i between attempts.
// Failures raise Error(`kind`) prefixed with `what`.
Response post_json_with_retry(const std::string& url, const std::string& body,
                              const Headers& headers, std::chrono::seconds timeout,
                              const RetryPolicy& policy, ErrorKind kind, const std::string& what);

// "Authorization: Bearer $VAR" when `env_name` is set; throws Error(kind)
// when the variable is named but missing.
Headers auth_headers(const std::string& env_name, ErrorKind kind);

}  // namespace attackmap::http
