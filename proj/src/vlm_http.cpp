// Copyright 2026 The vseg Authors
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

#include <cstdlib>

#include "httplib.h"
#include "nlohmann/json.hpp"
#include "vseg/image_io.hpp"
#include "vseg/vlm.hpp"

namespace vseg::vlm {

namespace {

struct ParsedUrl {
  std::string host_port;  // scheme://host[:port], as httplib::Client expects
  std::string path;       // leading '/', default "/"
};

ParsedUrl parse_url(const std::string& url) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidInputError("HttpVlmClient: endpoint URL must start with http://");
  }
  const size_t path_start = url.find('/', scheme_end + 3);
  ParsedUrl parsed;
  if (path_start == std::string::npos) {
    parsed.host_port = url;
    parsed.path = "/";
  } else {
    parsed.host_port = url.substr(0, path_start);
    parsed.path = url.substr(path_start);
  }
  return parsed;
}

}  // namespace

HttpVlmClient::HttpVlmClient(std::string endpoint_url, std::string token_env_var,
                             int timeout_seconds)
    : endpoint_url_(std::move(endpoint_url)),
      token_env_var_(std::move(token_env_var)),
      timeout_seconds_(timeout_seconds) {
  if (timeout_seconds_ < 1) {
    throw InvalidInputError("HttpVlmClient: timeout must be >= 1 second");
  }
  parse_url(endpoint_url_);  // validate eagerly
}

std::string HttpVlmClient::ask(const std::string& prompt, const RgbFrame& image) {
  const ParsedUrl url = parse_url(endpoint_url_);
  httplib::Client client(url.host_port);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);
  client.set_write_timeout(timeout_seconds_, 0);

  if (!token_env_var_.empty()) {
    if (const char* token = std::getenv(token_env_var_.c_str()); token && *token) {
      client.set_default_headers({{"Authorization", std::string("Bearer ") + token}});
    }
  }

  nlohmann::json body;
  body["prompt"] = prompt;
  body["image_base64"] = base64_encode(io::encode_rgb_png(image));

  const httplib::Result result = client.Post(url.path, body.dump(), "application/json");
  if (!result) {
    throw VlmTransportError("VLM request to " + endpoint_url_ +
                            " failed: " + httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw VlmTransportError("VLM endpoint " + endpoint_url_ + " returned HTTP " +
                            std::to_string(result->status));
  }
  try {
    const nlohmann::json reply = nlohmann::json::parse(result->body);
    return reply.at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw VlmTransportError(std::string("VLM reply was not JSON {text}: ") + e.what());
  }
}

}  // namespace vseg::vlm
