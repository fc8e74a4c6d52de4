//==============================================================================
// Copyright (c) 2026 The ewmeval Authors.
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
//==============================================================================
#include <openssl/evp.h>
#include <png.h>

#include <cstdlib>
#include <nlohmann/json.hpp>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "ewm/error.hpp"
#include "ewm/judge.hpp"

namespace ewm {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("judge endpoint must be an absolute http(s) URL: " + url);
  }
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ValidationError("judge endpoint scheme must be http or https: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

TransportOptions transport_options_from_env() {
  TransportOptions options;
  if (const char* t = std::getenv("JUDGE_TIMEOUT_S"); t != nullptr && *t != '\0') {
    char* end = nullptr;
    const long seconds = std::strtol(t, &end, 10);
    if (end == t || *end != '\0' || seconds <= 0) {
      throw ValidationError("JUDGE_TIMEOUT_S must be a positive integer");
    }
    options.timeout = std::chrono::seconds(seconds);
  }
  return options;
}

std::string invoke_judge(const JudgeRequest& request, const TransportOptions& options) {
  request.validate();
  const auto endpoint = split_endpoint(request.endpoint);
  const auto body = request.body();

  httplib::Client client(endpoint.origin);
  client.set_connection_timeout(options.timeout);
  client.set_read_timeout(options.timeout);
  client.set_write_timeout(options.timeout);

  std::string last_failure = "no attempt made";
  auto backoff = options.initial_backoff;
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Post(endpoint.path, body, "application/json");
    if (!res) {
      last_failure = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status >= 400) {
      throw ProtocolError("judge endpoint rejected request with HTTP " +
                          std::to_string(res->status));
    }
    if (res->status < 200 || res->status >= 300) {
      throw ProtocolError("unexpected HTTP status " + std::to_string(res->status));
    }
    return res->body;
  }
  throw TransportError("judge endpoint failed after " + std::to_string(options.max_attempts) +
                       " attempts (" + last_failure + ")");
}

std::string response_content(std::string_view body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw ProtocolError("judge response body is not JSON");
  }
  if (!j.is_object() || !j.contains("content") || !j.at("content").is_string()) {
    throw ProtocolError("judge response body lacks a string \"content\" field");
  }
  return j.at("content").get<std::string>();
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

EncodedImage encode_png_data_uri(const std::uint8_t* rgb, std::size_t height, std::size_t width) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, rgb, 0, nullptr)) {
    throw Error(std::string("png encode failed: ") + image.message);
  }
  std::string png(size, '\0');
  if (!png_image_write_to_memory(&image, png.data(), &size, 0, rgb, 0, nullptr)) {
    throw Error(std::string("png encode failed: ") + image.message);
  }
  png.resize(size);
  return "data:image/png;base64," + base64_encode(png);
}

}  // namespace ewm
