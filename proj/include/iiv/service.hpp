// Copyright 2026 The iiv Authors
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

#ifndef IIV__SERVICE_HPP_
#define IIV__SERVICE_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iiv/image_io.hpp"
#include "iiv/invariant.hpp"
#include "iiv/mask.hpp"

namespace httplib
{
class Server;
}

namespace iiv
{

struct ServiceConfig
{
  using Clock = std::chrono::steady_clock;

  std::string host = "127.0.0.1";
  int port = 8080;
  size_t max_upload_bytes = 32u << 20;
  std::chrono::seconds session_ttl{30 * 60};
  /// Served at "/" when non-empty (the browser client bundle).
  std::string static_dir;
  /// Injectable for TTL tests.
  std::function<Clock::time_point()> now = [] { return Clock::now(); };

  /// IIV_BIND ("host:port"), IIV_MAX_UPLOAD_BYTES, IIV_SESSION_TTL_SECONDS, IIV_STATIC_DIR.
  static ServiceConfig from_env();
};

/// Transport-independent response; install_routes maps it onto HTTP.
struct ServiceResponse
{
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// In-memory interactive sessions: upload an image, edit marks stroke by
/// stroke and fetch the re-derived outputs.
///
/// Calls on different sessions run concurrently; calls on one session are
/// serialized by a per-session mutex in arrival order.
class Service
{
public:
  explicit Service(ServiceConfig config = {});
  ~Service();

  Service(const Service &) = delete;
  Service & operator=(const Service &) = delete;

  /// `gamma` is "linear", a positive number, or empty for the 2.2 default.
  ServiceResponse create_session(std::span<const std::uint8_t> image_bytes, std::string_view gamma);
  ServiceResponse apply_stroke(const std::string & id, std::string_view stroke_json);
  /// kind: "gray1d", "chroma-l1" or "overlay".
  ServiceResponse get_output(const std::string & id, std::string_view kind);
  ServiceResponse get_state(const std::string & id);
  ServiceResponse reset(const std::string & id);
  ServiceResponse delete_session(const std::string & id);

  size_t session_count();
  /// Drops sessions idle for longer than the TTL.
  void sweep_expired();

  /// Test hooks: current mask and stroke log of a session.
  std::optional<MarkMask> session_mask(const std::string & id);
  std::optional<std::vector<Stroke>> session_strokes(const std::string & id);

  const ServiceConfig & config() const { return config_; }

  struct Session;

private:
  std::shared_ptr<Session> find(const std::string & id);
  std::string new_id();

  ServiceConfig config_;
  std::mutex store_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t id_counter_ = 0;
  std::uint64_t id_salt_ = 0;
};

/// Registers the HTTP API on `server`. `service` must outlive the server.
void install_routes(httplib::Server & server, Service & service);

}  // namespace iiv

#endif  // IIV__SERVICE_HPP_
