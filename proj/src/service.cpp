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

#include "iiv/service.hpp"

#include <httplib.h>

#include <charconv>
#include <cstdlib>
#include <random>

#include "iiv/error.hpp"
#include "iiv/json_io.hpp"

namespace iiv
{

struct Service::Session
{
  std::mutex mutex;
  std::string id;
  LoadOptions load_options;
  RgbImage display;  // decoded values before linearization
  RgbImage image;
  ChromaImage chroma;
  MarkMask mask;
  std::vector<Stroke> strokes;
  std::uint64_t version = 0;
  std::vector<MarkReport> marks;
  std::optional<Derivation> derivation;
  ServiceConfig::Clock::time_point last_access;
};

namespace
{

using nlohmann::json;

ServiceResponse json_response(int status, const json & body)
{
  return {status, "application/json", body.dump()};
}

ServiceResponse error_response(int status, const std::string & message)
{
  return json_response(status, {{"error", message}});
}

ServiceResponse png_response(Bytes bytes)
{
  return {200, "image/png", std::string(bytes.begin(), bytes.end())};
}

json rgb_json(const Eigen::Vector3d & v) { return json::array({v.x(), v.y(), v.z()}); }
json vec2_json(const Eigen::Vector2d & v) { return json::array({v.x(), v.y()}); }

std::optional<LoadOptions> parse_gamma(std::string_view text)
{
  if (text.empty()) {
    return LoadOptions{};
  }
  if (text == "linear") {
    return LoadOptions::linear();
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(value > 0.0) || value > 10.0) {
    return std::nullopt;
  }
  return LoadOptions{value};
}

// Re-runs mark analysis and, when at least one mark succeeds, the projection.
void rederive(Service::Session & s)
{
  s.marks = analyze_marks(s.image, s.mask);
  std::vector<IlluminationEstimate> estimates;
  for (const auto & m : s.marks) {
    if (m.estimate) {
      estimates.push_back(*m.estimate);
    }
  }
  if (estimates.empty()) {
    s.derivation.reset();
    return;
  }
  s.derivation = render(s.image, s.chroma, combine_marks(estimates));
}

json summary_json(const Service::Session & s)
{
  json marks = json::array();
  for (const auto & m : s.marks) {
    json entry = {{"index", m.index}, {"pixels", m.analysis.pixels.size()}};
    if (m.estimate) {
      entry["lit_rgb"] = rgb_json(m.analysis.pair.lit_rgb);
      entry["shadow_rgb"] = rgb_json(m.analysis.pair.shadow_rgb);
    } else {
      entry["lit_rgb"] = nullptr;
      entry["shadow_rgb"] = nullptr;
    }
    if (m.error) {
      entry["error"] = {{"kind", to_string(m.error->kind())}, {"message", m.error->detail()}};
    }
    marks.push_back(std::move(entry));
  }
  json estimate = nullptr;
  if (s.derivation) {
    const auto & e = s.derivation->estimate;
    estimate = {
      {"p_illum", vec2_json(e.p_illum)},
      {"p_invariant", vec2_json(e.p_invariant)},
      {"c_lit", vec2_json(e.c_lit)},
      {"c_shadow", vec2_json(e.c_shadow)}};
  }
  return {{"version", s.version}, {"marks", std::move(marks)}, {"estimate", std::move(estimate)}};
}

// Original image with lit pixels blended 50% toward red and shadow pixels toward blue.
RgbImage overlay(const Service::Session & s)
{
  RgbImage out = s.display;
  const Eigen::RowVector3d red(1.0, 0.0, 0.0);
  const Eigen::RowVector3d blue(0.0, 0.0, 1.0);
  for (const auto & m : s.marks) {
    const auto & px = m.analysis.pixels;
    if (static_cast<Index>(m.analysis.labels.size()) != px.size()) {
      continue;
    }
    for (Index i = 0; i < px.size(); ++i) {
      const bool lit = m.analysis.labels[static_cast<size_t>(i)] == m.analysis.pair.lit_label;
      const auto x = static_cast<Index>(px.coords(i, 0));
      const auto y = static_cast<Index>(px.coords(i, 1));
      out.pixel(x, y) = 0.5 * out.pixel(x, y) + 0.5 * (lit ? red : blue).array();
    }
  }
  return out;
}

template <typename T>
T env_or(const char * name, T fallback)
{
  const char * raw = std::getenv(name);
  if (!raw || !*raw) {
    return fallback;
  }
  T value{};
  const std::string_view text(raw);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size() ? value : fallback;
}

}  // namespace

ServiceConfig ServiceConfig::from_env()
{
  ServiceConfig cfg;
  if (const char * bind = std::getenv("IIV_BIND"); bind && *bind) {
    const std::string text(bind);
    const auto colon = text.rfind(':');
    if (colon == std::string::npos) {
      cfg.host = text;
    } else {
      cfg.host = text.substr(0, colon);
      cfg.port = std::atoi(text.c_str() + colon + 1);
    }
  }
  cfg.max_upload_bytes = env_or<size_t>("IIV_MAX_UPLOAD_BYTES", cfg.max_upload_bytes);
  cfg.session_ttl = std::chrono::seconds(env_or<long long>("IIV_SESSION_TTL_SECONDS", cfg.session_ttl.count()));
  if (const char * dir = std::getenv("IIV_STATIC_DIR"); dir && *dir) {
    cfg.static_dir = dir;
  }
  return cfg;
}

Service::Service(ServiceConfig config) : config_(std::move(config))
{
  std::random_device rd;
  id_salt_ = (std::uint64_t(rd()) << 32) ^ rd();
}

Service::~Service() = default;

std::string Service::new_id()
{
  // splitmix64 of a counter, salted per process
  std::uint64_t z = id_salt_ + 0x9e3779b97f4a7c15ULL * ++id_counter_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(z));
  return buf;
}

std::shared_ptr<Service::Session> Service::find(const std::string & id)
{
  sweep_expired();
  std::lock_guard lock(store_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    return nullptr;
  }
  return it->second;
}

void Service::sweep_expired()
{
  const auto now = config_.now();
  std::vector<std::shared_ptr<Session>> expired;
  std::lock_guard lock(store_mutex_);
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock session_lock(it->second->mutex, std::try_to_lock);
    // a session in use is by definition not idle
    if (session_lock.owns_lock() && now - it->second->last_access > config_.session_ttl) {
      session_lock.unlock();
      expired.push_back(std::move(it->second));
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

size_t Service::session_count()
{
  std::lock_guard lock(store_mutex_);
  return sessions_.size();
}

ServiceResponse Service::create_session(std::span<const std::uint8_t> image_bytes, std::string_view gamma)
{
  sweep_expired();
  if (image_bytes.size() > config_.max_upload_bytes) {
    return error_response(413, "image exceeds upload limit");
  }
  const auto opts = parse_gamma(gamma);
  if (!opts) {
    return error_response(400, "gamma must be \"linear\" or a positive number");
  }
  auto session = std::make_shared<Session>();
  try {
    session->display = decode_image(image_bytes);
  } catch (const Error & e) {
    return error_response(400, std::string("could not decode image: ") + e.detail());
  }
  session->load_options = *opts;
  session->image = linearize(session->display, *opts);
  session->chroma = image_to_chroma(session->image);
  session->mask = MarkMask(session->image.width, session->image.height);
  session->last_access = config_.now();

  json body = {{"width", session->image.width}, {"height", session->image.height}};
  {
    std::lock_guard lock(store_mutex_);
    session->id = new_id();
    body["id"] = session->id;
    sessions_.emplace(session->id, session);
  }
  return json_response(201, body);
}

ServiceResponse Service::apply_stroke(const std::string & id, std::string_view stroke_json)
{
  const auto session = find(id);
  if (!session) {
    return error_response(404, "unknown session");
  }
  Stroke stroke;
  try {
    stroke = stroke_from_json(json::parse(stroke_json));
  } catch (const json::exception & e) {
    return error_response(422, std::string("malformed stroke JSON: ") + e.what());
  } catch (const Error & e) {
    return error_response(422, e.detail());
  }

  std::lock_guard lock(session->mutex);
  session->last_access = config_.now();
  try {
    validate_stroke(stroke, session->image.width, session->image.height);
  } catch (const Error & e) {
    return error_response(422, e.detail());
  }
  session->mask = iiv::apply_stroke(session->mask, stroke);
  session->strokes.push_back(std::move(stroke));
  ++session->version;
  rederive(*session);
  return json_response(200, summary_json(*session));
}

ServiceResponse Service::get_output(const std::string & id, std::string_view kind)
{
  const auto session = find(id);
  if (!session) {
    return error_response(404, "unknown session");
  }
  std::lock_guard lock(session->mutex);
  session->last_access = config_.now();
  if (kind == "overlay") {
    return png_response(encode_png_rgb(overlay(*session)));
  }
  if (kind != "gray1d" && kind != "chroma-l1") {
    return error_response(404, "unknown output kind");
  }
  if (!session->derivation) {
    return error_response(409, "no successful derivation yet");
  }
  if (kind == "gray1d") {
    return png_response(encode_png_gray(session->derivation->outputs.gray_1d));
  }
  return png_response(encode_png_rgb(session->derivation->outputs.chroma_l1, kChromaDisplayScale));
}

ServiceResponse Service::get_state(const std::string & id)
{
  const auto session = find(id);
  if (!session) {
    return error_response(404, "unknown session");
  }
  std::lock_guard lock(session->mutex);
  session->last_access = config_.now();
  json body = summary_json(*session);
  body["id"] = session->id;
  body["width"] = session->image.width;
  body["height"] = session->image.height;
  body["strokes"] = session->strokes.size();
  body["marked_pixels"] = session->mask.count();
  return json_response(200, body);
}

ServiceResponse Service::reset(const std::string & id)
{
  const auto session = find(id);
  if (!session) {
    return error_response(404, "unknown session");
  }
  std::lock_guard lock(session->mutex);
  session->last_access = config_.now();
  session->mask = MarkMask(session->image.width, session->image.height);
  session->strokes.clear();
  session->marks.clear();
  session->derivation.reset();
  ++session->version;
  return {204, "", ""};
}

ServiceResponse Service::delete_session(const std::string & id)
{
  std::shared_ptr<Session> removed;
  {
    std::lock_guard lock(store_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) {
      return error_response(404, "unknown session");
    }
    removed = std::move(it->second);
    sessions_.erase(it);
  }
  // wait for in-flight requests on this session before releasing it
  std::lock_guard lock(removed->mutex);
  return {204, "", ""};
}

std::optional<MarkMask> Service::session_mask(const std::string & id)
{
  const auto session = find(id);
  if (!session) {
    return std::nullopt;
  }
  std::lock_guard lock(session->mutex);
  return session->mask;
}

std::optional<std::vector<Stroke>> Service::session_strokes(const std::string & id)
{
  const auto session = find(id);
  if (!session) {
    return std::nullopt;
  }
  std::lock_guard lock(session->mutex);
  return session->strokes;
}

void install_routes(httplib::Server & server, Service & service)
{
  auto send = [](httplib::Response & res, const ServiceResponse & out) {
    res.status = out.status;
    if (!out.content_type.empty()) {
      res.set_content(out.body, out.content_type);
    }
  };

  server.set_payload_max_length(service.config().max_upload_bytes);

  server.Get("/healthz", [](const httplib::Request &, httplib::Response & res) {
    res.set_content("ok", "text/plain");
  });
  server.Post("/sessions", [&service, send](const httplib::Request & req, httplib::Response & res) {
    const auto * data = reinterpret_cast<const std::uint8_t *>(req.body.data());
    send(res, service.create_session({data, req.body.size()}, req.get_param_value("gamma")));
  });
  server.Post(R"(/sessions/([^/]+)/strokes)", [&service, send](const httplib::Request & req, httplib::Response & res) {
    send(res, service.apply_stroke(req.matches[1], req.body));
  });
  server.Get(R"(/sessions/([^/]+)/outputs/([^/]+))", [&service, send](const httplib::Request & req, httplib::Response & res) {
    send(res, service.get_output(req.matches[1], req.matches[2].str()));
  });
  server.Post(R"(/sessions/([^/]+)/reset)", [&service, send](const httplib::Request & req, httplib::Response & res) {
    send(res, service.reset(req.matches[1]));
  });
  server.Get(R"(/sessions/([^/]+))", [&service, send](const httplib::Request & req, httplib::Response & res) {
    send(res, service.get_state(req.matches[1]));
  });
  server.Delete(R"(/sessions/([^/]+))", [&service, send](const httplib::Request & req, httplib::Response & res) {
    send(res, service.delete_session(req.matches[1]));
  });
  if (!service.config().static_dir.empty()) {
    server.set_mount_point("/", service.config().static_dir);
  } else {
    // no client bundle configured: answer "/" with a pointer to the API
    server.Get("/", [](const httplib::Request &, httplib::Response & res) {
      res.set_content(
        "<!doctype html><title>iiv</title><p>No client bundle configured (set IIV_STATIC_DIR).</p>",
        "text/html");
    });
  }
}

}  // namespace iiv
