// faraug/remote_codec.hpp

// Copyright 2026  The faraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

// HTTP client for a codec service hosting the neural disentangler.
//
//   GET  /health          -> {backend_id, dims{...}, sample_rate, revision,
//                             deterministic}
//   POST /v1/disentangle  WAV body -> {T, dims, prosody, content, speaker,
//                                      residual}, blocks base64 f32 LE
//   POST /v1/synthesize   that JSON -> WAV
//   POST /v1/convert      multipart {source, speaker_ref} -> WAV
//
// Every request carries X-Request-Id; an echoed id must match.  The client
// is safe to share between threads (one connection per request).

#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "faraug/audio.hpp"
#include "faraug/codec.hpp"
#include "faraug/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace faraug {

struct ServiceInfo {
  std::string backend_id;
  CodecDims dims;
  int sample_rate = 0;
  std::string revision;
  bool deterministic = false;
};

namespace detail {

inline constexpr char kB64[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(const std::uint8_t* p, std::size_t n) {
  std::string out;
  out.reserve((n + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= n; i += 3) {
    const std::uint32_t v = (p[i] << 16) | (p[i + 1] << 8) | p[i + 2];
    out += kB64[v >> 18];
    out += kB64[(v >> 12) & 63];
    out += kB64[(v >> 6) & 63];
    out += kB64[v & 63];
  }
  if (n - i == 1) {
    const std::uint32_t v = p[i] << 16;
    out += kB64[v >> 18];
    out += kB64[(v >> 12) & 63];
    out += "==";
  } else if (n - i == 2) {
    const std::uint32_t v = (p[i] << 16) | (p[i + 1] << 8);
    out += kB64[v >> 18];
    out += kB64[(v >> 12) & 63];
    out += kB64[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

inline std::vector<std::uint8_t> base64_decode(const std::string& s) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  require(s.size() % 4 == 0, ErrorCode::kBackendError, "base64 length not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(s.size() / 4 * 3);
  for (std::size_t i = 0; i < s.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      if (s[i + k] == '=' && i + 4 == s.size() && k >= 2) {
        v[k] = 0;
        ++pad;
      } else {
        v[k] = val(s[i + k]);
        require(v[k] >= 0 && pad == 0, ErrorCode::kBackendError, "bad base64 payload");
      }
    }
    const std::uint32_t w = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<std::uint8_t>(w >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((w >> 8) & 255));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(w & 255));
  }
  return out;
}

inline std::string encode_f32_block(std::span<const float> v) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(v.size() * 4);
  put_f32s(bytes, v);
  return base64_encode(bytes.data(), bytes.size());
}

inline std::vector<float> decode_f32_block(const std::string& s, std::size_t n,
                                           const char* name) {
  const auto bytes = base64_decode(s);
  require(bytes.size() == 4 * n, ErrorCode::kBackendError,
          std::string("block '") + name + "' has " + std::to_string(bytes.size()) +
              " bytes, expected " + std::to_string(4 * n));
  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::bit_cast<float>(rd_u32(bytes.data() + 4 * i));
  return out;
}

inline CodecDims dims_from_json(const nlohmann::json& j) {
  return {j.at("prosody").get<std::size_t>(), j.at("content").get<std::size_t>(),
          j.at("speaker").get<std::size_t>(), j.at("residual").get<std::size_t>()};
}

inline nlohmann::json dims_to_json(const CodecDims& d) {
  return {{"prosody", d.prosody}, {"content", d.content},
          {"speaker", d.speaker}, {"residual", d.residual}};
}

}  // namespace detail

inline ServiceInfo service_info_from_json(const nlohmann::json& j) {
  try {
    ServiceInfo s;
    s.backend_id = j.at("backend_id").get<std::string>();
    s.dims = detail::dims_from_json(j.at("dims"));
    s.sample_rate = j.at("sample_rate").get<int>();
    s.revision = j.value("revision", "");
    s.deterministic = j.value("deterministic", false);
    require(s.dims.prosody > 0 && s.dims.content > 0 && s.dims.speaker > 0 &&
                s.dims.residual > 0 && s.sample_rate > 0,
            ErrorCode::kBackendError, "health reports non-positive dims or rate");
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kBackendError, std::string("bad /health payload: ") + e.what());
  }
}

/// Wire form of a factorization.  Backend-private detail is not sent.
inline nlohmann::json factorized_to_json(const FactorizedSpeech& f) {
  return {{"T", f.num_frames()},
          {"dims", detail::dims_to_json(f.dims())},
          {"prosody", detail::encode_f32_block(f.prosody.data())},
          {"content", detail::encode_f32_block(f.content.data())},
          {"speaker", detail::encode_f32_block(f.speaker)},
          {"residual", detail::encode_f32_block(f.residual.data())}};
}

/// Parses and checks T and dims against `expect`.
inline FactorizedSpeech factorized_from_json(const nlohmann::json& j,
                                             const ServiceInfo& expect) {
  try {
    const auto T = j.at("T").get<std::size_t>();
    const CodecDims d = detail::dims_from_json(j.at("dims"));
    require(d == expect.dims, ErrorCode::kShapeMismatch,
            "service returned dims " + to_string(d) + ", /health said " +
                to_string(expect.dims));
    auto block = [&](const char* name, std::size_t D) {
      MatrixF m(T, D);
      m.data() = detail::decode_f32_block(j.at(name).get<std::string>(), T * D, name);
      return m;
    };
    FactorizedSpeech f;
    f.prosody = block("prosody", d.prosody);
    f.content = block("content", d.content);
    f.residual = block("residual", d.residual);
    f.speaker = detail::decode_f32_block(j.at("speaker").get<std::string>(),
                                         d.speaker, "speaker");
    f.sample_rate = expect.sample_rate;
    f.backend_id = expect.backend_id;
    validate(f);
    return f;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kBackendError, std::string("bad factorization payload: ") + e.what());
  }
}

/// codec.remote_url if set, else $FARAUG_CODEC_URL.
inline std::string resolve_codec_url(const std::string& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("FARAUG_CODEC_URL"); env && *env) return env;
  fail(ErrorCode::kConfig,
       "remote codec selected but neither codec.remote_url nor FARAUG_CODEC_URL is set");
}

class RemoteCodec : public CodecBackend {
 public:
  /// Contacts /health immediately to learn the dims.
  explicit RemoteCodec(const std::string& url, double timeout_s = 120.0)
      : timeout_s_(timeout_s) {
    split_url(url);
    const auto res = send("GET", "/health", nullptr);
    try {
      info_ = service_info_from_json(nlohmann::json::parse(res.body));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kBackendError, std::string("bad /health body: ") + e.what());
    }
  }

  const ServiceInfo& info() const { return info_; }
  std::string id() const override { return info_.backend_id; }
  CodecDims dims() const override { return info_.dims; }
  int sample_rate() const override { return info_.sample_rate; }

  FactorizedSpeech disentangle(const Waveform& x) const override {
    const Body body{wav_bytes(x), "audio/wav"};
    const auto res = send("POST", "/v1/disentangle", &body);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res.body);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kBackendError, std::string("bad /v1/disentangle body: ") + e.what());
    }
    return factorized_from_json(j, info_);
  }

  Waveform synthesize(const FactorizedSpeech& f) const override {
    const Body body{factorized_to_json(f).dump(), "application/json"};
    return decode_reply(send("POST", "/v1/synthesize", &body));
  }

  /// Server-side disentangle, speaker swap and synthesis in one call.
  Waveform convert(const Waveform& source, const Waveform& speaker_ref) const {
    httplib::MultipartFormDataItems items = {
        {"source", wav_bytes(source), "source.wav", "audio/wav"},
        {"speaker_ref", wav_bytes(speaker_ref), "speaker_ref.wav", "audio/wav"}};
    return decode_reply(send("POST", "/v1/convert", nullptr, &items));
  }

 private:
  struct Body {
    std::string data;
    std::string type;
  };
  struct Reply {
    std::string body;
  };

  void split_url(const std::string& url) {
    const auto scheme = url.find("://");
    const auto slash = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    host_ = slash == std::string::npos ? url : url.substr(0, slash);
    prefix_ = slash == std::string::npos ? "" : url.substr(slash);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    require(!host_.empty(), ErrorCode::kConfig, "empty codec URL");
  }

  static std::string wav_bytes(const Waveform& w) {
    const auto b = encode_wav(w, WavEncoding::kFloat32);
    return std::string(b.begin(), b.end());
  }

  static Waveform decode_reply(const Reply& r) {
    try {
      return decode_wav(std::span(reinterpret_cast<const std::uint8_t*>(r.body.data()),
                                  r.body.size()));
    } catch (const Error& e) {
      fail(ErrorCode::kBackendError, std::string("undecodable WAV from service: ") + e.what());
    }
  }

  std::string next_request_id() const {
    static std::atomic<std::uint64_t> counter{0};
    return "faraug-" + std::to_string(reinterpret_cast<std::uintptr_t>(this) & 0xffff) +
           "-" + std::to_string(counter.fetch_add(1));
  }

  Reply send(const std::string& method, const std::string& path, const Body* body,
             const httplib::MultipartFormDataItems* items = nullptr) const {
    httplib::Client cli(host_);
    const auto secs = static_cast<time_t>(timeout_s_);
    cli.set_connection_timeout(5, 0);
    cli.set_read_timeout(secs, 0);
    cli.set_write_timeout(secs, 0);
    const std::string rid = next_request_id();
    const httplib::Headers headers = {{"X-Request-Id", rid}};
    const std::string full = prefix_ + path;
    httplib::Result res = method == "GET" ? cli.Get(full, headers)
                          : items         ? cli.Post(full, headers, *items)
                                          : cli.Post(full, headers, body->data, body->type);
    const std::string where = method + " " + host_ + full;
    require(static_cast<bool>(res), ErrorCode::kBackendUnavailable,
            where + ": " + httplib::to_string(res.error()));
    require(res->status != 503, ErrorCode::kBackendUnavailable,
            where + ": service unavailable (503)");
    require(res->status >= 200 && res->status < 300, ErrorCode::kBackendError,
            where + ": HTTP " + std::to_string(res->status) + " " +
                res->body.substr(0, 200));
    if (res->has_header("X-Request-Id"))
      require(res->get_header_value("X-Request-Id") == rid, ErrorCode::kBackendError,
              where + ": response for request '" + res->get_header_value("X-Request-Id") +
                  "' returned to '" + rid + "'");
    return {std::move(res->body)};
  }

  std::string host_;
  std::string prefix_;
  double timeout_s_;
  ServiceInfo info_;
};

}  // namespace faraug
