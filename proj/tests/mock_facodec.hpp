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

// In-process codec service that replays the golden fixtures in
// fixtures/facodec.  Requests that match no fixture get 400.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace faraug::testing {

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class MockCodecService {
 public:
  std::atomic<bool> loading{false};
  std::atomic<bool> wrong_request_id{false};
  std::atomic<int> jitter_ms{0};
  std::atomic<int> requests{0};

  explicit MockCodecService(
      std::filesystem::path dir = std::filesystem::path(FARAUG_FIXTURE_DIR) / "facodec")
      : dir_(std::move(dir)) {
    for (const auto& e : std::filesystem::directory_iterator(dir_))
      files_[e.path().filename().string()] = slurp(e.path());
    health_ = nlohmann::json::parse(files_.at("health.json"));

    svr_.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      if (jitter_ms > 0) {
        // Later requests overtake earlier ones.
        const auto h = std::hash<std::string>{}(req.get_header_value("X-Request-Id"));
        std::this_thread::sleep_for(std::chrono::milliseconds(h % (jitter_ms + 1)));
      }
      if (loading) {
        res.status = 503;
        res.set_content("loading", "text/plain");
        return httplib::Server::HandlerResponse::Handled;
      }
      return httplib::Server::HandlerResponse::Unhandled;
    });
    svr_.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_header("X-Request-Id")) return;
      res.set_header("X-Request-Id", wrong_request_id ? std::string("someone-else")
                                                      : req.get_header_value("X-Request-Id"));
    });

    svr_.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(files_.at("health.json"), "application/json");
    });
    svr_.Post("/v1/disentangle", [this](const httplib::Request& req, httplib::Response& res) {
      if (req.body.empty()) return bad(res, "empty body");
      if (req.body == files_.at("src.wav"))
        return res.set_content(files_.at("disentangle_src.json"), "application/json");
      if (req.body == files_.at("ref.wav"))
        return res.set_content(files_.at("disentangle_ref.json"), "application/json");
      bad(res, "no golden fixture for this audio");
    });
    svr_.Post("/v1/synthesize", [this](const httplib::Request& req, httplib::Response& res) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(req.body);
      } catch (...) {
        return bad(res, "not JSON");
      }
      if (j.value("dims", nlohmann::json()) != health_.at("dims")) return bad(res, "dims mismatch");
      for (const char* name : {"self", "conv"})
        if (j == nlohmann::json::parse(files_.at(std::string("synthesize_") + name + ".json")))
          return res.set_content(files_.at(std::string("synthesize_") + name + ".wav"),
                                 "audio/wav");
      bad(res, "no golden fixture for this factorization");
    });
    svr_.Post("/v1/convert", [this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_file("source") || !req.has_file("speaker_ref"))
        return bad(res, "missing multipart part");
      const std::string src = req.get_file_value("source").content;
      const std::string ref = req.get_file_value("speaker_ref").content;
      if (src == files_.at("src.wav") && ref == files_.at("ref.wav"))
        return res.set_content(files_.at("convert_src_ref.wav"), "audio/wav");
      if (src == files_.at("src.wav") && ref == src)
        return res.set_content(files_.at("synthesize_self.wav"), "audio/wav");
      bad(res, "no golden fixture for this pair");
    });

    port_ = svr_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { svr_.listen_after_bind(); });
    svr_.wait_until_ready();
  }

  ~MockCodecService() {
    svr_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  const std::string& file(const std::string& name) const { return files_.at(name); }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  static void bad(httplib::Response& res, const std::string& why) {
    res.status = 400;
    res.set_content(why, "text/plain");
  }

  std::filesystem::path dir_;
  std::map<std::string, std::string> files_;
  nlohmann::json health_;
  httplib::Server svr_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace faraug::testing
