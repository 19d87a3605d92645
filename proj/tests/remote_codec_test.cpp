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

#include <gtest/gtest.h>

#include <cstdlib>
#include <future>

#include "faraug/remote_codec.hpp"
#include "mock_facodec.hpp"

namespace faraug {
namespace {

using testing::MockCodecService;

Waveform fixture_wav(const MockCodecService& m, const std::string& name) {
  return decode_wav(std::span(reinterpret_cast<const std::uint8_t*>(m.file(name).data()),
                              m.file(name).size()));
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kConfig;
}

TEST(Base64, Rfc4648Vectors) {
  const std::pair<std::string, std::string> v[] = {
      {"", ""},         {"f", "Zg=="},         {"fo", "Zm8="},
      {"foo", "Zm9v"},  {"foob", "Zm9vYg=="},  {"fooba", "Zm9vYmE="},
      {"foobar", "Zm9vYmFy"}};
  for (const auto& [plain, enc] : v) {
    EXPECT_EQ(detail::base64_encode(reinterpret_cast<const std::uint8_t*>(plain.data()),
                                    plain.size()),
              enc);
    const auto dec = detail::base64_decode(enc);
    EXPECT_EQ(std::string(dec.begin(), dec.end()), plain);
  }
  EXPECT_THROW(detail::base64_decode("Zm9"), Error);
  EXPECT_THROW(detail::base64_decode("Zm=v"), Error);
}

TEST(RemoteCodec, HealthDiscoversDims) {
  MockCodecService mock;
  const RemoteCodec codec(mock.url());
  EXPECT_EQ(codec.id(), "facodec-golden");
  EXPECT_EQ(codec.dims(), (CodecDims{4, 12, 6, 10}));
  EXPECT_EQ(codec.sample_rate(), 16000);
  EXPECT_TRUE(codec.info().deterministic);
  EXPECT_EQ(codec.info().revision, "golden-1");
}

TEST(RemoteCodec, DisentangleMatchesGoldenBlocks) {
  MockCodecService mock;
  const RemoteCodec codec(mock.url());
  const FactorizedSpeech f = codec.disentangle(fixture_wav(mock, "src.wav"));
  EXPECT_EQ(f.num_frames(), 25u);
  EXPECT_EQ(f.dims(), codec.dims());
  EXPECT_NEAR(l2_norm(f.speaker), 1.0, 1e-6);
  // Same payload re-encoded gives the golden JSON back.
  EXPECT_EQ(factorized_to_json(f),
            nlohmann::json::parse(mock.file("disentangle_src.json")));
}

TEST(RemoteCodec, ThreeCallPathAndServerConvertAgree) {
  MockCodecService mock;
  const RemoteCodec codec(mock.url());
  const Waveform src = fixture_wav(mock, "src.wav"), ref = fixture_wav(mock, "ref.wav");
  const Waveform composed = voice_convert(codec, src, ref);
  const Waveform server = codec.convert(src, ref);
  EXPECT_EQ(composed.samples, server.samples);
  EXPECT_EQ(composed.samples, fixture_wav(mock, "synthesize_conv.wav").samples);
  // Self-conversion is plain resynthesis.
  EXPECT_EQ(voice_convert(codec, src, src).samples,
            codec.synthesize(codec.disentangle(src)).samples);
  EXPECT_EQ(codec.convert(src, src).samples,
            fixture_wav(mock, "synthesize_self.wav").samples);
}

TEST(RemoteCodec, ConcurrentRequestsMatchedById) {
  MockCodecService mock;
  mock.jitter_ms = 40;
  const RemoteCodec codec(mock.url());
  const Waveform src = fixture_wav(mock, "src.wav"), ref = fixture_wav(mock, "ref.wav");
  const auto want_src = codec.disentangle(src), want_ref = codec.disentangle(ref);
  std::vector<std::future<FactorizedSpeech>> futs;
  for (int i = 0; i < 16; ++i)
    futs.push_back(std::async(std::launch::async, [&, i] {
      return codec.disentangle(i % 2 ? ref : src);
    }));
  for (int i = 0; i < 16; ++i) EXPECT_EQ(futs[i].get(), i % 2 ? want_ref : want_src) << i;
  EXPECT_GE(mock.requests.load(), 19);
}

TEST(RemoteCodec, MismatchedRequestIdRejected) {
  MockCodecService mock;
  const RemoteCodec codec(mock.url());
  mock.wrong_request_id = true;
  EXPECT_EQ(code_of([&] { codec.disentangle(fixture_wav(mock, "src.wav")); }),
            ErrorCode::kBackendError);
}

TEST(RemoteCodec, ErrorMapping) {
  {
    MockCodecService mock;
    mock.loading = true;
    EXPECT_EQ(code_of([&] { RemoteCodec c(mock.url()); }), ErrorCode::kBackendUnavailable);
  }
  {
    MockCodecService mock;
    const RemoteCodec codec(mock.url());
    // Audio with no golden response: the service answers 400.
    EXPECT_EQ(code_of([&] { codec.disentangle(Waveform{std::vector<float>(4000, 0.1f), 16000}); }),
              ErrorCode::kBackendError);
    // Dims that disagree with /health never leave the client.
    FactorizedSpeech f = codec.disentangle(fixture_wav(mock, "src.wav"));
    f.speaker.push_back(0.0f);
    EXPECT_EQ(code_of([&] { synthesize(codec, f); }), ErrorCode::kShapeMismatch);
  }
  std::string dead_url;
  {
    MockCodecService mock;
    dead_url = mock.url();
  }
  EXPECT_EQ(code_of([&] { RemoteCodec c(dead_url); }), ErrorCode::kBackendUnavailable);
}

TEST(RemoteCodec, PayloadValidation) {
  MockCodecService mock;
  const RemoteCodec codec(mock.url());
  auto j = nlohmann::json::parse(mock.file("disentangle_src.json"));
  j["T"] = 24;
  EXPECT_EQ(code_of([&] { factorized_from_json(j, codec.info()); }), ErrorCode::kBackendError);
  j = nlohmann::json::parse(mock.file("disentangle_src.json"));
  j["dims"]["content"] = 11;
  EXPECT_EQ(code_of([&] { factorized_from_json(j, codec.info()); }), ErrorCode::kShapeMismatch);
  j = nlohmann::json::parse(mock.file("disentangle_src.json"));
  j.erase("residual");
  EXPECT_EQ(code_of([&] { factorized_from_json(j, codec.info()); }), ErrorCode::kBackendError);
}

TEST(RemoteCodec, UrlResolution) {
  ::unsetenv("FARAUG_CODEC_URL");
  EXPECT_EQ(code_of([] { resolve_codec_url(""); }), ErrorCode::kConfig);
  ::setenv("FARAUG_CODEC_URL", "http://env:1", 1);
  EXPECT_EQ(resolve_codec_url(""), "http://env:1");
  EXPECT_EQ(resolve_codec_url("http://cfg:2"), "http://cfg:2");
  ::unsetenv("FARAUG_CODEC_URL");
}

TEST(RemoteCodec, UrlWithPathPrefix) {
  MockCodecService mock;
  // The mock has no /api prefix, so the prefixed route must 404.
  EXPECT_EQ(code_of([&] { RemoteCodec c(mock.url() + "/api/"); }), ErrorCode::kBackendError);
}

}  // namespace
}  // namespace faraug
