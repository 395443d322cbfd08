#include "epida/remote_scorer.h"

#include <gtest/gtest.h>

#include "epida/errors.h"
#include "stub_server.h"

namespace epida {
namespace {

using namespace std::chrono_literals;
using testing::DroppingServer;
using testing::StubReply;
using testing::StubScorerServer;
using testing::uniform_reply;

std::vector<std::string> texts(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("text " + std::to_string(i));
  return out;
}

RemoteScorerOptions fast_options() {
  RemoteScorerOptions opt;
  opt.timeout = 2000ms;
  opt.sleep = [](std::chrono::milliseconds) {};
  return opt;
}

TEST(RemoteScorer, UniformStub) {
  StubScorerServer server([](const auto& t) { return StubReply{200, uniform_reply(t.size(), 2)}; });
  const auto rows = remote_score(server.url(), texts(3), fast_options());
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_DOUBLE_EQ(r[0], 0.5);
    EXPECT_DOUBLE_EQ(r[1], 0.5);
  }
}

TEST(RemoteScorer, EmptyInputSendsNothing) {
  StubScorerServer server([](const auto& t) { return StubReply{200, uniform_reply(t.size(), 2)}; });
  EXPECT_TRUE(remote_score(server.url(), {}, fast_options()).empty());
  EXPECT_EQ(server.requests(), 0);
}

TEST(RemoteScorer, RowsStayInOrderAcrossBatches) {
  StubScorerServer server([](const std::vector<std::string>& t) {
    std::string body = "{\"probs\":[";
    for (std::size_t i = 0; i < t.size(); ++i) {
      const bool odd = std::stoul(t[i].substr(5)) % 2 == 1;
      body += std::string(i ? "," : "") + (odd ? "[0.25,0.75]" : "[0.75,0.25]");
    }
    return StubReply{200, body + "]}"};
  });
  auto opt = fast_options();
  opt.batch_size = 64;
  const auto rows = remote_score(server.url(), texts(130), opt);
  ASSERT_EQ(rows.size(), 130u);
  EXPECT_EQ(server.requests(), 3);
  EXPECT_EQ(server.batch_sizes(), (std::vector<std::size_t>{64, 64, 2}));
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].argmax(), i % 2) << i;
}

TEST(RemoteScorer, InvalidRowIsProtocolErrorNamingTheRow) {
  StubScorerServer server([](const auto&) {
    return StubReply{200, "{\"probs\":[[0.5,0.5],[0.6,0.3]]}"};
  });
  try {
    remote_score(server.url(), texts(2), fast_options());
    FAIL() << "expected ProtocolError";
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
}

TEST(RemoteScorer, MalformedRepliesAreProtocolErrors) {
  for (const std::string body : {"not json", "{\"p\":[]}", "{\"probs\":[[0.5,0.5]]}",
                                 "{\"probs\":[[0.5,0.5],[0.2,0.3,0.5]]}",
                                 "{\"probs\":[[0.5,\"x\"],[0.5,0.5]]}"}) {
    StubScorerServer server([&](const auto&) { return StubReply{200, body}; });
    EXPECT_THROW(remote_score(server.url(), texts(2), fast_options()), ProtocolError) << body;
  }
}

TEST(RemoteScorer, ClassCountIsEnforcedWhenConfigured) {
  StubScorerServer server([](const auto& t) { return StubReply{200, uniform_reply(t.size(), 2)}; });
  auto opt = fast_options();
  opt.classes = 3;
  EXPECT_THROW(remote_score(server.url(), texts(1), opt), ProtocolError);
  EXPECT_EQ(RemoteScorer(server.url(), opt).classes(), 3u);
  EXPECT_THROW(RemoteScorer(server.url(), fast_options()).classes(), ConfigError);
}

TEST(RemoteScorer, ClientErrorsAreNotRetried) {
  StubScorerServer server([](const auto&) { return StubReply{400, "bad"}; });
  EXPECT_THROW(remote_score(server.url(), texts(1), fast_options()), ProtocolError);
  EXPECT_EQ(server.requests(), 1);
}

TEST(RemoteScorer, ServerErrorsAreRetriedThenSucceed) {
  int calls = 0;
  StubScorerServer server([&](const auto& t) {
    return ++calls < 3 ? StubReply{503, "busy"} : StubReply{200, uniform_reply(t.size(), 2)};
  });
  std::vector<std::chrono::milliseconds> slept;
  auto opt = fast_options();
  opt.sleep = [&](std::chrono::milliseconds d) { slept.push_back(d); };
  EXPECT_EQ(remote_score(server.url(), texts(2), opt).size(), 2u);
  EXPECT_EQ(server.requests(), 3);
  EXPECT_EQ(slept, (std::vector<std::chrono::milliseconds>{500ms, 1000ms}));
}

TEST(RemoteScorer, DroppedConnectionsExhaustAttempts) {
  DroppingServer server;
  std::vector<std::chrono::milliseconds> slept;
  auto opt = fast_options();
  opt.sleep = [&](std::chrono::milliseconds d) { slept.push_back(d); };
  EXPECT_THROW(remote_score(server.url(), texts(1), opt), TransportError);
  EXPECT_EQ(server.connections(), 3);
  EXPECT_EQ(slept, (std::vector<std::chrono::milliseconds>{500ms, 1000ms}));
}

TEST(RemoteScorer, UnreachableHostIsTransportError) {
  std::string url;
  {
    DroppingServer closed;
    url = closed.url();
  }
  auto opt = fast_options();
  opt.max_attempts = 2;
  EXPECT_THROW(remote_score(url, texts(1), opt), TransportError);
}

TEST(RemoteScorer, PrefixedEndpoint) {
  StubScorerServer server([](const auto& t) { return StubReply{200, uniform_reply(t.size(), 4)}; },
                          "/api/v1");
  EXPECT_EQ(remote_score(server.url() + "/api/v1/", texts(1), fast_options())[0].size(), 4u);
  EXPECT_THROW(remote_score(server.url(), texts(1), fast_options()), ProtocolError);
}

TEST(RemoteScorer, EndpointAndOptionValidation) {
  EXPECT_THROW(RemoteScorer("127.0.0.1:9"), ConfigError);
  EXPECT_THROW(RemoteScorer("https://example.com"), ConfigError);
  EXPECT_THROW(RemoteScorer("ftp://example.com"), ConfigError);
  RemoteScorerOptions opt;
  opt.batch_size = 0;
  EXPECT_THROW(RemoteScorer("http://127.0.0.1:9", opt), ConfigError);
  opt = {};
  opt.max_attempts = 0;
  EXPECT_THROW(RemoteScorer("http://127.0.0.1:9", opt), ConfigError);
}

TEST(RemoteScorer, PredictSendsCanonicalText) {
  std::vector<std::string> seen;
  StubScorerServer server([&](const auto& t) {
    seen = t;
    return StubReply{200, uniform_reply(t.size(), 2)};
  });
  auto opt = fast_options();
  opt.classes = 2;
  const RemoteScorer scorer(server.url(), opt);
  const std::vector<TokenizedText> in{TokenizedText::from_string("  hello   world ")};
  scorer.predict(in);
  EXPECT_EQ(seen, (std::vector<std::string>{"hello world"}));
}

}  // namespace
}  // namespace epida
