#include <doctest.h>

#include <cmath>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "elite/embed.hpp"
#include "elite/error.hpp"
#include "support/fixtures.hpp"
#include "support/stub_server.hpp"

using namespace elite;
using elite::test::StubReply;
using elite::test::StubRequest;
using elite::test::StubServer;

namespace {

std::string embedding_reply(std::size_t dim, double value) {
  nlohmann::json j;
  j["data"] = nlohmann::json::array({{{"embedding", std::vector<double>(dim, value)}}});
  return j.dump();
}

RemoteEmbedderConfig config_for(const StubServer& server, std::size_t dim,
                                std::vector<std::chrono::milliseconds>& delays) {
  RemoteEmbedderConfig c;
  c.url = server.base_url() + "/v1/embeddings";
  c.dim = dim;
  c.api_key = "embed-key";
  c.http = test::recording_http(delays);
  return c;
}

}  // namespace

TEST_CASE("fnv1a64 matches the reference value") {
  CHECK(fnv1a64("abc") == 0xe71fa2190541574bULL);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
}

TEST_CASE("local_embed of a single trigram is one-hot at its bucket") {
  const auto v = local_embed("abc", {8, 3});
  REQUIRE(v.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(v[i] == (i == 3 ? 1.0 : 0.0));
}

TEST_CASE("local_embed is deterministic, normalized and whitespace-insensitive") {
  LocalHashEmbedder e;
  const auto a = e.embed("Put a clean plate on the counter");
  CHECK(a == e.embed("Put a clean plate on the counter"));
  CHECK(std::abs(l2_norm(a) - 1.0) < 1e-12);
  CHECK(local_embed("  A   b ", {256, 3}) == local_embed("a b", {256, 3}));
  CHECK(local_embed("ab", {16, 3}).size() == 16);
}

TEST_CASE("related texts are closer than unrelated ones") {
  LocalHashEmbedder e;
  const auto sink1 = e.embed("clean the spatula in the sink then put it on the table");
  const auto sink2 = e.embed("clean the plate in the sink then put it on the counter");
  const auto other = e.embed("open the microwave and heat the potato");
  CHECK(cosine(sink1, sink2) > cosine(sink1, other));
}

TEST_CASE("cosine") {
  const Vector x{1, 0};
  const Vector y{0, 1};
  CHECK(cosine(x, x) == doctest::Approx(1.0));
  CHECK(cosine(x, y) == doctest::Approx(0.0));
  CHECK(cosine(Vector{1, 2, 2}, Vector{2, 1, 2}) == doctest::Approx(8.0 / 9.0));
  CHECK_THROWS_AS(cosine(Vector{1, 0}, Vector{1, 0, 0}), InvalidArgument);
  CHECK_THROWS_AS(cosine(Vector{0, 0}, Vector{1, 0}), InvalidArgument);
}

TEST_CASE("remote embedder returns the unit-normalized stub vector") {
  StubServer server([](const StubRequest&, int) { return StubReply{200, embedding_reply(1024, 0.5)}; });
  std::vector<std::chrono::milliseconds> delays;
  RemoteEmbedder e(config_for(server, 1024, delays));
  const auto v = e.embed("heat the potato");
  REQUIRE(v.size() == 1024);
  CHECK(v[0] == doctest::Approx(1.0 / 32.0));
  CHECK(std::abs(l2_norm(v) - 1.0) < 1e-12);
  const auto reqs = server.requests();
  REQUIRE(reqs.size() == 1);
  CHECK(reqs[0].path == "/v1/embeddings");
  CHECK(reqs[0].authorization == "Bearer embed-key");
  // Memoized: a repeated text does not hit the endpoint again.
  CHECK(e.embed("heat the potato") == v);
  CHECK(server.requests().size() == 1);
}

TEST_CASE("remote embedder dimension mismatch is a config error") {
  StubServer server([](const StubRequest&, int) { return StubReply{200, embedding_reply(512, 1.0)}; });
  std::vector<std::chrono::milliseconds> delays;
  RemoteEmbedder e(config_for(server, 1024, delays));
  CHECK_THROWS_AS(e.embed("x"), ConfigError);
}

TEST_CASE("remote embedder retries server errors") {
  StubServer server([](const StubRequest&, int i) {
    return i < 3 ? StubReply{500, "{}"} : StubReply{200, embedding_reply(4, 1.0)};
  });
  std::vector<std::chrono::milliseconds> delays;
  RemoteEmbedder e(config_for(server, 4, delays));
  const auto v = e.embed("x");
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(server.requests().size() == 4);
  CHECK(delays == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(500),
                                                         std::chrono::milliseconds(1000),
                                                         std::chrono::milliseconds(2000)});
}

TEST_CASE("malformed embedding responses are transport errors") {
  StubServer server([](const StubRequest&, int) { return StubReply{200, "{\"data\": []}"}; });
  std::vector<std::chrono::milliseconds> delays;
  RemoteEmbedder e(config_for(server, 4, delays));
  CHECK_THROWS_AS(e.embed("x"), TransportError);
  CHECK_THROWS_AS(e.embed("   "), InvalidArgument);
}

TEST_CASE("remote embedder sends the golden body") {
  std::ifstream in(std::string(ELITE_GOLDEN_DIR) + "/embed_request.json", std::ios::binary);
  const std::string golden((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE_FALSE(golden.empty());
  StubServer server([](const StubRequest&, int) { return StubReply{200, embedding_reply(8, 1.0)}; });
  std::vector<std::chrono::milliseconds> delays;
  RemoteEmbedder e(config_for(server, 8, delays));
  const std::string text = "- Locate the plate\n- Clean it in the sink";
  CHECK(e.request_body(text) == golden);
  e.embed(text);
  REQUIRE(server.requests().size() == 1);
  CHECK(server.requests()[0].body == golden);
}
