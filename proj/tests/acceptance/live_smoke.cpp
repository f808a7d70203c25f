// Optional live-endpoint smoke check. Not part of the default suite:
// it only runs when INJECTBENCH_SMOKE_ENDPOINT names a reachable
// service, e.g.
//
//   INJECTBENCH_SMOKE_ENDPOINT="scorer=http://localhost:8000:score" ./live_smoke
//   INJECTBENCH_SMOKE_ENDPOINT="embedder=http://localhost:8000:embed" ./live_smoke
//
// Bearer tokens come from INJECTBENCH_API_KEY_<NAME> as usual. The
// check performs one round-trip for the endpoint's capability and
// prints what came back; exit 0 on success, 2 on a service failure,
// 1 on a configuration problem.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "injectbench/errors.hpp"
#include "injectbench/modelio.hpp"

using namespace injectbench;

int main() {
  const char* flag = std::getenv("INJECTBENCH_SMOKE_ENDPOINT");
  if (flag == nullptr || std::string(flag).empty()) {
    std::printf("[SKIP] live smoke: INJECTBENCH_SMOKE_ENDPOINT is not set\n");
    return 0;
  }

  try {
    const auto ep = modelio::parse_endpoint_flag(flag);
    modelio::validate_endpoint(ep);
    std::printf("endpoint %s -> %s (%s)\n", ep.name.c_str(), ep.base_url.c_str(),
                std::string(modelio::capability_name(ep.capability)).c_str());

    switch (ep.capability) {
      case modelio::Capability::embed: {
        auto svc = modelio::make_http_embedder(ep);
        const auto e = svc->embed_one("The quick brown fox jumps over the lazy dog.");
        if (e.dim() == 0 || !e.all_finite()) {
          std::printf("[FAIL] live smoke: embedding empty or non-finite\n");
          return 2;
        }
        std::printf("[PASS] live smoke: embedding dim %zu, norm %.6f\n", e.dim(), e.norm());
        return 0;
      }
      case modelio::Capability::score: {
        auto svc = modelio::make_http_scorer(ep);
        const double s =
            svc->score({"The capital of France is", "Paris"}, modelio::ScoreOptions{});
        std::printf("[PASS] live smoke: log-likelihood %.6f\n", s);
        return 0;
      }
      case modelio::Capability::complete: {
        auto svc = modelio::make_http_completer(ep);
        const std::string out = svc->complete("Say OK.", 1, 0.0);
        if (out.empty()) {
          std::printf("[FAIL] live smoke: empty completion\n");
          return 2;
        }
        std::printf("[PASS] live smoke: %zu bytes of completion text\n", out.size());
        return 0;
      }
    }
    return 1;
  } catch (const ServiceError& e) {
    std::printf("[FAIL] live smoke: service error: %s\n", e.what());
    return 2;
  } catch (const ValidationError& e) {
    std::printf("[FAIL] live smoke: configuration error: %s\n", e.what());
    return 1;
  }
}
