#ifndef UQSCHED_SERVICE_HPP
#define UQSCHED_SERVICE_HPP

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "uqsched/config.hpp"
#include "uqsched/ingest.hpp"
#include "uqsched/predictor.hpp"
#include "uqsched/scheduler.hpp"
#include "uqsched/serialization.hpp"

namespace uqsched {

/// Everything one request needs, published as a unit. Handlers take one
/// reference to a state and never see a mix of two generations.
struct ServiceState {
  std::uint64_t generation = 0;
  Snapshot snapshot;
  AppConfig config;
  PredictorBank predictors;
  Analysis analysis;
  bool trained = false;
};

/// Builds a state; fits predictors first when `train` is set.
std::shared_ptr<const ServiceState> build_state(Snapshot snapshot, const AppConfig& config, bool train,
                                                std::uint64_t generation = 0);

struct WhatIfRequest {
  std::string sequence_id;
  std::string operator_id;
  Season season = Season::Winter;
  double nominal_estimate_s = 0.0;
};

struct WhatIfResponse {
  double corrected_estimate_s = 0.0;
  double std_s = 0.0;
  double band_q05_s = 0.0;
  double band_q95_s = 0.0;
  ModelKind model_kind = ModelKind::PBox;
  std::size_t sample_count = 0;
  ModelSource model_source = ModelSource::None;
  bool clamped = false;
};

/// Corrected estimate plus the error band's outer quantiles shifted by the
/// nominal: the low quantile comes from the upper CDF bound, the high one
/// from the lower bound. NotFoundError for an unknown group, DomainError for
/// nominal <= 0 or levels outside 0 < qlo < qhi <= 1.
WhatIfResponse evaluate_what_if(const ServiceState& state, const WhatIfRequest& request, double qlo = 0.05,
                                double qhi = 0.95);

json to_json(const WhatIfResponse& response);

/// GET /api/v1/sequences payload.
json sequences_payload(const ServiceState& state);

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

struct ServiceOptions {
  /// Called on the training thread after the train slot is claimed and before
  /// fitting starts. Tests use it to hold a training run open.
  std::function<void()> on_train_start;
};

/// JSON facade over the library. `handle` is transport-free; `listen`
/// serves it over HTTP/1.1.
class Service {
 public:
  Service(std::shared_ptr<const ServiceState> initial, ServiceOptions options = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  std::shared_ptr<const ServiceState> state() const;

  HttpResponse handle(const HttpRequest& request);

  /// Binds and serves until `stop()`. Returns false if the bind fails.
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port and returns it (or -1); call `serve_bound()` next.
  int bind_any_port(const std::string& host);
  bool serve_bound();
  void stop();

 private:
  HttpResponse train();
  void publish(std::shared_ptr<const ServiceState> next);

  mutable std::mutex state_mutex_;
  std::shared_ptr<const ServiceState> state_;
  std::atomic<bool> training_{false};
  ServiceOptions options_;

  struct Server;
  std::unique_ptr<Server> server_;
};

}  // namespace uqsched

#endif  // UQSCHED_SERVICE_HPP
