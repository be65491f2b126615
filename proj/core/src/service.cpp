#include "uqsched/service.hpp"

#include <httplib.h>

#include <cmath>
#include <set>

#include "uqsched/errors.hpp"

namespace uqsched {

std::shared_ptr<const ServiceState> build_state(Snapshot snapshot, const AppConfig& config, bool train,
                                                std::uint64_t generation) {
  config.validate();
  auto state = std::make_shared<ServiceState>();
  state->generation = generation;
  state->config = config;
  state->trained = train;
  if (train) {
    state->predictors = PredictorBank::fit(snapshot, config.predictor);
  } else {
    state->predictors = PredictorBank(config.predictor.min_train_size);
  }
  state->analysis = analyze(snapshot, config.analysis, state->predictors);
  state->snapshot = std::move(snapshot);
  return state;
}

WhatIfResponse evaluate_what_if(const ServiceState& state, const WhatIfRequest& request, double qlo,
                                double qhi) {
  if (!std::isfinite(request.nominal_estimate_s) || !(request.nominal_estimate_s > 0.0)) {
    throw DomainError("nominal_estimate_s must be a positive number");
  }
  if (!(qlo > 0.0 && qlo < qhi && qhi <= 1.0)) {
    throw DomainError("band quantile levels must satisfy 0 < qlo < qhi <= 1");
  }
  const GroupKey key{request.sequence_id, request.operator_id, request.season};
  const UncertaintyModel* model = state.analysis.find(key);
  if (model == nullptr) {
    throw NotFoundError("no data for group " + to_string(key));
  }
  const Correction c = state.predictors.correct(key, request.nominal_estimate_s);

  WhatIfResponse out;
  out.corrected_estimate_s = c.estimate_s;
  out.std_s = c.std_s;
  out.band_q05_s = request.nominal_estimate_s + quantile(model->band.upper(), qlo);
  out.band_q95_s = request.nominal_estimate_s + quantile(model->band.lower(), qhi);
  out.model_kind = model->kind;
  out.sample_count = model->sample_count;
  out.model_source = c.source;
  out.clamped = c.clamped;
  return out;
}

json to_json(const WhatIfResponse& r) {
  return json{{"corrected_estimate_s", r.corrected_estimate_s},
              {"std_s", r.std_s},
              {"band_q05_s", r.band_q05_s},
              {"band_q95_s", r.band_q95_s},
              {"model_kind", std::string(to_string(r.model_kind))},
              {"sample_count", r.sample_count},
              {"model_source", std::string(to_string(r.model_source))},
              {"clamped", r.clamped}};
}

json sequences_payload(const ServiceState& state) {
  struct Summary {
    std::set<std::string> seasons;
    std::set<std::string> operators;
    std::size_t records = 0;
  };
  std::map<std::string, Summary> by_sequence;
  for (const auto& r : state.snapshot.records) {
    auto& s = by_sequence[r.sequence_id];
    s.seasons.insert(std::string(to_string(r.season)));
    s.operators.insert(r.operator_id);
    s.records += 1;
  }
  json out = json::array();
  for (const auto& [id, s] : by_sequence) {
    out.push_back(json{{"sequence_id", id},
                       {"seasons", s.seasons},
                       {"operators", s.operators},
                       {"record_count", s.records}});
  }
  return out;
}

namespace {

HttpResponse error_response(int status, std::string_view code, const std::string& message) {
  return HttpResponse{status, json{{"code", code}, {"message", message}}.dump()};
}

HttpResponse ok(const json& payload) { return HttpResponse{200, payload.dump()}; }

std::optional<std::string> param(const HttpRequest& req, const std::string& name) {
  auto it = req.query.find(name);
  if (it == req.query.end() || it->second.empty()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<double> parse_level(const HttpRequest& req, const std::string& name, double fallback, bool& bad) {
  auto text = param(req, name);
  if (!text) {
    return fallback;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(*text, &used);
    if (used != text->size()) {
      bad = true;
      return std::nullopt;
    }
    return v;
  } catch (const std::exception&) {
    bad = true;
    return std::nullopt;
  }
}

HttpResponse get_uncertainty(const ServiceState& state, const HttpRequest& req) {
  const auto seq = param(req, "sequence");
  const auto op = param(req, "operator");
  const auto season_text = param(req, "season");
  if (!seq || !op || !season_text) {
    return error_response(400, "bad_request", "sequence, operator and season are required");
  }
  const auto season = parse_season(*season_text);
  const UncertaintyModel* model = season ? state.analysis.find(GroupKey{*seq, *op, *season}) : nullptr;
  if (model == nullptr) {
    return error_response(404, "group_not_found",
                          "no data for " + *seq + "/" + *op + "/" + *season_text);
  }
  return ok(to_json(*model));
}

HttpResponse get_ranking(const ServiceState& state, const HttpRequest& req) {
  const auto seq = param(req, "sequence");
  const auto season_text = param(req, "season");
  if (!seq || !season_text) {
    return error_response(400, "bad_request", "sequence and season are required");
  }
  const auto season = parse_season(*season_text);
  const SequenceRanking* ranking = season ? state.analysis.ranking(*seq, *season) : nullptr;
  if (ranking == nullptr) {
    return error_response(404, "group_not_found", "no data for " + *seq + "/" + *season_text);
  }
  json entries = json::array();
  for (const auto& e : ranking->entries) {
    entries.push_back(to_json(e));
  }
  return ok(entries);
}

HttpResponse post_whatif(const ServiceState& state, const HttpRequest& req) {
  json body;
  try {
    body = json::parse(req.body);
  } catch (const json::exception&) {
    return error_response(400, "bad_request", "request body is not valid JSON");
  }
  if (!body.is_object()) {
    return error_response(400, "bad_request", "request body must be a JSON object");
  }
  const auto text_field = [&](const char* key) -> std::optional<std::string> {
    auto it = body.find(key);
    if (it == body.end() || !it->is_string() || it->get<std::string>().empty()) {
      return std::nullopt;
    }
    return it->get<std::string>();
  };
  const auto seq = text_field("sequence_id");
  const auto op = text_field("operator_id");
  const auto season_text = text_field("season");
  auto nominal_it = body.find("nominal_estimate_s");
  if (!seq || !op || !season_text || nominal_it == body.end() || !nominal_it->is_number()) {
    return error_response(400, "bad_request",
                          "sequence_id, operator_id, season and numeric nominal_estimate_s are required");
  }
  const double nominal = nominal_it->get<double>();
  if (!(nominal > 0.0)) {
    return error_response(400, "bad_request", "nominal_estimate_s must be positive");
  }
  bool bad = false;
  const auto qlo = parse_level(req, "qlo", 0.05, bad);
  const auto qhi = parse_level(req, "qhi", 0.95, bad);
  if (bad || !(*qlo > 0.0 && *qlo < *qhi && *qhi <= 1.0)) {
    return error_response(400, "bad_request", "qlo/qhi must satisfy 0 < qlo < qhi <= 1");
  }
  const auto season = parse_season(*season_text);
  if (!season) {
    return error_response(404, "group_not_found", "no data for season '" + *season_text + "'");
  }
  try {
    return ok(to_json(evaluate_what_if(state, WhatIfRequest{*seq, *op, *season, nominal}, *qlo, *qhi)));
  } catch (const NotFoundError& e) {
    return error_response(404, "group_not_found", e.what());
  }
}

}  // namespace

struct Service::Server {
  httplib::Server http;
};

Service::Service(std::shared_ptr<const ServiceState> initial, ServiceOptions options)
    : state_(std::move(initial)), options_(std::move(options)) {}

Service::~Service() { stop(); }

std::shared_ptr<const ServiceState> Service::state() const {
  std::lock_guard lock(state_mutex_);
  return state_;
}

void Service::publish(std::shared_ptr<const ServiceState> next) {
  std::lock_guard lock(state_mutex_);
  state_ = std::move(next);
}

HttpResponse Service::train() {
  if (training_.exchange(true)) {
    return error_response(409, "train_in_progress", "a training run is already in progress");
  }
  struct Release {
    std::atomic<bool>& flag;
    ~Release() { flag.store(false); }
  } release{training_};

  if (options_.on_train_start) {
    options_.on_train_start();
  }
  const auto current = state();
  auto next = build_state(current->snapshot, current->config, true, current->generation + 1);
  const auto rows = compare_before_after(next->snapshot, next->predictors, next->config.analysis);
  publish(next);
  return ok(json{{"generation", next->generation}, {"groups", to_json(rows)}});
}

HttpResponse Service::handle(const HttpRequest& req) {
  const bool get = req.method == "GET";
  const bool post = req.method == "POST";
  try {
    if (req.path == "/api/v1/train") {
      return post ? train() : error_response(405, "method_not_allowed", "use POST");
    }
    const auto current = state();
    if (req.path == "/api/v1/sequences") {
      return get ? ok(sequences_payload(*current)) : error_response(405, "method_not_allowed", "use GET");
    }
    if (req.path == "/api/v1/uncertainty") {
      return get ? get_uncertainty(*current, req) : error_response(405, "method_not_allowed", "use GET");
    }
    if (req.path == "/api/v1/ranking") {
      return get ? get_ranking(*current, req) : error_response(405, "method_not_allowed", "use GET");
    }
    if (req.path == "/api/v1/whatif") {
      return post ? post_whatif(*current, req) : error_response(405, "method_not_allowed", "use POST");
    }
    return error_response(404, "not_found", "no route for " + req.path);
  } catch (const DomainError& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const Error& e) {
    return error_response(500, std::string(to_string(e.code())), e.what());
  }
}

namespace {

void install_routes(httplib::Server& http, Service& service) {
  auto bridge = [&service](const httplib::Request& in, httplib::Response& out) {
    HttpRequest req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) {
      req.query.emplace(k, v);
    }
    req.body = in.body;
    const HttpResponse res = service.handle(req);
    out.status = res.status;
    out.set_content(res.body, "application/json");
  };
  http.Get(".*", bridge);
  http.Post(".*", bridge);
  http.Options(".*", [](const httplib::Request&, httplib::Response& out) { out.status = 204; });
  http.set_post_routing_handler([&service](const httplib::Request&, httplib::Response& out) {
    out.set_header("Access-Control-Allow-Origin", service.state()->config.service.cors_origin);
    out.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    out.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
}

}  // namespace

bool Service::listen(const std::string& host, int port) {
  server_ = std::make_unique<Server>();
  install_routes(server_->http, *this);
  return server_->http.listen(host, port);
}

int Service::bind_any_port(const std::string& host) {
  server_ = std::make_unique<Server>();
  install_routes(server_->http, *this);
  return server_->http.bind_to_any_port(host);
}

bool Service::serve_bound() { return server_ && server_->http.listen_after_bind(); }

void Service::stop() {
  if (server_) {
    server_->http.stop();
  }
}

}  // namespace uqsched
