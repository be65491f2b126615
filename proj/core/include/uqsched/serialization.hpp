#ifndef UQSCHED_SERIALIZATION_HPP
#define UQSCHED_SERIALIZATION_HPP

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "uqsched/distributions.hpp"
#include "uqsched/ingest.hpp"
#include "uqsched/pbox.hpp"
#include "uqsched/predictor.hpp"
#include "uqsched/scheduler.hpp"

// Canonical JSON shapes shared by snapshot files, CLI exports and the HTTP
// API. Decoders throw FormatError on structural problems and let domain
// constructors raise DomainError on invariant violations.
namespace uqsched {

using nlohmann::json;

json to_json(const StepCdf& cdf);
StepCdf step_cdf_from_json(const json& j);

json to_json(const PBox& pbox);
PBox pbox_from_json(const json& j);

json to_json(const GroupKey& key);
GroupKey group_key_from_json(const json& j);

json to_json(const TaskRecord& record);
TaskRecord task_record_from_json(const json& j);

json to_json(const Snapshot& snapshot);
/// Checks schema_version first (SchemaError on mismatch).
Snapshot snapshot_from_json(const json& j);

json to_json(const UncertaintyModel& model);
UncertaintyModel uncertainty_model_from_json(const json& j);

json to_json(const RankingEntry& entry);
json to_json(const SequenceRanking& ranking);
json to_json(const AnalysisConfig& config);
json to_json(const Analysis& analysis);

json to_json(const RqKernelParams& params);
RqKernelParams rq_params_from_json(const json& j);

json to_json(const GprModel& model);
/// Refits the solve cache from train_x/train_y/params (no hyper search).
GprModel gpr_model_from_json(const json& j);

json to_json(const PredictorBank& bank);
PredictorBank predictor_bank_from_json(const json& j);

json to_json(const DegreeComparison& row);
json to_json(const std::vector<DegreeComparison>& rows);

/// Two columns per bound: lower_x,lower_F,upper_x,upper_F; the shorter bound
/// leaves trailing cells empty.
void write_pbox_csv(const PBox& pbox, std::ostream& out);
PBox read_pbox_csv(std::istream& in);

}  // namespace uqsched

#endif  // UQSCHED_SERIALIZATION_HPP
