// Copyright 2026 The zraudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ZRAUDIT_IO_H_
#define ZRAUDIT_IO_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "zraudit/audit.h"
#include "zraudit/bootstrap.h"
#include "zraudit/propensity.h"
#include "zraudit/synth.h"
#include "zraudit/tradeoff.h"

namespace zraudit {

using Json = nlohmann::ordered_json;

inline constexpr char kSchemaVersion[] = "1";

// Shortest round-tripping decimal form; "inf", "-inf" and "nan" for the
// non-finite values.
std::string FormatDouble(double value);

// Strict decimal parse of the whole string.
absl::StatusOr<double> ParseDouble(std::string_view text);

// Writes the record CSV: id, membership, then score, guess and pi_hat when
// any record carries them, then f0..f{d-1}. Absent optional values are
// written as empty cells.
void WriteRecordsCsv(std::ostream& out, std::span<const AuditRecord> records);

// Parses the record CSV. The header is mandatory, `membership` is
// mandatory, and at least one of `score` or feature columns must exist.
// Unknown columns are rejected. Every error is InvalidArgument.
absl::StatusOr<std::vector<AuditRecord>> ReadRecordsCsv(std::istream& in);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, std::string_view contents);

Json ToJson(const TradeoffCurve& curve);
absl::StatusOr<TradeoffCurve> CurveFromJson(const Json& json);

Json ToJson(const PrivacyHypothesis& hypothesis);
Json ToJson(const AuditReport& report);
Json ToJson(const PropensityModel& model);
Json ToJson(const BootstrapSummary& summary);
Json ToJson(const SynthConfig& config);
Json ToJson(const Vector& v);
Json ToJson(const Matrix& m);  // list of rows

// Features of the records as a matrix; every record must carry the same
// number of features, at least one.
absl::StatusOr<Matrix> FeatureMatrix(std::span<const AuditRecord> records);
std::vector<int> Memberships(std::span<const AuditRecord> records);

}  // namespace zraudit

#endif  // ZRAUDIT_IO_H_
