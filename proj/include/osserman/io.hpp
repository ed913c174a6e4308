#pragma once

// JSON documents for tensors, Clifford systems, reports and recovery traces.
// Numeric arrays in tensor and system files are written with 17 significant
// digits so a reload reproduces every component bit for bit.

#include "osserman/clifford.hpp"
#include "osserman/curvature.hpp"
#include "osserman/osserman.hpp"
#include "osserman/recovery.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace osserman {

inline constexpr int kSchemaVersion = 1;

void write_tensor(std::ostream& os, const CurvatureTensor& r);
void write_clifford(std::ostream& os, const CliffordSystem& c);

/// Parses a tensor document and runs validate_tensor. Io on malformed input,
/// InvalidTensor if the symmetries fail.
CurvatureTensor read_tensor(std::istream& is);
CliffordSystem read_clifford(std::istream& is);

void save_tensor(const std::filesystem::path& p, const CurvatureTensor& r);
void save_clifford(const std::filesystem::path& p, const CliffordSystem& c);
CurvatureTensor load_tensor(const std::filesystem::path& p);
CliffordSystem load_clifford(const std::filesystem::path& p);

nlohmann::json to_json(const SpectrumProfile& p);
nlohmann::json to_json(const OssermanReport& r);
nlohmann::json to_json(const DualityReport& r);
nlohmann::json to_json(const std::vector<TraceStage>& trace);

}  // namespace osserman
