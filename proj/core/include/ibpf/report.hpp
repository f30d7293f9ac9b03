#pragma once
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ibpf/approx.hpp"
#include "ibpf/verify.hpp"

namespace ibpf::report {

// Sorted keys, two-space indent, floats as %.17g, non-finite floats as null.
std::string dump(const nlohmann::json& j);

nlohmann::json to_json(const verify::IbPFReport& r);
nlohmann::json to_json(const verify::BoundsReport& r);
nlohmann::json to_json(const verify::ConsistencyReport& r);
nlohmann::json to_json(const verify::ContinuityProbe& p);

inline constexpr const char* kCsvHeader = "delta,functional,method,lhs,rhs,gap,budget,pass";
std::string csv(const std::vector<verify::IbPFReport>& reports);

std::string approx_csv(const std::vector<approx::DominationRow>& rows);

// atomic write; I/O failures name the path
void write(const std::string& path, const std::string& content);

}  // namespace ibpf::report
