#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "biharm/eigensolve.hpp"
#include "biharm/trial_family.hpp"
#include "biharm/verify.hpp"

namespace biharm {

// Machine-readable reports are JSON objects; the field layout is described
// in the README. Text reports are aligned columns for reading.

nlohmann::json to_json(const DomainDescription& d);
nlohmann::json to_json(const SpectrumResult& s, bool with_vectors = false);
nlohmann::json to_json(const KernelSummary& s);
nlohmann::json to_json(const TrialFamily& f);
nlohmann::json to_json(const IdentityReport& r);
nlohmann::json to_json(const InequalityReport& r);
nlohmann::json to_json(const ConvergenceRecord& r);

std::string format_text(const SpectrumResult& s);
std::string format_text(const KernelSummary& s);
std::string format_text(const TrialFamily& f, const IdentityReport* identities = nullptr);
std::string format_text(const InequalityReport& r);
std::string format_text(const ConvergenceRecord& r);

/// Header "k,lambda_k,mu_k_plus_shift,margin", then one row per k, values
/// printed with %.17g. Identical reports give identical bytes.
std::string csv_string(const InequalityReport& r);
/// Writes csv_string(r). Throws IoFailure.
void emit_csv(const InequalityReport& r, const std::filesystem::path& path);

/// Throws IoFailure.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace biharm
