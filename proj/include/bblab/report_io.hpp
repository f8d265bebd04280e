#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bblab/adjoint.hpp"
#include "bblab/blowup.hpp"
#include "bblab/geometry.hpp"
#include "bblab/model.hpp"
#include "bblab/optimize.hpp"
#include "bblab/weiss.hpp"

namespace bblab {

using Json = nlohmann::ordered_json;

Json to_json(const ProblemSpec& spec);
ProblemSpec spec_from_json(const Json& j);

Json to_json(const ValidationReport& r);
Json to_json(const OptimizationReport& r);  // traces inline; the control goes to BBF1
Json to_json(const CurveSet& c);
Json to_json(const AngularProfile& p);
Json to_json(const std::vector<AngularProfile>& catalogue);
Json to_json(const SecondOrderReport& r);
Json to_json(const IntermediateDensityResult& r);
Json to_json(const MatchResult& r);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::string render() const;  // %.17g, comma separated, trailing newline
};

CsvTable derivative_csv(const DerivativeReport& r);  // first-order rows then second-order rows
CsvTable trace_csv(const OptimizationReport& r);
CsvTable weiss_csv(const WeissProfile& p);
CsvTable angular_csv(const std::vector<double>& values);  // theta_i = 2 pi i / n
CsvTable profile_csv(const AngularProfile& p, int samples = 512);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Writes bytes and returns their hash; throws IoError.
std::uint64_t write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace bblab
