#pragma once

// Text container for power-flow datasets and function maps.
//
//   format absense-dataset
//   version 1
//   kind power_flow | function_map
//   source analytical | imported          (power_flow only)
//   frequency_hz <f>
//   node_count <n>                        (power_flow only)
//   resistance_ohm <r0> <r1> ...
//   capacitance_farad <c0> <c1> ...
//   wave_count <w>
//   wave <i> azimuth_deg=<a> elevation_deg=<e> polarization=<TE|TM> incident_power_density=<s>
//   begin_records
//   <csv header row>
//   <csv rows>
//   end_records
//
// power_flow rows are wave_index,load_index,node_index,power_w where
// node_index may be '*' to cover every node. function_map rows are
// function_id,wave_index,load_index,resistance_ohm,capacitance_farad.
// Lines starting with '#' are comments. Doubles use shortest round-trip form.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "absense/emmodel.hpp"

namespace absense {

class DatasetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Strict parse of a whole token; throws std::invalid_argument.
double parse_double(const std::string& token);

void write_dataset(const PowerFlowDataset& ds, std::ostream& os);
PowerFlowDataset read_dataset(std::istream& is, const std::string& origin = "<stream>");
void save_dataset(const PowerFlowDataset& ds, const std::filesystem::path& path);
PowerFlowDataset load_dataset(const std::filesystem::path& path);

void write_function_map(const FunctionMap& map, double frequency_hz, std::ostream& os);
FunctionMap read_function_map(std::istream& is, const std::string& origin = "<stream>");
void save_function_map(const FunctionMap& map, double frequency_hz,
                       const std::filesystem::path& path);
FunctionMap load_function_map(const std::filesystem::path& path);

}  // namespace absense
