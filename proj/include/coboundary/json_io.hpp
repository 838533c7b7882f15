#ifndef COBOUNDARY_JSON_IO_HPP
#define COBOUNDARY_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "coboundary/translation.hpp"

namespace coboundary {

// Key order is fixed so identical inputs serialize byte-identically.
using Json = nlohmann::ordered_json;

Json to_json(const Rational& r);
Json to_json(const IntervalSet& s);
Json to_json(const StepFunction& f);
Json to_json(const PiecewiseTranslation& t);

Rational rational_from_json(const Json& j);
IntervalSet interval_set_from_json(const Json& j);
StepFunction step_function_from_json(const Json& j);
PiecewiseTranslation translation_from_json(const Json& j);

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace coboundary

#endif
