#include "coboundary/json_io.hpp"

#include <fstream>

#include "coboundary/errors.hpp"

namespace coboundary {

Json to_json(const Rational& r) { return r.str(); }

Json to_json(const IntervalSet& s) {
    Json out = Json::array();
    for (const auto& iv : s.parts()) out.push_back({{"lo", iv.lo.str()}, {"hi", iv.hi.str()}});
    return out;
}

Json to_json(const StepFunction& f) {
    Json pieces = Json::array();
    for (const auto& p : f.pieces())
        pieces.push_back({{"lo", p.iv.lo.str()}, {"hi", p.iv.hi.str()}, {"value", p.value.str()}});
    return Json{{"pieces", std::move(pieces)}};
}

Json to_json(const PiecewiseTranslation& t) {
    Json branches = Json::array();
    for (const auto& b : t.branches())
        branches.push_back(
            {{"lo", b.source.lo.str()}, {"hi", b.source.hi.str()}, {"offset", b.offset.str()}});
    return Json{{"branches", std::move(branches)}};
}

Rational rational_from_json(const Json& j) {
    if (!j.is_string()) throw ParseError("expected a rational as a \"num/den\" string");
    return Rational::parse(j.get<std::string>());
}

IntervalSet interval_set_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("expected an array of intervals");
    std::vector<Interval> ivs;
    for (const auto& e : j)
        ivs.emplace_back(rational_from_json(e.at("lo")), rational_from_json(e.at("hi")));
    return IntervalSet(std::move(ivs));
}

StepFunction step_function_from_json(const Json& j) {
    if (!j.contains("pieces") || !j.at("pieces").is_array())
        throw ParseError("step function JSON needs a \"pieces\" array");
    std::vector<StepFunction::Piece> ps;
    for (const auto& e : j.at("pieces"))
        ps.push_back({Interval(rational_from_json(e.at("lo")), rational_from_json(e.at("hi"))),
                      rational_from_json(e.at("value"))});
    return StepFunction(std::move(ps));
}

PiecewiseTranslation translation_from_json(const Json& j) {
    if (!j.contains("branches") || !j.at("branches").is_array())
        throw ParseError("translation JSON needs a \"branches\" array");
    std::vector<PiecewiseTranslation::Branch> bs;
    for (const auto& e : j.at("branches"))
        bs.push_back({Interval(rational_from_json(e.at("lo")), rational_from_json(e.at("hi"))),
                      rational_from_json(e.at("offset"))});
    return PiecewiseTranslation(std::move(bs));
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad JSON in '" + path + "': " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

}  // namespace coboundary
