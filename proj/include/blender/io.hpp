#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

#include "blender/blender_cert.hpp"
#include "blender/historic.hpp"
#include "blender/ifs.hpp"
#include "blender/interval.hpp"
#include "blender/skew_system.hpp"
#include "blender/steering.hpp"

namespace blender::io {

using Json = nlohmann::ordered_json;

inline Json to_json(const Rational& r) { return r.str(); }

inline Rational rational_from(const Json& j) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    throw ParseError("expected a rational string, got " + j.dump());
}

inline Json to_json(const Interval& i) {
    return Json{{"lo", i.lo().str()}, {"hi", i.hi().str()}, {"lo_open", i.lo_open()}, {"hi_open", i.hi_open()}};
}

inline Interval interval_from(const Json& j) {
    return {rational_from(j.at("lo")), rational_from(j.at("hi")), j.at("lo_open").get<bool>(),
            j.at("hi_open").get<bool>()};
}

inline Json to_json(const std::vector<Rational>& v) {
    Json out = Json::array();
    for (const Rational& r : v) out.push_back(r.str());
    return out;
}

inline std::vector<Rational> rationals_from(const Json& j) {
    std::vector<Rational> out;
    for (const Json& e : j) out.push_back(rational_from(e));
    return out;
}

inline Json to_json(const SystemParams& p) {
    return Json{{"lambda", p.lambda.str()}, {"mu", p.mu.str()},       {"eps", p.eps.str()},
                {"kappa", p.kappa.str()},   {"rho", p.rho.str()},     {"s_dim", p.s_dim},
                {"uu_dim", p.uu_dim},       {"delta0", p.delta0.str()}};
}

inline SystemParams params_from(const Json& j) {
    SystemParams p;
    p.lambda = rational_from(j.at("lambda"));
    p.mu = rational_from(j.at("mu"));
    p.eps = rational_from(j.at("eps"));
    p.kappa = rational_from(j.at("kappa"));
    p.rho = rational_from(j.at("rho"));
    p.s_dim = j.at("s_dim").get<int>();
    p.uu_dim = j.at("uu_dim").get<int>();
    p.delta0 = rational_from(j.at("delta0"));
    return p;
}

inline Json to_json(const ObservableSpec& s) { return Json{{"one", s.one.str()}, {"zero", s.zero.str()}}; }
inline ObservableSpec observable_from(const Json& j) { return {rational_from(j.at("one")), rational_from(j.at("zero"))}; }

inline Json to_json(const Point& z) {
    return Json{{"base_s", to_json(z.base_s)}, {"base_uu", to_json(z.base_uu)}, {"fiber", z.fiber.str()}};
}
inline Point point_from(const Json& j) {
    return {rationals_from(j.at("base_s")), rationals_from(j.at("base_uu")), rational_from(j.at("fiber"))};
}

inline Json to_json(const CoveringCertificate& c) {
    Json images = Json::array();
    for (const Interval& i : c.images) images.push_back(to_json(i));
    Json out{{"covered", c.covered}, {"images", images}};
    out["lebesgue_number"] = c.lebesgue_number ? Json(c.lebesgue_number->str()) : Json(nullptr);
    out["witness"] = c.witness ? Json(c.witness->str()) : Json(nullptr);
    return out;
}

inline Json to_json(const HyperbolicityReport& h) {
    return Json{{"chain_holds", h.chain_holds},
                {"norm_s", h.norm_s.str()},
                {"norm_cu", h.norm_cu.str()},
                {"conorm_uu", h.conorm_uu.str()},
                {"gamma_hat", h.gamma_hat.str()},
                {"nu_hat", h.nu_hat.str()}};
}

inline Json to_json(const DistalReport& d) {
    return Json{{"is_distal", d.is_distal},
                {"distance_to_family", d.distance_to_family.str()},
                {"r_max", d.r_max.str()},
                {"witness_word", d.witness_word.str()}};
}

inline Json to_json(const Condition& c) { return Json{{"holds", c.holds}, {"detail", c.detail}}; }

inline Json to_json(const BlenderReport& r) {
    Json sub = Json::array();
    for (const Interval& i : r.sub_regions) sub.push_back(to_json(i));
    Json out{{"cond1", to_json(r.cond1)}, {"cond2", to_json(r.cond2)}, {"cond3", to_json(r.cond3)},
             {"cond4", to_json(r.cond4)}, {"sub_regions", sub}};
    out["lebesgue_number"] = r.lebesgue_number ? Json(r.lebesgue_number->str()) : Json(nullptr);
    out["c_hat_max"] = r.c_hat_max.str();
    out["max_admissible_c_hat"] = r.max_admissible_c_hat ? Json(r.max_admissible_c_hat->str()) : Json(nullptr);
    out["overall"] = r.overall;
    return out;
}

inline Phase phase_from(const std::string& s) {
    if (s == "NearP") return Phase::NearP;
    if (s == "TransitOut") return Phase::TransitOut;
    if (s == "InD") return Phase::InD;
    if (s == "TransitBack") return Phase::TransitBack;
    throw ParseError("unknown phase '" + s + "'");
}

inline Json to_json(const std::vector<Block>& blocks) {
    Json out = Json::array();
    for (const Block& b : blocks) out.push_back(Json{{"phase", to_string(b.phase)}, {"length", b.length}});
    return out;
}

inline std::vector<Block> blocks_from(const Json& j) {
    std::vector<Block> out;
    for (const Json& b : j) out.push_back({phase_from(b.at("phase").get<std::string>()), b.at("length").get<std::size_t>()});
    return out;
}

inline Json to_json(const Schedule& s) {
    Json cps = Json::array();
    for (const auto& c : s.checkpoints)
        cps.push_back(Json{{"n", c.n}, {"kind", to_string(c.kind)}, {"bound", c.bound.str()}});
    return Json{{"N", s.N},
                {"slack", s.slack.str()},
                {"transit", Json{{"out", s.transit.out}, {"back", s.transit.back}}},
                {"blocks", to_json(s.blocks)},
                {"checkpoints", cps}};
}

inline Schedule schedule_from(const Json& j) {
    Schedule s;
    s.N = j.at("N").get<std::size_t>();
    s.slack = rational_from(j.at("slack"));
    s.transit = {j.at("transit").at("out").get<std::size_t>(), j.at("transit").at("back").get<std::size_t>()};
    s.blocks = blocks_from(j.at("blocks"));
    for (const Json& c : j.at("checkpoints")) {
        const std::string kind = c.at("kind").get<std::string>();
        if (kind != "high" && kind != "low") throw ParseError("unknown checkpoint kind '" + kind + "'");
        s.checkpoints.push_back({c.at("n").get<std::size_t>(), kind == "high" ? CheckpointKind::High : CheckpointKind::Low,
                                 rational_from(c.at("bound"))});
    }
    return s;
}

inline Json to_json(const CylinderConstraint& c) {
    Json regions = Json::array();
    for (const TimedRegion& r : c.checkpoints)
        regions.push_back(Json{{"first", r.first}, {"last", r.last}, {"region", to_json(r.region)}});
    return Json{{"word", c.word.str()},
                {"start_enclosure", to_json(c.start_enclosure)},
                {"end_enclosure", to_json(c.end_enclosure)},
                {"checkpoints", regions}};
}

inline CylinderConstraint constraint_from(const Json& j) {
    CylinderConstraint c;
    c.word = Word::parse(j.at("word").get<std::string>());
    c.start_enclosure = interval_from(j.at("start_enclosure"));
    c.end_enclosure = interval_from(j.at("end_enclosure"));
    for (const Json& r : j.at("checkpoints"))
        c.checkpoints.push_back({r.at("first").get<std::size_t>(), r.at("last").get<std::size_t>(),
                                 interval_from(r.at("region"))});
    return c;
}

inline Json to_json(const HistoricCertificate& c) {
    Json pairs = Json::array();
    for (const CheckpointPair& p : c.pairs)
        pairs.push_back(Json{{"n1", p.n1}, {"n2", p.n2}, {"avg1", p.avg1.str()}, {"avg2", p.avg2.str()}});
    return Json{{"system", to_json(c.params)},
                {"observable", to_json(c.observable)},
                {"N", c.N},
                {"horizon", c.horizon()},
                {"schedule", to_json(c.schedule)},
                {"realized_blocks", to_json(c.realized_blocks)},
                {"pairs", pairs},
                {"gap", c.gap.str()},
                {"constraint", to_json(c.constraint)},
                {"chosen_point", to_json(c.chosen_point)},
                {"scope_note",
                 "certifies the partial-average oscillation of chosen_point; membership in the homoclinic class "
                 "is not numerically certified"}};
}

inline HistoricCertificate certificate_from(const Json& j) {
    HistoricCertificate c;
    c.params = params_from(j.at("system"));
    c.observable = observable_from(j.at("observable"));
    c.N = j.at("N").get<std::size_t>();
    c.schedule = schedule_from(j.at("schedule"));
    c.realized_blocks = blocks_from(j.at("realized_blocks"));
    for (const Json& p : j.at("pairs"))
        c.pairs.push_back({p.at("n1").get<std::size_t>(), p.at("n2").get<std::size_t>(), rational_from(p.at("avg1")),
                           rational_from(p.at("avg2"))});
    c.gap = rational_from(j.at("gap"));
    c.constraint = constraint_from(j.at("constraint"));
    c.chosen_point = point_from(j.at("chosen_point"));
    return c;
}

/// Decimal rendering for CSV time series (plotting only; exact values live
/// in the certificate).
inline std::string decimal(const Rational& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", r.approx());
    return buf;
}

}  // namespace blender::io
