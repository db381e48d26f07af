#pragma once

// Instance and contract documents, plus the canonical JSON writer every
// artifact goes through (sorted keys, 17 significant digits).

#include "screenline/errors.hpp"
#include "screenline/format.hpp"
#include "screenline/model.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace screenline {

using nlohmann::json;

namespace detail {

inline void write_canonical(const json& j, std::string& out, int indent, int depth) {
    const auto pad = [&](int d) { out.append(static_cast<std::size_t>(d * indent), ' '); };
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        std::size_t i = 0;
        for (const auto& [key, value] : j.items()) {
            pad(depth + 1);
            out += json(key).dump();
            out += ": ";
            write_canonical(value, out, indent, depth + 1);
            out += ++i < j.size() ? ",\n" : "\n";
        }
        pad(depth);
        out += "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        bool scalar = true;
        for (const auto& v : j) scalar = scalar && !v.is_structured();
        if (scalar) {
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                write_canonical(j[i], out, indent, depth + 1);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            pad(depth + 1);
            write_canonical(j[i], out, indent, depth + 1);
            out += i + 1 < j.size() ? ",\n" : "\n";
        }
        pad(depth);
        out += "]";
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            out += v > 0 ? "\"inf\"" : (v < 0 ? "\"-inf\"" : "\"nan\"");
            return;
        }
        out += fixed17(v);
        return;
    }
    default:
        out += j.dump();
    }
}

inline const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(ErrorCode::schema, path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(ErrorCode::schema, path + "." + key + ": missing field");
    return *it;
}

inline double real(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "inf") return HUGE_VAL;
        if (s == "-inf") return -HUGE_VAL;
    }
    fail(ErrorCode::schema, path + ": expected a number");
}

inline std::vector<double> reals(const json& j, const std::string& path) {
    if (!j.is_array()) fail(ErrorCode::schema, path + ": expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(real(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

inline std::size_t index(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(ErrorCode::schema, path + ": expected a nonnegative index");
    return j.get<std::size_t>();
}

inline json ext_to_json(ExtReal v) {
    if (v.is_pos_inf()) return "inf";
    if (v.is_neg_inf()) return "-inf";
    return v.value();
}

} // namespace detail

/// Canonical serialization: keys sorted, reals with 17 significant digits,
/// trailing newline. Identical values always give identical bytes.
inline std::string dump_canonical(const json& j) {
    std::string out;
    detail::write_canonical(j, out, 2, 0);
    out += "\n";
    return out;
}

inline json ext_to_json(ExtReal v) { return detail::ext_to_json(v); }

inline json instance_to_json(const Instance& inst) {
    json doc;
    const auto& t = inst.types();
    json params = json::object();
    std::set<std::string> names;
    for (const auto& p : t.params)
        for (const auto& [k, v] : p) names.insert(k);
    for (const auto& name : names) {
        json rows = json::array();
        for (const auto& p : t.params) {
            auto it = p.find(name);
            rows.push_back(it == p.end() ? json::array() : json(it->second));
        }
        params[name] = rows;
    }
    doc["types"] = {{"ids", t.ids}, {"weights", t.weights}};
    if (!names.empty()) doc["types"]["params"] = params;

    json allocs = json::array();
    for (const auto& a : inst.grid().allocations) {
        if (const auto* b = std::get_if<PricedBundle>(&a))
            allocs.push_back({{"p", b->price}, {"q", b->attrs}});
        else
            allocs.push_back({{"label", std::get<AbstractLabel>(a).label}});
    }
    doc["grid"] = {{"allocations", allocs}, {"outside_index", inst.outside()}};
    if (inst.grid().distances) doc["grid"]["distance"] = *inst.grid().distances;

    if (const auto* e = std::get_if<Expr>(&inst.utility_oracle().source))
        doc["utility"] = {{"expr", e->to_json()}};
    else
        doc["utility"] = {{"table", std::get<UtilityTable>(inst.utility_oracle().source)}};
    if (const auto* e = std::get_if<Expr>(&inst.cost_oracle().source)) {
        doc["cost"] = {{"expr", e->to_json()}};
    } else {
        json table = json::array();
        for (const auto& c : std::get<CostTable>(inst.cost_oracle().source)) table.push_back(ext_to_json(c));
        doc["cost"] = {{"table", table}};
    }

    switch (inst.kind()) {
    case VariantKind::full: doc["variant"] = {{"kind", "full"}}; break;
    case VariantKind::partial:
        doc["variant"] = {{"kind", "partial"}, {"reservation", std::get<PartialVariant>(inst.variant()).reservation}};
        break;
    case VariantKind::budget: {
        json pts = json::array();
        for (const auto& p : inst.budget().points)
            pts.push_back({{"type", t.ids[p.type]}, {"budget", p.budget}, {"weight", p.weight}});
        doc["variant"] = {{"kind", "budget"}, {"points", pts}};
        break;
    }
    }
    doc["tol"] = inst.tol();
    if (!inst.family().is_null()) doc["family"] = inst.family();
    return doc;
}

inline std::string save_instance(const Instance& inst) { return dump_canonical(instance_to_json(inst)); }

inline Instance instance_from_json(const json& doc) {
    using namespace detail;
    TypeSpace types;
    const json& jt = field(doc, "types", "$");
    const json& ids = field(jt, "ids", "types");
    if (!ids.is_array()) fail(ErrorCode::schema, "types.ids: expected an array of strings");
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!ids[i].is_string()) fail(ErrorCode::schema, "types.ids[" + std::to_string(i) + "]: expected a string");
        types.ids.push_back(ids[i].get<std::string>());
    }
    types.weights = reals(field(jt, "weights", "types"), "types.weights");
    types.params.resize(types.ids.size());
    if (jt.contains("params")) {
        const json& jp = jt["params"];
        if (!jp.is_object()) fail(ErrorCode::schema, "types.params: expected an object");
        for (const auto& [name, rows] : jp.items()) {
            const std::string path = "types.params." + name;
            if (!rows.is_array() || rows.size() != types.ids.size())
                fail(ErrorCode::schema, path + ": expected one row per type");
            for (std::size_t i = 0; i < rows.size(); ++i)
                types.params[i][name] = reals(rows[i], path + "[" + std::to_string(i) + "]");
        }
    }

    AllocationGrid grid;
    const json& jg = field(doc, "grid", "$");
    const json& ja = field(jg, "allocations", "grid");
    if (!ja.is_array()) fail(ErrorCode::schema, "grid.allocations: expected an array");
    for (std::size_t z = 0; z < ja.size(); ++z) {
        const std::string path = "grid.allocations[" + std::to_string(z) + "]";
        const json& a = ja[z];
        if (a.is_object() && a.contains("label")) {
            if (!a["label"].is_string()) fail(ErrorCode::schema, path + ".label: expected a string");
            grid.allocations.emplace_back(AbstractLabel{a["label"].get<std::string>()});
        } else {
            PricedBundle b;
            b.price = real(field(a, "p", path), path + ".p");
            if (a.contains("q")) b.attrs = reals(a["q"], path + ".q");
            grid.allocations.emplace_back(std::move(b));
        }
    }
    grid.outside_index = index(field(jg, "outside_index", "grid"), "grid.outside_index");
    if (jg.contains("distance")) {
        const json& jd = jg["distance"];
        if (!jd.is_array()) fail(ErrorCode::schema, "grid.distance: expected a table");
        std::vector<std::vector<double>> d;
        for (std::size_t i = 0; i < jd.size(); ++i) d.push_back(reals(jd[i], "grid.distance[" + std::to_string(i) + "]"));
        grid.distances = std::move(d);
    }

    UtilityOracle utility;
    const json& ju = field(doc, "utility", "$");
    if (ju.contains("expr")) {
        utility.source = Expr::from_json(ju["expr"], "utility.expr");
    } else {
        const json& tab = field(ju, "table", "utility");
        if (!tab.is_array()) fail(ErrorCode::schema, "utility.table: expected rows");
        UtilityTable rows;
        for (std::size_t i = 0; i < tab.size(); ++i) rows.push_back(reals(tab[i], "utility.table[" + std::to_string(i) + "]"));
        utility.source = std::move(rows);
    }

    CostOracle cost;
    const json& jc = field(doc, "cost", "$");
    if (jc.contains("expr")) {
        cost.source = Expr::from_json(jc["expr"], "cost.expr");
    } else {
        auto vals = reals(field(jc, "table", "cost"), "cost.table");
        CostTable table;
        for (std::size_t z = 0; z < vals.size(); ++z) {
            if (std::isnan(vals[z]) || vals[z] == -HUGE_VAL)
                fail(ErrorCode::validation, "cost.table[" + std::to_string(z) + "]: invalid cost");
            table.push_back(vals[z] == HUGE_VAL ? ExtReal::pos_inf() : ExtReal(vals[z]));
        }
        cost.source = std::move(table);
    }

    ModelVariant variant;
    const json& jv = field(doc, "variant", "$");
    const json& kind = field(jv, "kind", "variant");
    if (!kind.is_string()) fail(ErrorCode::schema, "variant.kind: expected a string");
    const auto k = kind.get<std::string>();
    if (k == "full") {
        variant = FullVariant{};
    } else if (k == "partial") {
        variant = PartialVariant{reals(field(jv, "reservation", "variant"), "variant.reservation")};
    } else if (k == "budget") {
        BudgetVariant bv;
        const json& pts = field(jv, "points", "variant");
        if (!pts.is_array()) fail(ErrorCode::schema, "variant.points: expected an array");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string path = "variant.points[" + std::to_string(i) + "]";
            const json& jtype = field(pts[i], "type", path);
            if (!jtype.is_string()) fail(ErrorCode::schema, path + ".type: expected a type id");
            auto it = std::find(types.ids.begin(), types.ids.end(), jtype.get<std::string>());
            if (it == types.ids.end())
                fail(ErrorCode::validation, path + ".type: unknown type '" + jtype.get<std::string>() + "'");
            BudgetPoint bp;
            bp.type = static_cast<std::size_t>(it - types.ids.begin());
            bp.budget = real(field(pts[i], "budget", path), path + ".budget");
            bp.weight = real(field(pts[i], "weight", path), path + ".weight");
            bv.points.push_back(bp);
        }
        variant = std::move(bv);
    } else {
        fail(ErrorCode::schema, "variant.kind: unknown kind '" + k + "'");
    }

    double tol = kDefaultTol;
    if (doc.contains("tol")) tol = real(doc["tol"], "tol");
    json family = doc.contains("family") ? doc["family"] : json(nullptr);
    return Instance::create(std::move(types), std::move(grid), std::move(utility), std::move(cost), std::move(variant),
                            tol, std::move(family));
}

inline json parse_document(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::schema, what + ": " + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::validation, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::validation, "cannot write " + path);
    out << content;
}

inline Instance load_instance(const std::string& text) {
    return instance_from_json(parse_document(text, "instance"));
}

inline Instance load_instance_file(const std::string& path) { return load_instance(read_file(path)); }

// Contracts travel as point-label -> grid-index maps.

inline json contract_to_json(const Instance& inst, const Contract& c) {
    json j = json::object();
    for (std::size_t k = 0; k < c.size(); ++k) j[inst.point_label(k)] = c[k];
    return j;
}

inline Contract contract_from_json(const Instance& inst, const json& j) {
    const json& body = j.is_object() && j.contains("contract") ? j["contract"] : j;
    if (!body.is_object()) fail(ErrorCode::schema, "contract: expected a point -> index map");
    Contract c{std::vector<AllocId>(inst.num_points(), 0)};
    std::vector<bool> seen(inst.num_points(), false);
    for (const auto& [label, value] : body.items()) {
        auto k = inst.find_point(label);
        if (!k) fail(ErrorCode::shape, "contract: unknown point '" + label + "'");
        c.assignment[*k] = detail::index(value, "contract." + label);
        seen[*k] = true;
    }
    for (std::size_t k = 0; k < seen.size(); ++k)
        if (!seen[k]) fail(ErrorCode::shape, "contract: missing point '" + inst.point_label(k) + "'");
    check_shape(inst, c);
    return c;
}

} // namespace screenline
