#pragma once

// Closed-form oracles for priced allocations. An expression is a small tree
// over the allocation's price `p`, its attributes `q[k]` and per-type
// parameters; instance files store the tree verbatim so that loading and
// saving reproduce every evaluation bit for bit.

#include "screenline/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace screenline {

using TypeParams = std::map<std::string, std::vector<double>>;

class Expr {
public:
    enum class Op { num, price, attr, param, add, sub, mul, div, pow, max, min, neg, abs, sqrt };

    struct Context {
        double price = 0.0;
        std::span<const double> attrs;
        const TypeParams* params = nullptr;
    };

    Expr() = default;

    static Expr number(double v) {
        Expr e(Op::num);
        e.num_ = v;
        return e;
    }
    static Expr price() { return Expr(Op::price); }
    static Expr attr(std::size_t k) {
        Expr e(Op::attr);
        e.index_ = k;
        return e;
    }
    static Expr param(std::string name, std::size_t k) {
        Expr e(Op::param);
        e.name_ = std::move(name);
        e.index_ = k;
        return e;
    }
    static Expr node(Op op, std::vector<Expr> args) {
        Expr e(op);
        e.args_ = std::move(args);
        return e;
    }

    Op op() const { return op_; }

    double eval(const Context& ctx) const {
        switch (op_) {
        case Op::num: return num_;
        case Op::price: return ctx.price;
        case Op::attr:
            if (index_ >= ctx.attrs.size())
                fail(ErrorCode::validation, "expression reads attribute q[" + std::to_string(index_) +
                                                "] but the allocation has " +
                                                std::to_string(ctx.attrs.size()));
            return ctx.attrs[index_];
        case Op::param: {
            if (ctx.params == nullptr)
                fail(ErrorCode::validation, "type parameter '" + name_ + "' used outside a utility expression");
            auto it = ctx.params->find(name_);
            if (it == ctx.params->end() || index_ >= it->second.size())
                fail(ErrorCode::validation, "missing type parameter " + name_ + "[" + std::to_string(index_) + "]");
            return it->second[index_];
        }
        case Op::add: {
            double s = 0.0;
            for (const auto& a : args_) s += a.eval(ctx);
            return s;
        }
        case Op::mul: {
            double s = 1.0;
            for (const auto& a : args_) s *= a.eval(ctx);
            return s;
        }
        case Op::sub: return args_[0].eval(ctx) - args_[1].eval(ctx);
        case Op::div: return args_[0].eval(ctx) / args_[1].eval(ctx);
        case Op::pow: return std::pow(args_[0].eval(ctx), args_[1].eval(ctx));
        case Op::max: {
            double s = args_[0].eval(ctx);
            for (std::size_t i = 1; i < args_.size(); ++i) s = std::max(s, args_[i].eval(ctx));
            return s;
        }
        case Op::min: {
            double s = args_[0].eval(ctx);
            for (std::size_t i = 1; i < args_.size(); ++i) s = std::min(s, args_[i].eval(ctx));
            return s;
        }
        case Op::neg: return -args_[0].eval(ctx);
        case Op::abs: return std::fabs(args_[0].eval(ctx));
        case Op::sqrt: return std::sqrt(args_[0].eval(ctx));
        }
        return 0.0;
    }

    nlohmann::json to_json() const {
        using nlohmann::json;
        switch (op_) {
        case Op::num:
            if (std::isinf(num_)) return num_ > 0 ? json("inf") : json("-inf");
            return json(num_);
        case Op::price: return json("p");
        case Op::attr: return json{{"q", index_}};
        case Op::param: return json{{"param", name_}, {"i", index_}};
        default: break;
        }
        json args = json::array();
        for (const auto& a : args_) args.push_back(a.to_json());
        if (is_unary(op_)) return json{{std::string(op_name(op_)), args[0]}};
        return json{{std::string(op_name(op_)), args}};
    }

    static bool is_index(const nlohmann::json& j) {
        return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
    }

    static Expr from_json(const nlohmann::json& j, const std::string& path) {
        if (j.is_number()) return number(j.get<double>());
        if (j.is_string()) {
            auto s = j.get<std::string>();
            if (s == "p") return price();
            if (s == "inf") return number(HUGE_VAL);
            if (s == "-inf") return number(-HUGE_VAL);
            fail(ErrorCode::schema, path + ": unknown symbol '" + s + "'");
        }
        if (!j.is_object() || j.empty()) fail(ErrorCode::schema, path + ": expression must be a number, symbol or object");
        if (j.contains("q")) {
            if (!is_index(j["q"])) fail(ErrorCode::schema, path + ".q: expected a nonnegative index");
            return attr(j["q"].get<std::size_t>());
        }
        if (j.contains("param")) {
            if (!j["param"].is_string()) fail(ErrorCode::schema, path + ".param: expected a name");
            std::size_t k = 0;
            if (j.contains("i")) {
                if (!is_index(j["i"])) fail(ErrorCode::schema, path + ".i: expected a nonnegative index");
                k = j["i"].get<std::size_t>();
            }
            return param(j["param"].get<std::string>(), k);
        }
        if (j.size() != 1) fail(ErrorCode::schema, path + ": operator node must have exactly one key");
        const auto& [key, body] = *j.items().begin();
        for (Op op : {Op::add, Op::sub, Op::mul, Op::div, Op::pow, Op::max, Op::min, Op::neg, Op::abs, Op::sqrt}) {
            if (key != op_name(op)) continue;
            std::vector<Expr> args;
            const std::string sub = path + "." + key;
            if (is_unary(op)) {
                args.push_back(from_json(body, sub));
            } else {
                if (!body.is_array()) fail(ErrorCode::schema, sub + ": expected an argument array");
                for (std::size_t i = 0; i < body.size(); ++i)
                    args.push_back(from_json(body[i], sub + "[" + std::to_string(i) + "]"));
                const bool binary = op == Op::sub || op == Op::div || op == Op::pow;
                if (binary && args.size() != 2) fail(ErrorCode::schema, sub + ": expected two arguments");
                if (args.empty()) fail(ErrorCode::schema, sub + ": expected at least one argument");
            }
            return node(op, std::move(args));
        }
        fail(ErrorCode::schema, path + ": unknown operator '" + key + "'");
    }

private:
    explicit Expr(Op op) : op_(op) {}

    static constexpr bool is_unary(Op op) { return op == Op::neg || op == Op::abs || op == Op::sqrt; }

    static constexpr const char* op_name(Op op) {
        switch (op) {
        case Op::add: return "add";
        case Op::sub: return "sub";
        case Op::mul: return "mul";
        case Op::div: return "div";
        case Op::pow: return "pow";
        case Op::max: return "max";
        case Op::min: return "min";
        case Op::neg: return "neg";
        case Op::abs: return "abs";
        case Op::sqrt: return "sqrt";
        default: return "";
        }
    }

    Op op_ = Op::num;
    double num_ = 0.0;
    std::size_t index_ = 0;
    std::string name_;
    std::vector<Expr> args_;
};

// Builders used by the families module.
inline Expr operator+(Expr a, Expr b) { return Expr::node(Expr::Op::add, {std::move(a), std::move(b)}); }
inline Expr operator-(Expr a, Expr b) { return Expr::node(Expr::Op::sub, {std::move(a), std::move(b)}); }
inline Expr operator*(Expr a, Expr b) { return Expr::node(Expr::Op::mul, {std::move(a), std::move(b)}); }

inline Expr sum_of(std::vector<Expr> terms) {
    if (terms.empty()) return Expr::number(0.0);
    if (terms.size() == 1) return std::move(terms.front());
    return Expr::node(Expr::Op::add, std::move(terms));
}

} // namespace screenline
