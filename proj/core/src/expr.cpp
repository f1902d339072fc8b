#include "hesynth/expr.hpp"

#include <json.hpp>

namespace hesynth {

using json = nlohmann::ordered_json;

ExprPtr expr_const(int64_t value) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::constant;
  e->value = value;
  return e;
}

ExprPtr expr_read(int input, std::vector<int> index) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::read;
  e->input = input;
  e->index = std::move(index);
  return e;
}

static ExprPtr binary(Expr::Kind kind, ExprPtr a, ExprPtr b) {
  if (!a || !b) throw StructuralError("expr: null operand");
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprPtr expr_add(ExprPtr a, ExprPtr b) { return binary(Expr::Kind::add, std::move(a), std::move(b)); }
ExprPtr expr_sub(ExprPtr a, ExprPtr b) { return binary(Expr::Kind::sub, std::move(a), std::move(b)); }
ExprPtr expr_mul(ExprPtr a, ExprPtr b) { return binary(Expr::Kind::mul, std::move(a), std::move(b)); }

namespace {

json to_json(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::constant: return json{{"kind", "const"}, {"value", e->value}};
    case Expr::Kind::read: return json{{"kind", "read"}, {"input", e->input}, {"index", e->index}};
    case Expr::Kind::add: return json{{"kind", "add"}, {"a", to_json(e->a)}, {"b", to_json(e->b)}};
    case Expr::Kind::sub: return json{{"kind", "sub"}, {"a", to_json(e->a)}, {"b", to_json(e->b)}};
    case Expr::Kind::mul: return json{{"kind", "mul"}, {"a", to_json(e->a)}, {"b", to_json(e->b)}};
  }
  return json{};
}

ExprPtr from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "const") return expr_const(j.at("value").get<int64_t>());
  if (kind == "read")
    return expr_read(j.at("input").get<int>(), j.at("index").get<std::vector<int>>());
  if (kind == "add") return expr_add(from_json(j.at("a")), from_json(j.at("b")));
  if (kind == "sub") return expr_sub(from_json(j.at("a")), from_json(j.at("b")));
  if (kind == "mul") return expr_mul(from_json(j.at("a")), from_json(j.at("b")));
  if (kind == "div" || kind == "cmp" || kind == "select" || kind == "branch" || kind == "loop")
    throw ParseError("reference uses unsupported construct '" + kind +
                     "': only ring arithmetic over fixed indices can be lifted");
  throw ParseError("reference: unknown expr kind '" + kind + "'");
}

}  // namespace

std::string emit_expr_json_text(const ExprPtr& e) { return to_json(e).dump(); }

ExprPtr parse_expr_json_text(const std::string& text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& ex) {
    throw ParseError(std::string("expr json: ") + ex.what());
  }
}

}  // namespace hesynth
