#include "crdt/client.hpp"

#include <cctype>

namespace crdt::client {

ExprPtr lit(std::int64_t v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Lit;
  e->value = v;
  return e;
}

ExprPtr var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->name = std::move(name);
  return e;
}

ExprPtr binary(Expr::Kind k, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

ProgPtr skip() {
  static const ProgPtr s = std::make_shared<Prog>();
  return s;
}

ProgPtr assign(std::string x, ExprPtr e) {
  auto p = std::make_shared<Prog>();
  p->kind = Prog::Kind::Asn;
  p->var = std::move(x);
  p->expr = std::move(e);
  return p;
}

ProgPtr loop(ExprPtr guard, ProgPtr body) {
  auto p = std::make_shared<Prog>();
  p->kind = Prog::Kind::While;
  p->expr = std::move(guard);
  p->first = std::move(body);
  return p;
}

ProgPtr seq(ProgPtr a, ProgPtr b) {
  // Kept right-nested so printing and parsing agree.
  if (a->kind == Prog::Kind::Seq) return seq(a->first, seq(a->second, std::move(b)));
  auto p = std::make_shared<Prog>();
  p->kind = Prog::Kind::Seq;
  p->first = std::move(a);
  p->second = std::move(b);
  return p;
}

ProgPtr upd(Operation op) {
  auto p = std::make_shared<Prog>();
  p->kind = Prog::Kind::Upd;
  p->op = std::move(op);
  return p;
}

ProgPtr qry(std::string x, Query q) {
  auto p = std::make_shared<Prog>();
  p->kind = Prog::Kind::Qry;
  p->var = std::move(x);
  p->query = std::move(q);
  return p;
}

SyntaxError::SyntaxError(const std::string& what, int l, int c)
    : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + what), line(l), column(c) {}

namespace {

struct Token {
  enum class Kind { Ident, Int, Sym, End } kind;
  std::string text;
  int line, column;
};

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    const int l = line, cc = col;
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      out.push_back({Token::Kind::Ident, text.substr(i, j - i), l, cc});
      advance(j - i);
    } else if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j - i > 15) throw SyntaxError("integer literal too large", l, cc);
      out.push_back({Token::Kind::Int, text.substr(i, j - i), l, cc});
      advance(j - i);
    } else if (text.compare(i, 2, ":=") == 0) {
      out.push_back({Token::Kind::Sym, ":=", l, cc});
      advance(2);
    } else if (std::string("();{}+-*=<").find(static_cast<char>(c)) != std::string::npos) {
      out.push_back({Token::Kind::Sym, std::string(1, static_cast<char>(c)), l, cc});
      advance(1);
    } else {
      throw SyntaxError(std::string("unexpected character '") + static_cast<char>(c) + "'", l, cc);
    }
  }
  out.push_back({Token::Kind::End, "", line, col});
  return out;
}

bool is_keyword(const std::string& s) { return s == "skip" || s == "while" || s == "upd" || s == "qry"; }

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ProgPtr program() {
    ProgPtr p = sequence();
    if (peek().kind != Token::Kind::End) fail("expected ';' or end of program");
    return p;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at_sym(const char* s) const { return peek().kind == Token::Kind::Sym && peek().text == s; }
  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    throw SyntaxError(what + (t.kind == Token::Kind::End ? " at end of input" : ", found '" + t.text + "'"),
                      t.line, t.column);
  }
  void expect(const char* s) {
    if (!at_sym(s)) fail(std::string("expected '") + s + "'");
    ++pos_;
  }
  std::string ident(const char* what) {
    if (peek().kind != Token::Kind::Ident || is_keyword(peek().text)) fail(std::string("expected ") + what);
    return toks_[pos_++].text;
  }
  bool at_keyword(const char* k) const { return peek().kind == Token::Kind::Ident && peek().text == k; }

  ProgPtr sequence() {
    ProgPtr head = statement();
    if (!at_sym(";")) return head;
    ++pos_;
    if (at_sym("}") || peek().kind == Token::Kind::End) return head;  // trailing separator
    return seq(head, sequence());
  }

  ProgPtr statement() {
    if (at_keyword("skip")) {
      ++pos_;
      return skip();
    }
    if (at_keyword("while")) {
      ++pos_;
      expect("(");
      ExprPtr g = expr();
      expect(")");
      expect("{");
      ProgPtr body = sequence();
      expect("}");
      return loop(g, body);
    }
    if (at_keyword("upd")) {
      ++pos_;
      expect("(");
      Operation op;
      op.name = ident("operation name");
      while (peek().kind == Token::Kind::Int) op.args.push_back(std::stoll(toks_[pos_++].text));
      expect(")");
      return upd(op);
    }
    if (peek().kind == Token::Kind::Ident && !is_keyword(peek().text)) {
      std::string x = ident("variable");
      expect(":=");
      if (at_keyword("qry")) {
        ++pos_;
        expect("(");
        std::string q = ident("query name");
        expect(")");
        return qry(x, q);
      }
      return assign(x, expr());
    }
    fail("expected a statement");
  }

  ExprPtr expr() {
    ExprPtr a = additive();
    while (at_sym("=") || at_sym("<")) {
      const auto k = peek().text == "=" ? Expr::Kind::Eq : Expr::Kind::Lt;
      ++pos_;
      a = binary(k, a, additive());
    }
    return a;
  }

  ExprPtr additive() {
    ExprPtr a = multiplicative();
    while (at_sym("+") || at_sym("-")) {
      const auto k = peek().text == "+" ? Expr::Kind::Add : Expr::Kind::Sub;
      ++pos_;
      a = binary(k, a, multiplicative());
    }
    return a;
  }

  ExprPtr multiplicative() {
    ExprPtr a = atom();
    while (at_sym("*")) {
      ++pos_;
      a = binary(Expr::Kind::Mul, a, atom());
    }
    return a;
  }

  ExprPtr atom() {
    if (peek().kind == Token::Kind::Int) return lit(std::stoll(toks_[pos_++].text));
    if (at_sym("(")) {
      ++pos_;
      ExprPtr e = expr();
      expect(")");
      return e;
    }
    return var(ident("expression"));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Eq:
    case Expr::Kind::Lt:
      return 1;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 2;
    case Expr::Kind::Mul:
      return 3;
    default:
      return 4;
  }
}

const char* symbol(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Add:
      return "+";
    case Expr::Kind::Sub:
      return "-";
    case Expr::Kind::Mul:
      return "*";
    case Expr::Kind::Eq:
      return "=";
    case Expr::Kind::Lt:
      return "<";
    default:
      return "?";
  }
}

}  // namespace

ProgPtr parse_program(const std::string& text) { return Parser(lex(text)).program(); }

std::string print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Lit:
      return std::to_string(e.value);
    case Expr::Kind::Var:
      return e.name;
    default:
      break;
  }
  // Operators are left-associative: a right operand of equal precedence needs parentheses.
  const int p = precedence(e.kind);
  std::string l = print(*e.lhs), r = print(*e.rhs);
  if (precedence(e.lhs->kind) < p) l = "(" + l + ")";
  if (precedence(e.rhs->kind) <= p) r = "(" + r + ")";
  return l + " " + symbol(e.kind) + " " + r;
}

std::string print(const Prog& p) {
  switch (p.kind) {
    case Prog::Kind::Skip:
      return "skip";
    case Prog::Kind::Asn:
      return p.var + " := " + print(*p.expr);
    case Prog::Kind::While:
      return "while (" + print(*p.expr) + ") { " + print(*p.first) + " }";
    case Prog::Kind::Seq:
      return print(*p.first) + "; " + print(*p.second);
    case Prog::Kind::Upd:
      return "upd(" + p.op.to_string() + ")";
    case Prog::Kind::Qry:
      return p.var + " := qry(" + p.query + ")";
  }
  return "";
}

bool same_program(const ProgPtr& a, const ProgPtr& b) { return print(*a) == print(*b); }

int depth(const Prog& p) {
  switch (p.kind) {
    case Prog::Kind::While:
      return 1 + depth(*p.first);
    case Prog::Kind::Seq:
      return 1 + std::max(depth(*p.first), depth(*p.second));
    default:
      return 1;
  }
}

std::int64_t eval_expr(const Expr& e, const Store& s) {
  switch (e.kind) {
    case Expr::Kind::Lit:
      return e.value;
    case Expr::Kind::Var: {
      auto it = s.find(e.name);
      return it == s.end() ? 0 : it->second;
    }
    case Expr::Kind::Add:
      return eval_expr(*e.lhs, s) + eval_expr(*e.rhs, s);
    case Expr::Kind::Sub:
      return std::max<std::int64_t>(0, eval_expr(*e.lhs, s) - eval_expr(*e.rhs, s));
    case Expr::Kind::Mul:
      return eval_expr(*e.lhs, s) * eval_expr(*e.rhs, s);
    case Expr::Kind::Eq:
      return eval_expr(*e.lhs, s) == eval_expr(*e.rhs, s) ? 1 : 0;
    case Expr::Kind::Lt:
      return eval_expr(*e.lhs, s) < eval_expr(*e.rhs, s) ? 1 : 0;
  }
  return 0;
}

std::string store_to_string(const Store& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : s) {
    if (v == 0) continue;  // absent and 0 are the same binding
    if (!first) out += ", ";
    first = false;
    out += k + ": " + std::to_string(v);
  }
  return out + "}";
}

bool terminal(const Prog& p, const Store& s) {
  switch (p.kind) {
    case Prog::Kind::Skip:
      return true;
    case Prog::Kind::While:
      return eval_expr(*p.expr, s) == 0;
    case Prog::Kind::Seq:
      return terminal(*p.first, s) && terminal(*p.second, s);
    default:
      return false;
  }
}

namespace detail {

std::vector<Redex> redexes(const ProgPtr& p, const Store& s) {
  std::vector<Redex> out;
  switch (p->kind) {
    case Prog::Kind::Skip:
      break;
    case Prog::Kind::Asn: {
      Redex r{Redex::Kind::Pure, skip(), s, "Asn", nullptr};
      r.store[p->var] = eval_expr(*p->expr, s);
      out.push_back(std::move(r));
      break;
    }
    case Prog::Kind::While:
      if (eval_expr(*p->expr, s) != 0) out.push_back({Redex::Kind::Pure, seq(p->first, p), s, "WStep", nullptr});
      break;
    case Prog::Kind::Upd:
      out.push_back({Redex::Kind::Upd, skip(), {}, "Upd", p.get()});
      break;
    case Prog::Kind::Qry:
      out.push_back({Redex::Kind::Qry, skip(), {}, "Qry", p.get()});
      break;
    case Prog::Kind::Seq:
      if (terminal(*p->first, s)) return redexes(p->second, s);
      for (auto& r : redexes(p->first, s)) {
        r.rest = r.rest == skip() ? p->second : seq(r.rest, p->second);
        out.push_back(std::move(r));
      }
      break;
  }
  return out;
}

}  // namespace detail

std::string records_to_string(const std::vector<Record>& rs, const Roster& roster) {
  if (rs.empty()) return "[]";
  std::string out = "[";
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i) out += ", ";
    out += rs[i].rule;
    if (rs[i].env_event) out += " " + to_string(*rs[i].env_event, roster);
    if (!rs[i].detail.empty()) out += " " + rs[i].detail;
  }
  return out + "]";
}

namespace {

class Generator {
 public:
  Generator(const Universe& u, std::uint32_t seed) : u_(u), rng_(seed) {}

  ProgPtr program(int d) {
    if (d <= 1 || pick(4) == 0) return atom();
    switch (pick(3)) {
      case 0:
        return seq(program(d - 1), program(d - 1));
      case 1:
        return guarded_loop(d);
      default:
        return seq(atom(), program(d - 1));
    }
  }

 private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::string variable() { return pick(2) ? "x" : "y"; }

  ExprPtr small_expr() {
    switch (pick(4)) {
      case 0:
        return lit(static_cast<std::int64_t>(pick(4)));
      case 1:
        return binary(Expr::Kind::Add, var(variable()), lit(1));
      case 2:
        return binary(Expr::Kind::Sub, var(variable()), lit(static_cast<std::int64_t>(pick(3))));
      default:
        return binary(Expr::Kind::Mul, var(variable()), lit(2));
    }
  }

  ProgPtr atom() {
    switch (pick(6)) {
      case 0:
        return skip();
      case 1:
      case 2:
        return upd(u_.ops[pick(u_.ops.size())]);
      case 3:
      case 4:
        return qry(variable(), u_.queries[pick(u_.queries.size())]);
      default:
        return assign(variable(), small_expr());
    }
  }

  // Loops that exit once a query reaches a threshold, optionally issuing an update first.
  ProgPtr guarded_loop(int d) {
    const std::string x = variable();
    const Query q = u_.queries[pick(u_.queries.size())];
    ExprPtr guard = pick(5) == 0 ? lit(0) : binary(Expr::Kind::Lt, var(x), lit(static_cast<std::int64_t>(1 + pick(3))));
    ProgPtr refresh = qry(x, q);
    ProgPtr body = d >= 3 && pick(2) ? seq(upd(u_.ops[pick(u_.ops.size())]), refresh) : refresh;
    return loop(guard, body);
  }

  const Universe& u_;
  std::mt19937 rng_;
};

}  // namespace

std::vector<ProgPtr> generate_corpus(const Universe& u, std::size_t count, int max_depth, std::uint32_t seed) {
  if (u.ops.empty() || u.queries.empty()) throw std::invalid_argument("corpus needs operations and queries");
  Generator g(u, seed);
  std::vector<ProgPtr> out;
  std::unordered_set<std::string> seen;
  for (std::size_t attempts = 0; out.size() < count && attempts < count * 100; ++attempts) {
    ProgPtr p = g.program(max_depth);
    if (depth(*p) > max_depth || !seen.insert(print(*p)).second) continue;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace crdt::client
