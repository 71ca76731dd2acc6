#include "smtt/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace smtt {

const std::string& term_name(Term t) {
  static const std::vector<std::string> names = {"P",     "D",     "T",
                                                 "MAXP",  "SUMP",  "MEANP",
                                                 "REMAINING"};
  return names[static_cast<int>(t)];
}

PriorityExpr PriorityExpr::constant(double v) {
  PriorityExpr e;
  e.nodes_.push_back({ExprKind::Const, Term::P, v, -1, -1});
  e.root_ = 0;
  return e;
}

PriorityExpr PriorityExpr::terminal(Term t) {
  PriorityExpr e;
  e.nodes_.push_back({ExprKind::Terminal, t, 0, -1, -1});
  e.root_ = 0;
  return e;
}

namespace {
// Appends other's nodes, returning the shifted index of other's root.
int splice(std::vector<ExprNode>& into, const PriorityExpr& other) {
  const int offset = static_cast<int>(into.size());
  for (ExprNode node : other.nodes()) {
    if (node.lhs >= 0) node.lhs += offset;
    if (node.rhs >= 0) node.rhs += offset;
    into.push_back(node);
  }
  return other.root() + offset;
}
}  // namespace

PriorityExpr PriorityExpr::binary(ExprKind op, const PriorityExpr& a,
                                  const PriorityExpr& b) {
  PriorityExpr e;
  const int la = splice(e.nodes_, a);
  const int rb = splice(e.nodes_, b);
  e.nodes_.push_back({op, Term::P, 0, la, rb});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

PriorityExpr PriorityExpr::square(const PriorityExpr& a) {
  PriorityExpr e;
  const int la = splice(e.nodes_, a);
  e.nodes_.push_back({ExprKind::Square, Term::P, 0, la, -1});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

namespace {
double clamp_value(double v) {
  if (std::isnan(v)) return kExprClamp;
  if (v > kExprClamp) return kExprClamp;
  if (v < -kExprClamp) return -kExprClamp;
  return v;
}
}  // namespace

double PriorityExpr::eval(const JobFeatures& f) const {
  std::vector<double> vals(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& nd = nodes_[i];
    double v = 0;
    switch (nd.kind) {
      case ExprKind::Const: v = nd.value; break;
      case ExprKind::Terminal:
        switch (nd.term) {
          case Term::P: v = f.p; break;
          case Term::D: v = f.d; break;
          case Term::T: v = f.t; break;
          case Term::MaxP: v = f.max_p; break;
          case Term::SumP: v = f.sum_p; break;
          case Term::MeanP: v = f.mean_p; break;
          case Term::Remaining: v = f.remaining; break;
        }
        break;
      case ExprKind::Add: v = vals[nd.lhs] + vals[nd.rhs]; break;
      case ExprKind::Sub: v = vals[nd.lhs] - vals[nd.rhs]; break;
      case ExprKind::Mul: v = vals[nd.lhs] * vals[nd.rhs]; break;
      case ExprKind::Div:
        v = vals[nd.rhs] == 0.0 ? kDivSentinel : vals[nd.lhs] / vals[nd.rhs];
        break;
      case ExprKind::Max: v = std::max(vals[nd.lhs], vals[nd.rhs]); break;
      case ExprKind::Min: v = std::min(vals[nd.lhs], vals[nd.rhs]); break;
      case ExprKind::Square: v = vals[nd.lhs] * vals[nd.lhs]; break;
    }
    vals[i] = clamp_value(v);
  }
  return vals[root_];
}

int PriorityExpr::depth() const {
  std::vector<int> d(nodes_.size(), 1);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& nd = nodes_[i];
    int child = 0;
    if (nd.lhs >= 0) child = d[nd.lhs];
    if (nd.rhs >= 0) child = std::max(child, d[nd.rhs]);
    if (nd.lhs >= 0) d[i] = child + 1;
  }
  return d[root_];
}

// ---- rendering ----

namespace {

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    default: return 3;  // leaves and calls never need parentheses
  }
}

std::string render_const(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
  return std::string(buf, res.ptr);
}

void render(const std::vector<ExprNode>& nodes, int idx, std::string& out) {
  const ExprNode& nd = nodes[idx];
  auto child = [&](int cidx, bool needs_parens) {
    if (needs_parens) out += '(';
    render(nodes, cidx, out);
    if (needs_parens) out += ')';
  };
  switch (nd.kind) {
    case ExprKind::Const:
      out += render_const(nd.value);
      break;
    case ExprKind::Terminal:
      out += term_name(nd.term);
      break;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div: {
      const int prec = precedence(nd.kind);
      const char* sym = nd.kind == ExprKind::Add   ? " + "
                        : nd.kind == ExprKind::Sub ? " - "
                        : nd.kind == ExprKind::Mul ? " * "
                                                   : " / ";
      child(nd.lhs, precedence(nodes[nd.lhs].kind) < prec);
      out += sym;
      // Same-precedence right children need parentheses under - and /.
      const int rprec = precedence(nodes[nd.rhs].kind);
      const bool strict = nd.kind == ExprKind::Sub || nd.kind == ExprKind::Div;
      child(nd.rhs, rprec < prec || (strict && rprec == prec));
      break;
    }
    case ExprKind::Max:
    case ExprKind::Min:
      out += nd.kind == ExprKind::Max ? "max(" : "min(";
      render(nodes, nd.lhs, out);
      out += ", ";
      render(nodes, nd.rhs, out);
      out += ')';
      break;
    case ExprKind::Square:
      out += "square(";
      render(nodes, nd.lhs, out);
      out += ')';
      break;
  }
}

}  // namespace

std::string PriorityExpr::str() const {
  std::string out;
  render(nodes_, root_, out);
  return out;
}

// ---- parsing ----

namespace {

struct Token {
  enum Kind { Number, Ident, Plus, Minus, Star, Slash, LParen, RParen, Comma, End };
  Kind kind;
  double number = 0;
  std::string ident;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < text.size() &&
         std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      double value;
      auto res = std::from_chars(text.data() + i, text.data() + text.size(), value);
      if (res.ec != std::errc{})
        throw ExprParseError("bad number at offset " + std::to_string(i));
      out.push_back({Token::Number, value, {}});
      i = res.ptr - text.data();
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < text.size() &&
             std::isalnum(static_cast<unsigned char>(text[i])))
        ++i;
      out.push_back({Token::Ident, 0, text.substr(start, i - start)});
      continue;
    }
    switch (c) {
      case '+': out.push_back({Token::Plus, 0, {}}); break;
      case '-': out.push_back({Token::Minus, 0, {}}); break;
      case '*': out.push_back({Token::Star, 0, {}}); break;
      case '/': out.push_back({Token::Slash, 0, {}}); break;
      case '(': out.push_back({Token::LParen, 0, {}}); break;
      case ')': out.push_back({Token::RParen, 0, {}}); break;
      case ',': out.push_back({Token::Comma, 0, {}}); break;
      default:
        throw ExprParseError(std::string("unexpected character '") + c + "'");
    }
    ++i;
  }
  out.push_back({Token::End, 0, {}});
  return out;
}

class Parser {
public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  PriorityExpr run() {
    PriorityExpr e = expr();
    expect(Token::End, "trailing input after expression");
    return e;
  }

private:
  const Token& peek() const { return tokens_[pos_]; }
  Token take() { return tokens_[pos_++]; }
  void expect(Token::Kind k, const char* what) {
    if (take().kind != k) throw ExprParseError(what);
  }

  PriorityExpr expr() {
    PriorityExpr lhs = product();
    while (peek().kind == Token::Plus || peek().kind == Token::Minus) {
      const bool plus = take().kind == Token::Plus;
      lhs = PriorityExpr::binary(plus ? ExprKind::Add : ExprKind::Sub, lhs, product());
    }
    return lhs;
  }

  PriorityExpr product() {
    PriorityExpr lhs = unary();
    while (peek().kind == Token::Star || peek().kind == Token::Slash) {
      const bool mul = take().kind == Token::Star;
      lhs = PriorityExpr::binary(mul ? ExprKind::Mul : ExprKind::Div, lhs, unary());
    }
    return lhs;
  }

  PriorityExpr unary() {
    if (peek().kind == Token::Minus) {
      take();
      PriorityExpr inner = unary();
      if (inner.size() == 1 && inner.nodes()[0].kind == ExprKind::Const)
        return PriorityExpr::constant(-inner.nodes()[0].value);
      return PriorityExpr::binary(ExprKind::Sub, PriorityExpr::constant(0), inner);
    }
    return atom();
  }

  PriorityExpr atom() {
    Token tok = take();
    switch (tok.kind) {
      case Token::Number:
        return PriorityExpr::constant(tok.number);
      case Token::LParen: {
        PriorityExpr inner = expr();
        expect(Token::RParen, "expected ')'");
        return inner;
      }
      case Token::Ident: {
        if (tok.ident == "max" || tok.ident == "min") {
          expect(Token::LParen, "expected '(' after function name");
          PriorityExpr a = expr();
          expect(Token::Comma, "expected ',' between function arguments");
          PriorityExpr b = expr();
          expect(Token::RParen, "expected ')'");
          return PriorityExpr::binary(
              tok.ident == "max" ? ExprKind::Max : ExprKind::Min, a, b);
        }
        if (tok.ident == "square") {
          expect(Token::LParen, "expected '(' after function name");
          PriorityExpr a = expr();
          expect(Token::RParen, "expected ')'");
          return PriorityExpr::square(a);
        }
        static const std::pair<const char*, Term> terms[] = {
            {"P", Term::P},         {"D", Term::D},
            {"T", Term::T},         {"MAXP", Term::MaxP},
            {"SUMP", Term::SumP},   {"MEANP", Term::MeanP},
            {"REMAINING", Term::Remaining}};
        for (const auto& [name, term] : terms)
          if (tok.ident == name) return PriorityExpr::terminal(term);
        throw ExprParseError("unknown identifier: " + tok.ident);
      }
      default:
        throw ExprParseError("expected a number, name, or '('");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

PriorityExpr PriorityExpr::parse(const std::string& text) {
  return Parser(tokenize(text)).run();
}

}  // namespace smtt
