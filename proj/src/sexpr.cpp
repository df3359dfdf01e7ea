#include "gpae/sexpr.hpp"

#include <charconv>
#include <system_error>

namespace gpae {

namespace {

const char* op_name(NodeKind k) {
  switch (k) {
    case NodeKind::kAdd:
      return "add";
    case NodeKind::kSub:
      return "sub";
    case NodeKind::kMul:
      return "mul";
    case NodeKind::kDiv:
      return "div";
    case NodeKind::kSin:
      return "sin";
    default:
      return "cos";
  }
}

struct Token {
  enum Kind { kLParen, kRParen, kAtom, kEnd } kind = kEnd;
  std::string_view text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= text_.size()) return t;
    const char c = text_[pos_];
    if (c == '(') {
      t.kind = Token::kLParen;
      t.text = text_.substr(pos_, 1);
      advance(1);
      return t;
    }
    if (c == ')') {
      t.kind = Token::kRParen;
      t.text = text_.substr(pos_, 1);
      advance(1);
      return t;
    }
    std::size_t end = pos_;
    while (end < text_.size() && !is_ws(text_[end]) && text_[end] != '(' &&
           text_[end] != ')')
      ++end;
    t.kind = Token::kAtom;
    t.text = text_.substr(pos_, end - pos_);
    advance(end - pos_);
    return t;
  }

 private:
  static bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  }
  void skip_ws() {
    while (pos_ < text_.size() && is_ws(text_[pos_])) advance(1);
  }
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, const Scope& visible)
      : lexer_(text), visible_(visible) {}

  std::vector<TreeNode> parse() {
    std::vector<TreeNode> nodes;
    Token t = lexer_.next();
    parse_expr(t, nodes);
    const Token end = lexer_.next();
    if (end.kind != Token::kEnd)
      fail(end, "trailing content after expression");
    return nodes;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& what) {
    std::string tok = t.kind == Token::kEnd ? "<end of input>"
                                            : "'" + std::string(t.text) + "'";
    throw ParseError(t.line, t.col, what + " at " + tok);
  }

  void parse_expr(const Token& t, std::vector<TreeNode>& nodes) {
    switch (t.kind) {
      case Token::kLParen:
        parse_application(nodes);
        return;
      case Token::kAtom:
        parse_atom(t, nodes);
        return;
      case Token::kRParen:
        fail(t, "unexpected ')'");
      case Token::kEnd:
        fail(t, "expected expression");
    }
  }

  void parse_application(std::vector<TreeNode>& nodes) {
    const Token head = lexer_.next();
    if (head.kind != Token::kAtom) fail(head, "expected operator name");
    NodeKind op;
    if (head.text == "add")
      op = NodeKind::kAdd;
    else if (head.text == "sub")
      op = NodeKind::kSub;
    else if (head.text == "mul")
      op = NodeKind::kMul;
    else if (head.text == "div")
      op = NodeKind::kDiv;
    else if (head.text == "sin")
      op = NodeKind::kSin;
    else if (head.text == "cos")
      op = NodeKind::kCos;
    else
      fail(head, "unknown operator");

    for (int i = 0; i < arity(op); ++i) {
      Token t = lexer_.next();
      if (t.kind == Token::kRParen || t.kind == Token::kEnd)
        fail(t, "operator '" + std::string(head.text) + "' expects " +
                    std::to_string(arity(op)) + " operands");
      parse_expr(t, nodes);
    }
    const Token close = lexer_.next();
    if (close.kind != Token::kRParen) fail(close, "expected ')'");
    nodes.push_back(TreeNode::op(op));
  }

  void parse_atom(const Token& t, std::vector<TreeNode>& nodes) {
    const std::string_view s = t.text;
    if (s.size() >= 2 && s[0] == 'x' && s[1] >= '0' && s[1] <= '9') {
      std::int32_t idx = 0;
      const auto res = std::from_chars(s.data() + 1, s.data() + s.size(), idx);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        fail(t, "malformed feature reference");
      if (idx < 0 || idx >= static_cast<std::int32_t>(visible_->size()))
        fail(t, "feature index out of range (scope has " +
                    std::to_string(visible_->size()) + " features)");
      nodes.push_back(TreeNode::feature_ref(idx));
      return;
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      fail(t, "expected constant or feature");
    nodes.push_back(TreeNode::constant(v));
  }

  Lexer lexer_;
  const Scope& visible_;
};

void write_node(const std::vector<TreeNode>& nodes, std::size_t root,
                std::string& out) {
  // nodes is postorder; walk subtree extents backwards from `root`.
  const TreeNode& n = nodes[root];
  switch (n.kind) {
    case NodeKind::kConstant:
      out += format_shortest(n.value);
      return;
    case NodeKind::kFeature:
      out += 'x';
      out += std::to_string(n.feature);
      return;
    default:
      break;
  }
  // Locate children extents: scan backwards counting pending operands.
  std::vector<std::size_t> child_roots;
  std::size_t i = root;
  for (int need = arity(n.kind); need > 0; --need) {
    --i;
    child_roots.push_back(i);
    // skip over the subtree rooted at i
    int pending = arity(nodes[i].kind);
    while (pending > 0) {
      --i;
      pending += arity(nodes[i].kind) - 1;
    }
  }
  out += '(';
  out += op_name(n.kind);
  for (auto it = child_roots.rbegin(); it != child_roots.rend(); ++it) {
    out += ' ';
    write_node(nodes, *it, out);
  }
  out += ')';
}

}  // namespace

ParseError::ParseError(int line, int col, const std::string& message)
    : FormatError("parse error at " + std::to_string(line) + ":" +
                  std::to_string(col) + ": " + message),
      line_(line),
      col_(col) {}

std::string serialize_tree(const ExprTree& tree) {
  std::string out;
  write_node(tree.nodes(), tree.nodes().size() - 1, out);
  return out;
}

ExprTree parse_tree(std::string_view text, Scope visible) {
  if (!visible) throw std::invalid_argument("parse_tree: null scope");
  Parser p(text, visible);
  std::vector<TreeNode> nodes = p.parse();  // before visible is moved from
  return ExprTree(std::move(nodes), std::move(visible));
}

}  // namespace gpae
