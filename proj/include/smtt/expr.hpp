#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace smtt {

// Inputs visible to a priority expression when scoring one unscheduled job.
struct JobFeatures {
  double p = 0;          // the job's processing time
  double d = 0;          // the job's due date
  double t = 0;          // total processing time already scheduled
  double max_p = 0;      // max processing time over unscheduled jobs
  double sum_p = 0;      // sum of processing times over unscheduled jobs
  double mean_p = 0;     // sum_p / remaining
  double remaining = 0;  // number of unscheduled jobs
};

enum class Term : std::uint8_t { P, D, T, MaxP, SumP, MeanP, Remaining };

enum class ExprKind : std::uint8_t {
  Const, Terminal, Add, Sub, Mul, Div, Max, Min, Square
};

struct ExprNode {
  ExprKind kind;
  Term term = Term::P;   // Terminal only
  double value = 0;      // Const only
  int lhs = -1, rhs = -1;  // children; rhs unused for Square

  bool operator==(const ExprNode&) const = default;
};

struct ExprParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every result (including intermediates) is clamped into
// [-kExprClamp, kExprClamp]; NaN becomes +kExprClamp.
inline constexpr double kExprClamp = 1e12;
// Division by exactly zero yields this sentinel instead of faulting.
inline constexpr double kDivSentinel = 1e12;

// An immutable priority-rule expression. Nodes are stored in evaluation
// order (children strictly before parents), so eval is a single pass.
// The text grammar is documented in docs/dsl_grammar.ebnf.
class PriorityExpr {
public:
  static PriorityExpr constant(double v);
  static PriorityExpr terminal(Term t);
  static PriorityExpr binary(ExprKind op, const PriorityExpr& a, const PriorityExpr& b);
  static PriorityExpr square(const PriorityExpr& a);

  // Parses infix text like "max(P * 1.1 + T, D)". Throws ExprParseError.
  static PriorityExpr parse(const std::string& text);

  // Total: never throws, never returns NaN/inf.
  double eval(const JobFeatures&) const;

  // Infix rendering with minimal parentheses; parse(str()) round-trips.
  std::string str() const;

  int depth() const;  // a lone leaf has depth 1
  std::size_t size() const { return nodes_.size(); }
  const std::vector<ExprNode>& nodes() const { return nodes_; }
  int root() const { return root_; }

  bool operator==(const PriorityExpr&) const = default;

private:
  std::vector<ExprNode> nodes_;
  int root_ = -1;
};

const std::string& term_name(Term);

}  // namespace smtt
