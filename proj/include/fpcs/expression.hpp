#pragma once
// Small arithmetic-expression compiler for user-defined objectives and
// constraints. Grammar: + - * / ^ (right-associative), unary minus,
// parentheses, functions sin cos sqrt exp abs, constants pi e, and
// variables x1..x9. Expressions compile to a postfix program.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpcs/error.hpp"

namespace fpcs {

class ExpressionError : public ParameterError {
 public:
  ExpressionError(const std::string& source, std::size_t position, const std::string& message)
      : ParameterError("expression '" + source + "' at column " + std::to_string(position + 1) + ": " + message) {}
};

class Expression {
 public:
  static constexpr int kMaxStack = 64;

  Expression() = default;

  static Expression parse(std::string_view source, int dimension) {
    if (dimension < 1 || dimension > 9) throw ParameterError("expression dimension must lie in [1, 9]");
    Parser parser{source, dimension};
    Expression expr;
    expr.source_ = std::string(source);
    expr.dimension_ = dimension;
    parser.parse_expression(expr.program_);
    parser.skip_space();
    if (!parser.at_end()) throw ExpressionError(expr.source_, parser.pos, "unexpected trailing input");
    expr.check_stack();
    return expr;
  }

  double operator()(std::span<const double> x) const {
    std::array<double, kMaxStack> stack;
    int top = 0;
    for (const Instruction& ins : program_) {
      switch (ins.op) {
        case Op::constant: stack[top++] = ins.value; break;
        case Op::variable: stack[top++] = x[ins.index]; break;
        case Op::negate: stack[top - 1] = -stack[top - 1]; break;
        case Op::add: --top; stack[top - 1] += stack[top]; break;
        case Op::subtract: --top; stack[top - 1] -= stack[top]; break;
        case Op::multiply: --top; stack[top - 1] *= stack[top]; break;
        case Op::divide: --top; stack[top - 1] /= stack[top]; break;
        case Op::power: --top; stack[top - 1] = std::pow(stack[top - 1], stack[top]); break;
        case Op::sin: stack[top - 1] = std::sin(stack[top - 1]); break;
        case Op::cos: stack[top - 1] = std::cos(stack[top - 1]); break;
        case Op::sqrt: stack[top - 1] = std::sqrt(stack[top - 1]); break;
        case Op::exp: stack[top - 1] = std::exp(stack[top - 1]); break;
        case Op::abs: stack[top - 1] = std::abs(stack[top - 1]); break;
      }
    }
    return stack[0];
  }

  const std::string& source() const { return source_; }
  int dimension() const { return dimension_; }

 private:
  enum class Op { constant, variable, negate, add, subtract, multiply, divide, power, sin, cos, sqrt, exp, abs };

  struct Instruction {
    Op op;
    double value = 0.0;
    int index = 0;
  };

  struct Parser {
    std::string_view src;
    int dimension;
    std::size_t pos = 0;

    bool at_end() const { return pos >= src.size(); }

    void skip_space() {
      while (!at_end() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    bool accept(char c) {
      skip_space();
      if (!at_end() && src[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    [[noreturn]] void fail(const std::string& message) const { throw ExpressionError(std::string(src), pos, message); }

    void parse_expression(std::vector<Instruction>& out) {
      parse_term(out);
      for (;;) {
        if (accept('+')) {
          parse_term(out);
          out.push_back({Op::add});
        } else if (accept('-')) {
          parse_term(out);
          out.push_back({Op::subtract});
        } else {
          return;
        }
      }
    }

    void parse_term(std::vector<Instruction>& out) {
      parse_unary(out);
      for (;;) {
        if (accept('*')) {
          parse_unary(out);
          out.push_back({Op::multiply});
        } else if (accept('/')) {
          parse_unary(out);
          out.push_back({Op::divide});
        } else {
          return;
        }
      }
    }

    void parse_unary(std::vector<Instruction>& out) {
      if (accept('-')) {
        parse_unary(out);
        out.push_back({Op::negate});
        return;
      }
      if (accept('+')) {
        parse_unary(out);
        return;
      }
      parse_power(out);
    }

    // -x^2 parses as -(x^2); 2^3^2 as 2^(3^2).
    void parse_power(std::vector<Instruction>& out) {
      parse_primary(out);
      if (accept('^')) {
        parse_unary(out);
        out.push_back({Op::power});
      }
    }

    void parse_primary(std::vector<Instruction>& out) {
      skip_space();
      if (at_end()) fail("unexpected end of input");
      const char c = src[pos];
      if (c == '(') {
        ++pos;
        parse_expression(out);
        if (!accept(')')) fail("expected ')'");
        return;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        parse_number(out);
        return;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        parse_identifier(out);
        return;
      }
      fail(std::string("unexpected character '") + c + "'");
    }

    void parse_number(std::vector<Instruction>& out) {
      const std::string rest(src.substr(pos));
      char* end = nullptr;
      const double value = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("malformed number");
      pos += static_cast<std::size_t>(end - rest.c_str());
      out.push_back({Op::constant, value});
    }

    void parse_identifier(std::vector<Instruction>& out) {
      const std::size_t start = pos;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) ++pos;
      const std::string_view name = src.substr(start, pos - start);

      if (name == "pi") {
        out.push_back({Op::constant, std::numbers::pi});
        return;
      }
      if (name == "e") {
        out.push_back({Op::constant, std::numbers::e});
        return;
      }
      if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9') {
        const int index = name[1] - '1';
        if (index >= dimension) {
          pos = start;
          fail("variable " + std::string(name) + " exceeds dimension " + std::to_string(dimension));
        }
        out.push_back({Op::variable, 0.0, index});
        return;
      }

      Op fn;
      if (name == "sin") fn = Op::sin;
      else if (name == "cos") fn = Op::cos;
      else if (name == "sqrt") fn = Op::sqrt;
      else if (name == "exp") fn = Op::exp;
      else if (name == "abs") fn = Op::abs;
      else {
        pos = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      if (!accept('(')) fail("expected '(' after function name");
      parse_expression(out);
      if (!accept(')')) fail("expected ')'");
      out.push_back({fn});
    }
  };

  void check_stack() const {
    int depth = 0, peak = 0;
    for (const Instruction& ins : program_) {
      switch (ins.op) {
        case Op::constant:
        case Op::variable: ++depth; break;
        case Op::add:
        case Op::subtract:
        case Op::multiply:
        case Op::divide:
        case Op::power: --depth; break;
        default: break;
      }
      peak = std::max(peak, depth);
    }
    if (peak > kMaxStack) throw ExpressionError(source_, 0, "expression nests too deeply");
  }

  std::string source_;
  int dimension_ = 0;
  std::vector<Instruction> program_;
};

}  // namespace fpcs
