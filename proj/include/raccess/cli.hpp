#pragma once

// System definition files and the command-line front end.
//
//   system coil
//   params T a b
//   states x1 x2
//   inputs u
//   x1' = x1 + T*x2
//   x2' = x2 + T*(a*x1*u - b*x2)
//
// A `numeric` line allows sin, cos, tan, exp, log, sqrt and pi; such
// systems only support the oracle commands unless every update is rational.

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "raccess/expr.hpp"
#include "raccess/oracle.hpp"
#include "raccess/system.hpp"

namespace raccess {

struct SystemSpec {
    std::string name;
    std::vector<std::string> params, states, inputs;
    bool numeric = false;
    RegistryPtr registry;          // horizon 1
    std::vector<ExprPtr> updates;  // updates[i] is the update of states[i]
};

/// Throws ParseError with the line and column of the first problem.
SystemSpec parse_system(std::string_view text);

std::string print_expression(const Expr& e);
/// Canonical text; parse_system(print_system(s)) describes the same model.
std::string print_system(const SystemSpec& spec);

bool is_rational(const SystemSpec& spec);
/// Exact model; throws ParseError when some update is transcendental.
SystemModel to_model(const SystemSpec& spec);
NumericMap to_numeric_map(const SystemSpec& spec, const std::map<std::string, double>& params = {});

/// Exact rational from "3", "-1/4" or "0.125"; std::invalid_argument otherwise.
Rational parse_exact(std::string_view text);

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Runs one command. args exclude the program name. Exit codes: 0 success,
/// 1 usage or I/O error, 2 parse error, 3 resource budget, 4 pole or degeneracy.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace raccess
