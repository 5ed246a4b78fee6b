#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dstab/network.hpp"

namespace dstab {

// line and column are 1-based; column 0 means "whole line".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

struct Statement {
  std::size_t line = 0;
  std::vector<std::size_t> reactions;  // one, or two for "<->"
};

struct NetworkFile {
  ReactionNetwork network;
  std::vector<Statement> statements;
  std::map<std::string, double> bindings;
  std::vector<std::string> free_parameters;  // referenced but never bound, sorted
};

// Format, one statement per line, '#' starts a comment:
//
//   species: A, B, C              optional; fixes species order, must come first
//   pairing: explicit             optional; disables automatic pairing of "->"
//   2 S <-> D : k+=k1, k-=k2, tau+=t1, tau-=t2
//   X + 1/2 Y -> 0 : k=0.3 tau=2
//   pair: 3 7                     explicit pairing of reactions 3 and 7 (1-based)
//   k1 = 1.5
//
// Without "pairing: explicit", every "->" reaction is paired with the first
// later unpaired reaction that is its exact reverse.
NetworkFile parse_network_file(std::string_view text);
ReactionNetwork parse_network(std::string_view text);

// parse_network(serialize_network(net)) is structurally equal to net.
std::string serialize_network(const ReactionNetwork& net);

}  // namespace dstab
