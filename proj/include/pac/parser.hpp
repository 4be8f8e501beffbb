//
// SQL subset parser producing logical plans.
//

#ifndef PAC_PARSER_HPP
#define PAC_PARSER_HPP

#include "pac/plan.hpp"

#include <string_view>

namespace pac {

// SyntaxError (with offset) or UnsupportedSyntax
PlanPtr ParseQuery(std::string_view sql);

} // namespace pac

#endif // PAC_PARSER_HPP
