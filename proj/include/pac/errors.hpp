//
// Error taxonomy shared by every module. Rejections are values (see catalog.hpp),
// everything else surfaces as a PacError with a code.
//

#ifndef PAC_ERRORS_HPP
#define PAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pac {

enum class ErrorCode {
	SyntaxError,
	UnsupportedSyntax,
	UnknownColumn,
	UnknownTable,
	TypeMismatch,
	DuplicatePU,
	CyclicLink,
	ArityMismatch,
	DiamondLink,
	NullKey,
	SuspiciousGroup,
	KeyCollision,
	OracleRefused,
	DataError,
	IoError,
	Internal,
};

const char *ErrorCodeName(ErrorCode code);

class PacError : public std::runtime_error {
public:
	PacError(ErrorCode code, const std::string &msg, long position = -1)
	    : std::runtime_error(msg), code_(code), position_(position) {
	}
	ErrorCode code() const {
		return code_;
	}
	// byte offset into the source text, -1 when not applicable
	long position() const {
		return position_;
	}

private:
	ErrorCode code_;
	long position_;
};

} // namespace pac

#endif // PAC_ERRORS_HPP
