//
// Tokenizer shared by the DDL and query parsers.
//

#ifndef PAC_LEXER_HPP
#define PAC_LEXER_HPP

#include <string>
#include <string_view>
#include <vector>

namespace pac {

enum class Tok : uint8_t { Ident, QuotedIdent, Int, Float, String, Symbol, End };

struct Token {
	Tok kind = Tok::End;
	// identifiers are lower-cased, quoted identifiers keep their case
	std::string text;
	long pos = 0;
};

// SyntaxError with position on malformed input
std::vector<Token> Tokenize(std::string_view src);

class TokenStream {
public:
	explicit TokenStream(std::string_view src) : toks_(Tokenize(src)) {
	}
	const Token &Peek(size_t ahead = 0) const {
		size_t i = pos_ + ahead;
		return i < toks_.size() ? toks_[i] : toks_.back();
	}
	const Token &Next() {
		const Token &t = Peek();
		if (pos_ < toks_.size() - 1) {
			pos_++;
		}
		return t;
	}
	bool AtEnd() const {
		return Peek().kind == Tok::End;
	}
	// keyword match on plain identifiers
	bool IsKw(std::string_view kw, size_t ahead = 0) const {
		auto &t = Peek(ahead);
		return t.kind == Tok::Ident && t.text == kw;
	}
	bool IsSym(std::string_view s, size_t ahead = 0) const {
		auto &t = Peek(ahead);
		return t.kind == Tok::Symbol && t.text == s;
	}
	bool AcceptKw(std::string_view kw) {
		if (IsKw(kw)) {
			Next();
			return true;
		}
		return false;
	}
	bool AcceptSym(std::string_view s) {
		if (IsSym(s)) {
			Next();
			return true;
		}
		return false;
	}
	void ExpectKw(std::string_view kw);
	void ExpectSym(std::string_view s);
	std::string ExpectIdent(const char *what);
	[[noreturn]] void Fail(const std::string &msg) const;
	size_t mark() const {
		return pos_;
	}
	void reset(size_t m) {
		pos_ = m;
	}

private:
	std::vector<Token> toks_;
	size_t pos_ = 0;
};

} // namespace pac

#endif // PAC_LEXER_HPP
