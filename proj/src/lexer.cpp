#include "pac/lexer.hpp"

#include "pac/errors.hpp"
#include "pac/value.hpp"

#include <cctype>

namespace pac {

std::vector<Token> Tokenize(std::string_view s) {
	std::vector<Token> out;
	size_t i = 0, n = s.size();
	auto fail = [&](const std::string &msg, size_t at) {
		throw PacError(ErrorCode::SyntaxError, msg + " at offset " + std::to_string(at), long(at));
	};
	while (i < n) {
		char c = s[i];
		if (std::isspace(static_cast<unsigned char>(c))) {
			i++;
			continue;
		}
		if (c == '-' && i + 1 < n && s[i + 1] == '-') {
			while (i < n && s[i] != '\n') {
				i++;
			}
			continue;
		}
		if (c == '/' && i + 1 < n && s[i + 1] == '*') {
			size_t end = s.find("*/", i + 2);
			if (end == std::string_view::npos) {
				fail("unterminated comment", i);
			}
			i = end + 2;
			continue;
		}
		Token t;
		t.pos = long(i);
		if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
			size_t j = i;
			while (j < n && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '#')) {
				j++;
			}
			t.kind = Tok::Ident;
			t.text = Lower(s.substr(i, j - i));
			i = j;
		} else if (std::isdigit(static_cast<unsigned char>(c)) ||
		           (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
			size_t j = i;
			bool is_float = false;
			while (j < n && std::isdigit(static_cast<unsigned char>(s[j]))) {
				j++;
			}
			if (j < n && s[j] == '.') {
				is_float = true;
				j++;
				while (j < n && std::isdigit(static_cast<unsigned char>(s[j]))) {
					j++;
				}
			}
			if (j < n && (s[j] == 'e' || s[j] == 'E')) {
				size_t k = j + 1;
				if (k < n && (s[k] == '+' || s[k] == '-')) {
					k++;
				}
				if (k < n && std::isdigit(static_cast<unsigned char>(s[k]))) {
					is_float = true;
					j = k;
					while (j < n && std::isdigit(static_cast<unsigned char>(s[j]))) {
						j++;
					}
				}
			}
			t.kind = is_float ? Tok::Float : Tok::Int;
			t.text = std::string(s.substr(i, j - i));
			i = j;
		} else if (c == '\'') {
			std::string val;
			size_t j = i + 1;
			while (true) {
				if (j >= n) {
					fail("unterminated string literal", i);
				}
				if (s[j] == '\'') {
					if (j + 1 < n && s[j + 1] == '\'') {
						val += '\'';
						j += 2;
						continue;
					}
					break;
				}
				val += s[j++];
			}
			t.kind = Tok::String;
			t.text = std::move(val);
			i = j + 1;
		} else if (c == '"') {
			size_t end = s.find('"', i + 1);
			if (end == std::string_view::npos) {
				fail("unterminated quoted identifier", i);
			}
			t.kind = Tok::QuotedIdent;
			t.text = std::string(s.substr(i + 1, end - i - 1));
			i = end + 1;
		} else {
			static const char *two[] = {"<=", ">=", "<>", "!=", "||"};
			t.kind = Tok::Symbol;
			bool matched = false;
			for (auto *op : two) {
				if (s.substr(i, 2) == op) {
					t.text = op;
					i += 2;
					matched = true;
					break;
				}
			}
			if (!matched) {
				if (std::string_view("(),.;*+-/=<>%").find(c) == std::string_view::npos) {
					fail(std::string("unexpected character '") + c + "'", i);
				}
				t.text = std::string(1, c);
				i++;
			}
		}
		out.push_back(std::move(t));
	}
	Token end;
	end.kind = Tok::End;
	end.pos = long(n);
	out.push_back(end);
	return out;
}

void TokenStream::Fail(const std::string &msg) const {
	auto &t = Peek();
	std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
	throw PacError(ErrorCode::SyntaxError, msg + " near " + near + " at offset " + std::to_string(t.pos), t.pos);
}

void TokenStream::ExpectKw(std::string_view kw) {
	if (!AcceptKw(kw)) {
		std::string up(kw);
		for (auto &c : up) {
			c = char(std::toupper(static_cast<unsigned char>(c)));
		}
		Fail("expected " + up);
	}
}

void TokenStream::ExpectSym(std::string_view s) {
	if (!AcceptSym(s)) {
		Fail("expected '" + std::string(s) + "'");
	}
}

std::string TokenStream::ExpectIdent(const char *what) {
	auto &t = Peek();
	if (t.kind != Tok::Ident && t.kind != Tok::QuotedIdent) {
		Fail(std::string("expected ") + what);
	}
	return Next().text;
}

} // namespace pac
