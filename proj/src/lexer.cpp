#include "aisette/lexer.hpp"

#include <cctype>
#include <unordered_map>

namespace aisette {

std::string severity_name(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Note: return "note";
  }
  return "?";
}

std::string format_diagnostic(const Diagnostic& d) {
  return severity_name(d.severity) + "[" + d.code + "] " + std::to_string(d.span.line) +
         ":" + std::to_string(d.span.col) + ": " + d.message;
}

const char* token_name(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::CStringLit: return "cstring";
    case Tok::StringLit: return "string";
    case Tok::RegexLit: return "regex";
    case Tok::GlobLit: return "glob";
    case Tok::DocComment: return "doc-comment";
    case Tok::Ident: return "identifier";
    case Tok::DollarIdent: return "$identifier";
    case Tok::KwType: return "'type'";
    case Tok::KwSensitive: return "'sensitive'";
    case Tok::KwEntity: return "'entity'";
    case Tok::KwField: return "'field'";
    case Tok::KwInvariant: return "'invariant'";
    case Tok::KwFunction: return "'function'";
    case Tok::KwAction: return "'action'";
    case Tok::KwApi: return "'api'";
    case Tok::KwAgent: return "'agent'";
    case Tok::KwChktest: return "'chktest'";
    case Tok::KwLet: return "'let'";
    case Tok::KwVar: return "'var'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwThen: return "'then'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwAssert: return "'assert'";
    case Tok::KwRequires: return "'requires'";
    case Tok::KwEnsures: return "'ensures'";
    case Tok::KwEnv: return "'env'";
    case Tok::KwPermissions: return "'permissions'";
    case Tok::KwFail: return "'fail'";
    case Tok::KwNone: return "'none'";
    case Tok::KwSome: return "'some'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwPred: return "'pred'";
    case Tok::KwFn: return "'fn'";
    case Tok::KwOf: return "'of'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBracePipe: return "'{|'";
    case Tok::RBracePipe: return "'|}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::ColonColon: return "'::'";
    case Tok::Dot: return "'.'";
    case Tok::Ellipsis: return "'...'";
    case Tok::Question: return "'?'";
    case Tok::Assign: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::EqEqEq: return "'==='";
    case Tok::BangEq: return "'!='";
    case Tok::BangEqEq: return "'!=='";
    case Tok::Lt: return "'<'";
    case Tok::LtEq: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::GtEq: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Bang: return "'!'";
    case Tok::AmpAmp: return "'&&'";
    case Tok::PipePipe: return "'||'";
    case Tok::Arrow: return "'->'";
    case Tok::FatArrow: return "'=>'";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

namespace {

const std::unordered_map<std::string_view, Tok>& keyword_table() {
  static const std::unordered_map<std::string_view, Tok> table = {
      {"type", Tok::KwType},       {"sensitive", Tok::KwSensitive},
      {"entity", Tok::KwEntity},   {"field", Tok::KwField},
      {"invariant", Tok::KwInvariant}, {"function", Tok::KwFunction},
      {"action", Tok::KwAction},   {"api", Tok::KwApi},
      {"agent", Tok::KwAgent},     {"chktest", Tok::KwChktest},
      {"let", Tok::KwLet},         {"var", Tok::KwVar},
      {"if", Tok::KwIf},           {"else", Tok::KwElse},
      {"then", Tok::KwThen},       {"return", Tok::KwReturn},
      {"assert", Tok::KwAssert},   {"requires", Tok::KwRequires},
      {"ensures", Tok::KwEnsures}, {"env", Tok::KwEnv},
      {"permissions", Tok::KwPermissions}, {"fail", Tok::KwFail},
      {"none", Tok::KwNone},       {"some", Tok::KwSome},
      {"true", Tok::KwTrue},       {"false", Tok::KwFalse},
      {"pred", Tok::KwPred},       {"fn", Tok::KwFn},
      {"of", Tok::KwOf},
  };
  return table;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  LexResult run() {
    LexResult out;
    while (true) {
      skip_trivia(out);
      if (out.diags.has_errors()) break;
      if (pos_ >= src_.size()) break;
      lex_one(out);
      if (out.diags.has_errors()) break;
    }
    out.tokens.push_back(Token{Tok::Eof, src_.substr(src_.size()), here_span(0)});
    return out;
  }

 private:
  std::string_view src_;
  size_t pos_ = 0;
  uint32_t line_ = 1;
  uint32_t col_ = 1;
  Tok prev_kind_ = Tok::Eof;  // disambiguates '/' (division vs regex after 'of')

  char peek(size_t off = 0) const {
    return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
  }
  void advance() {
    if (pos_ < src_.size()) {
      if (src_[pos_] == '\n') {
        line_++;
        col_ = 1;
      } else {
        col_++;
      }
      pos_++;
    }
  }
  Span here_span(size_t len) const {
    return Span{static_cast<uint32_t>(pos_), static_cast<uint32_t>(pos_ + len), line_, col_};
  }

  void skip_trivia(LexResult& out) {
    while (pos_ < src_.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '%' && peek(1) == '*' && peek(2) == '*') {
        return;  // doc comment, lexed as a token
      } else if (c == '%' && peek(1) == '%') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '%') {
        out.diags.error("lex-unknown-char", "unknown character '%'", here_span(1));
        return;
      } else {
        return;
      }
    }
  }

  void emit(LexResult& out, Tok kind, size_t begin, Span sp, char suffix = 0) {
    sp.end = static_cast<uint32_t>(pos_);
    out.tokens.push_back(Token{kind, src_.substr(begin, pos_ - begin), sp, suffix});
    prev_kind_ = kind;
  }

  void lex_one(LexResult& out) {
    const size_t begin = pos_;
    const Span sp = here_span(0);
    char c = peek();

    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number(out, begin, sp);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      std::string_view word = src_.substr(begin, pos_ - begin);
      auto it = keyword_table().find(word);
      emit(out, it != keyword_table().end() ? it->second : Tok::Ident, begin, sp);
      return;
    }

    switch (c) {
      case '$': {
        advance();
        if (!(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) {
          out.diags.error("lex-unknown-char", "expected identifier after '$'", sp);
          return;
        }
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
        emit(out, Tok::DollarIdent, begin, sp);
        return;
      }
      case '\'':
      case '"': {
        char quote = c;
        advance();
        while (pos_ < src_.size() && peek() != quote && peek() != '\n') {
          if (peek() == '\\') advance();
          advance();
        }
        if (peek() != quote) {
          out.diags.error("lex-unterminated-string", "unterminated string literal", sp);
          return;
        }
        advance();
        emit(out, quote == '\'' ? Tok::CStringLit : Tok::StringLit, begin, sp);
        return;
      }
      case '/': {
        // A '/' directly after 'of' opens a regex literal; anywhere else it is division.
        if (prev_kind_ == Tok::KwOf) {
          advance();
          while (pos_ < src_.size() && peek() != '/' && peek() != '\n') {
            if (peek() == '\\') advance();
            advance();
          }
          if (peek() != '/') {
            out.diags.error("lex-unterminated-regex", "unterminated regex literal", sp);
            return;
          }
          advance();
          char flag = 0;
          if (peek() == 'c') {
            flag = 'c';
            advance();
          }
          emit(out, Tok::RegexLit, begin, sp, flag);
          return;
        }
        advance();
        emit(out, Tok::Slash, begin, sp);
        return;
      }
      case '\\': {
        advance();
        while (pos_ < src_.size() && peek() != '\\' && peek() != '\n') advance();
        if (peek() != '\\') {
          out.diags.error("lex-unterminated-glob", "unterminated permission glob literal", sp);
          return;
        }
        advance();
        emit(out, Tok::GlobLit, begin, sp);
        return;
      }
      case '%': {  // %** doc comment (skip_trivia leaves it for us)
        advance(); advance(); advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '*' && peek(2) == '%')) {
          advance();
        }
        if (pos_ >= src_.size()) {
          out.diags.error("lex-unterminated-doc", "unterminated doc comment", sp);
          return;
        }
        advance(); advance(); advance();
        emit(out, Tok::DocComment, begin, sp);
        return;
      }
      default:
        break;
    }

    auto two = [&](char a, char b) { return c == a && peek(1) == b; };
    if (two('=', '=') && peek(2) == '=') { advance(); advance(); advance(); emit(out, Tok::EqEqEq, begin, sp); return; }
    if (two('!', '=') && peek(2) == '=') { advance(); advance(); advance(); emit(out, Tok::BangEqEq, begin, sp); return; }
    if (c == '.' && peek(1) == '.' && peek(2) == '.') { advance(); advance(); advance(); emit(out, Tok::Ellipsis, begin, sp); return; }
    if (two('=', '=')) { advance(); advance(); emit(out, Tok::EqEq, begin, sp); return; }
    if (two('!', '=')) { advance(); advance(); emit(out, Tok::BangEq, begin, sp); return; }
    if (two('<', '=')) { advance(); advance(); emit(out, Tok::LtEq, begin, sp); return; }
    if (two('>', '=')) { advance(); advance(); emit(out, Tok::GtEq, begin, sp); return; }
    if (two('&', '&')) { advance(); advance(); emit(out, Tok::AmpAmp, begin, sp); return; }
    if (two('|', '|')) { advance(); advance(); emit(out, Tok::PipePipe, begin, sp); return; }
    if (two('-', '>')) { advance(); advance(); emit(out, Tok::Arrow, begin, sp); return; }
    if (two('=', '>')) { advance(); advance(); emit(out, Tok::FatArrow, begin, sp); return; }
    if (two(':', ':')) { advance(); advance(); emit(out, Tok::ColonColon, begin, sp); return; }
    if (two('{', '|')) { advance(); advance(); emit(out, Tok::LBracePipe, begin, sp); return; }
    if (two('|', '}')) { advance(); advance(); emit(out, Tok::RBracePipe, begin, sp); return; }

    Tok single;
    switch (c) {
      case '(': single = Tok::LParen; break;
      case ')': single = Tok::RParen; break;
      case '{': single = Tok::LBrace; break;
      case '}': single = Tok::RBrace; break;
      case '[': single = Tok::LBracket; break;
      case ']': single = Tok::RBracket; break;
      case ',': single = Tok::Comma; break;
      case ';': single = Tok::Semi; break;
      case ':': single = Tok::Colon; break;
      case '.': single = Tok::Dot; break;
      case '?': single = Tok::Question; break;
      case '=': single = Tok::Assign; break;
      case '<': single = Tok::Lt; break;
      case '>': single = Tok::Gt; break;
      case '+': single = Tok::Plus; break;
      case '-': single = Tok::Minus; break;
      case '*': single = Tok::Star; break;
      case '!': single = Tok::Bang; break;
      default:
        out.diags.error("lex-unknown-char",
                        std::string("unknown character '") + c + "'", here_span(1));
        return;
    }
    advance();
    emit(out, single, begin, sp);
  }

  void lex_number(LexResult& out, size_t begin, Span sp) {
    while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    char suffix = 0;
    if (peek() == 'i' || peek() == 'd') {
      suffix = peek();
      advance();
    } else if (peek() != '<') {
      // A bare numeric literal is only legal when an alias annotation
      // follows immediately; otherwise the type is unstated.
      Span err = sp;
      err.end = static_cast<uint32_t>(pos_);
      out.diags.error("lex-missing-suffix",
                      "numeric literal missing type suffix ('i' or 'd') or alias annotation",
                      err);
      return;
    }
    emit(out, Tok::Number, begin, sp, suffix);
  }
};

}  // namespace

LexResult tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace aisette
