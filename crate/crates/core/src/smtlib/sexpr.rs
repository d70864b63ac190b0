use std::fmt;

/// Location of a piece of input text. Lines and columns start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    /// Symbol, numeral, keyword or other atom. Quoted symbols are unquoted.
    Atom { text: String, quoted: bool, span: SourceSpan },
    Str { text: String, span: SourceSpan },
    List { items: Vec<SExpr>, span: SourceSpan },
}

impl SExpr {
    pub fn span(&self) -> SourceSpan {
        match self {
            SExpr::Atom { span, .. } | SExpr::Str { span, .. } | SExpr::List { span, .. } => *span,
        }
    }

    /// The symbol text of an atom (quoted or not).
    pub fn symbol(&self) -> Option<&str> {
        match self {
            SExpr::Atom { text, .. } => Some(text),
            _ => None,
        }
    }

    /// The atom text if this is an unquoted atom equal to `kw`.
    pub fn is_atom(&self, kw: &str) -> bool {
        matches!(self, SExpr::Atom { text, quoted: false, .. } if text == kw)
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            _ => None,
        }
    }

    /// Head symbol of a non-empty list whose first item is an unquoted atom.
    pub fn head(&self) -> Option<&str> {
        match self.list()?.first()? {
            SExpr::Atom { text, quoted: false, .. } => Some(text),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub message: String,
    pub span: SourceSpan,
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Reader<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self) -> SourceSpan {
        SourceSpan { start: self.pos, end: self.pos, line: self.line, column: self.column }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn error(&self, start: SourceSpan, message: impl Into<String>) -> LexError {
        LexError { message: message.into(), span: SourceSpan { end: self.pos, ..start } }
    }

    fn read(&mut self) -> Result<Option<SExpr>, LexError> {
        self.skip_trivia();
        let start = self.here();
        let c = match self.peek() {
            None => return Ok(None),
            Some(c) => c,
        };
        match c {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => return Err(self.error(start, "unclosed parenthesis")),
                        Some(')') => {
                            self.bump();
                            break;
                        }
                        Some(_) => items.push(self.read()?.expect("input not exhausted")),
                    }
                }
                Ok(Some(SExpr::List { items, span: SourceSpan { end: self.pos, ..start } }))
            }
            ')' => {
                self.bump();
                Err(self.error(start, "unexpected `)`"))
            }
            '|' => {
                self.bump();
                let mut text = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.error(start, "unterminated quoted symbol")),
                        Some('|') => break,
                        Some(c) => text.push(c),
                    }
                }
                Ok(Some(SExpr::Atom { text, quoted: true, span: SourceSpan { end: self.pos, ..start } }))
            }
            '"' => {
                self.bump();
                let mut text = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.error(start, "unterminated string literal")),
                        Some('"') if self.peek() == Some('"') => {
                            self.bump();
                            text.push('"');
                        }
                        Some('"') => break,
                        Some(c) => text.push(c),
                    }
                }
                Ok(Some(SExpr::Str { text, span: SourceSpan { end: self.pos, ..start } }))
            }
            _ => {
                let mut text = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ';' | '|' | '"') {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                Ok(Some(SExpr::Atom { text, quoted: false, span: SourceSpan { end: self.pos, ..start } }))
            }
        }
    }
}

/// Reads all top-level S-expressions of `src`.
pub fn read_all(src: &str) -> Result<Vec<SExpr>, LexError> {
    let mut r = Reader { src, pos: 0, line: 1, column: 1 };
    let mut out = Vec::new();
    while let Some(e) = r.read()? {
        out.push(e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let es = read_all("; comment\n(assert (> |x y| 0))\n(check-sat)").unwrap();
        assert_eq!(es.len(), 2);
        assert_eq!(es[0].head(), Some("assert"));
        assert_eq!(es[0].span().line, 2);
        let inner = &es[0].list().unwrap()[1];
        assert_eq!(inner.list().unwrap()[1].symbol(), Some("x y"));
        assert_eq!(es[1].span().line, 3);
    }

    #[test]
    fn reports_unbalanced_input() {
        let err = read_all("(assert (> x 0)").unwrap_err();
        assert_eq!(err.span.line, 1);
        assert!(read_all(")").is_err());
    }
}
