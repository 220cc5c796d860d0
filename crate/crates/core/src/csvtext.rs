//! Minimal RFC 4180 reader that keeps track of whether each field was quoted.
//!
//! Quotedness matters because an empty unquoted field is a null while `""` is
//! an empty string. Blank lines are skipped.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawField {
    pub text: String,
    pub quoted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawRecord {
    /// 1-based line on which the record starts.
    pub line: usize,
    pub fields: Vec<RawField>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct CsvSyntaxError {
    pub line: usize,
    pub message: String,
}

pub(crate) fn parse_records(input: &str) -> Result<Vec<RawRecord>, CsvSyntaxError> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    let mut records = Vec::new();
    let mut chars = input.chars().peekable();
    let mut line = 1usize;

    while chars.peek().is_some() {
        let start_line = line;
        let mut fields = Vec::new();
        let mut field = String::new();
        let mut quoted = false;
        let mut in_quotes = false;
        let mut after_quote = false;
        let mut ended_line = false;

        while let Some(c) = chars.next() {
            if in_quotes {
                match c {
                    '"' if chars.peek() == Some(&'"') => {
                        chars.next();
                        field.push('"');
                    }
                    '"' => {
                        in_quotes = false;
                        after_quote = true;
                    }
                    '\n' => {
                        line += 1;
                        field.push(c);
                    }
                    _ => field.push(c),
                }
                continue;
            }
            match c {
                ',' => {
                    fields.push(RawField {
                        text: std::mem::take(&mut field),
                        quoted,
                    });
                    quoted = false;
                    after_quote = false;
                }
                '\r' if chars.peek() == Some(&'\n') => {}
                '\n' => {
                    line += 1;
                    ended_line = true;
                    break;
                }
                '"' if !after_quote && field.trim().is_empty() => {
                    field.clear();
                    quoted = true;
                    in_quotes = true;
                }
                _ if after_quote => {
                    if !c.is_whitespace() {
                        return Err(CsvSyntaxError {
                            line,
                            message: format!("unexpected character `{c}` after closing quote"),
                        });
                    }
                }
                _ => field.push(c),
            }
        }
        if in_quotes {
            return Err(CsvSyntaxError {
                line: start_line,
                message: "unterminated quoted field".to_string(),
            });
        }
        let blank = fields.is_empty() && !quoted && field.trim().is_empty();
        if blank && (ended_line || chars.peek().is_none()) {
            continue;
        }
        fields.push(RawField { text: field, quoted });
        records.push(RawRecord {
            line: start_line,
            fields,
        });
    }
    Ok(records)
}
