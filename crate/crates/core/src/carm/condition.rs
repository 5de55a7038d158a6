//! Specialisation conditions of event variants.
//!
//! A condition is a boolean expression over message-structure field names.
//! Field names may contain spaces (`Final date > Initial date`), so any run
//! of words that are not keywords is read as one field reference.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CondToken {
    Field(String),
    Keyword(String),
    Op(String),
    Number(String),
    Str(String),
    LParen,
    RParen,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub tokens: Vec<CondToken>,
}

const KEYWORDS: [&str; 5] = ["and", "or", "not", "true", "false"];
const OPERATORS: [&str; 11] = [">=", "<=", "<>", "!=", "=", ">", "<", "+", "-", "*", "/"];

impl Condition {
    pub fn parse(text: &str) -> Result<Condition, String> {
        let mut tokens: Vec<CondToken> = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c == '(' {
                tokens.push(CondToken::LParen);
                i += 1;
            } else if c == ')' {
                tokens.push(CondToken::RParen);
                i += 1;
            } else if c == '\'' || c == '"' {
                let end = chars[i + 1..]
                    .iter()
                    .position(|&d| d == c)
                    .ok_or_else(|| "unterminated string literal".to_string())?;
                tokens.push(CondToken::Str(chars[i + 1..i + 1 + end].iter().collect()));
                i += end + 2;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let number: String = chars[start..i].iter().collect();
                match tokens.last_mut() {
                    // `Address 2` is a field name, not a field followed by a literal
                    Some(CondToken::Field(name)) => {
                        name.push(' ');
                        name.push_str(&number);
                    }
                    _ => tokens.push(CondToken::Number(number)),
                }
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if KEYWORDS.contains(&word.to_lowercase().as_str()) {
                    tokens.push(CondToken::Keyword(word.to_lowercase()));
                } else if let Some(CondToken::Field(name)) = tokens.last_mut() {
                    name.push(' ');
                    name.push_str(&word);
                } else {
                    tokens.push(CondToken::Field(word));
                }
            } else {
                let rest: String = chars[i..].iter().take(2).collect();
                let op = OPERATORS
                    .iter()
                    .find(|op| rest.starts_with(*op))
                    .ok_or_else(|| format!("unexpected character `{c}` in condition"))?;
                tokens.push(CondToken::Op(op.to_string()));
                i += op.chars().count();
            }
        }
        if tokens.is_empty() {
            return Err("empty condition".into());
        }
        Ok(Condition { tokens })
    }

    /// Field names referenced by the condition, in order of appearance.
    pub fn fields(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().filter_map(|t| match t {
            CondToken::Field(name) => Some(name.as_str()),
            _ => None,
        })
    }

    /// Renders the condition, replacing every field reference through `map`.
    pub fn render_with<F>(&self, mut map: F) -> String
    where
        F: FnMut(&str) -> String,
    {
        let mut out = String::new();
        let mut after_open = true;
        for token in &self.tokens {
            let text = match token {
                CondToken::Field(name) => map(name),
                CondToken::Keyword(k) => k.clone(),
                CondToken::Op(op) => op.clone(),
                CondToken::Number(n) => n.clone(),
                CondToken::Str(s) => format!("'{s}'"),
                CondToken::LParen => "(".into(),
                CondToken::RParen => ")".into(),
            };
            if !after_open && *token != CondToken::RParen {
                out.push(' ');
            }
            out.push_str(&text);
            after_open = *token == CondToken::LParen;
        }
        out
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(str::to_string))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_word_fields() {
        let c = Condition::parse("Final date > Initial date").unwrap();
        assert_eq!(c.fields().collect::<Vec<_>>(), vec!["Final date", "Initial date"]);
        assert_eq!(c.to_string(), "Final date > Initial date");
    }

    #[test]
    fn keywords_split_phrases() {
        let c = Condition::parse("(Amount >= 1000 and not Urgent) or Kind = 'x y'").unwrap();
        assert_eq!(c.fields().collect::<Vec<_>>(), vec!["Amount", "Urgent", "Kind"]);
        assert_eq!(c.to_string(), "(Amount >= 1000 and not Urgent) or Kind = 'x y'");
    }

    #[test]
    fn substitution() {
        let c = Condition::parse("Final date > Initial date").unwrap();
        let rendered = c.render_with(|f| format!("p_atr{}", crate::naming::attribute_name(f)));
        assert_eq!(rendered, "p_atrfinal_date > p_atrinitial_date");
    }

    #[test]
    fn rejects_empty_and_garbage() {
        assert!(Condition::parse("   ").is_err());
        assert!(Condition::parse("a ? b").is_err());
        assert!(Condition::parse("a = 'open").is_err());
    }
}
