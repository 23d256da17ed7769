//! Text format for argumentation graphs.
//!
//! A document is a sequence of statements, whitespace-insensitive, one or
//! more per line, each with an optional trailing `.`:
//!
//! ```text
//! arg(<name>)            // argument with default weight 0.5
//! arg(<name>,<weight>)   // argument with explicit weight in [0,1]
//! att(<source>,<target>) // source attacks target
//! sup(<source>,<target>) // source supports target
//! ```
//!
//! `//` starts a comment running to the end of the line. Names may be any
//! non-empty token free of whitespace, commas and parentheses, so plain
//! `arg(a). att(a,b).` files load unchanged (weights default to 0.5 and the
//! support relation stays empty).

use std::fmt::Write as _;

use crate::bag::{Bag, BagBuilder, BagError, EdgeKind};

/// Rounds `x` to `digits` significant decimal digits.
pub fn round_significant(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits as i32 - 1 - magnitude);
    (x * factor).round() / factor
}

/// Formats `x` with `digits` significant digits, as short as possible.
pub fn format_significant(x: f64, digits: u32) -> String {
    format!("{}", round_significant(x, digits))
}

/// Serializes a graph in the text format: all arguments first (each with an
/// explicit weight, six significant digits), then attacks, then supports,
/// one statement per line. An empty graph serializes to the empty document.
pub fn serialize_bag(bag: &Bag) -> String {
    let mut out = String::new();
    for arg in bag.arguments() {
        let _ = writeln!(
            out,
            "arg({},{}).",
            arg.name,
            format_significant(arg.weight, 6)
        );
    }
    for &(src, tgt) in bag.attacks() {
        let _ = writeln!(out, "att({},{}).", bag.name(src), bag.name(tgt));
    }
    for &(src, tgt) in bag.supports() {
        let _ = writeln!(out, "sup({},{}).", bag.name(src), bag.name(tgt));
    }
    out
}

/// Parses a document in the text format into a [`Bag`].
///
/// Arguments appear in first-declaration order; an `arg` statement without a
/// weight yields exactly 0.5. Edges naming undeclared arguments, duplicate
/// declarations and duplicate edges within one relation are errors, as are
/// weights outside `[0,1]`.
pub fn parse_bag(text: &str) -> Result<Bag, BagError> {
    Parser::new(text).run()
}

const DEFAULT_WEIGHT: f64 = 0.5;

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | ',')
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn syntax(&self, message: impl Into<String>) -> BagError {
        BagError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    /// Skips whitespace and `//` comments; stops at any other character.
    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek2() == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn expect(&mut self, wanted: char) -> Result<(), BagError> {
        self.skip_trivia();
        match self.peek() {
            Some(c) if c == wanted => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.syntax(format!("expected `{wanted}`, found `{c}`"))),
            None => Err(self.syntax(format!("expected `{wanted}`, found end of input"))),
        }
    }

    fn name(&mut self, role: &str) -> Result<String, BagError> {
        self.skip_trivia();
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if is_name_char(c) {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if out.is_empty() {
            Err(self.syntax(format!("expected {role}")))
        } else {
            Ok(out)
        }
    }

    fn run(mut self) -> Result<Bag, BagError> {
        let mut builder = BagBuilder::new();
        loop {
            self.skip_trivia();
            if self.peek().is_none() {
                break;
            }
            let keyword = self.name("a statement keyword")?;
            match keyword.as_str() {
                "arg" => self.arg_statement(&mut builder)?,
                "att" => self.edge_statement(&mut builder, EdgeKind::Attack)?,
                "sup" => self.edge_statement(&mut builder, EdgeKind::Support)?,
                other => {
                    return Err(self.syntax(format!(
                        "unknown keyword `{other}` (expected arg, att or sup)"
                    )))
                }
            }
            // optional statement terminator
            self.skip_trivia();
            if self.peek() == Some('.') {
                self.bump();
            }
        }
        Ok(builder.build())
    }

    fn arg_statement(&mut self, builder: &mut BagBuilder) -> Result<(), BagError> {
        self.expect('(')?;
        let name = self.name("an argument name")?;
        self.skip_trivia();
        let weight = if self.peek() == Some(',') {
            self.bump();
            let token = self.name("a weight")?;
            match token.parse::<f64>() {
                Ok(w) => w,
                Err(_) => return Err(self.syntax(format!("invalid weight `{token}`"))),
            }
        } else {
            DEFAULT_WEIGHT
        };
        self.expect(')')?;
        builder.argument(name, weight)?;
        Ok(())
    }

    fn edge_statement(&mut self, builder: &mut BagBuilder, kind: EdgeKind) -> Result<(), BagError> {
        self.expect('(')?;
        let source = self.name("a source argument")?;
        self.expect(',')?;
        let target = self.name("a target argument")?;
        self.expect(')')?;
        let src = builder
            .id_of(&source)
            .ok_or(BagError::UndeclaredEndpoint(source))?;
        let tgt = builder
            .id_of(&target)
            .ok_or(BagError::UndeclaredEndpoint(target))?;
        match kind {
            EdgeKind::Attack => builder.attack(src, tgt),
            EdgeKind::Support => builder.support(src, tgt),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bag::{fixture, Fixture};

    #[test]
    fn parses_basic_document() {
        let bag = parse_bag("arg(a,0.7). arg(b). att(a,b).").unwrap();
        assert_eq!(bag.len(), 2);
        assert_eq!(bag.weight(0), 0.7);
        assert_eq!(bag.weight(1), 0.5);
        assert_eq!(bag.attacks(), &[(0, 1)]);
        assert!(bag.supports().is_empty());
    }

    #[test]
    fn empty_document_is_empty_bag() {
        let bag = parse_bag("").unwrap();
        assert!(bag.is_empty());
        assert_eq!(serialize_bag(&bag), "");
    }

    #[test]
    fn default_weight_is_exactly_half() {
        let bag = parse_bag("arg(x)").unwrap();
        assert_eq!(bag.weight(0), 0.5);
    }

    #[test]
    fn undeclared_endpoint_is_an_error() {
        let err = parse_bag("arg(a). att(a,c).").unwrap_err();
        assert!(matches!(err, BagError::UndeclaredEndpoint(n) if n == "c"));
    }

    #[test]
    fn comments_and_packed_statements() {
        let text = "// a comment\narg(a,0.25) arg(b,1).att(a,b).sup(b,a) // trailing\n";
        let bag = parse_bag(text).unwrap();
        assert_eq!(bag.len(), 2);
        assert_eq!(bag.weight(0), 0.25);
        assert_eq!(bag.weight(1), 1.0);
        assert_eq!(bag.attacks(), &[(0, 1)]);
        assert_eq!(bag.supports(), &[(1, 0)]);
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse_bag("arg(a,0.5).\nfoo(a).").unwrap_err();
        match err {
            BagError::Syntax {
                line,
                column,
                message,
            } => {
                assert_eq!(line, 2);
                assert!(column >= 4, "column {column}");
                assert!(message.contains("foo"));
            }
            other => panic!("expected syntax error, got {other:?}"),
        }

        let err = parse_bag("arg(a").unwrap_err();
        assert!(matches!(err, BagError::Syntax { .. }));

        let err = parse_bag("arg(a,zero)").unwrap_err();
        assert!(matches!(err, BagError::Syntax { .. }));
    }

    #[test]
    fn weight_out_of_range_is_an_error() {
        assert!(matches!(
            parse_bag("arg(a,1.5)"),
            Err(BagError::WeightOutOfRange { .. })
        ));
        assert!(matches!(
            parse_bag("arg(a,-0.1)"),
            Err(BagError::WeightOutOfRange { .. })
        ));
    }

    #[test]
    fn duplicate_edge_and_argument_errors() {
        assert!(matches!(
            parse_bag("arg(a). arg(a)."),
            Err(BagError::DuplicateArgument(_))
        ));
        assert!(matches!(
            parse_bag("arg(a). arg(b). att(a,b). att(a,b)."),
            Err(BagError::DuplicateEdge { .. })
        ));
        // same pair in both relations is explicitly allowed
        let bag = parse_bag("arg(a). arg(b). att(a,b). sup(a,b).").unwrap();
        assert_eq!(bag.attack_count(), 1);
        assert_eq!(bag.support_count(), 1);
    }

    #[test]
    fn conarg_style_document_loads() {
        let bag = parse_bag("arg(a).\narg(b).\narg(c).\natt(a,b).\natt(b,c).\n").unwrap();
        assert_eq!(bag.len(), 3);
        assert!(bag.arguments().iter().all(|a| a.weight == 0.5));
        assert_eq!(bag.attack_count(), 2);
        assert_eq!(bag.support_count(), 0);
    }

    #[test]
    fn serialize_single_argument() {
        let mut b = crate::bag::BagBuilder::new();
        b.argument("a", 0.5).unwrap();
        assert_eq!(serialize_bag(&b.build()), "arg(a,0.5).\n");
    }

    #[test]
    fn stock_fixture_round_trips() {
        let bag = fixture(Fixture::Stock);
        let text = serialize_bag(&bag);
        let reparsed = parse_bag(&text).unwrap();
        assert_eq!(reparsed.len(), 7);
        assert_eq!(reparsed.attack_count(), 6);
        assert_eq!(reparsed.support_count(), 4);
        assert!(bag.structural_eq(&reparsed));
    }

    #[test]
    fn weights_survive_six_digit_rounding() {
        let mut b = crate::bag::BagBuilder::new();
        b.argument("a", 1.0 / 3.0).unwrap();
        b.argument("b", 0.1234567891).unwrap();
        b.argument("c", 1e-9).unwrap();
        let bag = b.build();
        let reparsed = parse_bag(&serialize_bag(&bag)).unwrap();
        assert!(bag.structural_eq(&reparsed));
        assert_eq!(reparsed.weight(0), 0.333333);
        assert_eq!(reparsed.weight(1), 0.123457);
    }

    #[test]
    fn format_significant_cases() {
        assert_eq!(format_significant(0.0, 6), "0");
        assert_eq!(format_significant(1.0, 6), "1");
        assert_eq!(format_significant(0.5, 6), "0.5");
        assert_eq!(format_significant(1.0 / 3.0, 6), "0.333333");
        assert_eq!(format_significant(0.8999999999, 6), "0.9");
        assert_eq!(round_significant(123.456789, 4), 123.5);
    }
}
