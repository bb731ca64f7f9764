//! Expression syntax for scenarios.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | 'conv') unary)*
//! unary   := '-' unary | scalar ['*'] unary | postfix
//! scalar  := number | number 'i' | '(' number ('+'|'-') number 'i' ')'
//! postfix := 'iota' '(' name ')' | 'sigma' '(' name ')'
//!          | op '(' expr ')' | '(' expr ')'
//! op      := 'D' ['^' k] | 'Dhat' ['^' k] | 'M' | 'Mhat' | 'F' | 'Finv'
//!          | ('tau' | 'chi' | 'tauhat' | 'chihat') '(' number ')'
//! ```
//!
//! Catalog names may contain their own parentheses, e.g. `iota(delta_prime(a=0.5))`.
//! The printed form of a [`Representative`] parses back to the same tree.

use std::fmt;

use colombeau::expr::{iota_named, sigma_named, Representative};
use colombeau::Error;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub enum ParseError {
    /// Syntax error at a byte offset.
    Syntax { pos: usize, message: String },
    /// A well-formed tree that the engine rejects; `path` locates the
    /// offending node from the root, e.g. `Sum[1]/F/Product[0]`.
    Tree { path: String, error: Error },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { pos, message } => write!(f, "parse error at {pos}: {message}"),
            ParseError::Tree { path, error } => write!(f, "{error} (at {path})"),
        }
    }
}

impl std::error::Error for ParseError {}

pub fn parse_expression(text: &str) -> Result<Representative, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let r = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.err("unexpected trailing input"));
    }
    if let Err(error) = r.validate() {
        return Err(ParseError::Tree {
            path: locate(&r, "root".into()),
            error,
        });
    }
    Ok(r)
}

/// Deepest node whose subtree fails validation; for a missing transform,
/// the offending leaf below it.
fn locate(r: &Representative, path: String) -> String {
    for (name, c) in children(r) {
        if c.validate().is_err() {
            return locate(c, format!("{path}/{name}"));
        }
    }
    match r.validate() {
        Err(Error::Unsupported(msg)) => find_untransformable(r, &path, &msg).unwrap_or(path),
        _ => path,
    }
}

fn find_untransformable(r: &Representative, path: &str, msg: &str) -> Option<String> {
    if let Representative::Iota(leaf) = r {
        let quoted = format!("`{}`", leaf.label);
        return msg.contains(&quoted).then(|| path.to_string());
    }
    children(r)
        .into_iter()
        .find_map(|(name, c)| find_untransformable(c, &format!("{path}/{name}"), msg))
}

fn children(r: &Representative) -> Vec<(String, &Representative)> {
    use Representative as R;
    match r {
        R::Iota(_) | R::Sigma(_) => Vec::new(),
        R::Sum(parts) => parts
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("Sum[{i}]"), p))
            .collect(),
        R::Product(l, r) => vec![("Product[0]".into(), &**l), ("Product[1]".into(), &**r)],
        R::Convolve(l, r) => vec![("Convolve[0]".into(), &**l), ("Convolve[1]".into(), &**r)],
        R::Scale(_, c) => vec![("Scale".into(), &**c)],
        R::Deriv(_, c) => vec![("D".into(), &**c)],
        R::MulCoordinate(c) => vec![("M".into(), &**c)],
        R::HatDeriv(_, c) => vec![("Dhat".into(), &**c)],
        R::HatMulCoordinate(c) => vec![("Mhat".into(), &**c)],
        R::Fourier(c) => vec![("F".into(), &**c)],
        R::InvFourier(c) => vec![("Finv".into(), &**c)],
        R::Translate(_, c) => vec![("tau".into(), &**c)],
        R::Modulate(_, c) => vec![("chi".into(), &**c)],
        R::HatTranslate(_, c) => vec![("tauhat".into(), &**c)],
        R::HatModulate(_, c) => vec![("chihat".into(), &**c)],
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    /// Identifier at the cursor, without consuming it.
    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let r = self.rest();
        let end = r
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(r.len());
        if r.starts_with(|c: char| c.is_ascii_alphabetic()) {
            &r[..end]
        } else {
            ""
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if self.ident() == kw {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Representative, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Representative, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(self.unary()?);
            } else if self.keyword("conv") {
                acc = acc.conv(self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Representative, ParseError> {
        if self.eat('-') {
            if let Some(c) = self.number_here() {
                self.eat('*');
                return Ok(self.unary()?.scale(-c));
            }
            return Ok(self.unary()?.scale(Complex64::new(-1.0, 0.0)));
        }
        if let Some(c) = self.scalar()? {
            self.eat('*');
            return Ok(self.unary()?.scale(c));
        }
        self.postfix()
    }

    /// Real or imaginary literal at the cursor (`2.5`, `3i`).
    fn number_here(&mut self) -> Option<Complex64> {
        self.skip_ws();
        let r = self.rest();
        let mut end = 0;
        let bytes = r.as_bytes();
        while end < bytes.len() {
            let c = bytes[end] as char;
            let exp_sign = (c == '+' || c == '-')
                && end > 0
                && matches!(bytes[end - 1] as char, 'e' | 'E');
            if c.is_ascii_digit() || c == '.' || exp_sign || ((c == 'e' || c == 'E') && end > 0) {
                end += 1;
            } else {
                break;
            }
        }
        // a trailing `e` belongs to an identifier, not an exponent
        while end > 0 && matches!(bytes[end - 1] as char, 'e' | 'E' | '+' | '-') {
            end -= 1;
        }
        if end == 0 {
            return None;
        }
        let v: f64 = r[..end].parse().ok()?;
        self.pos += end;
        if self.rest().starts_with('i')
            && !self.rest()[1..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += 1;
            Some(Complex64::new(0.0, v))
        } else {
            Some(Complex64::new(v, 0.0))
        }
    }

    fn scalar(&mut self) -> Result<Option<Complex64>, ParseError> {
        if let Some(c) = self.number_here() {
            return Ok(Some(c));
        }
        if self.peek() != Some('(') {
            return Ok(None);
        }
        // `(re+imi)`; anything else is a parenthesized expression
        let save = self.pos;
        self.pos += 1;
        let lit = (|| {
            let neg_re = self.eat('-');
            let re = self.number_here()?;
            let sign = if self.eat('+') {
                1.0
            } else if self.eat('-') {
                -1.0
            } else {
                return None;
            };
            let im = self.number_here()?;
            if re.im != 0.0 || im.re != 0.0 || !self.eat(')') {
                return None;
            }
            let re = if neg_re { -re.re } else { re.re };
            Some(Complex64::new(re, sign * im.im))
        })();
        if lit.is_none() {
            self.pos = save;
        }
        Ok(lit)
    }

    fn postfix(&mut self) -> Result<Representative, ParseError> {
        let start = self.pos;
        if self.eat('(') {
            let r = self.expr()?;
            self.expect(')')?;
            return Ok(r);
        }
        let id = self.ident();
        if id.is_empty() {
            return Err(self.err("expected an expression"));
        }
        self.pos += id.len();
        match id {
            "iota" | "sigma" => {
                let name = self.leaf_name()?;
                let r = if id == "iota" {
                    iota_named(&name)
                } else {
                    sigma_named(&name)
                };
                r.map_err(|e| ParseError::Syntax {
                    pos: start,
                    message: e.to_string(),
                })
            }
            "D" | "Dhat" => {
                let k = if self.eat('^') { self.order()? } else { 1 };
                let inner = self.argument()?;
                Ok(if id == "D" {
                    inner.deriv(k)
                } else {
                    inner.hat_deriv(k)
                })
            }
            "M" => Ok(self.argument()?.mul_coordinate()),
            "Mhat" => Ok(self.argument()?.hat_mul_coordinate()),
            "F" => Ok(self.argument()?.fourier()),
            "Finv" => Ok(self.argument()?.inv_fourier()),
            "tau" | "chi" | "tauhat" | "chihat" => {
                self.expect('(')?;
                let a = self.real()?;
                self.expect(')')?;
                let inner = self.argument()?;
                Ok(match id {
                    "tau" => inner.translate(a),
                    "chi" => inner.modulate(a),
                    "tauhat" => inner.hat_translate(a),
                    _ => inner.hat_modulate(a),
                })
            }
            _ => Err(ParseError::Syntax {
                pos: start,
                message: format!("unknown operator `{id}`"),
            }),
        }
    }

    fn argument(&mut self) -> Result<Representative, ParseError> {
        self.expect('(')?;
        let r = self.expr()?;
        self.expect(')')?;
        Ok(r)
    }

    fn order(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let r = self.rest();
        let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
        let k = r[..end]
            .parse()
            .map_err(|_| self.err("expected a derivative order"))?;
        self.pos += end;
        Ok(k)
    }

    fn real(&mut self) -> Result<f64, ParseError> {
        let neg = self.eat('-');
        match self.number_here() {
            Some(c) if c.im == 0.0 => Ok(if neg { -c.re } else { c.re }),
            _ => Err(self.err("expected a real number")),
        }
    }

    /// Balanced text up to the closing parenthesis of a leaf.
    fn leaf_name(&mut self) -> Result<String, ParseError> {
        self.expect('(')?;
        let start = self.pos;
        let mut depth = 1;
        for (i, c) in self.rest().char_indices() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        let name = self.src[start..start + i].trim().to_string();
                        self.pos = start + i + 1;
                        if name.is_empty() {
                            return Err(ParseError::Syntax {
                                pos: start,
                                message: "empty catalog name".into(),
                            });
                        }
                        return Ok(name);
                    }
                }
                _ => {}
            }
        }
        Err(self.err("unclosed catalog name"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use colombeau::mollifier::operator::DomainTag;
    use proptest::prelude::*;
    use Representative as R;

    #[test]
    fn product_of_deltas() {
        let r = parse_expression("iota(delta) * iota(delta)").unwrap();
        match r {
            R::Product(a, b) => {
                assert!(matches!(*a, R::Iota(_)));
                assert!(matches!(*b, R::Iota(_)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nested_fourier_tags() {
        let r = parse_expression("Finv(F(iota(delta)))").unwrap();
        assert_eq!(r.validate().unwrap(), Some(DomainTag::Spatial));
        let R::InvFourier(inner) = &r else { panic!() };
        assert_eq!(inner.validate().unwrap(), Some(DomainTag::Frequency));
    }

    #[test]
    fn heaviside_has_no_transform() {
        let e = parse_expression("F(iota(heaviside))").unwrap_err();
        match e {
            ParseError::Tree { path, error } => {
                assert_eq!(path, "root/F");
                assert!(error.to_string().contains("no catalog transform"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tag_mismatch_names_path() {
        let e = parse_expression("Finv(F(iota(delta))) + sigma(gauss) * F(iota(delta))").unwrap_err();
        let ParseError::Tree { path, error } = e else {
            panic!()
        };
        assert_eq!(path, "root");
        assert!(matches!(error, Error::DomainMismatch(_)));
        let e = parse_expression("Finv(F(F(iota(delta))))").unwrap_err();
        let ParseError::Tree { path, .. } = e else {
            panic!()
        };
        assert_eq!(path, "root/Finv");
    }

    #[test]
    fn syntax_errors_carry_position() {
        assert_eq!(
            parse_expression("iota(delta) +"),
            Err(ParseError::Syntax {
                pos: 13,
                message: "expected an expression".into()
            })
        );
        let ParseError::Syntax { pos, .. } = parse_expression("iota(delta) ) ").unwrap_err() else {
            panic!()
        };
        assert_eq!(pos, 12);
        let ParseError::Syntax { pos, message } = parse_expression("sigma(delta)").unwrap_err() else {
            panic!()
        };
        assert_eq!(pos, 0);
        assert!(message.contains("smooth"));
        assert!(parse_expression("Q(iota(delta))").is_err());
    }

    #[test]
    fn operators_and_scalars() {
        let r = parse_expression("-2 D^2(iota(heaviside)) + 0.5i Dhat(iota(gauss))").unwrap();
        assert_eq!(
            r.to_string(),
            "(-2 D^2(iota(heaviside)) + (0+0.5i) Dhat^1(iota(gauss)))"
        );
        let r = parse_expression("tauhat(-0.5)(chi(2)(iota(delta_prime(a=0.5))))").unwrap();
        assert_eq!(r.to_string(), "tauhat(-0.5)(chi(2)(iota(delta_prime(a=0.5))))");
        let r = parse_expression("iota(gauss) - sigma(gauss)").unwrap();
        assert_eq!(r.to_string(), "(iota(gauss) + -1 sigma(gauss))");
        let r = parse_expression("(1-2i) iota(exp) conv sigma(gauss)").unwrap();
        assert!(matches!(r, R::Convolve(..)));
        let r = parse_expression("2 * Mhat(M(sigma(x_poly(2))))").unwrap();
        assert_eq!(r.to_string(), "2 Mhat(M(sigma(x_poly(2))))");
    }

    fn arb_rep() -> impl Strategy<Value = Representative> {
        let leaf = prop_oneof![
            Just(iota_named("delta").unwrap()),
            Just(iota_named("delta_prime(a=0.5)").unwrap()),
            Just(iota_named("gauss").unwrap()),
            Just(sigma_named("gauss").unwrap()),
            Just(sigma_named("one").unwrap()),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.conv(b)),
                (inner.clone(), -4i32..4, -4i32..4).prop_map(|(a, re, im)| a.scale(
                    Complex64::new(re as f64 * 0.25, im as f64 * 0.5)
                )),
                (inner.clone(), 1u32..3).prop_map(|(a, k)| a.deriv(k)),
                (inner.clone(), 1u32..3).prop_map(|(a, k)| a.hat_deriv(k)),
                inner.clone().prop_map(|a| a.mul_coordinate()),
                inner.clone().prop_map(|a| a.hat_mul_coordinate()),
                (inner.clone(), -3i32..3).prop_map(|(a, s)| a.translate(s as f64 * 0.5)),
                (inner.clone(), -3i32..3).prop_map(|(a, s)| a.hat_modulate(s as f64 * 0.25)),
                inner.clone().prop_map(|a| a.fourier().inv_fourier()),
            ]
        })
    }

    proptest! {
        #[test]
        fn printed_form_parses_back(r in arb_rep()) {
            let text = r.to_string();
            let back = parse_expression(&text).unwrap();
            prop_assert_eq!(back, r);
        }
    }
}
