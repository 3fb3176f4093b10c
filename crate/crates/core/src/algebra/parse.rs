//! Text and JSON formats for multivectors.
//!
//! Grammar: `term := [coef] blade?`, `blade := "e" digits` with each digit a
//! basis index (1-based; `0` names the degenerate vector), and
//! `coef := real | "(" re ("+"|"-") im "i" ")"`. Numbers never use exponent
//! notation — `3e12` is the coefficient 3 on blade e12. Blade indices in any
//! order are normalized to ascending, absorbing the swap sign, so `e21`
//! parses as `-e12`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::multivector::Multivector;
use crate::algebra::sig::{Field, Signature};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("unexpected character '{0}' at byte {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("malformed number at byte {0}")]
    MalformedNumber(usize),
    #[error("malformed complex coefficient at byte {0}")]
    MalformedComplex(usize),
    #[error("blade with no indices at byte {0}")]
    EmptyBlade(usize),
    #[error("duplicate index {0} in one blade")]
    DuplicateIndex(usize),
    #[error("basis index {0} out of range for {1}")]
    IndexOutOfRange(usize, String),
    #[error("the text format supports at most one degenerate basis vector")]
    UnsupportedSignature,
    #[error("empty expression")]
    Empty,
    #[error("invalid JSON: {0}")]
    Json(String),
}

// ---------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------

/// Formats an f64 in positional notation with shortest round-trip digits.
/// Exponent notation is expanded so the output re-parses under the grammar.
pub fn format_f64(x: f64) -> String {
    let s = format!("{x}");
    if !s.contains('e') && !s.contains('E') {
        return s;
    }
    let (mantissa, exp) = s.split_once(['e', 'E']).expect("checked");
    let exp: i32 = exp.parse().expect("float exponent");
    let neg = mantissa.starts_with('-');
    let mantissa = mantissa.trim_start_matches('-');
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: String = format!("{int_part}{frac_part}");
    let point = int_part.len() as i32 + exp;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..-point {
            out.push('0');
        }
        out.push_str(&digits);
    } else if (point as usize) >= digits.len() {
        out.push_str(&digits);
        for _ in 0..(point as usize - digits.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    out
}

fn format_coeff(c: Complex64, field: Field) -> String {
    if field == Field::Complex || c.im != 0.0 {
        let sign = if c.im < 0.0 || c.im.is_sign_negative() {
            '-'
        } else {
            '+'
        };
        format!("({}{}{}i)", format_f64(c.re), sign, format_f64(c.im.abs()))
    } else {
        format_f64(c.re)
    }
}

fn blade_name(sig: Signature, mask: usize) -> String {
    let mut s = String::from("e");
    for bit in 0..sig.dim() {
        if mask & (1 << bit) != 0 {
            s.push_str(&sig.label_of_bit(bit).to_string());
        }
    }
    s
}

/// Canonical text form: terms sorted by grade then mask, lowest first.
pub fn format_multivector(mv: &Multivector) -> String {
    let sig = mv.sig();
    let mut terms: Vec<(usize, Complex64)> = mv.terms().collect();
    if terms.is_empty() {
        return "0".to_string();
    }
    terms.sort_by_key(|(m, _)| (m.count_ones(), *m));

    let mut out = String::new();
    for (idx, (mask, c)) in terms.iter().enumerate() {
        let complex = mv.field() == Field::Complex || c.im != 0.0;
        // pull a leading minus out of purely real coefficients
        let (lead_neg, coeff) = if !complex && c.re < 0.0 {
            (true, Complex64::new(-c.re, 0.0))
        } else {
            (false, *c)
        };
        if idx == 0 {
            if lead_neg {
                out.push('-');
            }
        } else {
            out.push_str(if lead_neg { " - " } else { " + " });
        }
        let coeff_str = format_coeff(coeff, mv.field());
        if *mask == 0 {
            out.push_str(&coeff_str);
        } else if !complex && coeff.re == 1.0 {
            out.push_str(&blade_name(sig, *mask));
        } else {
            out.push_str(&coeff_str);
            out.push_str(&blade_name(sig, *mask));
        }
    }
    out
}

// ---------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------

struct Cursor<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            text: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Unsigned decimal number without exponent notation.
    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.eat(b'.') {
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.pos += 1;
            }
        }
        if self.pos == start || self.text[start..self.pos] == *b"." {
            return Err(ParseError::MalformedNumber(start));
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(ParseError::MalformedNumber(start))
    }
}

fn parse_blade(cur: &mut Cursor, sig: Signature) -> Result<(f64, usize), ParseError> {
    // caller consumed the 'e'
    if sig.r() > 1 {
        return Err(ParseError::UnsupportedSignature);
    }
    let start = cur.pos;
    let mut labels = Vec::new();
    while let Some(c @ b'0'..=b'9') = cur.peek() {
        labels.push((c - b'0') as usize);
        cur.pos += 1;
    }
    if labels.is_empty() {
        return Err(ParseError::EmptyBlade(start));
    }
    let mut mask = 0usize;
    let mut sign = 1.0;
    for &label in &labels {
        let bit = sig
            .bit_of_label(label)
            .map_err(|_| ParseError::IndexOutOfRange(label, sig.to_string()))?;
        let bitmask = 1usize << bit;
        if mask & bitmask != 0 {
            return Err(ParseError::DuplicateIndex(label));
        }
        if (mask >> (bit + 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        mask |= bitmask;
    }
    Ok((sign, mask))
}

/// `(re ± im i)`; also accepts `±i` shorthand for unit imaginary part.
fn parse_complex(cur: &mut Cursor) -> Result<Complex64, ParseError> {
    let start = cur.pos;
    // caller consumed '('
    cur.skip_ws();
    let re_sign = if cur.eat(b'-') {
        -1.0
    } else {
        cur.eat(b'+');
        1.0
    };
    cur.skip_ws();
    let re = re_sign * cur.number()?;
    cur.skip_ws();
    let im_sign = match cur.bump() {
        Some(b'+') => 1.0,
        Some(b'-') => -1.0,
        _ => return Err(ParseError::MalformedComplex(start)),
    };
    cur.skip_ws();
    let im = if cur.peek() == Some(b'i') {
        1.0
    } else {
        cur.number()?
    };
    cur.skip_ws();
    if !cur.eat(b'i') {
        return Err(ParseError::MalformedComplex(start));
    }
    cur.skip_ws();
    if !cur.eat(b')') {
        return Err(ParseError::MalformedComplex(start));
    }
    Ok(Complex64::new(re, im_sign * im))
}

/// Parses the multivector grammar over the given signature.
pub fn parse_multivector(text: &str, sig: Signature) -> Result<Multivector, ParseError> {
    let mut cur = Cursor::new(text);
    let mut out = Multivector::zero(sig);
    let mut any = false;

    loop {
        cur.skip_ws();
        let term_sign = if !any {
            if cur.eat(b'-') {
                -1.0
            } else {
                cur.eat(b'+');
                1.0
            }
        } else {
            match cur.bump() {
                None => break,
                Some(b'+') => 1.0,
                Some(b'-') => -1.0,
                Some(c) => return Err(ParseError::UnexpectedChar(c as char, cur.pos - 1)),
            }
        };
        cur.skip_ws();

        let mut coeff = None;
        match cur.peek() {
            Some(b'(') => {
                cur.pos += 1;
                coeff = Some(parse_complex(&mut cur)?);
            }
            Some(b'0'..=b'9') | Some(b'.') => {
                coeff = Some(Complex64::new(cur.number()?, 0.0));
            }
            _ => {}
        }
        cur.skip_ws();

        let mut term = match coeff {
            Some(c) => c * term_sign,
            None => Complex64::new(term_sign, 0.0),
        };
        let mask = if cur.eat(b'e') {
            let (sign, mask) = parse_blade(&mut cur, sig)?;
            term *= sign;
            mask
        } else {
            if coeff.is_none() {
                return match cur.peek() {
                    Some(c) => Err(ParseError::UnexpectedChar(c as char, cur.pos)),
                    None => Err(if any {
                        ParseError::UnexpectedEnd
                    } else {
                        ParseError::Empty
                    }),
                };
            }
            0
        };

        out.set_coeff(mask, out.coeff(mask) + term);
        any = true;
    }

    if !any {
        return Err(ParseError::Empty);
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    blade: Vec<usize>,
    re: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    im: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// JSON form: `{"sig":[p,q,r],"terms":[{"blade":[i...],"re":x,"im":y}]}`,
/// blade entries being display labels in ascending order.
#[derive(Serialize, Deserialize)]
struct JsonMultivector {
    sig: [usize; 3],
    terms: Vec<JsonTerm>,
}

pub fn to_json(mv: &Multivector) -> serde_json::Value {
    let sig = mv.sig();
    let mut terms: Vec<JsonTerm> = Vec::new();
    let mut masks: Vec<usize> = mv.terms().map(|(m, _)| m).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let c = mv.coeff(mask);
        let blade = (0..sig.dim())
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| sig.label_of_bit(b))
            .collect();
        terms.push(JsonTerm {
            blade,
            re: c.re,
            im: c.im,
        });
    }
    serde_json::to_value(JsonMultivector {
        sig: [sig.p(), sig.q(), sig.r()],
        terms,
    })
    .expect("serializable")
}

pub fn from_json(value: &serde_json::Value) -> Result<Multivector, ParseError> {
    let parsed: JsonMultivector =
        serde_json::from_value(value.clone()).map_err(|e| ParseError::Json(e.to_string()))?;
    let sig = Signature::new(parsed.sig[0], parsed.sig[1], parsed.sig[2])
        .map_err(|e| ParseError::Json(e.to_string()))?;
    let mut out = Multivector::zero(sig);
    for term in parsed.terms {
        let mut mask = 0usize;
        let mut sign = 1.0;
        for &label in &term.blade {
            let bit = sig
                .bit_of_label(label)
                .map_err(|_| ParseError::IndexOutOfRange(label, sig.to_string()))?;
            if mask & (1 << bit) != 0 {
                return Err(ParseError::DuplicateIndex(label));
            }
            if (mask >> (bit + 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            mask |= 1 << bit;
        }
        let c = Complex64::new(term.re, term.im) * sign;
        out.set_coeff(mask, out.coeff(mask) + c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(d: usize) -> Signature {
        Signature::euclidean(d).unwrap()
    }

    #[test]
    fn grammar_examples() {
        let sig = cl(4);
        let mv = parse_multivector("2.5 + 3e12 - e134", sig).unwrap();
        assert_eq!(mv.coeff(0), Complex64::new(2.5, 0.0));
        assert_eq!(mv.coeff(0b0011), Complex64::new(3.0, 0.0));
        assert_eq!(mv.coeff(0b1101), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn complex_coefficient() {
        let sig = cl(2);
        let mv = parse_multivector("(1+2i)e12", sig).unwrap();
        assert_eq!(mv.coeff(0b11), Complex64::new(1.0, 2.0));
        assert_eq!(mv.field(), Field::Complex);
    }

    #[test]
    fn swapped_indices_normalize() {
        let sig = cl(2);
        let mv = parse_multivector("e21", sig).unwrap();
        assert_eq!(mv.coeff(0b11), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn rejects_bad_blades() {
        let sig = cl(2);
        assert_eq!(
            parse_multivector("e99", sig),
            Err(ParseError::IndexOutOfRange(9, "Cl(2,0)".into()))
        );
        assert_eq!(
            parse_multivector("e3", sig),
            Err(ParseError::IndexOutOfRange(3, "Cl(2,0)".into()))
        );
        assert!(parse_multivector("e11", sig).is_err());
        assert!(parse_multivector("", sig).is_err());
        assert!(parse_multivector("2 +", sig).is_err());
    }

    #[test]
    fn degenerate_labels() {
        let sig = Signature::new(2, 0, 1).unwrap();
        let mv = parse_multivector("e01", sig).unwrap();
        assert_eq!(mv.coeff(0b011), Complex64::new(1.0, 0.0));
        // no degenerate vector in a plain Euclidean algebra
        assert!(parse_multivector("e0", cl(2)).is_err());
    }

    #[test]
    fn format_round_trip() {
        let sig = cl(3);
        let mv = parse_multivector("1.5 - 2e12 + (0.25-1i)e123 + e3", sig).unwrap();
        let text = format_multivector(&mv);
        let back = parse_multivector(&text, sig).unwrap();
        assert_eq!(mv, back);
    }

    #[test]
    fn format_avoids_exponent_notation() {
        assert_eq!(format_f64(1e-15), "0.000000000000001");
        assert_eq!(format_f64(-2.5e3), "-2500");
        assert_eq!(format_f64(1.25e2), "125");
        assert_eq!(format_f64(0.5), "0.5");
        let x = 3.1e-12;
        assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn json_round_trip() {
        let sig = Signature::new(3, 0, 1).unwrap();
        let mv = parse_multivector("2e0 + (1+1i)e123 - 0.5", sig).unwrap();
        let json = to_json(&mv);
        let back = from_json(&json).unwrap();
        assert_eq!(mv, back);
        assert_eq!(json["sig"], serde_json::json!([3, 0, 1]));
    }
}
