//! Text forms of polynomials, points and viewports.

use realshadow_core::{Complex, Polynomial};

use crate::error::ParseError;
use crate::raster::Viewport;

const MAX_DEGREE: usize = 64;

/// Parses either a JSON array of `[re, im]` pairs in ascending order, or a
/// sum of terms such as `z^2 - 2`, `4z^2 + 4z`, `i z^3 - 1`, `0.5*z^2`.
///
/// A term is an optional real coefficient, an optional `i`, and an optional
/// `z` or `z^k`; repeated powers are added.
pub fn parse_polynomial(s: &str) -> Result<Polynomial, ParseError> {
    let coeffs = if s.trim_start().starts_with('[') {
        let pairs: Vec<[f64; 2]> =
            serde_json::from_str(s).map_err(|e| ParseError::new("polynomial", s, e.to_string()))?;
        pairs.iter().map(|&[re, im]| Complex::new(re, im)).collect()
    } else {
        parse_terms(s).map_err(|m| ParseError::new("polynomial", s, m))?
    };
    Polynomial::new(coeffs).map_err(|e| ParseError::new("polynomial", s, e.to_string()))
}

fn parse_terms(s: &str) -> Result<Vec<Complex>, String> {
    let digit = |c: char| c.is_ascii_digit() || c == '.';
    let words: Vec<&str> = s.split_whitespace().collect();
    if words.windows(2).any(|w| w[0].ends_with(digit) && w[1].starts_with(digit)) {
        return Err("numbers separated only by whitespace".into());
    }
    let chars: Vec<char> = words.concat().chars().collect();
    if chars.is_empty() {
        return Err("empty input".into());
    }
    let mut coeffs = vec![Complex::new(0.0, 0.0); MAX_DEGREE + 1];
    let mut i = 0;
    while i < chars.len() {
        let sign = match chars[i] {
            '+' => {
                i += 1;
                1.0
            }
            '-' => {
                i += 1;
                -1.0
            }
            _ if i == 0 => 1.0,
            c => return Err(format!("expected '+' or '-' before {c:?}")),
        };
        let start = i;
        while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
            i += 1;
        }
        if i > start && i < chars.len() && matches!(chars[i], 'e' | 'E') {
            let mut j = i + 1;
            if j < chars.len() && matches!(chars[j], '+' | '-') {
                j += 1;
            }
            if j < chars.len() && chars[j].is_ascii_digit() {
                i = j;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
        }
        let number: Option<f64> = if i > start {
            let text: String = chars[start..i].iter().collect();
            Some(text.parse().map_err(|_| format!("bad number {text:?}"))?)
        } else {
            None
        };
        let imaginary = i < chars.len() && chars[i] == 'i';
        if imaginary {
            i += 1;
        }
        let starred = i < chars.len() && chars[i] == '*';
        if starred {
            if number.is_none() && !imaginary {
                return Err("expected a coefficient before '*'".into());
            }
            i += 1;
        }
        let mut power = 0;
        if i < chars.len() && chars[i] == 'z' {
            i += 1;
            power = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let from = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[from..i].iter().collect();
                power = text.parse().map_err(|_| "expected an exponent after '^'".to_string())?;
            }
        } else if starred {
            return Err("expected 'z' after '*'".into());
        } else if number.is_none() && !imaginary {
            return Err(format!("expected a term at position {i}"));
        }
        if power > MAX_DEGREE {
            return Err(format!("degree above {MAX_DEGREE}"));
        }
        let value = sign * number.unwrap_or(1.0);
        coeffs[power] += if imaginary { Complex::new(0.0, value) } else { Complex::new(value, 0.0) };
    }
    Ok(coeffs)
}

/// `re,im`.
pub fn parse_point(s: &str) -> Result<Complex, ParseError> {
    let values = parse_list(s).map_err(|m| ParseError::new("point", s, m))?;
    match values[..] {
        [re, im] => Ok(Complex::new(re, im)),
        _ => Err(ParseError::new("point", s, "expected two numbers re,im")),
    }
}

/// `x0,x1,y0,y1,W,H`.
pub fn parse_viewport(s: &str) -> Result<Viewport, ParseError> {
    let v = parse_list(s).map_err(|m| ParseError::new("viewport", s, m))?;
    let [x0, x1, y0, y1, w, h] = v[..] else {
        return Err(ParseError::new("viewport", s, "expected x0,x1,y0,y1,W,H"));
    };
    let pixels = |n: f64| (n.fract() == 0.0 && (1.0..=16384.0).contains(&n)).then_some(n as usize);
    let (Some(width), Some(height)) = (pixels(w), pixels(h)) else {
        return Err(ParseError::new("viewport", s, "W and H must be integers in 1..=16384"));
    };
    if !(x0 < x1 && y0 < y1) {
        return Err(ParseError::new("viewport", s, "need x0 < x1 and y0 < y1"));
    }
    Ok(Viewport { x0, x1, y0, y1, width, height })
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let v: f64 = t.trim().parse().map_err(|_| format!("bad number {:?}", t.trim()))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err("numbers must be finite".to_string())
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(s: &str) -> Vec<Complex> {
        parse_polynomial(s).unwrap().coeffs().to_vec()
    }

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn human_forms() {
        assert_eq!(coeffs("1 z^2 - 2"), vec![c(-2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(coeffs("z^2"), vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(coeffs("4z^2+4z"), vec![c(0.0, 0.0), c(4.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(coeffs("i z^3 - 1"), vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(coeffs("-iz^2 + 10i"), vec![c(0.0, 10.0), c(0.0, 0.0), c(0.0, -1.0)]);
        assert_eq!(coeffs("0.5*z^2 + 1e-3z + z"), vec![c(0.0, 0.0), c(1.001, 0.0), c(0.5, 0.0)]);
        assert_eq!(coeffs("z^2 + z^2"), vec![c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn json_form() {
        assert_eq!(coeffs("[[0,10],[0,0],[0,-1]]"), vec![c(0.0, 10.0), c(0.0, 0.0), c(0.0, -1.0)]);
        assert!(parse_polynomial("[[0,10],[0,0]").is_err());
        assert!(parse_polynomial("[[1,0],[2,0]]").is_err());
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "z^", "2 z^2 3", "z^2 + * z", "q", "z^2 +", "z^100"] {
            assert!(parse_polynomial(s).is_err(), "{s:?}");
        }
    }

    #[test]
    fn points_and_viewports() {
        assert_eq!(parse_point("1, -2.5").unwrap(), c(1.0, -2.5));
        assert!(parse_point("1").is_err());
        let v = parse_viewport("-2,2,-1,1,40,20").unwrap();
        assert_eq!((v.width, v.height), (40, 20));
        for bad in ["-2,2,-1,1,40", "2,-2,-1,1,40,20", "-2,2,-1,1,0,20", "-2,2,-1,1,4.5,20", "a,2,-1,1,4,2"] {
            assert!(parse_viewport(bad).is_err(), "{bad}");
        }
    }
}
