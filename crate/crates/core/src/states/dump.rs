//! Line-oriented sparse dump:
//!
//! ```text
//! # parties=3 local_dims=2,2,2 spaces=2^1+0,2^1+0,2^1+0 backend=exact-integer
//! 0,0,1\t1/1
//! 0,1,0\t1/1
//! ```
//!
//! One line per stored entry in canonical order: comma-joined party labels,
//! a tab, the real part, and a second tab plus imaginary part only when it is
//! nonzero. Exact values are written `p/q`.

use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::BigRational;

use super::amplitude::{Amplitude, Backend};
use super::space::LocalSpace;
use super::state::{render_spaces, MultiIndex, PureState};
use crate::error::{Error, Result};

pub fn write_state<T: Amplitude>(state: &PureState<T>) -> String {
    let mut out = String::new();
    let dims: Vec<String> = state.local_dims().iter().map(|d| d.to_string()).collect();
    let _ = writeln!(
        out,
        "# parties={} local_dims={} spaces={} backend={}",
        state.num_parties(),
        dims.join(","),
        render_spaces(state.spaces()),
        T::BACKEND.name()
    );
    for (idx, amp) in state.iter() {
        let (re, im) = amp.render();
        let _ = match im {
            Some(im) => writeln!(out, "{}\t{re}\t{im}", idx.render(state.spaces())),
            None => writeln!(out, "{}\t{re}", idx.render(state.spaces())),
        };
    }
    out
}

/// A parsed dump in whichever backend its header names.
#[derive(Debug, Clone)]
pub enum AnyState {
    Integer(PureState<i64>),
    Rational(PureState<BigRational>),
    Complex(PureState<Complex64>),
}

struct Header {
    spaces: Vec<LocalSpace>,
    backend: Backend,
}

fn parse_header(line: &str) -> Result<Header> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("dump must start with a '#' header line".into()))?;
    let mut parties = None;
    let mut spaces = None;
    let mut dims = None;
    let mut backend = Backend::ExactInteger;
    for field in body.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
        match k {
            "parties" => parties = Some(v.parse::<usize>().map_err(|_| Error::Parse(format!("bad parties {v:?}")))?),
            "local_dims" => {
                dims = Some(
                    v.split(',')
                        .map(|d| d.parse::<u64>().map_err(|_| Error::Parse(format!("bad dim {d:?}"))))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            "spaces" => spaces = Some(v.split(',').map(str::parse).collect::<Result<Vec<LocalSpace>>>()?),
            "backend" => {
                backend = match v {
                    "exact-integer" => Backend::ExactInteger,
                    "exact-rational" => Backend::ExactRational,
                    "complex-float" => Backend::ComplexFloat,
                    _ => return Err(Error::Parse(format!("unknown backend {v:?}"))),
                }
            }
            _ => {}
        }
    }
    let parties = parties.ok_or_else(|| Error::Parse("header lacks parties=".into()))?;
    let dims = dims.ok_or_else(|| Error::Parse("header lacks local_dims=".into()))?;
    if dims.len() != parties {
        return Err(Error::Parse("local_dims length differs from parties".into()));
    }
    // Without explicit spaces, each party is a single symbol 0..dim-1.
    let spaces = match spaces {
        Some(s) => s,
        None => dims
            .iter()
            .map(|&d| {
                u32::try_from(d)
                    .map_err(|_| Error::Parse(format!("dimension {d} too large")))
                    .and_then(|d| LocalSpace::new(d, 1, 0))
            })
            .collect::<Result<_>>()?,
    };
    if spaces.len() != parties || spaces.iter().zip(&dims).any(|(s, &d)| s.dim() != d) {
        return Err(Error::Parse("spaces disagree with local_dims".into()));
    }
    Ok(Header { spaces, backend })
}

fn parse_body<T: Amplitude>(spaces: Vec<LocalSpace>, lines: &[&str]) -> Result<PureState<T>> {
    let mut terms = Vec::new();
    for line in lines {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t');
        let idx = cols.next().unwrap_or_default();
        let re = cols
            .next()
            .ok_or_else(|| Error::Parse(format!("line {line:?} lacks an amplitude")))?;
        let im = cols.next();
        let labels: Vec<&str> = idx.split(',').collect();
        if labels.len() != spaces.len() {
            return Err(Error::Parse(format!("line {line:?} has the wrong party count")));
        }
        let idx = labels
            .iter()
            .zip(&spaces)
            .map(|(l, s)| s.parse_label(l.trim()))
            .collect::<Result<Vec<_>>>()?;
        terms.push((MultiIndex(idx), T::parse(re, im)?));
    }
    PureState::from_terms(spaces, terms)
}

pub fn parse_state(text: &str) -> Result<AnyState> {
    let lines: Vec<&str> = text.lines().collect();
    let (first, rest) = lines
        .split_first()
        .ok_or_else(|| Error::Parse("empty dump".into()))?;
    let header = parse_header(first)?;
    Ok(match header.backend {
        Backend::ExactInteger => AnyState::Integer(parse_body(header.spaces, rest)?),
        Backend::ExactRational => AnyState::Rational(parse_body(header.spaces, rest)?),
        Backend::ComplexFloat => AnyState::Complex(parse_body(header.spaces, rest)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_dicke, build_w, DickeSpec, Limits};

    #[test]
    fn w3_dump_is_canonical() {
        let text = write_state(&build_w(3).unwrap());
        assert_eq!(
            text,
            "# parties=3 local_dims=2,2,2 spaces=2^1+0,2^1+0,2^1+0 backend=exact-integer\n\
             0,0,1\t1/1\n0,1,0\t1/1\n1,0,0\t1/1\n"
        );
    }

    #[test]
    fn dump_parses_back() {
        let d = build_dicke(&DickeSpec::new(vec![2, 1, 1]).unwrap(), &Limits::default()).unwrap();
        let sq = d.tensor_power(2, &Limits::default()).unwrap();
        match parse_state(&write_state(&sq)).unwrap() {
            AnyState::Integer(s) => assert_eq!(s, sq),
            other => panic!("wrong backend {other:?}"),
        }
    }

    #[test]
    fn complex_entries_keep_imaginary_column() {
        let s = PureState::from_terms(
            vec![LocalSpace::bits(1)],
            [(MultiIndex(vec![1]), Complex64::new(0.5, -2.0))],
        )
        .unwrap();
        let text = write_state(&s);
        assert!(text.lines().nth(1).unwrap().split('\t').count() == 3);
        match parse_state(&text).unwrap() {
            AnyState::Complex(p) => assert_eq!(p, s),
            other => panic!("wrong backend {other:?}"),
        }
    }

    #[test]
    fn header_without_spaces_defaults_to_levels() {
        let s = parse_state("# parties=2 local_dims=3,3\n0,2\t1\n1,1\t-2/1\n").unwrap();
        let AnyState::Integer(s) = s else { panic!() };
        assert_eq!(s.len(), 2);
        assert_eq!(s.get(&MultiIndex(vec![1, 1])), Some(&-2));
    }

    #[test]
    fn malformed_dumps_rejected() {
        assert!(parse_state("").is_err());
        assert!(parse_state("0,0\t1\n").is_err());
        assert!(parse_state("# parties=2 local_dims=2,2\n0\t1\n").is_err());
        assert!(parse_state("# parties=2 local_dims=2,2\n0,5\t1\n").is_err());
    }
}
