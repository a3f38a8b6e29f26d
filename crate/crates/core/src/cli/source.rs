//! Named state sources: `ghz:N[:levels]`, `w:N`, `w3`, `dicke:j1,j2,…`,
//! `perm:N`, `wcomp:n:a,b,c`, or a dump file (`file:PATH` or a bare path).

use std::path::Path;

use crate::error::{Error, Result};
use crate::permanent::permanent_tensor;
use crate::slocc::{build_component_w, ComponentLabel};
use crate::states::{build_dicke, build_ghz, build_w, parse_state, AnyState, DickeSpec, Limits};

fn num(s: &str, what: &str) -> Result<u32> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: expected a natural number, got {s:?}")))
}

pub fn load_state(src: &str, limits: &Limits) -> Result<AnyState> {
    let (kind, rest) = src.split_once(':').unwrap_or((src, ""));
    let state = match kind {
        "w3" if rest.is_empty() => build_w(3)?,
        "w" => build_w(num(rest, "w:N")?)?,
        "ghz" => {
            let mut it = rest.split(':');
            let parties = num(it.next().unwrap_or_default(), "ghz:N")?;
            let levels = it.next().map(|l| num(l, "ghz levels")).transpose()?.unwrap_or(2);
            build_ghz(parties, levels)?
        }
        "dicke" => build_dicke(&rest.parse::<DickeSpec>()?, limits)?,
        "perm" => permanent_tensor(num(rest, "perm:N")?)?,
        "wcomp" => {
            let (n, parts) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse("expected wcomp:n:a,b,c".into()))?;
            let n = num(n, "wcomp n")?;
            let label = ComponentLabel::new(
                parts.split(',').map(|p| num(p, "wcomp weight")).collect::<Result<_>>()?,
                n,
            )?;
            build_component_w(n, &label, limits)?
        }
        "file" => return read_file(Path::new(rest)),
        _ if Path::new(src).exists() => return read_file(Path::new(src)),
        _ => {
            return Err(Error::Parse(format!(
                "unknown state {src:?}; use ghz:N[:levels], w:N, w3, dicke:j1,j2,..., perm:N, wcomp:n:a,b,c or a dump file"
            )))
        }
    };
    Ok(AnyState::Integer(state))
}

fn read_file(path: &Path) -> Result<AnyState> {
    let text = std::fs::read_to_string(path)?;
    parse_state(&text)
}
