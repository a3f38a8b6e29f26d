use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::states::{Accumulator, Amplitude, Limits, LocalSpace, MultiIndex, PureState};

/// Sparse linear map from one party's `in_space` to `out_space`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator<T> {
    in_space: LocalSpace,
    out_space: LocalSpace,
    entries: BTreeMap<(u64, u64), T>,
}

impl<T: Amplitude> LocalOperator<T> {
    pub fn new(out_space: LocalSpace, in_space: LocalSpace) -> Self {
        LocalOperator {
            in_space,
            out_space,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries<I>(out_space: LocalSpace, in_space: LocalSpace, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((u64, u64), T)>,
    {
        let mut op = LocalOperator::new(out_space, in_space);
        for ((r, c), v) in entries {
            op.add(r, c, &v)?;
        }
        Ok(op)
    }

    pub fn rows(&self) -> u64 {
        self.out_space.dim()
    }

    pub fn cols(&self) -> u64 {
        self.in_space.dim()
    }

    pub fn in_space(&self) -> LocalSpace {
        self.in_space
    }

    pub fn out_space(&self) -> LocalSpace {
        self.out_space
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: u64, col: u64) -> Option<&T> {
        self.entries.get(&(row, col))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u64, u64), &T)> {
        self.entries.iter()
    }

    /// Accumulates `v` into entry `(row, col)`; an entry that cancels to zero
    /// is removed.
    pub fn add(&mut self, row: u64, col: u64, v: &T) -> Result<()> {
        if row >= self.rows() || col >= self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "entry ({row}, {col}) outside a {}x{} operator",
                self.rows(),
                self.cols()
            )));
        }
        let new = match self.entries.get(&(row, col)) {
            Some(old) => old.try_add(v)?,
            None => v.clone(),
        };
        if new.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), new);
        }
        Ok(())
    }

    /// Overwrites entry `(row, col)`; zero removes it.
    pub fn set(&mut self, row: u64, col: u64, v: T) {
        if v.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), v);
        }
    }

    /// Nonzero entries of column `col` as `(row, value)`.
    pub fn column(&self, col: u64) -> Vec<(u64, T)> {
        self.entries
            .iter()
            .filter(|((_, c), _)| *c == col)
            .map(|(&(r, _), v)| (r, v.clone()))
            .collect()
    }

    fn columns(&self) -> HashMap<u64, Vec<(u64, T)>> {
        let mut cols: HashMap<u64, Vec<(u64, T)>> = HashMap::new();
        for (&(r, c), v) in &self.entries {
            cols.entry(c).or_default().push((r, v.clone()));
        }
        cols
    }

    /// `row TAB col TAB value` lines after a header, canonical order.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "# rows={} cols={} out_space={} in_space={} backend={}\n",
            self.rows(),
            self.cols(),
            self.out_space,
            self.in_space,
            T::BACKEND.name()
        );
        for (&(r, c), v) in &self.entries {
            let (re, im) = v.render();
            let _ = write!(
                out,
                "{}\t{}\t{re}",
                self.out_space.render(r),
                self.in_space.render(c)
            );
            if let Some(im) = im {
                let _ = write!(out, "\t{im}");
            }
            out.push('\n');
        }
        out
    }
}

/// `(op_1 ⊗ … ⊗ op_N) |state⟩`, accumulated sparsely: each stored entry
/// contributes the product of the matching operator columns.
pub fn apply_local<T: Amplitude>(
    ops: &[LocalOperator<T>],
    state: &PureState<T>,
    limits: &Limits,
) -> Result<PureState<T>> {
    if ops.len() != state.num_parties() {
        return Err(Error::DimensionMismatch(format!(
            "{} operators for a {}-party state",
            ops.len(),
            state.num_parties()
        )));
    }
    for (p, (op, space)) in ops.iter().zip(state.spaces()).enumerate() {
        if op.cols() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator {p} has {} columns but party {p} has dimension {}",
                op.cols(),
                space.dim()
            )));
        }
    }
    let columns: Vec<_> = ops.iter().map(LocalOperator::columns).collect();
    let mut acc = Accumulator::new(ops.len());
    let empty = Vec::new();
    for (idx, amp) in state.iter() {
        let cols: Vec<&Vec<(u64, T)>> = idx
            .parties()
            .iter()
            .zip(&columns)
            .map(|(c, by_col)| by_col.get(c).unwrap_or(&empty))
            .collect();
        if cols.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut partial: Vec<(Vec<u64>, T)> = vec![(Vec::with_capacity(ops.len()), amp.clone())];
        for col in cols {
            let mut next = Vec::with_capacity(partial.len() * col.len());
            for (prefix, v) in &partial {
                for (r, w) in col {
                    let mut k = prefix.clone();
                    k.push(*r);
                    next.push((k, v.try_mul(w)?));
                }
            }
            partial = next;
        }
        for (k, v) in partial {
            acc.add(MultiIndex(k), &v)?;
        }
        limits.check_entries("operator application", acc.len() as u128)?;
    }
    let spaces = ops.iter().map(LocalOperator::out_space).collect();
    Ok(acc.into_state(spaces))
}
