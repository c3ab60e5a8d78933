//! Dense conditional probability tables over named finite alphabets.
//!
//! A [`CondTable`] stores `q(outputs | inputs)` as one flat vector of exact
//! rationals. Cells are linearized input-major: the row for input tuple `i`
//! occupies `entries[i * out_len .. (i + 1) * out_len]`, and tuples are
//! mixed-radix numbers with the first declared alphabet most significant.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Upper bound on the number of cells of any table. Guards parsing of
/// untrusted shapes.
pub const MAX_CELLS: usize = 1 << 22;

/// Symbol used by the one-symbol alphabet of an absent role.
pub const EMPTY_SYMBOL: &str = "-";

const RESERVED: [char; 3] = [',', '=', '|'];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    name: String,
    symbols: Vec<String>,
}

fn check_label(kind: &str, s: &str) -> Result<()> {
    if s.is_empty() || s.chars().any(|c| RESERVED.contains(&c) || c.is_control()) {
        return Err(Error::InvalidAlphabet(format!(
            "{kind} {s:?} is empty or contains one of , = |"
        )));
    }
    Ok(())
}

impl Alphabet {
    pub fn new<I, S>(name: impl Into<String>, symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name = name.into();
        check_label("name", &name)?;
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet(format!("{name:?} has no symbols")));
        }
        let mut seen = BTreeSet::new();
        for s in &symbols {
            check_label("symbol", s)?;
            if !seen.insert(s.as_str()) {
                return Err(Error::InvalidAlphabet(format!("{name:?} repeats symbol {s:?}")));
            }
        }
        Ok(Alphabet { name, symbols })
    }

    /// Symbols `"0" .. "n-1"`.
    pub fn range(name: &str, n: usize) -> Self {
        Alphabet::new(name, (0..n).map(|i| i.to_string())).expect("valid range alphabet")
    }

    pub fn bits(name: &str) -> Self {
        Alphabet::range(name, 2)
    }

    /// All bit strings of length `n`, e.g. `"00", "01", "10", "11"`. Symbol
    /// index `i` is the string whose big-endian value is `i`.
    pub fn bitstrings(name: &str, n: u32) -> Self {
        let syms = (0..1usize << n).map(|i| format!("{:0width$b}", i, width = n as usize));
        Alphabet::new(name, syms).expect("valid bitstring alphabet")
    }

    /// One-symbol alphabet standing in for an absent variable.
    pub fn unit(name: &str) -> Self {
        Alphabet::new(name, [EMPTY_SYMBOL]).expect("valid unit alphabet")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    pub fn renamed(&self, name: &str) -> Result<Self> {
        check_label("name", name)?;
        Ok(Alphabet {
            name: name.to_string(),
            symbols: self.symbols.clone(),
        })
    }

    pub fn same_symbols(&self, other: &Alphabet) -> bool {
        self.symbols == other.symbols
    }
}

/// Mixed-radix indexing of tuples over a list of alphabets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radix {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Radix {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        let mut strides = vec![0; sizes.len()];
        let mut len = 1usize;
        for (i, &s) in sizes.iter().enumerate().rev() {
            strides[i] = len;
            len = len
                .checked_mul(s)
                .filter(|&l| l <= MAX_CELLS)
                .ok_or_else(|| Error::ShapeMismatch(format!("tuple space {sizes:?} too large")))?;
        }
        Ok(Radix { sizes, strides, len })
    }

    fn of(alphabets: &[Alphabet]) -> Result<Self> {
        Radix::new(alphabets.iter().map(Alphabet::len).collect())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.sizes.len());
        tuple.iter().zip(&self.strides).map(|(t, s)| t * s).sum()
    }

    pub fn digit(&self, index: usize, pos: usize) -> usize {
        (index / self.strides[pos]) % self.sizes[pos]
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        (0..self.sizes.len()).map(|p| self.digit(index, p)).collect()
    }

    pub fn decode_into(&self, index: usize, out: &mut [usize]) {
        for (p, o) in out.iter_mut().enumerate() {
            *o = self.digit(index, p);
        }
    }

    /// Maps a full index to the index of the sub-tuple at `positions`
    /// (in the given order).
    pub fn projector(&self, positions: &[usize]) -> Projector {
        let sub = Radix::new(positions.iter().map(|&p| self.sizes[p]).collect())
            .expect("sub-tuple space is no larger than the full space");
        let parts = positions
            .iter()
            .enumerate()
            .map(|(k, &p)| (self.strides[p], self.sizes[p], sub.strides[k]))
            .collect();
        Projector { parts, target: sub }
    }
}

pub struct Projector {
    parts: Vec<(usize, usize, usize)>,
    target: Radix,
}

impl Projector {
    pub fn project(&self, index: usize) -> usize {
        self.parts
            .iter()
            .map(|&(stride, size, to)| ((index / stride) % size) * to)
            .sum()
    }

    pub fn target(&self) -> &Radix {
        &self.target
    }
}

/// A conditional distribution `q(outputs | inputs)`; an empty input list is an
/// unconditional distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondTable {
    outputs: Vec<Alphabet>,
    inputs: Vec<Alphabet>,
    out_radix: Radix,
    in_radix: Radix,
    entries: Vec<Rational>,
}

impl CondTable {
    /// Builds and validates a table from its flat entries.
    pub fn new(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, entries: Vec<Rational>) -> Result<Self> {
        let t = Self::unchecked(outputs, inputs, entries)?;
        t.validate()?;
        Ok(t)
    }

    fn unchecked(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, entries: Vec<Rational>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for a in outputs.iter().chain(&inputs) {
            if !names.insert(a.name()) {
                return Err(Error::NameCollision(a.name().to_string()));
            }
        }
        let out_radix = Radix::of(&outputs)?;
        let in_radix = Radix::of(&inputs)?;
        let cells = out_radix
            .len()
            .checked_mul(in_radix.len())
            .filter(|&c| c <= MAX_CELLS)
            .ok_or_else(|| Error::ShapeMismatch("table too large".into()))?;
        if entries.len() != cells {
            return Err(Error::ShapeMismatch(format!(
                "expected {cells} entries, got {}",
                entries.len()
            )));
        }
        Ok(CondTable {
            outputs,
            inputs,
            out_radix,
            in_radix,
            entries,
        })
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.input_len() {
            let row = self.row(i);
            if let Some(neg) = row.iter().find(|v| v.is_negative()) {
                return Err(Error::NotADistribution {
                    input: self.input_label(i),
                    reason: format!("negative entry {}", rational::Frac(neg)),
                });
            }
            let sum: Rational = row.iter().sum();
            if sum != rational::one() {
                return Err(Error::NotADistribution {
                    input: self.input_label(i),
                    reason: format!("entries sum to {}", rational::Frac(&sum)),
                });
            }
        }
        Ok(())
    }

    /// Builds a table cell by cell from `(output tuple, input tuple)`.
    pub fn from_fn<F>(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize], &[usize]) -> Rational,
    {
        let out_radix = Radix::of(&outputs)?;
        let in_radix = Radix::of(&inputs)?;
        let mut entries = Vec::with_capacity(out_radix.len() * in_radix.len());
        let mut o = vec![0; outputs.len()];
        let mut i = vec![0; inputs.len()];
        for ii in 0..in_radix.len() {
            in_radix.decode_into(ii, &mut i);
            for oi in 0..out_radix.len() {
                out_radix.decode_into(oi, &mut o);
                entries.push(f(&o, &i));
            }
        }
        Self::new(outputs, inputs, entries)
    }

    /// A conditional Dirac table: each input tuple maps to one output tuple.
    pub fn deterministic<F>(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Vec<usize>,
    {
        Self::from_fn(outputs, inputs, |o, i| {
            if f(i) == o {
                rational::one()
            } else {
                rational::zero()
            }
        })
    }

    pub fn uniform(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>) -> Result<Self> {
        let n = Radix::of(&outputs)?.len() as i64;
        Self::from_fn(outputs, inputs, |_, _| rational::ratio(1, n))
    }

    /// Unconditional Dirac distribution on the output tuple of the given symbols.
    pub fn dirac(outputs: Vec<Alphabet>, symbols: &[&str]) -> Result<Self> {
        let target = resolve_tuple(&outputs, symbols)?;
        Self::deterministic(outputs, vec![], |_| target.clone())
    }

    pub fn outputs(&self) -> &[Alphabet] {
        &self.outputs
    }

    pub fn inputs(&self) -> &[Alphabet] {
        &self.inputs
    }

    pub fn out_radix(&self) -> &Radix {
        &self.out_radix
    }

    pub fn in_radix(&self) -> &Radix {
        &self.in_radix
    }

    pub fn output_len(&self) -> usize {
        self.out_radix.len()
    }

    pub fn input_len(&self) -> usize {
        self.in_radix.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, input: usize) -> &[Rational] {
        let n = self.output_len();
        &self.entries[input * n..(input + 1) * n]
    }

    pub fn get(&self, output: usize, input: usize) -> &Rational {
        &self.entries[input * self.output_len() + output]
    }

    pub fn at(&self, output: &[usize], input: &[usize]) -> &Rational {
        self.get(self.out_radix.encode(output), self.in_radix.encode(input))
    }

    pub fn output_position(&self, name: &str) -> Result<usize> {
        self.outputs
            .iter()
            .position(|a| a.name() == name)
            .ok_or_else(|| Error::UnknownAlphabet(name.to_string()))
    }

    pub fn input_position(&self, name: &str) -> Result<usize> {
        self.inputs
            .iter()
            .position(|a| a.name() == name)
            .ok_or_else(|| Error::UnknownAlphabet(name.to_string()))
    }

    pub fn output_names(&self) -> Vec<&str> {
        self.outputs.iter().map(Alphabet::name).collect()
    }

    pub fn input_names(&self) -> Vec<&str> {
        self.inputs.iter().map(Alphabet::name).collect()
    }

    /// Index of the input tuple given by symbol labels, in input order.
    pub fn input_index(&self, symbols: &[&str]) -> Result<usize> {
        Ok(self.in_radix.encode(&resolve_tuple(&self.inputs, symbols)?))
    }

    pub fn output_index(&self, symbols: &[&str]) -> Result<usize> {
        Ok(self.out_radix.encode(&resolve_tuple(&self.outputs, symbols)?))
    }

    /// `a=0,b=1` style label of an input tuple.
    pub fn input_label(&self, input: usize) -> String {
        label(&self.inputs, &self.in_radix.decode(input))
    }

    pub fn output_label(&self, output: usize) -> String {
        label(&self.outputs, &self.out_radix.decode(output))
    }

    /// Sums out every output not named in `keep`; the kept outputs appear in
    /// the order given.
    pub fn marginal(&self, keep: &[&str]) -> Result<CondTable> {
        let positions = keep
            .iter()
            .map(|n| self.output_position(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.marginal_positions(&positions))
    }

    pub(crate) fn marginal_positions(&self, positions: &[usize]) -> CondTable {
        let proj = self.out_radix.projector(positions);
        let kept = proj.target().len();
        let mut entries = vec![rational::zero(); kept * self.input_len()];
        for i in 0..self.input_len() {
            for (o, v) in self.row(i).iter().enumerate() {
                if !v.is_zero() {
                    entries[i * kept + proj.project(o)] += v;
                }
            }
        }
        let outputs = positions.iter().map(|&p| self.outputs[p].clone()).collect();
        CondTable::unchecked(outputs, self.inputs.clone(), entries)
            .expect("marginal of a valid table has a valid shape")
    }

    /// Conditions on an assignment of symbols to some outputs. Input tuples at
    /// which the assignment has probability zero are reported as zero mass.
    pub fn condition(&self, on: &[(&str, &str)]) -> Result<Conditioned> {
        let mut fixed: Vec<(usize, usize)> = Vec::with_capacity(on.len());
        for (name, sym) in on {
            let p = self.output_position(name)?;
            let s = self.outputs[p].index_of(sym).ok_or_else(|| Error::UnknownSymbol {
                alphabet: name.to_string(),
                symbol: sym.to_string(),
            })?;
            if fixed.iter().any(|&(q, _)| q == p) {
                return Err(Error::NameCollision(name.to_string()));
            }
            fixed.push((p, s));
        }
        let rest: Vec<usize> = (0..self.outputs.len())
            .filter(|p| fixed.iter().all(|&(q, _)| q != *p))
            .collect();
        let proj = self.out_radix.projector(&rest);
        let rest_len = proj.target().len();
        let rows = (0..self.input_len())
            .map(|i| {
                let mut acc = vec![rational::zero(); rest_len];
                for (o, v) in self.row(i).iter().enumerate() {
                    if !v.is_zero() && fixed.iter().all(|&(p, s)| self.out_radix.digit(o, p) == s) {
                        acc[proj.project(o)] += v;
                    }
                }
                let mass: Rational = acc.iter().sum();
                if mass.is_zero() {
                    None
                } else {
                    Some(acc.into_iter().map(|v| v / &mass).collect())
                }
            })
            .collect();
        Ok(Conditioned {
            outputs: rest.iter().map(|&p| self.outputs[p].clone()).collect(),
            inputs: self.inputs.clone(),
            rows,
        })
    }

    /// Exact probability of an event at one input tuple.
    pub fn event_prob(&self, event: &Event, input: usize) -> Result<Rational> {
        if event.size != self.output_len() {
            return Err(Error::ShapeMismatch("event over a different output space".into()));
        }
        let row = self.row(input);
        Ok(event.members.iter().map(|&o| &row[o]).sum())
    }

    /// Statistical distance between `self` and `other` at the same input tuple.
    pub fn stat_distance(&self, other: &CondTable, input: usize) -> Result<Rational> {
        self.stat_distance_between(input, other, input)
    }

    /// Statistical distance between row `input` of `self` and row
    /// `other_input` of `other`; the output spaces must line up.
    pub fn stat_distance_between(&self, input: usize, other: &CondTable, other_input: usize) -> Result<Rational> {
        if self.out_radix.sizes() != other.out_radix.sizes()
            || self.outputs.iter().zip(&other.outputs).any(|(a, b)| !a.same_symbols(b))
        {
            return Err(Error::ShapeMismatch(
                "statistical distance needs identical output alphabets".into(),
            ));
        }
        if input >= self.input_len() || other_input >= other.input_len() {
            return Err(Error::ShapeMismatch("input index out of range".into()));
        }
        Ok(distance(self.row(input), other.row(other_input)))
    }

    /// Independent product. Inputs with the same name are identified (and
    /// must agree on their symbols); output names must be disjoint.
    pub fn product(&self, other: &CondTable) -> Result<CondTable> {
        for a in &other.outputs {
            if self.outputs.iter().chain(&self.inputs).any(|b| b.name() == a.name()) {
                return Err(Error::NameCollision(a.name().to_string()));
            }
        }
        for a in &self.outputs {
            if other.inputs.iter().any(|b| b.name() == a.name()) {
                return Err(Error::NameCollision(a.name().to_string()));
            }
        }
        let mut inputs = self.inputs.clone();
        let mut other_in_pos = Vec::with_capacity(other.inputs.len());
        for a in &other.inputs {
            match inputs.iter().position(|b| b.name() == a.name()) {
                Some(p) if inputs[p].same_symbols(a) => other_in_pos.push(p),
                Some(_) => {
                    return Err(Error::ShapeMismatch(format!(
                        "shared input {:?} has different symbols",
                        a.name()
                    )))
                }
                None => {
                    other_in_pos.push(inputs.len());
                    inputs.push(a.clone());
                }
            }
        }
        let left_outs = self.outputs.len();
        let left_ins = self.inputs.len();
        let outputs: Vec<Alphabet> = self.outputs.iter().chain(&other.outputs).cloned().collect();
        CondTable::from_fn(outputs, inputs, |o, i| {
            let oi: Vec<usize> = other_in_pos.iter().map(|&p| i[p]).collect();
            self.at(&o[..left_outs], &i[..left_ins]) * other.at(&o[left_outs..], &oi)
        })
    }

    /// Renames alphabets (outputs or inputs) according to `(old, new)` pairs.
    pub fn renamed(&self, map: &[(&str, &str)]) -> Result<CondTable> {
        for (old, _) in map {
            if !self.outputs.iter().chain(&self.inputs).any(|a| a.name() == *old) {
                return Err(Error::UnknownAlphabet(old.to_string()));
            }
        }
        let rename = |a: &Alphabet| -> Result<Alphabet> {
            match map.iter().find(|(old, _)| *old == a.name()) {
                Some((_, new)) => a.renamed(new),
                None => Ok(a.clone()),
            }
        };
        let outputs = self.outputs.iter().map(rename).collect::<Result<Vec<_>>>()?;
        let inputs = self.inputs.iter().map(rename).collect::<Result<Vec<_>>>()?;
        CondTable::unchecked(outputs, inputs, self.entries.clone())
    }

    /// Restricts to the rows where input `name` takes symbol index `symbol`,
    /// dropping that input.
    pub fn fix_input(&self, name: &str, symbol: usize) -> Result<CondTable> {
        let p = self.input_position(name)?;
        if symbol >= self.inputs[p].len() {
            return Err(Error::UnknownSymbol {
                alphabet: name.to_string(),
                symbol: symbol.to_string(),
            });
        }
        let mut inputs = self.inputs.clone();
        inputs.remove(p);
        let n = self.output_len();
        let mut entries = Vec::new();
        for i in 0..self.input_len() {
            if self.in_radix.digit(i, p) == symbol {
                entries.extend_from_slice(self.row(i));
            }
        }
        debug_assert_eq!(entries.len(), n * self.input_len() / self.inputs[p].len());
        CondTable::unchecked(self.outputs.clone(), inputs, entries)
    }

    /// Iterates over the nonzero cells as `(input, output, value)`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        let n = self.output_len();
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(k, v)| (k / n, k % n, v))
    }
}

/// Statistical distance of two probability vectors over the same index set.
pub fn distance(p: &[Rational], q: &[Rational]) -> Rational {
    let total: Rational = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    total / rational::int(2)
}

fn resolve_tuple(alphabets: &[Alphabet], symbols: &[&str]) -> Result<Vec<usize>> {
    if alphabets.len() != symbols.len() {
        return Err(Error::Arity {
            expected: format!("{} symbols", alphabets.len()),
            got: format!("{}", symbols.len()),
        });
    }
    alphabets
        .iter()
        .zip(symbols)
        .map(|(a, s)| {
            a.index_of(s).ok_or_else(|| Error::UnknownSymbol {
                alphabet: a.name().to_string(),
                symbol: s.to_string(),
            })
        })
        .collect()
}

pub(crate) fn label(alphabets: &[Alphabet], tuple: &[usize]) -> String {
    alphabets
        .iter()
        .zip(tuple)
        .map(|(a, &s)| format!("{}={}", a.name(), a.symbols()[s]))
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for CondTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o, v) in self.nonzero() {
            let inp = self.input_label(i);
            writeln!(f, "{}|{} = {}", self.output_label(o), inp, rational::Frac(v))?;
        }
        Ok(())
    }
}

/// Result of [`CondTable::condition`]: one conditional row per input tuple,
/// or `None` where the conditioning event has zero mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conditioned {
    outputs: Vec<Alphabet>,
    inputs: Vec<Alphabet>,
    rows: Vec<Option<Vec<Rational>>>,
}

impl Conditioned {
    pub fn outputs(&self) -> &[Alphabet] {
        &self.outputs
    }

    pub fn inputs(&self) -> &[Alphabet] {
        &self.inputs
    }

    pub fn row(&self, input: usize) -> Option<&[Rational]> {
        self.rows[input].as_deref()
    }

    pub fn is_zero_mass(&self, input: usize) -> bool {
        self.rows[input].is_none()
    }

    pub fn zero_mass_inputs(&self) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| self.is_zero_mass(i)).collect()
    }

    /// The conditional table, if no input tuple has zero mass.
    pub fn into_table(self) -> Result<CondTable> {
        if let Some(i) = self.zero_mass_inputs().first() {
            let radix = Radix::of(&self.inputs)?;
            return Err(Error::ZeroMass {
                input: label(&self.inputs, &radix.decode(*i)),
            });
        }
        let entries = self.rows.into_iter().flatten().flatten().collect();
        CondTable::new(self.outputs, self.inputs, entries)
    }
}

/// An event: a set of output tuples of some table shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    size: usize,
    members: BTreeSet<usize>,
}

impl Event {
    pub fn from_predicate<F>(table: &CondTable, mut pred: F) -> Event
    where
        F: FnMut(&[usize]) -> bool,
    {
        let r = table.out_radix();
        let members = (0..r.len()).filter(|&o| pred(&r.decode(o))).collect();
        Event { size: r.len(), members }
    }

    pub fn full(table: &CondTable) -> Event {
        Event::from_predicate(table, |_| true)
    }

    pub fn empty(table: &CondTable) -> Event {
        Event::from_predicate(table, |_| false)
    }

    pub fn union(&self, other: &Event) -> Event {
        Event {
            size: self.size,
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn intersection(&self, other: &Event) -> Event {
        Event {
            size: self.size,
            members: self.members.intersection(&other.members).copied().collect(),
        }
    }

    pub fn contains(&self, output: usize) -> bool {
        self.members.contains(&output)
    }
}

/// Random table with integer weights drawn from `[0, 16]` per cell and
/// normalized per input tuple. An all-zero row is redrawn.
pub fn random_table<R: Rng>(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, rng: &mut R) -> Result<CondTable> {
    let n = Radix::of(&outputs)?.len();
    let m = Radix::of(&inputs)?.len();
    let mut entries = Vec::with_capacity(n * m);
    for _ in 0..m {
        let weights = loop {
            let w: Vec<i64> = (0..n).map(|_| rng.random_range(0..=16)).collect();
            if w.iter().any(|&x| x > 0) {
                break w;
            }
        };
        let total: i64 = weights.iter().sum();
        entries.extend(weights.into_iter().map(|x| rational::ratio(x, total)));
    }
    CondTable::new(outputs, inputs, entries)
}
