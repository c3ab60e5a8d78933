//! Commitment schemes as explicit tables, their honest-execution metrics, the
//! binding-game value of a strategy, and the built-in constructions.
//!
//! A two-prover scheme has questions `p(a, a')`, honest tables
//! `p_b(x, x', y, y' | a, a')` and an acceptance table
//! `Acc(x, x', y, y' | a, a', b)`. A simple scheme is the special case where
//! `a'`, `x'` and `y` are one-symbol alphabets. A three-prover scheme has
//! questions `p(a)`, honest tables `p_b(x, y, z | a)` and
//! `Acc(x, y, z | a, b)`.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::attacks::{AttackStrategy, StrategyKind};
use crate::error::{Error, Result};
use crate::json::{key, parse_assignment};
use crate::nonsig::{self, ConstraintId, Family, NsReport};
use crate::rational::{self, Rational};
use crate::table::{self, Alphabet, CondTable, Radix};

pub const X: &str = "x";
pub const XP: &str = "x'";
pub const Y: &str = "y";
pub const YP: &str = "y'";
pub const Z: &str = "z";
pub const A: &str = "a";
pub const AP: &str = "a'";
pub const B: &str = "b";
pub const C: &str = "c";
pub const BP: &str = "b'";
/// Symbol sent by the committer when it does not reveal the bit.
pub const BOT: &str = "⊥";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provers {
    Two,
    Three,
}

impl Provers {
    pub fn count(self) -> u8 {
        match self {
            Provers::Two => 2,
            Provers::Three => 3,
        }
    }

    pub fn output_names(self) -> &'static [&'static str] {
        match self {
            Provers::Two => &[X, XP, Y, YP],
            Provers::Three => &[X, Y, Z],
        }
    }

    pub fn question_names(self) -> &'static [&'static str] {
        match self {
            Provers::Two => &[A, AP],
            Provers::Three => &[A],
        }
    }

    /// Positions of the commit-phase outputs.
    pub fn commit_positions(self) -> &'static [usize] {
        match self {
            Provers::Two => &[0, 1],
            Provers::Three => &[0],
        }
    }
}

/// Boolean table `Acc(outputs | questions, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcceptTable {
    outputs: Vec<Alphabet>,
    inputs: Vec<Alphabet>,
    out_radix: Radix,
    in_radix: Radix,
    cells: Vec<bool>,
}

impl AcceptTable {
    pub fn from_fn<F>(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize], &[usize]) -> bool,
    {
        let out_radix = Radix::new(outputs.iter().map(Alphabet::len).collect())?;
        let in_radix = Radix::new(inputs.iter().map(Alphabet::len).collect())?;
        let cells = out_radix
            .len()
            .checked_mul(in_radix.len())
            .filter(|&c| c <= table::MAX_CELLS)
            .ok_or_else(|| Error::ShapeMismatch("accept table too large".into()))?;
        let mut v = Vec::with_capacity(cells);
        for i in 0..in_radix.len() {
            let it = in_radix.decode(i);
            for o in 0..out_radix.len() {
                v.push(f(&out_radix.decode(o), &it));
            }
        }
        Ok(AcceptTable {
            outputs,
            inputs,
            out_radix,
            in_radix,
            cells: v,
        })
    }

    pub fn outputs(&self) -> &[Alphabet] {
        &self.outputs
    }

    pub fn inputs(&self) -> &[Alphabet] {
        &self.inputs
    }

    pub fn get(&self, output: usize, input: usize) -> bool {
        self.cells[input * self.out_radix.len() + output]
    }

    /// Input index for question index `question` and bit `b`.
    pub fn input_index(&self, question: usize, b: usize) -> usize {
        question * 2 + b
    }

    pub fn accepted(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    fn keys(&self) -> Vec<String> {
        let mut keys = Vec::new();
        for i in 0..self.in_radix.len() {
            let it = self.in_radix.decode(i);
            for o in 0..self.out_radix.len() {
                if self.get(o, i) {
                    keys.push(key(&self.outputs, &self.out_radix.decode(o), &self.inputs, &it));
                }
            }
        }
        keys
    }

    fn from_keys(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, keys: &[String]) -> Result<Self> {
        let mut t = AcceptTable::from_fn(outputs, inputs, |_, _| false)?;
        for k in keys {
            let (out_side, in_side) = k
                .split_once('|')
                .ok_or_else(|| Error::Json(format!("accept key {k:?} lacks '|'")))?;
            let o = t.out_radix.encode(&parse_assignment(out_side, &t.outputs)?);
            let i = t.in_radix.encode(&parse_assignment(in_side, &t.inputs)?);
            let cell = &mut t.cells[i * t.out_radix.len() + o];
            if *cell {
                return Err(Error::Json(format!("accept key {k:?} given twice")));
            }
            *cell = true;
        }
        Ok(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitmentScheme {
    provers: Provers,
    questions: CondTable,
    honest: [CondTable; 2],
    accept: AcceptTable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeMetrics {
    #[serde(with = "rational::serde_frac")]
    pub soundness_0: Rational,
    #[serde(with = "rational::serde_frac")]
    pub soundness_1: Rational,
    #[serde(with = "rational::serde_frac")]
    pub hiding: Rational,
    pub perfectly_sound: bool,
    pub perfectly_hiding: bool,
}

fn expect_names(what: &str, got: &[Alphabet], want: &[&str]) -> Result<()> {
    let names: Vec<&str> = got.iter().map(Alphabet::name).collect();
    if names != want {
        return Err(Error::InvalidScheme(format!("{what} must be {want:?}, got {names:?}")));
    }
    Ok(())
}

fn same_alphabets(a: &[Alphabet], b: &[Alphabet]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y)
}

impl CommitmentScheme {
    /// Validates shapes, role names and the honest non-signaling requirement.
    pub fn new(
        provers: Provers,
        questions: CondTable,
        honest0: CondTable,
        honest1: CondTable,
        accept: AcceptTable,
    ) -> Result<Self> {
        expect_names("question outputs", questions.outputs(), provers.question_names())?;
        if !questions.inputs().is_empty() {
            return Err(Error::InvalidScheme("questions must be unconditional".into()));
        }
        for h in [&honest0, &honest1] {
            expect_names("honest outputs", h.outputs(), provers.output_names())?;
            if !same_alphabets(h.inputs(), questions.outputs()) {
                return Err(Error::InvalidScheme(
                    "honest inputs must be the question alphabets".into(),
                ));
            }
        }
        if !same_alphabets(honest0.outputs(), honest1.outputs()) {
            return Err(Error::InvalidScheme(
                "honest tables have different output alphabets".into(),
            ));
        }
        if !same_alphabets(accept.outputs(), honest0.outputs()) {
            return Err(Error::InvalidScheme("accept outputs must be the honest outputs".into()));
        }
        let mut want_inputs = questions.outputs().to_vec();
        want_inputs.push(Alphabet::bits(B));
        if !same_alphabets(accept.inputs(), &want_inputs) {
            return Err(Error::InvalidScheme(
                "accept inputs must be the questions followed by b".into(),
            ));
        }
        let s = CommitmentScheme {
            provers,
            questions,
            honest: [honest0, honest1],
            accept,
        };
        for b in 0..2 {
            let r = s.honest_ns_report(b);
            if !r.passed {
                let v = &r.violations[0];
                return Err(Error::InvalidScheme(format!(
                    "honest table for b={b} is signaling ({} at {} vs {}, output {})",
                    v.constraint, v.inputs[0], v.inputs[1], v.output
                )));
            }
        }
        Ok(s)
    }

    /// Builds the acceptance table from a predicate over `(outputs, questions, b)`.
    pub fn with_predicate<F>(
        provers: Provers,
        questions: CondTable,
        honest0: CondTable,
        honest1: CondTable,
        accept: F,
    ) -> Result<Self>
    where
        F: FnMut(&[usize], &[usize]) -> bool,
    {
        let mut inputs = questions.outputs().to_vec();
        inputs.push(Alphabet::bits(B));
        let acc = AcceptTable::from_fn(honest0.outputs().to_vec(), inputs, accept)?;
        Self::new(provers, questions, honest0, honest1, acc)
    }

    pub fn provers(&self) -> Provers {
        self.provers
    }

    pub fn questions(&self) -> &CondTable {
        &self.questions
    }

    pub fn honest(&self, b: usize) -> &CondTable {
        &self.honest[b]
    }

    pub fn accept(&self) -> &AcceptTable {
        &self.accept
    }

    /// The same scheme with the honest table for `b = 1` replaced.
    pub fn with_honest1(&self, honest1: CondTable) -> Result<Self> {
        Self::new(
            self.provers,
            self.questions.clone(),
            self.honest[0].clone(),
            honest1,
            self.accept.clone(),
        )
    }

    /// Two provers, with `a'`, `x'` and `y` all one-symbol alphabets.
    pub fn is_simple(&self) -> bool {
        self.provers == Provers::Two
            && self.questions.outputs()[1].len() == 1
            && self.honest[0].outputs()[1].len() == 1
            && self.honest[0].outputs()[2].len() == 1
    }

    /// The honest non-signaling requirement for bit `b`: the parts of the
    /// two (or three) provers may depend only on their own questions.
    pub fn honest_ns_report(&self, b: usize) -> NsReport {
        let h = &self.honest[b];
        match self.provers {
            Provers::Two => nonsig::check_ns_partition(h, &[0, 2], &[0], &[1, 3], &[1]),
            Provers::Three => {
                let fams = [
                    Family {
                        id: ConstraintId::TYz,
                        outputs: vec![1, 2],
                        free: vec![0],
                    },
                    Family {
                        id: ConstraintId::TY,
                        outputs: vec![1],
                        free: vec![0],
                    },
                    Family {
                        id: ConstraintId::TZ,
                        outputs: vec![2],
                        free: vec![0],
                    },
                ];
                let violations: Vec<_> = fams.iter().filter_map(|f| nonsig::check_family(h, f)).collect();
                NsReport {
                    passed: violations.is_empty(),
                    violations,
                }
            }
        }
    }

    pub fn honest_accept_prob(&self, b: usize) -> Rational {
        let h = &self.honest[b];
        let mut total = rational::zero();
        for qi in 0..self.questions.output_len() {
            let pq = self.questions.get(qi, 0);
            if pq.is_zero() {
                continue;
            }
            let ai = self.accept.input_index(qi, b);
            let acc: Rational = h
                .row(qi)
                .iter()
                .enumerate()
                .filter(|(o, _)| self.accept.get(*o, ai))
                .map(|(_, v)| v)
                .sum();
            total += pq * acc;
        }
        total
    }

    /// Commit-phase marginal of the honest table for bit `b`.
    pub fn commit_marginal(&self, b: usize) -> CondTable {
        self.honest[b].marginal_positions(self.provers.commit_positions())
    }

    /// Maximum over question tuples of the statistical distance between the
    /// commit-phase marginals for `b = 0` and `b = 1`.
    pub fn hiding_distance(&self) -> Rational {
        let (m0, m1) = (self.commit_marginal(0), self.commit_marginal(1));
        (0..self.questions.output_len())
            .map(|i| table::distance(m0.row(i), m1.row(i)))
            .max()
            .unwrap_or_else(rational::zero)
    }

    pub fn metrics(&self) -> SchemeMetrics {
        let (s0, s1) = (self.honest_accept_prob(0), self.honest_accept_prob(1));
        let hiding = self.hiding_distance();
        SchemeMetrics {
            perfectly_sound: s0 == rational::one() && s1 == rational::one(),
            perfectly_hiding: hiding.is_zero(),
            soundness_0: s0,
            soundness_1: s1,
            hiding,
        }
    }

    /// Output and input alphabets of a strategy of `kind` against this scheme.
    pub fn strategy_alphabets(&self, kind: StrategyKind) -> Result<(Vec<Alphabet>, Vec<Alphabet>)> {
        let outs = self.honest[0].outputs();
        let qs = self.questions.outputs();
        let bit = Alphabet::bits;
        match (kind, self.provers) {
            (StrategyKind::OneRound, Provers::Two) if self.is_simple() => {
                Ok((vec![outs[0].clone(), outs[3].clone()], vec![qs[0].clone(), bit(B)]))
            }
            (StrategyKind::TwoRound, Provers::Two) => {
                Ok((outs.to_vec(), vec![qs[0].clone(), qs[1].clone(), bit(B), bit(BP)]))
            }
            (StrategyKind::Tripartite, Provers::Three) => Ok((outs.to_vec(), vec![qs[0].clone(), bit(B), bit(C)])),
            _ => Err(Error::ShapeMismatch(format!(
                "a {kind} strategy does not fit a {}-prover{} scheme",
                self.provers.count(),
                if self.is_simple() { " simple" } else { "" }
            ))),
        }
    }

    /// The strategy kind used to attack or certify this scheme.
    pub fn natural_strategy_kind(&self) -> StrategyKind {
        match self.provers {
            Provers::Three => StrategyKind::Tripartite,
            Provers::Two if self.is_simple() => StrategyKind::OneRound,
            Provers::Two => StrategyKind::TwoRound,
        }
    }

    /// For each cell of a strategy table of `kind`, the coefficient of that
    /// cell in `Prob*[Acc|0] + Prob*[Acc|1]`, split by bit.
    pub(crate) fn objective_terms(&self, kind: StrategyKind) -> Result<Vec<(usize, usize, Rational)>> {
        let (outs, ins) = self.strategy_alphabets(kind)?;
        let out_radix = Radix::new(outs.iter().map(Alphabet::len).collect())?;
        let in_radix = Radix::new(ins.iter().map(Alphabet::len).collect())?;
        let scheme_out = self.honest[0].out_radix();
        let mut terms = Vec::new();
        for qi in 0..self.questions.output_len() {
            let pq = self.questions.get(qi, 0);
            if pq.is_zero() {
                continue;
            }
            let qt = self.questions.out_radix().decode(qi);
            for b in 0..2 {
                let strat_in: Vec<usize> = match kind {
                    StrategyKind::OneRound => vec![qt[0], b],
                    StrategyKind::TwoRound => vec![qt[0], qt[1], b, b],
                    StrategyKind::Tripartite => vec![qt[0], b, b],
                };
                let si = in_radix.encode(&strat_in);
                let ai = self.accept.input_index(qi, b);
                for so in 0..out_radix.len() {
                    let o = match kind {
                        StrategyKind::OneRound => {
                            let t = out_radix.decode(so);
                            scheme_out.encode(&[t[0], 0, 0, t[1]])
                        }
                        _ => so,
                    };
                    if self.accept.get(o, ai) {
                        terms.push((b, si * out_radix.len() + so, pq.clone()));
                    }
                }
            }
        }
        Ok(terms)
    }

    /// `(Prob*[Acc|0], Prob*[Acc|1])` for a non-signaling strategy.
    pub fn binding_value(&self, q: &AttackStrategy) -> Result<(Rational, Rational)> {
        let (outs, ins) = self.strategy_alphabets(q.kind())?;
        if !same_alphabets(q.table().outputs(), &outs) || !same_alphabets(q.table().inputs(), &ins) {
            return Err(Error::ShapeMismatch(
                "strategy alphabets do not match the scheme".into(),
            ));
        }
        let r = q.check()?;
        if !r.passed {
            let v = &r.violations[0];
            return Err(Error::Signaling(format!(
                "{} between {} and {}",
                v.constraint, v.inputs[0], v.inputs[1]
            )));
        }
        let mut vals = [rational::zero(), rational::zero()];
        let e = q.table().entries();
        for (b, cell, coeff) in self.objective_terms(q.kind())? {
            vals[b] += coeff * &e[cell];
        }
        let [v0, v1] = vals;
        Ok((v0, v1))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schemes always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AcceptJson {
    entries: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeJson {
    provers: u8,
    questions: CondTable,
    honest0: CondTable,
    honest1: CondTable,
    accept: AcceptJson,
}

impl TryFrom<SchemeJson> for CommitmentScheme {
    type Error = Error;

    fn try_from(j: SchemeJson) -> Result<Self> {
        let provers = match j.provers {
            2 => Provers::Two,
            3 => Provers::Three,
            n => return Err(Error::InvalidScheme(format!("provers must be 2 or 3, got {n}"))),
        };
        let mut inputs = j.questions.outputs().to_vec();
        inputs.push(Alphabet::bits(B));
        let accept = AcceptTable::from_keys(j.honest0.outputs().to_vec(), inputs, &j.accept.entries)?;
        CommitmentScheme::new(provers, j.questions, j.honest0, j.honest1, accept)
    }
}

impl Serialize for CommitmentScheme {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SchemeJson {
            provers: self.provers.count(),
            questions: self.questions.clone(),
            honest0: self.honest[0].clone(),
            honest1: self.honest[1].clone(),
            accept: AcceptJson {
                entries: self.accept.keys(),
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CommitmentScheme {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SchemeJson::deserialize(d)?;
        CommitmentScheme::try_from(j).map_err(serde::de::Error::custom)
    }
}

fn unit(name: &str) -> Alphabet {
    Alphabet::unit(name)
}

fn uniform_questions(alphabets: Vec<Alphabet>) -> Result<CondTable> {
    CondTable::uniform(alphabets, vec![])
}

fn check_n(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::InvalidScheme(format!("n must be in 1..={max}, got {n}")));
    }
    Ok(())
}

/// Largest `n` accepted by the bitstring constructions.
pub const MAX_BITS: usize = 8;

/// Two-prover simple scheme: `x := r xor a.b`, opening `y' := r`, accept iff
/// `y' = x xor a.b`; `a` and `r` are uniform n-bit strings.
pub fn make_intro_scheme(n: usize) -> Result<CommitmentScheme> {
    check_n(n, MAX_BITS)?;
    let bits = n as u32;
    let size = 1usize << n;
    let questions = uniform_questions(vec![Alphabet::bitstrings(A, bits), unit(AP)])?;
    let outputs = || {
        vec![
            Alphabet::bitstrings(X, bits),
            unit(XP),
            unit(Y),
            Alphabet::bitstrings(YP, bits),
        ]
    };
    let honest = |b: usize| {
        CondTable::from_fn(outputs(), questions.outputs().to_vec(), |o, i| {
            let ab = if b == 1 { i[0] } else { 0 };
            if o[0] == o[3] ^ ab {
                rational::ratio(1, size as i64)
            } else {
                rational::zero()
            }
        })
    };
    let (h0, h1) = (honest(0)?, honest(1)?);
    CommitmentScheme::with_predicate(Provers::Two, questions, h0, h1, |o, i| {
        let ab = if i[2] == 1 { i[0] } else { 0 };
        o[3] == o[0] ^ ab
    })
}

/// `S_a = { a + i mod n : i < m }`.
pub fn tight_subset(n: usize, m: usize, a: usize) -> Vec<usize> {
    (0..m).map(|i| (a + i) % n).collect()
}

/// Largest `n` accepted by [`make_tight_scheme`].
pub const MAX_TIGHT_N: usize = 64;

fn tight_params(n: usize, m: usize) -> Result<()> {
    check_n(n, MAX_TIGHT_N)?;
    if m == 0 || m > n {
        return Err(Error::InvalidScheme(format!("m must be in 1..={n}, got {m}")));
    }
    Ok(())
}

fn bit_or_bot(name: &str) -> Alphabet {
    Alphabet::new(name, ["0", "1", BOT]).expect("valid alphabet")
}

const BOT_IDX: usize = 2;

/// Simple two-prover scheme with hiding distance `m/n`: shared `r` uniform in
/// `[n]`, `x := b` if `r` is in `S_a` and `⊥` otherwise, opening `y' := r`.
/// The verifier accepts iff `x = b`, or `x = ⊥` and `y'` is not in `S_a`.
pub fn make_tight_scheme(n: usize, m: usize) -> Result<CommitmentScheme> {
    tight_params(n, m)?;
    let questions = uniform_questions(vec![Alphabet::range(A, n), unit(AP)])?;
    let outputs = || vec![bit_or_bot(X), unit(XP), unit(Y), Alphabet::range(YP, n)];
    let in_s = |a: usize, y: usize| (y + n - a) % n < m;
    let honest = |b: usize| {
        CondTable::from_fn(outputs(), questions.outputs().to_vec(), |o, i| {
            let r = o[3];
            let x = if in_s(i[0], r) { b } else { BOT_IDX };
            if o[0] == x {
                rational::ratio(1, n as i64)
            } else {
                rational::zero()
            }
        })
    };
    let (h0, h1) = (honest(0)?, honest(1)?);
    CommitmentScheme::with_predicate(Provers::Two, questions, h0, h1, |o, i| {
        o[0] == i[2] || (o[0] == BOT_IDX && !in_s(i[0], o[3]))
    })
}

/// Simple three-prover scheme: `x := r xor a.b`, openings `y := r`, `z := r`;
/// accept iff `y = z` and `x = y xor a.b`.
pub fn make_three_prover_scheme(n: usize) -> Result<CommitmentScheme> {
    check_n(n, MAX_BITS)?;
    let bits = n as u32;
    let size = 1usize << n;
    let questions = uniform_questions(vec![Alphabet::bitstrings(A, bits)])?;
    let outputs = || {
        vec![
            Alphabet::bitstrings(X, bits),
            Alphabet::bitstrings(Y, bits),
            Alphabet::bitstrings(Z, bits),
        ]
    };
    let honest = |b: usize| {
        CondTable::from_fn(outputs(), questions.outputs().to_vec(), |o, i| {
            let ab = if b == 1 { i[0] } else { 0 };
            if o[1] == o[2] && o[0] == o[1] ^ ab {
                rational::ratio(1, size as i64)
            } else {
                rational::zero()
            }
        })
    };
    let (h0, h1) = (honest(0)?, honest(1)?);
    CommitmentScheme::with_predicate(Provers::Three, questions, h0, h1, |o, i| {
        let ab = if i[1] == 1 { i[0] } else { 0 };
        o[1] == o[2] && o[0] == o[1] ^ ab
    })
}

/// A general (non-simple) two-prover scheme with hiding distance `m/n`.
///
/// Shared randomness is `r` uniform in `[n]` and a uniform bit `s`. On
/// question `a`, P sends `x := b` if `r` is in `S_a` and `⊥` otherwise; on
/// question bit `a'`, Q sends `x' := s xor a'`. To open, P sends `y := s` and
/// Q sends `y' := r`. The verifier accepts iff `x' = y xor a'` and either
/// `x = b`, or `x = ⊥` and `y'` is not in `S_a`.
pub fn make_two_sided_scheme(n: usize, m: usize) -> Result<CommitmentScheme> {
    tight_params(n, m)?;
    let questions = uniform_questions(vec![Alphabet::range(A, n), Alphabet::bits(AP)])?;
    let outputs = || {
        vec![
            bit_or_bot(X),
            Alphabet::bits(XP),
            Alphabet::bits(Y),
            Alphabet::range(YP, n),
        ]
    };
    let in_s = |a: usize, y: usize| (y + n - a) % n < m;
    let honest = |b: usize| {
        CondTable::from_fn(outputs(), questions.outputs().to_vec(), |o, i| {
            let (r, s) = (o[3], o[2]);
            let x = if in_s(i[0], r) { b } else { BOT_IDX };
            if o[0] == x && o[1] == s ^ i[1] {
                rational::ratio(1, 2 * n as i64)
            } else {
                rational::zero()
            }
        })
    };
    let (h0, h1) = (honest(0)?, honest(1)?);
    CommitmentScheme::with_predicate(Provers::Two, questions, h0, h1, |o, i| {
        o[1] == o[2] ^ i[1] && (o[0] == i[2] || (o[0] == BOT_IDX && !in_s(i[0], o[3])))
    })
}

/// Random stochastic map `K(new | condition)` over `size` symbols, biased
/// towards keeping the old symbol.
fn random_kernel(
    rng: &mut ChaCha8Rng,
    conditions: usize,
    old: impl Fn(usize) -> usize,
    size: usize,
) -> Vec<Vec<Rational>> {
    (0..conditions)
        .map(|c| {
            let w: Vec<i64> = (0..size)
                .map(|v| rng.random_range(0..=2) + if v == old(c) { 6 } else { 0 })
                .collect();
            let total: i64 = w.iter().sum();
            w.into_iter().map(|x| rational::ratio(x, total)).collect()
        })
        .collect()
}

/// Post-processes the openings of a two-prover scheme with seeded local
/// stochastic maps: P replaces `y` by a draw from `K(y_new | b, a, x, y)` and
/// Q replaces `y'` by a draw from `K'(y'_new | b, a', x', y')`. The commit
/// phase is untouched, so the hiding distance is unchanged, and the honest
/// tables stay non-signaling.
pub fn perturb_openings(s: &CommitmentScheme, seed: u64) -> Result<CommitmentScheme> {
    if s.provers != Provers::Two {
        return Err(Error::InvalidScheme(
            "only two-prover schemes have two-sided openings".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = &s.honest[0];
    let qr = s.questions.out_radix();
    let (na, nap) = (qr.sizes()[0], qr.sizes()[1]);
    let sz = h.out_radix().sizes().to_vec();
    let (nx, nxp, ny, nyp) = (sz[0], sz[1], sz[2], sz[3]);
    let mut tables = Vec::with_capacity(2);
    for b in 0..2 {
        // condition index (a, x, y) and (a', x', y')
        let left = random_kernel(&mut rng, na * nx * ny, |c| c % ny, ny);
        let right = random_kernel(&mut rng, nap * nxp * nyp, |c| c % nyp, nyp);
        let src = &s.honest[b];
        let mut entries = vec![rational::zero(); src.entries().len()];
        for (i, o, v) in src.nonzero() {
            let it = qr.decode(i);
            let ot = src.out_radix().decode(o);
            let kl = &left[(it[0] * nx + ot[0]) * ny + ot[2]];
            let kr = &right[(it[1] * nxp + ot[1]) * nyp + ot[3]];
            for (yn, wl) in kl.iter().enumerate() {
                if wl.is_zero() {
                    continue;
                }
                for (ypn, wr) in kr.iter().enumerate() {
                    if wr.is_zero() {
                        continue;
                    }
                    let on = src.out_radix().encode(&[ot[0], ot[1], yn, ypn]);
                    entries[i * src.output_len() + on] += v * wl * wr;
                }
            }
        }
        tables.push(CondTable::new(src.outputs().to_vec(), src.inputs().to_vec(), entries)?);
    }
    let h1 = tables.pop().expect("two tables");
    let h0 = tables.pop().expect("two tables");
    CommitmentScheme::new(s.provers, s.questions.clone(), h0, h1, s.accept.clone())
}

/// Embeds a simple two-prover scheme given by `p(a)`, `p_b(x, y | a)` and an
/// acceptance predicate over `(x, y | a, b)` into the general format, with
/// one-symbol alphabets for `a'`, `x'` and `y` and the opening in `y'`.
pub fn simple_scheme<F>(
    questions: Alphabet,
    question_probs: Vec<Rational>,
    commit: Alphabet,
    opening: Alphabet,
    honest: [Vec<Rational>; 2],
    mut accept: F,
) -> Result<CommitmentScheme>
where
    F: FnMut(usize, usize, usize, usize) -> bool,
{
    let q = CondTable::new(vec![questions.renamed(A)?, unit(AP)], vec![], question_probs)?;
    let outs = vec![commit.renamed(X)?, unit(XP), unit(Y), opening.renamed(YP)?];
    let [h0, h1] = honest;
    let t0 = CondTable::new(outs.clone(), q.outputs().to_vec(), h0)?;
    let t1 = CondTable::new(outs, q.outputs().to_vec(), h1)?;
    CommitmentScheme::with_predicate(Provers::Two, q, t0, t1, |o, i| accept(o[0], o[3], i[0], i[2]))
}
