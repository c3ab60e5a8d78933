//! Decision procedures for non-signaling and causality constraints.
//!
//! Every constraint is a *family*: the marginal of a table over some outputs
//! must not depend on some inputs. The two-round ratio constraints (C2, NS2 and
//! their mirrors) are decided in linear partial-sum form, which turns the set
//! of admissible tables into a polytope. The same families generate the rows
//! of the binding linear programs in [`crate::lp`].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::table::CondTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstraintId {
    #[serde(rename = "NS")]
    Ns,
    #[serde(rename = "NS'")]
    NsPrime,
    C1,
    C2,
    #[serde(rename = "NS1")]
    Ns1,
    #[serde(rename = "NS2")]
    Ns2,
    #[serde(rename = "C1'")]
    C1Prime,
    #[serde(rename = "C2'")]
    C2Prime,
    #[serde(rename = "NS1'")]
    Ns1Prime,
    #[serde(rename = "NS2'")]
    Ns2Prime,
    #[serde(rename = "T-xy")]
    TXy,
    #[serde(rename = "T-xz")]
    TXz,
    #[serde(rename = "T-yz")]
    TYz,
    #[serde(rename = "T-x")]
    TX,
    #[serde(rename = "T-y")]
    TY,
    #[serde(rename = "T-z")]
    TZ,
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("plain enum");
        f.write_str(s.as_str().expect("serialized as a string"))
    }
}

/// The marginal over `outputs` must not depend on the inputs at `free`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub id: ConstraintId,
    pub outputs: Vec<usize>,
    pub free: Vec<usize>,
}

impl Family {
    fn new(id: ConstraintId, outputs: &[usize], free: &[usize]) -> Self {
        Family {
            id,
            outputs: outputs.to_vec(),
            free: free.to_vec(),
        }
    }
}

/// One witnessed violation: the marginal at `output` differs between the two
/// input tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: ConstraintId,
    pub inputs: [String; 2],
    pub output: String,
    #[serde(with = "rational::serde_frac")]
    pub left: Rational,
    #[serde(with = "rational::serde_frac")]
    pub right: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NsReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl NsReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        NsReport {
            passed: violations.is_empty(),
            violations,
        }
    }

    pub fn violated(&self, id: ConstraintId) -> bool {
        self.violations.iter().any(|v| v.constraint == id)
    }
}

/// Output roles of a two-round table: `x, x', y, y'`; input roles `a, a', b, b'`.
pub mod two_round {
    pub const X: usize = 0;
    pub const XP: usize = 1;
    pub const Y: usize = 2;
    pub const YP: usize = 3;
    pub const A: usize = 0;
    pub const AP: usize = 1;
    pub const B: usize = 2;
    pub const BP: usize = 3;
}

pub fn bipartite_families() -> Vec<Family> {
    vec![
        Family::new(ConstraintId::Ns, &[0], &[1]),
        Family::new(ConstraintId::NsPrime, &[1], &[0]),
    ]
}

/// C1 and NS1 (with mirrors): exact linear constraints.
pub fn two_round_first_stage() -> Vec<Family> {
    use two_round::*;
    vec![
        Family::new(ConstraintId::C1, &[X, XP], &[B, BP]),
        Family::new(ConstraintId::C1Prime, &[XP, X], &[BP, B]),
        Family::new(ConstraintId::Ns1, &[X, Y], &[AP, BP]),
        Family::new(ConstraintId::Ns1Prime, &[XP, YP], &[A, B]),
    ]
}

/// C2 and NS2 (with mirrors) in partial-sum form. Given C1 and NS1 both C2
/// and NS2 say that `q(x, x', y | a, a', b, b')` does not depend on `b'`.
pub fn two_round_second_stage() -> Vec<Family> {
    use two_round::*;
    vec![
        Family::new(ConstraintId::C2, &[X, XP, Y], &[BP]),
        Family::new(ConstraintId::Ns2, &[X, XP, Y], &[BP]),
        Family::new(ConstraintId::C2Prime, &[X, XP, YP], &[B]),
        Family::new(ConstraintId::Ns2Prime, &[X, XP, YP], &[B]),
    ]
}

pub fn two_round_families() -> Vec<Family> {
    let mut f = two_round_first_stage();
    f.extend(two_round_second_stage());
    f
}

pub fn tripartite_pairwise() -> Vec<Family> {
    vec![
        Family::new(ConstraintId::TXy, &[0, 1], &[2]),
        Family::new(ConstraintId::TXz, &[0, 2], &[1]),
        Family::new(ConstraintId::TYz, &[1, 2], &[0]),
    ]
}

pub fn tripartite_single() -> Vec<Family> {
    vec![
        Family::new(ConstraintId::TX, &[0], &[1, 2]),
        Family::new(ConstraintId::TY, &[1], &[0, 2]),
        Family::new(ConstraintId::TZ, &[2], &[0, 1]),
    ]
}

/// Index of the input tuple with the `free` coordinates reset to symbol 0.
pub(crate) fn reference_input(q: &CondTable, input: usize, free: &[usize]) -> usize {
    let r = q.in_radix();
    let mut t = r.decode(input);
    for &p in free {
        t[p] = 0;
    }
    r.encode(&t)
}

/// First witness that `fam` fails on `q`, if any.
pub fn check_family(q: &CondTable, fam: &Family) -> Option<Violation> {
    let m = q.marginal_positions(&fam.outputs);
    for i in 0..q.input_len() {
        let r = reference_input(q, i, &fam.free);
        if r == i {
            continue;
        }
        let (ref_row, row) = (m.row(r), m.row(i));
        if let Some(o) = (0..ref_row.len()).find(|&o| ref_row[o] != row[o]) {
            return Some(Violation {
                constraint: fam.id,
                inputs: [q.input_label(r), q.input_label(i)],
                output: m.output_label(o),
                left: ref_row[o].clone(),
                right: row[o].clone(),
            });
        }
    }
    None
}

fn run(q: &CondTable, fams: &[Family]) -> Vec<Violation> {
    fams.iter().filter_map(|f| check_family(q, f)).collect()
}

fn arity(q: &CondTable, outs: usize, ins: usize, what: &str) -> Result<()> {
    if q.outputs().len() != outs || q.inputs().len() != ins {
        return Err(Error::Arity {
            expected: format!("{what}: {outs} outputs and {ins} inputs"),
            got: format!("{} outputs and {} inputs", q.outputs().len(), q.inputs().len()),
        });
    }
    Ok(())
}

/// One-round bipartite system `q(x, x' | a, a')`.
pub fn check_ns_bipartite(q: &CondTable) -> Result<NsReport> {
    arity(q, 2, 2, "bipartite")?;
    Ok(NsReport::from_violations(run(q, &bipartite_families())))
}

/// Bipartite view of an arbitrary table: the `left` outputs may depend only on
/// the `left_inputs`, the `right` outputs only on the `right_inputs`.
pub fn check_ns_partition(
    q: &CondTable,
    left: &[usize],
    left_inputs: &[usize],
    right: &[usize],
    right_inputs: &[usize],
) -> NsReport {
    let fams = [
        Family::new(ConstraintId::Ns, left, right_inputs),
        Family::new(ConstraintId::NsPrime, right, left_inputs),
    ];
    NsReport::from_violations(run(q, &fams))
}

/// Two-round bipartite system `q(x, x', y, y' | a, a', b, b')`.
///
/// C1 and NS1 (and mirrors) are checked first. The partial-sum forms of C2
/// and NS2 are only meaningful once those hold, so they are checked only if
/// the first stage passes.
pub fn check_ns_two_round(q: &CondTable) -> Result<NsReport> {
    arity(q, 4, 4, "two-round")?;
    let mut v = run(q, &two_round_first_stage());
    if v.is_empty() {
        v = run(q, &two_round_second_stage());
    }
    Ok(NsReport::from_violations(v))
}

/// Two-round check that evaluates C2 and NS2 (and mirrors) directly as
/// equalities of conditional distributions, skipping input tuples where the
/// conditioning event has zero mass. Used to cross-validate the partial-sum
/// form.
pub fn check_ns_two_round_ratio(q: &CondTable) -> Result<NsReport> {
    use two_round::*;
    arity(q, 4, 4, "two-round")?;
    let mut v = run(q, &two_round_first_stage());
    let ratio_fams = [
        // q(x' | x, y, a, a', b, b') does not depend on b'
        (ConstraintId::C2, vec![X, Y, XP], 2usize, BP),
        // q(y | x, x', a, a', b, b') does not depend on b'
        (ConstraintId::Ns2, vec![X, XP, Y], 2, BP),
        (ConstraintId::C2Prime, vec![XP, YP, X], 2, B),
        (ConstraintId::Ns2Prime, vec![X, XP, YP], 2, B),
    ];
    for (id, outs, cond, free) in ratio_fams {
        if let Some(w) = check_ratio(q, id, &outs, cond, free) {
            v.push(w);
        }
    }
    Ok(NsReport::from_violations(v))
}

/// Checks that `q(outs[cond..] | outs[..cond], inputs)` does not depend on the
/// input at `free`, wherever the conditioning mass is positive.
fn check_ratio(q: &CondTable, id: ConstraintId, outs: &[usize], cond: usize, free: usize) -> Option<Violation> {
    let joint = q.marginal_positions(outs);
    let given = q.marginal_positions(&outs[..cond]);
    let to_given = joint.out_radix().projector(&(0..cond).collect::<Vec<_>>());
    // group inputs by their non-free coordinates
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..q.input_len() {
        groups.entry(reference_input(q, i, &[free])).or_default().push(i);
    }
    for members in groups.values() {
        for o in 0..joint.output_len() {
            let g = to_given.project(o);
            let mut first: Option<(usize, Rational)> = None;
            for &i in members {
                let mass = given.get(g, i);
                if mass.is_zero() {
                    continue;
                }
                let value = joint.get(o, i) / mass;
                match &first {
                    None => first = Some((i, value)),
                    Some((i0, v0)) if *v0 != value => {
                        return Some(Violation {
                            constraint: id,
                            inputs: [q.input_label(*i0), q.input_label(i)],
                            output: joint.output_label(o),
                            left: v0.clone(),
                            right: value,
                        })
                    }
                    _ => {}
                }
            }
        }
    }
    None
}

/// Tripartite system `q(x, y, z | a, b, c)`: the three pairwise constraints
/// and the three single-marginal ones.
pub fn check_ns_tripartite(q: &CondTable) -> Result<NsReport> {
    arity(q, 3, 3, "tripartite")?;
    let mut fams = tripartite_pairwise();
    fams.extend(tripartite_single());
    Ok(NsReport::from_violations(run(q, &fams)))
}

/// For `q(x | a, b, c, d)` with `q(x | a, b, c, d) = q(x | a, b)` and
/// `= q(x | a, c)`, reports whether `q(x | a, b, c, d) = q(x | a)`.
/// Fails if the preconditions do not hold.
pub fn cut_lemma_check(q: &CondTable) -> Result<bool> {
    if q.inputs().len() != 4 {
        return Err(Error::Arity {
            expected: "4 inputs".into(),
            got: q.inputs().len().to_string(),
        });
    }
    let all: Vec<usize> = (0..q.outputs().len()).collect();
    let only_ab = Family::new(ConstraintId::Ns, &all, &[2, 3]);
    let only_ac = Family::new(ConstraintId::Ns, &all, &[1, 3]);
    if check_family(q, &only_ab).is_some() {
        return Err(Error::Precondition("q(x|a,b,c,d) depends on (c, d)".into()));
    }
    if check_family(q, &only_ac).is_some() {
        return Err(Error::Precondition("q(x|a,b,c,d) depends on (b, d)".into()));
    }
    Ok(check_family(q, &Family::new(ConstraintId::Ns, &all, &[1, 2, 3])).is_none())
}

/// One query to a two-round system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Query {
    /// Left round 1: input `a`, output `x`.
    Left1,
    /// Left round 2: input `b`, output `y`.
    Left2,
    /// Right round 1: input `a'`, output `x'`.
    Right1,
    /// Right round 2: input `b'`, output `y'`.
    Right2,
}

impl Query {
    /// Position of the output (in `x, x', y, y'`) and of the input (in
    /// `a, a', b, b'`) that this query reveals.
    fn slot(self) -> usize {
        use two_round::*;
        match self {
            Query::Left1 => X,
            Query::Left2 => Y,
            Query::Right1 => XP,
            Query::Right2 => YP,
        }
    }
}

/// The six orders that respect the round order on each side.
pub fn eligible_orders() -> Vec<[Query; 4]> {
    use Query::*;
    let all = [Left1, Left2, Right1, Right2];
    let mut out = Vec::new();
    for &a in &all {
        for &b in &all {
            for &c in &all {
                for &d in &all {
                    let o = [a, b, c, d];
                    if validate_order(&o).is_ok() {
                        out.push(o);
                    }
                }
            }
        }
    }
    out
}

pub fn validate_order(order: &[Query; 4]) -> Result<()> {
    let pos = |q: Query| order.iter().position(|&o| o == q);
    let (Some(l1), Some(l2), Some(r1), Some(r2)) = (
        pos(Query::Left1),
        pos(Query::Left2),
        pos(Query::Right1),
        pos(Query::Right2),
    ) else {
        return Err(Error::QueryOrder(format!("{order:?} is not a permutation")));
    };
    if l1 > l2 {
        return Err(Error::QueryOrder("left round 2 before left round 1".into()));
    }
    if r1 > r2 {
        return Err(Error::QueryOrder("right round 2 before right round 1".into()));
    }
    Ok(())
}

/// Sequential factorization of a two-round table along a query order: the
/// factor for step `k` is `q(revealed_k | seen inputs) / q(revealed_{k-1} |
/// seen inputs)`, with the not-yet-given inputs held at symbol 0.
struct Factorization<'a> {
    q: &'a CondTable,
    order: [Query; 4],
    /// marginal over the outputs revealed after each step
    margs: Vec<CondTable>,
}

impl<'a> Factorization<'a> {
    fn new(q: &'a CondTable, order: [Query; 4]) -> Result<Self> {
        arity(q, 4, 4, "two-round")?;
        validate_order(&order)?;
        let margs = (0..=4)
            .map(|k| {
                let slots: Vec<usize> = order[..k].iter().map(|s| s.slot()).collect();
                q.marginal_positions(&slots)
            })
            .collect();
        Ok(Factorization { q, order, margs })
    }

    /// Input index with only the inputs of the first `k` queries taken from
    /// `inputs`.
    fn config(&self, inputs: &[usize], k: usize) -> usize {
        let mut t = vec![0; 4];
        for s in &self.order[..k] {
            t[s.slot()] = inputs[s.slot()];
        }
        self.q.in_radix().encode(&t)
    }

    /// Revealed-output index after step `k`, from a full output tuple.
    fn revealed(&self, outputs: &[usize], k: usize) -> usize {
        let t: Vec<usize> = self.order[..k].iter().map(|s| outputs[s.slot()]).collect();
        self.margs[k].out_radix().encode(&t)
    }

    /// `(numerator, denominator)` of step `k` (1-based).
    fn step(&self, outputs: &[usize], inputs: &[usize], k: usize) -> (&Rational, &Rational) {
        let c = self.config(inputs, k);
        (
            self.margs[k].get(self.revealed(outputs, k), c),
            self.margs[k - 1].get(self.revealed(outputs, k - 1), c),
        )
    }
}

/// Entries (in the layout of `q`) of the joint distribution induced by
/// querying `q` in `order`, computed exactly from the sequential
/// factorization. A path through a zero-mass conditioning event gets weight 0.
pub fn induced_entries(q: &CondTable, order: [Query; 4]) -> Result<Vec<Rational>> {
    let f = Factorization::new(q, order)?;
    let mut entries = Vec::with_capacity(q.entries().len());
    for i in 0..q.input_len() {
        let inputs = q.in_radix().decode(i);
        for o in 0..q.output_len() {
            let outputs = q.out_radix().decode(o);
            let mut p = rational::one();
            for k in 1..=4 {
                let (num, den) = f.step(&outputs, &inputs, k);
                if num.is_zero() || den.is_zero() {
                    p = rational::zero();
                    break;
                }
                p = p * num / den;
            }
            entries.push(p);
        }
    }
    Ok(entries)
}

/// The induced joint as a table. For a non-signaling two-round system it
/// equals `q` for every eligible order; fails if the induced entries are not
/// a conditional distribution.
pub fn induced_joint(q: &CondTable, order: [Query; 4]) -> Result<CondTable> {
    let entries = induced_entries(q, order)?;
    CondTable::new(q.outputs().to_vec(), q.inputs().to_vec(), entries)
        .map_err(|e| Error::Signaling(format!("order {order:?} induces no distribution: {e}")))
}

/// Samples `(x, x', y, y')` by querying `q` in `order` on the given input
/// tuple (symbol indices for `a, a', b, b'`).
pub fn any_order_sample<R: Rng>(q: &CondTable, order: [Query; 4], inputs: &[usize], rng: &mut R) -> Result<[usize; 4]> {
    let f = Factorization::new(q, order)?;
    if inputs.len() != 4 || inputs.iter().zip(q.inputs()).any(|(&s, a)| s >= a.len()) {
        return Err(Error::ShapeMismatch("input tuple does not fit the table".into()));
    }
    let mut outputs = [0usize; 4];
    for k in 1..=4 {
        let slot = order[k - 1].slot();
        let n = q.outputs()[slot].len();
        let u = Rational::new(rng.random::<u64>().into(), num_bigint::BigInt::from(1u8) << 64);
        let mut acc = rational::zero();
        let mut chosen = None;
        for s in 0..n {
            outputs[slot] = s;
            let (num, den) = f.step(&outputs, inputs, k);
            if den.is_zero() {
                return Err(Error::ZeroMass {
                    input: q.input_label(q.in_radix().encode(inputs)),
                });
            }
            acc += num / den;
            if chosen.is_none() && u < acc {
                chosen = Some(s);
            }
        }
        if acc != rational::one() {
            return Err(Error::Signaling(format!(
                "step {k} conditional sums to {}",
                rational::Frac(&acc)
            )));
        }
        outputs[slot] = chosen.expect("u < 1 = total mass");
    }
    Ok(outputs)
}
