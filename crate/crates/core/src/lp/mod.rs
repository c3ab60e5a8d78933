//! Exact linear programs over non-signaling polytopes.
//!
//! Variables are the cells of a strategy table in its canonical layout
//! (input-major). Every input tuple gets a normalization row, and every
//! non-signaling family contributes rows equating the marginal at each input
//! tuple with the marginal at the reference tuple whose free inputs are 0.
//! The last symbol of each marginal is skipped since normalization implies it.

mod simplex;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::attacks::{AttackStrategy, StrategyKind};
use crate::error::{Error, Result};
use crate::nonsig::{self, Family};
use crate::rational::{self, Frac, Rational};
use crate::schemes::CommitmentScheme;
use crate::table::{Alphabet, CondTable, Radix};

use simplex::{Outcome, Row};

/// Default refusal threshold on the number of variables.
pub const DEFAULT_VAR_CAP: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpRow {
    pub label: String,
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

/// `max objective.q` over `q >= 0` subject to the equality rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpProblem {
    pub outputs: Vec<Alphabet>,
    pub inputs: Vec<Alphabet>,
    pub objective: Vec<Rational>,
    pub rows: Vec<LpRow>,
}

/// Sorted output positions and sorted free input positions of a family.
type FamilyKey = (Vec<usize>, Vec<usize>);

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum LpSolution {
    Optimal { optimum: Rational, argmax: CondTable },
    Infeasible,
    Unbounded,
}

fn family_rows(out_radix: &Radix, in_radix: &Radix, fam: &Family, label: &str, rows: &mut Vec<LpRow>) {
    let proj = out_radix.projector(&fam.outputs);
    let marg_len = proj.target().len();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); marg_len];
    for o in 0..out_radix.len() {
        groups[proj.project(o)].push(o);
    }
    let width = out_radix.len();
    for i in 0..in_radix.len() {
        let mut t = in_radix.decode(i);
        for &p in &fam.free {
            t[p] = 0;
        }
        let r = in_radix.encode(&t);
        if r == i {
            continue;
        }
        for (m, group) in groups.iter().enumerate().take(marg_len - 1) {
            let mut coeffs = Vec::with_capacity(2 * group.len());
            coeffs.extend(group.iter().map(|&o| (i * width + o, rational::one())));
            coeffs.extend(group.iter().map(|&o| (r * width + o, rational::int(-1))));
            rows.push(LpRow {
                label: format!("{label} in={i} ref={r} out={m}"),
                coeffs,
                rhs: rational::zero(),
            });
        }
    }
}

impl LpProblem {
    /// The polytope of tables over `outputs | inputs` satisfying `families`,
    /// with the given objective (one coefficient per cell).
    pub fn ns_polytope(
        outputs: Vec<Alphabet>,
        inputs: Vec<Alphabet>,
        families: &[Family],
        objective: Vec<Rational>,
    ) -> Result<Self> {
        let out_radix = Radix::new(outputs.iter().map(Alphabet::len).collect())?;
        let in_radix = Radix::new(inputs.iter().map(Alphabet::len).collect())?;
        let n = out_radix
            .len()
            .checked_mul(in_radix.len())
            .ok_or_else(|| Error::ShapeMismatch("variable count overflows".into()))?;
        if objective.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "objective has {} coefficients for {n} variables",
                objective.len()
            )));
        }
        let mut rows = Vec::new();
        let w = out_radix.len();
        for i in 0..in_radix.len() {
            rows.push(LpRow {
                label: format!("norm in={i}"),
                coeffs: (0..w).map(|o| (i * w + o, rational::one())).collect(),
                rhs: rational::one(),
            });
        }
        // families with the same output set and free inputs share rows
        let mut merged: BTreeMap<FamilyKey, (Family, Vec<String>)> = BTreeMap::new();
        for f in families {
            let (mut o, mut fr) = (f.outputs.clone(), f.free.clone());
            o.sort_unstable();
            fr.sort_unstable();
            merged
                .entry((o, fr))
                .or_insert_with(|| (f.clone(), Vec::new()))
                .1
                .push(f.id.to_string());
        }
        let mut ordered: Vec<_> = merged.into_values().collect();
        ordered.sort_by_key(|(f, _)| families.iter().position(|g| g.id == f.id));
        for (f, ids) in ordered {
            family_rows(&out_radix, &in_radix, &f, &ids.join("/"), &mut rows);
        }
        Ok(LpProblem {
            outputs,
            inputs,
            objective,
            rows,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective_at(&self, values: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(values)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, v)| c * v)
            .sum()
    }

    /// Nonnegative and satisfying every row exactly.
    pub fn is_feasible(&self, values: &[Rational]) -> bool {
        values.len() == self.num_vars()
            && values.iter().all(|v| !v.is_negative())
            && self
                .rows
                .iter()
                .all(|r| r.coeffs.iter().map(|(j, c)| c * &values[*j]).sum::<Rational>() == r.rhs)
    }

    /// Plain-text sparse dump: a `vars` line, a `max` line with the nonzero
    /// objective terms, then one `row` line per equality.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let names: Vec<&str> = self.outputs.iter().chain(&self.inputs).map(Alphabet::name).collect();
        let _ = writeln!(s, "# cells of q({}) input-major", names.join(","));
        let _ = writeln!(s, "vars {}", self.num_vars());
        let _ = write!(s, "max");
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                let _ = write!(s, " {j}:{}", Frac(c));
            }
        }
        let _ = writeln!(s);
        for r in &self.rows {
            let _ = write!(s, "row {} :", r.label.replace(' ', "_"));
            for (j, c) in &r.coeffs {
                let _ = write!(s, " {j}:{}", Frac(c));
            }
            let _ = writeln!(s, " = {}", Frac(&r.rhs));
        }
        s
    }
}

/// Families whose rows describe the strategy polytope of `kind`.
pub fn strategy_families(kind: StrategyKind) -> Vec<Family> {
    match kind {
        StrategyKind::OneRound => nonsig::bipartite_families(),
        StrategyKind::TwoRound => nonsig::two_round_families(),
        StrategyKind::Tripartite => nonsig::tripartite_pairwise(),
    }
}

/// Binding LP of a scheme: maximize `Prob*[Acc|0] + Prob*[Acc|1]` over
/// non-signaling strategies. Simple schemes use one-round strategies
/// `q(x, y' | a, b)`, other two-prover schemes two-round strategies, and
/// three-prover schemes tripartite ones.
pub fn compile_binding_lp(s: &CommitmentScheme) -> Result<(StrategyKind, LpProblem)> {
    let kind = s.natural_strategy_kind();
    let (outs, ins) = s.strategy_alphabets(kind)?;
    let n = Radix::new(outs.iter().map(Alphabet::len).collect())?.len()
        * Radix::new(ins.iter().map(Alphabet::len).collect())?.len();
    let mut objective = vec![rational::zero(); n];
    for (_, cell, c) in s.objective_terms(kind)? {
        objective[cell] += c;
    }
    Ok((
        kind,
        LpProblem::ns_polytope(outs, ins, &strategy_families(kind), objective)?,
    ))
}

/// Cells of the deterministic table answering the first symbol everywhere.
fn first_symbol_support(p: &LpProblem) -> Vec<usize> {
    let w: usize = p.outputs.iter().map(Alphabet::len).product();
    let h: usize = p.inputs.iter().map(Alphabet::len).product();
    if w == 0 || w.checked_mul(h) != Some(p.num_vars()) {
        return Vec::new();
    }
    (0..h).map(|i| i * w).collect()
}

fn run(p: &LpProblem) -> Outcome {
    let n = p.num_vars();
    let start = first_symbol_support(p);
    let rows: Vec<Row> = p
        .rows
        .iter()
        .map(|r| Row {
            coeffs: r.coeffs.clone(),
            rhs: r.rhs.clone(),
        })
        .collect();
    // fixed-width integers first; fall back to big integers on overflow
    simplex::maximize::<i128>(n, &p.objective, &rows, &start)
        .or_else(|| simplex::maximize::<BigInt>(n, &p.objective, &rows, &start))
        .expect("big integers never overflow")
}

pub fn solve(p: &LpProblem) -> Result<LpSolution> {
    solve_with_cap(p, DEFAULT_VAR_CAP)
}

/// Solves exactly and checks the answer: the argmax satisfies every row and
/// its objective equals the reported optimum.
pub fn solve_with_cap(p: &LpProblem, cap: usize) -> Result<LpSolution> {
    if p.num_vars() > cap {
        return Err(Error::TooLarge {
            vars: p.num_vars(),
            cap,
        });
    }
    match run(p) {
        Outcome::Infeasible => Ok(LpSolution::Infeasible),
        Outcome::Unbounded => Ok(LpSolution::Unbounded),
        Outcome::Optimal { value, x } => {
            if !p.is_feasible(&x) {
                return Err(Error::Certificate("argmax violates a constraint row".into()));
            }
            if p.objective_at(&x) != value {
                return Err(Error::Certificate(
                    "objective at argmax differs from the optimum".into(),
                ));
            }
            let argmax = CondTable::new(p.outputs.clone(), p.inputs.clone(), x)?;
            Ok(LpSolution::Optimal { optimum: value, argmax })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BindingCertificate {
    /// Best value of `Prob*[Acc|0] + Prob*[Acc|1]`.
    pub optimum: Rational,
    /// `optimum - 1`: the smallest δ for which the scheme is δ-binding.
    pub delta: Rational,
    pub witness: AttackStrategy,
    /// `(Prob*[Acc|0], Prob*[Acc|1])` at the witness.
    pub values: (Rational, Rational),
    pub variables: usize,
    pub rows: usize,
}

pub fn certify_binding(s: &CommitmentScheme) -> Result<BindingCertificate> {
    certify_binding_with_cap(s, DEFAULT_VAR_CAP)
}

/// Solves the binding LP and cross-checks the optimal strategy with the
/// non-signaling checker and the binding-game evaluation.
pub fn certify_binding_with_cap(s: &CommitmentScheme, cap: usize) -> Result<BindingCertificate> {
    let (kind, p) = compile_binding_lp(s)?;
    let (optimum, argmax) = match solve_with_cap(&p, cap)? {
        LpSolution::Optimal { optimum, argmax } => (optimum, argmax),
        LpSolution::Infeasible => return Err(Error::Infeasible),
        LpSolution::Unbounded => return Err(Error::Unbounded),
    };
    let witness = AttackStrategy::new(kind, argmax)?;
    if !witness.check()?.passed {
        return Err(Error::Certificate(
            "optimal strategy fails the non-signaling check".into(),
        ));
    }
    let values = s.binding_value(&witness)?;
    if &values.0 + &values.1 != optimum {
        return Err(Error::Certificate(
            "binding value at the witness differs from the optimum".into(),
        ));
    }
    Ok(BindingCertificate {
        delta: &optimum - Rational::one(),
        optimum,
        witness,
        values,
        variables: p.num_vars(),
        rows: p.rows.len(),
    })
}
