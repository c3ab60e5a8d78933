//! Non-signaling attacks on the binding property, built by gluing the honest
//! tables of a scheme along maximal couplings of their commit-phase outputs.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::coupling::glue;
use crate::error::{Error, Result};
use crate::nonsig::{self, NsReport};
use crate::rational::{self, Rational};
use crate::schemes::{CommitmentScheme, Provers, X, XP, Y, YP};
use crate::table::{Alphabet, CondTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    /// `q(x, y' | a, b)` against a simple two-prover scheme.
    OneRound,
    /// `q(x, x', y, y' | a, a', b, b')`.
    TwoRound,
    /// `q(x, y, z | a, b, c)` against a three-prover scheme.
    Tripartite,
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::OneRound => "one-round",
            StrategyKind::TwoRound => "two-round",
            StrategyKind::Tripartite => "tripartite",
        })
    }
}

impl StrategyKind {
    fn arity(self) -> (usize, usize) {
        match self {
            StrategyKind::OneRound => (2, 2),
            StrategyKind::TwoRound => (4, 4),
            StrategyKind::Tripartite => (3, 3),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StrategyJson", into = "StrategyJson")]
pub struct AttackStrategy {
    kind: StrategyKind,
    table: CondTable,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyJson {
    kind: StrategyKind,
    table: CondTable,
}

impl TryFrom<StrategyJson> for AttackStrategy {
    type Error = Error;

    fn try_from(j: StrategyJson) -> Result<Self> {
        AttackStrategy::new(j.kind, j.table)
    }
}

impl From<AttackStrategy> for StrategyJson {
    fn from(s: AttackStrategy) -> Self {
        StrategyJson {
            kind: s.kind,
            table: s.table,
        }
    }
}

impl AttackStrategy {
    /// Checks only the arity; use [`AttackStrategy::check`] for the
    /// non-signaling constraints.
    pub fn new(kind: StrategyKind, table: CondTable) -> Result<Self> {
        let (o, i) = kind.arity();
        if table.outputs().len() != o || table.inputs().len() != i {
            return Err(Error::Arity {
                expected: format!("{kind} strategy with {o} outputs and {i} inputs"),
                got: format!("{} outputs and {} inputs", table.outputs().len(), table.inputs().len()),
            });
        }
        Ok(AttackStrategy { kind, table })
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn table(&self) -> &CondTable {
        &self.table
    }

    pub fn into_table(self) -> CondTable {
        self.table
    }

    pub fn check(&self) -> Result<NsReport> {
        match self.kind {
            StrategyKind::OneRound => nonsig::check_ns_bipartite(&self.table),
            StrategyKind::TwoRound => nonsig::check_ns_two_round(&self.table),
            StrategyKind::Tripartite => nonsig::check_ns_tripartite(&self.table),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("strategies always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Appends `suffix` to every output name.
fn tagged(t: &CondTable, suffix: &str) -> Result<CondTable> {
    let names: Vec<(String, String)> = t
        .output_names()
        .iter()
        .map(|n| (n.to_string(), format!("{n}{suffix}")))
        .collect();
    let map: Vec<(&str, &str)> = names.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    t.renamed(&map)
}

fn tag(name: &str, b: usize) -> String {
    format!("{name}_{b}")
}

/// Requires `s` to be simple. Glues `p(x_0, y_0 | a)` with `p(x_1, y_1 | a)`
/// along `x_0, x_1` and returns `q(x, y' | a, b) := p(x_0, y_b | a)`.
pub fn attack_simple(s: &CommitmentScheme) -> Result<AttackStrategy> {
    if !s.is_simple() {
        return Err(Error::Precondition("attack_simple needs a simple scheme".into()));
    }
    let side = |b: usize| -> Result<CondTable> {
        let m = s.honest(b).marginal(&[X, YP])?;
        m.renamed(&[(X, &tag(X, b)), (YP, &tag(YP, b))])
    };
    let (x0, x1) = (tag(X, 0), tag(X, 1));
    // outputs (x_0, x_1, y'_0, y'_1 | a, a')
    let g = glue(&side(0)?, &side(1)?, &[(&x0, &x1)])?;
    let (outs, ins) = s.strategy_alphabets(StrategyKind::OneRound)?;
    let per_bit = [g.marginal_positions(&[0, 2]), g.marginal_positions(&[0, 3])];
    let table = CondTable::from_fn(outs, ins, |o, i| {
        // question index with a' = 0
        per_bit[i[1]].at(o, &[i[0], 0]).clone()
    })?;
    AttackStrategy::new(StrategyKind::OneRound, table)
}

/// Glues the full honest tables along the commit outputs: the result has
/// outputs `x_0, x'_0, x_1, x'_1, y_0, y'_0, y_1, y'_1` and inputs `a, a'`.
fn glue_honest(s: &CommitmentScheme) -> Result<CondTable> {
    let (l, r) = (tagged(s.honest(0), "_0")?, tagged(s.honest(1), "_1")?);
    let (x0, xp0, x1, xp1) = (tag(X, 0), tag(XP, 0), tag(X, 1), tag(XP, 1));
    glue(&l, &r, &[(&x0, &x1), (&xp0, &xp1)])
}

fn two_prover(s: &CommitmentScheme) -> Result<()> {
    if s.provers() != Provers::Two {
        return Err(Error::Precondition("needs a two-prover scheme".into()));
    }
    Ok(())
}

/// Requires hiding distance 0. Glues the honest tables along the commit
/// outputs and returns `q(x, x', y, y' | a, a', b, b') := p(x_0, x'_0, y_b, y'_b' | a, a')`.
pub fn attack_perfect(s: &CommitmentScheme) -> Result<AttackStrategy> {
    two_prover(s)?;
    let eps = s.hiding_distance();
    if !eps.is_zero() {
        return Err(Error::Precondition(format!(
            "attack_perfect needs a perfectly hiding scheme, hiding distance is {}",
            rational::Frac(&eps)
        )));
    }
    let g = glue_honest(s)?;
    // positions in g: x_0=0, x'_0=1, y_0=4, y'_0=5, y_1=6, y'_1=7
    let margs: Vec<CondTable> = (0..4)
        .map(|bb| {
            let (b, bp) = (bb / 2, bb % 2);
            g.marginal_positions(&[0, 1, 4 + 2 * b, 5 + 2 * bp])
        })
        .collect();
    let (outs, ins) = s.strategy_alphabets(StrategyKind::TwoRound)?;
    let table = CondTable::from_fn(outs, ins, |o, i| margs[i[2] * 2 + i[3]].at(o, &i[..2]).clone())?;
    AttackStrategy::new(StrategyKind::TwoRound, table)
}

/// Glues `p(x_0 | a, a')` (a commit output of the b=0 table) with `table`
/// along that output, then replaces the output in `table` by the glued copy
/// of the b=0 one. `pos` is 0 for `x` and 1 for `x'`.
fn adjust_one(s: &CommitmentScheme, table: &CondTable, pos: usize) -> Result<CondTable> {
    let name = [X, XP][pos];
    let left = tagged(&s.honest(0).marginal(&[name])?, "_0")?;
    let right = tagged(table, "_1")?;
    // outputs: name_0, name_1, then the other three outputs of `table`
    let g = glue(&left, &right, &[(&tag(name, 0), &tag(name, 1))])?;
    let mut order = Vec::with_capacity(4);
    for n in [X, XP, Y, YP] {
        let src = if n == name { tag(n, 0) } else { tag(n, 1) };
        order.push(g.output_position(&src)?);
    }
    let m = g.marginal_positions(&order);
    let back: Vec<(String, String)> = [X, XP, Y, YP]
        .iter()
        .zip(&order)
        .map(|(n, &p)| (g.outputs()[p].name().to_string(), n.to_string()))
        .collect();
    let map: Vec<(&str, &str)> = back.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    m.renamed(&map)
}

/// Returns `p~(x, x', y, y' | a, a')`, a non-signaling modification of the
/// b=1 honest table whose single commit marginals equal those of b=0 and
/// which is within twice the hiding distance of the original at every input.
pub fn adjust_marginal(s: &CommitmentScheme) -> Result<CondTable> {
    two_prover(s)?;
    let p1 = adjust_one(s, s.honest(1), 0)?;
    adjust_one(s, &p1, 1)
}

/// Output of [`restore_hiding`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestoredHiding {
    /// `p''(x, x', y, y' | a, a')`.
    pub table: CondTable,
    /// `r(y | x, a, a')`, used on the event that the glued commit outputs differ.
    pub r: CondTable,
    /// `r'(y' | x', a, a')`.
    pub r_prime: CondTable,
}

fn single_marginals_match(s: &CommitmentScheme) -> Result<bool> {
    for n in [X, XP] {
        if s.honest(0).marginal(&[n])? != s.honest(1).marginal(&[n])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Requires the single commit marginals of b=0 and b=1 to match. Returns a
/// non-signaling `p''` whose joint commit marginal equals that of b=0 and
/// which is within the hiding distance of the b=1 table at every input.
///
/// With `G` the glued honest tables and `L` the event `x_0 = x_1, x'_0 = x'_1`:
///
/// `p''(u, u', v, v') = G(L, x_1=u, x'_1=u', y_1=v, y'_1=v') + G(not L, x_0=u, x'_0=u') r(v|u) r'(v'|u')`
///
/// with `r(v|u) = G(not L, x_1=u, y_1=v) / G(not L, x_0=u)`, uniform where
/// the denominator vanishes, and `r'` likewise.
pub fn restore_hiding(s: &CommitmentScheme) -> Result<RestoredHiding> {
    two_prover(s)?;
    if !single_marginals_match(s)? {
        return Err(Error::Precondition(
            "restore_hiding needs p(x_0|a,a') = p(x_1|a,a') and p(x'_0|a,a') = p(x'_1|a,a')".into(),
        ));
    }
    let g = glue_honest(s)?;
    let h1 = s.honest(1);
    let sz = h1.out_radix().sizes().to_vec();
    let (nx, nxp, ny, nyp) = (sz[0], sz[1], sz[2], sz[3]);
    let n_in = h1.input_len();
    let mut table = Vec::with_capacity(h1.entries().len());
    let mut r_rows = Vec::with_capacity(n_in * nx * ny);
    let mut rp_rows = Vec::with_capacity(n_in * nxp * nyp);
    for i in 0..n_in {
        let z = rational::zero;
        let mut lam = vec![z(); h1.output_len()];
        let mut off_commit = vec![z(); nx * nxp];
        let mut off_x1y1 = vec![z(); nx * ny];
        let mut off_x0 = vec![z(); nx];
        let mut off_xp1yp1 = vec![z(); nxp * nyp];
        let mut off_xp0 = vec![z(); nxp];
        for (o, v) in g.row(i).iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let t = g.out_radix().decode(o);
            let (x0, xp0, x1, xp1, y1, yp1) = (t[0], t[1], t[2], t[3], t[6], t[7]);
            if x0 == x1 && xp0 == xp1 {
                lam[h1.out_radix().encode(&[x1, xp1, y1, yp1])] += v;
            } else {
                off_commit[x0 * nxp + xp0] += v;
                off_x1y1[x1 * ny + y1] += v;
                off_x0[x0] += v;
                off_xp1yp1[xp1 * nyp + yp1] += v;
                off_xp0[xp0] += v;
            }
        }
        let cond = |joint: &[Rational], given: &[Rational], n: usize| -> Vec<Vec<Rational>> {
            given
                .iter()
                .enumerate()
                .map(|(u, den)| {
                    (0..n)
                        .map(|v| {
                            if den.is_zero() {
                                rational::ratio(1, n as i64)
                            } else {
                                &joint[u * n + v] / den
                            }
                        })
                        .collect()
                })
                .collect()
        };
        let r = cond(&off_x1y1, &off_x0, ny);
        let rp = cond(&off_xp1yp1, &off_xp0, nyp);
        for (o, l) in lam.iter().enumerate() {
            let t = h1.out_radix().decode(o);
            let (u, up, v, vp) = (t[0], t[1], t[2], t[3]);
            let extra = &off_commit[u * nxp + up] * &r[u][v] * &rp[up][vp];
            table.push(l + extra);
        }
        r_rows.extend(r.into_iter().flatten());
        rp_rows.extend(rp.into_iter().flatten());
    }
    let qs = s.questions().outputs().to_vec();
    let with_cond = |c: &Alphabet| {
        let mut v = vec![c.clone()];
        v.extend(qs.iter().cloned());
        v
    };
    let o = h1.outputs();
    // r rows are ordered (input, x, y): reorder to the (x, a, a') input layout
    let reorder = |rows: Vec<Rational>, nc: usize, nv: usize| {
        let mut out = vec![rational::zero(); rows.len()];
        for i in 0..n_in {
            for c in 0..nc {
                for v in 0..nv {
                    out[(c * n_in + i) * nv + v] = rows[(i * nc + c) * nv + v].clone();
                }
            }
        }
        out
    };
    Ok(RestoredHiding {
        table: CondTable::new(o.to_vec(), qs.clone(), table)?,
        r: CondTable::new(vec![o[2].clone()], with_cond(&o[0]), reorder(r_rows, nx, ny))?,
        r_prime: CondTable::new(vec![o[3].clone()], with_cond(&o[1]), reorder(rp_rows, nxp, nyp))?,
    })
}

/// Which construction [`attack_eps`] used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackPath {
    /// Simple scheme: one-round gluing, loss at most the hiding distance.
    Simple,
    /// Perfectly hiding: direct gluing, no loss.
    Perfect,
    /// Single commit marginals already match: hiding restored, loss at most
    /// the hiding distance.
    MatchedMarginals,
    /// Marginals adjusted, then hiding restored: loss at most five times the
    /// hiding distance.
    Full,
}

impl AttackPath {
    /// Factor `k` in the guarantee `Prob*[Acc|1] >= Prob[Acc|1] - k * eps`.
    pub fn loss_factor(self) -> i64 {
        match self {
            AttackPath::Simple | AttackPath::MatchedMarginals => 1,
            AttackPath::Perfect => 0,
            AttackPath::Full => 5,
        }
    }
}

/// Synthesizes a non-signaling attack on any two-prover scheme.
pub fn attack_eps(s: &CommitmentScheme) -> Result<(AttackStrategy, AttackPath)> {
    two_prover(s)?;
    if s.is_simple() {
        return Ok((attack_simple(s)?, AttackPath::Simple));
    }
    if s.hiding_distance().is_zero() {
        return Ok((attack_perfect(s)?, AttackPath::Perfect));
    }
    let (base, path) = if single_marginals_match(s)? {
        (s.clone(), AttackPath::MatchedMarginals)
    } else {
        (s.with_honest1(adjust_marginal(s)?)?, AttackPath::Full)
    };
    let restored = restore_hiding(&base)?;
    let perfect = base.with_honest1(restored.table)?;
    Ok((attack_perfect(&perfect)?, path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::schemes::*;

    #[test]
    fn simple_attack_values() {
        let s = make_intro_scheme(1).unwrap();
        let q = attack_simple(&s).unwrap();
        assert!(q.check().unwrap().passed);
        assert_eq!(s.binding_value(&q).unwrap(), (int(1), int(1)));
        for (n, m, v1) in [(4, 1, ratio(3, 4)), (2, 1, ratio(1, 2))] {
            let s = make_tight_scheme(n, m).unwrap();
            let q = attack_simple(&s).unwrap();
            assert_eq!(s.binding_value(&q).unwrap(), (int(1), v1));
        }
    }

    #[test]
    fn simple_attack_rejects_general_schemes() {
        let s = make_two_sided_scheme(2, 1).unwrap();
        assert!(matches!(attack_simple(&s), Err(Error::Precondition(_))));
    }

    #[test]
    fn perfect_attack_on_intro_scheme() {
        for n in 1..=2 {
            let s = make_intro_scheme(n).unwrap();
            let q = attack_perfect(&s).unwrap();
            assert!(nonsig::check_ns_two_round(q.table()).unwrap().passed);
            assert_eq!(s.binding_value(&q).unwrap(), (int(1), int(1)));
        }
        let e = attack_perfect(&make_tight_scheme(4, 1).unwrap());
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn honest_table_as_strategy() {
        // the b=0 honest table used for both bits: (1, Prob[Acc|1] under p_0)
        let s = make_intro_scheme(1).unwrap();
        let (outs, ins) = s.strategy_alphabets(StrategyKind::OneRound).unwrap();
        let h0 = s.honest(0);
        let t = CondTable::from_fn(outs, ins, |o, i| h0.at(&[o[0], 0, 0, o[1]], &[i[0], 0]).clone()).unwrap();
        let q = AttackStrategy::new(StrategyKind::OneRound, t).unwrap();
        assert_eq!(s.binding_value(&q).unwrap(), (int(1), ratio(1, 2)));
    }

    #[test]
    fn signaling_strategy_is_refused() {
        let s = make_intro_scheme(1).unwrap();
        let (outs, ins) = s.strategy_alphabets(StrategyKind::OneRound).unwrap();
        // x := b signals the opening bit to the committer
        let t = CondTable::deterministic(outs, ins, |i| vec![i[1], 0]).unwrap();
        let q = AttackStrategy::new(StrategyKind::OneRound, t).unwrap();
        assert!(matches!(s.binding_value(&q), Err(Error::Signaling(_))));
    }

    #[test]
    fn adjust_marginal_on_tight_scheme() {
        let s = make_two_sided_scheme(2, 1).unwrap();
        let eps = s.hiding_distance();
        let pt = adjust_marginal(&s).unwrap();
        for n in [X, XP] {
            assert_eq!(pt.marginal(&[n]).unwrap(), s.honest(0).marginal(&[n]).unwrap());
        }
        for i in 0..pt.input_len() {
            assert!(pt.stat_distance(s.honest(1), i).unwrap() <= int(2) * &eps);
        }
        let ns = nonsig::check_ns_partition(&pt, &[0, 2], &[0], &[1, 3], &[1]);
        assert!(ns.passed);
    }

    #[test]
    fn adjust_marginal_keeps_perfectly_hiding_tables() {
        let s = make_intro_scheme(2).unwrap();
        assert_eq!(adjust_marginal(&s).unwrap(), *s.honest(1));
    }

    /// Unit questions; `x, x'` correlated as (3/8, 1/8, 1/8, 3/8) for b=0 and
    /// uniform for b=1, openings copy the commitments.
    fn toy_scheme() -> CommitmentScheme {
        let q = CondTable::uniform(vec![Alphabet::unit(A), Alphabet::unit(AP)], vec![]).unwrap();
        let outs = vec![
            Alphabet::bits(X),
            Alphabet::bits(XP),
            Alphabet::bits(Y),
            Alphabet::bits(YP),
        ];
        let honest = |b: usize| {
            CondTable::from_fn(outs.clone(), q.outputs().to_vec(), |o, _| {
                if o[2] != o[0] || o[3] != o[1] {
                    int(0)
                } else if b == 1 {
                    ratio(1, 4)
                } else if o[0] == o[1] {
                    ratio(3, 8)
                } else {
                    ratio(1, 8)
                }
            })
            .unwrap()
        };
        CommitmentScheme::with_predicate(Provers::Two, q.clone(), honest(0), honest(1), |o, _| {
            o[2] == o[0] && o[3] == o[1]
        })
        .unwrap()
    }

    #[test]
    fn restore_hiding_on_toy_scheme() {
        let s = toy_scheme();
        assert_eq!(s.hiding_distance(), ratio(1, 4));
        let r = restore_hiding(&s).unwrap();
        assert_eq!(r.table.marginal(&[X, XP]).unwrap(), s.commit_marginal(0));
        assert!(r.table.stat_distance(s.honest(1), 0).unwrap() <= ratio(1, 4));
        for n in [X, XP] {
            assert_eq!(r.table.marginal(&[n]).unwrap(), s.honest(1).marginal(&[n]).unwrap());
        }
        assert_eq!(r.r.output_len(), 2);
    }

    #[test]
    fn restore_hiding_is_identity_when_perfectly_hiding() {
        let s = make_intro_scheme(2).unwrap();
        assert_eq!(restore_hiding(&s).unwrap().table, *s.honest(1));
    }

    #[test]
    fn restore_hiding_requires_matching_singles() {
        let s = make_two_sided_scheme(4, 1).unwrap();
        assert!(matches!(restore_hiding(&s), Err(Error::Precondition(_))));
    }

    #[test]
    fn eps_attack_paths() {
        let (_, p) = attack_eps(&make_tight_scheme(4, 1).unwrap()).unwrap();
        assert_eq!(p, AttackPath::Simple);
        let (_, p) = attack_eps(&toy_scheme()).unwrap();
        assert_eq!(p, AttackPath::MatchedMarginals);
        let s = make_two_sided_scheme(4, 1).unwrap();
        let (q, p) = attack_eps(&s).unwrap();
        assert_eq!(p, AttackPath::Full);
        assert!(q.check().unwrap().passed);
        let (v0, v1) = s.binding_value(&q).unwrap();
        assert_eq!(v0, s.honest_accept_prob(0));
        assert!(v1 >= s.honest_accept_prob(1) - int(5) * s.hiding_distance());
    }

    #[test]
    fn strategy_json_roundtrip() {
        let q = attack_simple(&make_tight_scheme(3, 1).unwrap()).unwrap();
        assert_eq!(AttackStrategy::from_json(&q.to_json()).unwrap(), q);
        let bad = r#"{"kind":"two-round","table":{"outputs":[{"name":"x","symbols":["0"]}],"entries":{"x=0":"1"}}}"#;
        assert!(AttackStrategy::from_json(bad).is_err());
    }
}
