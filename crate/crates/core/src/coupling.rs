//! Maximal couplings and gluing of distributions along shared coordinates.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::table::{Alphabet, CondTable, Event};

/// A joint distribution of two same-shaped tables whose disagreement
/// probability equals their statistical distance, at every input tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coupling {
    joint: CondTable,
    source_left: CondTable,
    source_right: CondTable,
}

impl Coupling {
    /// Joint table over the left outputs followed by the right outputs.
    pub fn joint(&self) -> &CondTable {
        &self.joint
    }

    pub fn source_left(&self) -> &CondTable {
        &self.source_left
    }

    pub fn source_right(&self) -> &CondTable {
        &self.source_right
    }

    /// The event that the left and right tuples differ.
    pub fn disagreement_event(&self) -> Event {
        let k = self.source_left.outputs().len();
        Event::from_predicate(&self.joint, |t| t[..k] != t[k..])
    }

    pub fn disagreement(&self, input: usize) -> Rational {
        self.joint
            .event_prob(&self.disagreement_event(), input)
            .expect("event built over the joint")
    }

    /// Exact check of both marginals and of the disagreement identity.
    pub fn verify(&self) -> Result<()> {
        let k = self.source_left.outputs().len();
        let left: Vec<usize> = (0..k).collect();
        let right: Vec<usize> = (k..2 * k).collect();
        if self.joint.marginal_positions(&left).entries() != self.source_left.entries() {
            return Err(Error::Certificate("left marginal of coupling differs".into()));
        }
        if self.joint.marginal_positions(&right).entries() != self.source_right.entries() {
            return Err(Error::Certificate("right marginal of coupling differs".into()));
        }
        for i in 0..self.joint.input_len() {
            let d = self.source_left.stat_distance(&self.source_right, i)?;
            if self.disagreement(i) != d {
                return Err(Error::Certificate(format!(
                    "disagreement differs from distance at [{}]",
                    self.joint.input_label(i)
                )));
            }
        }
        Ok(())
    }
}

/// Sparse maximal coupling of two probability vectors over the same index
/// set, as `(left, right, mass)` cells.
///
/// The diagonal carries `min(p, q)`; the residuals `p - min` and `q - min`
/// have disjoint supports and equal total mass `eps`, and are coupled as their
/// product scaled by `1 / eps`.
pub fn couple_rows(p: &[Rational], q: &[Rational]) -> Vec<(usize, usize, Rational)> {
    debug_assert_eq!(p.len(), q.len());
    let mut cells = Vec::new();
    let mut res_p = Vec::new();
    let mut res_q = Vec::new();
    for (w, (a, b)) in p.iter().zip(q).enumerate() {
        let m = if a < b { a } else { b };
        if !m.is_zero() {
            cells.push((w, w, m.clone()));
        }
        if a > m {
            res_p.push((w, a - m));
        }
        if b > m {
            res_q.push((w, b - m));
        }
    }
    let eps: Rational = res_p.iter().map(|(_, r)| r).sum();
    if !eps.is_zero() {
        for (w, rp) in &res_p {
            for (v, rq) in &res_q {
                cells.push((*w, *v, rp * rq / &eps));
            }
        }
    }
    cells
}

fn same_outputs(p: &CondTable, q: &CondTable) -> bool {
    p.outputs().len() == q.outputs().len() && p.outputs().iter().zip(q.outputs()).all(|(a, b)| a.same_symbols(b))
}

/// Maximal coupling of `p` and `q`, per input tuple. Both tables must share
/// their input alphabets and have outputs over the same symbols (under
/// distinct names).
pub fn maximal_coupling(p: &CondTable, q: &CondTable) -> Result<Coupling> {
    if !same_outputs(p, q) {
        return Err(Error::ShapeMismatch(
            "coupled tables need the same output symbols".into(),
        ));
    }
    if p.inputs() != q.inputs() {
        return Err(Error::ShapeMismatch("coupled tables need the same inputs".into()));
    }
    let n = p.output_len();
    let outputs: Vec<Alphabet> = p.outputs().iter().chain(q.outputs()).cloned().collect();
    let mut entries = vec![rational::zero(); n * n * p.input_len()];
    for i in 0..p.input_len() {
        for (w, v, m) in couple_rows(p.row(i), q.row(i)) {
            entries[i * n * n + w * n + v] = m;
        }
    }
    let joint = CondTable::new(outputs, p.inputs().to_vec(), entries)?;
    Ok(Coupling {
        joint,
        source_left: p.clone(),
        source_right: q.clone(),
    })
}

/// Glues `left` and `right` along the paired output alphabets in `along`
/// (`(left name, right name)`), independently for every input tuple.
///
/// The result has outputs: the left `along` alphabets, the right `along`
/// alphabets, the remaining left outputs, then the remaining right outputs.
/// Its value is `c(x0, x1) * left(y0 | x0) * right(y1 | x1)` where `c` is the
/// maximal coupling of the two `along` marginals. Conditionals at zero-mass
/// `x` values are never needed since the coupling puts no mass there.
pub fn glue(left: &CondTable, right: &CondTable, along: &[(&str, &str)]) -> Result<CondTable> {
    if left.inputs() != right.inputs() {
        return Err(Error::ShapeMismatch("glued tables need the same inputs".into()));
    }
    let lx = along
        .iter()
        .map(|(l, _)| left.output_position(l))
        .collect::<Result<Vec<_>>>()?;
    let rx = along
        .iter()
        .map(|(_, r)| right.output_position(r))
        .collect::<Result<Vec<_>>>()?;
    for (&l, &r) in lx.iter().zip(&rx) {
        if !left.outputs()[l].same_symbols(&right.outputs()[r]) {
            return Err(Error::ShapeMismatch(format!(
                "cannot glue {:?} to {:?}: different symbols",
                left.outputs()[l].name(),
                right.outputs()[r].name()
            )));
        }
    }
    let rest =
        |t: &CondTable, xs: &[usize]| -> Vec<usize> { (0..t.outputs().len()).filter(|p| !xs.contains(p)).collect() };
    let ly = rest(left, &lx);
    let ry = rest(right, &rx);

    let pick = |t: &CondTable, ps: &[usize]| -> Vec<Alphabet> { ps.iter().map(|&p| t.outputs()[p].clone()).collect() };
    let outputs: Vec<Alphabet> = pick(left, &lx)
        .into_iter()
        .chain(pick(right, &rx))
        .chain(pick(left, &ly))
        .chain(pick(right, &ry))
        .collect();

    let lx_proj = left.out_radix().projector(&lx);
    let ly_proj = left.out_radix().projector(&ly);
    let rx_proj = right.out_radix().projector(&rx);
    let ry_proj = right.out_radix().projector(&ry);
    let nx = lx_proj.target().len();
    let nyl = ly_proj.target().len();
    let nyr = ry_proj.target().len();
    let out_len = nx * nx * nyl * nyr;

    // Conditionals t(y | x) at one input, grouped by x, plus the x-marginal.
    let split = |row: &[Rational], xp: &crate::table::Projector, yp: &crate::table::Projector| {
        let mut marg = vec![rational::zero(); nx];
        let mut groups: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); nx];
        for (o, v) in row.iter().enumerate() {
            if !v.is_zero() {
                let x = xp.project(o);
                marg[x] += v;
                groups[x].push((yp.project(o), v.clone()));
            }
        }
        for (x, g) in groups.iter_mut().enumerate() {
            for (_, v) in g.iter_mut() {
                *v /= &marg[x];
            }
        }
        (marg, groups)
    };

    let mut entries = vec![rational::zero(); out_len * left.input_len()];
    for i in 0..left.input_len() {
        let (lm, lg) = split(left.row(i), &lx_proj, &ly_proj);
        let (rm, rg) = split(right.row(i), &rx_proj, &ry_proj);
        let base = i * out_len;
        for (x0, x1, c) in couple_rows(&lm, &rm) {
            for (y0, cl) in &lg[x0] {
                let lc = &c * cl;
                for (y1, cr) in &rg[x1] {
                    let k = ((x0 * nx + x1) * nyl + y0) * nyr + y1;
                    entries[base + k] += &lc * cr;
                }
            }
        }
    }
    CondTable::new(outputs, left.inputs().to_vec(), entries)
}
