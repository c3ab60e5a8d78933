//! Two-phase primal simplex on a dense fraction-free tableau.
//!
//! Solves `max c.x` subject to `A x = b`, `x >= 0`, exactly. Every tableau row
//! is an integer equation kept primitive (entries divided by their gcd), with
//! a positive coefficient on its basic variable; ratios are compared by cross
//! multiplication. Entering columns follow the largest reduced cost, and ties
//! in the ratio test are broken by the lexicographic rule against a symbolic
//! perturbation of the right-hand side, which rules out cycling.
//!
//! The integer type is generic so callers can run on `i128` first and retry
//! on `BigInt` when an intermediate value overflows.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

pub(crate) trait Int: Clone + Ord {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    /// Nonnegative gcd.
    fn gcd(&self, o: &Self) -> Option<Self>;
    fn div_exact(&self, o: &Self) -> Self;
}

impl Int for i128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
    fn is_positive(&self) -> bool {
        *self > 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn gcd(&self, o: &Self) -> Option<Self> {
        Some(Integer::gcd(&self.checked_abs()?, &o.checked_abs()?))
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

impl Int for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn gcd(&self, o: &Self) -> Option<Self> {
        Some(Integer::gcd(self, o))
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

/// Equality row `sum coeffs = rhs` over variables `0..n`.
pub(crate) struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

/// Scales a sparse rational vector of length `len` to a primitive integer
/// vector, returning it with the positive scale factor used.
fn integerize<I: Int>(len: usize, entries: &[(usize, Rational)]) -> Option<(Vec<I>, BigInt)> {
    let lcm = entries.iter().fold(BigInt::one(), |l, (_, v)| l.lcm(v.denom()));
    let mut big = vec![<BigInt as Zero>::zero(); len];
    for (k, v) in entries {
        big[*k] += v.numer() * (&lcm / v.denom());
    }
    let g = big.iter().fold(lcm.clone(), |g, v| Integer::gcd(&g, v));
    let out = big.iter().map(|v| I::from_big(&(v / &g))).collect::<Option<Vec<_>>>()?;
    Some((out, lcm / g))
}

/// Divides the nonzero entries (and `extra`) by their common gcd.
fn reduce<I: Int>(row: &mut [I], extra: Option<&mut I>) -> Option<()> {
    let mut g = match &extra {
        Some(e) => (*e).clone(),
        None => I::zero(),
    };
    for x in row.iter() {
        if g.is_one() {
            return Some(());
        }
        if !x.is_zero() {
            g = g.gcd(x)?;
        }
    }
    if g.is_zero() || g.is_one() {
        return Some(());
    }
    for x in row.iter_mut() {
        if !x.is_zero() {
            *x = x.div_exact(&g);
        }
    }
    if let Some(e) = extra {
        *e = e.div_exact(&g);
    }
    Some(())
}

/// `row := a*row - f*prow`, where `prow` is nonzero only at `nz`.
fn combine<I: Int>(row: &mut [I], a: &I, f: &I, prow: &[I], nz: &[usize]) -> Option<()> {
    if !a.is_one() {
        for x in row.iter_mut() {
            if !x.is_zero() {
                *x = x.mul(a)?;
            }
        }
    }
    for &k in nz {
        row[k] = row[k].sub(&f.mul(&prow[k])?)?;
    }
    Some(())
}

#[derive(Clone)]
struct Tableau<I> {
    n: usize,
    /// Each row holds `n` structural coefficients, the right-hand side, then
    /// the perturbation block used by the lexicographic ratio test. During
    /// phase 1 the block doubles as the artificial columns.
    rows: Vec<Vec<I>>,
    /// Basic column per row; indices above `n` are artificials.
    basis: Vec<usize>,
    /// Reduced costs times `scale`, with minus the objective at index `n`.
    d: Vec<I>,
    scale: I,
}

impl<I: Int> Tableau<I> {
    fn is_artificial(&self, b: usize) -> bool {
        b > self.n
    }

    fn coef(&self, r: usize) -> &I {
        &self.rows[r][self.basis[r]]
    }

    fn pivot(&mut self, p: usize, j: usize) -> Option<()> {
        if self.rows[p][j].is_negative() {
            for x in self.rows[p].iter_mut() {
                if !x.is_zero() {
                    *x = x.neg()?;
                }
            }
        }
        let prow = std::mem::take(&mut self.rows[p]);
        let piv = prow[j].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&k| !prow[k].is_zero()).collect();
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r == p || row[j].is_zero() {
                continue;
            }
            let g = piv.gcd(&row[j])?;
            let (a, f) = (piv.div_exact(&g), row[j].div_exact(&g));
            combine(row, &a, &f, &prow, &nz)?;
            reduce(row, None)?;
        }
        if !self.d[j].is_zero() {
            let g = piv.gcd(&self.d[j])?;
            let (a, f) = (piv.div_exact(&g), self.d[j].div_exact(&g));
            combine(&mut self.d, &a, &f, &prow, &nz)?;
            self.scale = self.scale.mul(&a)?;
            reduce(&mut self.d, Some(&mut self.scale))?;
        }
        self.rows[p] = prow;
        self.basis[p] = j;
        Some(())
    }

    fn entering(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for j in 0..self.n {
            if self.d[j].is_positive() && best.is_none_or(|b| self.d[j] > self.d[b]) {
                best = Some(j);
            }
        }
        best
    }

    /// Compares `rows[r][k] / rows[r][j]` with `rows[s][k] / rows[s][j]`,
    /// both denominators positive.
    fn cmp_ratio(&self, j: usize, k: usize, r: usize, s: usize) -> Option<Ordering> {
        let (a, b) = (&self.rows[r], &self.rows[s]);
        if a[k].is_zero() && b[k].is_zero() {
            return Some(Ordering::Equal);
        }
        Some(a[k].mul(&b[j])?.cmp(&b[k].mul(&a[j])?))
    }

    /// Row minimizing `rhs / a_rj` over `a_rj > 0`, ties broken
    /// lexicographically; `None` if unbounded.
    fn leaving(&self, j: usize) -> Option<Option<usize>> {
        let mut best: Option<usize> = None;
        for r in 0..self.rows.len() {
            if !self.rows[r][j].is_positive() {
                continue;
            }
            let Some(b) = best else {
                best = Some(r);
                continue;
            };
            let mut ord = self.cmp_ratio(j, self.n, r, b)?;
            let mut k = self.n + 1;
            while ord == Ordering::Equal && k < self.rows[r].len() {
                ord = self.cmp_ratio(j, k, r, b)?;
                k += 1;
            }
            if ord == Ordering::Less {
                best = Some(r);
            }
        }
        Some(best)
    }

    /// Runs pivots until optimal; returns `false` if unbounded. With
    /// `feasibility`, stops as soon as the objective reaches zero.
    fn optimize(&mut self, feasibility: bool) -> Option<bool> {
        while let Some(j) = self.entering() {
            if feasibility && self.d[self.n].is_zero() {
                break;
            }
            let Some(p) = self.leaving(j)? else {
                return Some(false);
            };
            self.pivot(p, j)?;
        }
        Some(true)
    }

    /// Pivots the columns of `support` into the basis. Succeeds when the
    /// resulting basis is feasible with every remaining artificial at zero.
    fn crash(&mut self, support: &[usize]) -> Option<bool> {
        for &j in support {
            let Some(r) =
                (0..self.rows.len()).find(|&r| self.is_artificial(self.basis[r]) && !self.rows[r][j].is_zero())
            else {
                return Some(false);
            };
            self.pivot(r, j)?;
        }
        Some(self.rows.iter().zip(&self.basis).all(|(row, &b)| {
            let v = &row[self.n];
            if self.is_artificial(b) {
                v.is_zero()
            } else {
                !v.is_negative()
            }
        }))
    }

    /// Restarts the perturbation block at the identity of the current basis.
    fn reset_perturbation(&mut self) {
        let (n, m) = (self.n, self.rows.len());
        for r in 0..m {
            let c = self.coef(r).clone();
            let row = &mut self.rows[r];
            row.truncate(n + 1);
            row.resize(n + 1 + m, I::zero());
            row[n + 1 + r] = c;
        }
        self.d.truncate(n + 1);
        self.d.resize(n + 1 + m, I::zero());
    }

    /// Phase 2 reduced costs of `objective` against the current basis.
    fn price(&mut self, objective: &[Rational]) -> Option<()> {
        let entries: Vec<(usize, Rational)> = objective
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.clone()))
            .collect();
        let width = self.d.len();
        let (d, scale) = integerize::<I>(width, &entries)?;
        self.d = d;
        self.scale = I::from_big(&scale)?;
        for r in 0..self.rows.len() {
            let b = self.basis[r];
            if self.d[b].is_zero() {
                continue;
            }
            let coef = self.coef(r).clone();
            let g = coef.gcd(&self.d[b])?;
            let (a, f) = (coef.div_exact(&g), self.d[b].div_exact(&g));
            let nz: Vec<usize> = (0..width).filter(|&k| !self.rows[r][k].is_zero()).collect();
            combine(&mut self.d, &a, &f, &self.rows[r], &nz)?;
            self.scale = self.scale.mul(&a)?;
            reduce(&mut self.d, Some(&mut self.scale))?;
        }
        Some(())
    }
}

/// Maximizes `objective` subject to `rows`, with `x >= 0`. A nonempty `start`
/// names the support of a feasible vertex and replaces phase 1 when valid.
/// `None` if an intermediate value does not fit `I`.
pub(crate) fn maximize<I: Int>(n: usize, objective: &[Rational], rows: &[Row], start: &[usize]) -> Option<Outcome> {
    let m = rows.len();
    let width = n + 1 + m;
    let mut dense = Vec::with_capacity(m);
    let mut phase1: Vec<Rational> = vec![Rational::zero(); n + 1];
    for (r, row) in rows.iter().enumerate() {
        let sign = if row.rhs.is_negative() {
            -Rational::one()
        } else {
            Rational::one()
        };
        let mut entries: Vec<(usize, Rational)> = row.coeffs.iter().map(|(j, c)| (*j, c * &sign)).collect();
        entries.push((n, &row.rhs * &sign));
        for (k, v) in &entries {
            phase1[*k] += v;
        }
        entries.push((n + 1 + r, Rational::one()));
        dense.push(integerize::<I>(width, &entries)?.0);
    }
    let mut t = Tableau {
        n,
        rows: dense,
        basis: (n + 1..width).collect(),
        d: vec![I::zero(); width],
        scale: I::from_big(&BigInt::one())?,
    };
    let mut warm = false;
    if !start.is_empty() {
        let mut c = t.clone();
        if c.crash(start)? {
            t = c;
            warm = true;
        }
    }
    if !warm {
        let entries: Vec<(usize, Rational)> = phase1.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
        let (d, scale) = integerize::<I>(width, &entries)?;
        t.d = d;
        t.scale = I::from_big(&scale)?;
        t.optimize(true)?;
        if !t.d[n].is_zero() {
            return Some(Outcome::Infeasible);
        }
    }
    // drive remaining artificials out of the basis, dropping redundant rows
    let mut r = 0;
    while r < t.rows.len() {
        if t.is_artificial(t.basis[r]) {
            match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => t.pivot(r, j)?,
                None => {
                    t.rows.swap_remove(r);
                    t.basis.swap_remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    t.reset_perturbation();
    t.price(objective)?;
    if !t.optimize(false)? {
        return Some(Outcome::Unbounded);
    }
    let mut x = vec![Rational::zero(); n];
    for r in 0..t.rows.len() {
        x[t.basis[r]] = Rational::new(t.rows[r][n].to_big(), t.coef(r).to_big());
    }
    let value = -Rational::new(t.d[n].to_big(), t.scale.to_big());
    Some(Outcome::Optimal { value, x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn row(coeffs: &[(usize, i64)], rhs: i64) -> Row {
        Row {
            coeffs: coeffs.iter().map(|&(j, c)| (j, int(c))).collect(),
            rhs: int(rhs),
        }
    }

    #[test]
    fn small_lp() {
        // max x0 + x1 s.t. x0 + 2 x1 + s0 = 4, 3 x0 + x1 + s1 = 6
        let rows = [row(&[(0, 1), (1, 2), (2, 1)], 4), row(&[(0, 3), (1, 1), (3, 1)], 6)];
        let obj = [int(1), int(1), int(0), int(0)];
        let Outcome::Optimal { value, x } = maximize::<i128>(4, &obj, &rows, &[]).unwrap() else {
            panic!()
        };
        assert_eq!(value, ratio(14, 5));
        assert_eq!(x[0], ratio(8, 5));
        assert_eq!(x[1], ratio(6, 5));
    }

    #[test]
    fn fractional_coefficients() {
        // max x0 s.t. x0/2 + x1/3 = 5/6
        let rows = [Row {
            coeffs: vec![(0, ratio(1, 2)), (1, ratio(1, 3))],
            rhs: ratio(5, 6),
        }];
        let Outcome::Optimal { value, .. } = maximize::<i128>(2, &[int(1), int(0)], &rows, &[]).unwrap() else {
            panic!()
        };
        assert_eq!(value, ratio(5, 3));
    }

    #[test]
    fn objective_scale_is_exact() {
        // the numerators share a factor that does not divide the common denominator
        let rows = [row(&[(0, 1)], 1), row(&[(1, 1)], 1)];
        let obj = [ratio(2, 3), int(2)];
        let Outcome::Optimal { value, .. } = maximize::<i128>(2, &obj, &rows, &[0, 1]).unwrap() else {
            panic!()
        };
        assert_eq!(value, ratio(8, 3));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let rows = [row(&[(0, 1)], 1), row(&[(0, 1)], 2)];
        assert_eq!(maximize::<i128>(1, &[int(1)], &rows, &[]).unwrap(), Outcome::Infeasible);
        let rows = [row(&[(0, 1), (1, -1)], 1)];
        assert_eq!(
            maximize::<i128>(2, &[int(0), int(1)], &rows, &[]).unwrap(),
            Outcome::Unbounded
        );
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let rows = [
            row(&[(0, 1), (1, 1)], 1),
            row(&[(0, 2), (1, 2)], 2),
            row(&[(0, -1), (1, -1)], -1),
        ];
        let Outcome::Optimal { value, .. } = maximize::<i128>(2, &[int(2), int(1)], &rows, &[]).unwrap() else {
            panic!()
        };
        assert_eq!(value, int(2));
    }

    #[test]
    fn warm_start_matches_phase_one() {
        let rows = [row(&[(0, 1), (1, 1), (2, 1)], 1), row(&[(0, 1), (3, 1)], 1)];
        let obj = [int(3), int(1), int(0), int(-1)];
        let cold = maximize::<i128>(4, &obj, &rows, &[]).unwrap();
        assert_eq!(maximize::<i128>(4, &obj, &rows, &[2, 3]).unwrap(), cold);
        // an infeasible hint falls back to phase 1
        let rows_bad = [row(&[(0, 1), (1, 1)], 1), row(&[(0, 1), (1, -1)], 0)];
        let Outcome::Optimal { value, .. } = maximize::<i128>(2, &[int(1), int(0)], &rows_bad, &[0]).unwrap() else {
            panic!()
        };
        assert_eq!(value, ratio(1, 2));
    }

    #[test]
    fn small_and_big_agree() {
        let rows = [row(&[(0, 3), (1, 2), (2, 1)], 7), row(&[(0, 1), (1, 5), (3, 1)], 9)];
        let obj = [int(2), int(3), int(0), int(0)];
        assert_eq!(
            maximize::<i128>(4, &obj, &rows, &[]).unwrap(),
            maximize::<BigInt>(4, &obj, &rows, &[]).unwrap()
        );
    }

    #[test]
    fn overflow_is_reported() {
        let huge = Rational::new(BigInt::from(1) << 200, BigInt::one());
        let rows = [Row {
            coeffs: vec![(0, huge)],
            rhs: int(1),
        }];
        assert!(maximize::<i128>(1, &[int(1)], &rows, &[]).is_none());
        let Outcome::Optimal { value, .. } = maximize::<BigInt>(1, &[int(1)], &rows, &[]).unwrap() else {
            panic!()
        };
        assert_eq!(value, Rational::new(BigInt::one(), BigInt::from(1) << 200));
    }
}
