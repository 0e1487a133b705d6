//! Dense two-phase primal simplex over exact rationals.
//!
//! Variables are free; each is split as `x = u - v` with `u, v >= 0`, and
//! every inequality row receives a slack. Bland's rule (lowest eligible
//! index for both entering and leaving variables) rules out cycling and
//! makes every answer a deterministic function of the input rows.

use super::poly::HPolyhedron;
use crate::scalar::{dot, zeros, Scalar};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { point: Vec<Scalar>, value: Scalar },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn point(&self) -> Option<&[Scalar]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

struct Tableau {
    a: Vec<Vec<Scalar>>,
    rhs: Vec<Scalar>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Scalar::one() / &self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v *= &inv;
        }
        self.rhs[r] *= &inv;
        let prow = self.a[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for (v, pv) in self.a[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost · z` over the current basis. `false` means unbounded.
    fn optimize(&mut self, cost: &[Scalar], allowed: usize) -> bool {
        loop {
            let cb: Vec<Scalar> = self.basis.iter().map(|&b| cost[b].clone()).collect();
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let col: Vec<Scalar> = self.a.iter().map(|row| row[j].clone()).collect();
                (&cost[j] - dot(&cb, &col)).is_negative()
            });
            let Some(j) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Scalar)> = None;
            for i in 0..self.a.len() {
                if self.a[i][j].is_positive() {
                    let ratio = &self.rhs[i] / &self.a[i][j];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, j),
                None => return false,
            }
        }
    }

    fn value_of(&self, col: usize) -> Scalar {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map(|r| self.rhs[r].clone())
            .unwrap_or_else(Scalar::zero)
    }
}

/// Minimizes `objective · x` over `poly`.
pub fn minimize(objective: &[Scalar], poly: &HPolyhedron) -> LpOutcome {
    let n = poly.dim();
    assert_eq!(objective.len(), n, "objective length must match dimension");
    let ineqs = poly.ineqs();
    let eqs = poly.eqs();
    let m_in = ineqs.len();
    let m = m_in + eqs.len();
    // columns: u (n), v (n), slacks (m_in), artificials (m)
    let n_struct = 2 * n + m_in;
    let ncols = n_struct + m;
    let mut a = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, row) in ineqs.iter().chain(eqs.iter()).enumerate() {
        let mut r = zeros(ncols);
        for k in 0..n {
            r[k] = row.coeffs[k].clone();
            r[n + k] = -row.coeffs[k].clone();
        }
        if i < m_in {
            r[2 * n + i] = Scalar::one();
        }
        let mut b = row.rhs.clone();
        if b.is_negative() {
            for v in r.iter_mut() {
                *v = -v.clone();
            }
            b = -b;
        }
        r[n_struct + i] = Scalar::one();
        a.push(r);
        rhs.push(b);
    }
    let mut t = Tableau {
        a,
        rhs,
        basis: (n_struct..ncols).collect(),
    };

    // Phase 1
    let mut cost1 = zeros(ncols);
    for c in cost1.iter_mut().skip(n_struct) {
        *c = Scalar::one();
    }
    t.optimize(&cost1, ncols);
    let infeasibility: Scalar = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(&b, _)| b >= n_struct)
        .map(|(_, v)| v.clone())
        .sum();
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible;
    }
    // Drive zero-level artificials out of the basis or drop redundant rows.
    let mut r = 0;
    while r < t.a.len() {
        if t.basis[r] >= n_struct {
            match (0..n_struct).find(|&j| !t.a[r][j].is_zero()) {
                Some(j) => {
                    t.pivot(r, j);
                    r += 1;
                }
                None => {
                    t.a.remove(r);
                    t.rhs.remove(r);
                    t.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }

    // Phase 2
    let mut cost2 = zeros(ncols);
    for k in 0..n {
        cost2[k] = objective[k].clone();
        cost2[n + k] = -objective[k].clone();
    }
    if !t.optimize(&cost2, n_struct) {
        return LpOutcome::Unbounded;
    }
    let point: Vec<Scalar> = (0..n).map(|k| t.value_of(k) - t.value_of(n + k)).collect();
    let value = dot(objective, &point);
    LpOutcome::Optimal { point, value }
}

pub fn maximize(objective: &[Scalar], poly: &HPolyhedron) -> LpOutcome {
    let negated: Vec<Scalar> = objective.iter().map(|c| -c).collect();
    match minimize(&negated, poly) {
        LpOutcome::Optimal { point, value } => LpOutcome::Optimal { point, value: -value },
        other => other,
    }
}

/// Any point of `poly`, or `None` when it is empty.
pub fn find_point(poly: &HPolyhedron) -> Option<Vec<Scalar>> {
    match minimize(&zeros(poly.dim()), poly) {
        LpOutcome::Optimal { point, .. } => Some(point),
        _ => None,
    }
}

/// Lexicographically smallest point: minimizes `x_0`, fixes it, then `x_1`, ...
/// Coordinates that are unbounded below are left free and skipped.
pub fn lex_min_point(poly: &HPolyhedron) -> Option<Vec<Scalar>> {
    let mut work = poly.clone();
    let mut last = find_point(&work)?;
    for k in 0..poly.dim() {
        let obj = crate::scalar::unit(poly.dim(), k);
        if let LpOutcome::Optimal { point, value } = minimize(&obj, &work) {
            work = work.with_eq(obj, value);
            last = point;
        }
    }
    Some(last)
}
