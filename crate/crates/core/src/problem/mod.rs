//! Parametric convex vector optimization instances: objective `f(p, x)`,
//! constraint map `C(p)`, ordering cone `K`.

pub mod builtins;
pub mod random;
pub mod document;
pub mod solution;
pub mod validate;

use crate::error::{Error, Result};
use crate::geometry::{HPolyhedron, OrderCone, Row};
use crate::scalar::{dot, from_f64, int, mat_vec, to_f64, to_f64_vec, zeros, Matrix, Scalar};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use document::{parse_problem, parse_problem_str, to_document_string};
pub use solution::{check_solution_point, check_solution_variant, BasePoint};
pub use validate::{validate, validate_seeded, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub p: usize,
    pub x: usize,
    pub y: usize,
}

/// Shipped closed-form objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveBuiltin {
    /// `f(p, x) = (|x|, |x|)` with scalar `x`; nonsmooth at `x = 0`.
    AbsPair,
    /// `f(p, x) = (exp(x - p), exp(-x))` with scalar `p` and `x`.
    ExpTradeoff,
}

impl ObjectiveBuiltin {
    pub fn name(self) -> &'static str {
        match self {
            ObjectiveBuiltin::AbsPair => "abs_pair",
            ObjectiveBuiltin::ExpTradeoff => "exp_tradeoff",
        }
    }

    fn check_dims(self, d: Dims) -> Result<()> {
        let ok = match self {
            ObjectiveBuiltin::AbsPair => d.x == 1 && d.y == 2,
            ObjectiveBuiltin::ExpTradeoff => d.p == 1 && d.x == 1 && d.y == 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("builtin objective {} does not fit dims {:?}", self.name(), d)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectiveSpec {
    /// `f(p, x) = Fp p + Fx x + c`.
    Affine { fp: Matrix, fx: Matrix, c: Vec<Scalar> },
    /// `f_i(z) = zᵀ Q_i z + l_i · z + c_i` with `z = (p, x)` and symmetric `Q_i`.
    Quadratic { q: Vec<Matrix>, linear: Matrix, constant: Vec<Scalar> },
    Builtin(ObjectiveBuiltin),
}

impl ObjectiveSpec {
    pub fn is_affine(&self) -> bool {
        matches!(self, ObjectiveSpec::Affine { .. })
    }

    /// Exact value, available for every variant except transcendental builtins.
    pub fn eval(&self, p: &[Scalar], x: &[Scalar]) -> Option<Vec<Scalar>> {
        match self {
            ObjectiveSpec::Affine { fp, fx, c } => {
                let a = mat_vec(fp, p);
                let b = mat_vec(fx, x);
                Some(a.iter().zip(&b).zip(c).map(|((u, v), w)| u + v + w).collect())
            }
            ObjectiveSpec::Quadratic { q, linear, constant } => {
                let z: Vec<Scalar> = p.iter().chain(x).cloned().collect();
                Some(
                    q.iter()
                        .zip(linear)
                        .zip(constant)
                        .map(|((qi, li), ci)| dot(&z, &mat_vec(qi, &z)) + dot(li, &z) + ci)
                        .collect(),
                )
            }
            ObjectiveSpec::Builtin(ObjectiveBuiltin::AbsPair) => {
                let a = x[0].abs();
                Some(vec![a.clone(), a])
            }
            ObjectiveSpec::Builtin(ObjectiveBuiltin::ExpTradeoff) => None,
        }
    }

    pub fn eval_f64(&self, p: &[f64], x: &[f64]) -> Vec<f64> {
        match self {
            ObjectiveSpec::Builtin(ObjectiveBuiltin::ExpTradeoff) => {
                vec![(x[0] - p[0]).exp(), (-x[0]).exp()]
            }
            ObjectiveSpec::Builtin(ObjectiveBuiltin::AbsPair) => vec![x[0].abs(), x[0].abs()],
            ObjectiveSpec::Affine { fp, fx, c } => {
                let mut out = to_f64_vec(c);
                for (i, o) in out.iter_mut().enumerate() {
                    *o += fp[i].iter().zip(p).map(|(a, b)| to_f64(a) * b).sum::<f64>();
                    *o += fx[i].iter().zip(x).map(|(a, b)| to_f64(a) * b).sum::<f64>();
                }
                out
            }
            ObjectiveSpec::Quadratic { q, linear, constant } => {
                let z: Vec<f64> = p.iter().chain(x).copied().collect();
                q.iter()
                    .zip(linear)
                    .zip(constant)
                    .map(|((qi, li), ci)| {
                        let mut v = to_f64(ci);
                        for (r, row) in qi.iter().enumerate() {
                            for (c, a) in row.iter().enumerate() {
                                v += to_f64(a) * z[r] * z[c];
                            }
                        }
                        v + li.iter().zip(&z).map(|(a, b)| to_f64(a) * b).sum::<f64>()
                    })
                    .collect()
            }
        }
    }

    /// Exact Jacobians `(∇_p f, ∇_x f)` as `n_y × n_p` and `n_y × n_x` matrices.
    /// `None` where the objective is not differentiable or not rational.
    pub fn jacobian(&self, p: &[Scalar], x: &[Scalar]) -> Option<(Matrix, Matrix)> {
        match self {
            ObjectiveSpec::Affine { fp, fx, .. } => Some((fp.clone(), fx.clone())),
            ObjectiveSpec::Quadratic { q, linear, .. } => {
                let np = p.len();
                let z: Vec<Scalar> = p.iter().chain(x).cloned().collect();
                let two = int(2);
                let rows: Vec<Vec<Scalar>> = q
                    .iter()
                    .zip(linear)
                    .map(|(qi, li)| {
                        mat_vec(qi, &z).iter().zip(li).map(|(a, b)| a * &two + b).collect()
                    })
                    .collect();
                Some(split_cols(&rows, np))
            }
            ObjectiveSpec::Builtin(ObjectiveBuiltin::AbsPair) => {
                if x[0].is_zero() {
                    return None;
                }
                let s = x[0].signum();
                let jp = vec![zeros(p.len()); 2];
                Some((jp, vec![vec![s.clone()], vec![s]]))
            }
            ObjectiveSpec::Builtin(ObjectiveBuiltin::ExpTradeoff) => None,
        }
    }

    /// Analytic Jacobians in floating point.
    pub fn jacobian_f64(&self, p: &[f64], x: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        match self {
            ObjectiveSpec::Builtin(ObjectiveBuiltin::ExpTradeoff) => {
                let a = (x[0] - p[0]).exp();
                let b = (-x[0]).exp();
                (vec![vec![-a], vec![0.0]], vec![vec![a], vec![-b]])
            }
            ObjectiveSpec::Builtin(ObjectiveBuiltin::AbsPair) => {
                let s = if x[0] > 0.0 { 1.0 } else if x[0] < 0.0 { -1.0 } else { 0.0 };
                (vec![vec![0.0; p.len()]; 2], vec![vec![s], vec![s]])
            }
            _ => {
                let ps: Vec<Scalar> = p.iter().map(|&v| from_f64(v)).collect();
                let xs: Vec<Scalar> = x.iter().map(|&v| from_f64(v)).collect();
                let (jp, jx) = self.jacobian(&ps, &xs).expect("polynomial objectives are differentiable");
                let conv = |m: Matrix| m.iter().map(|r| to_f64_vec(r)).collect::<Vec<_>>();
                (conv(jp), conv(jx))
            }
        }
    }

    fn check_dims(&self, d: Dims) -> Result<()> {
        let mismatch = |what: &str| Err(Error::DimensionMismatch(what.to_string()));
        match self {
            ObjectiveSpec::Affine { fp, fx, c } => {
                if fp.len() != d.y || fp.iter().any(|r| r.len() != d.p) {
                    return mismatch("objective.fp must be y × p");
                }
                if fx.len() != d.y || fx.iter().any(|r| r.len() != d.x) {
                    return mismatch("objective.fx must be y × x");
                }
                if c.len() != d.y {
                    return mismatch("objective.c must have length y");
                }
            }
            ObjectiveSpec::Quadratic { q, linear, constant } => {
                let n = d.p + d.x;
                if q.len() != d.y || q.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
                    return mismatch("objective.q must hold y matrices of size (p+x) × (p+x)");
                }
                if q.iter().any(|m| (0..n).any(|i| (0..n).any(|j| m[i][j] != m[j][i]))) {
                    return mismatch("objective.q matrices must be symmetric");
                }
                if linear.len() != d.y || linear.iter().any(|r| r.len() != n) {
                    return mismatch("objective.linear must be y × (p+x)");
                }
                if constant.len() != d.y {
                    return mismatch("objective.constant must have length y");
                }
            }
            ObjectiveSpec::Builtin(b) => b.check_dims(d)?,
        }
        Ok(())
    }
}

fn split_cols(rows: &[Vec<Scalar>], np: usize) -> (Matrix, Matrix) {
    let a = rows.iter().map(|r| r[..np].to_vec()).collect();
    let b = rows.iter().map(|r| r[np..].to_vec()).collect();
    (a, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=", alias = "le")]
    Le,
    #[serde(rename = "=", alias = "eq")]
    Eq,
}

/// `ap · p + ax · x + b (<= | =) 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineRow {
    #[serde(with = "crate::serde_scalar::vec")]
    pub ap: Vec<Scalar>,
    #[serde(with = "crate::serde_scalar::vec")]
    pub ax: Vec<Scalar>,
    #[serde(with = "crate::serde_scalar::one")]
    pub b: Scalar,
    pub rel: Relation,
}

impl AffineRow {
    pub fn le(ap: Vec<Scalar>, ax: Vec<Scalar>, b: Scalar) -> Self {
        AffineRow { ap, ax, b, rel: Relation::Le }
    }

    pub fn eval(&self, p: &[Scalar], x: &[Scalar]) -> Scalar {
        dot(&self.ap, p) + dot(&self.ax, x) + &self.b
    }

    /// Gradient with respect to `(p, x)`.
    pub fn gradient(&self) -> Vec<Scalar> {
        self.ap.iter().chain(&self.ax).cloned().collect()
    }
}

/// Polynomial in `t` with ascending coefficients.
pub type TPoly = Vec<Scalar>;

pub fn eval_tpoly(c: &[Scalar], t: &Scalar) -> Scalar {
    c.iter().rev().fold(Scalar::zero(), |acc, a| acc * t + a)
}

/// `g_t(p, x) = ap(t) · p + ax(t) · x + b(t) <= 0` for every `t ∈ [t_lo, t_hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiInfiniteFamily {
    #[serde(with = "crate::serde_scalar::mat")]
    pub ap: Vec<TPoly>,
    #[serde(with = "crate::serde_scalar::mat")]
    pub ax: Vec<TPoly>,
    #[serde(with = "crate::serde_scalar::vec")]
    pub b: TPoly,
    #[serde(with = "crate::serde_scalar::one")]
    pub t_lo: Scalar,
    #[serde(with = "crate::serde_scalar::one")]
    pub t_hi: Scalar,
}

impl SemiInfiniteFamily {
    pub fn degree(&self) -> usize {
        self.ap
            .iter()
            .chain(&self.ax)
            .chain(std::iter::once(&self.b))
            .map(|c| c.iter().rposition(|a| !a.is_zero()).unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// The affine row `g_t` for a fixed `t`.
    pub fn row_at(&self, t: &Scalar) -> AffineRow {
        AffineRow::le(
            self.ap.iter().map(|c| eval_tpoly(c, t)).collect(),
            self.ax.iter().map(|c| eval_tpoly(c, t)).collect(),
            eval_tpoly(&self.b, t),
        )
    }

    /// Coefficient vector of `t^k` over `(p, x, 1)`.
    fn coefficient(&self, k: usize) -> Vec<Scalar> {
        let get = |c: &TPoly| c.get(k).cloned().unwrap_or_else(Scalar::zero);
        self.ap.iter().chain(&self.ax).chain(std::iter::once(&self.b)).map(get).collect()
    }

    /// Finitely many `t` whose rows describe the family exactly: the endpoints,
    /// plus for quadratic families with parallel `t` and `t²` coefficient
    /// vectors the interior critical point of the scalar factor.
    pub fn reduction_points(&self) -> Result<Vec<Scalar>> {
        let mut ts = vec![self.t_lo.clone(), self.t_hi.clone()];
        match self.degree() {
            0 | 1 => {}
            2 => {
                let (g1, g2) = (self.coefficient(1), self.coefficient(2));
                // g2 is nonzero at degree 2; g1 = alpha * g2 is required
                let k = g2.iter().position(|a| !a.is_zero()).unwrap();
                let alpha = &g1[k] / &g2[k];
                if g1.iter().zip(&g2).any(|(a, b)| *a != &alpha * b) {
                    return Err(Error::NotPolyhedral(
                        "quadratic t-family whose t and t² coefficients are not parallel".into(),
                    ));
                }
                // scalar factor alpha t + t², critical at -alpha / 2
                let tc = -alpha / int(2);
                if tc > self.t_lo && tc < self.t_hi {
                    ts.push(tc);
                }
            }
            d => return Err(Error::NotPolyhedral(format!("t-family of degree {d} (at most 2 is supported)"))),
        }
        Ok(ts)
    }

    pub fn reduced_rows(&self) -> Result<Vec<AffineRow>> {
        Ok(self.reduction_points()?.iter().map(|t| self.row_at(t)).collect())
    }

    /// `t ↦ g_t(p, x)` as an ascending polynomial.
    pub fn value_poly(&self, p: &[Scalar], x: &[Scalar]) -> TPoly {
        let mut z: Vec<Scalar> = p.iter().chain(x).cloned().collect();
        z.push(Scalar::one());
        (0..3).map(|k| dot(&self.coefficient(k), &z)).collect()
    }
}

/// Shipped smooth convex constraint functions `g(p, x) <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothConstraint {
    /// `‖x‖² <= 0`; its feasible set is `{0}` and ACQ fails there.
    XSquared,
    /// `‖x‖² - 1 <= 0`.
    UnitBall,
    /// `‖x‖² - p₁ <= 0`.
    Paraboloid,
}

impl SmoothConstraint {
    pub fn name(self) -> &'static str {
        match self {
            SmoothConstraint::XSquared => "x_squared",
            SmoothConstraint::UnitBall => "unit_ball",
            SmoothConstraint::Paraboloid => "paraboloid",
        }
    }

    pub fn eval(self, p: &[Scalar], x: &[Scalar]) -> Scalar {
        let sq = dot(x, x);
        match self {
            SmoothConstraint::XSquared => sq,
            SmoothConstraint::UnitBall => sq - Scalar::one(),
            SmoothConstraint::Paraboloid => sq - &p[0],
        }
    }

    /// Gradient with respect to `(p, x)`.
    pub fn gradient(self, p: &[Scalar], x: &[Scalar]) -> Vec<Scalar> {
        let mut g = zeros(p.len());
        if self == SmoothConstraint::Paraboloid {
            g[0] = -Scalar::one();
        }
        g.extend(x.iter().map(|v| v * int(2)));
        g
    }

    /// Whether some point satisfies `g < 0` strictly (Slater's condition on
    /// `gph C`), which makes the linearization exact everywhere.
    pub fn has_slater_point(self) -> bool {
        self != SmoothConstraint::XSquared
    }

    fn check_dims(self, d: Dims) -> Result<()> {
        if self == SmoothConstraint::Paraboloid && d.p == 0 {
            return Err(Error::DimensionMismatch("paraboloid constraint needs p of dimension >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintSpec {
    Affine(Vec<AffineRow>),
    /// Semi-infinite families, plus optional ordinary affine rows.
    SemiInfinite { families: Vec<SemiInfiniteFamily>, rows: Vec<AffineRow> },
    Smooth(Vec<SmoothConstraint>),
}

impl ConstraintSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ConstraintSpec::Affine(_) => "affine",
            ConstraintSpec::SemiInfinite { .. } => "semi_infinite",
            ConstraintSpec::Smooth(_) => "builtin",
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        !matches!(self, ConstraintSpec::Smooth(_))
    }

    /// Affine rows describing `gph C` exactly; semi-infinite families are
    /// replaced by their reduction rows.
    pub fn polyhedral_rows(&self) -> Result<Vec<AffineRow>> {
        match self {
            ConstraintSpec::Affine(rows) => Ok(rows.clone()),
            ConstraintSpec::SemiInfinite { families, rows } => {
                let mut out = Vec::new();
                for f in families {
                    out.extend(f.reduced_rows()?);
                }
                out.extend(rows.iter().cloned());
                Ok(out)
            }
            ConstraintSpec::Smooth(_) => Err(Error::UnsupportedConstraintKind(
                "smooth builtin constraints have no polyhedral graph".into(),
            )),
        }
    }

    /// Exact feasibility of `(p, x)`.
    pub fn is_feasible(&self, p: &[Scalar], x: &[Scalar]) -> Result<bool> {
        match self {
            ConstraintSpec::Smooth(gs) => Ok(gs.iter().all(|g| !g.eval(p, x).is_positive())),
            _ => Ok(self.polyhedral_rows()?.iter().all(|r| {
                let v = r.eval(p, x);
                match r.rel {
                    Relation::Le => !v.is_positive(),
                    Relation::Eq => v.is_zero(),
                }
            })),
        }
    }

    fn check_dims(&self, d: Dims) -> Result<()> {
        let bad_row = |r: &AffineRow| r.ap.len() != d.p || r.ax.len() != d.x;
        match self {
            ConstraintSpec::Affine(rows) => {
                if rows.iter().any(bad_row) {
                    return Err(Error::DimensionMismatch("constraint row needs ap of length p and ax of length x".into()));
                }
            }
            ConstraintSpec::SemiInfinite { families, rows } => {
                if rows.iter().any(bad_row) {
                    return Err(Error::DimensionMismatch("constraint row needs ap of length p and ax of length x".into()));
                }
                for f in families {
                    if f.ap.len() != d.p || f.ax.len() != d.x {
                        return Err(Error::DimensionMismatch("family needs p polynomials in ap and x in ax".into()));
                    }
                    if f.t_lo >= f.t_hi {
                        return Err(Error::InvalidArgument("family interval needs t_lo < t_hi".into()));
                    }
                    f.reduction_points()?;
                }
            }
            ConstraintSpec::Smooth(gs) => {
                for g in gs {
                    g.check_dims(d)?;
                }
            }
        }
        Ok(())
    }
}

/// Ordering cone as written in a problem document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeSpec {
    /// `cone(generators)`.
    Generators(#[serde(with = "crate::serde_scalar::mat")] Vec<Vec<Scalar>>),
    /// `{y : a · y >= 0 for each row a}`.
    Halfspaces(#[serde(with = "crate::serde_scalar::mat")] Vec<Vec<Scalar>>),
}

impl ConeSpec {
    pub fn build(&self, dim: usize) -> Result<OrderCone> {
        let rows = match self {
            ConeSpec::Generators(g) | ConeSpec::Halfspaces(g) => g,
        };
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("cone vectors must have length y".into()));
        }
        let cone = match self {
            ConeSpec::Generators(g) => crate::geometry::PolyCone::from_generators(dim, g, &[]),
            ConeSpec::Halfspaces(h) => {
                let neg: Vec<Vec<Scalar>> = h.iter().map(|r| crate::scalar::neg(r)).collect();
                crate::geometry::PolyCone::from_rows(dim, &neg, &[])
            }
        };
        OrderCone::new(cone)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParametricProblem {
    pub name: Option<String>,
    pub dims: Dims,
    pub cone_spec: ConeSpec,
    pub cone: OrderCone,
    pub cone_tilde_spec: Option<ConeSpec>,
    pub cone_tilde: Option<OrderCone>,
    pub objective: ObjectiveSpec,
    pub constraints: ConstraintSpec,
    pub base_point: Option<(Vec<Scalar>, Vec<Scalar>)>,
}

impl ParametricProblem {
    pub fn new(
        dims: Dims,
        cone_spec: ConeSpec,
        objective: ObjectiveSpec,
        constraints: ConstraintSpec,
    ) -> Result<Self> {
        let cone = cone_spec.build(dims.y)?;
        objective.check_dims(dims)?;
        constraints.check_dims(dims)?;
        Ok(ParametricProblem {
            name: None,
            dims,
            cone_spec,
            cone,
            cone_tilde_spec: None,
            cone_tilde: None,
            objective,
            constraints,
            base_point: None,
        })
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn with_cone_tilde(mut self, spec: ConeSpec) -> Result<Self> {
        self.cone_tilde = Some(spec.build(self.dims.y)?);
        self.cone_tilde_spec = Some(spec);
        Ok(self)
    }

    pub fn with_base_point(mut self, p: Vec<Scalar>, x: Vec<Scalar>) -> Result<Self> {
        if p.len() != self.dims.p || x.len() != self.dims.x {
            return Err(Error::DimensionMismatch("base_point must have lengths p and x".into()));
        }
        self.base_point = Some((p, x));
        Ok(self)
    }

    pub fn n_px(&self) -> usize {
        self.dims.p + self.dims.x
    }

    /// `gph C ⊆ P × X` as an H-polyhedron.
    pub fn graph_polyhedron(&self) -> Result<HPolyhedron> {
        let n = self.n_px();
        let mut ineqs = Vec::new();
        let mut eqs = Vec::new();
        for r in self.constraints.polyhedral_rows()? {
            let row = Row::new(r.gradient(), -r.b.clone());
            match r.rel {
                Relation::Le => ineqs.push(row),
                Relation::Eq => eqs.push(row),
            }
        }
        Ok(HPolyhedron::new(n, ineqs, eqs))
    }

    /// `C(p)` in x-space.
    pub fn feasible_polyhedron(&self, p: &[Scalar]) -> Result<HPolyhedron> {
        if p.len() != self.dims.p {
            return Err(Error::DimensionMismatch("p has the wrong length".into()));
        }
        let mut ineqs = Vec::new();
        let mut eqs = Vec::new();
        for r in self.constraints.polyhedral_rows()? {
            let row = Row::new(r.ax.clone(), -(dot(&r.ap, p) + &r.b));
            match r.rel {
                Relation::Le => ineqs.push(row),
                Relation::Eq => eqs.push(row),
            }
        }
        Ok(HPolyhedron::new(self.dims.x, ineqs, eqs))
    }

    /// The set `{x : x ∈ C(p)}` as a float predicate with a small slack.
    pub fn feasible_f64(&self, p: &[f64], x: &[f64]) -> bool {
        const SLACK: f64 = 1e-12;
        match &self.constraints {
            ConstraintSpec::Smooth(gs) => gs.iter().all(|g| {
                let sq: f64 = x.iter().map(|v| v * v).sum();
                let v = match g {
                    SmoothConstraint::XSquared => sq,
                    SmoothConstraint::UnitBall => sq - 1.0,
                    SmoothConstraint::Paraboloid => sq - p[0],
                };
                v <= SLACK
            }),
            c => c.polyhedral_rows().map_or(false, |rows| {
                rows.iter().all(|r| {
                    let v = r.ap.iter().zip(p).map(|(a, b)| to_f64(a) * b).sum::<f64>()
                        + r.ax.iter().zip(x).map(|(a, b)| to_f64(a) * b).sum::<f64>()
                        + to_f64(&r.b);
                    match r.rel {
                        Relation::Le => v <= SLACK,
                        Relation::Eq => v.abs() <= SLACK,
                    }
                })
            }),
        }
    }

    /// Axis-aligned box known to contain `C(p)`, in floats, `None` for unbounded
    /// sides. Polyhedral constraints use exact LPs.
    pub fn feasible_box(&self, p: &[Scalar]) -> Result<Vec<(Option<f64>, Option<f64>)>> {
        match &self.constraints {
            ConstraintSpec::Smooth(gs) => {
                let mut b: Vec<(Option<f64>, Option<f64>)> = vec![(None, None); self.dims.x];
                for g in gs {
                    let r = match g {
                        SmoothConstraint::XSquared => Some(0.0),
                        SmoothConstraint::UnitBall => Some(1.0),
                        SmoothConstraint::Paraboloid => Some(to_f64(&p[0]).max(0.0).sqrt()),
                    };
                    if let Some(r) = r {
                        for side in b.iter_mut() {
                            side.0 = Some(side.0.map_or(-r, |v: f64| v.max(-r)));
                            side.1 = Some(side.1.map_or(r, |v: f64| v.min(r)));
                        }
                    }
                }
                Ok(b)
            }
            _ => {
                let c = self.feasible_polyhedron(p)?;
                let bb = c.bounding_box().ok_or_else(|| Error::Infeasible(p.to_vec()))?;
                Ok(bb
                    .into_iter()
                    .map(|(lo, hi)| (lo.as_ref().map(to_f64), hi.as_ref().map(to_f64)))
                    .collect())
            }
        }
    }
}
