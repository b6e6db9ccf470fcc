//! Local algebraic sets at a base point and distance oracles to them.
//!
//! A [`VarietySpec`] describes a set near its base point `x0` in one of five
//! forms (implicit equations, a graph over the first `p` coordinates, a
//! polynomial parametrization, a finite point set, or an intersection of
//! other specs). [`distance`] returns `ρ(x, X)` as an upper bound together
//! with the foot point that realizes it.

mod ops;
mod oracle;
mod sample;
mod serde_impl;
mod system;

use num_complex::Complex64;

use crate::algebra::{AffineMap, Poly};
use crate::cvec::{self, CVec};
use crate::error::{Error, Result};

pub use ops::{intersect, membership, section, section_with_frame};
pub use oracle::{distance, distance_bruteforce, DistanceOptions, DistanceResult, OracleMethod};
pub use sample::{sample_in_band, sample_on_variety};

/// Residual below which the base point counts as lying on a set.
pub const BASE_POINT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum Form {
    /// Common zero set of polynomials in the ambient coordinates.
    Implicit { equations: Vec<Poly> },
    /// `{x0 + (u, f(u)) : u ∈ C^p}`; each component is a polynomial in `p`
    /// variables vanishing at `0`.
    Graph { param_dim: usize, components: Vec<Poly> },
    /// Image of `t ↦ map(t)`, `t ∈ C^p`, with `map(0) = x0`.
    Parametric { param_dim: usize, map: Vec<Poly> },
    Finite { points: Vec<CVec> },
    /// Kept only when the parts cannot be merged into one implicit system.
    Intersection { parts: Vec<VarietySpec> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarietySpec {
    ambient_dim: usize,
    base_point: CVec,
    form: Form,
}

impl VarietySpec {
    pub fn implicit(base_point: CVec, equations: Vec<Poly>) -> Result<Self> {
        let m = base_point.len();
        for e in &equations {
            if e.num_vars() != m {
                return Err(Error::dim(m, e.num_vars()));
            }
        }
        let equations = equations.into_iter().filter(|e| !e.is_zero()).collect();
        Self::checked(base_point, Form::Implicit { equations })
    }

    pub fn graph(base_point: CVec, param_dim: usize, components: Vec<Poly>) -> Result<Self> {
        let m = base_point.len();
        if param_dim == 0 || param_dim >= m {
            return Err(Error::invalid(format!(
                "graph parameter dimension {param_dim} must lie in 1..{m}"
            )));
        }
        if components.len() != m - param_dim {
            return Err(Error::dim(m - param_dim, components.len()));
        }
        for c in &components {
            if c.num_vars() != param_dim {
                return Err(Error::dim(param_dim, c.num_vars()));
            }
        }
        Self::checked(base_point, Form::Graph { param_dim, components })
    }

    pub fn parametric(base_point: CVec, param_dim: usize, map: Vec<Poly>) -> Result<Self> {
        let m = base_point.len();
        if param_dim == 0 {
            return Err(Error::invalid("parametrization needs at least one parameter"));
        }
        if map.len() != m {
            return Err(Error::dim(m, map.len()));
        }
        for c in &map {
            if c.num_vars() != param_dim {
                return Err(Error::dim(param_dim, c.num_vars()));
            }
        }
        Self::checked(base_point, Form::Parametric { param_dim, map })
    }

    pub fn finite(base_point: CVec, points: Vec<CVec>) -> Result<Self> {
        let m = base_point.len();
        for p in &points {
            if p.len() != m {
                return Err(Error::dim(m, p.len()));
            }
        }
        Self::checked(base_point, Form::Finite { points })
    }

    /// `{x0}` in `C^m`.
    pub fn point(base_point: CVec) -> Self {
        let p = base_point.clone();
        VarietySpec {
            ambient_dim: base_point.len(),
            base_point,
            form: Form::Finite { points: vec![p] },
        }
    }

    /// Implicit set from expression strings in `x1, …, xm`.
    pub fn parse_implicit(base_point: CVec, equations: &[&str]) -> Result<Self> {
        let names = crate::algebra::default_variable_names(base_point.len());
        let eqs = equations
            .iter()
            .map(|e| crate::algebra::parse_poly(e, &names))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::implicit(base_point, eqs)
    }

    /// Graph from expression strings in `x1, …, xp`.
    pub fn parse_graph(base_point: CVec, param_dim: usize, components: &[&str]) -> Result<Self> {
        let names = crate::algebra::default_variable_names(param_dim);
        let comps = components
            .iter()
            .map(|e| crate::algebra::parse_poly(e, &names))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::graph(base_point, param_dim, comps)
    }

    pub(crate) fn from_parts_unchecked(base_point: CVec, form: Form) -> Self {
        VarietySpec {
            ambient_dim: base_point.len(),
            base_point,
            form,
        }
    }

    fn checked(base_point: CVec, form: Form) -> Result<Self> {
        if base_point.is_empty() {
            return Err(Error::invalid("ambient dimension must be positive"));
        }
        let spec = Self::from_parts_unchecked(base_point, form);
        let residual = spec.base_point_residual();
        if !(residual < BASE_POINT_TOLERANCE) {
            return Err(Error::BasePointNotOnSet { residual });
        }
        Ok(spec)
    }

    fn base_point_residual(&self) -> f64 {
        let x0 = &self.base_point;
        match &self.form {
            Form::Implicit { equations } => max_abs(equations.iter().map(|e| e.eval_unchecked(x0))),
            Form::Graph { components, param_dim } => {
                let zero = cvec::zeros(*param_dim);
                max_abs(components.iter().map(|c| c.eval_unchecked(&zero)))
            }
            Form::Parametric { map, param_dim } => {
                let zero = cvec::zeros(*param_dim);
                let image: CVec = map.iter().map(|c| c.eval_unchecked(&zero)).collect();
                cvec::distance(&image, x0)
            }
            Form::Finite { points } => points
                .iter()
                .map(|p| cvec::distance(p, x0))
                .fold(f64::INFINITY, f64::min),
            Form::Intersection { parts } => parts
                .iter()
                .map(|p| p.base_point_residual())
                .fold(0.0, f64::max),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn base_point(&self) -> &[Complex64] {
        &self.base_point
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn kind(&self) -> &'static str {
        match self.form {
            Form::Implicit { .. } => "implicit",
            Form::Graph { .. } => "graph",
            Form::Parametric { .. } => "parametric",
            Form::Finite { .. } => "finite",
            Form::Intersection { .. } => "intersection",
        }
    }

    /// Defining equations in ambient coordinates, when the set has them
    /// (implicit, graph, and intersections of those).
    pub fn implicit_equations(&self) -> Option<Vec<Poly>> {
        match &self.form {
            Form::Implicit { equations } => Some(equations.clone()),
            Form::Graph { param_dim, components } => {
                Some(graph_equations(&self.base_point, *param_dim, components))
            }
            Form::Intersection { parts } => {
                let mut all = Vec::new();
                for p in parts {
                    all.extend(p.implicit_equations()?);
                }
                Some(all)
            }
            Form::Parametric { .. } | Form::Finite { .. } => None,
        }
    }

    /// The same set rewritten in implicit form, when possible.
    pub fn to_implicit(&self) -> Option<VarietySpec> {
        let equations = dedup_equations(self.implicit_equations()?);
        Some(Self::from_parts_unchecked(
            self.base_point.clone(),
            Form::Implicit { equations },
        ))
    }

    /// Whether the set is an affine subspace given by affine data.
    pub fn is_affine(&self) -> bool {
        match &self.form {
            Form::Implicit { equations } => equations.iter().all(Poly::is_affine),
            Form::Graph { components, .. } => components.iter().all(Poly::is_affine),
            Form::Parametric { map, .. } => map.iter().all(Poly::is_affine),
            Form::Finite { points } => points.len() == 1,
            Form::Intersection { parts } => parts.iter().all(|p| {
                p.is_affine() && matches!(p.form, Form::Implicit { .. } | Form::Graph { .. })
            }),
        }
    }

    /// Applies `x ↦ x0 + λ (x − x0)` to the set.
    pub fn scaled(&self, lambda: f64) -> Result<VarietySpec> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid("scale factor must be positive"));
        }
        let m = self.ambient_dim;
        let x0 = &self.base_point;
        let lam = Complex64::new(lambda, 0.0);
        let inv = Complex64::new(1.0 / lambda, 0.0);
        // x ↦ x0 + (x − x0)/λ, the inverse dilation in ambient coordinates
        let inverse = AffineMap::new(
            (0..m)
                .map(|i| (0..m).map(|j| if i == j { inv } else { Complex64::default() }).collect())
                .collect(),
            x0.iter().map(|b| b - b * inv).collect(),
        )?;
        let form = match &self.form {
            Form::Implicit { equations } => Form::Implicit {
                equations: equations
                    .iter()
                    .map(|e| e.compose_affine(&inverse))
                    .collect::<Result<_>>()?,
            },
            Form::Graph { param_dim, components } => {
                let p = *param_dim;
                let shrink = AffineMap::new(
                    (0..p)
                        .map(|i| (0..p).map(|j| if i == j { inv } else { Complex64::default() }).collect())
                        .collect(),
                    cvec::zeros(p),
                )?;
                Form::Graph {
                    param_dim: p,
                    components: components
                        .iter()
                        .map(|c| Ok(c.compose_affine(&shrink)?.scale(lam)))
                        .collect::<Result<_>>()?,
                }
            }
            Form::Parametric { param_dim, map } => Form::Parametric {
                param_dim: *param_dim,
                map: map
                    .iter()
                    .zip(x0)
                    .map(|(c, b)| {
                        let shift = Poly::constant(*param_dim, *b);
                        &(c - &shift).scale(lam) + &shift
                    })
                    .collect(),
            },
            Form::Finite { points } => Form::Finite {
                points: points
                    .iter()
                    .map(|p| p.iter().zip(x0).map(|(pi, b)| b + (pi - b) * lam).collect())
                    .collect(),
            },
            Form::Intersection { parts } => Form::Intersection {
                parts: parts.iter().map(|p| p.scaled(lambda)).collect::<Result<_>>()?,
            },
        };
        Ok(Self::from_parts_unchecked(x0.clone(), form))
    }
}

fn max_abs(values: impl Iterator<Item = Complex64>) -> f64 {
    values.map(|v| v.norm()).fold(0.0, f64::max)
}

/// `x_{p+j} − x0_{p+j} − f_j(x_1 − x0_1, …, x_p − x0_p)` for each component.
pub(crate) fn graph_equations(x0: &[Complex64], p: usize, components: &[Poly]) -> Vec<Poly> {
    let m = x0.len();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::default();
    let to_params = AffineMap::new(
        (0..p)
            .map(|i| (0..m).map(|j| if i == j { one } else { zero }).collect())
            .collect(),
        x0[..p].iter().map(|b| -b).collect(),
    )
    .expect("well-formed projection");
    components
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let lifted = f.compose_affine(&to_params).expect("dimensions match");
            let y = Poly::var(m, p + j);
            let shift = Poly::constant(m, x0[p + j]);
            &(&y - &shift) - &lifted
        })
        .filter(|e| !e.is_zero())
        .collect()
}

pub(crate) fn dedup_equations(eqs: Vec<Poly>) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::with_capacity(eqs.len());
    for e in eqs {
        if !e.is_zero() && !out.contains(&e) {
            out.push(e);
        }
    }
    out
}
