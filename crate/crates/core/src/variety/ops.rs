use num_complex::Complex64;

use super::{dedup_equations, distance, DistanceOptions, Form, VarietySpec};
use crate::cvec::{self, CVec};
use crate::error::{Error, Result};
use crate::geometry::{orthonormal_frame, parametrization, Frame, Hyperplane};

/// Whether `x` lies on the set up to `tol`. Defining residuals are used for
/// implicit and graph forms, point distances for finite and parametric
/// forms.
pub fn membership(spec: &VarietySpec, x: &[Complex64], tol: f64) -> bool {
    if x.len() != spec.ambient_dim() {
        return false;
    }
    match spec.form() {
        Form::Implicit { equations } => equations.iter().all(|e| e.eval_unchecked(x).norm() < tol),
        Form::Graph { .. } => spec
            .implicit_equations()
            .expect("graph has equations")
            .iter()
            .all(|e| e.eval_unchecked(x).norm() < tol),
        Form::Finite { points } => points.iter().any(|p| cvec::distance(p, x) < tol),
        Form::Parametric { .. } => distance(spec, x, &DistanceOptions::default())
            .map(|r| r.distance < tol)
            .unwrap_or(false),
        Form::Intersection { parts } => parts.iter().all(|p| membership(p, x, tol)),
    }
}

fn check_compatible(a: &VarietySpec, b: &VarietySpec) -> Result<()> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::dim(a.ambient_dim(), b.ambient_dim()));
    }
    if cvec::distance(a.base_point(), b.base_point()) > 0.0 {
        return Err(Error::BasePointMismatch);
    }
    Ok(())
}

/// `a ∩ b`. Sets with defining equations merge into one implicit system;
/// a finite part is filtered by membership in the other; anything else
/// becomes an intersection node resolved by the distance oracle.
pub fn intersect(a: &VarietySpec, b: &VarietySpec) -> Result<VarietySpec> {
    check_compatible(a, b)?;
    if a == b {
        return Ok(a.clone());
    }
    let x0: CVec = a.base_point().to_vec();
    match (a.form(), b.form()) {
        (Form::Finite { points }, _) => {
            return Ok(VarietySpec::from_parts_unchecked(
                x0,
                Form::Finite {
                    points: points.iter().filter(|p| membership(b, p, 1e-9)).cloned().collect(),
                },
            ))
        }
        (_, Form::Finite { .. }) => return intersect(b, a),
        _ => {}
    }
    if let (Some(ea), Some(eb)) = (a.implicit_equations(), b.implicit_equations()) {
        let mut all = ea;
        all.extend(eb);
        return Ok(VarietySpec::from_parts_unchecked(
            x0,
            Form::Implicit {
                equations: dedup_equations(all),
            },
        ));
    }
    let mut parts = Vec::new();
    for s in [a, b] {
        match s.form() {
            Form::Intersection { parts: inner } => parts.extend(inner.iter().cloned()),
            _ => parts.push(s.clone()),
        }
    }
    Ok(VarietySpec::from_parts_unchecked(x0, Form::Intersection { parts }))
}

/// `X ∩ H` in the coordinates of the canonical (`frame_seed = 0`) or a
/// seeded orthonormal frame of `H`.
pub fn section(spec: &VarietySpec, h: &Hyperplane, frame_seed: u64) -> Result<VarietySpec> {
    section_with_frame(spec, h, frame_seed).map(|(s, _)| s)
}

pub fn section_with_frame(
    spec: &VarietySpec,
    h: &Hyperplane,
    frame_seed: u64,
) -> Result<(VarietySpec, Frame)> {
    if h.ambient_dim() != spec.ambient_dim() {
        return Err(Error::dim(spec.ambient_dim(), h.ambient_dim()));
    }
    if cvec::distance(h.base_point(), spec.base_point()) > 0.0 {
        return Err(Error::BasePointMismatch);
    }
    let frame = orthonormal_frame(h, frame_seed);
    let sec = pull_back(spec, &frame)?;
    Ok((sec, frame))
}

fn pull_back(spec: &VarietySpec, frame: &Frame) -> Result<VarietySpec> {
    let h = frame.hyperplane();
    let origin = cvec::zeros(h.ambient_dim() - 1);
    let form = match spec.form() {
        Form::Implicit { .. } | Form::Graph { .. } => {
            let phi = parametrization(frame);
            let equations = spec
                .implicit_equations()
                .expect("has equations")
                .iter()
                .map(|e| e.compose_affine(&phi))
                .collect::<Result<Vec<_>>>()?;
            Form::Implicit {
                equations: dedup_equations(equations),
            }
        }
        Form::Finite { points } => Form::Finite {
            points: points
                .iter()
                .filter(|p| h.contains(p, 1e-10 * (1.0 + cvec::norm(p))))
                .map(|p| frame.coordinates(p))
                .collect(),
        },
        Form::Parametric { .. } => {
            return Err(Error::Unsupported(
                "hyperplane section of a parametrized set".into(),
            ))
        }
        Form::Intersection { parts } => {
            let mut acc: Option<VarietySpec> = None;
            for p in parts {
                let s = pull_back(p, frame)?;
                acc = Some(match acc {
                    None => s,
                    Some(a) => intersect(&a, &s)?,
                });
            }
            return Ok(acc.unwrap_or_else(|| {
                VarietySpec::from_parts_unchecked(origin, Form::Implicit { equations: vec![] })
            }));
        }
    };
    Ok(VarietySpec::from_parts_unchecked(origin, form))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn membership_examples() {
        let g = VarietySpec::parse_graph(cvec::zeros(2), 1, &["x1^2"]).unwrap();
        assert!(membership(&g, &[c(2.0), c(4.0)], 1e-9));
        let p = VarietySpec::point(cvec::zeros(2));
        assert!(!membership(&p, &[c(1.0), c(0.0)], 1e-9));
        let axes = VarietySpec::parse_implicit(cvec::zeros(2), &["x1*x2"]).unwrap();
        assert!(membership(&axes, &[c(0.0), c(5.0)], 1e-9));
    }

    #[test]
    fn transversal_axes_meet_at_origin() {
        let a = VarietySpec::parse_implicit(cvec::zeros(2), &["x2"]).unwrap();
        let b = VarietySpec::parse_implicit(cvec::zeros(2), &["x1"]).unwrap();
        let ab = intersect(&a, &b).unwrap();
        let r = distance(&ab, &[c(0.7), c(0.0)], &DistanceOptions::default()).unwrap();
        assert!((r.distance - 0.7).abs() < 1e-14);
    }

    #[test]
    fn graphs_meet_in_double_point() {
        let a = VarietySpec::parse_graph(cvec::zeros(2), 1, &["x1^2"]).unwrap();
        let b = VarietySpec::parse_graph(cvec::zeros(2), 1, &["0"]).unwrap();
        let ab = intersect(&a, &b).unwrap();
        assert_eq!(ab.kind(), "implicit");
        assert!(membership(&ab, &[c(0.0), c(0.0)], 1e-12));
        assert!(!membership(&ab, &[c(0.1), c(0.0)], 1e-9));
    }

    #[test]
    fn section_of_coordinate_plane() {
        let x = VarietySpec::parse_implicit(cvec::zeros(3), &["x3"]).unwrap();
        let h = Hyperplane::coordinate(cvec::zeros(3), 1).unwrap();
        let s = section(&x, &h, 0).unwrap();
        assert_eq!(s.ambient_dim(), 2);
        // canonical frame of {x2 = 0} is (e1, e3), so x3 becomes t2
        assert!(membership(&s, &[c(1.0), c(0.0)], 1e-12));
        assert!(!membership(&s, &[c(0.0), c(1.0)], 1e-9));
    }

    #[test]
    fn mismatched_base_points_are_rejected() {
        let a = VarietySpec::parse_implicit(cvec::zeros(2), &["x2"]).unwrap();
        let b = VarietySpec::parse_implicit(vec![c(1.0), c(0.0)], &["x2"]).unwrap();
        assert!(matches!(intersect(&a, &b), Err(Error::BasePointMismatch)));
    }
}
