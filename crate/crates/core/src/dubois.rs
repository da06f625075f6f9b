//! Constructive Dubois-Reymond checks on finite time scales.
//!
//! On a finite scale the admissible variations (`η(a) = η(b) = 0`) are
//! spanned by hat functions at the interior points. The lemma then says the
//! constraint matrix `C[k][j] = ∫ e_j η_k^Δ Δt` (or its nabla analogue)
//! annihilates exactly the constant functions on `I^κ` (resp. `I_κ`).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::timescale::{Calculus, Domain, DomainTag, GridFunction, TimeScale};

/// Domain on which the lemma concludes constancy.
pub fn lemma_domain(kind: Calculus) -> Domain {
    match kind {
        Calculus::Delta => DomainTag::Kappa.into(),
        Calculus::Nabla => DomainTag::KappaSub.into(),
    }
}

/// Hat variation: 1 at interior scale index `k`, 0 elsewhere.
pub fn hat_variation(scale: &TimeScale, k: usize) -> Result<GridFunction> {
    if k == 0 || k + 1 >= scale.len() {
        return Err(Error::domain(format!("index {k} is not an interior point")));
    }
    let mut v = vec![0.0; scale.len()];
    v[k] = 1.0;
    GridFunction::new(scale.clone(), v)
}

fn require_interior(scale: &TimeScale) -> Result<()> {
    if scale.interior_len() == 0 {
        return Err(Error::domain(
            "time scale has no interior points, so there is no admissible variation",
        ));
    }
    Ok(())
}

fn variation_integral(f: &GridFunction, eta: &GridFunction, kind: Calculus) -> Result<f64> {
    match kind {
        Calculus::Delta => f
            .zip_with(&eta.delta_derivative()?, |x, d| x * d)?
            .delta_total(),
        Calculus::Nabla => f
            .zip_with(&eta.nabla_derivative()?, |x, d| x * d)?
            .nabla_total(),
    }
}

/// Rows are hat variations, columns are the points of the lemma's domain.
pub fn constraint_matrix(scale: &TimeScale, kind: Calculus) -> Result<DMatrix<f64>> {
    require_interior(scale)?;
    let domain = lemma_domain(kind);
    let cols: Vec<usize> = scale.range(domain).collect();
    let rows = scale.interior_len();
    let mut m = DMatrix::zeros(rows, cols.len());
    for r in 0..rows {
        let eta = hat_variation(scale, r + 1)?;
        for (c, &j) in cols.iter().enumerate() {
            let mut e = vec![0.0; cols.len()];
            e[c] = 1.0;
            let unit = GridFunction::on_domain(scale.clone(), domain, e)?;
            m[(r, c)] = variation_integral(&unit, &eta, kind)?;
            debug_assert_eq!(unit.at_index(j), Some(1.0));
        }
    }
    Ok(m)
}

/// Numerical rank via singular values, relative cutoff `1e-10`.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0_f64, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * top).count()
}

/// Result of checking the null space of the constraint matrix.
#[derive(Clone, Debug)]
pub struct NullSpaceCheck {
    pub rank: usize,
    pub columns: usize,
    /// `‖C·1‖_∞`
    pub constant_residual: f64,
}

impl NullSpaceCheck {
    /// Null space is one-dimensional and contains the constants.
    pub fn is_constants(&self, tol: f64) -> bool {
        self.columns - self.rank == 1 && self.constant_residual <= tol
    }
}

pub fn null_space_check(scale: &TimeScale, kind: Calculus) -> Result<NullSpaceCheck> {
    let c = constraint_matrix(scale, kind)?;
    let ones = DVector::from_element(c.ncols(), 1.0);
    let constant_residual = (&c * ones).amax();
    Ok(NullSpaceCheck {
        rank: numerical_rank(&c),
        columns: c.ncols(),
        constant_residual,
    })
}

/// Orthogonal projection of `f` (on the lemma's domain) onto the null space
/// of the constraint matrix, i.e. onto functions every basis integral
/// vanishes for.
pub fn project_annihilated(f: &GridFunction, kind: Calculus) -> Result<GridFunction> {
    let domain = lemma_domain(kind);
    let f = f.restrict(domain)?;
    let c = constraint_matrix(f.scale(), kind)?;
    let x = DVector::from_column_slice(f.values());
    let gram = &c * c.transpose();
    let rhs = &c * &x;
    let w = gram
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::domain("constraint Gram matrix is singular"))?;
    let projected = x - c.transpose() * w;
    GridFunction::on_domain(f.scale().clone(), domain, projected.iter().copied().collect())
}

/// A nonzero basis integral: the variation at `point` detects that `f` is
/// not constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub point: f64,
    pub integral: f64,
}

#[derive(Clone, Debug)]
pub struct DuboisReymondReport {
    pub kind: Calculus,
    /// One entry per interior point, in scale order.
    pub basis_integrals: Vec<f64>,
    /// Every basis integral vanished, so the lemma forces `f` constant.
    pub constant: bool,
    /// Largest nonzero basis integral, when some integral fails to vanish.
    pub witness: Option<Witness>,
    /// The integrals all vanished but `f` is not constant. This would
    /// indicate a bug in the integrals, not a failure of the lemma.
    pub counterexample: bool,
}

/// Tests `f` against every hat variation. `tol` is relative to
/// `max(1, ‖f‖_∞)`.
pub fn dubois_reymond_probe(
    f: &GridFunction,
    kind: Calculus,
    tol: f64,
) -> Result<DuboisReymondReport> {
    let scale = f.scale().clone();
    require_interior(&scale)?;
    let f = f.restrict(lemma_domain(kind))?;
    let slack = tol * f.max_abs().max(1.0);
    let basis_integrals = (1..scale.len() - 1)
        .map(|k| variation_integral(&f, &hat_variation(&scale, k)?, kind))
        .collect::<Result<Vec<f64>>>()?;
    let witness = basis_integrals
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > slack)
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(k, &v)| Witness {
            point: scale.points()[k + 1],
            integral: v,
        });
    let constant = witness.is_none();
    let (lo, hi) = f
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let is_flat = hi - lo <= slack;
    Ok(DuboisReymondReport {
        kind,
        basis_integrals,
        constant,
        witness,
        counterexample: constant && !is_flat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scale() -> TimeScale {
        TimeScale::new(vec![0.0, 0.5, 2.0, 2.25, 7.0]).unwrap()
    }

    #[test]
    fn constants_pass() {
        let f = GridFunction::constant(&scale(), -3.0).unwrap();
        for kind in [Calculus::Delta, Calculus::Nabla] {
            let r = dubois_reymond_probe(&f, kind, 1e-12).unwrap();
            assert!(r.constant);
            assert!(!r.counterexample);
            assert!(r.basis_integrals.iter().all(|v| v.abs() <= 1e-12));
        }
    }

    #[test]
    fn hat_integrals_are_neighbour_differences() {
        // ∫ f η_k^Δ Δt = f(t_{k-1}) − f(t_k) for a hat at t_k.
        let f = GridFunction::new(scale(), vec![1.0, 4.0, 2.0, 8.0, 0.0]).unwrap();
        let r = dubois_reymond_probe(&f, Calculus::Delta, 1e-12).unwrap();
        let want = [1.0 - 4.0, 4.0 - 2.0, 2.0 - 8.0];
        for (got, want) in r.basis_integrals.iter().zip(want) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!(!r.constant);
        assert_eq!(r.witness.as_ref().unwrap().point, 2.25);
        let r = dubois_reymond_probe(&f, Calculus::Nabla, 1e-12).unwrap();
        let want = [4.0 - 2.0, 2.0 - 8.0, 8.0 - 0.0];
        for (got, want) in r.basis_integrals.iter().zip(want) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn delta_probe_ignores_value_at_b() {
        // f is constant on I^κ; only f(b) differs, which the delta lemma
        // does not constrain.
        let f = GridFunction::new(scale(), vec![2.0, 2.0, 2.0, 2.0, 9.0]).unwrap();
        assert!(dubois_reymond_probe(&f, Calculus::Delta, 1e-12).unwrap().constant);
        assert!(!dubois_reymond_probe(&f, Calculus::Nabla, 1e-12).unwrap().constant);
    }

    #[test]
    fn no_interior_point_is_an_error() {
        let ts = TimeScale::new(vec![0.0, 1.0]).unwrap();
        let f = GridFunction::constant(&ts, 1.0).unwrap();
        assert!(matches!(
            dubois_reymond_probe(&f, Calculus::Delta, 1e-12),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn projection_gives_constants() {
        let f = GridFunction::new(scale(), vec![0.3, -1.0, 5.0, 2.0, 1.0]).unwrap();
        for kind in [Calculus::Delta, Calculus::Nabla] {
            let p = project_annihilated(&f, kind).unwrap();
            let v = p.values();
            let spread = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - v.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(spread < 1e-12, "{kind:?}: {v:?}");
        }
    }

    #[test]
    fn null_space_is_constants() {
        for kind in [Calculus::Delta, Calculus::Nabla] {
            let chk = null_space_check(&scale(), kind).unwrap();
            assert_eq!(chk.rank, 3);
            assert_eq!(chk.columns, 4);
            assert!(chk.is_constants(1e-12));
        }
    }
}
