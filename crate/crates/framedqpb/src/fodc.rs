//! The first-order differential calculus on the structure group induced by
//! a curvature functional: the annihilator ideal `R ⊆ ker ε`, the quotient
//! `Ψ_inv = ker ε / R` with its projection `π` and right action `∘`, and
//! the classicality test for the functional.

use crate::hopf::GroupElem;
use crate::horizontal::HorForm;
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use num_rational::BigRational;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FodcError {
    #[error("the functional must vanish on 1")]
    NonzeroOnUnit,
    #[error("annihilator fails right-ideal closure inside the window; enlarge the window (current {0})")]
    ClosureFailed(i64),
    #[error("support of {0} exceeds the window ±{1}")]
    WindowExceeded(String, i64),
}

/// Window-truncated data of the induced calculus.
#[derive(Clone, Debug)]
pub struct FodcData {
    pub window: i64,
    /// Basis of `R ∩ span{U^m − 1 : |m| ≤ window}`, row-reduced.
    pub ideal_basis: Vec<GroupElem>,
    /// Dimension of `Ψ_inv` within the window.
    pub psi_dim: usize,
    /// Kernel-basis representatives `π(g_b)` of the chosen `Ψ_inv` basis.
    pub quotient_reps: Vec<GroupElem>,
    /// `π(U^m)` coordinates in the quotient basis, for `|m| ≤ window`.
    pub pi_table: BTreeMap<i64, Vec<Scalar>>,
    /// `ϑ_b ∘ U^m` coordinates for each basis element, `|m| < window`.
    pub circ_table: BTreeMap<(usize, i64), Vec<Scalar>>,
    /// `γ(v) = t′·v` eigenvalue of the generating model, when known.
    pub tprime: Option<BigRational>,
    // Row-reduced annihilator matrix for projections (kerε coordinates).
    rref: Matrix,
    pivots: Vec<usize>,
}

/// Classicality verdict: whether the functional is an `ε`-derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classicality {
    Pass,
    Fail { m: i64, n: i64 },
}

fn flatten(h: &HorForm) -> BTreeMap<(usize, i64, i64), Scalar> {
    let mut out = BTreeMap::new();
    for idx in 0..4usize {
        for (m, f) in h.get(idx).components() {
            for (d, c) in f.terms() {
                out.insert((idx, *m, *d), c.clone());
            }
        }
    }
    out
}

/// `ker ε` window basis `e_m = U^m − 1`, `m ∈ [−N, N] \ {0}`; index map.
fn kernel_degrees(window: i64) -> Vec<i64> {
    (-window..=window).filter(|&m| m != 0).collect()
}

fn to_kernel_coords(a: &GroupElem, window: i64) -> Result<Vec<Scalar>, FodcError> {
    // a ∈ ker ε within the window decomposes as Σ a_m (U^m − 1)
    let degrees = kernel_degrees(window);
    for m in a.support() {
        if m != 0 && !degrees.contains(&m) {
            return Err(FodcError::WindowExceeded(a.to_string(), window));
        }
    }
    Ok(degrees.iter().map(|&m| a.coeff(m)).collect())
}

fn from_kernel_coords(coords: &[Scalar], window: i64) -> GroupElem {
    let degrees = kernel_degrees(window);
    let mut terms: Vec<(i64, Scalar)> = Vec::new();
    let mut constant = Scalar::zero();
    for (i, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        terms.push((degrees[i], c.clone()));
        constant = &constant - c;
    }
    terms.push((0, constant));
    GroupElem::from_terms(terms)
}

/// Computes the annihilator calculus of a functional `ρ: A → hor_P` given
/// by its values on `U^m` for `|m| ≤ window`.
pub fn fodc_from_curvature(
    rho: &BTreeMap<i64, HorForm>,
    window: i64,
    tprime: Option<BigRational>,
) -> Result<FodcData, FodcError> {
    if let Some(v) = rho.get(&0) {
        if !v.is_zero() {
            return Err(FodcError::NonzeroOnUnit);
        }
    }
    let degrees = kernel_degrees(window);

    // Value coordinates of ρ(e_m) = ρ(U^m) − ρ(1) = ρ(U^m).
    let mut value_coords: BTreeMap<(usize, i64, i64), usize> = BTreeMap::new();
    let mut flat: Vec<BTreeMap<(usize, i64, i64), Scalar>> = Vec::new();
    for &m in &degrees {
        let h = rho.get(&m).cloned().unwrap_or_else(HorForm::zero);
        let f = flatten(&h);
        for key in f.keys() {
            let next = value_coords.len();
            value_coords.entry(*key).or_insert(next);
        }
        flat.push(f);
    }

    // Nullspace of the evaluation matrix = annihilator inside ker ε.
    let nrows = value_coords.len();
    let mut eval = Matrix::zero(nrows, degrees.len());
    for (col, f) in flat.iter().enumerate() {
        for (key, c) in f {
            eval.set(value_coords[key], col, c.clone());
        }
    }
    let null = eval.nullspace();

    // Row-reduce the annihilator for canonical projections.
    let mut ann = Matrix::from_rows(if null.is_empty() {
        vec![vec![Scalar::zero(); degrees.len()]]
    } else {
        null.clone()
    });
    let pivots = ann.rref();
    let dim_r = pivots.len();
    let psi_dim = degrees.len() - dim_r;

    let ideal_basis: Vec<GroupElem> = (0..dim_r)
        .map(|r| {
            let row: Vec<Scalar> = (0..degrees.len()).map(|c| ann.at(r, c).clone()).collect();
            from_kernel_coords(&row, window)
        })
        .collect();

    // Right-ideal closure inside the window: r·U^k stays in the span
    // whenever its support still fits.
    let span = Matrix::from_rows(
        (0..dim_r)
            .map(|r| (0..degrees.len()).map(|c| ann.at(r, c).clone()).collect())
            .collect::<Vec<_>>(),
    );
    for r in &ideal_basis {
        for k in [-1i64, 1] {
            let shifted = r * &GroupElem::u_pow(k);
            let centered = &shifted - &GroupElem::monomial(0, shifted.counit());
            if centered.support().all(|m| m == 0 || degrees.contains(&m)) {
                // shifted is in ker ε already (ε multiplicative, ε(r)=0)
                let coords = to_kernel_coords(&shifted, window)?;
                if dim_r == 0 || !span.row_span_contains(&coords) {
                    return Err(FodcError::ClosureFailed(window));
                }
            }
        }
    }

    // Quotient basis: prefer π(U − U⁻¹) when it is nonzero in the quotient
    // (the 1-dimensional model case); otherwise use non-pivot coordinates.
    let reduce = |coords: &[Scalar]| -> Vec<Scalar> {
        // subtract the RREF rows to zero out pivot columns
        let mut v = coords.to_vec();
        for (r, &p) in pivots.iter().enumerate() {
            if v[p].is_zero() {
                continue;
            }
            let factor = v[p].clone();
            for c in 0..v.len() {
                v[c] = &v[c] - &(&factor * ann.at(r, c));
            }
        }
        v
    };
    let free_cols: Vec<usize> = (0..degrees.len()).filter(|c| !pivots.contains(c)).collect();
    let quotient_coords = |a: &GroupElem| -> Result<Vec<Scalar>, FodcError> {
        let centered = a - &GroupElem::monomial(0, a.counit());
        let reduced = reduce(&to_kernel_coords(&centered, window)?);
        Ok(free_cols.iter().map(|&c| reduced[c].clone()).collect())
    };

    // Basis change so that, in the 1-dimensional case, the coordinate is
    // expressed against ζ = π(U − U⁻¹).
    let zeta_candidate = &GroupElem::u_pow(1) - &GroupElem::u_pow(-1);
    let (basis_matrix, quotient_reps) = if psi_dim == 1 {
        let z = quotient_coords(&zeta_candidate)?;
        if !z[0].is_zero() {
            (vec![z], vec![zeta_candidate.clone()])
        } else {
            let col = free_cols[0];
            (
                vec![vec![Scalar::one()]],
                vec![from_kernel_coords(
                    &{
                        let mut v = vec![Scalar::zero(); degrees.len()];
                        v[col] = Scalar::one();
                        v
                    },
                    window,
                )],
            )
        }
    } else {
        let mut reps = Vec::new();
        for &col in &free_cols {
            let mut v = vec![Scalar::zero(); degrees.len()];
            v[col] = Scalar::one();
            reps.push(from_kernel_coords(&v, window));
        }
        (
            (0..psi_dim)
                .map(|i| {
                    (0..psi_dim)
                        .map(|j| if i == j { Scalar::one() } else { Scalar::zero() })
                        .collect()
                })
                .collect(),
            reps,
        )
    };

    // Express free-coordinate vectors in the chosen basis.
    let basis = Matrix::from_rows(basis_matrix);
    let in_basis = |free_vec: Vec<Scalar>| -> Vec<Scalar> {
        if psi_dim == 0 {
            return Vec::new();
        }
        // solve basisᵀ · x = free_vec
        let mut bt = Matrix::zero(psi_dim, psi_dim);
        for i in 0..psi_dim {
            for j in 0..psi_dim {
                bt.set(j, i, basis.at(i, j).clone());
            }
        }
        bt.solve(&free_vec).expect("basis spans the quotient")
    };

    let mut pi_table = BTreeMap::new();
    for m in -window..=window {
        pi_table.insert(m, in_basis(quotient_coords(&GroupElem::u_pow(m))?));
    }

    let mut circ_table = BTreeMap::new();
    for (b, rep) in quotient_reps.iter().enumerate() {
        for m in -(window - 1)..=(window - 1) {
            let moved = rep * &GroupElem::u_pow(m);
            if moved.support().any(|k| k.abs() > window) {
                continue;
            }
            circ_table.insert((b, m), in_basis(quotient_coords(&moved)?));
        }
    }

    Ok(FodcData {
        window,
        ideal_basis,
        psi_dim,
        quotient_reps,
        pi_table,
        circ_table,
        tprime,
        rref: ann,
        pivots,
    })
}

impl FodcData {
    /// `π(a) = class of (a − ε(a)·1)` in the quotient basis.
    pub fn pi_project(&self, a: &GroupElem) -> Result<Vec<Scalar>, FodcError> {
        let centered = a - &GroupElem::monomial(0, a.counit());
        let mut coords = to_kernel_coords(&centered, self.window)?;
        for (r, &p) in self.pivots.iter().enumerate() {
            if coords[p].is_zero() {
                continue;
            }
            let factor = coords[p].clone();
            for c in 0..coords.len() {
                coords[c] = &coords[c] - &(&factor * self.rref.at(r, c));
            }
        }
        let free_cols: Vec<usize> = (0..kernel_degrees(self.window).len())
            .filter(|c| !self.pivots.contains(c))
            .collect();
        let free_vec: Vec<Scalar> = free_cols.iter().map(|&c| coords[c].clone()).collect();
        // coordinates against the chosen quotient basis
        if self.psi_dim == 0 {
            return Ok(Vec::new());
        }
        let mut basis_rows = Vec::new();
        for rep in &self.quotient_reps {
            let mut v = to_kernel_coords(&(rep - &GroupElem::monomial(0, rep.counit())), self.window)?;
            for (r, &p) in self.pivots.iter().enumerate() {
                if v[p].is_zero() {
                    continue;
                }
                let factor = v[p].clone();
                for c in 0..v.len() {
                    v[c] = &v[c] - &(&factor * self.rref.at(r, c));
                }
            }
            basis_rows.push(free_cols.iter().map(|&c| v[c].clone()).collect::<Vec<_>>());
        }
        let mut bt = Matrix::zero(self.psi_dim, self.psi_dim);
        for i in 0..self.psi_dim {
            for j in 0..self.psi_dim {
                bt.set(j, i, basis_rows[i][j].clone());
            }
        }
        Ok(bt.solve(&free_vec).expect("basis spans the quotient"))
    }

    /// Right action `ϑ ∘ a = π(g·a)` on quotient coordinates.
    pub fn circ_act(&self, theta: &[Scalar], a: &GroupElem) -> Result<Vec<Scalar>, FodcError> {
        assert_eq!(theta.len(), self.psi_dim);
        let mut lift = GroupElem::zero();
        for (c, rep) in theta.iter().zip(&self.quotient_reps) {
            lift = &lift + &rep.scalar_mul(c);
        }
        let centered = &lift - &GroupElem::monomial(0, lift.counit());
        self.pi_project(&(&centered * a))
    }

    /// `π(U^m)` coefficient against `ζ` in the 1-dimensional case.
    pub fn pi_coefficient(&self, m: i64) -> Option<Scalar> {
        if self.psi_dim != 1 {
            return None;
        }
        self.pi_table.get(&m).map(|v| v[0].clone())
    }
}

/// Checks the `ε`-derivation law `ρ(ab) = ε(a)ρ(b) + ρ(a)ε(b)` on all
/// window pairs `(U^m, U^n)`; returns the first violating pair.
pub fn classicality_test(rho: &BTreeMap<i64, HorForm>, window: i64) -> Result<Classicality, FodcError> {
    if let Some(v) = rho.get(&0) {
        if !v.is_zero() {
            return Err(FodcError::NonzeroOnUnit);
        }
    }
    let value = |m: i64| rho.get(&m).cloned().unwrap_or_else(HorForm::zero);
    // scan small pairs first (positive before negative) so the reported
    // counterexample is the simplest one
    let mut pairs: Vec<(i64, i64)> = Vec::new();
    for m in -window..=window {
        for n in -window..=window {
            if (m + n).abs() <= window {
                pairs.push((m, n));
            }
        }
    }
    pairs.sort_by_key(|&(m, n)| (m.abs() + n.abs(), (m < 0 || n < 0) as i64, m.abs().max(n.abs()), -m, -n));
    for (m, n) in pairs {
        let lhs = value(m + n);
        let rhs = value(m).add(&value(n));
        if lhs != rhs {
            return Ok(Classicality::Fail { m, n });
        }
    }
    Ok(Classicality::Pass)
}

/// The closed-form window ideal of the eigen-model: shifts of
/// `t′U + U⁻¹ − (1+t′)·1`.
pub fn eigen_model_ideal(tprime: &BigRational, window: i64) -> Vec<GroupElem> {
    let tp = Scalar::from_rational(tprime.clone());
    let generator = GroupElem::from_terms([
        (1, tp.clone()),
        (-1, Scalar::one()),
        (0, -&(&tp + &Scalar::one())),
    ]);
    let mut out = Vec::new();
    for k in -(window - 1)..=(window - 1) {
        out.push(&generator * &GroupElem::u_pow(k));
    }
    out
}

/// Compares two window ideals as spans inside `ker ε`.
pub fn same_ideal_span(a: &[GroupElem], b: &[GroupElem], window: i64) -> Result<bool, FodcError> {
    let rows_a: Result<Vec<Vec<Scalar>>, _> = a.iter().map(|g| to_kernel_coords(g, window)).collect();
    let rows_b: Result<Vec<Vec<Scalar>>, _> = b.iter().map(|g| to_kernel_coords(g, window)).collect();
    Ok(Matrix::from_rows(rows_a?).same_row_span(&Matrix::from_rows(rows_b?)))
}
