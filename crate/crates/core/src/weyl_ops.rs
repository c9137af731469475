//! Translation and reflection operators on the `N`-dimensional torus space.
//!
//! Labels are kept as integer numerators and never reduced: shifting a
//! label by a full period multiplies the operator by a sign.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase_space::PhasePoint;
use crate::torus::{phase_pi_over_n, OperatorMatrix, TorusHilbert};

/// Chord `ξ = (a/N, b/N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LatticeChord {
    pub a: i64,
    pub b: i64,
}

/// Center `x = (a/2N, b/2N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LatticeCenter {
    pub a: i64,
    pub b: i64,
}

fn snap(v: f64, scale: f64) -> Option<i64> {
    let r = (v * scale).round();
    ((v * scale - r).abs() < 1e-9).then_some(r as i64)
}

impl LatticeChord {
    pub fn new(a: i64, b: i64) -> Self {
        LatticeChord { a, b }
    }

    pub fn from_point(space: &TorusHilbert, xi: PhasePoint) -> Result<Self> {
        let s = space.n as f64;
        match (snap(xi.p, s), snap(xi.q, s)) {
            (Some(a), Some(b)) => Ok(LatticeChord { a, b }),
            _ => Err(Error::OffLattice { p: xi.p, q: xi.q, n: space.n }),
        }
    }

    pub fn point(&self, space: &TorusHilbert) -> PhasePoint {
        let n = space.n as f64;
        PhasePoint::new(self.a as f64 / n, self.b as f64 / n)
    }
}

impl LatticeCenter {
    pub fn new(a: i64, b: i64) -> Self {
        LatticeCenter { a, b }
    }

    /// Center on the integer grid `(a/N, b/N)`.
    pub fn integer(a: i64, b: i64) -> Self {
        LatticeCenter { a: 2 * a, b: 2 * b }
    }

    pub fn from_point(space: &TorusHilbert, x: PhasePoint) -> Result<Self> {
        let s = 2.0 * space.n as f64;
        match (snap(x.p, s), snap(x.q, s)) {
            (Some(a), Some(b)) => Ok(LatticeCenter { a, b }),
            _ => Err(Error::OffLattice { p: x.p, q: x.q, n: space.n }),
        }
    }

    pub fn point(&self, space: &TorusHilbert) -> PhasePoint {
        let n = 2.0 * space.n as f64;
        PhasePoint::new(self.a as f64 / n, self.b as f64 / n)
    }
}

/// `T_ξ|q_n> = e^{(i/ħ) p (q_n + q/2)} |q_n + q>` with wraparound.
pub fn translation(space: &TorusHilbert, xi: LatticeChord) -> OperatorMatrix {
    let n = space.n;
    let ni = n as i64;
    let mut a = Array2::zeros((n, n));
    for k in 0..ni {
        let row = (k + xi.b).rem_euclid(ni) as usize;
        a[[row, k as usize]] = phase_pi_over_n(xi.a * (2 * k + xi.b), n);
    }
    OperatorMatrix { a }
}

/// `R_x|q_n> = e^{(i/ħ) p (q - 2 q_n)}|2q - q_n>` for `x = (p, q)`.
pub fn reflection(space: &TorusHilbert, x: LatticeCenter) -> Result<OperatorMatrix> {
    space.require_odd()?;
    let n = space.n;
    let ni = n as i64;
    let mut a = Array2::zeros((n, n));
    for k in 0..ni {
        let row = (x.b - k).rem_euclid(ni) as usize;
        a[[row, k as usize]] = phase_pi_over_n(x.a * (x.b - 2 * k), n);
    }
    Ok(OperatorMatrix { a })
}

/// `A_W(x) = Tr[R_x A]`.
pub fn weyl_symbol_via_reflection(space: &TorusHilbert, op: &OperatorMatrix, x: LatticeCenter) -> Result<Complex64> {
    Ok(reflection(space, x)?.dot(op).trace())
}

/// `Δ3(x2, x1, x) = 2 (x2 - x) ∧ (x1 - x)`.
pub fn delta3(x2: PhasePoint, x1: PhasePoint, x: PhasePoint) -> f64 {
    2.0 * (x2 - x).wedge(x1 - x)
}

/// Maximum deviation observed for each operator identity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub samples: usize,
    /// `T_{ξ2} T_{ξ1} = T_{ξ1+ξ2} e^{-(i/2ħ) ξ1∧ξ2}`.
    pub translation_group: f64,
    /// `T_ξ† = T_{-ξ}`.
    pub translation_inverse: f64,
    /// `R_x T_ξ = R_{x-ξ/2} e^{-(i/ħ) x∧ξ}`.
    pub reflect_translate: f64,
    /// `T_ξ R_x = R_{x+ξ/2} e^{-(i/ħ) x∧ξ}`.
    pub translate_reflect: f64,
    /// `R_{x1} R_{x2} = T_{2(x1-x2)} e^{-(i/ħ) 2 x1∧x2}`.
    pub reflect_reflect: f64,
    /// `R_{x2} R_x R_{x1} = e^{(i/ħ)Δ3} R_{x2-x+x1}`.
    pub three_reflections: f64,
    /// `R_x R_x = 1`.
    pub involution: f64,
    /// `(1/N) Σ_x R_x = 1` over the `N²` integer-grid centers.
    pub completeness: f64,
    /// `Tr[R_{x1} R_{x2}] = N δ_{x1,x2}` on the integer grid.
    pub orthogonality: f64,
    /// `max |U†U - 1|` over all constructed operators.
    pub unitarity: f64,
}

impl IdentityReport {
    pub fn max_deviation(&self) -> f64 {
        [
            self.translation_group,
            self.translation_inverse,
            self.reflect_translate,
            self.translate_reflect,
            self.reflect_reflect,
            self.three_reflections,
            self.involution,
            self.completeness,
            self.orthogonality,
            self.unitarity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_deviation() < tol
    }
}

/// Checks the composition laws on `samples` random labels (seeded) plus the
/// full-grid completeness and orthogonality relations.
pub fn compose_identities_report(space: &TorusHilbert, samples: usize, seed: u64) -> Result<IdentityReport> {
    space.require_odd()?;
    let n = space.n;
    let ni = n as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = IdentityReport {
        n,
        samples,
        ..Default::default()
    };
    let span = 3 * ni;
    let chord = |rng: &mut ChaCha8Rng| LatticeChord::new(rng.gen_range(-span..span), rng.gen_range(-span..span));
    let center = |rng: &mut ChaCha8Rng| LatticeCenter::new(rng.gen_range(-span..span), rng.gen_range(-span..span));
    let up = |acc: &mut f64, a: &OperatorMatrix, b: &OperatorMatrix| *acc = acc.max(a.max_abs_diff(b));
    let unit = |acc: &mut f64, a: &OperatorMatrix| *acc = acc.max(a.unitarity_defect());

    for _ in 0..samples {
        let (k1, k2) = (chord(&mut rng), chord(&mut rng));
        let (x, x1, x2) = (center(&mut rng), center(&mut rng), center(&mut rng));
        let t1 = translation(space, k1);
        let t2 = translation(space, k2);
        let (rx, r1, r2) = (reflection(space, x)?, reflection(space, x1)?, reflection(space, x2)?);
        for op in [&t1, &t2, &rx, &r1, &r2] {
            unit(&mut r.unitarity, op);
        }

        // phases below are iπ·(integer)/N
        let w = |a: (i64, i64), b: (i64, i64)| a.0 * b.1 - a.1 * b.0;
        let tsum = translation(space, LatticeChord::new(k1.a + k2.a, k1.b + k2.b));
        up(
            &mut r.translation_group,
            &t2.dot(&t1),
            &tsum.scale(phase_pi_over_n(-w((k1.a, k1.b), (k2.a, k2.b)), n)),
        );
        up(&mut r.translation_inverse, &t1.dagger(), &translation(space, LatticeChord::new(-k1.a, -k1.b)));

        let xk = w((x.a, x.b), (k1.a, k1.b));
        let lhs = rx.dot(&t1);
        let rhs = reflection(space, LatticeCenter::new(x.a - k1.a, x.b - k1.b))?.scale(phase_pi_over_n(-xk, n));
        up(&mut r.reflect_translate, &lhs, &rhs);
        let lhs = t1.dot(&rx);
        let rhs = reflection(space, LatticeCenter::new(x.a + k1.a, x.b + k1.b))?.scale(phase_pi_over_n(-xk, n));
        up(&mut r.translate_reflect, &lhs, &rhs);

        let lhs = r1.dot(&r2);
        let rhs = translation(space, LatticeChord::new(x1.a - x2.a, x1.b - x2.b))
            .scale(phase_pi_over_n(-w((x1.a, x1.b), (x2.a, x2.b)), n));
        up(&mut r.reflect_reflect, &lhs, &rhs);

        let lhs = r2.dot(&rx).dot(&r1);
        let d3 = w((x2.a - x.a, x2.b - x.b), (x1.a - x.a, x1.b - x.b));
        let rhs = reflection(space, LatticeCenter::new(x2.a - x.a + x1.a, x2.b - x.b + x1.b))?
            .scale(phase_pi_over_n(d3, n));
        up(&mut r.three_reflections, &lhs, &rhs);

        up(&mut r.involution, &rx.dot(&rx), &OperatorMatrix::identity(n));
    }

    let grid: Vec<OperatorMatrix> = (0..ni)
        .flat_map(|a| (0..ni).map(move |b| (a, b)))
        .map(|(a, b)| reflection(space, LatticeCenter::integer(a, b)))
        .collect::<Result<_>>()?;
    let mut sum = OperatorMatrix::zeros(n);
    for g in &grid {
        sum.a += &g.a;
    }
    up(
        &mut r.completeness,
        &sum.scale(Complex64::new(1.0 / n as f64, 0.0)),
        &OperatorMatrix::identity(n),
    );
    for (i, gi) in grid.iter().enumerate() {
        for (j, gj) in grid.iter().enumerate() {
            let tr = gi.dot(gj).trace();
            let want = if i == j { n as f64 } else { 0.0 };
            r.orthogonality = r.orthogonality.max((tr - want).norm());
        }
    }
    Ok(r)
}
